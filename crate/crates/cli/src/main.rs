use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nonnormal_cli::{config::Scalar, output_dir, CliError, RunConfig, TestPoints};

#[derive(Parser)]
#[command(name = "nonnormal", version, about = "Spectra of noisy non-normal matrices")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config and $NONNORMAL_OUT).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Config overrides as `--key value` pairs; dotted keys reach nested fields.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--KEY VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of the perturbed model, one CSV per seed.
    Simulate(RunArgs),
    /// Limit-law samples and predicted log potentials.
    Predict(RunArgs),
    /// Noisy log-determinants against the deterministic equivalent.
    Detequiv(RunArgs),
    /// Singular-value sandwich checks on bidiagonal models.
    Rigidity(RunArgs),
    /// Smallest singular value of M - z on a grid.
    Pseudospec(RunArgs),
    /// Compare two eigenvalue samples.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON list of test points, each a real number or [re, im].
        #[arg(long)]
        test_points: Option<String>,
    },
    /// Run the acceptance suite.
    Accept,
}

/// `--config` and `--out` may also appear among the trailing overrides.
fn load(args: &RunArgs) -> Result<(RunConfig, PathBuf), CliError> {
    let (mut config, mut out) = (args.config.clone(), args.out.clone());
    let mut rest = Vec::new();
    let mut it = args.overrides.iter();
    while let Some(tok) = it.next() {
        let slot = match tok.split_once('=').map_or(tok.as_str(), |(k, _)| k) {
            "--config" => &mut config,
            "--out" => &mut out,
            _ => {
                rest.push(tok.clone());
                continue;
            }
        };
        let value = match tok.split_once('=') {
            Some((_, v)) => v.to_string(),
            None => it.next().cloned().ok_or_else(|| CliError::Usage(format!("{tok} needs a value")))?,
        };
        *slot = Some(PathBuf::from(value));
    }
    let text = config.as_deref().map(read_file).transpose()?;
    let cfg = RunConfig::load(text.as_deref(), &rest)?;
    let out = output_dir(out.as_deref(), Some(&cfg));
    Ok((cfg, out))
}

fn read_file(p: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(p).map_err(|source| CliError::Io {
        path: p.to_path_buf(),
        source,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let report = |files: Vec<String>, out: &std::path::Path| {
        for f in files {
            println!("{}", out.join(f).display());
        }
    };
    match cli.command {
        Command::Accept => {
            nonnormal_cli::cmd_accept(std::io::stdout())?;
        }
        Command::Compare { a, b, out, test_points } => {
            let tp = match test_points {
                Some(t) => {
                    let pts: Vec<Scalar> =
                        serde_json::from_str(&t).map_err(|e| CliError::Usage(format!("--test-points: {e}")))?;
                    TestPoints::Points { points: pts }
                }
                None => TestPoints::default(),
            };
            let out = output_dir(out.as_deref(), None);
            report(nonnormal_cli::cmd_compare(&a, &b, &tp.resolve(), &out)?, &out);
        }
        Command::Simulate(args) => {
            let (cfg, out) = load(&args)?;
            report(nonnormal_cli::cmd_simulate(&cfg, &out)?, &out);
        }
        Command::Predict(args) => {
            let (cfg, out) = load(&args)?;
            report(nonnormal_cli::cmd_predict(&cfg, &out)?, &out);
        }
        Command::Detequiv(args) => {
            let (cfg, out) = load(&args)?;
            report(nonnormal_cli::cmd_detequiv(&cfg, &out)?, &out);
        }
        Command::Rigidity(args) => {
            let (cfg, out) = load(&args)?;
            report(nonnormal_cli::cmd_rigidity(&cfg, &out)?, &out);
        }
        Command::Pseudospec(args) => {
            let (cfg, out) = load(&args)?;
            report(nonnormal_cli::cmd_pseudospec(&cfg, &out)?, &out);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
