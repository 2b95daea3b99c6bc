use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use nonnormal::acceptance::{self, CriterionOutcome};
use nonnormal::io;
use nonnormal::limitlaw::{
    expected_log_distance, limit_logpot_iid, limit_logpot_toeplitz, limit_logpot_twisted, sample_limit_law,
    uniform_mean, IidMethod, DEFAULT_X_NODES,
};
use nonnormal::linalg::SmallestMode;
use nonnormal::models::{
    build_banded_toeplitz, build_bidiagonal, build_jordan, build_regularized, build_twisted, perturb, sample_diagonal,
    DiagonalLaw, Generator, NoiseSpec, TwistedSymbol,
};
use nonnormal::rigidity::{holder_partition, iid_partition, theorem31_check, THEOREM31_MAX_N};
use nonnormal::spectra::{compare_measures, esd, pseudospectrum_grid, GridSpec, SpectrumMeta};
use nonnormal::{CMatrix, C64};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{ModelKind, RunConfig};
use crate::{read, CliError, Output};

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn model_name(cfg: &RunConfig) -> String {
    serde_json::to_value(cfg.model)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Diagonal of a bidiagonal model; the seed only matters for i.i.d. laws.
fn diagonal(cfg: &RunConfig, seed: u64) -> Result<Vec<C64>, CliError> {
    Ok(match cfg.model {
        ModelKind::BidiagonalIid => sample_diagonal(cfg.law.as_ref().expect("validated"), cfg.n, seed)?,
        ModelKind::BidiagonalProfile => {
            let law = DiagonalLaw::Profile {
                profile: cfg.profile.clone().expect("validated"),
            };
            sample_diagonal(&law, cfg.n, seed)?
        }
        ModelKind::Jordan => vec![cfg.z.expect("validated").value(); cfg.n],
        _ => return Err(CliError::Config(format!("model {} is not bidiagonal", model_name(cfg)))),
    })
}

/// Noise-free matrix of the configured model.
pub fn base_matrix(cfg: &RunConfig, seed: u64) -> Result<CMatrix, CliError> {
    Ok(match cfg.model {
        ModelKind::Toeplitz => build_banded_toeplitz(&cfg.toeplitz_symbol()?, cfg.n)?,
        ModelKind::Twisted => {
            let sym = cfg.symbol.as_ref().expect("validated");
            match &cfg.regularization {
                Some(r) => build_regularized(sym, cfg.n, r, cfg.gamma)?,
                None => build_twisted(sym, cfg.n)?,
            }
        }
        ModelKind::Jordan => build_jordan(cfg.n, cfg.z.expect("validated").value()),
        ModelKind::BidiagonalIid | ModelKind::BidiagonalProfile => build_bidiagonal(&diagonal(cfg, seed)?),
    })
}

/// Symbol whose limit law the model follows, when it has one.
fn limit_symbol(cfg: &RunConfig) -> Result<Option<TwistedSymbol>, CliError> {
    Ok(match cfg.model {
        ModelKind::Toeplitz => Some(cfg.toeplitz_symbol()?),
        ModelKind::Twisted => cfg.symbol.clone(),
        ModelKind::BidiagonalProfile => Some(TwistedSymbol {
            generators: vec![cfg.profile.clone().expect("validated"), Generator::constant(one())],
        }),
        ModelKind::Jordan => Some(TwistedSymbol::constant(&[cfg.z.expect("validated").value(), one()])?),
        ModelKind::BidiagonalIid => None,
    })
}

fn predicted_logpot(cfg: &RunConfig, z: C64) -> Result<f64, CliError> {
    Ok(match cfg.model {
        ModelKind::BidiagonalIid => limit_logpot_iid(cfg.law.as_ref().expect("validated"), z, IidMethod::Quadrature)?,
        _ => {
            let sym = limit_symbol(cfg)?.expect("non-iid models have a symbol");
            match sym.constant_coefficients() {
                Some(a) => limit_logpot_toeplitz(&a, z)?,
                None => limit_logpot_twisted(&sym, z, DEFAULT_X_NODES)?.value,
            }
        }
    })
}

/// Eigenvalues of the perturbed model, one ESD file per seed.
pub fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<Vec<String>, CliError> {
    let started = Instant::now();
    let mut o = Output::create(out)?;
    let samples = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            let noisy = perturb(&base_matrix(cfg, seed)?, &NoiseSpec::new(cfg.gamma, seed)?)?;
            let meta = SpectrumMeta {
                n: cfg.n,
                gamma: Some(cfg.gamma),
                seed: Some(seed),
                model: model_name(cfg),
            };
            Ok(esd(&noisy, meta)?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    for (s, seed) in samples.iter().zip(&cfg.seeds) {
        o.write(&format!("esd_seed{seed}.csv"), &io::write_esd_csv(&s.points))?;
    }
    o.finish("simulate", Some(cfg), json!({}), started)
}

/// Limit-law samples (when the model has a symbol) and predicted log
/// potentials at the test points.
pub fn cmd_predict(cfg: &RunConfig, out: &Path) -> Result<Vec<String>, CliError> {
    let started = Instant::now();
    let mut o = Output::create(out)?;
    if let Some(sym) = limit_symbol(cfg)? {
        let pts = sample_limit_law(&sym, cfg.samples, cfg.seeds[0])?;
        o.write("predicted_law.csv", &io::write_esd_csv(&pts))?;
    }
    let zs = cfg.test_points.resolve();
    let values = zs
        .par_iter()
        .map(|&z| predicted_logpot(cfg, z))
        .collect::<Result<Vec<_>, _>>()?;
    o.write("predicted_logpot.csv", &logpot_csv(&zs, &values))?;
    o.finish("predict", Some(cfg), json!({}), started)
}

fn logpot_csv(zs: &[C64], values: &[f64]) -> String {
    let mut s = String::from("re,im,logpot\n");
    for (z, v) in zs.iter().zip(values) {
        let _ = writeln!(s, "{:.16e},{:.16e},{:.16e}", z.re, z.im, v);
    }
    s
}

/// Noisy log-determinants against `g_N(z)` at every test point.
pub fn cmd_detequiv(cfg: &RunConfig, out: &Path) -> Result<Vec<String>, CliError> {
    let started = Instant::now();
    let mut o = Output::create(out)?;
    let base = base_matrix(cfg, cfg.seeds[0])?;
    let tc = cfg.truncation();
    let mut summary = Vec::new();
    for (k, z) in cfg.test_points.resolve().into_iter().enumerate() {
        let r = nonnormal::detequiv::equivalence_report(&base, z, &tc, &cfg.seeds)?;
        o.write(&format!("detequiv_z{k}.csv"), &io::write_detequiv_csv(&r))?;
        summary.push(json!({
            "z": [z.re, z.im],
            "n_star": r.truncation.n_star,
            "alpha_hat": r.truncation.alpha_hat,
            "max_abs_discrepancy": r.max_abs_discrepancy,
            "singular_replicas": r.singular_replicas,
        }));
    }
    o.finish("detequiv", Some(cfg), json!({ "points": summary }), started)
}

/// `E |d - z|^-beta` for the i.i.d. laws with an explicit density.
fn law_moment(law: &DiagonalLaw, z: C64, beta: f64) -> Option<f64> {
    match law {
        DiagonalLaw::UniformInterval { lo, hi } => {
            Some(uniform_mean(*lo, *hi, z.re, |t| (C64::new(t, 0.0) - z).norm().powf(-beta)))
        }
        DiagonalLaw::Discrete { points, weights } => Some(
            points
                .iter()
                .zip(weights)
                .filter(|(_, w)| **w > 0.0)
                .map(|(p, w)| w * (p - z).norm().powf(-beta))
                .sum(),
        ),
        DiagonalLaw::Profile { .. } => None,
    }
}

/// Sandwich check of `D + J - z` at every test point and seed.
pub fn cmd_rigidity(cfg: &RunConfig, out: &Path) -> Result<Vec<String>, CliError> {
    let started = Instant::now();
    if cfg.n > THEOREM31_MAX_N {
        return Err(CliError::Config(format!("rigidity needs n <= {THEOREM31_MAX_N}")));
    }
    let mut o = Output::create(out)?;
    let zs = cfg.test_points.resolve();
    let seeds: Vec<u64> = match cfg.model {
        ModelKind::BidiagonalIid => cfg.seeds.clone(),
        _ => vec![cfg.seeds[0]],
    };
    let mut jobs = Vec::new();
    for &seed in &seeds {
        let d = diagonal(cfg, seed)?;
        for (k, &z) in zs.iter().enumerate() {
            jobs.push((format!("seed{seed}_z{k}"), seed, d.iter().map(|x| x - z).collect::<Vec<_>>(), z));
        }
    }
    let reports = jobs
        .into_par_iter()
        .map(|(name, _, d, z)| {
            let partition = match (&cfg.model, &cfg.law) {
                (ModelKind::BidiagonalIid, Some(law)) => {
                    let beta = if expected_log_distance(law, z, IidMethod::Quadrature)? > 0.0 { 0.5 } else { -0.5 };
                    let p = law_moment(law, z, beta).expect("i.i.d. laws have a moment");
                    iid_partition(&d, cfg.delta, beta, p)?
                }
                _ => {
                    let f: Box<dyn Fn(f64) -> C64> = match &cfg.profile {
                        Some(g) if cfg.model == ModelKind::BidiagonalProfile => Box::new(move |x| g.eval(x) - z),
                        _ => {
                            let c = cfg.z.expect("validated").value() - z;
                            Box::new(move |_| c)
                        }
                    };
                    holder_partition(f, d.len(), cfg.delta)?.0
                }
            };
            Ok((name, theorem31_check(&d, &partition)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    o.write("theorem31.csv", &io::write_theorem31_csv(&reports))?;
    let failed: Vec<&str> = reports.iter().filter(|(_, r)| !r.pass()).map(|(n, _)| n.as_str()).collect();
    let extra = json!({ "instances": reports.len(), "failed": failed });
    let files = o.finish("rigidity", Some(cfg), extra, started)?;
    if failed.is_empty() {
        Ok(files)
    } else {
        Err(CliError::Failed(format!("sandwich violated on {}", failed.join(", "))))
    }
}

/// Smallest singular value of `M - z` on the configured grid.
pub fn cmd_pseudospec(cfg: &RunConfig, out: &Path) -> Result<Vec<String>, CliError> {
    let started = Instant::now();
    let mut o = Output::create(out)?;
    let spec = cfg.grid.unwrap_or_else(|| GridSpec::square(3.0, 64));
    let field = pseudospectrum_grid(&base_matrix(cfg, cfg.seeds[0])?, &spec, SmallestMode::Auto)?;
    o.write("pseudospectrum.csv", &io::write_grid_csv(&field))?;
    o.finish("pseudospec", Some(cfg), json!({ "failed_nodes": field.failures }), started)
}

/// Compares two point clouds given as ESD files.
pub fn cmd_compare(a: &Path, b: &Path, test_z: &[C64], out: &Path) -> Result<Vec<String>, CliError> {
    let started = Instant::now();
    let load = |p: &Path| {
        io::parse_esd_csv(&read(p)?).map_err(|source| CliError::Input {
            path: p.to_path_buf(),
            source,
        })
    };
    let (pa, pb) = (load(a)?, load(b)?);
    let r = compare_measures(&pa, &pb, test_z)?;
    let mut o = Output::create(out)?;
    o.write("compare.csv", &io::write_compare_csv(&r))?;
    let extra = json!({ "a": a, "b": b, "test_points": test_z.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>() });
    o.finish("compare", None, extra, started)
}

/// Runs the acceptance suite, printing one line per criterion.
pub fn cmd_accept(mut sink: impl std::io::Write) -> Result<Vec<CriterionOutcome>, CliError> {
    let outcomes = acceptance::run_all();
    for o in &outcomes {
        let _ = writeln!(sink, "{}", o.line());
    }
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id.to_string()).collect();
    if failed.is_empty() {
        Ok(outcomes)
    } else {
        Err(CliError::Failed(format!("criteria {} failed", failed.join(", "))))
    }
}
