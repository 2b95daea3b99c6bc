//! CSV formats for matrices, spectra, grids, and reports.
//!
//! Numbers are written with 17 significant digits so they round-trip.

use std::fmt::Write as _;

use nonnormal_linalg::{CMatrix, C64};

use crate::detequiv::EquivalenceReport;
use crate::error::{Error, Result};
use crate::rigidity::Theorem31Report;
use crate::spectra::{CompareReport, GridField, GridSpec};

pub const MATRIX_HEADER: [&str; 4] = ["i", "j", "re", "im"];
pub const ESD_HEADER: [&str; 2] = ["re", "im"];
pub const GRID_HEADER: [&str; 3] = ["x", "y", "sigma_min"];
pub const DETEQUIV_HEADER: [&str; 4] = ["seed", "logdet_empirical", "g_value", "discrepancy"];
pub const THEOREM31_HEADER: [&str; 7] = ["instance", "sigma_NL", "Dfrak_inv", "lhs", "product_witness", "rhs", "pass"];
pub const COMPARE_HEADER: [&str; 7] = [
    "logpot_rmse",
    "logpot_max",
    "radial_w1",
    "angular_ks",
    "coverage",
    "used_test_points",
    "excluded_test_points",
];

/// Largest matrix dimension accepted by [`parse_matrix_csv`].
pub const MAX_MATRIX_DIM: usize = 4096;
/// Largest grid node count accepted by [`parse_grid_csv`].
pub const MAX_GRID_NODES: usize = 1 << 22;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn line(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

fn header(out: &mut String, h: &[&str]) {
    out.push_str(&h.join(","));
    out.push('\n');
}

/// Non-zero entries as `i,j,re,im` (0-based); the last diagonal entry is
/// always written so the dimension survives a round trip.
pub fn write_matrix_csv(m: &CMatrix) -> String {
    let mut out = String::new();
    header(&mut out, &MATRIX_HEADER);
    let (r, c) = (m.rows(), m.cols());
    for i in 0..r {
        for j in 0..c {
            let v = m[(i, j)];
            if v != C64::new(0.0, 0.0) || (i + 1 == r && j + 1 == c) {
                line(&mut out, &[i.to_string(), j.to_string(), num(v.re), num(v.im)]);
            }
        }
    }
    out
}

pub fn write_esd_csv(points: &[C64]) -> String {
    let mut out = String::new();
    header(&mut out, &ESD_HEADER);
    for p in points {
        line(&mut out, &[num(p.re), num(p.im)]);
    }
    out
}

pub fn write_grid_csv(g: &GridField) -> String {
    let mut out = String::new();
    header(&mut out, &GRID_HEADER);
    let xs = g.spec.xs();
    for (iy, y) in g.spec.ys().into_iter().enumerate() {
        for (ix, &x) in xs.iter().enumerate() {
            line(&mut out, &[num(x), num(y), num(g.at(ix, iy))]);
        }
    }
    out
}

pub fn write_detequiv_csv(r: &EquivalenceReport) -> String {
    let mut out = String::new();
    header(&mut out, &DETEQUIV_HEADER);
    for row in &r.rows {
        line(
            &mut out,
            &[row.seed.to_string(), num(row.logdet_empirical), num(row.g_value), num(row.discrepancy)],
        );
    }
    out
}

/// One row per instance; `lhs`, `product_witness` and `rhs` are natural
/// logarithms of the lower bound, of the product of the `L` smallest
/// singular values, and of the witness product.
pub fn write_theorem31_csv(reports: &[(String, Theorem31Report)]) -> String {
    let mut out = String::new();
    header(&mut out, &THEOREM31_HEADER);
    for (name, r) in reports {
        line(
            &mut out,
            &[
                name.clone(),
                num(r.sigma_nl.unwrap_or(f64::NAN)),
                num(1.0 / r.dfrak),
                num(r.log_lower_bound),
                num(r.log_sigma_product),
                num(r.log_witness_product),
                r.pass().to_string(),
            ],
        );
    }
    out
}

pub fn write_compare_csv(r: &CompareReport) -> String {
    let mut out = String::new();
    header(&mut out, &COMPARE_HEADER);
    line(
        &mut out,
        &[
            num(r.logpot_rmse),
            num(r.logpot_max),
            num(r.radial_w1),
            num(r.angular_ks),
            num(r.coverage),
            r.used_test_points.to_string(),
            r.excluded_test_points.len().to_string(),
        ],
    );
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Records of a headed CSV with exactly the expected columns, as
/// `(line, fields)`.
fn records(text: &str, expected: &[&str]) -> Result<Vec<(usize, Vec<String>)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let h = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?;
    if h.iter().ne(expected.iter().copied()) {
        return Err(parse_err(1, format!("expected header {}", expected.join(","))));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != expected.len() {
            return Err(parse_err(line, format!("expected {} fields, found {}", expected.len(), rec.len())));
        }
        out.push((line, rec.iter().map(str::to_owned).collect()));
    }
    Ok(out)
}

fn float(line: usize, s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|_| parse_err(line, format!("not a number: {s:?}")))
}

fn finite(line: usize, s: &str) -> Result<f64> {
    let x = float(line, s)?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(parse_err(line, format!("non-finite value {s:?}")))
    }
}

fn index(line: usize, s: &str) -> Result<usize> {
    s.parse::<usize>().map_err(|_| parse_err(line, format!("not an index: {s:?}")))
}

/// Square matrix from `i,j,re,im` rows; the dimension is one more than the
/// largest index. Duplicate entries are rejected.
pub fn parse_matrix_csv(text: &str) -> Result<CMatrix> {
    let recs = records(text, &MATRIX_HEADER)?;
    let mut entries = Vec::with_capacity(recs.len());
    let mut dim = 0usize;
    for (line, f) in &recs {
        let (i, j) = (index(*line, &f[0])?, index(*line, &f[1])?);
        if i >= MAX_MATRIX_DIM || j >= MAX_MATRIX_DIM {
            return Err(parse_err(*line, format!("index exceeds the limit {MAX_MATRIX_DIM}")));
        }
        let v = C64::new(finite(*line, &f[2])?, finite(*line, &f[3])?);
        dim = dim.max(i + 1).max(j + 1);
        entries.push((*line, i, j, v));
    }
    if dim == 0 {
        return Err(parse_err(1, "no entries"));
    }
    let mut m = CMatrix::zeros(dim, dim);
    let mut seen = vec![false; dim * dim];
    for (line, i, j, v) in entries {
        if std::mem::replace(&mut seen[i * dim + j], true) {
            return Err(parse_err(line, format!("duplicate entry ({i}, {j})")));
        }
        m[(i, j)] = v;
    }
    Ok(m)
}

pub fn parse_esd_csv(text: &str) -> Result<Vec<C64>> {
    records(text, &ESD_HEADER)?
        .iter()
        .map(|(line, f)| Ok(C64::new(finite(*line, &f[0])?, finite(*line, &f[1])?)))
        .collect()
}

/// Grid written by [`write_grid_csv`]: rows ordered by `y` then `x` on a
/// uniform tensor grid. Values may be NaN (failed nodes).
pub fn parse_grid_csv(text: &str) -> Result<GridField> {
    let recs = records(text, &GRID_HEADER)?;
    if recs.is_empty() {
        return Err(parse_err(1, "empty grid"));
    }
    if recs.len() > MAX_GRID_NODES {
        return Err(parse_err(1, "grid too large"));
    }
    let mut rows = Vec::with_capacity(recs.len());
    for (line, f) in &recs {
        rows.push((*line, finite(*line, &f[0])?, finite(*line, &f[1])?, float(*line, &f[2])?));
    }
    let y0 = rows[0].2;
    let nx = rows.iter().take_while(|r| r.2 == y0).count();
    if rows.len() % nx != 0 {
        return Err(parse_err(rows[rows.len() - 1].0, "grid is not rectangular"));
    }
    let ny = rows.len() / nx;
    let xs: Vec<f64> = rows[..nx].iter().map(|r| r.1).collect();
    let ys: Vec<f64> = rows.iter().step_by(nx).map(|r| r.2).collect();
    let spec = GridSpec {
        x_min: xs[0],
        x_max: xs[nx - 1],
        y_min: ys[0],
        y_max: ys[ny - 1],
        nx,
        ny,
    };
    spec.validate().map_err(|e| parse_err(1, e.to_string()))?;
    let (gx, gy) = (spec.xs(), spec.ys());
    let close = |a: f64, b: f64, scale: f64| (a - b).abs() <= 1e-9 * scale.max(1.0);
    let sx = spec.x_max.abs().max(spec.x_min.abs());
    let sy = spec.y_max.abs().max(spec.y_min.abs());
    let mut values = Vec::with_capacity(rows.len());
    let mut failures = 0;
    for (k, &(line, x, y, v)) in rows.iter().enumerate() {
        if !close(x, gx[k % nx], sx) || !close(y, gy[k / nx], sy) {
            return Err(parse_err(line, "node is off the uniform grid"));
        }
        if v.is_nan() {
            failures += 1;
        }
        values.push(v);
    }
    Ok(GridField { spec, values, failures })
}

/// Text table of `name,value` pairs, used for small summaries.
pub fn key_values(pairs: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        let _ = writeln!(out, "{k},{v}");
    }
    out
}
