//! Text formats: sample files, spectrum CSV, estimate JSON, grid and
//! selection-trace CSV.
//!
//! CSV floats use `{:.16e}` (17 significant digits); JSON floats use the
//! shortest representation that parses back to the same `f64`. Both are
//! lossless.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::estimator::{DeconvEstimate, EstimateRecord};
use crate::selection::SelectionResult;
use crate::spectral::{CircularSample, SpectralVector};

/// Parses newline-delimited values; blank lines and lines starting with `#`
/// are skipped. Every value must lie in `[0, 1)`.
pub fn parse_sample(text: &str) -> Result<CircularSample> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("not a number: {line:?}"),
        })?;
        if !(0.0..1.0).contains(&v) {
            return Err(Error::OutOfDomain {
                index: values.len(),
                value: v,
            });
        }
        values.push(v);
    }
    CircularSample::new(values)
}

pub fn read_sample(path: &Path) -> Result<CircularSample> {
    parse_sample(&std::fs::read_to_string(path)?)
}

pub fn format_sample(sample: &CircularSample) -> String {
    let mut out = String::new();
    for v in sample.values() {
        writeln!(out, "{v:.16e}").unwrap();
    }
    out
}

/// `j,re,im` rows for `j = -K..=K`.
pub fn format_spectrum_csv(spec: &SpectralVector) -> String {
    let mut out = String::from("j,re,im\n");
    for (j, c) in spec.iter() {
        writeln!(out, "{j},{:.16e},{:.16e}", c.re, c.im).unwrap();
    }
    out
}

pub fn parse_spectrum_csv(text: &str) -> Result<SpectralVector> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, header)) if header.trim() == "j,re,im" => {}
        Some((i, _)) => {
            return Err(Error::Parse {
                line: i + 1,
                message: "expected header `j,re,im`".into(),
            })
        }
        None => return Err(Error::EmptySample),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let bad = |message: String| Error::Parse { line: i + 1, message };
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 3 {
            return Err(bad(format!("expected 3 fields, got {}", fields.len())));
        }
        let j: i64 = fields[0].trim().parse().map_err(|_| bad(format!("bad index {:?}", fields[0])))?;
        let re: f64 = fields[1].trim().parse().map_err(|_| bad(format!("bad number {:?}", fields[1])))?;
        let im: f64 = fields[2].trim().parse().map_err(|_| bad(format!("bad number {:?}", fields[2])))?;
        rows.push((i + 1, j, Complex64::new(re, im)));
    }
    if rows.is_empty() {
        return Err(Error::EmptySample);
    }
    let k = (rows.len() / 2) as i64;
    for (pos, (line, j, _)) in rows.iter().enumerate() {
        if rows.len() % 2 == 0 || *j != pos as i64 - k {
            return Err(Error::Parse {
                line: *line,
                message: format!("rows must list j = -{k}..={k} in ascending order"),
            });
        }
    }
    let spec = SpectralVector::new(rows.into_iter().map(|(_, _, c)| c).collect())?;
    if !spec.is_hermitian() {
        return Err(Error::NonHermitian);
    }
    Ok(spec)
}

pub fn estimate_to_json(est: &DeconvEstimate) -> Result<String> {
    Ok(serde_json::to_string_pretty(&EstimateRecord::from(est))?)
}

pub fn estimate_from_json(text: &str) -> Result<DeconvEstimate> {
    let rec: EstimateRecord = serde_json::from_str(text)?;
    DeconvEstimate::try_from(rec)
}

/// `x,f_hat` rows for `x = t / G`.
pub fn format_grid_csv(values: &[f64]) -> String {
    let g = values.len() as f64;
    let mut out = String::from("x,f_hat\n");
    for (t, v) in values.iter().enumerate() {
        writeln!(out, "{:.16e},{v:.16e}", t as f64 / g).unwrap();
    }
    out
}

/// `k,contrast,penalty,criterion` rows for every candidate `k`.
pub fn format_selection_trace(sel: &SelectionResult) -> String {
    let mut out = String::from("k,contrast,penalty,criterion\n");
    for (k, c, p, v) in sel.trace() {
        writeln!(out, "{k},{c:.16e},{p:.16e},{v:.16e}").unwrap();
    }
    out
}
