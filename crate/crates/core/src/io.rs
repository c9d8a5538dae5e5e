//! Field dumps and solution bundles on disk.
//!
//! A field dump is the ASCII line `GSQG1 n L s` followed by `n * n`
//! little-endian `f64` values in storage order. A bundle directory holds
//! `psi_star.bin`, `theta_star.bin`, `energy_history.csv` and `summary.json`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};
use crate::minimizer::{SolutionBundle, SolveConfig, StopReason};

pub const FIELD_MAGIC: &str = "GSQG1";
pub const PSI_FILE: &str = "psi_star.bin";
pub const THETA_FILE: &str = "theta_star.bin";
pub const HISTORY_FILE: &str = "energy_history.csv";
pub const SUMMARY_FILE: &str = "summary.json";

pub fn write_field(path: &Path, field: &ScalarField, s: f64) -> Result<()> {
    let grid = field.grid();
    let mut bytes = format!("{FIELD_MAGIC} {} {} {}\n", grid.n(), grid.half_width(), s).into_bytes();
    bytes.reserve(8 * field.values().len());
    for v in field.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Returns the field and the exponent `s` recorded in its header.
pub fn read_field(path: &Path) -> Result<(ScalarField, f64)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let unsupported = |header: &str| Error::UnsupportedFormat {
        path: path.to_path_buf(),
        header: header.to_string(),
    };
    let newline = bytes
        .iter()
        .take(256)
        .position(|&b| b == b'\n')
        .ok_or_else(|| unsupported("<no header line>"))?;
    let header = std::str::from_utf8(&bytes[..newline]).map_err(|_| unsupported("<binary>"))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != FIELD_MAGIC {
        return Err(unsupported(header));
    }
    let n: usize = parts[1].parse().map_err(|_| unsupported(header))?;
    let l: f64 = parts[2].parse().map_err(|_| unsupported(header))?;
    let s: f64 = parts[3].parse().map_err(|_| unsupported(header))?;
    let grid = Grid::new(n, l)?;
    let body = &bytes[newline + 1..];
    if body.len() != 8 * grid.len() {
        return Err(Error::GridMismatch(format!(
            "{}: expected {} bytes of data for n = {n}, found {}",
            path.display(),
            8 * grid.len(),
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok((ScalarField::from_values(grid, values)?, s))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub version: String,
    pub alpha: f64,
    pub beta_witness: f64,
    pub residual_final: f64,
    pub t_final: f64,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub config: SolveConfig,
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn write_bundle(bundle: &SolutionBundle, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let s = bundle.config.s;
    write_field(&dir.join(PSI_FILE), &bundle.psi_star, s)?;
    write_field(&dir.join(THETA_FILE), &bundle.theta_star, s)?;

    let history_path = dir.join(HISTORY_FILE);
    let mut csv = String::from("step,energy\n");
    for (i, e) in bundle.energy_history.iter().enumerate() {
        csv.push_str(&format!("{i},{e:?}\n"));
    }
    let mut file = fs::File::create(&history_path).map_err(|e| Error::io(&history_path, e))?;
    file.write_all(csv.as_bytes())
        .map_err(|e| Error::io(&history_path, e))?;

    let summary = Summary {
        version: env!("CARGO_PKG_VERSION").to_string(),
        alpha: bundle.alpha,
        beta_witness: bundle.beta_witness,
        residual_final: bundle.residual_final,
        t_final: bundle.t_final,
        iterations: bundle.iterations,
        stop_reason: bundle.stop_reason,
        config: bundle.config.clone(),
    };
    write_json(&dir.join(SUMMARY_FILE), &summary)
}

pub fn read_bundle(dir: &Path) -> Result<SolutionBundle> {
    let summary_path = dir.join(SUMMARY_FILE);
    let text = fs::read_to_string(&summary_path).map_err(|e| Error::io(&summary_path, e))?;
    let summary: Summary = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: summary_path.clone(),
        source: e,
    })?;
    let (psi, _) = read_field(&dir.join(PSI_FILE))?;
    let (theta, _) = read_field(&dir.join(THETA_FILE))?;
    let expected = summary.config.grid()?;
    for (name, field) in [(PSI_FILE, &psi), (THETA_FILE, &theta)] {
        if *field.grid() != expected {
            return Err(Error::GridMismatch(format!(
                "{name} has n = {}, L = {} but the summary says n = {}, L = {}",
                field.grid().n(),
                field.grid().half_width(),
                expected.n(),
                expected.half_width()
            )));
        }
    }
    let history = read_history(&dir.join(HISTORY_FILE))?;
    Ok(SolutionBundle {
        psi_star: psi,
        theta_star: theta,
        t_final: summary.t_final,
        energy_history: history,
        residual_final: summary.residual_final,
        alpha: summary.alpha,
        beta_witness: summary.beta_witness,
        iterations: summary.iterations,
        stop_reason: summary.stop_reason,
        config: summary.config,
    })
}

fn read_history(path: &PathBuf) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            line.split(',')
                .nth(1)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::UnsupportedFormat {
                    path: path.clone(),
                    header: line.to_string(),
                })
        })
        .collect()
}
