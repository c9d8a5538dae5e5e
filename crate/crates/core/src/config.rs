//! Flat `key = value` run configuration with command-line overrides.
//!
//! ```text
//! # comments and blank lines are ignored
//! n = 256
//! L = 8
//! s = 0.5
//! ```

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::minimizer::SolveConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub solve: SolveConfig,
    pub out: Option<PathBuf>,
    /// Run the far-field decay check in `verify`.
    pub verify_decay: bool,
    /// Horizon and step used by `evolve` when not given on the command line.
    pub evolve_t: f64,
    pub evolve_dt: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let solve = SolveConfig::default();
        let h = 2.0 * solve.l / solve.n as f64;
        RunConfig {
            evolve_t: 8.0 * h / solve.c,
            evolve_dt: 0.01,
            solve,
            out: None,
            verify_decay: true,
        }
    }
}

pub const KEYS: &[&str] = &[
    "n",
    "L",
    "s",
    "c",
    "k",
    "nu",
    "mu",
    "r0",
    "w",
    "amplitude",
    "max_iter",
    "tol_residual",
    "tol_energy",
    "sym_every",
    "step0",
    "backtrack",
    "out",
    "verify_decay",
    "evolve_T",
    "evolve_dt",
];

/// Reads `path` (if any), then applies `overrides` of the form `key=value`.
pub fn parse_config(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig> {
    let mut entries = Vec::new();
    if let Some(path) = path {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        entries.extend(split_lines(&text, &path.display().to_string())?);
    }
    for (i, item) in overrides.iter().enumerate() {
        let location = format!("override {}", i + 1);
        let (key, value) = split_entry(item, &location)?;
        entries.push((location, key, value));
    }
    build(entries)
}

/// Parses configuration text; `origin` names it in error messages.
pub fn parse_str(text: &str, origin: &str) -> Result<RunConfig> {
    build(split_lines(text, origin)?)
}

type Entry = (String, String, String);

fn split_lines(text: &str, origin: &str) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let location = format!("{origin}:{}", i + 1);
        let (key, value) = split_entry(line, &location)?;
        out.push((location, key, value));
    }
    Ok(out)
}

fn split_entry(item: &str, location: &str) -> Result<(String, String)> {
    match item.split_once('=') {
        Some((k, v)) => Ok((k.trim().to_string(), v.trim().to_string())),
        None => Err(Error::BadValue {
            location: location.to_string(),
            key: item.trim().to_string(),
            msg: "expected `key = value`".into(),
        }),
    }
}

fn build(entries: Vec<Entry>) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let (mut r0_set, mut w_set, mut t_set) = (false, false, false);
    let mut last_location = String::from("defaults");
    for (location, key, value) in &entries {
        let bad = |msg: String| Error::BadValue {
            location: location.clone(),
            key: key.clone(),
            msg,
        };
        let real = || -> Result<f64> {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("`{value}` is not a finite number")))
        };
        let positive = || -> Result<f64> {
            let v = real()?;
            if v > 0.0 {
                Ok(v)
            } else {
                Err(bad(format!("{v} must be positive")))
            }
        };
        let count = || -> Result<usize> {
            value
                .parse::<usize>()
                .map_err(|_| bad(format!("`{value}` is not a non-negative integer")))
        };
        let sv = &mut cfg.solve;
        match key.as_str() {
            "n" => {
                let n = count()?;
                if n < 4 || !n.is_power_of_two() {
                    return Err(bad(format!("{n} must be a power of two >= 4")));
                }
                sv.n = n;
            }
            "L" => sv.l = positive()?,
            "s" => {
                let s = real()?;
                if !(s > 0.0 && s < 1.0) {
                    return Err(bad(format!("{s} must lie in the open interval (0, 1)")));
                }
                sv.s = s;
            }
            "c" => sv.c = positive()?,
            "k" => sv.k = positive()?,
            "nu" => sv.nu = positive()?,
            "mu" => sv.mu = positive()?,
            "r0" => {
                sv.r0 = positive()?;
                r0_set = true;
            }
            "w" => {
                sv.w = positive()?;
                w_set = true;
            }
            "amplitude" => sv.amplitude = positive()?,
            "max_iter" => sv.max_iter = count()?,
            "tol_residual" => sv.tol_residual = positive()?,
            "tol_energy" => sv.tol_energy = positive()?,
            "sym_every" => {
                let m = count()?;
                if m == 0 {
                    return Err(bad("must be at least 1".into()));
                }
                sv.sym_every = m;
            }
            "step0" => sv.step0 = positive()?,
            "backtrack" => {
                let b = real()?;
                if !(b > 0.0 && b < 1.0) {
                    return Err(bad(format!("{b} must lie in (0, 1)")));
                }
                sv.backtrack = b;
            }
            "out" => cfg.out = Some(PathBuf::from(value)),
            "verify_decay" => {
                cfg.verify_decay = value
                    .parse()
                    .map_err(|_| bad(format!("`{value}` is not true/false")))?
            }
            "evolve_T" => {
                cfg.evolve_t = real()?;
                if cfg.evolve_t < 0.0 {
                    return Err(bad("must be non-negative".into()));
                }
                t_set = true;
            }
            "evolve_dt" => cfg.evolve_dt = positive()?,
            _ => {
                return Err(Error::UnknownKey {
                    location: location.clone(),
                    key: key.clone(),
                })
            }
        }
        last_location = location.clone();
    }
    let sv = &mut cfg.solve;
    if !r0_set {
        sv.r0 = sv.l / 4.0;
    }
    if !w_set {
        sv.w = sv.l / 16.0;
    }
    if !t_set {
        cfg.evolve_t = 8.0 * (2.0 * sv.l / sv.n as f64) / sv.c;
    }
    cfg.solve.validate().map_err(|e| Error::BadValue {
        location: last_location,
        key: "(combination)".into(),
        msg: e.to_string(),
    })?;
    Ok(cfg)
}
