//! Estimator output and its on-disk form.
//!
//! A [`DensityEstimate`] is written as a two-column CSV (`x,value`) plus a
//! JSON sidecar next to it (`<file>.json`) that records the configuration
//! and the regularization parameters. Numbers are printed with Rust's
//! shortest round-trip formatting, so equal estimates give equal bytes.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gsse::GsseConfig;
use crate::scalar::Scalar;
use crate::sse::SseConfig;

/// The configuration that produced an estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum EstimatorConfig {
    Sse(SseConfig),
    Gsse(GsseConfig),
}

/// Estimated density values on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate<F> {
    pub x_grid: Vec<F>,
    pub values: Vec<F>,
    pub config: EstimatorConfig,
    /// Bandwidth `h` (SSE) or cutoffs `A_n`, `U_n` (GSSE), plus diagnostics.
    pub params: BTreeMap<String, f64>,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    config: EstimatorConfig,
    params: BTreeMap<String, f64>,
    points: usize,
}

impl<F: Scalar> DensityEstimate<F> {
    /// Value at grid index `i`.
    pub fn at(&self, i: usize) -> F {
        self.values[i]
    }

    /// `max_i |values_i − f(x_i)|`.
    pub fn sup_distance(&self, f: impl Fn(F) -> F) -> F {
        self.x_grid
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| (v - f(x)).abs())
            .fold(F::zero(), F::max)
    }

    /// CSV body with header `x,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,value\n");
        for (x, v) in self.x_grid.iter().zip(&self.values) {
            s.push_str(&format!("{},{}\n", x.as_f64(), v.as_f64()));
        }
        s
    }

    /// Writes `path` and the JSON sidecar `path.json`; returns both paths.
    pub fn write(&self, path: &Path) -> Result<Vec<PathBuf>> {
        let mut f = fs::File::create(path)?;
        f.write_all(self.to_csv().as_bytes())?;
        let side = sidecar_path(path);
        let meta = Sidecar {
            config: self.config.clone(),
            params: self.params.clone(),
            points: self.x_grid.len(),
        };
        fs::write(&side, serde_json::to_string_pretty(&meta)?)?;
        Ok(vec![path.to_path_buf(), side])
    }

    /// Reads a file written by [`DensityEstimate::write`].
    pub fn read(path: &Path) -> Result<Self> {
        let meta: Sidecar = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?;
        let body = fs::read_to_string(path)?;
        let mut x_grid = Vec::new();
        let mut values = Vec::new();
        for (k, line) in body.lines().enumerate().skip(1) {
            let mut parts = line.split(',');
            let parse = |p: Option<&str>| -> Result<F> {
                p.and_then(|s| s.trim().parse::<f64>().ok())
                    .map(F::lit)
                    .ok_or_else(|| Error::Param(format!("{}: bad row {}", path.display(), k + 1)))
            };
            x_grid.push(parse(parts.next())?);
            values.push(parse(parts.next())?);
        }
        Ok(DensityEstimate {
            x_grid,
            values,
            config: meta.config,
            params: meta.params,
        })
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Checks that a grid is positive and strictly increasing.
pub(crate) fn check_grid<F: Scalar>(x_grid: &[F]) -> Result<()> {
    for (i, &x) in x_grid.iter().enumerate() {
        if !(x > F::zero()) || !x.is_finite() {
            return Err(Error::Domain(format!("grid point {i} = {x} must be positive and finite")));
        }
        if i > 0 && !(x > x_grid[i - 1]) {
            return Err(Error::Domain(format!("grid is not strictly increasing at index {i}")));
        }
    }
    Ok(())
}

/// `count` equally spaced points on `[lo, hi]`.
pub fn linear_grid<F: Scalar>(lo: F, hi: F, count: usize) -> Vec<F> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / F::of_usize(count - 1);
            (0..count)
                .map(|i| if i + 1 == count { hi } else { lo + step * F::of_usize(i) })
                .collect()
        }
    }
}
