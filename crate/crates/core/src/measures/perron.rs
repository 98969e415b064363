use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semigroup::non_communicating;

pub const PERRON_TOL: f64 = 1e-12;
const MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerronVector {
    pub p: Vec<f64>,
    /// `max_j |(p Pi)_j - p_j|`.
    pub residual: f64,
    pub iterations: usize,
}

fn image(pi: &[Vec<f64>], p: &[f64]) -> Vec<f64> {
    let mut q = vec![0.0; p.len()];
    for (i, row) in pi.iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            q[j] += p[i] * w;
        }
    }
    q
}

/// Stationary vector of an irreducible row-stochastic matrix, by power
/// iteration of `(I + Pi) / 2` from the uniform vector.
pub fn perron_vector(pi: &[Vec<f64>]) -> Result<PerronVector> {
    let k = pi.len();
    if k == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    for (i, row) in pi.iter().enumerate() {
        if row.len() != k || row.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidInput(format!("row {} is not a probability vector", i + 1)));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("row {} sums to {s}", i + 1)));
        }
    }
    if let Some((i, j)) = non_communicating(pi) {
        return Err(Error::Reducible(i + 1, j + 1));
    }
    let mut p = vec![1.0 / k as f64; k];
    for it in 1..=MAX_ITER {
        let q = image(pi, &p);
        let residual = q.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if residual <= 0.1 * PERRON_TOL {
            let s: f64 = p.iter().sum();
            let p: Vec<f64> = p.iter().map(|x| x / s).collect();
            let residual = image(pi, &p).iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            return Ok(PerronVector { p, residual, iterations: it });
        }
        let s: f64 = q.iter().zip(&p).map(|(a, b)| 0.5 * (a + b)).sum();
        p = q.iter().zip(&p).map(|(a, b)| 0.5 * (a + b) / s).collect();
    }
    Err(Error::Convergence(format!("stationary vector not within {PERRON_TOL:e} after {MAX_ITER} steps")))
}
