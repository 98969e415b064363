use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::potential::{allowed_words, ShiftPotential};
use crate::partition::TransitionMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationEstimate {
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
}

impl VariationEstimate {
    /// Best available single number: exact value, else the finite upper
    /// bound, else the sampled lower bound.
    pub fn value(&self) -> f64 {
        if self.upper.is_finite() {
            self.upper
        } else {
            self.lower
        }
    }
}

/// Extra symbols appended to sampled prefixes for infinite-memory potentials.
pub const SAMPLE_TAIL: usize = 16;
/// Continuations drawn per sampled prefix.
pub const CONTINUATIONS: usize = 8;

fn random_extension(t: &TransitionMatrix, w: &mut Vec<usize>, len: usize, rng: &mut ChaCha8Rng) -> bool {
    while w.len() < len {
        let row = t.row(*w.last().unwrap());
        if row.is_empty() {
            return false;
        }
        w.push(row[rng.gen_range(0..row.len())]);
    }
    true
}

/// `var_n(phi)`: exact when the memory is finite, otherwise a sampled
/// lower bound together with the potential's declared upper bound.
pub fn variation(phi: &dyn ShiftPotential, t: &TransitionMatrix, n: usize, budget: usize, seed: u64) -> VariationEstimate {
    assert!(n >= 1, "variation index starts at 1");
    if let Some(m) = phi.memory() {
        if n >= m {
            return VariationEstimate { n, lower: 0.0, upper: 0.0, exact: true };
        }
        if let Ok(words) = allowed_words(t, m) {
            let mut range: HashMap<&[usize], (f64, f64)> = HashMap::new();
            for w in &words {
                let v = phi.value(w);
                let e = range.entry(&w[..n]).or_insert((v, v));
                e.0 = e.0.min(v);
                e.1 = e.1.max(v);
            }
            let var = range.values().map(|(lo, hi)| hi - lo).fold(0.0, f64::max);
            return VariationEstimate { n, lower: var, upper: var, exact: true };
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
    let mut lower: f64 = 0.0;
    if t.dim() > 0 {
        for _ in 0..budget {
            let mut prefix = vec![rng.gen_range(0..t.dim())];
            if !random_extension(t, &mut prefix, n, &mut rng) {
                continue;
            }
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for _ in 0..CONTINUATIONS {
                let mut w = prefix.clone();
                if random_extension(t, &mut w, n + SAMPLE_TAIL, &mut rng) {
                    let v = phi.value(&w);
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            if hi >= lo {
                lower = lower.max(hi - lo);
            }
        }
    }
    let upper = phi.variation_bound(n);
    VariationEstimate {
        n,
        lower,
        upper: upper.max(lower),
        exact: upper == lower,
    }
}

/// `var_n` for `n = 2..=n_max`.
pub fn variation_profile(
    phi: &dyn ShiftPotential,
    t: &TransitionMatrix,
    n_max: usize,
    budget: usize,
    seed: u64,
) -> Vec<VariationEstimate> {
    (2..=n_max).map(|n| variation(phi, t, n, budget, seed)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    pub summable: bool,
    pub locally_holder: bool,
    /// `var_n <= c * theta^n` on every measured `n` when geometric.
    pub c: Option<f64>,
    pub theta: Option<f64>,
    /// Exponent `p` of the power-law fit `var_n ~ n^-p` when not geometric.
    pub power: Option<f64>,
    /// Largest absolute residual of the log fit.
    pub residual: f64,
}

/// Largest log residual accepted for a geometric fit.
pub const GEOMETRIC_RESIDUAL: f64 = 0.1;
/// Power-law exponent above which the tail counts as summable.
pub const SUMMABLE_POWER: f64 = 1.05;

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    (slope, intercept, residual)
}

/// Classify a variation profile `var[k] = var_{n0 + k}`.
pub fn fit_holder(n0: usize, var: &[f64]) -> HolderFit {
    let pts: Vec<(f64, f64)> = var
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(k, &v)| ((n0 + k) as f64, v))
        .collect();
    if pts.is_empty() {
        return HolderFit {
            summable: true,
            locally_holder: true,
            c: Some(0.0),
            theta: Some(0.0),
            power: None,
            residual: 0.0,
        };
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    if xs.len() >= 2 {
        let (slope, _, residual) = least_squares(&xs, &ys);
        let theta = slope.exp();
        if residual <= GEOMETRIC_RESIDUAL && theta < 1.0 {
            let c = pts.iter().map(|&(n, v)| v / theta.powf(n)).fold(0.0, f64::max);
            return HolderFit {
                summable: true,
                locally_holder: true,
                c: Some(c),
                theta: Some(theta),
                power: None,
                residual,
            };
        }
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let (slope, _, residual) = least_squares(&lx, &ys);
    let p = -slope;
    HolderFit {
        summable: p > SUMMABLE_POWER,
        locally_holder: false,
        c: None,
        theta: None,
        power: Some(p),
        residual,
    }
}
