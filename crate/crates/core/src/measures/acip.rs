use serde::{Deserialize, Serialize};

use super::density::{accumulate, check_bins, transport_piece, UlamDensity};
use crate::error::Result;
use crate::induced::{analytic_k1, InducedMap};
use crate::par;

/// Pieces `(bin, u, v)` of the lifted interval `[lo, hi]` cut at bin edges.
pub(crate) fn bin_pieces(bins: usize, lo: f64, hi: f64) -> Vec<(usize, f64, f64)> {
    let m = bins as f64;
    let mut out = Vec::new();
    let mut k = (lo * m).floor();
    while k < hi * m {
        let u = (k / m).max(lo);
        let v = ((k + 1.0) / m).min(hi);
        if v > u {
            out.push(((k as i64).rem_euclid(bins as i64) as usize, u, v));
        }
        k += 1.0;
    }
    out
}

/// Lift of the branch `h_i` to the lifted coordinates of `M_i`.
pub(crate) fn branch_lift(map: &InducedMap, i: usize, x: f64) -> f64 {
    let g = &map.system.generators;
    map.partition.elements[i].word.symbols().iter().fold(x, |y, &s| g[s].lift(y))
}

/// One application of `T_*` to a bin measure. Mass sitting outside the
/// retained elements has nowhere to go and is returned as the deficit.
pub fn transport(map: &InducedMap, mu: &UlamDensity) -> (UlamDensity, f64) {
    let bins = mu.bins();
    let affine = map.system.is_affine();
    let parts = par::map_range(map.len(), |i| {
        let arc = map.partition.elements[i].arc;
        let mut sink = Vec::new();
        for (b, u, v) in bin_pieces(bins, arc.lo, arc.hi()) {
            let mass = mu.weights[b] * (v - u) * bins as f64;
            transport_piece(&mut sink, bins, u, v, mass, affine, |x| branch_lift(map, i, x));
        }
        sink
    });
    let out = UlamDensity {
        weights: accumulate(bins, &parts),
    };
    let deficit = mu.mass() - out.mass();
    (out, deficit)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcipReport {
    pub density: UlamDensity,
    pub iterations: usize,
    /// Total variation between the last two Cesaro averages.
    pub tv_change: f64,
    /// Total variation between the last two iterates `T^n_* lambda`.
    pub iterate_change: f64,
    pub converged: bool,
    /// Empirical `max rho / min rho`.
    pub c0: f64,
    /// `K_1^2`.
    pub analytic_c0: f64,
    /// Largest mass lost in one step through the uncovered set.
    pub deficit: f64,
    /// Transport is exact (affine generators) rather than quadrature.
    pub exact: bool,
}

impl AcipReport {
    pub fn within_distortion_band(&self) -> bool {
        self.c0 <= self.analytic_c0 * (1.0 + 1e-12)
    }
}

/// Cesaro average `(1/n) sum_{i<n} T^i_* lambda` on `bins` bins, each
/// iterate renormalised after the deficit is recorded.
pub fn acip_pushforward(map: &InducedMap, bins: usize, n_iter: usize, tol: f64) -> Result<AcipReport> {
    check_bins(bins)?;
    let n_iter = n_iter.max(1);
    let mut iterate = UlamDensity::lebesgue(bins);
    let mut sum = iterate.weights.clone();
    let mut avg = iterate.clone();
    let mut tv_change = 0.0;
    let mut iterate_change = 0.0;
    let mut deficit: f64 = 0.0;
    for n in 2..=n_iter {
        let (mut next, lost) = transport(map, &iterate);
        deficit = deficit.max(lost);
        next.normalise();
        iterate_change = next.tv(&iterate);
        iterate = next;
        for (s, w) in sum.iter_mut().zip(&iterate.weights) {
            *s += w;
        }
        let new_avg = UlamDensity {
            weights: sum.iter().map(|s| s / n as f64).collect(),
        };
        tv_change = new_avg.tv(&avg);
        avg = new_avg;
    }
    let k1 = analytic_k1(map, map.sigma_star());
    Ok(AcipReport {
        c0: avg.ratio(),
        density: avg,
        iterations: n_iter,
        tv_change,
        iterate_change,
        converged: tv_change <= tol,
        analytic_c0: k1 * k1,
        deficit,
        exact: map.system.is_affine(),
    })
}

const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    /// `∫ log |T'| dmu / mu(W)`.
    pub entropy: f64,
    /// Mass of `mu` on the retained elements.
    pub covered: f64,
    pub exact: bool,
}

/// Rokhlin integral `∫ log |T'| dmu` over the retained elements, normalised
/// by their mass.
pub fn rokhlin_entropy(map: &InducedMap, mu: &UlamDensity) -> EntropyReport {
    let bins = mu.bins();
    let affine = map.system.is_affine();
    let parts = par::map_range(map.len(), |i| {
        let arc = map.partition.elements[i].arc;
        let (mut integral, mut mass) = (0.0, 0.0);
        for (b, u, v) in bin_pieces(bins, arc.lo, arc.hi()) {
            let m = mu.weights[b] * (v - u) * bins as f64;
            mass += m;
            let mean_log = if affine {
                map.branch_derivative(i, 0.5 * (u + v)).ln()
            } else {
                GAUSS3
                    .iter()
                    .map(|(t, w)| 0.5 * w * map.branch_derivative(i, 0.5 * (u + v) + 0.5 * (v - u) * t).ln())
                    .sum()
            };
            integral += m * mean_log;
        }
        (integral, mass)
    });
    let integral: f64 = parts.iter().map(|p| p.0).sum();
    let covered: f64 = parts.iter().map(|p| p.1).sum();
    EntropyReport {
        entropy: integral / covered,
        covered,
        exact: affine,
    }
}
