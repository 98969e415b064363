use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sub-intervals per piece when transporting through non-affine maps.
pub const QUADRATURE_PIECES: usize = 8;

/// A probability measure with constant density on each of `m` equal bins
/// of the circle; `weights[b]` is the mass of bin `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UlamDensity {
    pub weights: Vec<f64>,
}

impl UlamDensity {
    pub fn lebesgue(bins: usize) -> Self {
        UlamDensity {
            weights: vec![1.0 / bins as f64; bins],
        }
    }

    /// Bin masses of the density `rho`, by Simpson's rule on each bin.
    pub fn from_density(bins: usize, rho: impl Fn(f64) -> f64) -> Self {
        let h = 1.0 / bins as f64;
        let weights = (0..bins)
            .map(|b| {
                let x = b as f64 * h;
                h * (rho(x) + 4.0 * rho(x + 0.5 * h) + rho(x + h)) / 6.0
            })
            .collect();
        UlamDensity { weights }
    }

    pub fn bins(&self) -> usize {
        self.weights.len()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Density value on bin `b`.
    pub fn density(&self, b: usize) -> f64 {
        self.weights[b] * self.bins() as f64
    }

    pub fn min_density(&self) -> f64 {
        (0..self.bins()).map(|b| self.density(b)).fold(f64::INFINITY, f64::min)
    }

    pub fn max_density(&self) -> f64 {
        (0..self.bins()).map(|b| self.density(b)).fold(0.0, f64::max)
    }

    /// Largest deviation of the density from 1.
    pub fn distance_from_lebesgue(&self) -> f64 {
        (0..self.bins()).map(|b| (self.density(b) - 1.0).abs()).fold(0.0, f64::max)
    }

    /// `max rho / min rho`.
    pub fn ratio(&self) -> f64 {
        self.max_density() / self.min_density()
    }

    pub fn normalise(&mut self) -> f64 {
        let s = self.mass();
        if s > 0.0 {
            for w in &mut self.weights {
                *w /= s;
            }
        }
        s
    }

    /// Total variation distance `sup_A |mu(A) - nu(A)|` between bin measures.
    pub fn tv(&self, other: &UlamDensity) -> f64 {
        tv(&self.weights, &other.weights)
    }

    /// Merge groups of `factor` consecutive bins.
    pub fn coarsen(&self, factor: usize) -> Result<UlamDensity> {
        if factor == 0 || !self.bins().is_multiple_of(factor) {
            return Err(Error::InvalidInput(format!(
                "cannot merge {} bins in groups of {factor}",
                self.bins()
            )));
        }
        Ok(UlamDensity {
            weights: self.weights.chunks(factor).map(|c| c.iter().sum()).collect(),
        })
    }

    /// Mass of the closed lifted interval `[a, b]`.
    pub fn mass_of(&self, a: f64, b: f64) -> f64 {
        let mut out = 0.0;
        for_each_overlap(self.bins(), a, b, |bin, frac| out += frac * self.weights[bin]);
        out
    }

    /// `bin,left,weight` rows.
    pub fn to_csv(&self) -> String {
        let m = self.bins() as f64;
        let mut out = String::from("bin,left,weight\n");
        for (b, w) in self.weights.iter().enumerate() {
            out.push_str(&format!("{},{:.17e},{:.17e}\n", b + 1, b as f64 / m, w));
        }
        out
    }
}

pub(crate) fn tv(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Calls `f(bin, fraction of the bin covered)` for every bin meeting the
/// lifted interval `[a, b]`, reducing mod 1.
pub(crate) fn for_each_overlap(bins: usize, a: f64, b: f64, mut f: impl FnMut(usize, f64)) {
    let m = bins as f64;
    let (sa, sb) = (a * m, b * m);
    let mut k = sa.floor();
    while k < sb {
        let lo = k.max(sa);
        let hi = (k + 1.0).min(sb);
        f((k as i64).rem_euclid(bins as i64) as usize, hi - lo);
        k += 1.0;
    }
}

/// Spread `mass` uniformly over the lifted interval `[a, b]`.
pub(crate) fn deposit(sink: &mut Vec<(usize, f64)>, bins: usize, a: f64, b: f64, mass: f64) {
    if mass == 0.0 {
        return;
    }
    let m = bins as f64;
    if b <= a {
        sink.push(((a * m).floor().rem_euclid(m) as usize, mass));
        return;
    }
    let per_unit = mass / ((b - a) * m);
    for_each_overlap(bins, a, b, |bin, frac| sink.push((bin, per_unit * frac)));
}

/// Push the bin-constant mass on the lifted interval `[u, v]` through the
/// increasing lifted map `lift`. Exact for affine maps; otherwise the piece
/// is split into [`QUADRATURE_PIECES`] and each is treated as affine.
pub(crate) fn transport_piece(
    sink: &mut Vec<(usize, f64)>,
    bins: usize,
    u: f64,
    v: f64,
    mass: f64,
    affine: bool,
    lift: impl Fn(f64) -> f64,
) {
    if affine {
        deposit(sink, bins, lift(u), lift(v), mass);
        return;
    }
    let q = QUADRATURE_PIECES;
    let mut prev = lift(u);
    for s in 1..=q {
        let x = u + (v - u) * s as f64 / q as f64;
        let y = lift(x);
        deposit(sink, bins, prev, y, mass / q as f64);
        prev = y;
    }
}

/// Sum sparse contributions in order.
pub(crate) fn accumulate(bins: usize, parts: &[Vec<(usize, f64)>]) -> Vec<f64> {
    let mut out = vec![0.0; bins];
    for part in parts {
        for &(b, w) in part {
            out[b] += w;
        }
    }
    out
}

pub(crate) fn check_bins(bins: usize) -> Result<()> {
    if bins < 64 || !bins.is_power_of_two() {
        return Err(Error::InvalidInput(format!("bin count {bins} must be a power of two >= 64")));
    }
    Ok(())
}
