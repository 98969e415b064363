use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::acip::bin_pieces;
use super::density::{accumulate, deposit, tv, transport_piece, UlamDensity};
use crate::error::{Error, Result};
use crate::induced::InducedMap;
use crate::par;
use crate::semigroup::GeneratorSystem;

/// A measure on `{1..k} x S^1`: `components[i]` has total mass `p[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberedMeasure {
    pub p: Vec<f64>,
    pub components: Vec<UlamDensity>,
    /// Tower normaliser `sum_k tau(M_k) mu_T(M_k)`.
    pub q: f64,
    /// `mu_T` mass outside the retained elements.
    pub deficit: f64,
    pub flagged: bool,
}

impl FiberedMeasure {
    /// `p x nu` with `nu` a probability.
    pub fn product(p: &[f64], nu: &UlamDensity) -> Self {
        FiberedMeasure {
            p: p.to_vec(),
            components: p
                .iter()
                .map(|&pi| UlamDensity {
                    weights: nu.weights.iter().map(|w| w * pi).collect(),
                })
                .collect(),
            q: 1.0,
            deficit: 0.0,
            flagged: false,
        }
    }

    pub fn bins(&self) -> usize {
        self.components.first().map_or(0, UlamDensity::bins)
    }

    pub fn mass(&self) -> f64 {
        self.components.iter().map(UlamDensity::mass).sum()
    }

    /// `symbol,bin,left,weight` rows.
    pub fn to_csv(&self) -> String {
        let m = self.bins() as f64;
        let mut out = String::from("symbol,bin,left,weight\n");
        for (i, c) in self.components.iter().enumerate() {
            for (b, w) in c.weights.iter().enumerate() {
                out.push_str(&format!("{},{},{:.17e},{:.17e}\n", i + 1, b + 1, b as f64 / m, w));
            }
        }
        out
    }
}

/// Lift `mu_T` to the tower over the induced map and spread it over the
/// symbols by `p`: the circle part is
/// `(1/Q) sum_k sum_{l < tau_k} (f_{w_k,<=l})_* (mu_T restricted to M_k)`.
pub fn lift_measure(map: &InducedMap, mu: &UlamDensity, p: &[f64], tol: f64) -> Result<FiberedMeasure> {
    if p.len() != map.system.len() {
        return Err(Error::InvalidInput(format!(
            "{} symbol weights for {} generators",
            p.len(),
            map.system.len()
        )));
    }
    let bins = mu.bins();
    let affine = map.system.is_affine();
    let gens = &map.system.generators;
    let parts = par::map_range(map.len(), |k| {
        let e = &map.partition.elements[k];
        let word = e.word.symbols();
        let mut sink = Vec::new();
        let mut mass = 0.0;
        for (b, u, v) in bin_pieces(bins, e.arc.lo, e.arc.hi()) {
            let m = mu.weights[b] * (v - u) * bins as f64;
            mass += m;
            deposit(&mut sink, bins, u, v, m);
            for l in 1..word.len() {
                let lift = |x: f64| word[..l].iter().fold(x, |y, &s| gens[s].lift(y));
                transport_piece(&mut sink, bins, u, v, m, affine, lift);
            }
        }
        (sink, mass * word.len() as f64, mass)
    });
    let sinks: Vec<Vec<(usize, f64)>> = parts.iter().map(|p| p.0.clone()).collect();
    let q: f64 = parts.iter().map(|p| p.1).sum();
    let covered: f64 = parts.iter().map(|p| p.2).sum();
    let mut nu = UlamDensity {
        weights: accumulate(bins, &sinks),
    };
    nu.normalise();
    let total: f64 = p.iter().sum();
    let p: Vec<f64> = p.iter().map(|x| x / total).collect();
    let deficit = mu.mass() - covered;
    Ok(FiberedMeasure {
        q,
        deficit,
        flagged: deficit > tol,
        ..FiberedMeasure::product(&p, &nu)
    })
}

/// `(f_j)_*` of a bin measure on the whole circle.
pub fn push_generator(system: &GeneratorSystem, j: usize, mu: &UlamDensity) -> UlamDensity {
    let g = &system.generators[j];
    let bins = mu.bins();
    let m = bins as f64;
    let mut sink = Vec::with_capacity(bins * (g.a as usize + 2));
    for (b, &w) in mu.weights.iter().enumerate() {
        let u = b as f64 / m;
        transport_piece(&mut sink, bins, u, u + 1.0 / m, w, g.is_affine(), |x| g.lift(x));
    }
    UlamDensity {
        weights: accumulate(bins, &[sink]),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryReport {
    /// Total variation between `(f_* m)_j` and `m_j`, per symbol.
    pub per_fiber: Vec<f64>,
    pub residual: f64,
    pub exact: bool,
}

/// Compare `m` with its stochastic image `(f_* m)_j = sum_i pi_ij (f_j)_* m_i`.
pub fn check_stationary(system: &GeneratorSystem, m: &FiberedMeasure) -> Result<StationaryReport> {
    let k = system.len();
    if m.components.len() != k {
        return Err(Error::InvalidInput(format!("{} fibers for {k} generators", m.components.len())));
    }
    let bins = m.bins();
    let per_fiber = par::map_range(k, |j| {
        let mix = UlamDensity {
            weights: (0..bins)
                .map(|b| (0..k).map(|i| system.driving[i][j] * m.components[i].weights[b]).sum())
                .collect(),
        };
        tv(&push_generator(system, j, &mix).weights, &m.components[j].weights)
    });
    Ok(StationaryReport {
        residual: per_fiber.iter().copied().fold(0.0, f64::max),
        per_fiber,
        exact: system.is_affine(),
    })
}

/// Coarse bins per symbol used by [`skew_invariance_check`].
pub const SKEW_CELLS: usize = 16;
/// Two-sided family-wise level, the 3 sigma normal tail.
pub const SKEW_LEVEL: f64 = 0.0027;
const CHUNK: usize = 8192;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkewReport {
    pub samples: usize,
    pub cells: usize,
    /// Largest `|empirical - predicted|` cell frequency.
    pub residual: f64,
    /// Largest standardised deviation.
    pub max_z: f64,
    /// Bonferroni-corrected critical value.
    pub band: f64,
    pub holds: bool,
}

/// Push `samples` draws of `(i, x) ~ m` through one step of the skew
/// product `(i, x) -> (j, f_j(x))`, `j ~ pi_i.`, and compare occupation of
/// symbol x coarse-bin cells with `m`.
pub fn skew_invariance_check(system: &GeneratorSystem, m: &FiberedMeasure, samples: usize, seed: u64) -> Result<SkewReport> {
    let k = system.len();
    let bins = m.bins();
    if m.components.len() != k || bins == 0 {
        return Err(Error::InvalidInput("fibered measure does not match the system".into()));
    }
    let coarse = SKEW_CELLS.min(bins);
    let cells = k * coarse;
    let total = m.mass();
    let predicted: Vec<f64> = (0..cells)
        .map(|c| m.components[c / coarse].mass_of((c % coarse) as f64 / coarse as f64, (c % coarse + 1) as f64 / coarse as f64) / total)
        .collect();
    let symbol = WeightedIndex::new(m.components.iter().map(UlamDensity::mass))
        .map_err(|e| Error::InvalidInput(format!("fiber masses: {e}")))?;
    let within: Vec<Option<WeightedIndex<f64>>> = m.components.iter().map(|c| WeightedIndex::new(&c.weights).ok()).collect();
    let next: Vec<WeightedIndex<f64>> = system
        .driving
        .iter()
        .map(|r| WeightedIndex::new(r).expect("validated driving row"))
        .collect();
    let chunks = samples.div_ceil(CHUNK);
    let counts = par::map_range(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let mut counts = vec![0usize; cells];
        for _ in 0..CHUNK.min(samples - c * CHUNK) {
            let i = symbol.sample(&mut rng);
            let b = within[i].as_ref().expect("positive fiber").sample(&mut rng);
            let x = (b as f64 + rng.gen::<f64>()) / bins as f64;
            let j = next[i].sample(&mut rng);
            let y = system.generators[j].apply(x);
            counts[j * coarse + ((y * coarse as f64) as usize).min(coarse - 1)] += 1;
        }
        counts
    });
    let n = samples as f64;
    let (mut residual, mut max_z) = (0.0f64, 0.0f64);
    for c in 0..cells {
        let count: usize = counts.iter().map(|v| v[c]).sum();
        let q = predicted[c];
        let freq = count as f64 / n;
        residual = residual.max((freq - q).abs());
        let sd = (n * q * (1.0 - q)).sqrt();
        let z = if sd > 0.0 {
            (count as f64 - n * q).abs() / sd
        } else if count as f64 == n * q {
            0.0
        } else {
            f64::INFINITY
        };
        max_z = max_z.max(z);
    }
    let band = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(1.0 - SKEW_LEVEL / (2.0 * cells as f64));
    Ok(SkewReport {
        samples,
        cells,
        residual,
        max_z,
        band,
        holds: max_z <= band,
    })
}
