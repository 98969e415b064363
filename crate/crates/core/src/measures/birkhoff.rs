use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::induced::InducedMap;
use crate::par;

/// Running averages `(1/k) sum_{t<k} g(T^t x)` for `k = 1..=n`. The
/// observable receives the index of the element holding the point.
pub fn birkhoff_average<G>(map: &InducedMap, g: G, x: f64, n: usize) -> Result<Vec<f64>>
where
    G: Fn(usize, f64) -> f64,
{
    let mut out = Vec::with_capacity(n);
    let mut y = x;
    let mut sum = 0.0;
    for t in 0..n {
        let i = map.locate_at(y, t)?;
        sum += g(i, y);
        out.push(sum / (t + 1) as f64);
        y = map.apply_branch(i, y);
    }
    Ok(out)
}

/// `log |T'|` at `x` in element `i`.
pub fn log_jacobian(map: &InducedMap) -> impl Fn(usize, f64) -> f64 + Sync + '_ {
    move |i, x| map.branch_derivative(i, x).ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffSpread {
    pub n: usize,
    pub starts: Vec<f64>,
    pub finals: Vec<f64>,
    /// `max - min` of the final averages.
    pub spread: f64,
    /// Starting points discarded because their orbit left the domain.
    pub rejected: usize,
}

/// Final averages from `starts` random points (per-start seeds derived
/// from `seed`), redrawing any start whose orbit hits a boundary or the
/// uncovered set.
pub fn birkhoff_spread<G>(map: &InducedMap, g: G, n: usize, starts: usize, seed: u64) -> Result<BirkhoffSpread>
where
    G: Fn(usize, f64) -> f64 + Sync,
{
    const ATTEMPTS: usize = 1000;
    let runs = par::map_range(starts, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        for attempt in 0..ATTEMPTS {
            let x: f64 = rng.gen();
            if let Ok(avg) = birkhoff_average(map, &g, x, n) {
                return Some((x, *avg.last().unwrap_or(&0.0), attempt));
            }
        }
        None
    });
    let mut out = BirkhoffSpread {
        n,
        starts: Vec::new(),
        finals: Vec::new(),
        spread: 0.0,
        rejected: 0,
    };
    for (k, r) in runs.into_iter().enumerate() {
        let Some((x, v, rejected)) = r else {
            return Err(Error::Convergence(format!(
                "start {} found no orbit of length {n} within the domain after {ATTEMPTS} draws",
                k + 1
            )));
        };
        out.starts.push(x);
        out.finals.push(v);
        out.rejected += rejected;
    }
    let max = out.finals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = out.finals.iter().copied().fold(f64::INFINITY, f64::min);
    out.spread = max - min;
    Ok(out)
}
