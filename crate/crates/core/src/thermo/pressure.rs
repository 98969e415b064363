use serde::{Deserialize, Serialize};

use super::chain::WeightedChain;
use super::potential::{recode, BlockPotential, ShiftPotential};
use super::variation::SAMPLE_TAIL;
use crate::error::{Error, Result};
use crate::partition::{check_shift_mixing, TransitionMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZValue {
    pub n: usize,
    /// `log Z_n`, negative infinity when there are no periodic words.
    pub log_z: f64,
    /// Half-width of the interval known to contain `log Z_n`.
    pub log_uncertainty: f64,
}

/// Cap on enumerated periodic words for infinite-memory potentials.
pub const MAX_PERIODIC_WORDS: usize = 5_000_000;

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `log Z_n(phi, l)` for `n = 1..=n_max`.
pub fn partition_functions(t: &TransitionMatrix, phi: &dyn ShiftPotential, l: usize, n_max: usize) -> Result<Vec<ZValue>> {
    if l >= t.dim() {
        return Err(Error::InvalidInput(format!("base state {} is not retained", l + 1)));
    }
    let exact = |logs: Vec<f64>| -> Vec<ZValue> {
        logs.into_iter()
            .enumerate()
            .map(|(k, log_z)| ZValue { n: k + 1, log_z, log_uncertainty: 0.0 })
            .collect()
    };
    match phi.memory() {
        Some(m) if m <= 2 => Ok(exact(WeightedChain::new(t, phi)?.log_returns(l, n_max))),
        Some(m) => {
            let chain = recode(t, m - 1)?;
            let bp = BlockPotential { chain: &chain, inner: phi };
            let wc = WeightedChain::new(&chain.matrix, &bp)?;
            let starts: Vec<usize> = (0..chain.blocks.len()).filter(|&b| chain.blocks[b][0] == l).collect();
            let per = crate::par::map(&starts, |&b| wc.log_returns(b, n_max));
            Ok(exact(
                (0..n_max)
                    .map(|k| log_sum_exp(&per.iter().map(|v| v[k]).collect::<Vec<_>>()))
                    .collect(),
            ))
        }
        None => (1..=n_max).map(|n| periodic_sum(t, phi, l, n)).collect(),
    }
}

pub fn partition_function(t: &TransitionMatrix, phi: &dyn ShiftPotential, l: usize, n: usize) -> Result<ZValue> {
    if n == 0 {
        return Err(Error::InvalidInput("period must be at least 1".into()));
    }
    Ok(partition_functions(t, phi, l, n)?[n - 1])
}

/// Direct enumeration of the period-`n` words through `l`.
fn periodic_sum(t: &TransitionMatrix, phi: &dyn ShiftPotential, l: usize, n: usize) -> Result<ZValue> {
    let mut logs = Vec::new();
    let mut stack = vec![vec![l]];
    while let Some(w) = stack.pop() {
        if w.len() == n {
            if t.get(*w.last().unwrap(), l) {
                let depth = n + SAMPLE_TAIL;
                let periodic: Vec<usize> = (0..n + depth).map(|k| w[k % n]).collect();
                logs.push((0..n).map(|k| phi.value(&periodic[k..k + depth])).sum::<f64>());
                if logs.len() > MAX_PERIODIC_WORDS {
                    return Err(Error::InvalidInput(format!(
                        "more than {MAX_PERIODIC_WORDS} periodic words of period {n}"
                    )));
                }
            }
            continue;
        }
        for &j in t.row(*w.last().unwrap()).iter().rev() {
            let mut v = w.clone();
            v.push(j);
            stack.push(v);
        }
    }
    let bound = phi.variation_bound(n + SAMPLE_TAIL);
    Ok(ZValue {
        n,
        log_z: log_sum_exp(&logs),
        log_uncertainty: if logs.is_empty() { 0.0 } else { n as f64 * bound },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureReport {
    pub base: usize,
    pub n_min: usize,
    pub n_max: usize,
    /// `log Z_n` for `n = 1..=n_max`; `None` where `Z_n = 0`.
    pub log_z: Vec<Option<f64>>,
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual of the linear fit.
    pub residual: f64,
    pub second_base: Option<usize>,
    pub second_slope: Option<f64>,
    pub second_residual: Option<f64>,
    pub discrepancy: Option<f64>,
    pub mixing: bool,
    pub pressure: f64,
}

impl PressureReport {
    /// Both base states agree within twice the larger fit residual.
    pub fn base_independent(&self) -> bool {
        let r = self.residual.max(self.second_residual.unwrap_or(0.0));
        self.discrepancy.is_none_or(|d| d <= 2.0 * r + 1e-9)
    }
}

struct Fit {
    slope: f64,
    intercept: f64,
    residual: f64,
}

fn fit(zs: &[ZValue], n_min: usize, n_max: usize) -> Option<Fit> {
    let pts: Vec<(f64, f64)> = zs
        .iter()
        .filter(|z| z.n >= n_min && z.n <= n_max && z.log_z.is_finite())
        .map(|z| (z.n as f64, z.log_z))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    Some(Fit { slope, intercept, residual })
}

/// Slope of `log Z_n` over `n in [n_max/2, n_max]`, with a second base
/// state as cross-check.
pub fn gurevich_pressure(t: &TransitionMatrix, phi: &dyn ShiftPotential, l: usize, n_max: usize) -> Result<PressureReport> {
    let n_min = (n_max / 2).max(1);
    let zs = partition_functions(t, phi, l, n_max)?;
    let Some(main) = fit(&zs, n_min, n_max) else {
        return Err(Error::NoCycles(l + 1));
    };
    let mut second = None;
    for k in 1..t.dim().min(64) {
        let l2 = (l + k) % t.dim();
        let z2 = partition_functions(t, phi, l2, n_max)?;
        if let Some(f) = fit(&z2, n_min, n_max) {
            second = Some((l2, f));
            break;
        }
    }
    let mixing = check_shift_mixing(t, 4 * t.dim().min(64) + 8).mixing;
    Ok(PressureReport {
            base: l,
            n_min,
            n_max,
            log_z: zs.iter().map(|z| z.log_z.is_finite().then_some(z.log_z)).collect(),
            slope: main.slope,
            intercept: main.intercept,
            residual: main.residual,
            second_base: second.as_ref().map(|(b, _)| *b),
            second_slope: second.as_ref().map(|(_, f)| f.slope),
            second_residual: second.as_ref().map(|(_, f)| f.residual),
            discrepancy: second.as_ref().map(|(_, f)| (f.slope - main.slope).abs()),
            mixing,
            pressure: main.slope,
    })
}
