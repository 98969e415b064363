use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::map::InducedMap;
use crate::circle::Arc;
use crate::partition::{check_fcp, check_fip};
use crate::semigroup::{arc_admissible, ExpandingCover};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub holds: bool,
    /// Headline number for the condition (margin, contraction, slope or
    /// distortion ratio).
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InducingReport {
    pub h1: Condition,
    pub h2: Condition,
    pub h3: Condition,
    pub h4: Condition,
    pub h5: Condition,
}

impl InducingReport {
    pub fn all_hold(&self) -> bool {
        [&self.h1, &self.h2, &self.h3, &self.h4, &self.h5].iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        [("H1", &self.h1), ("H2", &self.h2), ("H3", &self.h3), ("H4", &self.h4), ("H5", &self.h5)]
            .into_iter()
            .filter(|(_, c)| !c.holds)
            .map(|(n, _)| n)
            .collect()
    }
}

/// Sample points per element for the derivative grids.
pub const GRID: usize = 64;

/// Depth and count of the random cylinders used for H3.
pub const H3_DEPTH: usize = 8;
pub const H3_SAMPLES: usize = 200;

/// Analytic distortion constant `exp(C_0 (2 eps) / (1 - sigma))` with
/// `C_0` the largest Lipschitz constant of `log f_i'`.
pub fn analytic_k1(map: &InducedMap, sigma: f64) -> f64 {
    let c0 = map
        .system
        .generators
        .iter()
        .map(|g| g.log_derivative_lipschitz())
        .fold(0.0, f64::max);
    if c0 == 0.0 {
        return 1.0;
    }
    (c0 * 2.0 * map.partition.base.eps / (1.0 - sigma)).exp()
}

fn grid(arc: &Arc) -> impl Iterator<Item = f64> + '_ {
    (0..=GRID).map(move |k| arc.lo + arc.len * k as f64 / GRID as f64)
}

/// Largest `delta` in `r * 2^-m` (m < 40) such that `h_i` stays admissible
/// on the `delta`-neighbourhood of `M_i` and is injective there.
fn h2_margin(map: &InducedMap, cover: &ExpandingCover, i: usize) -> f64 {
    let e = &map.partition.elements[i];
    let mut delta = cover.r.min(0.5);
    for _ in 0..40 {
        let (lo, hi) = (e.arc.lo - delta, e.arc.hi() + delta);
        if arc_admissible(&map.system, cover, &e.word, lo, hi) {
            let (mut a, mut b) = (lo, hi);
            for &s in e.word.symbols() {
                let g = &map.system.generators[s];
                (a, b) = (g.lift(a), g.lift(b));
            }
            if b - a < 1.0 {
                return delta;
            }
        }
        delta *= 0.5;
    }
    0.0
}

pub fn verify_inducing_scheme(map: &InducedMap, cover: &ExpandingCover, seed: u64) -> InducingReport {
    let p = &map.partition;
    let els = &p.elements;

    let fip = check_fip(&map.system, p);
    let fcp = check_fcp(p, &map.matrix);
    let h1 = Condition {
        holds: fip.holds && fcp.holds,
        value: fip.images.len() as f64,
        detail: match (fip.violation, fcp.witness) {
            (None, None) => format!("{} image balls, cycle of length {}", fip.images.len(), p.cycle.len()),
            (Some(i), _) => format!("element {} does not map onto a base ball", i + 1),
            (_, Some(l)) => format!("element {} has no cycle connection", l + 1),
        },
    };

    let margins = crate::par::map_range(els.len(), |i| h2_margin(map, cover, i));
    let (worst, margin) = margins
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &m)| if m < acc.1 { (i, m) } else { acc });
    let h2 = Condition {
        holds: margin > 0.0,
        value: if els.is_empty() { 0.0 } else { margin },
        detail: if margin > 0.0 {
            format!("smallest certified neighbourhood margin {margin:e}")
        } else {
            format!("element {} has no neighbourhood on which h is a diffeomorphism onto its image", worst + 1)
        },
    };

    let sigma_star = map.sigma_star();
    let d0 = p.max_diameter();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h3_bad = None;
    let mut worst_ratio: f64 = 0.0;
    if !els.is_empty() {
        'outer: for _ in 0..H3_SAMPLES {
            let mut word = vec![rng.gen_range(0..els.len())];
            for depth in 1..=H3_DEPTH {
                let row = map.matrix.row(*word.last().unwrap());
                if row.is_empty() {
                    break;
                }
                word.push(row[rng.gen_range(0..row.len())]);
                match map.refine_cylinder(&word) {
                    Ok(c) => {
                        let bound = sigma_star.powi(depth as i32) * d0;
                        worst_ratio = worst_ratio.max(c.arc.len / bound);
                        if c.arc.len > bound * (1.0 + 1e-9) {
                            h3_bad = Some(word.clone());
                            break 'outer;
                        }
                    }
                    Err(_) => {
                        h3_bad = Some(word.clone());
                        break 'outer;
                    }
                }
            }
        }
    }
    let h3 = Condition {
        holds: sigma_star < 1.0 && h3_bad.is_none(),
        value: sigma_star,
        detail: match h3_bad {
            None => format!("sigma_* = {sigma_star}, D_0 = {d0}, worst sampled diameter ratio {worst_ratio}"),
            Some(w) => format!("cylinder {w:?} exceeds sigma_*^depth * D_0"),
        },
    };

    let slopes = crate::par::map_range(els.len(), |i| {
        let exact = 1.0 / els[i].kappa;
        let sampled = grid(&els[i].arc)
            .map(|x| map.branch_derivative(i, x).abs())
            .fold(f64::INFINITY, f64::min);
        exact.min(sampled)
    });
    let min_slope = slopes.iter().copied().fold(f64::INFINITY, f64::min);
    let h4_bad = slopes.iter().position(|&s| s <= 1.0 / cover.sigma);
    let h4 = Condition {
        holds: h4_bad.is_none() && !els.is_empty(),
        value: min_slope,
        detail: match h4_bad {
            None => format!("min |T'| = {min_slope} > 1/sigma = {}", 1.0 / cover.sigma),
            Some(i) => format!("element {} has |T'| = {} <= 1/sigma", i + 1, slopes[i]),
        },
    };

    let k1 = analytic_k1(map, cover.sigma);
    let ratios = crate::par::map_range(els.len(), |i| {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for x in grid(&els[i].arc) {
            let d = map.branch_derivative(i, x).abs();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        hi / lo
    });
    let ratio = ratios.iter().copied().fold(1.0, f64::max);
    let h5 = Condition {
        holds: ratio <= k1,
        value: ratio,
        detail: format!("largest per-element derivative ratio {ratio}, analytic bound {k1}"),
    };

    InducingReport { h1, h2, h3, h4, h5 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub empirical: f64,
    pub analytic: f64,
    pub holds: bool,
    pub samples: usize,
}

/// Largest ratio `|DT^j(y)| / |DT^j(z)|` over `y, z` in the given cylinders
/// (both endpoints and the midpoint) and `j` in `0..=jmax`, where `jmax` is
/// capped by the cylinder length.
pub fn distortion_bound_induced(map: &InducedMap, cylinders: &[Vec<usize>], jmax: usize, sigma: f64) -> DistortionReport {
    let analytic = analytic_k1(map, sigma);
    let per = crate::par::map(cylinders, |w| {
        let Ok(c) = map.refine_cylinder(w) else {
            return f64::INFINITY;
        };
        let pts = [c.arc.lo, c.arc.midpoint(), c.arc.hi()];
        let mut worst: f64 = 1.0;
        let mut derivs = [1.0f64; 3];
        let mut ys = pts;
        for j in 1..=jmax.min(w.len()) {
            let i = w[j - 1];
            for k in 0..3 {
                derivs[k] *= map.branch_derivative(i, ys[k]).abs();
                ys[k] = map.apply_branch(i, ys[k]);
            }
            let hi = derivs.iter().copied().fold(0.0, f64::max);
            let lo = derivs.iter().copied().fold(f64::INFINITY, f64::min);
            worst = worst.max(hi / lo);
        }
        worst
    });
    let empirical = per.into_iter().fold(1.0, f64::max);
    DistortionReport {
        empirical,
        analytic,
        holds: empirical <= analytic,
        samples: cylinders.len(),
    }
}

/// Random allowed index words of length `1..=max_len`.
pub fn sample_cylinders(map: &InducedMap, count: usize, max_len: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = map.len();
    let mut out = Vec::with_capacity(count);
    if n == 0 || max_len == 0 {
        return out;
    }
    for _ in 0..count {
        let len = rng.gen_range(1..=max_len);
        let mut w = vec![rng.gen_range(0..n)];
        while w.len() < len {
            let row = map.matrix.row(*w.last().unwrap());
            if row.is_empty() {
                break;
            }
            w.push(row[rng.gen_range(0..row.len())]);
        }
        out.push(w);
    }
    out
}
