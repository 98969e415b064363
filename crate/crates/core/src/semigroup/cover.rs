use serde::{Deserialize, Serialize};

use super::system::GeneratorSystem;
use crate::circle::Arc;
use crate::error::{Error, Result};

/// Multiplicative slack applied to certified constants.
pub const SAFETY: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub arc: Arc,
    pub generator: usize,
}

/// Open arcs `V_i` with assigned generators such that every generator is
/// uniformly expanding on the `r`-neighbourhood of its chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpandingCover {
    pub charts: Vec<Chart>,
    /// Upper bound on `1 / f_i'` over `B_r(V_i)`.
    pub sigma: f64,
    pub r: f64,
    /// Lebesgue number of the charts, below `r / 2`.
    pub eta: f64,
}

impl ExpandingCover {
    /// Build a cover from explicit charts and compute its Lebesgue number.
    pub fn from_charts(charts: Vec<Chart>, sigma: f64, r: f64) -> Result<Self> {
        let mut cover = ExpandingCover {
            charts,
            sigma,
            r,
            eta: 0.0,
        };
        cover.eta = lebesgue_number(&cover)?;
        Ok(cover)
    }

    /// Whether `x` lies in some chart assigned to generator `g`.
    pub fn in_chart(&self, g: usize, x: f64) -> bool {
        self.charts.iter().any(|c| c.generator == g && c.arc.contains(x))
    }

    /// Whether the closed arc lies in some chart assigned to generator `g`.
    pub fn arc_in_chart(&self, g: usize, arc: &Arc) -> bool {
        self.charts
            .iter()
            .any(|c| c.generator == g && (c.arc.is_full() || c.arc.contains_arc(arc, 0.0)))
    }

    pub fn all_full(&self) -> bool {
        self.charts.iter().all(|c| c.arc.is_full())
    }
}

/// First point of the circle not covered by the open arcs, if any.
pub fn uncovered_point(arcs: &[Arc]) -> Option<f64> {
    if arcs.iter().any(Arc::is_full) {
        return None;
    }
    if arcs.is_empty() {
        return Some(0.0);
    }
    let mut ends: Vec<f64> = arcs.iter().flat_map(|a| [a.lo, crate::reduce(a.hi())]).collect();
    ends.sort_by(f64::total_cmp);
    ends.into_iter().find(|&x| !arcs.iter().any(|a| a.contains(x)))
}

/// Certify that the generator family is locally expanding.
///
/// Each generator's chart is its exact expanding set `{f' > 1}` shrunk by
/// `2r`, so the `r`-neighbourhood stays strictly inside the expanding set.
/// The largest `r` in `1/8, 1/16, ...` (down to `1/resolution`) whose charts
/// cover the circle is used; when every generator expands everywhere the
/// charts are the whole circle and `r = 1`.
pub fn verify_locally_expanding(system: &GeneratorSystem, resolution: usize) -> Result<ExpandingCover> {
    let sets: Vec<Option<Arc>> = system.generators.iter().map(|g| g.expanding_set()).collect();
    let resolution = resolution.max(16);

    let mut r = if sets.iter().all(|s| s.is_some_and(|a| a.is_full())) {
        1.0
    } else {
        0.125
    };
    while r >= 1.0 / resolution as f64 {
        let mut charts = Vec::new();
        let mut sigma: f64 = 0.0;
        for (g, set) in sets.iter().enumerate() {
            let Some(set) = set else { continue };
            let Some(arc) = set.shrink(2.0 * r) else { continue };
            let neighbourhood = if set.is_full() { *set } else { set.shrink(r).expect("inner arc") };
            let gen = &system.generators[g];
            sigma = sigma.max(1.0 / gen.min_derivative_on(&neighbourhood));
            charts.push(Chart { arc, generator: g });
        }
        let arcs: Vec<Arc> = charts.iter().map(|c| c.arc).collect();
        if !charts.is_empty() && uncovered_point(&arcs).is_none() {
            let sigma = sigma * (1.0 + SAFETY);
            if sigma < 1.0 {
                return ExpandingCover::from_charts(charts, sigma, r);
            }
        }
        r *= 0.5;
    }

    // Report the grid point where the best available expansion is weakest.
    let (point, best) = (0..resolution)
        .map(|i| {
            let x = i as f64 / resolution as f64;
            let best = system
                .generators
                .iter()
                .map(|g| g.derivative(x))
                .fold(f64::NEG_INFINITY, f64::max);
            (x, best)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty grid");
    Err(Error::NotLocallyExpanding {
        point,
        best_derivative: best,
    })
}

/// Lebesgue number of the chart cover: the largest `eta` such that every
/// arc of radius `eta` sits inside one chart, capped below `r / 2`.
///
/// The containment radius `x -> max_i dist(x, complement V_i)` is a maximum
/// of tent functions, so its minimum is attained at chart endpoints or at
/// the crossing `(lo_i + hi_j) / 2` of a rising and a falling edge.
pub fn lebesgue_number(cover: &ExpandingCover) -> Result<f64> {
    let arcs: Vec<Arc> = cover.charts.iter().map(|c| c.arc).collect();
    if let Some(x) = uncovered_point(&arcs) {
        return Err(Error::CoverGap(x));
    }
    let cap = 0.5 * cover.r;
    if arcs.iter().any(Arc::is_full) {
        return Ok(cap * (1.0 - SAFETY));
    }
    let radius = |x: f64| arcs.iter().map(|a| a.inner_radius(x)).fold(0.0, f64::max);
    let mut candidates = Vec::new();
    for a in &arcs {
        candidates.extend([a.lo, a.hi(), a.lo + 0.5 * a.len]);
        for b in &arcs {
            let m = 0.5 * (a.lo + b.hi());
            candidates.extend([m, m + 0.5]);
        }
    }
    let (worst_x, worst) = candidates
        .into_iter()
        .map(|x| (x, radius(x)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("candidates");
    if worst <= 0.0 {
        return Err(Error::CoverGap(crate::reduce(worst_x)));
    }
    Ok(worst.min(cap) * (1.0 - SAFETY))
}
