use serde::{Deserialize, Serialize};

use crate::circle::{reduce, Arc};
use crate::error::{Error, Result};

/// Finite cover `B_1..B_N` of the circle by open arcs of radius `eps`
/// centred at `(j + 1/2) / N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseCover {
    pub eps: f64,
    pub balls: Vec<Arc>,
}

impl BaseCover {
    /// `N = ceil(3 / eps)` equally spaced balls.
    pub fn standard(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 0.5) {
            return Err(Error::InvalidInput(format!("base radius {eps} must lie in (0, 1/2]")));
        }
        BaseCover::explicit((3.0 / eps).ceil() as usize, eps)
    }

    pub fn explicit(n: usize, eps: f64) -> Result<Self> {
        if n == 0 || !(eps > 0.0 && eps <= 0.5) {
            return Err(Error::InvalidInput(format!("base cover needs N >= 1 and eps in (0, 1/2], got N = {n}, eps = {eps}")));
        }
        if n as f64 * 2.0 * eps < 1.0 {
            return Err(Error::InvalidInput(format!("{n} balls of radius {eps} do not cover the circle")));
        }
        let balls = (0..n).map(|j| Arc::ball((j as f64 + 0.5) / n as f64, eps)).collect();
        Ok(BaseCover { eps, balls })
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// Sorted, deduplicated ball endpoints together with `0`, all in `[0, 1)`.
    pub fn cut_points(&self) -> Vec<f64> {
        let mut pts = vec![0.0];
        for b in &self.balls {
            if !b.is_full() {
                pts.push(reduce(b.lo));
                pts.push(reduce(b.hi()));
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        pts
    }

    /// Open intervals between consecutive cut points, as `(lo, hi)` with
    /// `0 <= lo < hi <= 1`.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        let pts = self.cut_points();
        let mut out: Vec<(f64, f64)> = pts.windows(2).map(|w| (w[0], w[1])).collect();
        out.push((*pts.last().unwrap(), 1.0));
        out.retain(|(a, b)| b > a);
        out
    }

    /// Index of the first ball whose interior contains `x`.
    pub fn ball_containing(&self, x: f64) -> Option<usize> {
        self.balls.iter().position(|b| b.contains(x))
    }
}
