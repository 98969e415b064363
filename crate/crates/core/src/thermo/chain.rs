use super::potential::ShiftPotential;
use crate::error::{Error, Result};
use crate::partition::TransitionMatrix;

/// Log-weights of the matrix `W_ij = t_ij exp(phi(i, j))`.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    /// `phi` depends on `i_0` only.
    Vertex(Vec<f64>),
    /// `lw[i][k]` is the log-weight of the edge `i -> row(i)[k]`.
    Edge(Vec<Vec<f64>>),
}

/// The weighted transition matrix of a potential with memory at most 2.
#[derive(Debug, Clone)]
pub struct WeightedChain {
    pub matrix: TransitionMatrix,
    pub weights: Weights,
}

impl WeightedChain {
    pub fn new(t: &TransitionMatrix, phi: &dyn ShiftPotential) -> Result<Self> {
        let weights = match phi.memory() {
            Some(0) | Some(1) => Weights::Vertex((0..t.dim()).map(|i| phi.value(&[i])).collect()),
            Some(2) => Weights::Edge(
                (0..t.dim())
                    .map(|i| t.row(i).iter().map(|&j| phi.value(&[i, j])).collect())
                    .collect(),
            ),
            _ => {
                return Err(Error::InvalidInput(
                    "potential memory exceeds 2; recode to blocks first".into(),
                ))
            }
        };
        Ok(WeightedChain {
            matrix: t.clone(),
            weights,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `log W_ij` for the `k`-th entry of row `i`.
    pub fn log_weight(&self, i: usize, k: usize) -> f64 {
        match &self.weights {
            Weights::Vertex(v) => v[i],
            Weights::Edge(e) => e[i][k],
        }
    }

    /// `W v`.
    pub fn right(&self, v: &[f64]) -> Vec<f64> {
        let t = &self.matrix;
        match &self.weights {
            Weights::Vertex(phi) => {
                let sums: Vec<f64> = t.classes.iter().map(|row| row.iter().map(|&j| v[j]).sum()).collect();
                (0..t.dim()).map(|i| phi[i].exp() * sums[t.class_of[i]]).collect()
            }
            Weights::Edge(lw) => (0..t.dim())
                .map(|i| t.row(i).iter().zip(&lw[i]).map(|(&j, w)| w.exp() * v[j]).sum())
                .collect(),
        }
    }

    /// `v W`.
    pub fn left(&self, v: &[f64]) -> Vec<f64> {
        let t = &self.matrix;
        let mut out = vec![0.0; t.dim()];
        match &self.weights {
            Weights::Vertex(phi) => {
                let mut agg = vec![0.0; t.classes.len()];
                for i in 0..t.dim() {
                    agg[t.class_of[i]] += v[i] * phi[i].exp();
                }
                for (c, row) in t.classes.iter().enumerate() {
                    if agg[c] != 0.0 {
                        for &j in row {
                            out[j] += agg[c];
                        }
                    }
                }
            }
            Weights::Edge(lw) => {
                for i in 0..t.dim() {
                    if v[i] != 0.0 {
                        for (&j, w) in t.row(i).iter().zip(&lw[i]) {
                            out[j] += v[i] * w.exp();
                        }
                    }
                }
            }
        }
        out
    }

    /// `log (W^n)_{ll}` for `n = 1..=n_max` (negative infinity when zero),
    /// renormalising after each step.
    pub fn log_returns(&self, l: usize, n_max: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        v[l] = 1.0;
        let mut scale = 0.0;
        let mut out = Vec::with_capacity(n_max);
        for _ in 0..n_max {
            v = self.left(&v);
            let m = v.iter().copied().fold(0.0, f64::max);
            if m == 0.0 {
                out.resize(n_max, f64::NEG_INFINITY);
                break;
            }
            for x in &mut v {
                *x /= m;
            }
            scale += m.ln();
            out.push(if v[l] > 0.0 { v[l].ln() + scale } else { f64::NEG_INFINITY });
        }
        out
    }
}
