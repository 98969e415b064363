use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::circle::{reduce, Arc};
use crate::error::{Error, Result};
use crate::partition::{transition_matrix, CountableMarkovPartition, TransitionMatrix};
use crate::semigroup::{interval_chain, pull_through_chain, GeneratorSystem};

/// The first-return style map `T = h_i` on the interior of each element.
#[derive(Debug, Clone)]
pub struct InducedMap {
    pub system: GeneratorSystem,
    pub partition: CountableMarkovPartition,
    pub matrix: TransitionMatrix,
    /// Element indices sorted by left endpoint.
    order: Vec<usize>,
}

/// `M_{i_0 ... i_l}`: points of `M_{i_0}` whose `T`-itinerary starts with
/// `i_0, ..., i_l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cylinder {
    pub word: Vec<usize>,
    pub arc: Arc,
    pub total_time: usize,
    /// Base ball onto which `T^{l+1}` maps the cylinder.
    pub image: usize,
}

pub fn induce(system: &GeneratorSystem, partition: CountableMarkovPartition) -> InducedMap {
    let matrix = transition_matrix(&partition);
    let mut order: Vec<usize> = (0..partition.len()).collect();
    order.sort_by(|&a, &b| partition.elements[a].arc.lo.total_cmp(&partition.elements[b].arc.lo));
    InducedMap {
        system: system.clone(),
        partition,
        matrix,
        order,
    }
}

impl InducedMap {
    pub fn len(&self) -> usize {
        self.partition.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partition.is_empty()
    }

    pub fn return_time(&self, i: usize) -> usize {
        self.partition.elements[i].return_time()
    }

    /// Element whose interior contains `x`; `step` is only used to label
    /// the error.
    pub fn locate_at(&self, x: f64, step: usize) -> Result<usize> {
        let x = reduce(x);
        let els = &self.partition.elements;
        let k = self.order.partition_point(|&i| els[i].arc.lo <= x);
        for cand in [k.checked_sub(1), self.order.len().checked_sub(1)].into_iter().flatten() {
            let i = self.order[cand];
            let a = els[i].arc;
            if a.contains(x) {
                return Ok(i);
            }
            if a.contains_closed(x) {
                return Err(Error::BoundaryOrbit { point: x, step });
            }
        }
        Err(Error::OutsideDomain { point: x, step })
    }

    pub fn locate(&self, x: f64) -> Result<usize> {
        self.locate_at(x, 0)
    }

    pub fn apply_branch(&self, i: usize, x: f64) -> f64 {
        let mut y = x;
        for &s in self.partition.elements[i].word.symbols() {
            y = self.system.generators[s].apply(y);
        }
        y
    }

    pub fn branch_derivative(&self, i: usize, x: f64) -> f64 {
        let mut y = x;
        let mut d = 1.0;
        for &s in self.partition.elements[i].word.symbols() {
            let g = &self.system.generators[s];
            d *= g.derivative(y);
            y = g.apply(y);
        }
        d
    }

    pub fn apply(&self, x: f64) -> Result<f64> {
        let i = self.locate(x)?;
        Ok(self.apply_branch(i, x))
    }

    /// Lift `a` (an arc inside the image ball of element `i`) through the
    /// inverse branch of `h_i`.
    fn pull_back(&self, i: usize, a: &Arc) -> Arc {
        let e = &self.partition.elements[i];
        let chain = interval_chain(&self.system, &e.word, e.arc.lo, e.arc.hi());
        let &(c0, c1) = chain.last().unwrap();
        let mut lo = c0 + reduce(a.lo - c0);
        if lo > c1 {
            lo = c0;
        }
        let hi = (lo + a.len).min(c1);
        let d0 = pull_through_chain(&self.system, &e.word, &chain, lo);
        let d1 = pull_through_chain(&self.system, &e.word, &chain, hi);
        Arc::from_lift(d0, d1)
    }

    pub fn refine_cylinder(&self, word: &[usize]) -> Result<Cylinder> {
        let Some(&last) = word.last() else {
            return Err(Error::InvalidInput("cylinder word is empty".into()));
        };
        if let Some(&bad) = word.iter().find(|&&i| i >= self.len()) {
            return Err(Error::InvalidInput(format!("element {} does not exist", bad + 1)));
        }
        if let Some(w) = word.windows(2).find(|w| !self.matrix.get(w[0], w[1])) {
            return Err(Error::ForbiddenTransition {
                from: w[0] + 1,
                to: w[1] + 1,
            });
        }
        let els = &self.partition.elements;
        let mut arc = els[last].arc;
        for &i in word[..word.len() - 1].iter().rev() {
            let next = self.pull_back(i, &arc);
            let bound = els[i].kappa * arc.len * (1.0 + 1e-9) + 1e-15;
            if next.len > bound {
                return Err(Error::InducingScheme {
                    condition: "H3",
                    detail: format!("cylinder contraction through element {} exceeds its bound", i + 1),
                });
            }
            arc = next;
        }
        Ok(Cylinder {
            word: word.to_vec(),
            arc,
            total_time: word.iter().map(|&i| self.return_time(i)).sum(),
            image: els[last].image,
        })
    }

    /// Inverse branches of `T^depth` into `M_k`: every allowed word
    /// `(i_1..i_depth)` ending in `k`, with its cylinder `M_{i_1..i_depth k}`.
    pub fn inverse_branches(&self, k: usize, depth: usize) -> Result<Vec<Cylinder>> {
        if depth == 0 {
            return Err(Error::InvalidInput("inverse-branch depth must be at least 1".into()));
        }
        if k >= self.len() {
            return Err(Error::InvalidInput(format!("element {} does not exist", k + 1)));
        }
        let preds = self.predecessors();
        let mut words: Vec<Vec<usize>> = vec![vec![k]];
        for _ in 0..depth {
            words = words
                .iter()
                .flat_map(|w| {
                    preds[w[0]].iter().map(move |&p| {
                        let mut v = Vec::with_capacity(w.len() + 1);
                        v.push(p);
                        v.extend_from_slice(w);
                        v
                    })
                })
                .collect();
        }
        words.sort();
        crate::par::map(&words, |w| self.refine_cylinder(w)).into_iter().collect()
    }

    /// `preds[j]` lists every `i` with `t_ij = 1`.
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut preds = vec![Vec::new(); self.len()];
        for i in 0..self.len() {
            for &j in self.matrix.row(i) {
                preds[j].push(i);
            }
        }
        preds
    }

    /// Indices of the elements visited by `x, Tx, ..., T^{depth-1}x`.
    pub fn encode(&self, x: f64, depth: usize) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(depth);
        let mut y = reduce(x);
        for step in 0..depth {
            let i = self.locate_at(y, step)?;
            out.push(i);
            y = self.apply_branch(i, y);
        }
        Ok(out)
    }

    /// Cylinder of an itinerary prefix, its midpoint and half-width.
    pub fn decode(&self, prefix: &[usize]) -> Result<(Arc, f64, f64)> {
        let c = self.refine_cylinder(prefix)?;
        Ok((c.arc, c.arc.midpoint(), 0.5 * c.arc.len))
    }

    /// Largest per-element contraction bound `max_i 1 / min |h_i'|`.
    pub fn sigma_star(&self) -> f64 {
        self.partition.elements.iter().map(|e| e.kappa).fold(0.0, f64::max)
    }
}

/// Itinerary dump: a header carrying the partition digest, then one orbit
/// per line as 1-based element indices.
pub fn dump_itineraries(digest: &str, orbits: &[Vec<usize>]) -> String {
    let mut s = format!("# itineraries partition-sha256 {digest}\n");
    for o in orbits {
        let line: Vec<String> = o.iter().map(|i| (i + 1).to_string()).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s
}

pub fn parse_itineraries(src: &str, digest: &str) -> Result<Vec<Vec<usize>>> {
    let mut lines = src.lines().enumerate();
    let header = format!("# itineraries partition-sha256 {digest}");
    match lines.next() {
        Some((_, l)) if l.trim() == header => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "itinerary header missing or for a different partition".into(),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            l.split_whitespace()
                .map(|t| match t.parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => Err(Error::Parse {
                        line: n + 1,
                        column: l.find(t).unwrap_or(0) + 1,
                        message: format!("`{t}` is not a positive index"),
                    }),
                })
                .collect()
        })
        .collect()
}
