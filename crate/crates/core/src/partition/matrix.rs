use serde::{Deserialize, Serialize};

use super::markov::CountableMarkovPartition;
use crate::circle::Arc;
use crate::semigroup::GeneratorSystem;

/// Sparse 0/1 matrix whose rows come from a small set of distinct rows:
/// row `i` is `classes[class_of[i]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    pub class_of: Vec<usize>,
    /// Sorted column indices of each distinct row.
    pub classes: Vec<Vec<usize>>,
}

impl TransitionMatrix {
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Self {
        let n = rows.len();
        let classes = rows
            .into_iter()
            .map(|mut r| {
                r.sort_unstable();
                r.dedup();
                r
            })
            .collect();
        TransitionMatrix {
            class_of: (0..n).collect(),
            classes,
        }
    }

    pub fn dim(&self) -> usize {
        self.class_of.len()
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.classes[self.class_of[i]]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.row(i).binary_search(&j).is_ok()
    }

    pub fn distinct_rows(&self) -> usize {
        let mut used: Vec<usize> = self.class_of.clone();
        used.sort_unstable();
        used.dedup();
        used.len()
    }

    pub fn zero_rows(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.row(i).is_empty()).collect()
    }

    pub fn zero_columns(&self) -> Vec<usize> {
        let mut hit = vec![false; self.dim()];
        let mut used: Vec<usize> = self.class_of.clone();
        used.sort_unstable();
        used.dedup();
        for c in used {
            for &j in &self.classes[c] {
                hit[j] = true;
            }
        }
        (0..self.dim()).filter(|&j| !hit[j]).collect()
    }

    /// Number of positive entries.
    pub fn nnz(&self) -> usize {
        self.class_of.iter().map(|&c| self.classes[c].len()).sum()
    }
}

/// `t_ij = 1` iff `M_j` lies inside the image ball of `M_i`.
pub fn transition_matrix(p: &CountableMarkovPartition) -> TransitionMatrix {
    let classes: Vec<Vec<usize>> = p
        .base
        .balls
        .iter()
        .map(|b| {
            p.elements
                .iter()
                .enumerate()
                .filter(|(_, e)| b.contains(e.arc.midpoint()))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    TransitionMatrix {
        class_of: p.elements.iter().map(|e| e.image).collect(),
        classes,
    }
}

/// Containment slack for the Markov property.
pub const MARKOV_TOL: f64 = 1e-10;

/// First pair `(i, j)` with `t_ij = 1` but `M_j` not inside `h_i(M_i)`.
pub fn markov_violation(p: &CountableMarkovPartition, t: &TransitionMatrix) -> Option<(usize, usize)> {
    for (c, row) in t.classes.iter().enumerate() {
        let ball = p.base.balls[c];
        if let Some(&j) = row.iter().find(|&&j| !ball.contains_arc(&p.elements[j].arc, MARKOV_TOL)) {
            let i = t.class_of.iter().position(|&k| k == c)?;
            return Some((i, j));
        }
    }
    None
}

/// Whether any two element interiors overlap (beyond `MARKOV_TOL`).
pub fn overlapping_pair(p: &CountableMarkovPartition) -> Option<(usize, usize)> {
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&a, &b| p.elements[a].arc.lo.total_cmp(&p.elements[b].arc.lo));
    let n = idx.len();
    for k in 0..n {
        let (i, j) = (idx[k], idx[(k + 1) % n]);
        if i == j {
            continue;
        }
        let a = p.elements[i].arc;
        let b = p.elements[j].arc;
        let gap = crate::circle::reduce(b.lo - a.lo);
        if k + 1 < n && gap + MARKOV_TOL < a.len {
            return Some((i, j));
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FipReport {
    pub holds: bool,
    /// Distinct image balls in use.
    pub images: Vec<usize>,
    /// First element whose image is not a base ball.
    pub violation: Option<usize>,
}

/// Finite images: every `h_i(int M_i)` is one of the base balls, checked by
/// pushing the element arc through its word.
pub fn check_fip(system: &GeneratorSystem, p: &CountableMarkovPartition) -> FipReport {
    let mut images: Vec<usize> = p.elements.iter().map(|e| e.image).collect();
    images.sort_unstable();
    images.dedup();
    let violation = p.elements.iter().position(|e| {
        let Some(ball) = p.base.balls.get(e.image) else {
            return true;
        };
        let (mut a, mut b) = (e.arc.lo, e.arc.hi());
        for &s in e.word.symbols() {
            let g = &system.generators[s];
            (a, b) = (g.lift(a), g.lift(b));
        }
        let img = Arc::from_lift(a, b);
        !(ball.contains_arc(&img, 1e-9) && img.len >= ball.len - 1e-9)
    });
    FipReport {
        holds: violation.is_none(),
        images,
        violation,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub holds: bool,
    /// First index with no edge from, or no edge to, the cycle set.
    pub witness: Option<usize>,
}

/// Every state has an edge from some `b in bset` and an edge into some
/// `b in bset`.
pub fn check_bip(t: &TransitionMatrix, bset: &[usize]) -> CycleReport {
    let n = t.dim();
    let mut from_b = vec![false; n];
    for &b in bset {
        for &j in t.row(b) {
            from_b[j] = true;
        }
    }
    let witness = (0..n).find(|&a| !from_b[a] || !t.row(a).iter().any(|j| bset.contains(j)));
    CycleReport {
        holds: witness.is_none(),
        witness,
    }
}

/// Finite cycle property with the partition's own cycle elements.
pub fn check_fcp(p: &CountableMarkovPartition, t: &TransitionMatrix) -> CycleReport {
    let cycle: Vec<usize> = p.cycle.iter().copied().filter(|&b| b < t.dim()).collect();
    if cycle.len() < p.cycle.len() {
        return CycleReport {
            holds: false,
            witness: Some(p.cycle.len()),
        };
    }
    check_bip(t, &cycle)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftMixing {
    pub mixing: bool,
    /// Smallest `n` with `t^n` and `t^{n+1}` entrywise positive.
    pub power: Option<usize>,
    /// Period of the graph when it is irreducible and periodic.
    pub period: Option<usize>,
    pub inconclusive: bool,
}

type Bits = Vec<u64>;

fn bits(n: usize) -> Bits {
    vec![0; n.div_ceil(64)]
}

fn set(b: &mut Bits, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn test(b: &Bits, i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

/// Primitivity test on the truncated matrix.
pub fn check_shift_mixing(t: &TransitionMatrix, horizon: usize) -> ShiftMixing {
    let n = t.dim();
    let k = t.classes.len();
    if n == 0 {
        return ShiftMixing {
            mixing: false,
            power: None,
            period: None,
            inconclusive: true,
        };
    }
    // classes reachable in one more step from each class
    let step: Vec<Bits> = t
        .classes
        .iter()
        .map(|row| {
            let mut b = bits(k);
            for &j in row {
                set(&mut b, t.class_of[j]);
            }
            b
        })
        .collect();
    // for each state, the classes whose row contains it
    let mut holders: Vec<Bits> = vec![bits(k); n];
    for (c, row) in t.classes.iter().enumerate() {
        for &j in row {
            set(&mut holders[j], c);
        }
    }
    let covers_all = |reach: &Bits| holders.iter().all(|h| h.iter().zip(reach).any(|(x, y)| x & y != 0));

    let mut used = bits(k);
    for &c in &t.class_of {
        set(&mut used, c);
    }
    let starts: Vec<usize> = (0..k).filter(|&c| test(&used, c)).collect();
    // reach[c] = classes whose rows make up t^n from a state of class c
    let mut reach: Vec<Bits> = starts
        .iter()
        .map(|&c| {
            let mut b = bits(k);
            set(&mut b, c);
            b
        })
        .collect();
    let mut prev_all = false;
    for m in 1..=horizon + 1 {
        let all = reach.iter().all(&covers_all);
        if all && prev_all {
            return ShiftMixing {
                mixing: true,
                power: Some(m - 1),
                period: Some(1),
                inconclusive: false,
            };
        }
        prev_all = all;
        reach = reach
            .iter()
            .map(|r| {
                let mut out = bits(k);
                for (c, sc) in step.iter().enumerate().take(k) {
                    if test(r, c) {
                        for (o, s) in out.iter_mut().zip(sc) {
                            *o |= s;
                        }
                    }
                }
                out
            })
            .collect();
    }
    let period = period(t);
    ShiftMixing {
        mixing: false,
        power: None,
        period,
        inconclusive: period == Some(1),
    }
}

/// Period of an irreducible matrix, `None` if reducible.
pub fn period(t: &TransitionMatrix) -> Option<usize> {
    let n = t.dim();
    let mut dist = vec![usize::MAX; n];
    dist[0] = 0;
    let mut queue = std::collections::VecDeque::from([0]);
    let mut g = 0usize;
    while let Some(u) = queue.pop_front() {
        for &v in t.row(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            } else {
                g = gcd(g, (dist[u] + 1).abs_diff(dist[v]));
            }
        }
    }
    if dist.contains(&usize::MAX) {
        return None;
    }
    // every state must also reach back to 0; rows are shared per class
    let mut back = vec![false; n];
    back[0] = true;
    let mut class_done = vec![false; t.classes.len()];
    let mut changed = true;
    while changed {
        changed = false;
        for (c, row) in t.classes.iter().enumerate() {
            if !class_done[c] && row.iter().any(|&j| back[j]) {
                class_done[c] = true;
                changed = true;
                for (b, &ci) in back.iter_mut().zip(&t.class_of).take(n) {
                    if ci == c {
                        *b = true;
                    }
                }
            }
        }
    }
    back.iter().all(|&b| b).then_some(g.max(1))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
