use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::base::BaseCover;
use super::tile::{Tile, TileSearch};
use crate::circle::Arc;
use crate::error::{Error, Result};
use crate::par;
use crate::semigroup::{ExpandingCover, GeneratorSystem, Word};

/// Closed arc `M_i` with return word `w_i`; `f_{w_i}` maps its interior onto
/// the base ball `B_{image}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionElement {
    pub index: usize,
    pub arc: Arc,
    pub word: Word,
    pub image: usize,
    /// Upper bound on `1 / h_i'` over the element.
    pub kappa: f64,
}

impl PartitionElement {
    pub fn return_time(&self) -> usize {
        self.word.len()
    }
}

/// Truncated countable Markov partition with finite images: element
/// interiors are disjoint, every image is a base ball, and `cycle[j]` maps
/// onto `B_{j+1 mod N}` from inside `B_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountableMarkovPartition {
    pub base: BaseCover,
    pub elements: Vec<PartitionElement>,
    pub cycle: Vec<usize>,
    pub tol: f64,
    pub cap: usize,
    /// Lebesgue measure of the circle not covered by elements.
    pub uncovered: f64,
}

impl CountableMarkovPartition {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.uncovered < self.tol
    }

    pub fn covered_mass(&self) -> f64 {
        self.elements.iter().map(|e| e.arc.len).sum()
    }

    /// Element whose interior contains `x`.
    pub fn locate(&self, x: f64) -> Option<usize> {
        self.elements.iter().position(|e| e.arc.contains(x))
    }

    /// Largest element diameter in the circle metric.
    pub fn max_diameter(&self) -> f64 {
        self.elements.iter().map(|e| e.arc.len.min(0.5)).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Gap {
    lo: f64,
    hi: f64,
}

impl Gap {
    fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

impl Eq for Gap {}

impl Ord for Gap {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .total_cmp(&other.len())
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

impl PartialOrd for Gap {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Gaps narrower than this are abandoned.
const MIN_GAP: f64 = 1e-14;

/// Lift of `x` into `[lo, lo + 1)`, snapping rounding noise just below `lo`.
fn lift_from(lo: f64, width: f64, x: f64) -> f64 {
    let off = crate::circle::reduce(x - lo);
    if off > width { lo } else { lo + off }
}

fn split(gap: Gap, tile: &Tile) -> [Gap; 2] {
    let lo = lift_from(gap.lo, gap.len(), tile.arc.lo);
    let hi = (lo + tile.arc.len).min(gap.hi);
    [Gap { lo: gap.lo, hi: lo }, Gap { lo: hi, hi: gap.hi }]
}

fn push_gaps(heap: &mut BinaryHeap<Gap>, gaps: [Gap; 2]) {
    for g in gaps {
        if g.len() > MIN_GAP {
            heap.push(g);
        }
    }
}

fn element(index: usize, t: Tile) -> PartitionElement {
    PartitionElement {
        index,
        arc: t.arc,
        word: t.word,
        image: t.image,
        kappa: t.kappa,
    }
}

/// Build the partition: cycle elements first, then largest-first Vitali
/// selection inside the remaining gaps until less than `tol` is uncovered
/// or no tile with word length at most `cap` fits.
pub fn build_markov_partition(
    system: &GeneratorSystem,
    cover: &ExpandingCover,
    base: BaseCover,
    cap: usize,
    tol: f64,
) -> Result<CountableMarkovPartition> {
    if !cover.all_full() && base.eps > cover.eta / 6.0 {
        return Err(Error::InvalidInput(format!(
            "base radius {} exceeds eta/6 = {}",
            base.eps,
            cover.eta / 6.0
        )));
    }
    if !(tol > 0.0) || cap == 0 {
        return Err(Error::InvalidInput("tolerance and word-length cap must be positive".into()));
    }
    let search = TileSearch {
        system,
        cover,
        base: &base,
    };
    let n = base.len();
    let mut gaps: Vec<Gap> = base.gaps().into_iter().map(|(lo, hi)| Gap { lo, hi }).collect();
    let mut elements = Vec::new();

    for j in 0..n {
        let target = (j + 1) % n;
        let inside: Vec<usize> = (0..gaps.len())
            .filter(|&g| base.balls[j].contains(0.5 * (gaps[g].lo + gaps[g].hi)))
            .collect();
        let found = par::map(&inside, |&g| search.first_onto(gaps[g].lo, gaps[g].hi, target, cap));
        let best = inside
            .iter()
            .zip(found)
            .filter_map(|(&g, t)| t.map(|t| (g, t)))
            .min_by(|(_, a), (_, b)| {
                a.word
                    .len()
                    .cmp(&b.word.len())
                    .then_with(|| a.word.0.cmp(&b.word.0))
            });
        let Some((g, tile)) = best else {
            return Err(Error::MixingWitnessMissing {
                from: j + 1,
                to: target + 1,
                max_len: cap,
            });
        };
        let gap = gaps.remove(g);
        for part in split(gap, &tile) {
            if part.len() > MIN_GAP {
                gaps.push(part);
            }
        }
        elements.push(element(j, tile));
    }
    let cycle: Vec<usize> = (0..n).collect();

    let mut heap: BinaryHeap<Gap> = gaps.into_iter().collect();
    let mut uncovered: f64 = heap.iter().map(Gap::len).sum();
    let mut dead = 0.0;
    while uncovered >= tol {
        let Some(top) = heap.peek().copied() else { break };
        let mut batch = Vec::new();
        while let Some(g) = heap.peek() {
            if g.len() < 0.5 * top.len() {
                break;
            }
            batch.push(heap.pop().unwrap());
        }
        let found = par::map(&batch, |g| search.largest_in(g.lo, g.hi, cap));
        let mut rest = Vec::new();
        for (g, t) in batch.iter().zip(found) {
            if uncovered < tol {
                rest.push(*g);
                continue;
            }
            match t {
                Some(t) => {
                    uncovered -= t.arc.len;
                    push_gaps(&mut heap, split(*g, &t));
                    elements.push(element(elements.len(), t));
                }
                None => dead += g.len(),
            }
        }
        heap.extend(rest);
    }
    let uncovered = heap.iter().map(Gap::len).sum::<f64>() + dead;
    Ok(CountableMarkovPartition {
        base,
        elements,
        cycle,
        tol,
        cap,
        uncovered,
    })
}

/// Largest-first selection of pairwise disjoint family members inside the
/// open set `U` (a union of disjoint lifted intervals in `[0, 1]`). Ties go
/// to the smaller family index. Returns the chosen indices and the
/// uncovered measure of `U`.
pub fn vitali_select(u: &[(f64, f64)], family: &[Tile], tol: f64) -> (Vec<usize>, f64) {
    let mut order: Vec<usize> = (0..family.len()).collect();
    order.sort_by(|&a, &b| family[b].len().total_cmp(&family[a].len()).then(a.cmp(&b)));
    let mut free: Vec<(f64, f64)> = u.iter().copied().filter(|(a, b)| b > a).collect();
    let mut remaining: f64 = free.iter().map(|(a, b)| b - a).sum();
    let mut chosen = Vec::new();
    for i in order {
        if remaining < tol {
            break;
        }
        let arc = family[i].arc;
        let slot = free.iter().position(|&(a, b)| {
            [-1.0, 0.0, 1.0].iter().any(|m| {
                let lo = arc.lo + m;
                lo >= a && lo + arc.len <= b
            })
        });
        if let Some(k) = slot {
            let (a, b) = free.swap_remove(k);
            let lo = lift_from(a, b - a, arc.lo);
            let hi = lo + arc.len;
            if lo > a {
                free.push((a, lo));
            }
            if b > hi {
                free.push((hi, b));
            }
            remaining -= arc.len;
            chosen.push(i);
        }
    }
    (chosen, remaining.max(0.0))
}
