use serde::{Deserialize, Serialize};

use super::base::BaseCover;
use crate::circle::Arc;
use crate::semigroup::{interval_chain, pull_through_chain, push_interval, ExpandingCover, GeneratorSystem, Word};

/// Closure of a component of `f_w^{-1}(B_j)` along an admissible branch:
/// `f_w` maps the interior of `arc` diffeomorphically onto the ball `B_image`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tile {
    pub word: Word,
    pub image: usize,
    pub arc: Arc,
    /// Upper bound on `1 / f_w'` over the tile.
    pub kappa: f64,
}

impl Tile {
    pub fn len(&self) -> f64 {
        self.arc.len
    }
}

/// A branch of the search: word so far, lifted chain of the domain through
/// the word, and an upper bound on the inverse derivative along it.
#[derive(Debug, Clone)]
pub(crate) struct Branch {
    pub word: Vec<usize>,
    pub chain: Vec<(f64, f64)>,
    pub kappa: f64,
}

const FIT_TOL: f64 = 1e-12;

pub(crate) struct TileSearch<'a> {
    pub system: &'a GeneratorSystem,
    pub cover: &'a ExpandingCover,
    pub base: &'a BaseCover,
}

impl<'a> TileSearch<'a> {
    pub fn root(&self, lo: f64, hi: f64) -> Branch {
        Branch {
            word: Vec::new(),
            chain: vec![(lo, hi)],
            kappa: 1.0,
        }
    }

    fn chart_pieces(&self, s: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
        let charts: Vec<&Arc> = self
            .cover
            .charts
            .iter()
            .filter(|c| c.generator == s)
            .map(|c| &c.arc)
            .collect();
        if charts.iter().any(|c| c.is_full()) {
            return vec![(a, b)];
        }
        let mut out = Vec::new();
        for c in charts {
            let mut m = (a - c.hi()).floor();
            while c.lo + m < b {
                let p = a.max(c.lo + m);
                let q = b.min(c.hi() + m);
                if q > p {
                    out.push((p, q));
                }
                m += 1.0;
            }
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out
    }

    /// Children of `br` obtained by appending `s`, one per chart piece.
    pub fn extend(&self, br: &Branch, s: usize) -> Vec<Branch> {
        if let Some(&last) = br.word.last() {
            if !self.system.allowed(last, s) {
                return Vec::new();
            }
        }
        let g = &self.system.generators[s];
        let &(a, b) = br.chain.last().unwrap();
        let word = Word(br.word.clone());
        let mut out = Vec::new();
        for (p, q) in self.chart_pieces(s, a, b) {
            let mut chain = if p == a && q == b {
                br.chain.clone()
            } else {
                let d0 = pull_through_chain(self.system, &word, &br.chain, p);
                let d1 = pull_through_chain(self.system, &word, &br.chain, q);
                if d1 <= d0 {
                    continue;
                }
                let mut ch = interval_chain(self.system, &word, d0, d1);
                // keep the restricted end exactly on the chart boundary
                let last = ch.last_mut().unwrap();
                let shift = (last.0 - p).round();
                *last = (p + shift, q + shift);
                ch
            };
            let &(x, y) = chain.last().unwrap();
            let kappa = br.kappa / g.min_derivative_on(&Arc::from_lift(x, y));
            chain.push(push_interval(g, x, y));
            let mut w = br.word.clone();
            w.push(s);
            out.push(Branch { word: w, chain, kappa });
        }
        out
    }

    /// All tiles `f_w^{-1}(B_j)` fully inside the branch domain, for the
    /// listed targets.
    pub fn tiles(&self, br: &Branch, targets: &[usize]) -> Vec<Tile> {
        let &(a, b) = br.chain.last().unwrap();
        let tol = FIT_TOL * (1.0 + b.abs());
        let word = Word(br.word.clone());
        let mut out = Vec::new();
        for &j in targets {
            let t = self.base.balls[j];
            let mut m = (a - t.lo - tol).ceil();
            while t.lo + m + t.len <= b + tol {
                let y0 = (t.lo + m).max(a);
                let y1 = (t.lo + m + t.len).min(b);
                let d0 = pull_through_chain(self.system, &word, &br.chain, y0);
                let d1 = pull_through_chain(self.system, &word, &br.chain, y1);
                if d1 > d0 {
                    out.push(Tile {
                        word: word.clone(),
                        image: j,
                        arc: Arc::from_lift(d0, d1),
                        kappa: tile_kappa(self.system, &word, d0, d1),
                    });
                }
                m += 1.0;
            }
        }
        out
    }

    /// Largest tile inside `[lo, hi]` with word length in `1..=cap`.
    /// Ties go to the first tile in (length, word, target, position) order.
    pub fn largest_in(&self, lo: f64, hi: f64, cap: usize) -> Option<Tile> {
        let targets: Vec<usize> = (0..self.base.len()).collect();
        let sigma = self.cover.sigma;
        let two_eps = 2.0 * self.base.eps;
        let mut best: Option<Tile> = None;
        let mut frontier = vec![self.root(lo, hi)];
        for _ in 0..cap {
            let mut next = Vec::new();
            for br in &frontier {
                for s in 0..self.system.len() {
                    next.extend(self.extend(br, s));
                }
            }
            for br in &next {
                for t in self.tiles(br, &targets) {
                    let better = match &best {
                        None => true,
                        Some(b) => t.len() > b.len() * (1.0 + 1e-12),
                    };
                    if better {
                        best = Some(t);
                    }
                }
            }
            let floor = best.as_ref().map_or(0.0, |b| b.len() * (1.0 - 1e-12));
            next.retain(|br| {
                let &(d0, d1) = &br.chain[0];
                two_eps * br.kappa * sigma >= floor && d1 - d0 >= floor
            });
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        best
    }

    /// Shortest-then-lexicographic tile inside `[lo, hi]` mapping onto
    /// `B_target`, among words of length `1..=cap`.
    pub fn first_onto(&self, lo: f64, hi: f64, target: usize, cap: usize) -> Option<Tile> {
        let mut frontier = vec![self.root(lo, hi)];
        for _ in 0..cap {
            let mut next = Vec::new();
            for br in &frontier {
                for s in 0..self.system.len() {
                    next.extend(self.extend(br, s));
                }
            }
            // branches are produced in lexicographic word order
            for br in &next {
                if let Some(t) = self.tiles(br, &[target]).into_iter().next() {
                    return Some(t);
                }
            }
            frontier = next;
        }
        None
    }

    /// Every tile with word length in `depth..=cap` inside `[lo, hi]`.
    pub fn all_in(&self, lo: f64, hi: f64, depth: usize, cap: usize) -> Vec<Tile> {
        let targets: Vec<usize> = (0..self.base.len()).collect();
        let mut out = Vec::new();
        let mut frontier = vec![self.root(lo, hi)];
        for n in 1..=cap {
            let mut next = Vec::new();
            for br in &frontier {
                for s in 0..self.system.len() {
                    next.extend(self.extend(br, s));
                }
            }
            if n >= depth {
                for tiles in crate::par::map(&next, |br| self.tiles(br, &targets)) {
                    out.extend(tiles);
                }
            }
            frontier = next;
        }
        out
    }
}

/// Product of per-step bounds `1 / min f'` along the chain of `[d0, d1]`.
pub fn tile_kappa(system: &GeneratorSystem, word: &Word, d0: f64, d1: f64) -> f64 {
    let chain = interval_chain(system, word, d0, d1);
    word.symbols()
        .iter()
        .zip(&chain)
        .map(|(&s, &(a, b))| 1.0 / system.generators[s].min_derivative_on(&Arc::from_lift(a, b)))
        .product()
}
