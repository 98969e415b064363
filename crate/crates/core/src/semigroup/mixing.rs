use serde::{Deserialize, Serialize};

use super::cover::ExpandingCover;
use super::system::GeneratorSystem;
use super::words::{push_interval, Word};
use crate::circle::Arc;
use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairWitness {
    pub from: usize,
    pub to: usize,
    pub word: Word,
}

/// Outcome of the mixing search over a finite net of arcs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub scale: f64,
    pub horizon: usize,
    pub arcs: Vec<Arc>,
    pub witnesses: Vec<PairWitness>,
    pub unresolved: Vec<(usize, usize)>,
}

impl MixingReport {
    pub fn is_certified(&self) -> bool {
        self.unresolved.is_empty()
    }
}

/// Whether the lifted interval `(lo, hi)` strictly contains some integer
/// translate of the closed arc `target`.
pub fn covers_translate(lo: f64, hi: f64, target: &Arc) -> bool {
    let mut m = (lo - target.lo).ceil();
    if target.lo + m <= lo {
        m += 1.0;
    }
    target.lo + m + target.len < hi
}

/// Shortest-then-lexicographic admissible word whose image of `source`
/// strictly covers `target`, if one exists up to `horizon` letters.
pub fn find_covering_word(
    system: &GeneratorSystem,
    cover: &ExpandingCover,
    source: &Arc,
    target: &Arc,
    horizon: usize,
) -> Option<Word> {
    let k = system.len();
    let mut frontier: Vec<(Vec<usize>, f64, f64)> = vec![(Vec::new(), source.lo, source.hi())];
    for _ in 0..horizon {
        let mut next = Vec::with_capacity(frontier.len() * k);
        for (word, lo, hi) in &frontier {
            for s in 0..k {
                if let Some(&last) = word.last() {
                    if !system.allowed(last, s) {
                        continue;
                    }
                }
                if !cover.all_full() && (hi - lo >= 1.0 || !cover.arc_in_chart(s, &Arc::from_lift(*lo, *hi))) {
                    continue;
                }
                let (a, b) = push_interval(&system.generators[s], *lo, *hi);
                let mut w = word.clone();
                w.push(s);
                if covers_translate(a, b, target) {
                    return Some(Word(w));
                }
                next.push((w, a, b));
            }
        }
        frontier = next;
    }
    None
}

/// Search, for every ordered pair `(U, V)` of arcs of length `scale` from a
/// net with spacing `scale / 2`, an admissible word `w` with `f_w(U)`
/// covering `V`.
pub fn check_topological_mixing(
    system: &GeneratorSystem,
    cover: &ExpandingCover,
    scale: f64,
    horizon: usize,
) -> Result<MixingReport> {
    if !(scale > 0.0 && scale < cover.eta / 2.0) {
        return Err(Error::InvalidInput(format!(
            "mixing scale {scale} must lie in (0, eta/2) with eta = {}",
            cover.eta
        )));
    }
    let count = (2.0 / scale).ceil() as usize;
    let arcs: Vec<Arc> = (0..count)
        .map(|i| Arc::ball(i as f64 / count as f64, scale / 2.0))
        .collect();
    let pairs: Vec<(usize, usize)> = (0..count).flat_map(|u| (0..count).map(move |v| (u, v))).collect();
    let found = par::map(&pairs, |&(u, v)| find_covering_word(system, cover, &arcs[u], &arcs[v], horizon));

    let mut witnesses = Vec::new();
    let mut unresolved = Vec::new();
    for (&(from, to), w) in pairs.iter().zip(found) {
        match w {
            Some(word) => witnesses.push(PairWitness { from, to, word }),
            None => unresolved.push((from, to)),
        }
    }
    Ok(MixingReport {
        scale,
        horizon,
        arcs,
        witnesses,
        unresolved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{verify_locally_expanding, Chart, Generator};

    #[test]
    fn doubling_is_mixing_at_scale_one_eighth() {
        let sys = GeneratorSystem::uniform(vec![Generator::affine(2, 0.0)]).unwrap();
        let cover = verify_locally_expanding(&sys, 1024).unwrap();
        let rep = check_topological_mixing(&sys, &cover, 0.125, 6).unwrap();
        assert!(rep.is_certified());
        // an arc of length 1/8 needs 4 doublings to strictly cover another
        assert!(rep.witnesses.iter().all(|w| w.word.len() <= 4));
    }

    #[test]
    fn doubling_tripling_mixing() {
        let sys = GeneratorSystem::uniform(vec![Generator::affine(2, 0.0), Generator::affine(3, 0.0)]).unwrap();
        let cover = verify_locally_expanding(&sys, 1024).unwrap();
        let rep = check_topological_mixing(&sys, &cover, 0.125, 6).unwrap();
        assert!(rep.is_certified());
    }

    #[test]
    fn disjoint_attractors_are_not_mixing() {
        // x + 0.1 sin(2 pi x) attracts to 1/2, x - 0.1 sin(2 pi x) to 0
        let gens = vec![Generator::perturbed(1, 0.0, 0.1), Generator::perturbed(1, 0.0, -0.1)];
        let sys = GeneratorSystem::new(gens, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(verify_locally_expanding(&sys, 1024).is_err());
        let charts = vec![
            Chart { arc: Arc::new(-0.3, 0.6), generator: 0 },
            Chart { arc: Arc::new(0.2, 0.6), generator: 1 },
        ];
        let cover = ExpandingCover::from_charts(charts, 0.99, 0.1).unwrap();
        let rep = check_topological_mixing(&sys, &cover, cover.eta / 2.5, 8).unwrap();
        assert!(!rep.is_certified());
        // nothing near 0 reaches the ball around 1/2
        let from = rep.arcs.iter().position(|a| a.contains(0.0)).unwrap();
        let to = rep.arcs.iter().position(|a| a.contains(0.5)).unwrap();
        assert!(rep.unresolved.contains(&(from, to)));
    }

    #[test]
    fn scale_must_be_below_half_eta() {
        let sys = GeneratorSystem::uniform(vec![Generator::affine(2, 0.0)]).unwrap();
        let cover = verify_locally_expanding(&sys, 1024).unwrap();
        assert!(check_topological_mixing(&sys, &cover, 0.3, 6).is_err());
    }

    #[test]
    fn translate_cover_is_strict() {
        let t = Arc::new(0.25, 0.25);
        assert!(covers_translate(1.2, 1.6, &t));
        assert!(!covers_translate(1.25, 1.6, &t));
        assert!(!covers_translate(0.3, 1.2, &t));
        assert!(covers_translate(0.3, 1.6, &t));
    }
}
