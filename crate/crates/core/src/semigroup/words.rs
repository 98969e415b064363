use std::fmt;

use serde::{Deserialize, Serialize};

use super::cover::ExpandingCover;
use super::generator::Generator;
use super::system::GeneratorSystem;
use crate::circle::{reduce, Arc, CirclePoint};
use crate::error::{Error, Result};

/// A finite word `(i_1, ..., i_n)` over the generator alphabet, applied left
/// to right: `f_w = f_{i_n} o ... o f_{i_1}`. Symbols are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n].to_vec())
    }

    /// Parse the dotted 1-based form, e.g. `1.2.2`; `-` is the empty word.
    pub fn parse(s: &str) -> Option<Word> {
        if s == "-" {
            return Some(Word::empty());
        }
        s.split('.')
            .map(|t| t.parse::<usize>().ok().filter(|&v| v >= 1).map(|v| v - 1))
            .collect::<Option<Vec<_>>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "-");
        }
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ".")?;
            }
            write!(f, "{}", s + 1)?;
        }
        Ok(())
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

fn check_symbols(system: &GeneratorSystem, word: &Word) -> Result<()> {
    match word.0.iter().find(|&&s| s >= system.len()) {
        Some(s) => Err(Error::InvalidInput(format!(
            "symbol {} out of range 1..={}",
            s + 1,
            system.len()
        ))),
        None => Ok(()),
    }
}

/// `f_{i_n} o ... o f_{i_1}(x)` reduced mod 1.
pub fn apply_word(system: &GeneratorSystem, word: &Word, x: CirclePoint) -> Result<CirclePoint> {
    check_symbols(system, word)?;
    let y = word
        .0
        .iter()
        .fold(x.value(), |y, &s| system.generators[s].apply(y));
    Ok(CirclePoint::new(y))
}

/// `prod_j f'_{i_j}(x_{j-1})` along the orbit of `x`.
pub fn derivative_along_word(system: &GeneratorSystem, word: &Word, x: CirclePoint) -> Result<f64> {
    check_symbols(system, word)?;
    let mut y = x.value();
    let mut d = 1.0;
    for &s in &word.0 {
        let g = &system.generators[s];
        d *= g.derivative(y);
        y = g.apply(y);
    }
    Ok(d)
}

/// Push a lifted interval `[lo, hi]` through one generator, then translate
/// both ends by the same integer so the left end lies in `[0, 1)`.
#[inline]
pub fn push_interval(g: &Generator, lo: f64, hi: f64) -> (f64, f64) {
    let (a, b) = (g.lift(lo), g.lift(hi));
    let shift = a.floor();
    (a - shift, b - shift)
}

/// The chain of lifted intervals `I_0 = [lo, hi], I_j = F_{i_j}(I_{j-1})`.
pub fn interval_chain(system: &GeneratorSystem, word: &Word, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut chain = Vec::with_capacity(word.len() + 1);
    chain.push((lo, hi));
    let (mut a, mut b) = (lo, hi);
    for &s in &word.0 {
        (a, b) = push_interval(&system.generators[s], a, b);
        chain.push((a, b));
    }
    chain
}

/// Invert a lifted target value through the chain produced by
/// [`interval_chain`]; returns the lifted point in `chain[0]`.
pub fn pull_through_chain(system: &GeneratorSystem, word: &Word, chain: &[(f64, f64)], y: f64) -> f64 {
    let mut y = y;
    for (k, &s) in word.0.iter().enumerate().rev() {
        let g = &system.generators[s];
        let (lo, hi) = chain[k];
        // chain[k+1] is F(chain[k]) shifted by an integer; undo the shift.
        let shift = g.lift(lo) - chain[k + 1].0;
        y = g.inverse_lift(y + shift, lo, hi);
    }
    y
}

#[derive(Debug, Clone, PartialEq)]
pub enum Admissibility {
    Admissible { witness: CirclePoint },
    /// `driving[i_pos][i_{pos+1}] == 0` (0-based position of the first symbol).
    DrivingForbidden { position: usize },
    GeometryForbidden,
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible { .. })
    }
}

/// Grid resolution used in the witness search.
pub const WITNESS_GRID: usize = 1 << 10;

fn itinerary_ok(system: &GeneratorSystem, cover: &ExpandingCover, word: &Word, x: f64) -> bool {
    let mut y = x;
    for &s in &word.0 {
        if !cover.in_chart(s, y) {
            return false;
        }
        y = system.generators[s].apply(y);
    }
    true
}

/// Whether the word is allowed by the driving matrix and realised by some
/// point whose itinerary follows the charts (`x in V_{i_1}`,
/// `f_{i_1}(x) in V_{i_2}`, ...).
///
/// The witness search scans a uniform grid of [`WITNESS_GRID`] cells over each
/// chart of the first symbol, then the cell midpoints.
pub fn is_admissible(system: &GeneratorSystem, cover: &ExpandingCover, word: &Word) -> Result<Admissibility> {
    check_symbols(system, word)?;
    if let Some(position) = word.0.windows(2).position(|w| !system.allowed(w[0], w[1])) {
        return Ok(Admissibility::DrivingForbidden { position });
    }
    let Some(&first) = word.0.first() else {
        return Ok(Admissibility::Admissible {
            witness: CirclePoint::new(0.0),
        });
    };
    for chart in cover.charts.iter().filter(|c| c.generator == first) {
        let arc = chart.arc;
        let h = arc.len / WITNESS_GRID as f64;
        for offset in [0.5, 0.25, 0.75] {
            for i in 0..WITNESS_GRID {
                let x = reduce(arc.lo + (i as f64 + offset) * h);
                if itinerary_ok(system, cover, word, x) {
                    return Ok(Admissibility::Admissible {
                        witness: CirclePoint::new(x),
                    });
                }
            }
        }
    }
    Ok(Admissibility::GeometryForbidden)
}

/// Whether every point of the closed arc follows the chart itinerary of the
/// word and the driving matrix allows every transition.
pub fn arc_admissible(system: &GeneratorSystem, cover: &ExpandingCover, word: &Word, lo: f64, hi: f64) -> bool {
    if word.0.windows(2).any(|w| !system.allowed(w[0], w[1])) {
        return false;
    }
    if cover.all_full() {
        return true;
    }
    let (mut a, mut b) = (lo, hi);
    for &s in &word.0 {
        if b - a >= 1.0 || !cover.arc_in_chart(s, &Arc::from_lift(a, b)) {
            return false;
        }
        (a, b) = push_interval(&system.generators[s], a, b);
    }
    true
}
