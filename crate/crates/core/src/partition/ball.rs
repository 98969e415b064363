use serde::{Deserialize, Serialize};

use crate::circle::{circle_dist, reduce, Arc};
use crate::error::{Error, Result};
use crate::semigroup::{ExpandingCover, GeneratorSystem, Word};

/// The dynamical ball `{y : d(f_w^j x, f_w^j y) < eps, 0 <= j <= |w|}`,
/// realised as an open arc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicalBall {
    pub center: f64,
    pub word: Word,
    pub radius: f64,
    pub arc: Arc,
}

impl DynamicalBall {
    /// Number of times along the orbit at which the constraint applies.
    pub fn order(&self) -> usize {
        self.word.len() + 1
    }
}

fn check_radius(cover: &ExpandingCover, eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < cover.eta / 2.0) {
        return Err(Error::InvalidInput(format!(
            "radius {eps} must lie in (0, eta/2) with eta = {}",
            cover.eta
        )));
    }
    Ok(())
}

/// Reduced orbit `y_0..y_n` together with the integer shifts
/// `F(y_k) = y_{k+1} + s_k`.
fn orbit(system: &GeneratorSystem, word: &Word, x: f64) -> (Vec<f64>, Vec<f64>) {
    let mut ys = vec![reduce(x)];
    let mut shifts = Vec::with_capacity(word.len());
    for &s in word.symbols() {
        let v = system.generators[s].lift(*ys.last().unwrap());
        let k = v.floor();
        shifts.push(k);
        ys.push(v - k);
    }
    (ys, shifts)
}

pub fn dynamical_ball(
    system: &GeneratorSystem,
    cover: &ExpandingCover,
    x: f64,
    word: &Word,
    eps: f64,
) -> Result<DynamicalBall> {
    check_radius(cover, eps)?;
    if word.symbols().iter().any(|&s| s >= system.len()) {
        return Err(Error::InvalidInput(format!("word {word} uses an unknown generator")));
    }
    if let Some(p) = word.symbols().windows(2).position(|w| !system.allowed(w[0], w[1])) {
        return Err(Error::NotAdmissible(format!("{word}: driving matrix forbids position {}", p + 1)));
    }
    let (ys, shifts) = orbit(system, word, x);
    for (k, &s) in word.symbols().iter().enumerate() {
        if !cover.in_chart(s, ys[k]) {
            return Err(Error::NotAdmissible(format!(
                "{word}: step {} leaves the chart of generator {}",
                k + 1,
                s + 1
            )));
        }
    }
    let n = word.len();
    let (mut lo, mut hi) = (ys[n] - eps, ys[n] + eps);
    for k in (0..n).rev() {
        let g = &system.generators[word.symbols()[k]];
        let y = ys[k];
        let a = g.inverse_lift(lo + shifts[k], y - 1.0, y + 1.0);
        let b = g.inverse_lift(hi + shifts[k], y - 1.0, y + 1.0);
        lo = a.max(y - eps);
        hi = b.min(y + eps);
    }
    Ok(DynamicalBall {
        center: ys[0],
        word: word.clone(),
        radius: eps,
        arc: Arc::from_lift(lo, hi),
    })
}

/// Tolerance on arc endpoints when checking that a pulled-back ball maps
/// onto its target.
pub const PULLBACK_TOL: f64 = 1e-10;

/// Pull the ball `B(y, eps)` back along `word` to the ball of order
/// `|word| + 1` around `x`, where `f_w(x) = y`.
pub fn pull_back_ball(
    system: &GeneratorSystem,
    cover: &ExpandingCover,
    y: f64,
    eps: f64,
    word: &Word,
    x: f64,
) -> Result<DynamicalBall> {
    let ball = dynamical_ball(system, cover, x, word, eps)?;
    let (ys, _) = orbit(system, word, x);
    let end = ys[word.len()];
    if circle_dist(end, y) > PULLBACK_TOL {
        return Err(Error::NotAdmissible(format!(
            "{word} sends {x} to {end}, not to {y}"
        )));
    }
    let (mut a, mut b) = (ball.arc.lo, ball.arc.hi());
    for &s in word.symbols() {
        let g = &system.generators[s];
        (a, b) = (g.lift(a), g.lift(b));
    }
    let target_lo = a + signed(y - eps - a);
    if (a - target_lo).abs() > PULLBACK_TOL || (b - (target_lo + 2.0 * eps)).abs() > PULLBACK_TOL {
        return Err(Error::NotAdmissible(format!(
            "image of the pulled-back ball is [{a}, {b}], not the ball of radius {eps} about {y}"
        )));
    }
    Ok(ball)
}

/// `t` shifted by an integer into `[-1/2, 1/2)`.
fn signed(t: f64) -> f64 {
    t - (t + 0.5).floor()
}

/// Constant `K <= 1` bounding the ratio of shortest to longest pulled-back
/// diameter of a ball: `exp(-C (2 gamma)^alpha / (1 - sigma^alpha))`,
/// with `C` the Lipschitz constant of `log f'` (`alpha = 1`) and `gamma`
/// the largest diameter of a chart image.
pub fn diameter_distortion_constant(system: &GeneratorSystem, cover: &ExpandingCover) -> f64 {
    let c = system
        .generators
        .iter()
        .map(|g| g.log_derivative_lipschitz())
        .fold(0.0, f64::max);
    if c == 0.0 {
        return 1.0;
    }
    let gamma = cover
        .charts
        .iter()
        .map(|ch| {
            let g = &system.generators[ch.generator];
            let nb = ch.arc.grow(cover.r);
            let len = if nb.is_full() {
                1.0
            } else {
                g.lift(nb.hi()) - g.lift(nb.lo)
            };
            len.min(0.5)
        })
        .fold(0.0, f64::max);
    distortion_formula(c, 1.0, gamma, cover.sigma)
}

pub fn distortion_formula(c: f64, alpha: f64, gamma: f64, sigma: f64) -> f64 {
    (-c * (2.0 * gamma).powf(alpha) / (1.0 - sigma.powf(alpha))).exp()
}
