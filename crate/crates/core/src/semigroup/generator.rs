use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circle::{reduce, Arc};
use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `x -> a x + b (mod 1)`
    Affine,
    /// `x -> a x + b + c sin(2 pi x) (mod 1)`
    Perturbed,
}

/// A circle map of degree `a` from one of the two closed-form families.
///
/// The lift `F(x) = a x + b + c sin(2 pi x)` is strictly increasing whenever
/// `a > 2 pi |c|`, which makes the map a local diffeomorphism of degree `a`.
/// Expansion (`F' > 1`) is not required here; it is certified separately by
/// [`crate::semigroup::verify_locally_expanding`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub family: Family,
    pub a: u32,
    pub b: f64,
    #[serde(default)]
    pub c: f64,
}

impl Generator {
    pub fn affine(a: u32, b: f64) -> Self {
        Generator {
            family: Family::Affine,
            a,
            b,
            c: 0.0,
        }
    }

    pub fn perturbed(a: u32, b: f64, c: f64) -> Self {
        Generator {
            family: Family::Perturbed,
            a,
            b,
            c,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.a < 1 {
            return Err(Error::InvalidInput("generator degree a must be >= 1".into()));
        }
        if !self.b.is_finite() || !self.c.is_finite() {
            return Err(Error::InvalidInput("generator parameters must be finite".into()));
        }
        if self.family == Family::Affine && self.c != 0.0 {
            return Err(Error::InvalidInput("affine generator with nonzero c".into()));
        }
        if self.min_derivative() <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "generator a={} c={} is not a local diffeomorphism (a - 2 pi |c| <= 0)",
                self.a, self.c
            )));
        }
        Ok(())
    }

    /// True when the derivative is constant.
    pub fn is_affine(&self) -> bool {
        self.c == 0.0
    }

    #[inline]
    pub fn lift(&self, x: f64) -> f64 {
        let base = self.a as f64 * x + self.b;
        if self.c == 0.0 {
            base
        } else {
            base + self.c * (TWO_PI * x).sin()
        }
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        reduce(self.lift(reduce(x)))
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        if self.c == 0.0 {
            self.a as f64
        } else {
            self.a as f64 + TWO_PI * self.c * (TWO_PI * x).cos()
        }
    }

    pub fn min_derivative(&self) -> f64 {
        self.a as f64 - TWO_PI * self.c.abs()
    }

    pub fn max_derivative(&self) -> f64 {
        self.a as f64 + TWO_PI * self.c.abs()
    }

    /// Lipschitz constant of `log F'`, i.e. `sup |F''| / inf F'`.
    pub fn log_derivative_lipschitz(&self) -> f64 {
        if self.c == 0.0 {
            0.0
        } else {
            TWO_PI * TWO_PI * self.c.abs() / self.min_derivative()
        }
    }

    /// Exact minimum of `F'` over the closed arc.
    pub fn min_derivative_on(&self, arc: &Arc) -> f64 {
        if self.c == 0.0 {
            return self.a as f64;
        }
        let trough = if self.c > 0.0 { 0.5 } else { 0.0 };
        if arc.contains_closed(trough) {
            self.min_derivative()
        } else {
            self.derivative(arc.lo).min(self.derivative(arc.hi()))
        }
    }

    /// Exact maximum of `F'` over the closed arc.
    pub fn max_derivative_on(&self, arc: &Arc) -> f64 {
        if self.c == 0.0 {
            return self.a as f64;
        }
        let peak = if self.c > 0.0 { 0.0 } else { 0.5 };
        if arc.contains_closed(peak) {
            self.max_derivative()
        } else {
            self.derivative(arc.lo).max(self.derivative(arc.hi()))
        }
    }

    /// The set `{x : F'(x) > 1}`: `None` when empty.
    pub fn expanding_set(&self) -> Option<Arc> {
        let a = self.a as f64;
        if self.c == 0.0 {
            return (a > 1.0).then(Arc::full);
        }
        let t = (1.0 - a) / (TWO_PI * self.c.abs());
        if t < -1.0 {
            return Some(Arc::full());
        }
        if t >= 1.0 {
            return None;
        }
        let half_width = t.acos() / TWO_PI;
        let center = if self.c > 0.0 { 0.0 } else { 0.5 };
        Some(Arc::new(center - half_width, 2.0 * half_width))
    }

    /// Solve `F(z) = y` for `z` in the lifted interval `[lo, hi]`, on which
    /// `F` is increasing. The caller guarantees `F(lo) <= y <= F(hi)`.
    pub fn inverse_lift(&self, y: f64, lo: f64, hi: f64) -> f64 {
        if self.c == 0.0 {
            return ((y - self.b) / self.a as f64).clamp(lo, hi);
        }
        let (mut a, mut b) = (lo, hi);
        let mut z = ((y - self.b) / self.a as f64).clamp(lo, hi);
        for _ in 0..100 {
            let fz = self.lift(z) - y;
            if fz == 0.0 {
                return z;
            }
            if fz < 0.0 {
                a = z;
            } else {
                b = z;
            }
            let newton = z - fz / self.derivative(z);
            z = if newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            if (b - a).abs() <= 4.0 * f64::EPSILON * (1.0 + z.abs()) {
                break;
            }
            if fz.abs() <= 1e-17 * (1.0 + y.abs()) {
                break;
            }
        }
        z
    }
}
