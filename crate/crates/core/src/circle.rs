//! The circle R/Z with its arclength metric, and arcs on it.

use serde::{Deserialize, Serialize};

/// Reduce a real number into `[0, 1)`.
#[inline]
pub fn reduce(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Arclength distance on R/Z, at most 1/2.
#[inline]
pub fn circle_dist(x: f64, y: f64) -> f64 {
    let d = reduce(x - y);
    d.min(1.0 - d)
}

/// Signed displacement `t` in `[-1/2, 1/2)` with `from + t ≡ to (mod 1)`.
#[inline]
pub fn signed_offset(from: f64, to: f64) -> f64 {
    let d = reduce(to - from);
    if d >= 0.5 {
        d - 1.0
    } else {
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct CirclePoint(f64);

impl CirclePoint {
    pub fn new(x: f64) -> Self {
        CirclePoint(reduce(x))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn dist(self, other: CirclePoint) -> f64 {
        circle_dist(self.0, other.0)
    }
}

impl From<f64> for CirclePoint {
    fn from(x: f64) -> Self {
        CirclePoint::new(x)
    }
}

/// An arc of the circle, stored as a lifted interval `[lo, lo + len]` with
/// `lo` in `[0, 1)` and `0 <= len <= 1`. Membership tests treat the arc as
/// open unless stated otherwise; `len == 1` is the whole circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub lo: f64,
    pub len: f64,
}

impl Arc {
    pub fn new(lo: f64, len: f64) -> Self {
        Arc {
            lo: reduce(lo),
            len: len.clamp(0.0, 1.0),
        }
    }

    /// Arc from lifted endpoints `a <= b`.
    pub fn from_lift(a: f64, b: f64) -> Self {
        Arc::new(a, b - a)
    }

    pub fn ball(center: f64, radius: f64) -> Self {
        Arc::new(center - radius, 2.0 * radius)
    }

    pub fn full() -> Self {
        Arc { lo: 0.0, len: 1.0 }
    }

    pub fn is_full(&self) -> bool {
        self.len >= 1.0
    }

    pub fn hi(&self) -> f64 {
        self.lo + self.len
    }

    pub fn midpoint(&self) -> f64 {
        reduce(self.lo + 0.5 * self.len)
    }

    /// Lift of `x` into `[lo, lo + 1)`.
    #[inline]
    pub fn lift(&self, x: f64) -> f64 {
        self.lo + reduce(x - self.lo)
    }

    /// Open-arc membership.
    pub fn contains(&self, x: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let t = reduce(x - self.lo);
        t > 0.0 && t < self.len
    }

    pub fn contains_closed(&self, x: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let t = reduce(x - self.lo);
        t <= self.len || t == 0.0
    }

    /// Distance from `x` to the complement of the arc (0 outside).
    pub fn inner_radius(&self, x: f64) -> f64 {
        if self.is_full() {
            return f64::INFINITY;
        }
        let t = reduce(x - self.lo);
        if t >= self.len {
            0.0
        } else {
            t.min(self.len - t)
        }
    }

    /// True when `other` (as a closed arc, shrunk by `tol` at both ends) lies
    /// inside the closure of `self`.
    pub fn contains_arc(&self, other: &Arc, tol: f64) -> bool {
        if self.is_full() {
            return true;
        }
        if other.len > self.len + 2.0 * tol {
            return false;
        }
        let start = reduce(other.lo - self.lo);
        let start = if start > 1.0 - tol { start - 1.0 } else { start };
        start >= -tol && start + other.len <= self.len + tol
    }

    /// Whether the open arcs intersect.
    pub fn intersects(&self, other: &Arc) -> bool {
        if self.len <= 0.0 || other.len <= 0.0 {
            return false;
        }
        if self.is_full() || other.is_full() {
            return true;
        }
        let s = reduce(other.lo - self.lo);
        s < self.len || s + other.len > 1.0
    }

    /// Arc shrunk by `r` at each end; `None` if nothing is left.
    pub fn shrink(&self, r: f64) -> Option<Arc> {
        if self.is_full() {
            return Some(*self);
        }
        let len = self.len - 2.0 * r;
        (len > 0.0).then(|| Arc::new(self.lo + r, len))
    }

    /// Arc grown by `r` at each end, saturating at the whole circle.
    pub fn grow(&self, r: f64) -> Arc {
        if self.is_full() || self.len + 2.0 * r >= 1.0 {
            Arc::full()
        } else {
            Arc::new(self.lo - r, self.len + 2.0 * r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_is_bounded_and_symmetric() {
        assert!((circle_dist(0.1, 0.9) - 0.2).abs() < 1e-15);
        assert!((circle_dist(0.05, 0.95) - 0.1).abs() < 1e-15);
        assert!(circle_dist(0.0, 0.5) <= 0.5);
        assert_eq!(CirclePoint::new(1.25).value(), 0.25);
        assert_eq!(CirclePoint::new(-0.25).value(), 0.75);
    }

    #[test]
    fn wrapping_arc_membership() {
        let a = Arc::new(0.9, 0.2);
        assert!(a.contains(0.95));
        assert!(a.contains(0.05));
        assert!(!a.contains(0.5));
        assert!(!a.contains(0.9));
        assert!(a.contains_arc(&Arc::new(0.95, 0.1), 0.0));
        assert!(!a.contains_arc(&Arc::new(0.05, 0.1), 0.0));
        assert!((a.inner_radius(0.0) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn intersection_of_open_arcs() {
        let a = Arc::new(0.0, 0.5);
        assert!(!a.intersects(&Arc::new(0.5, 0.25)));
        assert!(a.intersects(&Arc::new(0.4, 0.25)));
        assert!(a.intersects(&Arc::new(0.9, 0.2)));
        assert!(!a.intersects(&Arc::new(0.75, 0.25)));
    }
}
