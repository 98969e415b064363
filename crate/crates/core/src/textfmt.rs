//! Number formatting shared by the text artifacts.

use num_rational::Ratio;

/// 1-based line and column of a byte offset.
pub fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(src.len());
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |nl| offset - nl - 1) + 1;
    (line, column)
}

/// Shortest decimal that parses back to the same `f64`, never in exponent-free
/// ambiguity: Rust's `Display` for `f64` already round-trips.
pub fn float(x: f64) -> String {
    format!("{x:?}")
}

/// Fixed 17-significant-digit scientific notation.
pub fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

/// `p/q` when `x` is exactly the correctly rounded value of a small
/// rational, otherwise a 17-digit decimal. Either form parses back to the
/// identical `f64` through [`parse_number`].
pub fn exact_or_decimal(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        return format!("{}", x as i64);
    }
    if let Some(r) = Ratio::<i64>::approximate_float(x) {
        let (p, q) = (*r.numer(), *r.denom());
        if q > 1 && q <= 1 << 40 && (p as f64) / (q as f64) == x {
            return format!("{p}/{q}");
        }
    }
    float17(x)
}

pub fn parse_number(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.parse().ok()?;
            let q: i64 = q.parse().ok()?;
            (q != 0).then(|| p as f64 / q as f64)
        }
        None => s.parse().ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_round_trip_bitwise() {
        for &x in &[0.5, 1.0 / 3.0, 7.0 / 96.0, 0.1, std::f64::consts::PI, 3.0] {
            let s = exact_or_decimal(x);
            assert_eq!(parse_number(&s).unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(exact_or_decimal(7.0 / 96.0), "7/96");
    }

    #[test]
    fn line_and_column() {
        let src = "ab\ncde\nf";
        assert_eq!(line_col(src, 0), (1, 1));
        assert_eq!(line_col(src, 4), (2, 2));
        assert_eq!(line_col(src, 7), (3, 1));
    }
}
