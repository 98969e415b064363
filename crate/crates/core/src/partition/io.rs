use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::base::BaseCover;
use super::markov::{CountableMarkovPartition, PartitionElement};
use crate::circle::Arc;
use crate::error::{Error, Result};
use crate::semigroup::Word;
use crate::textfmt::{exact_or_decimal as num, parse_number};

pub const PARTITION_HEADER: &str = "induced-markov partition v1";

impl CountableMarkovPartition {
    /// Stable line-oriented text form. Indices are 1-based; numbers are
    /// exact fractions when the value is one, else 17-digit decimals.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{PARTITION_HEADER}");
        let _ = writeln!(s, "tol {}", num(self.tol));
        let _ = writeln!(s, "cap {}", self.cap);
        let _ = writeln!(s, "base {} {}", self.base.len(), num(self.base.eps));
        for (j, b) in self.base.balls.iter().enumerate() {
            let _ = writeln!(s, "ball {} {} {}", j + 1, num(b.lo), num(b.hi()));
        }
        for e in &self.elements {
            let _ = writeln!(
                s,
                "element {} {} {} {} {} {} {}",
                e.index + 1,
                e.word,
                num(e.arc.lo),
                num(e.arc.hi()),
                e.image + 1,
                e.return_time(),
                num(e.kappa)
            );
        }
        let cyc: Vec<String> = self.cycle.iter().map(|b| (b + 1).to_string()).collect();
        let _ = writeln!(s, "cycle {}", cyc.join(" "));
        let _ = writeln!(s, "uncovered {}", num(self.uncovered));
        s
    }

    /// Hex SHA-256 of [`Self::to_text`].
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    pub fn parse(src: &str) -> Result<Self> {
        let mut lines = src.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let err = |line: usize, message: String| Error::Parse {
            line: line + 1,
            column: 1,
            message,
        };
        match lines.next() {
            Some((_, l)) if l.trim() == PARTITION_HEADER => {}
            Some((i, l)) => return Err(err(i, format!("expected header `{PARTITION_HEADER}`, found `{l}`"))),
            None => return Err(err(0, "empty partition file".into())),
        }
        let mut tol = None;
        let mut cap = None;
        let mut eps = None;
        let mut balls = Vec::new();
        let mut elements = Vec::new();
        let mut cycle = None;
        let mut uncovered = None;
        for (i, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            let number = |k: usize| -> Result<f64> {
                f.get(k)
                    .and_then(|t| parse_number(t))
                    .ok_or_else(|| err(i, format!("field {} of `{line}` is not a number", k + 1)))
            };
            let index = |k: usize| -> Result<usize> {
                f.get(k)
                    .and_then(|t| t.parse::<usize>().ok())
                    .filter(|&v| v >= 1)
                    .map(|v| v - 1)
                    .ok_or_else(|| err(i, format!("field {} of `{line}` is not a positive index", k + 1)))
            };
            match f[0] {
                "tol" => tol = Some(number(1)?),
                "cap" => cap = Some(index(1)? + 1),
                "base" => eps = Some(number(2)?),
                "ball" => balls.push(Arc::from_lift(number(2)?, number(3)?)),
                "element" => {
                    let word = f
                        .get(2)
                        .and_then(|w| Word::parse(w))
                        .ok_or_else(|| err(i, format!("bad word in `{line}`")))?;
                    let e = PartitionElement {
                        index: index(1)?,
                        arc: Arc::from_lift(number(3)?, number(4)?),
                        image: index(5)?,
                        kappa: number(7)?,
                        word,
                    };
                    if e.index != elements.len() || index(6)? + 1 != e.return_time() {
                        return Err(err(i, format!("inconsistent element line `{line}`")));
                    }
                    elements.push(e);
                }
                "cycle" => cycle = Some((1..f.len()).map(index).collect::<Result<Vec<_>>>()?),
                "uncovered" => uncovered = Some(number(1)?),
                other => return Err(err(i, format!("unknown record `{other}`"))),
            }
        }
        let missing = |what: &str| Error::Parse {
            line: src.lines().count(),
            column: 1,
            message: format!("missing `{what}` record"),
        };
        Ok(CountableMarkovPartition {
            base: BaseCover {
                eps: eps.ok_or_else(|| missing("base"))?,
                balls,
            },
            elements,
            cycle: cycle.ok_or_else(|| missing("cycle"))?,
            tol: tol.ok_or_else(|| missing("tol"))?,
            cap: cap.ok_or_else(|| missing("cap"))?,
            uncovered: uncovered.ok_or_else(|| missing("uncovered"))?,
        })
    }
}
