use serde::{Deserialize, Serialize};

use super::generator::Generator;
use crate::error::{Error, Result};
use crate::textfmt::line_col;

/// Finitely many generators driven by a row-stochastic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSystem {
    pub generators: Vec<Generator>,
    /// `driving[i][j]` is the probability of applying generator `j` after `i`.
    pub driving: Vec<Vec<f64>>,
    /// Distribution of the starting symbol `i_0`.
    pub start: Vec<f64>,
    pub seed: u64,
}

const ROW_SUM_TOL: f64 = 1e-12;

impl GeneratorSystem {
    pub fn new(generators: Vec<Generator>, driving: Vec<Vec<f64>>) -> Result<Self> {
        let k = generators.len();
        let sys = GeneratorSystem {
            generators,
            driving,
            start: vec![1.0 / k.max(1) as f64; k],
            seed: 0,
        };
        sys.validate()?;
        Ok(sys)
    }

    /// Generators applied with all transitions equally likely.
    pub fn uniform(generators: Vec<Generator>) -> Result<Self> {
        let k = generators.len();
        Self::new(generators, vec![vec![1.0 / k as f64; k]; k])
    }

    pub fn with_start(mut self, start: Vec<f64>) -> Result<Self> {
        self.start = start;
        self.validate()?;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn is_affine(&self) -> bool {
        self.generators.iter().all(Generator::is_affine)
    }

    pub fn allowed(&self, from: usize, to: usize) -> bool {
        self.driving[from][to] > 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.generators.len();
        if k == 0 {
            return Err(Error::InvalidInput("at least one generator is required".into()));
        }
        for g in &self.generators {
            g.validate()?;
        }
        if self.driving.len() != k {
            return Err(Error::InvalidInput(format!(
                "driving matrix has {} rows for {k} generators",
                self.driving.len()
            )));
        }
        for (i, row) in self.driving.iter().enumerate() {
            check_row(i, row, k)?;
        }
        if self.start.len() != k {
            return Err(Error::InvalidInput("start distribution has wrong length".into()));
        }
        check_row(usize::MAX, &self.start, k)
    }

    /// Every symbol reachable from every other through positive entries.
    /// Kept separate from [`validate`](Self::validate) so that decoupled
    /// systems can still be built and shown to fail the mixing checks.
    pub fn check_irreducible(&self) -> Result<()> {
        match non_communicating(&self.driving) {
            Some((i, j)) => Err(Error::Reducible(i, j)),
            None => Ok(()),
        }
    }

    pub fn parse(src: &str) -> Result<Self> {
        let file: SystemFile = toml::from_str(src).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| line_col(src, s.start));
            Error::Parse {
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        let k = file.generator.len();
        for row in &file.driving {
            if let Err(Error::InvalidInput(message)) = check_row(0, row.get_ref(), k) {
                let (line, column) = line_col(src, row.span().start);
                return Err(Error::Parse {
                    line,
                    column,
                    message,
                });
            }
        }
        let sys = GeneratorSystem {
            generators: file.generator,
            driving: file.driving.into_iter().map(|r| r.into_inner()).collect(),
            start: file.start.unwrap_or_else(|| vec![1.0 / k.max(1) as f64; k]),
            seed: file.seed,
        };
        sys.validate()?;
        Ok(sys)
    }

    /// Canonical text form; `parse(to_text(s)) == s` exactly.
    pub fn to_text(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            seed: u64,
            start: &'a [f64],
            driving: &'a [Vec<f64>],
            generator: &'a [Generator],
        }
        toml::to_string(&Out {
            seed: self.seed,
            start: &self.start,
            driving: &self.driving,
            generator: &self.generators,
        })
        .expect("system serializes")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    #[serde(default)]
    seed: u64,
    start: Option<Vec<f64>>,
    driving: Vec<toml::Spanned<Vec<f64>>>,
    generator: Vec<Generator>,
}

fn check_row(i: usize, row: &[f64], k: usize) -> Result<()> {
    let what = if i == usize::MAX {
        "start distribution".to_string()
    } else {
        format!("driving row {}", i + 1)
    };
    if row.len() != k {
        return Err(Error::InvalidInput(format!("{what} has {} entries, expected {k}", row.len())));
    }
    if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidInput(format!("{what} has an entry outside [0, 1]")));
    }
    let s: f64 = row.iter().sum();
    if (s - 1.0).abs() > ROW_SUM_TOL {
        return Err(Error::InvalidInput(format!("{what} sums to {s}, not 1")));
    }
    Ok(())
}

/// First pair `(i, j)` with `j` unreachable from `i` along positive entries.
pub fn non_communicating(matrix: &[Vec<f64>]) -> Option<(usize, usize)> {
    let k = matrix.len();
    for i in 0..k {
        let mut seen = vec![false; k];
        let mut stack = vec![i];
        while let Some(s) = stack.pop() {
            for (j, &p) in matrix[s].iter().enumerate() {
                if p > 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        if let Some(j) = seen.iter().position(|&r| !r) {
            return Some((i, j));
        }
    }
    None
}
