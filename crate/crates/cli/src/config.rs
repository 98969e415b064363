use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use induced_markov::semigroup::GeneratorSystem;
use induced_markov::textfmt::line_col;
use induced_markov::{Error, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Verify,
    Partition,
    InduceCheck,
    Thermo,
    Measures,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::Verify,
        Stage::Partition,
        Stage::InduceCheck,
        Stage::Thermo,
        Stage::Measures,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Verify => "verify",
            Stage::Partition => "partition",
            Stage::InduceCheck => "induce-check",
            Stage::Thermo => "thermo",
            Stage::Measures => "measures",
        }
    }

    pub fn requires(self) -> Option<Stage> {
        match self {
            Stage::Verify => None,
            Stage::Partition => Some(Stage::Verify),
            _ => Some(Stage::Partition),
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s.trim())
            .ok_or_else(|| Error::InvalidInput(format!("unknown stage `{s}`")))
    }
}

/// Parse a comma-separated stage list; it must be closed under
/// prerequisites.
pub fn parse_stages(list: &[String]) -> Result<Vec<Stage>> {
    let mut stages: Vec<Stage> = list
        .iter()
        .flat_map(|s| s.split(','))
        .filter(|s| !s.trim().is_empty())
        .map(Stage::from_str)
        .collect::<Result<_>>()?;
    stages.sort();
    stages.dedup();
    for s in &stages {
        if let Some(r) = s.requires() {
            if !stages.contains(&r) {
                return Err(Error::InvalidInput(format!("stage {s} needs stage {r}")));
            }
        }
    }
    Ok(stages)
}

/// Potentials accepted by the thermo stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialSpec {
    Constant(f64),
    /// `-t log |T'|`.
    LogDerivative(f64),
    /// `psi(x) = x`.
    Coordinate,
}

impl FromStr for PotentialSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let num = |p: &str| {
            p.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::InvalidInput(format!("bad number `{p}` in potential `{s}`")))
        };
        match parts.as_slice() {
            ["constant", c] => Ok(PotentialSpec::Constant(num(c)?)),
            ["log-derivative"] => Ok(PotentialSpec::LogDerivative(1.0)),
            ["log-derivative", t] => Ok(PotentialSpec::LogDerivative(num(t)?)),
            ["coordinate"] => Ok(PotentialSpec::Coordinate),
            _ => Err(Error::InvalidInput(format!(
                "potential `{s}`: expected `constant <c>`, `log-derivative [t]` or `coordinate`"
            ))),
        }
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialSpec::Constant(c) => write!(f, "constant {c:?}"),
            PotentialSpec::LogDerivative(t) => write!(f, "log-derivative {t:?}"),
            PotentialSpec::Coordinate => f.write_str("coordinate"),
        }
    }
}

fn d_cap() -> usize {
    24
}
fn d_tol() -> f64 {
    1e-3
}
fn d_grid() -> usize {
    1024
}
fn d_horizon() -> usize {
    12
}
fn d_bins() -> usize {
    512
}
fn d_iterations() -> usize {
    200
}
fn d_nmax() -> usize {
    16
}
fn d_depth() -> usize {
    8
}
fn d_potential() -> String {
    "constant 0".into()
}
fn d_samples() -> usize {
    100_000
}
fn d_birkhoff() -> usize {
    1000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    system: String,
    #[serde(default)]
    seed: u64,
    eps: f64,
    balls: Option<usize>,
    #[serde(default = "d_cap")]
    cap: usize,
    #[serde(default = "d_tol")]
    tol: f64,
    #[serde(default = "d_grid")]
    grid: usize,
    mixing_scale: Option<f64>,
    #[serde(default = "d_horizon")]
    horizon: usize,
    #[serde(default = "d_bins")]
    bins: usize,
    #[serde(default = "d_iterations")]
    iterations: usize,
    #[serde(default = "d_nmax")]
    n_max: usize,
    #[serde(default = "d_depth")]
    gibbs_depth: usize,
    #[serde(default = "d_potential")]
    potential: String,
    #[serde(default = "d_samples")]
    samples: usize,
    #[serde(default = "d_birkhoff")]
    birkhoff: usize,
    stages: Option<Vec<String>>,
}

/// A run configuration with the system file resolved.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub path: PathBuf,
    pub source: String,
    pub system_path: PathBuf,
    pub system_source: String,
    pub system: GeneratorSystem,
    pub seed: u64,
    pub eps: f64,
    pub balls: Option<usize>,
    pub cap: usize,
    pub tol: f64,
    pub grid: usize,
    pub mixing_scale: Option<f64>,
    pub horizon: usize,
    pub bins: usize,
    pub iterations: usize,
    pub n_max: usize,
    pub gibbs_depth: usize,
    pub potential: PotentialSpec,
    pub samples: usize,
    pub birkhoff: usize,
    pub stages: Vec<Stage>,
}

fn parse_error(src: &str, e: &toml::de::Error) -> Error {
    let (line, column) = e.span().map_or((1, 1), |s| line_col(src, s.start));
    Error::Parse {
        line,
        column,
        message: e.message().to_string(),
    }
}

/// Prefix the file name onto parse errors.
pub fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { line, column, message } => Error::Parse {
            line,
            column,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let source = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
        let file: ConfigFile = toml::from_str(&source).map_err(|e| in_file(path, parse_error(&source, &e)))?;
        let system_path = path.parent().unwrap_or(Path::new(".")).join(&file.system);
        let system_source = std::fs::read_to_string(&system_path)
            .map_err(|e| Error::InvalidInput(format!("cannot read system {}: {e}", system_path.display())))?;
        let system = GeneratorSystem::parse(&system_source).map_err(|e| in_file(&system_path, e))?;
        let stages = match &file.stages {
            Some(s) => parse_stages(s)?,
            None => Stage::ALL.to_vec(),
        };
        let cfg = RunConfig {
            path: path.to_path_buf(),
            source,
            system_path,
            system_source,
            system,
            seed: file.seed,
            eps: file.eps,
            balls: file.balls,
            cap: file.cap,
            tol: file.tol,
            grid: file.grid,
            mixing_scale: file.mixing_scale,
            horizon: file.horizon,
            bins: file.bins,
            iterations: file.iterations,
            n_max: file.n_max,
            gibbs_depth: file.gibbs_depth,
            potential: file.potential.parse()?,
            samples: file.samples,
            birkhoff: file.birkhoff,
            stages,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("eps", self.eps), ("tol", self.tol)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(s) = self.mixing_scale {
            if !(s > 0.0) {
                return Err(Error::InvalidInput(format!("mixing_scale must be positive, got {s}")));
            }
        }
        if self.n_max < 2 {
            return Err(Error::InvalidInput("n_max must be at least 2".into()));
        }
        if self.bins < 64 || !self.bins.is_power_of_two() {
            return Err(Error::InvalidInput(format!("bins must be a power of two >= 64, got {}", self.bins)));
        }
        if self.cap == 0 || self.grid == 0 || self.horizon == 0 || self.iterations == 0 {
            return Err(Error::InvalidInput("cap, grid, horizon and iterations must be positive".into()));
        }
        Ok(())
    }
}
