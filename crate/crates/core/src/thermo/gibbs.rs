use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::chain::WeightedChain;
use super::potential::ShiftPotential;
use crate::error::{Error, Result};
use crate::partition::{period, TransitionMatrix};

pub const GIBBS_TOL: f64 = 1e-12;
pub const MAX_ITER: usize = 200_000;
/// Mass-balance tolerance for invariance checks.
pub const INVARIANCE_TOL: f64 = 1e-9;

/// A stationary Markov measure on the one-sided shift of a transition
/// matrix. `transition(i, k)` is the probability of the `k`-th allowed
/// successor of `i`.
pub trait MarkovMeasure {
    fn matrix(&self) -> &TransitionMatrix;
    fn initial(&self, i: usize) -> f64;
    fn transition(&self, i: usize, k: usize) -> f64;

    /// Mass of the cylinder `[a_0 .. a_{n-1}]`; zero for forbidden words.
    fn cylinder_mass(&self, word: &[usize]) -> f64 {
        let Some(&a0) = word.first() else {
            return 1.0;
        };
        let t = self.matrix();
        let mut m = self.initial(a0);
        for w in word.windows(2) {
            match t.row(w[0]).binary_search(&w[1]) {
                Ok(k) => m *= self.transition(w[0], k),
                Err(_) => return 0.0,
            }
        }
        m
    }
}

/// A Markov measure given by its initial vector and transition rows, with
/// `rows[i][k]` aligned to `matrix.row(i)[k]`.
#[derive(Debug, Clone)]
pub struct ExplicitMarkov {
    pub matrix: TransitionMatrix,
    pub p: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

impl ExplicitMarkov {
    pub fn new(matrix: &TransitionMatrix, p: Vec<f64>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if p.len() != matrix.dim() || rows.len() != matrix.dim() {
            return Err(Error::InvalidInput("measure and matrix sizes differ".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != matrix.row(i).len() {
                return Err(Error::InvalidInput(format!("row {} does not match the allowed successors", i + 1)));
            }
        }
        Ok(ExplicitMarkov { matrix: matrix.clone(), p, rows })
    }

    /// The Markov measure of a stochastic matrix, with its stationary vector.
    pub fn stationary(matrix: &TransitionMatrix, rows: Vec<Vec<f64>>) -> Result<Self> {
        let p = stationary_vector(matrix, &rows)?;
        ExplicitMarkov::new(matrix, p, rows)
    }
}

impl MarkovMeasure for ExplicitMarkov {
    fn matrix(&self) -> &TransitionMatrix {
        &self.matrix
    }
    fn initial(&self, i: usize) -> f64 {
        self.p[i]
    }
    fn transition(&self, i: usize, k: usize) -> f64 {
        self.rows[i][k]
    }
}

/// Stationary vector of a stochastic matrix by lazy power iteration.
fn stationary_vector(t: &TransitionMatrix, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = t.dim();
    let mut p = vec![1.0 / n as f64; n];
    for _ in 0..MAX_ITER {
        let mut q = vec![0.0; n];
        for i in 0..n {
            for (&j, &w) in t.row(i).iter().zip(&rows[i]) {
                q[j] += p[i] * w;
            }
        }
        let mut diff = 0.0f64;
        for j in 0..n {
            diff = diff.max((q[j] - p[j]).abs());
            q[j] = 0.5 * (q[j] + p[j]);
        }
        let s: f64 = q.iter().sum();
        p = q.into_iter().map(|x| x / s).collect();
        if diff < 1e-14 {
            return Ok(p);
        }
    }
    Err(Error::Convergence("stationary vector of a perturbed chain".into()))
}

/// Leading eigendata of the weighted matrix and the Markov measure it
/// defines.
#[derive(Debug, Clone)]
pub struct GibbsMeasure {
    pub chain: WeightedChain,
    pub lambda: f64,
    pub pressure: f64,
    /// Right eigenvector, normalised to sum 1.
    pub h: Vec<f64>,
    /// Left eigenvector, normalised to sum 1.
    pub nu: Vec<f64>,
    /// Stationary vector `nu_i h_i / <nu, h>`.
    pub p: Vec<f64>,
    /// Largest relative eigen-residual of `h` and `nu`.
    pub residual: f64,
    pub iterations: usize,
}

impl MarkovMeasure for GibbsMeasure {
    fn matrix(&self) -> &TransitionMatrix {
        &self.chain.matrix
    }
    fn initial(&self, i: usize) -> f64 {
        self.p[i]
    }
    fn transition(&self, i: usize, k: usize) -> f64 {
        if self.h[i] == 0.0 {
            return 0.0;
        }
        let j = self.chain.matrix.row(i)[k];
        (self.chain.log_weight(i, k) - self.pressure).exp() * self.h[j] / self.h[i]
    }
}

impl GibbsMeasure {
    pub fn summary(&self) -> GibbsSummary {
        GibbsSummary {
            lambda: self.lambda,
            pressure: self.pressure,
            residual: self.residual,
            iterations: self.iterations,
            p: self.p.clone(),
        }
    }

    /// Transition rows of the measure, aligned with the matrix rows.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.chain.dim())
            .map(|i| (0..self.chain.matrix.row(i).len()).map(|k| self.transition(i, k)).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsSummary {
    pub lambda: f64,
    pub pressure: f64,
    pub residual: f64,
    pub iterations: usize,
    pub p: Vec<f64>,
}

fn normalise(v: &mut [f64]) -> f64 {
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        for x in v.iter_mut() {
            *x /= s;
        }
    }
    s
}

fn eigen_residual(wv: &[f64], v: &[f64], lambda: f64) -> f64 {
    let m = v.iter().copied().fold(0.0, f64::max);
    wv.iter()
        .zip(v)
        .map(|(a, b)| (a - lambda * b).abs())
        .fold(0.0, f64::max)
        / (lambda * m)
}

/// Perron data of `W_ij = t_ij exp(phi)` by power iteration, and the
/// Markov measure `pi_ij = W_ij h_j / (lambda h_i)`, `p_i ∝ nu_i h_i`.
pub fn transfer_gibbs(t: &TransitionMatrix, phi: &dyn ShiftPotential, tol: f64) -> Result<GibbsMeasure> {
    match period(t) {
        None => {
            return Err(Error::Convergence(
                "truncated matrix is not irreducible, Perron data is not unique".into(),
            ))
        }
        Some(d) if d > 1 => {
            return Err(Error::Convergence(format!(
                "truncated matrix has period {d}, power iteration cannot converge"
            )))
        }
        _ => {}
    }
    let chain = WeightedChain::new(t, phi)?;
    let n = chain.dim();
    let mut h = vec![1.0 / n as f64; n];
    let mut nu = h.clone();
    for it in 1..=MAX_ITER {
        let mut wh = chain.right(&h);
        let mut wnu = chain.left(&nu);
        let lh: f64 = wh.iter().sum::<f64>() / h.iter().sum::<f64>();
        let lnu: f64 = wnu.iter().sum::<f64>() / nu.iter().sum::<f64>();
        let residual = eigen_residual(&wh, &h, lh).max(eigen_residual(&wnu, &nu, lnu));
        normalise(&mut wh);
        normalise(&mut wnu);
        h = wh;
        nu = wnu;
        if !(lh.is_finite() && lh > 0.0) {
            return Err(Error::Convergence(format!("leading eigenvalue estimate {lh}")));
        }
        if residual <= tol {
            let lambda = chain.right(&h).iter().sum::<f64>();
            let dot: f64 = nu.iter().zip(&h).map(|(a, b)| a * b).sum();
            let p = nu.iter().zip(&h).map(|(a, b)| a * b / dot).collect();
            let wh = chain.right(&h);
            let wnu = chain.left(&nu);
            let residual = eigen_residual(&wh, &h, lambda).max(eigen_residual(&wnu, &nu, lambda));
            return Ok(GibbsMeasure {
                chain,
                lambda,
                pressure: lambda.ln(),
                h,
                nu,
                p,
                residual,
                iterations: it,
            });
        }
    }
    Err(Error::Convergence(format!("no eigen-residual below {tol:e} after {MAX_ITER} iterations")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsCertificate {
    pub depth: usize,
    pub pressure: f64,
    /// `log B_n`: the worst `|log(mu / exp(phi_n - nP))|` over cylinders of
    /// length `n`, for `n = 1..=depth`.
    pub log_b: Vec<f64>,
    /// `B = max_n B_n`.
    pub b: f64,
    /// Largest and smallest observed ratio.
    pub worst: f64,
    pub best: f64,
    /// An allowed cylinder has zero mass.
    pub infinite: bool,
}

impl GibbsCertificate {
    pub fn holds(&self, b_max: f64) -> bool {
        !self.infinite && self.b <= b_max
    }
}

/// Worst ratio `mu[a_0..a_{n-1}] / exp(phi_n - nP)` over every allowed
/// cylinder with `n <= depth`. The potential must have memory at most 2;
/// with memory 2 the ratio is taken over all one-step continuations.
pub fn verify_gibbs(
    measure: &dyn MarkovMeasure,
    phi: &dyn ShiftPotential,
    pressure: f64,
    depth: usize,
) -> Result<GibbsCertificate> {
    let t = measure.matrix();
    let chain = WeightedChain::new(t, phi)?;
    let n = t.dim();
    // final-step correction P - lw(j, b), extremised over b
    let tail: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            (0..t.row(j).len())
                .map(|k| pressure - chain.log_weight(j, k))
                .fold((f64::NEG_INFINITY, f64::INFINITY), |(a, b), x| (a.max(x), b.min(x)))
        })
        .collect();
    let mut hi: Vec<f64> = (0..n).map(|i| measure.initial(i).ln()).collect();
    let mut lo = hi.clone();
    let mut log_b = Vec::with_capacity(depth);
    let (mut worst, mut best) = (f64::NEG_INFINITY, f64::INFINITY);
    for d in 1..=depth {
        let mut mx = f64::NEG_INFINITY;
        let mut mn = f64::INFINITY;
        for j in 0..n {
            if t.row(j).is_empty() || hi[j] == f64::NEG_INFINITY && lo[j] == f64::INFINITY {
                continue;
            }
            mx = mx.max(hi[j] + tail[j].0);
            mn = mn.min(lo[j] + tail[j].1);
        }
        worst = worst.max(mx);
        best = best.min(mn);
        log_b.push(mx.max(-mn));
        if d == depth {
            break;
        }
        let mut nh = vec![f64::NEG_INFINITY; n];
        let mut nl = vec![f64::INFINITY; n];
        for i in 0..n {
            if hi[i] == f64::NEG_INFINITY && lo[i] == f64::INFINITY {
                continue;
            }
            for (k, &j) in t.row(i).iter().enumerate() {
                let step = measure.transition(i, k).ln() - chain.log_weight(i, k) + pressure;
                nh[j] = nh[j].max(hi[i] + step);
                nl[j] = nl[j].min(lo[i] + step);
            }
        }
        hi = nh;
        lo = nl;
    }
    let infinite = best == f64::NEG_INFINITY || worst == f64::INFINITY;
    let log_max = log_b.iter().copied().fold(0.0, f64::max);
    Ok(GibbsCertificate {
        depth,
        pressure,
        b: if infinite { f64::INFINITY } else { log_max.exp() },
        log_b,
        worst: worst.exp(),
        best: best.exp(),
        infinite,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub entropy: f64,
    pub integral: f64,
    pub pressure: f64,
    /// `P - (h + ∫phi)`.
    pub residual: f64,
}

/// Entropy and `∫phi` of a Markov measure; fails if the measure is not
/// shift-invariant.
pub fn equilibrium_check(measure: &dyn MarkovMeasure, phi: &dyn ShiftPotential, pressure: f64) -> Result<EquilibriumReport> {
    let t = measure.matrix();
    let chain = WeightedChain::new(t, phi)?;
    let n = t.dim();
    let mut image = vec![0.0; n];
    let mut entropy = 0.0;
    let mut integral = 0.0;
    for i in 0..n {
        let pi = measure.initial(i);
        let mut row_sum = 0.0;
        for (k, &j) in t.row(i).iter().enumerate() {
            let q = measure.transition(i, k);
            row_sum += q;
            image[j] += pi * q;
            if q > 0.0 {
                entropy -= pi * q * q.ln();
                integral += pi * q * chain.log_weight(i, k);
            }
        }
        if pi > 0.0 && (row_sum - 1.0).abs() > INVARIANCE_TOL {
            return Err(Error::InvalidInput(format!("row {} sums to {row_sum}", i + 1)));
        }
    }
    let total: f64 = (0..n).map(|i| measure.initial(i)).sum();
    if (total - 1.0).abs() > INVARIANCE_TOL {
        return Err(Error::NotInvariant(total - 1.0, 0));
    }
    if let Some((j, d)) = (0..n)
        .map(|j| (j, image[j] - measure.initial(j)))
        .find(|(_, d)| d.abs() > INVARIANCE_TOL)
    {
        return Err(Error::NotInvariant(d, j + 1));
    }
    Ok(EquilibriumReport {
        entropy,
        integral,
        pressure,
        residual: pressure - entropy - integral,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    /// `h + ∫phi` for the Gibbs measure.
    pub gibbs_value: f64,
    /// The same functional for each perturbed chain.
    pub perturbed: Vec<f64>,
    pub holds: bool,
}

/// Compare the Gibbs measure with `count` random perturbations of its
/// transition matrix (same support, rows renormalised). Every row with two
/// or more entries has its log-weights moved by exactly `scale` in sup norm.
pub fn perturbation_spot_check(
    g: &GibbsMeasure,
    phi: &dyn ShiftPotential,
    count: usize,
    scale: f64,
    seed: u64,
) -> Result<SpotCheck> {
    let t = &g.chain.matrix;
    let base = equilibrium_check(g, phi, g.pressure)?;
    let gibbs_value = base.entropy + base.integral;
    let rows = g.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perturbed = Vec::with_capacity(count);
    for _ in 0..count {
        let rows: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| {
                // log-weights moved by a random centred direction whose
                // largest entry is exactly `scale`
                let mut u: Vec<f64> = r.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
                let mean = u.iter().sum::<f64>() / u.len() as f64;
                u.iter_mut().for_each(|v| *v -= mean);
                let top = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let k = if top > 0.0 { scale / top } else { 0.0 };
                let mut r: Vec<f64> = r.iter().zip(&u).map(|(q, v)| q * (k * v).exp()).collect();
                normalise(&mut r);
                r
            })
            .collect();
        let m = ExplicitMarkov::stationary(t, rows)?;
        let e = equilibrium_check(&m, phi, g.pressure)?;
        perturbed.push(e.entropy + e.integral);
    }
    let holds = perturbed.iter().all(|&v| v <= gibbs_value + 1e-10);
    Ok(SpotCheck { gibbs_value, perturbed, holds })
}

/// Cap on rows written by [`cylinder_csv`].
pub const MAX_CSV_ROWS: usize = 1 << 20;

/// `word,mass` rows for every allowed cylinder of length `1..=depth`,
/// words written 1-based and dot-separated.
pub fn cylinder_csv(measure: &dyn MarkovMeasure, depth: usize) -> Result<String> {
    let t = measure.matrix();
    let mut out = String::from("word,mass\n");
    let mut level: Vec<(Vec<usize>, f64)> = (0..t.dim()).map(|i| (vec![i], measure.initial(i))).collect();
    let mut rows = 0;
    for d in 1..=depth {
        rows += level.len();
        if rows > MAX_CSV_ROWS {
            return Err(Error::InvalidInput(format!("more than {MAX_CSV_ROWS} cylinders up to depth {d}")));
        }
        for (w, m) in &level {
            let word: Vec<String> = w.iter().map(|a| (a + 1).to_string()).collect();
            out.push_str(&format!("{},{:.17e}\n", word.join("."), m));
        }
        if d < depth {
            level = level
                .iter()
                .flat_map(|(w, m)| {
                    let i = *w.last().unwrap();
                    t.row(i).iter().enumerate().map(move |(k, &j)| {
                        let mut v = w.clone();
                        v.push(j);
                        (v, m * measure.transition(i, k))
                    })
                })
                .collect();
        }
    }
    Ok(out)
}
