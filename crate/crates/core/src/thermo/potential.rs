use crate::error::{Error, Result};
use crate::induced::InducedMap;
use crate::partition::TransitionMatrix;

/// A potential on the one-sided shift over the retained indices.
pub trait ShiftPotential: Send + Sync {
    /// Number of leading symbols the value depends on, `None` if unbounded.
    fn memory(&self) -> Option<usize>;

    /// Value at some point of the cylinder `[prefix]`. Exact whenever
    /// `prefix.len() >= memory`.
    fn value(&self, prefix: &[usize]) -> f64;

    /// Upper bound on `var_n`.
    fn variation_bound(&self, n: usize) -> f64 {
        match self.memory() {
            Some(m) if n >= m => 0.0,
            _ => f64::INFINITY,
        }
    }
}

/// `phi(i) = values[i_0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexPotential {
    pub values: Vec<f64>,
}

impl ShiftPotential for VertexPotential {
    fn memory(&self) -> Option<usize> {
        Some(1)
    }

    fn value(&self, prefix: &[usize]) -> f64 {
        self.values[prefix[0]]
    }
}

/// `phi(i) = f(i_0, i_1)`.
pub struct EdgePotential<F> {
    pub f: F,
}

impl<F: Fn(usize, usize) -> f64 + Send + Sync> ShiftPotential for EdgePotential<F> {
    fn memory(&self) -> Option<usize> {
        Some(2)
    }

    fn value(&self, prefix: &[usize]) -> f64 {
        (self.f)(prefix[0], prefix[1])
    }
}

/// A potential given by a closure on prefixes, with declared memory and an
/// optional geometric variation bound `var_n <= c * theta^n`.
pub struct FnPotential<F> {
    pub memory: Option<usize>,
    pub f: F,
    pub bound: Option<(f64, f64)>,
}

impl<F: Fn(&[usize]) -> f64 + Send + Sync> ShiftPotential for FnPotential<F> {
    fn memory(&self) -> Option<usize> {
        self.memory
    }

    fn value(&self, prefix: &[usize]) -> f64 {
        (self.f)(prefix)
    }

    fn variation_bound(&self, n: usize) -> f64 {
        match (self.memory, self.bound) {
            (Some(m), _) if n >= m => 0.0,
            (_, Some((c, theta))) => c * theta.powi(n as i32),
            _ => f64::INFINITY,
        }
    }
}

/// `phi + c`.
pub struct Shifted<'a> {
    pub inner: &'a dyn ShiftPotential,
    pub c: f64,
}

impl ShiftPotential for Shifted<'_> {
    fn memory(&self) -> Option<usize> {
        self.inner.memory()
    }

    fn value(&self, prefix: &[usize]) -> f64 {
        self.inner.value(prefix) + self.c
    }

    fn variation_bound(&self, n: usize) -> f64 {
        self.inner.variation_bound(n)
    }
}

/// `phi = psi o zeta`: a function on the circle read through the coding of
/// the induced map. The value on a cylinder is `psi` at its midpoint.
pub struct ProjectedPotential<'a, F> {
    pub map: &'a InducedMap,
    pub psi: F,
    /// Piecewise Holder data `|psi(x) - psi(y)| <= k d(x, y)^alpha` on each element.
    pub k: f64,
    pub alpha: f64,
}

impl<'a, F: Fn(f64) -> f64 + Send + Sync> ProjectedPotential<'a, F> {
    pub fn new(map: &'a InducedMap, psi: F, k: f64, alpha: f64) -> Result<Self> {
        if let Some(i) = (0..map.len()).find(|&i| !psi(map.partition.elements[i].arc.midpoint()).is_finite()) {
            return Err(Error::InvalidInput(format!("potential is not finite on element {}", i + 1)));
        }
        Ok(ProjectedPotential { map, psi, k, alpha })
    }

    /// Memory-one approximation: `psi` at each element midpoint.
    pub fn on_elements(&self) -> VertexPotential {
        VertexPotential {
            values: (0..self.map.len()).map(|i| self.value(&[i])).collect(),
        }
    }
}

impl<F: Fn(f64) -> f64 + Send + Sync> ShiftPotential for ProjectedPotential<'_, F> {
    fn memory(&self) -> Option<usize> {
        (self.k == 0.0).then_some(1)
    }

    fn value(&self, prefix: &[usize]) -> f64 {
        match self.map.refine_cylinder(prefix) {
            Ok(c) => (self.psi)(c.arc.midpoint()),
            Err(_) => f64::NAN,
        }
    }

    fn variation_bound(&self, n: usize) -> f64 {
        if self.k == 0.0 {
            return 0.0;
        }
        let diam = self.map.sigma_star().powi(n as i32 - 1) * self.map.partition.max_diameter();
        self.k * diam.powf(self.alpha)
    }
}

/// Chain on allowed `m`-words: block `u` may follow `v` when they overlap
/// in `m - 1` symbols.
#[derive(Debug, Clone)]
pub struct BlockChain {
    pub blocks: Vec<Vec<usize>>,
    pub matrix: TransitionMatrix,
}

/// Refuse to enumerate more blocks than this.
pub const MAX_BLOCKS: usize = 1 << 20;

pub fn allowed_words(t: &TransitionMatrix, len: usize) -> Result<Vec<Vec<usize>>> {
    let mut words: Vec<Vec<usize>> = (0..t.dim()).map(|i| vec![i]).collect();
    for _ in 1..len {
        let mut next = Vec::new();
        for w in &words {
            for &j in t.row(*w.last().unwrap()) {
                let mut v = w.clone();
                v.push(j);
                next.push(v);
            }
            if next.len() > MAX_BLOCKS {
                return Err(Error::InvalidInput(format!("more than {MAX_BLOCKS} allowed words of length {len}")));
            }
        }
        words = next;
    }
    Ok(words)
}

pub fn recode(t: &TransitionMatrix, m: usize) -> Result<BlockChain> {
    if m == 0 {
        return Err(Error::InvalidInput("block length must be positive".into()));
    }
    let blocks = allowed_words(t, m)?;
    let index: std::collections::HashMap<&[usize], usize> =
        blocks.iter().enumerate().map(|(k, b)| (b.as_slice(), k)).collect();
    let rows = blocks
        .iter()
        .map(|b| {
            t.row(*b.last().unwrap())
                .iter()
                .filter_map(|&j| {
                    let mut w = b[1..].to_vec();
                    w.push(j);
                    index.get(w.as_slice()).copied()
                })
                .collect()
        })
        .collect();
    Ok(BlockChain {
        matrix: TransitionMatrix::from_rows(rows),
        blocks,
    })
}

/// A finite-memory potential `phi` (memory `m + 1`) seen on the chain of
/// `m`-blocks, where it has memory 2.
pub struct BlockPotential<'a> {
    pub chain: &'a BlockChain,
    pub inner: &'a dyn ShiftPotential,
}

impl ShiftPotential for BlockPotential<'_> {
    fn memory(&self) -> Option<usize> {
        Some(2)
    }

    fn value(&self, prefix: &[usize]) -> f64 {
        let mut w = self.chain.blocks[prefix[0]].clone();
        w.push(*self.chain.blocks[prefix[1]].last().unwrap());
        self.inner.value(&w)
    }
}
