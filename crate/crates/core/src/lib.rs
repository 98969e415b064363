//! Countable Markov partitions, induced Markov maps, absolutely continuous
//! invariant and stationary measures, and Gurevich–Sarig thermodynamic
//! formalism for locally expanding semigroup actions on the circle.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`semigroup`]: generators, driving matrix, random walks, the
//!    locally-expanding cover and topological mixing certificates.
//! 2. [`partition`]: dynamical balls, Vitali selection and the truncated
//!    countable Markov partition with finite images and finite cycles.
//! 3. [`induced`]: the induced map, cylinders, inverse branches, the
//!    inducing-scheme checks and the symbolic coding.
//! 4. [`measures`] and [`thermo`]: invariant densities, entropy, lifted
//!    stationary measures, pressure and Gibbs certificates.
//!
//! Data-parallel loops go through [`par`], which falls back to sequential
//! iteration when the `parallel` feature is disabled.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circle;
pub mod error;
pub mod induced;
pub mod measures;
pub mod par;
pub mod partition;
pub mod semigroup;
pub mod textfmt;
pub mod thermo;

pub use circle::{circle_dist, reduce, Arc, CirclePoint};
pub use error::{Error, Result};
