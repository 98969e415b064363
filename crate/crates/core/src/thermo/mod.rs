//! Thermodynamic formalism on the truncated countable Markov shift of an
//! induced map: variations, partition functions, pressure, Gibbs measures.

mod chain;
mod gibbs;
mod potential;
mod pressure;
mod variation;

pub use chain::{Weights, WeightedChain};
pub use gibbs::{
    cylinder_csv, equilibrium_check, perturbation_spot_check, transfer_gibbs, verify_gibbs, EquilibriumReport,
    ExplicitMarkov, GibbsCertificate, GibbsMeasure, GibbsSummary, MarkovMeasure, SpotCheck, GIBBS_TOL,
    INVARIANCE_TOL, MAX_CSV_ROWS, MAX_ITER,
};
pub use potential::{
    allowed_words, recode, BlockChain, BlockPotential, EdgePotential, FnPotential, ProjectedPotential, ShiftPotential,
    Shifted, VertexPotential, MAX_BLOCKS,
};
pub use pressure::{
    gurevich_pressure, partition_function, partition_functions, PressureReport, ZValue, MAX_PERIODIC_WORDS,
};
pub use variation::{
    fit_holder, variation, variation_profile, HolderFit, VariationEstimate, CONTINUATIONS, GEOMETRIC_RESIDUAL,
    SAMPLE_TAIL, SUMMABLE_POWER,
};
