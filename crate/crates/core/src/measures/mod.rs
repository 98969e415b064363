//! Invariant and stationary measures: the absolutely continuous invariant
//! measure of the induced map, its entropy, the symbol Perron vector and
//! the lifted measure on symbols x circle.

mod acip;
mod birkhoff;
mod density;
mod fibered;
mod perron;

pub use acip::{acip_pushforward, rokhlin_entropy, transport, AcipReport, EntropyReport};
pub use birkhoff::{birkhoff_average, birkhoff_spread, log_jacobian, BirkhoffSpread};
pub use density::{UlamDensity, QUADRATURE_PIECES};
pub use fibered::{
    check_stationary, lift_measure, push_generator, skew_invariance_check, FiberedMeasure, SkewReport,
    StationaryReport, SKEW_CELLS, SKEW_LEVEL,
};
pub use perron::{perron_vector, PerronVector, PERRON_TOL};
