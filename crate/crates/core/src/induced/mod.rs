//! The induced map `T`, its cylinders and inverse branches, the inducing
//! scheme conditions H1-H5 and the symbolic coding.

mod map;
mod scheme;

pub use map::{dump_itineraries, induce, parse_itineraries, Cylinder, InducedMap};
pub use scheme::{
    analytic_k1, distortion_bound_induced, sample_cylinders, verify_inducing_scheme, Condition, DistortionReport,
    InducingReport, GRID, H3_DEPTH, H3_SAMPLES,
};
