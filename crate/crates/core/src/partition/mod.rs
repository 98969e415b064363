//! Dynamical balls, preimage tiles, the truncated Markov partition and its
//! transition matrix.

mod ball;
mod base;
mod family;
mod io;
mod markov;
mod matrix;
mod tile;

pub use ball::{diameter_distortion_constant, distortion_formula, dynamical_ball, pull_back_ball, DynamicalBall, PULLBACK_TOL};
pub use base::BaseCover;
pub use family::{build_vitali_family, family_in, VitaliFamily};
pub use markov::{build_markov_partition, vitali_select, CountableMarkovPartition, PartitionElement};
pub use matrix::{
    check_bip, check_fcp, check_fip, check_shift_mixing, markov_violation, overlapping_pair, period, transition_matrix,
    CycleReport, FipReport, ShiftMixing, TransitionMatrix, MARKOV_TOL,
};
pub use tile::{tile_kappa, Tile};
