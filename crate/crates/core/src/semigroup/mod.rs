//! Generators, the driving matrix, random walks, admissible words, and the
//! locally-expanding / topological-mixing certificates.

mod cover;
mod generator;
mod mixing;
mod system;
mod walk;
mod words;

pub use cover::{lebesgue_number, uncovered_point, verify_locally_expanding, Chart, ExpandingCover, SAFETY};
pub use generator::{Family, Generator};
pub use mixing::{check_topological_mixing, covers_translate, find_covering_word, MixingReport, PairWitness};
pub use system::{non_communicating, GeneratorSystem};
pub use walk::{sample_walk, RandomWalkTrace};
pub use words::{
    apply_word, arc_admissible, derivative_along_word, interval_chain, is_admissible, pull_through_chain,
    push_interval, Admissibility, Word, WITNESS_GRID,
};
