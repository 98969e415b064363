use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::system::GeneratorSystem;
use crate::circle::CirclePoint;

/// One realisation of the Markov-driven random walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomWalkTrace {
    pub seed: u64,
    /// The starting code `i_0`, drawn from the start distribution.
    pub start_symbol: usize,
    /// `x_0, ..., x_n`.
    pub points: Vec<f64>,
    /// `i_1, ..., i_n`, with `x_t = f_{i_t}(x_{t-1})`.
    pub symbols: Vec<usize>,
    /// `sum_t log f'_{i_t}(x_{t-1})`.
    pub log_derivative: f64,
}

pub fn sample_walk(system: &GeneratorSystem, seed: u64, length: usize, x0: CirclePoint) -> RandomWalkTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = WeightedIndex::new(&system.start).expect("validated start distribution");
    let rows: Vec<WeightedIndex<f64>> = system
        .driving
        .iter()
        .map(|r| WeightedIndex::new(r).expect("validated driving row"))
        .collect();

    let mut symbol = start.sample(&mut rng);
    let start_symbol = symbol;
    let mut x = x0.value();
    let mut points = Vec::with_capacity(length + 1);
    let mut symbols = Vec::with_capacity(length);
    let mut log_derivative = 0.0;
    points.push(x);
    for _ in 0..length {
        symbol = rows[symbol].sample(&mut rng);
        let g = &system.generators[symbol];
        log_derivative += g.derivative(x).ln();
        x = g.apply(x);
        points.push(x);
        symbols.push(symbol);
    }
    RandomWalkTrace {
        seed,
        start_symbol,
        points,
        symbols,
        log_derivative,
    }
}
