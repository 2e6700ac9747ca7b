//! Shared fixtures for the criterion benches.

use lfp_core::{PayoffMatrix, RegularizedGame};

/// Square random game with the given side and temperature.
pub fn square_game(size: usize, eta: f64) -> RegularizedGame {
    RegularizedGame::new(PayoffMatrix::random(size, size, 42).unwrap(), eta).unwrap()
}
