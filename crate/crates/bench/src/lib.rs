//! Benchmark fixtures shared by the criterion suites.

use ice_lab::catalog::{chicken, punishment_cycle};
use ice_lab::{random, Environment, JointDistribution};

/// A seeded 3x3 game with a spread-out distribution.
pub fn random_case(seed: u64) -> (Environment, JointDistribution) {
    let mut r = random::rng(seed);
    let env = random::game(&mut r, &[3, 3], -5, 5);
    let alpha = random::distribution(&mut r, &env, 6);
    (env, alpha)
}

/// Chicken with the mutual-work point mass.
pub fn chicken_case() -> (Environment, JointDistribution) {
    let env = chicken();
    let alpha = JointDistribution::point_mass(&env, &[1, 1]).expect("profile in range");
    (env, alpha)
}

pub fn cycle(k: i64) -> Environment {
    punishment_cycle(k)
}
