//! Seeded generators for random environments and distributions.
//!
//! Everything runs off ChaCha8 so corpora are reproducible across platforms.
//! Independent streams for parallel work come from [`stream`].

use num_traits::Zero;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::env::{ActionSubspace, Environment, JointDistribution};
use crate::rational::{int, Rational};

pub type GameRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GameRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream `index` of the generator seeded with `seed`; streams never overlap.
pub fn stream(seed: u64, index: u64) -> GameRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

/// Environment with the given action counts and integer payoffs drawn
/// uniformly from `lo..=hi`. Players are `1..=n`; actions are `s0, s1, ...`.
pub fn game(rng: &mut impl Rng, counts: &[usize], lo: i64, hi: i64) -> Environment {
    let players = (1..=counts.len()).map(|i| i.to_string()).collect();
    let actions = counts
        .iter()
        .map(|&c| (0..c).map(|k| format!("s{k}")).collect())
        .collect();
    let n = counts.len();
    Environment::from_fn(players, actions, |_| (0..n).map(|_| int(rng.random_range(lo..=hi))).collect())
        .expect("generated environment is well formed")
}

/// Two-player game with each action count drawn from `1..=max_actions`
/// (at least one player gets two actions).
pub fn bimatrix_game(rng: &mut impl Rng, max_actions: usize, lo: i64, hi: i64) -> Environment {
    loop {
        let counts = [rng.random_range(1..=max_actions), rng.random_range(1..=max_actions)];
        if counts.iter().any(|&c| c >= 2) {
            return game(rng, &counts, lo, hi);
        }
    }
}

/// Random rational distribution. A quarter of draws are point masses; the
/// rest keep each profile with probability 1/2 and give it an integer weight
/// in `1..=max_weight` before normalizing.
pub fn distribution(rng: &mut impl Rng, env: &Environment, max_weight: i64) -> JointDistribution {
    let n = env.num_profiles();
    let mut weights = vec![Rational::zero(); n];
    if rng.random_range(0..4) == 0 {
        let all: Vec<usize> = (0..n).collect();
        weights[*all.choose(rng).expect("nonempty")] = int(1);
        return JointDistribution::new(env, weights).expect("point mass");
    }
    let mut total = 0i64;
    for w in weights.iter_mut() {
        if rng.random_bool(0.5) {
            let k = rng.random_range(1..=max_weight);
            *w = int(k);
            total += k;
        }
    }
    if total == 0 {
        let k = rng.random_range(0..n);
        weights[k] = int(1);
        total = 1;
    }
    let total = int(total);
    for w in weights.iter_mut() {
        *w = &*w / &total;
    }
    JointDistribution::new(env, weights).expect("normalized by construction")
}

/// Product subspace with every component a nonempty uniform random subset.
pub fn subspace(rng: &mut impl Rng, env: &Environment) -> ActionSubspace {
    let sets = (0..env.num_players())
        .map(|i| {
            let m = env.num_actions(i);
            let mask = rng.random_range(1..(1u64 << m));
            (0..m).filter(|b| mask >> b & 1 == 1).collect()
        })
        .collect();
    ActionSubspace::from_sets(env, sets).expect("indices in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_games_repeat() {
        let a = game(&mut rng(7), &[3, 2], -5, 5);
        let b = game(&mut rng(7), &[3, 2], -5, 5);
        assert_eq!(a, b);
        let mut r = rng(7);
        let d1 = distribution(&mut r, &a, 9);
        let mut r = rng(7);
        let d2 = distribution(&mut r, &a, 9);
        assert_eq!(d1, d2);
    }

    #[test]
    fn streams_differ() {
        let x: u64 = stream(1, 0).random();
        let y: u64 = stream(1, 1).random();
        assert_ne!(x, y);
    }

    #[test]
    fn payoffs_in_range() {
        let mut r = rng(3);
        for _ in 0..20 {
            let env = bimatrix_game(&mut r, 3, -5, 5);
            for p in 0..env.num_profiles() {
                for i in 0..2 {
                    let u = env.payoff_at(p, i);
                    assert!(*u >= int(-5) && *u <= int(5));
                }
            }
            let d = distribution(&mut r, &env, 9);
            assert!(d.fits(&env));
        }
    }
}
