//! Interdependent-choice equilibria.
//!
//! A distribution `α` over profiles is an ICE when some profile-conditional
//! move order makes obedience to the mediator a Nash equilibrium. Writing
//! `γ(a, k) = α(a)·θ(k|a)` for the joint weight of profile `a` and move order
//! `k` turns the incentive constraints into an affine system over `γ`, which
//! [`build_ice_system`] produces and [`is_ice`] solves exactly.
//!
//! Move orders are enumerations of the players, listed in lexicographic
//! order; with two players order 0 is "player 0 first" and order 1 is
//! "player 1 first".

mod membership;
mod punishment;
mod region;
mod system;

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::env::{Environment, JointDistribution};
use crate::error::{Error, Result};
use crate::rational::Rational;

pub use membership::{
    is_correlated_eq, is_ice, is_ice_variable, is_individually_rational, AlphaConstraint, IceCertificate, SupportSlice,
    Witness,
};
pub use punishment::{punishment_value, worst_punishment};
pub use region::{ce_payoff_region, convex_hull, ice_payoff_region, ir_payoff_region, nash_pure_hull, Point};
pub use system::{build_ice_system, build_support_system, n_player_system, IceSystem, RowKind, Slice};

/// Default cap on enumerated objects (γ variables, support products).
pub const DEFAULT_SIZE_CAP: usize = 50_000;

/// The enumeration cap, overridable through `ICE_LAB_SIZE_CAP`.
pub fn size_cap() -> usize {
    std::env::var("ICE_LAB_SIZE_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_SIZE_CAP)
}

/// How a deviation is punished.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PunishmentMode {
    /// Worst payoff for the deviator over the effective threats.
    #[default]
    WorstInThreats,
    /// Worst payoff over the punisher's best responses (within the effective
    /// threats) to the observed deviation. Two players only.
    BestResponseOnly,
    /// The punisher knows the recommendation but not which alternative was
    /// taken, and holds the deviator to the value of the zero-sum game between
    /// the alternatives and mixed threats.
    Minimax,
}

impl PunishmentMode {
    pub fn name(self) -> &'static str {
        match self {
            PunishmentMode::WorstInThreats => "worst",
            PunishmentMode::BestResponseOnly => "br",
            PunishmentMode::Minimax => "minimax",
        }
    }
}

/// All enumerations of `0..n` in lexicographic order.
pub fn enumerations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for p in 0..used.len() {
            if !used[p] {
                used[p] = true;
                prefix.push(p);
                rec(prefix, used, out);
                prefix.pop();
                used[p] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

pub(crate) fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Profile-conditional distribution over move orders, `θ(·|a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingDistribution {
    orderings: Vec<Vec<usize>>,
    by_profile: BTreeMap<usize, Vec<Rational>>,
}

impl OrderingDistribution {
    pub fn new(num_players: usize) -> Self {
        Self {
            orderings: enumerations(num_players),
            by_profile: BTreeMap::new(),
        }
    }

    /// Uniform order on every profile in the support of `alpha`.
    pub fn uniform(env: &Environment, alpha: &JointDistribution) -> Self {
        let mut out = Self::new(env.num_players());
        let k = out.orderings.len() as i64;
        for idx in alpha.support_indices() {
            out.by_profile.insert(idx, vec![crate::rational::rat(1, k); k as usize]);
        }
        out
    }

    /// Two-player convenience: `first[i]` is the probability that player `i`
    /// moves first.
    pub fn set_first_mover(&mut self, profile: usize, first: [Rational; 2]) -> Result<()> {
        if self.orderings.len() != 2 {
            return Err(Error::Unsupported("first-mover form needs two players".into()));
        }
        self.set(profile, first.to_vec())
    }

    /// Sets `θ(·|a)` for the profile with index `profile`.
    pub fn set(&mut self, profile: usize, probs: Vec<Rational>) -> Result<()> {
        if probs.len() != self.orderings.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} order weights for {} orders",
                probs.len(),
                self.orderings.len()
            )));
        }
        if probs.iter().any(|p| p.is_negative()) {
            return Err(Error::InvalidDistribution("negative order weight".into()));
        }
        let sum = crate::rational::sum(&probs);
        if sum != crate::rational::one() {
            return Err(Error::NotNormalized { sum });
        }
        self.by_profile.insert(profile, probs);
        Ok(())
    }

    pub fn orderings(&self) -> &[Vec<usize>] {
        &self.orderings
    }

    pub fn get(&self, profile: usize) -> Option<&[Rational]> {
        self.by_profile.get(&profile).map(Vec::as_slice)
    }

    pub fn profiles(&self) -> impl Iterator<Item = usize> + '_ {
        self.by_profile.keys().copied()
    }

    /// Probability that `player` moves first at `profile`.
    pub fn first_mover(&self, profile: usize, player: usize) -> Option<Rational> {
        let probs = self.by_profile.get(&profile)?;
        Some(
            self.orderings
                .iter()
                .zip(probs)
                .filter(|(o, _)| o[0] == player)
                .fold(Rational::zero(), |acc, (_, p)| acc + p),
        )
    }
}

/// Solver-produced joint weights `γ(a, k)` over the profiles of a layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaVariable {
    pub profiles: Vec<usize>,
    pub num_orderings: usize,
    pub weights: Vec<Rational>,
}

impl GammaVariable {
    pub fn weight(&self, profile: usize, ordering: usize) -> Rational {
        match self.profiles.binary_search(&profile) {
            Ok(pos) => self.weights[pos * self.num_orderings + ordering].clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// The profile marginal of `γ`.
    pub fn alpha(&self, env: &Environment) -> Result<JointDistribution> {
        let mut w = vec![Rational::zero(); env.num_profiles()];
        for (pos, &p) in self.profiles.iter().enumerate() {
            for k in 0..self.num_orderings {
                w[p] += &self.weights[pos * self.num_orderings + k];
            }
        }
        JointDistribution::new(env, w)
    }

    /// `θ(k|a) = γ(a, k) / α(a)` on the support of the marginal.
    pub fn theta(&self, env: &Environment) -> OrderingDistribution {
        let mut out = OrderingDistribution::new(env.num_players());
        for (pos, &p) in self.profiles.iter().enumerate() {
            let row = &self.weights[pos * self.num_orderings..(pos + 1) * self.num_orderings];
            let mass = crate::rational::sum(row);
            if mass.is_positive() {
                let probs = row.iter().map(|g| g / &mass).collect();
                out.by_profile.insert(p, probs);
            }
        }
        out
    }
}
