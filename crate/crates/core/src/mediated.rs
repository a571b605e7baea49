//! The mediated mechanism `(α, θ, B)` as an explicit game.
//!
//! The mediator draws an intended profile `a*` from `α` and a move order
//! from `θ(·|a*)`, then recommends actions in that order. Each player sees
//! whether the players before them complied; if someone deviated, every
//! later mover is told to play the punishment that minimizes the deviator's
//! payoff over the effective threats (lowest index first on ties, players
//! compared in order). Only unilateral deviations are modelled.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::env::{cartesian, ActionSubspace, Environment, JointDistribution, ThreatSpace};
use crate::error::{Error, Result};
use crate::ice::OrderingDistribution;
use crate::random;
use crate::rational::{int, Rational};

/// `(deviator, played action, actions of the players who moved before the
/// deviator)`; `None` marks players still to move.
pub type PunishKey = (usize, usize, Vec<Option<usize>>);

#[derive(Debug, Clone)]
pub struct MediatedMechanism {
    env: Environment,
    alpha: JointDistribution,
    theta: OrderingDistribution,
    effective: ActionSubspace,
    punish: BTreeMap<PunishKey, Vec<usize>>,
}

/// Per-player map from received recommendation to played action.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeviationStrategy(pub Vec<usize>);

impl DeviationStrategy {
    pub fn compliant(num_actions: usize) -> Self {
        DeviationStrategy((0..num_actions).collect())
    }

    pub fn is_compliant(&self) -> bool {
        self.0.iter().enumerate().all(|(r, &p)| r == p)
    }

    /// Every map from `0..m` to `0..m`, the compliant one first.
    pub fn all(num_actions: usize) -> Vec<Self> {
        let lists = vec![(0..num_actions).collect::<Vec<usize>>(); num_actions];
        let mut out: Vec<Self> = cartesian(&lists).into_iter().map(DeviationStrategy).collect();
        out.sort_by_key(|d| !d.is_compliant());
        out
    }
}

/// Best deviation found for one player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayerCheck {
    pub player: usize,
    pub compliance: Rational,
    pub best: DeviationStrategy,
    pub best_value: Rational,
    /// Strategies enumerated (all `m^m` maps).
    pub strategies: usize,
}

impl PlayerCheck {
    pub fn gain(&self) -> Rational {
        &self.best_value - &self.compliance
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NashCheck {
    pub holds: bool,
    pub players: Vec<PlayerCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simulation {
    pub seed: u64,
    pub rounds: u64,
    pub shards: u64,
    /// Realized profile counts, row-major.
    pub counts: Vec<u64>,
    /// Mean realized payoff per player.
    pub mean_payoffs: Vec<Rational>,
}

impl Simulation {
    pub fn frequency(&self, profile: usize) -> Rational {
        Rational::new(BigInt::from(self.counts[profile]), BigInt::from(self.rounds))
    }
}

const SHARDS: u64 = 8;

impl MediatedMechanism {
    /// Builds the mechanism and its punishment table. `θ` must be defined on
    /// every supported profile.
    pub fn build(
        env: &Environment,
        alpha: &JointDistribution,
        theta: &OrderingDistribution,
        threats: &ThreatSpace,
    ) -> Result<Self> {
        if !alpha.fits(env) {
            return Err(Error::DimensionMismatch("distribution does not fit environment".into()));
        }
        let n = env.num_players();
        if theta.orderings().len() != (1..=n).product::<usize>() {
            return Err(Error::DimensionMismatch("ordering distribution arity".into()));
        }
        for p in alpha.support_indices() {
            if theta.get(p).is_none() {
                return Err(Error::MissingOrdering(p));
            }
        }
        let effective = threats.effective(env, alpha);
        let mut mech = MediatedMechanism {
            env: env.clone(),
            alpha: alpha.clone(),
            theta: theta.clone(),
            effective,
            punish: BTreeMap::new(),
        };
        for p in alpha.support_indices() {
            let a = env.profile_at(p);
            let probs = theta.get(p).expect("checked above").to_vec();
            for (k, order) in theta.orderings().iter().enumerate() {
                if probs[k].is_zero() {
                    continue;
                }
                for (pos, &i) in order.iter().enumerate() {
                    if pos + 1 == n {
                        continue;
                    }
                    let mut prev = vec![None; n];
                    for &j in &order[..pos] {
                        prev[j] = Some(a[j]);
                    }
                    for dev in (0..env.num_actions(i)).filter(|&d| d != a[i]) {
                        let key = (i, dev, prev.clone());
                        if !mech.punish.contains_key(&key) {
                            let resp = mech.compute_punishment(i, dev, &prev)?;
                            mech.punish.insert(key, resp);
                        }
                    }
                }
            }
        }
        Ok(mech)
    }

    pub fn env(&self) -> &Environment {
        &self.env
    }

    pub fn alpha(&self) -> &JointDistribution {
        &self.alpha
    }

    pub fn theta(&self) -> &OrderingDistribution {
        &self.theta
    }

    pub fn effective_threats(&self) -> &ActionSubspace {
        &self.effective
    }

    pub fn punishment_table(&self) -> &BTreeMap<PunishKey, Vec<usize>> {
        &self.punish
    }

    /// Punishment actions of the later movers, in player order, for a
    /// deviation by `i` to `dev` after the players in `prev` moved.
    pub fn punishment(&self, i: usize, dev: usize, prev: &[Option<usize>]) -> Result<Vec<usize>> {
        match self.punish.get(&(i, dev, prev.to_vec())) {
            Some(v) => Ok(v.clone()),
            None => self.compute_punishment(i, dev, prev),
        }
    }

    /// Two-player shorthand: the opponent's punishment when `i` moves first
    /// and plays `dev`.
    pub fn first_mover_punishment(&self, i: usize, dev: usize) -> Result<usize> {
        let prev = vec![None; self.env.num_players()];
        let v = self.punishment(i, dev, &prev)?;
        v.first().copied().ok_or_else(|| Error::Internal("no punisher".into()))
    }

    fn compute_punishment(&self, i: usize, dev: usize, prev: &[Option<usize>]) -> Result<Vec<usize>> {
        let post: Vec<usize> = (0..self.env.num_players()).filter(|&j| j != i && prev[j].is_none()).collect();
        let lists: Vec<Vec<usize>> = post.iter().map(|&j| self.effective.component(j).iter().copied().collect()).collect();
        if lists.iter().any(Vec::is_empty) {
            return Err(Error::VacuousPunishment { player: i, action: dev });
        }
        let mut best: Option<(Rational, Vec<usize>)> = None;
        for resp in cartesian(&lists) {
            let profile = self.assemble(i, dev, prev, &post, &resp);
            let u = self.env.payoff(i, &profile);
            if best.as_ref().is_none_or(|(b, _)| u < b) {
                best = Some((u.clone(), resp));
            }
        }
        Ok(best.map(|(_, r)| r).unwrap_or_default())
    }

    fn assemble(&self, i: usize, own: usize, prev: &[Option<usize>], post: &[usize], resp: &[usize]) -> Vec<usize> {
        let mut p: Vec<usize> = prev.iter().map(|x| x.unwrap_or(0)).collect();
        p[i] = own;
        for (&j, &b) in post.iter().zip(resp) {
            p[j] = b;
        }
        p
    }

    /// Realized profile when `i` follows `d` (everyone else complies) at
    /// intended profile `a` and order `order`.
    pub fn realized(&self, a: &[usize], order: &[usize], deviator: Option<(usize, &DeviationStrategy)>) -> Result<Vec<usize>> {
        let Some((i, d)) = deviator else {
            return Ok(a.to_vec());
        };
        let play = d.0[a[i]];
        if play == a[i] {
            return Ok(a.to_vec());
        }
        let pos = order.iter().position(|&j| j == i).expect("player in order");
        let mut prev = vec![None; a.len()];
        for &j in &order[..pos] {
            prev[j] = Some(a[j]);
        }
        let post: Vec<usize> = order[pos + 1..].to_vec();
        let mut post_sorted = post.clone();
        post_sorted.sort_unstable();
        let resp = if post_sorted.is_empty() {
            Vec::new()
        } else {
            self.punishment(i, play, &prev)?
        };
        Ok(self.assemble(i, play, &prev, &post_sorted, &resp))
    }

    /// Expected payoff of player `i` using `d` while everyone else complies.
    pub fn deviation_payoff(&self, i: usize, d: &DeviationStrategy) -> Result<Rational> {
        if d.0.len() != self.env.num_actions(i) {
            return Err(Error::DimensionMismatch("deviation strategy length".into()));
        }
        let mut total = Rational::zero();
        for p in self.alpha.support_indices() {
            let a = self.env.profile_at(p);
            let probs = self.theta.get(p).expect("θ on support");
            for (order, q) in self.theta.orderings().iter().zip(probs) {
                if q.is_zero() {
                    continue;
                }
                let realized = self.realized(&a, order, Some((i, d)))?;
                total += self.alpha.weight(p) * q * self.env.payoff(i, &realized);
            }
        }
        Ok(total)
    }

    /// Best single-recommendation deviation: the action `i` plays when told
    /// `rec`, with its contribution to the expected payoff.
    fn contribution(&self, i: usize, rec: usize, play: usize) -> Result<Rational> {
        let mut d = DeviationStrategy::compliant(self.env.num_actions(i));
        d.0[rec] = play;
        let mut total = Rational::zero();
        for p in self.alpha.support_indices() {
            let a = self.env.profile_at(p);
            if a[i] != rec {
                continue;
            }
            let probs = self.theta.get(p).expect("θ on support");
            for (order, q) in self.theta.orderings().iter().zip(probs) {
                if q.is_zero() {
                    continue;
                }
                let realized = self.realized(&a, order, Some((i, &d)))?;
                total += self.alpha.weight(p) * q * self.env.payoff(i, &realized);
            }
        }
        Ok(total)
    }

    /// Strategy choosing, for each recommendation separately, the most
    /// profitable action (lowest index on ties), with its value.
    pub fn greedy_deviation(&self, i: usize) -> Result<(DeviationStrategy, Rational)> {
        let m = self.env.num_actions(i);
        let mut d = Vec::with_capacity(m);
        let mut value = Rational::zero();
        for rec in 0..m {
            let mut best: Option<(Rational, usize)> = None;
            // Compliance first so that ties keep the recommendation.
            for play in std::iter::once(rec).chain((0..m).filter(|&b| b != rec)) {
                let v = self.contribution(i, rec, play)?;
                if best.as_ref().is_none_or(|(b, _)| &v > b) {
                    best = Some((v, play));
                }
            }
            let (v, play) = best.expect("at least one action");
            value += v;
            d.push(play);
        }
        Ok((DeviationStrategy(d), value))
    }

    /// Enumerates every deviation strategy of every player and checks that
    /// none beats compliance. The enumeration is cross-checked against the
    /// per-recommendation decomposition.
    pub fn is_nash(&self) -> Result<NashCheck> {
        let mut players = Vec::new();
        for i in 0..self.env.num_players() {
            let m = self.env.num_actions(i);
            let compliance = self.deviation_payoff(i, &DeviationStrategy::compliant(m))?;
            let all = DeviationStrategy::all(m);
            let mut best = (DeviationStrategy::compliant(m), compliance.clone());
            for d in &all {
                let v = self.deviation_payoff(i, d)?;
                if v > best.1 {
                    best = (d.clone(), v);
                }
            }
            let (greedy, greedy_value) = self.greedy_deviation(i)?;
            if greedy_value != best.1 {
                return Err(Error::Internal(format!(
                    "strategy enumeration ({}) and per-recommendation decomposition ({greedy_value}) disagree",
                    best.1
                )));
            }
            // Among equally good strategies report the greedy one, which
            // keeps compliance wherever deviating gains nothing.
            let best = (greedy, greedy_value);
            players.push(PlayerCheck {
                player: i,
                compliance,
                best: best.0,
                best_value: best.1,
                strategies: all.len(),
            });
        }
        Ok(NashCheck {
            holds: players.iter().all(|p| !p.gain().is_positive()),
            players,
        })
    }

    /// Plays `rounds` rounds with everyone compliant except the optional
    /// deviator. Rounds are split over fixed shards, each with its own
    /// stream of the seeded generator, so the result does not depend on the
    /// thread count.
    pub fn simulate(&self, seed: u64, rounds: u64, deviator: Option<(usize, &DeviationStrategy)>) -> Result<Simulation> {
        if rounds == 0 {
            return Err(Error::InvalidDistribution("simulation needs at least one round".into()));
        }
        let n = self.env.num_players();
        let per = rounds / SHARDS;
        let extra = rounds % SHARDS;
        let shards: Vec<Result<(Vec<u64>, Vec<Rational>)>> = (0..SHARDS)
            .into_par_iter()
            .map(|s| {
                let count = per + u64::from(s < extra);
                let mut rng = random::stream(seed, s);
                let mut counts = vec![0u64; self.env.num_profiles()];
                let mut sums = vec![Rational::zero(); n];
                for _ in 0..count {
                    let p = draw(&mut rng, self.alpha.weights());
                    let probs = self.theta.get(p).expect("θ on support");
                    let k = draw(&mut rng, probs);
                    let a = self.env.profile_at(p);
                    let realized = self.realized(&a, &self.theta.orderings()[k], deviator)?;
                    counts[self.env.index_of(&realized)] += 1;
                    for (i, s) in sums.iter_mut().enumerate() {
                        *s += self.env.payoff(i, &realized);
                    }
                }
                Ok((counts, sums))
            })
            .collect();
        let mut counts = vec![0u64; self.env.num_profiles()];
        let mut sums = vec![Rational::zero(); n];
        for shard in shards {
            let (c, s) = shard?;
            for (x, y) in counts.iter_mut().zip(c) {
                *x += y;
            }
            for (x, y) in sums.iter_mut().zip(s) {
                *x += y;
            }
        }
        let r = int(rounds as i64);
        Ok(Simulation {
            seed,
            rounds,
            shards: SHARDS,
            counts,
            mean_payoffs: sums.into_iter().map(|s| s / &r).collect(),
        })
    }
}

/// Index drawn from exact weights: a uniform 64-bit `x` selects the first
/// index whose cumulative weight exceeds `x / 2^64`.
fn draw(rng: &mut impl Rng, weights: &[Rational]) -> usize {
    let x = BigInt::from(rng.random::<u64>());
    let scale = BigInt::from(1u8) << 64;
    let mut cum = Rational::zero();
    let mut last = 0;
    for (k, w) in weights.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        last = k;
        cum += w;
        // x / 2^64 < numer / denom
        if &x * cum.denom() < cum.numer() * &scale {
            return k;
        }
    }
    last
}

#[cfg(test)]
mod tests;
