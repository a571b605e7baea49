//! The affine incentive system over `γ(a, k)`.
//!
//! Row order is fixed: one incentive row per `(player, recommended,
//! deviation)` in lexicographic order, then the normalization row, then
//! (for a fixed distribution) one marginal equality per profile. Each
//! incentive row reads
//!
//! ```text
//! Σ_{a: a_i = rec} Σ_k γ(a,k)·(u_i(a) − v_i(a, k, dev)) ≥ 0
//! ```
//!
//! where `v_i` is the deviator's payoff when the players before `i` in
//! order `k` have played their part of `a` and the players after `i`
//! punish.

use std::collections::HashMap;

use num_traits::Zero;

use super::{enumerations, factorial, punishment_value, worst_punishment, GammaVariable, PunishmentMode};
use crate::env::{ActionSubspace, Environment, JointDistribution, ThreatSpace};
use crate::error::{Error, Result};
use crate::lp::{LinearSystem, Relation};
use crate::rational::{one, Rational};

/// Which distributions the system ranges over.
#[derive(Debug, Clone, Copy)]
pub enum Slice<'a> {
    /// `α` is fixed; `γ` must reproduce it as its profile marginal.
    Fixed(&'a JointDistribution),
    /// `α` is free but supported inside the given product set, which also
    /// enters the effective threats.
    Support(&'a ActionSubspace),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Incentive { player: usize, rec: usize, dev: usize },
    Normalization,
    Marginal { profile: usize },
    /// `α_i(action) ≥ t` in a support slice.
    SupportMass { player: usize, action: usize },
    Extra(usize),
}

/// An incentive system together with its variable layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IceSystem {
    pub system: LinearSystem,
    /// Profile indices carrying γ variables, ascending.
    pub profiles: Vec<usize>,
    pub num_orderings: usize,
    pub rows: Vec<RowKind>,
    pub effective: ActionSubspace,
}

impl IceSystem {
    pub fn var(&self, pos: usize, ordering: usize) -> usize {
        pos * self.num_orderings + ordering
    }

    pub fn num_gamma(&self) -> usize {
        self.profiles.len() * self.num_orderings
    }

    pub fn gamma(&self, point: &[Rational]) -> GammaVariable {
        GammaVariable {
            profiles: self.profiles.clone(),
            num_orderings: self.num_orderings,
            weights: point[..self.num_gamma()].to_vec(),
        }
    }

    /// Left-hand side of every incentive row at `point`.
    pub fn incentive_values(&self, point: &[Rational]) -> Vec<(usize, usize, usize, Rational)> {
        self.rows
            .iter()
            .zip(self.system.constraints())
            .filter_map(|(kind, c)| match *kind {
                RowKind::Incentive { player, rec, dev } => Some((player, rec, dev, c.lhs(point))),
                _ => None,
            })
            .collect()
    }
}

/// Builds the incentive system. Two-player environments use the first-mover
/// form directly; larger ones go through [`n_player_system`] with the
/// default size cap.
pub fn build_ice_system(
    env: &Environment,
    slice: Slice<'_>,
    threats: &ThreatSpace,
    mode: PunishmentMode,
) -> Result<IceSystem> {
    if env.num_players() != 2 {
        return n_player_system(env, slice, threats, mode, super::size_cap());
    }
    let (profiles, effective) = layout(env, slice, threats)?;
    let orderings = enumerations(2);
    let mut system = gamma_variables(env, &profiles, &orderings);
    let mut rows = Vec::new();
    let mut w: HashMap<(usize, usize, usize), Rational> = HashMap::new();
    for i in 0..2 {
        for rec in 0..env.num_actions(i) {
            for dev in 0..env.num_actions(i) {
                let mut coeffs = vec![Rational::zero(); system.num_variables()];
                for (pos, &p) in profiles.iter().enumerate() {
                    let a = env.profile_at(p);
                    if a[i] != rec {
                        continue;
                    }
                    let u = env.payoff_at(p, i);
                    for (k, ord) in orderings.iter().enumerate() {
                        let v = if ord[0] == i {
                            match w.get(&(i, rec, dev)) {
                                Some(v) => v.clone(),
                                None => {
                                    let v = worst_punishment(env, i, rec, dev, &effective, mode)?;
                                    w.insert((i, rec, dev), v.clone());
                                    v
                                }
                            }
                        } else {
                            env.payoff(i, &a.with(i, dev)).clone()
                        };
                        coeffs[pos * 2 + k] = u - v;
                    }
                }
                system.add_constraint(coeffs, Relation::Ge, Rational::zero());
                rows.push(RowKind::Incentive { player: i, rec, dev });
            }
        }
    }
    finish(slice, system, rows, profiles, orderings.len(), effective)
}

/// The general move-order system: `γ` over profiles × enumerations of the
/// players. Errors with [`Error::TooLarge`] when the number of `γ`
/// variables exceeds `cap`.
pub fn n_player_system(
    env: &Environment,
    slice: Slice<'_>,
    threats: &ThreatSpace,
    mode: PunishmentMode,
    cap: usize,
) -> Result<IceSystem> {
    let n = env.num_players();
    let (profiles, effective) = layout(env, slice, threats)?;
    let needed = profiles.len().saturating_mul(factorial(n));
    if needed > cap {
        return Err(Error::TooLarge {
            what: "gamma variables",
            needed,
            cap,
        });
    }
    let orderings = enumerations(n);
    let mut system = gamma_variables(env, &profiles, &orderings);
    let mut rows = Vec::new();
    let mut cache: HashMap<(usize, usize, usize, Vec<Option<usize>>), Rational> = HashMap::new();
    for i in 0..n {
        for rec in 0..env.num_actions(i) {
            for dev in 0..env.num_actions(i) {
                let mut coeffs = vec![Rational::zero(); system.num_variables()];
                for (pos, &p) in profiles.iter().enumerate() {
                    let a = env.profile_at(p);
                    if a[i] != rec {
                        continue;
                    }
                    for (k, ord) in orderings.iter().enumerate() {
                        let at = ord.iter().position(|&j| j == i).expect("player in ordering");
                        let mut fixed = vec![None; n];
                        for &j in &ord[..at] {
                            fixed[j] = Some(a[j]);
                        }
                        let key = (i, rec, dev, fixed);
                        let v = match cache.get(&key) {
                            Some(v) => v.clone(),
                            None => {
                                let v = punishment_value(env, i, rec, dev, &effective, &key.3, mode)?;
                                cache.insert(key, v.clone());
                                v
                            }
                        };
                        coeffs[pos * orderings.len() + k] = env.payoff_at(p, i) - v;
                    }
                }
                system.add_constraint(coeffs, Relation::Ge, Rational::zero());
                rows.push(RowKind::Incentive { player: i, rec, dev });
            }
        }
    }
    finish(slice, system, rows, profiles, orderings.len(), effective)
}

/// The support-slice system without the mass variable: shorthand for
/// [`build_ice_system`] with [`Slice::Support`].
pub fn build_support_system(
    env: &Environment,
    support: &ActionSubspace,
    threats: &ThreatSpace,
    mode: PunishmentMode,
) -> Result<IceSystem> {
    build_ice_system(env, Slice::Support(support), threats, mode)
}

fn layout(env: &Environment, slice: Slice<'_>, threats: &ThreatSpace) -> Result<(Vec<usize>, ActionSubspace)> {
    if threats.base().num_players() != env.num_players() {
        return Err(Error::DimensionMismatch("threat space arity".into()));
    }
    match slice {
        Slice::Fixed(alpha) => {
            if !alpha.fits(env) {
                return Err(Error::DimensionMismatch("distribution does not fit environment".into()));
            }
            Ok(((0..env.num_profiles()).collect(), threats.effective(env, alpha)))
        }
        Slice::Support(support) => {
            if support.num_players() != env.num_players() {
                return Err(Error::DimensionMismatch("support arity".into()));
            }
            if let Some(i) = (0..env.num_players()).find(|&i| support.component(i).is_empty()) {
                return Err(Error::InvalidDistribution(format!(
                    "support component for player {} is empty",
                    env.player_name(i)
                )));
            }
            let profiles = support.profiles().iter().map(|p| env.index_of(p)).collect();
            Ok((profiles, threats.effective_with_support(support)))
        }
    }
}

fn gamma_variables(env: &Environment, profiles: &[usize], orderings: &[Vec<usize>]) -> LinearSystem {
    let mut system = LinearSystem::new();
    for &p in profiles {
        let a = env.profile_at(p);
        let labels: Vec<&str> = a.iter().enumerate().map(|(i, &x)| env.action_label(i, x)).collect();
        for ord in orderings {
            let order: Vec<&str> = ord.iter().map(|&j| env.player_name(j)).collect();
            system.add_variable(format!("g[{};{}]", labels.join(","), order.join(">")), true);
        }
    }
    system
}

fn finish(
    slice: Slice<'_>,
    mut system: LinearSystem,
    mut rows: Vec<RowKind>,
    profiles: Vec<usize>,
    num_orderings: usize,
    effective: ActionSubspace,
) -> Result<IceSystem> {
    let all: Vec<(usize, Rational)> = (0..system.num_variables()).map(|j| (j, one())).collect();
    system.add_sparse(&all, Relation::Eq, one());
    rows.push(RowKind::Normalization);
    if let Slice::Fixed(alpha) = slice {
        for (pos, &p) in profiles.iter().enumerate() {
            let terms: Vec<(usize, Rational)> = (0..num_orderings).map(|k| (pos * num_orderings + k, one())).collect();
            system.add_sparse(&terms, Relation::Eq, alpha.weight(p).clone());
            rows.push(RowKind::Marginal { profile: p });
        }
    }
    debug_assert_eq!(system.num_constraints(), rows.len());
    Ok(IceSystem {
        system,
        profiles,
        num_orderings,
        rows,
        effective,
    })
}
