//! Membership tests: ICE with certificates, plus the two bracketing
//! notions obtained by pinning every move order to "deviator second"
//! (correlated equilibrium) or "deviator first" (interim individual
//! rationality).

use num_traits::{Signed, Zero};

use super::system::{build_ice_system, IceSystem, RowKind, Slice};
use super::{worst_punishment, GammaVariable, OrderingDistribution, PunishmentMode};
use crate::env::{ActionSubspace, Environment, JointDistribution, ThreatSpace};
use crate::error::{Error, Result};
use crate::lp::{self, verify_farkas, verify_point, LpOutcome, Relation, Sense};
use crate::rational::{one, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Gamma(GammaVariable),
    /// Multipliers over the rows of [`IceCertificate::system`].
    Farkas(Vec<Rational>),
}

/// Verdict of [`is_ice`] with the system it was decided on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IceCertificate {
    pub verdict: bool,
    pub witness: Witness,
    pub system: IceSystem,
}

impl IceCertificate {
    /// Ordering distribution read off a positive witness.
    pub fn theta(&self, env: &Environment) -> Option<OrderingDistribution> {
        match &self.witness {
            Witness::Gamma(g) => Some(g.theta(env)),
            Witness::Farkas(_) => None,
        }
    }

    pub fn farkas(&self) -> Option<&[Rational]> {
        match &self.witness {
            Witness::Farkas(y) => Some(y),
            Witness::Gamma(_) => None,
        }
    }

    /// Re-checks the witness from scratch: a γ must satisfy every row and
    /// reproduce `alpha`; Farkas multipliers must refute the system.
    pub fn verify(&self, env: &Environment, alpha: &JointDistribution) -> bool {
        match &self.witness {
            Witness::Gamma(g) => {
                self.verdict
                    && verify_point(&self.system.system, &g.weights)
                    && g.alpha(env).map(|a| &a == alpha).unwrap_or(false)
            }
            Witness::Farkas(y) => !self.verdict && verify_farkas(&self.system.system, y),
        }
    }
}

/// Decides whether `alpha` is an ICE with declared threats `threats`.
///
/// A positive verdict carries the γ that maximizes the smallest slack over
/// the genuine deviation rows at recommended actions, which tends to pick
/// balanced move orders.
pub fn is_ice(
    env: &Environment,
    alpha: &JointDistribution,
    threats: &ThreatSpace,
    mode: PunishmentMode,
) -> Result<IceCertificate> {
    let ice = build_ice_system(env, Slice::Fixed(alpha), threats, mode)?;
    let outcome = lp::solve(&ice.system, None, Sense::Maximize)?;
    let point = match outcome {
        LpOutcome::Infeasible { farkas } => {
            return Ok(IceCertificate {
                verdict: false,
                witness: Witness::Farkas(farkas),
                system: ice,
            })
        }
        LpOutcome::Feasible { point } => point,
        other => return Err(Error::Internal(format!("feasibility query returned {other:?}"))),
    };
    let point = balanced_point(env, alpha, &ice)?.unwrap_or(point);
    Ok(IceCertificate {
        verdict: true,
        witness: Witness::Gamma(ice.gamma(&point)),
        system: ice,
    })
}

fn balanced_point(env: &Environment, alpha: &JointDistribution, ice: &IceSystem) -> Result<Option<Vec<Rational>>> {
    let marginals: Vec<Vec<Rational>> = (0..env.num_players()).map(|i| alpha.marginal(env, i)).collect();
    let mut sys = ice.system.clone();
    let s = sys.add_variable("margin", false);
    let mut any = false;
    for (kind, c) in ice.rows.iter().zip(ice.system.constraints()) {
        if let RowKind::Incentive { player, rec, dev } = *kind {
            if dev != rec && marginals[player][rec].is_positive() {
                let mut coeffs = c.coeffs.clone();
                coeffs.push(-one());
                sys.add_constraint(coeffs, Relation::Ge, Rational::zero());
                any = true;
            }
        }
    }
    if !any {
        return Ok(None);
    }
    let mut obj = vec![Rational::zero(); sys.num_variables()];
    obj[s] = one();
    match lp::solve(&sys, Some(&obj), Sense::Maximize)? {
        LpOutcome::Optimal { mut point, .. } => {
            point.truncate(ice.system.num_variables());
            Ok(Some(point))
        }
        _ => Ok(None),
    }
}

/// Obedience with every order pinned to "deviator moves second": no
/// punishment is possible.
pub fn is_correlated_eq(env: &Environment, alpha: &JointDistribution) -> bool {
    (0..env.num_players()).all(|i| {
        (0..env.num_actions(i)).all(|rec| {
            (0..env.num_actions(i)).all(|dev| {
                let gain = env
                    .profiles()
                    .filter(|a| a[i] == rec)
                    .fold(Rational::zero(), |acc, a| {
                        let w = alpha.weight(env.index_of(&a));
                        if w.is_zero() {
                            return acc;
                        }
                        acc + w * (env.payoff(i, &a) - env.payoff(i, &a.with(i, dev)))
                    });
                !gain.is_negative()
            })
        })
    })
}

/// Obedience with every order pinned to "deviator moves first": every
/// deviation is punished.
pub fn is_individually_rational(
    env: &Environment,
    alpha: &JointDistribution,
    threats: &ThreatSpace,
    mode: PunishmentMode,
) -> Result<bool> {
    let effective = threats.effective(env, alpha);
    for i in 0..env.num_players() {
        let marginal = alpha.marginal(env, i);
        for rec in 0..env.num_actions(i) {
            if !marginal[rec].is_positive() {
                continue;
            }
            for dev in 0..env.num_actions(i) {
                let w = worst_punishment(env, i, rec, dev, &effective, mode)?;
                let total = env
                    .profiles()
                    .filter(|a| a[i] == rec)
                    .fold(Rational::zero(), |acc, a| {
                        acc + alpha.weight(env.index_of(&a)) * (env.payoff(i, &a) - &w)
                    });
                if total.is_negative() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Affine constraint over distribution weights, indexed by profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaConstraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// A fixed-support slice solved jointly over α and γ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportSlice {
    pub system: IceSystem,
    /// Column of the mass variable `t`.
    pub mass_var: usize,
    pub outcome: LpOutcome,
}

impl SupportSlice {
    /// Value of `t` at the returned point, zero when the slice is empty.
    pub fn slack(&self) -> Rational {
        self.outcome
            .point()
            .map(|p| p[self.mass_var].clone())
            .unwrap_or_else(Rational::zero)
    }

    /// True when some ICE puts positive mass on every action of the support.
    pub fn full_support(&self) -> bool {
        self.slack().is_positive()
    }

    pub fn alpha(&self, env: &Environment) -> Option<JointDistribution> {
        let point = self.outcome.point()?;
        self.system.gamma(point).alpha(env).ok()
    }
}

/// Solves the slice of distributions supported inside `support`, with
/// effective threats `B ∪ support`.
///
/// Adds a variable `t ≥ 0` with `α_i(s) ≥ t` for every `s ∈ support_i` and
/// maximizes it unless `objective` (coefficients on `α`, by profile) is
/// given. `t > 0` at the optimum certifies an ICE whose marginal supports
/// are exactly `support`. Empty slices come back as
/// [`LpOutcome::Infeasible`].
pub fn is_ice_variable(
    env: &Environment,
    threats: &ThreatSpace,
    support: &ActionSubspace,
    mode: PunishmentMode,
    extra: &[AlphaConstraint],
    objective: Option<&[Rational]>,
) -> Result<SupportSlice> {
    let mut ice = build_ice_system(env, Slice::Support(support), threats, mode)?;
    let t = ice.system.add_variable("t", true);
    let alpha_terms = |coeff: &dyn Fn(usize) -> Rational| -> Vec<(usize, Rational)> {
        let mut terms = Vec::new();
        for (pos, &p) in ice.profiles.iter().enumerate() {
            let c = coeff(p);
            if !c.is_zero() {
                for k in 0..ice.num_orderings {
                    terms.push((pos * ice.num_orderings + k, c.clone()));
                }
            }
        }
        terms
    };
    let mut new_rows = Vec::new();
    for i in 0..env.num_players() {
        for &s in support.component(i) {
            let mut terms = alpha_terms(&|p| if env.profile_at(p)[i] == s { one() } else { Rational::zero() });
            terms.push((t, -one()));
            new_rows.push((terms, Relation::Ge, Rational::zero(), RowKind::SupportMass { player: i, action: s }));
        }
    }
    for (k, c) in extra.iter().enumerate() {
        if c.coeffs.len() != env.num_profiles() {
            return Err(Error::DimensionMismatch(format!(
                "extra constraint {k} has {} coefficients for {} profiles",
                c.coeffs.len(),
                env.num_profiles()
            )));
        }
        let terms = alpha_terms(&|p| c.coeffs[p].clone());
        new_rows.push((terms, c.relation, c.rhs.clone(), RowKind::Extra(k)));
    }
    for (terms, rel, rhs, kind) in new_rows {
        ice.system.add_sparse(&terms, rel, rhs);
        ice.rows.push(kind);
    }
    let mut obj = vec![Rational::zero(); ice.system.num_variables()];
    match objective {
        None => obj[t] = one(),
        Some(c) => {
            if c.len() != env.num_profiles() {
                return Err(Error::DimensionMismatch("objective length".into()));
            }
            for (j, v) in alpha_terms(&|p| c[p].clone()) {
                obj[j] = v;
            }
        }
    }
    let outcome = lp::solve(&ice.system, Some(&obj), Sense::Maximize)?;
    Ok(SupportSlice {
        system: ice,
        mass_var: t,
        outcome,
    })
}
