//! The threat-restricting operator `B`, its greatest fixed point `A^∞`, and
//! the implementability classifier.
//!
//! `B(A')` keeps an action when some ICE with declared threats `A' ∪ R`
//! plays it with positive probability. Because effective threats depend on
//! the support, the operator enumerates support products and solves one
//! affine slice per product.

use crate::elimination::{cr_set, cr_step, fcr_set, iterated_r_set, r_set};
use crate::env::{ActionSubspace, Environment, JointDistribution, ThreatSpace};
use crate::error::{Error, Result};
use crate::ice::{is_ice, is_ice_variable, size_cap, IceCertificate, PunishmentMode};

/// Which notion of first-order rationalizability enters the threats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RNotion {
    /// Actions not strictly dominated against all of `A_{-i}`.
    #[default]
    FirstOrder,
    /// Iterated strict dominance.
    Iterated,
}

pub fn rationalizable(env: &Environment, notion: RNotion) -> ActionSubspace {
    match notion {
        RNotion::FirstOrder => r_set(env),
        RNotion::Iterated => iterated_r_set(env).0,
    }
}

/// Support product and distribution that put positive weight on an action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionWitness {
    pub player: usize,
    pub action: usize,
    pub support: ActionSubspace,
    pub alpha: JointDistribution,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorStep {
    /// The set the operator was applied to.
    pub input: ActionSubspace,
    pub output: ActionSubspace,
    /// One witness per action of `output`, in player/action order.
    pub witnesses: Vec<ActionWitness>,
    /// Support products whose slice was solved.
    pub slices_solved: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OperatorTrace {
    pub steps: Vec<OperatorStep>,
}

impl OperatorTrace {
    /// `A^1, A^2, ...` ending with the fixed point.
    pub fn sequence(&self) -> Vec<&ActionSubspace> {
        let mut out: Vec<&ActionSubspace> = self.steps.iter().map(|s| &s.input).collect();
        if let Some(last) = self.steps.last() {
            out.push(&last.output);
        }
        out
    }
}

fn support_order(env: &Environment) -> Result<Vec<ActionSubspace>> {
    support_order_capped(env, size_cap())
}

fn support_order_capped(env: &Environment, cap: usize) -> Result<Vec<ActionSubspace>> {
    let count = ActionSubspace::count_nonempty_products(env);
    if count > cap {
        return Err(Error::TooLarge {
            what: "support products",
            needed: count,
            cap,
        });
    }
    let mut all = ActionSubspace::all_nonempty_products(env);
    // Large supports first: one positive slice covers many actions.
    all.sort_by_key(|s| std::cmp::Reverse(s.total_actions()));
    Ok(all)
}

fn operator_step(
    env: &Environment,
    within: &ActionSubspace,
    r: &ActionSubspace,
    mode: PunishmentMode,
    supports: &[ActionSubspace],
) -> Result<OperatorStep> {
    let threats = ThreatSpace::new(within.union(r));
    let mut output = ActionSubspace::empty(env.num_players());
    let mut found: Vec<ActionWitness> = Vec::new();
    let mut slices_solved = 0;
    for s in supports {
        let covered = (0..env.num_players()).all(|i| s.component(i).iter().all(|&a| output.contains(i, a)));
        if covered {
            continue;
        }
        slices_solved += 1;
        let slice = is_ice_variable(env, &threats, s, mode, &[], None)?;
        if !slice.full_support() {
            continue;
        }
        let alpha = slice
            .alpha(env)
            .ok_or_else(|| Error::Internal("positive slice without a distribution".into()))?;
        for i in 0..env.num_players() {
            for &a in s.component(i) {
                if output.insert(i, a) {
                    found.push(ActionWitness {
                        player: i,
                        action: a,
                        support: s.clone(),
                        alpha: alpha.clone(),
                    });
                }
            }
        }
    }
    found.sort_by_key(|w| (w.player, w.action));
    Ok(OperatorStep {
        input: within.clone(),
        output,
        witnesses: found,
        slices_solved,
    })
}

/// `B(A')` with rationalizable set `r`: the actions played with positive
/// probability by some ICE with declared threats `A' ∪ r`.
pub fn b_operator(env: &Environment, within: &ActionSubspace, r: &ActionSubspace, mode: PunishmentMode) -> Result<ActionSubspace> {
    let supports = support_order(env)?;
    Ok(operator_step(env, within, r, mode, &supports)?.output)
}

/// Same as [`b_operator`], returning the per-action witnesses.
pub fn b_operator_traced(
    env: &Environment,
    within: &ActionSubspace,
    r: &ActionSubspace,
    mode: PunishmentMode,
) -> Result<OperatorStep> {
    let supports = support_order(env)?;
    operator_step(env, within, r, mode, &supports)
}

/// `A^∞` with first-order `R`.
pub fn a_infinity(env: &Environment, mode: PunishmentMode) -> Result<(ActionSubspace, OperatorTrace)> {
    a_infinity_with(env, mode, RNotion::FirstOrder)
}

/// `A^∞`: iterate `A^{n+1} = B(A^n)` from `A^1 = A`. Checks that the
/// sequence decreases, stops within `Σ_i |A_i|` steps, ends nonempty and
/// at a fixed point.
pub fn a_infinity_with(env: &Environment, mode: PunishmentMode, notion: RNotion) -> Result<(ActionSubspace, OperatorTrace)> {
    let r = rationalizable(env, notion);
    let supports = support_order(env)?;
    let bound: usize = env.action_counts().iter().sum();
    let mut current = ActionSubspace::full(env);
    let mut trace = OperatorTrace::default();
    loop {
        let step = operator_step(env, &current, &r, mode, &supports)?;
        let next = step.output.clone();
        trace.steps.push(step);
        if !next.is_subset(&current) {
            return Err(Error::Internal("operator sequence increased".into()));
        }
        if next.has_empty_component() {
            return Err(Error::Internal("operator sequence reached an empty component".into()));
        }
        if next == current {
            break;
        }
        if trace.steps.len() > bound {
            return Err(Error::Internal("operator sequence did not stabilize".into()));
        }
        current = next;
    }
    Ok((current, trace))
}

/// A membership verdict with the declared threats it was decided under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub threats: ActionSubspace,
    pub certificate: IceCertificate,
}

fn verdict(env: &Environment, alpha: &JointDistribution, threats: ActionSubspace, mode: PunishmentMode) -> Result<Verdict> {
    let certificate = is_ice(env, alpha, &ThreatSpace::new(threats.clone()), mode)?;
    Ok(Verdict {
        holds: certificate.verdict,
        threats,
        certificate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Flags {
    /// `R = A`.
    pub no_strict_dominance: bool,
    /// No action is absolutely dominated at `A`.
    pub no_absolute_dominance: bool,
    /// Two players, two actions each, no repeated payoffs for either.
    pub generic_2x2: bool,
}

/// Implementability verdicts for one distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    /// ICE with `B = A`.
    pub nash: Verdict,
    /// ICE with `B = A^FR`.
    pub quasi_sequential: Verdict,
    /// ICE with `B = A^∞ ∪ R`.
    pub sequential_sufficient: Verdict,
    /// Necessary condition for sequential implementation; same test as
    /// `quasi_sequential`.
    pub sequential_necessary: Verdict,
    /// ICE with `B = A^CR`, reported only for generic 2x2 environments.
    pub sequential_2x2: Option<Verdict>,
    pub flags: Flags,
    pub r: ActionSubspace,
    pub a_infinity: ActionSubspace,
}

impl Classification {
    /// The implications that must hold between the verdicts; returns the
    /// first violated one.
    pub fn violated_implication(&self) -> Option<&'static str> {
        if self.quasi_sequential.holds && !self.nash.holds {
            return Some("quasi_sequential => nash");
        }
        if self.sequential_sufficient.holds && !self.quasi_sequential.holds {
            return Some("sequential_sufficient => quasi_sequential");
        }
        if self.flags.no_strict_dominance && self.sequential_sufficient.holds != self.nash.holds {
            return Some("no strict dominance => (sequential_sufficient <=> nash)");
        }
        if self.flags.no_absolute_dominance && self.quasi_sequential.holds != self.nash.holds {
            return Some("no absolute dominance => (quasi_sequential <=> nash)");
        }
        None
    }
}

/// Environment-level sets shared by every classification on that
/// environment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreatSets {
    pub r: ActionSubspace,
    pub cr: ActionSubspace,
    pub fcr: ActionSubspace,
    pub a_infinity: ActionSubspace,
    pub flags: Flags,
}

impl ThreatSets {
    pub fn compute(env: &Environment, mode: PunishmentMode, notion: RNotion) -> Result<Self> {
        let full = ActionSubspace::full(env);
        let r = rationalizable(env, notion);
        let cr = cr_set(env).0;
        let fcr = fcr_set(env)?.0;
        let a_infinity = a_infinity_with(env, mode, notion)?.0;
        let generic_2x2 = env.num_players() == 2
            && env.action_counts().iter().all(|&c| c == 2)
            && (0..2).all(|i| !env.has_repeated_payoffs(i));
        let flags = Flags {
            no_strict_dominance: r_set(env) == full,
            no_absolute_dominance: cr_step(env, &full)? == full,
            generic_2x2,
        };
        Ok(ThreatSets {
            r,
            cr,
            fcr,
            a_infinity,
            flags,
        })
    }
}

pub fn classify(env: &Environment, alpha: &JointDistribution, mode: PunishmentMode) -> Result<Classification> {
    let sets = ThreatSets::compute(env, mode, RNotion::FirstOrder)?;
    classify_with(env, alpha, mode, &sets)
}

/// Classification against precomputed threat sets.
pub fn classify_with(env: &Environment, alpha: &JointDistribution, mode: PunishmentMode, sets: &ThreatSets) -> Result<Classification> {
    let nash = verdict(env, alpha, ActionSubspace::full(env), mode)?;
    let quasi_sequential = verdict(env, alpha, sets.fcr.clone(), mode)?;
    let sequential_sufficient = verdict(env, alpha, sets.a_infinity.union(&sets.r), mode)?;
    let sequential_2x2 = if sets.flags.generic_2x2 {
        Some(verdict(env, alpha, sets.cr.clone(), mode)?)
    } else {
        None
    };
    Ok(Classification {
        nash,
        sequential_necessary: quasi_sequential.clone(),
        quasi_sequential,
        sequential_sufficient,
        sequential_2x2,
        flags: sets.flags,
        r: sets.r.clone(),
        a_infinity: sets.a_infinity.clone(),
    })
}

#[cfg(test)]
mod tests;
