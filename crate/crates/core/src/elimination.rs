//! Dominance operators: first-order rationalizability (strict dominance by
//! mixed actions), absolute dominance with its fixed point `A^CR`, and the
//! future-looking dominance system with its fixed point `A^FR`.
//!
//! Every operator on a subspace `A'` is evaluated for all of `A_i`, not
//! only for `A'_i`, so the operators are monotone maps on product sets and
//! their fixed points are reached by iterating from the full space.

use num_traits::{Signed, Zero};

use crate::env::{ActionSubspace, Environment};
use crate::error::{Error, Result};
use crate::lp::{self, LinearSystem, LpOutcome, Relation, Sense};
use crate::rational::{one, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reason {
    /// Worst payoff of `by` beats the best payoff of the removed action.
    AbsoluteDominance { by: usize },
    /// Strictly dominated by this mixed action over `A_i`.
    StrictDominance { by: Vec<Rational> },
    /// Mixed action satisfying both future-looking dominance conditions.
    FcrDominance { witness: Vec<Rational> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Removal {
    /// 1-based round in which the action left.
    pub round: usize,
    pub player: usize,
    pub action: usize,
    pub reason: Reason,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EliminationTrace {
    pub removals: Vec<Removal>,
    /// Rounds run, including the final one that removed nothing.
    pub rounds: usize,
}

/// Own-action-dependent beliefs `λ_i(·|a_i)` over opponent tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterfactualBelief {
    pub player: usize,
    /// Opponent tuples indexing the columns of `rows`.
    pub opponents: Vec<Vec<usize>>,
    /// `rows[a_i][k]` is the probability of `opponents[k]` given `a_i`.
    pub rows: Vec<Vec<Rational>>,
}

impl CounterfactualBelief {
    /// Expected payoff of `own` under its own conditional belief.
    pub fn value(&self, env: &Environment, own: usize) -> Rational {
        self.opponents
            .iter()
            .zip(&self.rows[own])
            .filter(|(_, p)| !p.is_zero())
            .fold(Rational::zero(), |acc, (b, p)| {
                acc + p * env.payoff(self.player, &env.compose(self.player, own, b))
            })
    }

    pub fn is_best_response(&self, env: &Environment, action: usize) -> bool {
        let v = self.value(env, action);
        (0..env.num_actions(self.player)).all(|b| self.value(env, b) <= v)
    }

    /// True when every row is supported inside `within_{-i}`.
    pub fn is_restricted_to(&self, within: &ActionSubspace) -> bool {
        let others: Vec<usize> = (0..within.num_players()).filter(|&j| j != self.player).collect();
        self.rows.iter().all(|row| {
            row.iter().zip(&self.opponents).all(|(p, b)| {
                p.is_zero() || others.iter().zip(b).all(|(&j, &x)| within.contains(j, x))
            })
        })
    }
}

fn opponents_within(env: &Environment, i: usize, within: &ActionSubspace) -> Result<Vec<Vec<usize>>> {
    let opp = env.opponent_profiles(i, Some(within));
    if opp.is_empty() {
        return Err(Error::EmptyOpponents { player: i });
    }
    Ok(opp)
}

fn row_range(env: &Environment, i: usize, a: usize, opp: &[Vec<usize>]) -> (Rational, Rational) {
    let mut vals = opp.iter().map(|b| env.payoff(i, &env.compose(i, a, b)));
    let first = vals.next().expect("nonempty opponents").clone();
    vals.fold((first.clone(), first), |(lo, hi), v| {
        (if v < &lo { v.clone() } else { lo }, if v > &hi { v.clone() } else { hi })
    })
}

/// Whether `a` absolutely dominates `b` for player `i` given opponents in
/// `within_{-i}`: `min u_i(a,·) > max u_i(b,·)`.
pub fn absolutely_dominates(env: &Environment, i: usize, a: usize, b: usize, within: &ActionSubspace) -> Result<bool> {
    let opp = opponents_within(env, i, within)?;
    let (lo, _) = row_range(env, i, a, &opp);
    let (_, hi) = row_range(env, i, b, &opp);
    Ok(lo > hi)
}

/// Lowest-index action of `A_i` absolutely dominating `a` given `within_{-i}`.
pub fn absolute_dominator(env: &Environment, i: usize, a: usize, within: &ActionSubspace) -> Result<Option<usize>> {
    let opp = opponents_within(env, i, within)?;
    let (_, hi) = row_range(env, i, a, &opp);
    Ok((0..env.num_actions(i)).find(|&b| row_range(env, i, b, &opp).0 > hi))
}

/// Actions of every player not absolutely dominated given `within`, each
/// paired with its dominator when removed.
fn cr_step_with_reasons(env: &Environment, within: &ActionSubspace) -> Result<(ActionSubspace, Vec<(usize, usize, usize)>)> {
    let mut keep = ActionSubspace::empty(env.num_players());
    let mut removed = Vec::new();
    for i in 0..env.num_players() {
        for a in 0..env.num_actions(i) {
            match absolute_dominator(env, i, a, within)? {
                None => {
                    keep.insert(i, a);
                }
                Some(by) => removed.push((i, a, by)),
            }
        }
    }
    Ok((keep, removed))
}

/// `CR(A')`: the actions that are best responses to some counterfactual
/// belief restricted to `A'_{-i}`.
pub fn cr_step(env: &Environment, within: &ActionSubspace) -> Result<ActionSubspace> {
    Ok(cr_step_with_reasons(env, within)?.0)
}

/// `A^CR`: simultaneous removal of all absolutely dominated actions until
/// nothing changes.
pub fn cr_set(env: &Environment) -> (ActionSubspace, EliminationTrace) {
    let mut current = ActionSubspace::full(env);
    let mut trace = EliminationTrace::default();
    loop {
        trace.rounds += 1;
        let (next, removed) = cr_step_with_reasons(env, &current).expect("surviving sets stay nonempty");
        let mut changed = false;
        for (player, action, by) in removed {
            if current.contains(player, action) {
                changed = true;
                trace.removals.push(Removal {
                    round: trace.rounds,
                    player,
                    action,
                    reason: Reason::AbsoluteDominance { by },
                });
            }
        }
        if !changed {
            return (current, trace);
        }
        current = next;
    }
}

/// Removes absolutely dominated actions one at a time. `pick` receives the
/// currently removable `(player, action)` pairs (ascending) and returns the
/// position of the one to remove. Each removal counts as a round.
pub fn cr_set_by_single_removals(
    env: &Environment,
    mut pick: impl FnMut(&[(usize, usize)]) -> usize,
) -> (ActionSubspace, EliminationTrace) {
    let mut current = ActionSubspace::full(env);
    let mut trace = EliminationTrace::default();
    loop {
        trace.rounds += 1;
        let mut candidates = Vec::new();
        let mut dominators = Vec::new();
        for i in 0..env.num_players() {
            for &a in current.component(i) {
                if let Some(by) = absolute_dominator(env, i, a, &current).expect("nonempty survivors") {
                    candidates.push((i, a));
                    dominators.push(by);
                }
            }
        }
        if candidates.is_empty() {
            return (current, trace);
        }
        let k = pick(&candidates).min(candidates.len() - 1);
        let (player, action) = candidates[k];
        current.remove(player, action);
        trace.removals.push(Removal {
            round: trace.rounds,
            player,
            action,
            reason: Reason::AbsoluteDominance { by: dominators[k] },
        });
    }
}

/// Constructive belief making `a` a best response while restricted to
/// `within_{-i}`: the best tuple for `a`, the worst tuple for every other
/// action (lowest index on ties). `None` iff `a` is absolutely dominated.
pub fn c_rationalizable_witness(
    env: &Environment,
    i: usize,
    a: usize,
    within: &ActionSubspace,
) -> Result<Option<CounterfactualBelief>> {
    let opp = opponents_within(env, i, within)?;
    if absolute_dominator(env, i, a, within)?.is_some() {
        return Ok(None);
    }
    let all = env.opponent_profiles(i, None);
    let pos = |b: &Vec<usize>| all.iter().position(|x| x == b).expect("opponent tuple");
    let pick = |own: usize, best: bool| -> usize {
        let mut chosen = &opp[0];
        for b in &opp[1..] {
            let u = env.payoff(i, &env.compose(i, own, b));
            let cur = env.payoff(i, &env.compose(i, own, chosen));
            if (best && u > cur) || (!best && u < cur) {
                chosen = b;
            }
        }
        pos(chosen)
    };
    let rows = (0..env.num_actions(i))
        .map(|own| {
            let mut row = vec![Rational::zero(); all.len()];
            row[pick(own, own == a)] = one();
            row
        })
        .collect();
    let belief = CounterfactualBelief {
        player: i,
        opponents: all,
        rows,
    };
    if !belief.is_best_response(env, a) {
        return Err(Error::Internal("counterfactual witness is not a best response".into()));
    }
    Ok(Some(belief))
}

/// Largest `ε` such that some mixed `σ` over `own` satisfies
/// `Σ_b σ_b c_b ≥ threshold + ε` for every row `(c, threshold)`, where `c`
/// is indexed by the actions of `A_i`. The maximizing `σ` is spread over
/// all of `A_i`.
fn dominance_lp(num_actions: usize, own: &[usize], rows: &[(Vec<Rational>, Rational)]) -> Result<(Rational, Vec<Rational>)> {
    let k = own.len();
    let mut sys = LinearSystem::new();
    for b in own {
        sys.add_variable(format!("s{b}"), true);
    }
    let eps = sys.add_variable("eps", false);
    for (coeffs, threshold) in rows {
        let mut c: Vec<Rational> = own.iter().map(|&b| coeffs[b].clone()).collect();
        c.push(-one());
        sys.add_constraint(c, Relation::Ge, threshold.clone());
    }
    let mut mass = vec![one(); k];
    mass.push(Rational::zero());
    sys.add_constraint(mass, Relation::Eq, one());
    let mut obj = vec![Rational::zero(); k + 1];
    obj[eps] = one();
    match lp::solve(&sys, Some(&obj), Sense::Maximize)? {
        LpOutcome::Optimal { value, point, .. } => {
            let mut sigma = vec![Rational::zero(); num_actions];
            for (x, &b) in point.into_iter().zip(own) {
                sigma[b] = x;
            }
            Ok((value, sigma))
        }
        other => Err(Error::Internal(format!("dominance LP returned {other:?}"))),
    }
}

/// Dominance rows against the opponent tuples `opp`: beat `u_i(a, tuple)`.
fn pointwise_rows(env: &Environment, i: usize, a: usize, opp: &[Vec<usize>]) -> Vec<(Vec<Rational>, Rational)> {
    opp.iter()
        .map(|t| {
            let coeffs = (0..env.num_actions(i)).map(|b| env.payoff(i, &env.compose(i, b, t)).clone()).collect();
            (coeffs, env.payoff(i, &env.compose(i, a, t)).clone())
        })
        .collect()
}

fn all_actions(env: &Environment, i: usize) -> Vec<usize> {
    (0..env.num_actions(i)).collect()
}

/// Mixed action strictly dominating `a` against every opponent tuple in
/// `within_{-i}` (all of `A_{-i}` when `None`), if one exists.
pub fn strict_dominator(
    env: &Environment,
    i: usize,
    a: usize,
    within: Option<&ActionSubspace>,
) -> Result<Option<Vec<Rational>>> {
    let opp = env.opponent_profiles(i, within);
    if opp.is_empty() {
        return Err(Error::EmptyOpponents { player: i });
    }
    let rows = pointwise_rows(env, i, a, &opp);
    let (eps, sigma) = dominance_lp(env.num_actions(i), &all_actions(env, i), &rows)?;
    Ok(eps.is_positive().then_some(sigma))
}

/// `R`: per player, the actions that are best responses to some belief over
/// `A_{-i}`, i.e. not strictly dominated by a mixed action.
pub fn r_set(env: &Environment) -> ActionSubspace {
    let mut out = ActionSubspace::empty(env.num_players());
    for i in 0..env.num_players() {
        for a in 0..env.num_actions(i) {
            if strict_dominator(env, i, a, None).expect("full opponents").is_none() {
                out.insert(i, a);
            }
        }
    }
    out
}

/// Iterated strict dominance: opponents and dominators are both restricted
/// to the current survivors, rounds remove every dominated action at once.
pub fn iterated_r_set(env: &Environment) -> (ActionSubspace, EliminationTrace) {
    let mut current = ActionSubspace::full(env);
    let mut trace = EliminationTrace::default();
    loop {
        trace.rounds += 1;
        let mut removed = Vec::new();
        for i in 0..env.num_players() {
            let own: Vec<usize> = current.component(i).iter().copied().collect();
            for &a in &own {
                let opp = env.opponent_profiles(i, Some(&current));
                let rows = pointwise_rows(env, i, a, &opp);
                let (eps, sigma) = dominance_lp(env.num_actions(i), &own, &rows).expect("dominance LP");
                if eps.is_positive() {
                    removed.push((i, a, sigma));
                }
            }
        }
        if removed.is_empty() {
            return (current, trace);
        }
        for (player, action, by) in removed {
            current.remove(player, action);
            trace.removals.push(Removal {
                round: trace.rounds,
                player,
                action,
                reason: Reason::StrictDominance { by },
            });
        }
    }
}

/// Optimal slack of the future-looking dominance system for `a`: the
/// largest `ε` with some `σ ∈ Δ(A_i \ {a})` such that
///
/// 1. `Σ_b σ_b m_b ≥ max_{A'_{-i}} u_i(a, ·) + ε`, where `m_b` is
///    `min_{A'_{-i}} u_i(b, ·)` for `b ≠ a` and `m_a = max_{A'_{-i}} u_i(a, ·)`;
/// 2. `U_i(σ, t) ≥ u_i(a, t) + ε` for every tuple `t ∉ A'_{-i}`.
///
/// This is strict dominance in the game where all of `A'_{-i}` collapses to
/// one column that pays `a` its best case and every other action its worst
/// case, so `a` is removed iff it is never a best response to a mixture of
/// an unrestricted belief and a counterfactual belief inside `A'_{-i}`.
/// Condition 1 is dropped when `A'_{-i}` is empty.
///
/// Survivors get `ε ≤ 0`, and `−ε` measures how robustly they survive. A
/// player with a single action has nothing to mix; its slack is zero.
pub fn fcr_slack(env: &Environment, i: usize, a: usize, within: &ActionSubspace) -> Result<(Rational, Vec<Rational>)> {
    let inside = env.opponent_profiles(i, Some(within));
    let outside: Vec<Vec<usize>> = env
        .opponent_profiles(i, None)
        .into_iter()
        .filter(|t| !inside.contains(t))
        .collect();
    let mut rows = Vec::new();
    if !inside.is_empty() {
        let best = row_range(env, i, a, &inside).1;
        let coeffs = (0..env.num_actions(i))
            .map(|b| if b == a { best.clone() } else { row_range(env, i, b, &inside).0 })
            .collect();
        rows.push((coeffs, best));
    }
    rows.extend(pointwise_rows(env, i, a, &outside));
    let others: Vec<usize> = (0..env.num_actions(i)).filter(|&b| b != a).collect();
    if others.is_empty() {
        let mut sigma = vec![Rational::zero(); env.num_actions(i)];
        sigma[a] = one();
        return Ok((Rational::zero(), sigma));
    }
    dominance_lp(env.num_actions(i), &others, &rows)
}

fn fcr_step_with_reasons(env: &Environment, within: &ActionSubspace) -> Result<(ActionSubspace, Vec<(usize, usize, Vec<Rational>)>)> {
    let mut keep = ActionSubspace::empty(env.num_players());
    let mut removed = Vec::new();
    for i in 0..env.num_players() {
        for a in 0..env.num_actions(i) {
            let (eps, sigma) = fcr_slack(env, i, a, within)?;
            if eps.is_positive() {
                removed.push((i, a, sigma));
            } else {
                keep.insert(i, a);
            }
        }
    }
    Ok((keep, removed))
}

/// `FCR(A')`.
pub fn fcr_step(env: &Environment, within: &ActionSubspace) -> Result<ActionSubspace> {
    Ok(fcr_step_with_reasons(env, within)?.0)
}

/// `A^FR`, iterated down from `A`. The result is checked to be
/// self-FC-rationalizable and to contain `A^CR`.
pub fn fcr_set(env: &Environment) -> Result<(ActionSubspace, EliminationTrace)> {
    let mut current = ActionSubspace::full(env);
    let mut trace = EliminationTrace::default();
    loop {
        trace.rounds += 1;
        let (next, removed) = fcr_step_with_reasons(env, &current)?;
        let mut changed = false;
        for (player, action, witness) in removed {
            if current.contains(player, action) {
                changed = true;
                trace.removals.push(Removal {
                    round: trace.rounds,
                    player,
                    action,
                    reason: Reason::FcrDominance { witness },
                });
            }
        }
        if !changed {
            break;
        }
        current = next;
    }
    if !current.is_subset(&fcr_step(env, &current)?) {
        return Err(Error::Internal("FC fixed point is not self-FC-rationalizable".into()));
    }
    if !cr_set(env).0.is_subset(&current) {
        return Err(Error::Internal("FC fixed point misses C-rationalizable actions".into()));
    }
    Ok((current, trace))
}
