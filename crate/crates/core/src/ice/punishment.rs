//! Punishment values `w̲` for the incentive rows.

use num_traits::Zero;

use super::PunishmentMode;
use crate::env::{cartesian, ActionSubspace, Environment};
use crate::error::{Error, Result};
use crate::lp::{self, LinearSystem, LpOutcome, Relation, Sense};
use crate::rational::{one, Rational};

/// Punishment value for player `i` recommended `rec` and playing `dev`,
/// when every opponent is a punisher (`i` moves first).
pub fn worst_punishment(
    env: &Environment,
    i: usize,
    rec: usize,
    dev: usize,
    effective: &ActionSubspace,
    mode: PunishmentMode,
) -> Result<Rational> {
    let fixed = vec![None; env.num_players()];
    punishment_value(env, i, rec, dev, effective, &fixed, mode)
}

/// Punishment value when some opponents have already moved.
///
/// `fixed[j]` holds the action of an opponent `j` who moved before `i`;
/// opponents with `None` move after `i` and jointly punish from their
/// effective threats. `fixed[i]` is ignored.
pub fn punishment_value(
    env: &Environment,
    i: usize,
    rec: usize,
    dev: usize,
    effective: &ActionSubspace,
    fixed: &[Option<usize>],
    mode: PunishmentMode,
) -> Result<Rational> {
    let n = env.num_players();
    if fixed.len() != n {
        return Err(Error::ProfileArity {
            expected: n,
            got: fixed.len(),
        });
    }
    for (a, who) in [(rec, i), (dev, i)] {
        if a >= env.num_actions(who) {
            return Err(Error::ActionOutOfRange { player: who, action: a });
        }
    }
    let post: Vec<usize> = (0..n).filter(|&j| j != i && fixed[j].is_none()).collect();
    if post.is_empty() {
        // Last mover: nobody is left to punish.
        let mut p: Vec<usize> = fixed.iter().map(|f| f.unwrap_or(0)).collect();
        p[i] = dev;
        return Ok(env.payoff(i, &p).clone());
    }
    let lists: Vec<Vec<usize>> = post.iter().map(|&j| effective.component(j).iter().copied().collect()).collect();
    if lists.iter().any(Vec::is_empty) {
        return Err(Error::VacuousPunishment { player: i, action: dev });
    }
    let responses = cartesian(&lists);
    let profile_for = |own: usize, resp: &[usize]| -> Vec<usize> {
        let mut p: Vec<usize> = fixed.iter().map(|f| f.unwrap_or(0)).collect();
        p[i] = own;
        for (&j, &b) in post.iter().zip(resp) {
            p[j] = b;
        }
        p
    };
    let worst_over = |own: usize, resp: &[Vec<usize>]| -> Rational {
        resp.iter()
            .map(|r| env.payoff(i, &profile_for(own, r)))
            .min()
            .cloned()
            .expect("nonempty response set")
    };

    match mode {
        PunishmentMode::WorstInThreats => Ok(worst_over(dev, &responses)),
        PunishmentMode::BestResponseOnly => {
            if post.len() > 1 {
                return Err(Error::Unsupported(
                    "best-response punishments are defined for a single punisher".into(),
                ));
            }
            let j = post[0];
            let best = responses
                .iter()
                .map(|r| env.payoff(j, &profile_for(dev, r)))
                .max()
                .cloned()
                .expect("nonempty response set");
            let replies: Vec<Vec<usize>> = responses
                .into_iter()
                .filter(|r| env.payoff(j, &profile_for(dev, r)) == &best)
                .collect();
            Ok(worst_over(dev, &replies))
        }
        PunishmentMode::Minimax => {
            let alternatives: Vec<usize> = if dev == rec {
                vec![rec]
            } else {
                (0..env.num_actions(i)).filter(|&b| b != rec).collect()
            };
            if alternatives.len() == 1 {
                return Ok(worst_over(alternatives[0], &responses));
            }
            // min over mixed threats σ of max over alternatives.
            let mut sys = LinearSystem::new();
            for k in 0..responses.len() {
                sys.add_variable(format!("s{k}"), true);
            }
            let v = sys.add_variable("v", false);
            for &b in &alternatives {
                let mut terms: Vec<(usize, Rational)> = responses
                    .iter()
                    .enumerate()
                    .map(|(k, r)| (k, -env.payoff(i, &profile_for(b, r)).clone()))
                    .collect();
                terms.push((v, one()));
                sys.add_sparse(&terms, Relation::Ge, Rational::zero());
            }
            let mass: Vec<(usize, Rational)> = (0..responses.len()).map(|k| (k, one())).collect();
            sys.add_sparse(&mass, Relation::Eq, one());
            let mut obj = vec![Rational::zero(); sys.num_variables()];
            obj[v] = one();
            match lp::solve(&sys, Some(&obj), Sense::Minimize)? {
                LpOutcome::Optimal { value, .. } => Ok(value),
                other => Err(Error::Internal(format!("minimax punishment LP returned {other:?}"))),
            }
        }
    }
}
