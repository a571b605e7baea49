use proptest::prelude::*;
use rand::Rng;

use super::*;
use crate::catalog::{chicken, prisoners_dilemma_int, punishment_cycle};
use crate::random;

const M: PunishmentMode = PunishmentMode::WorstInThreats;

fn sets(env: &Environment, v: Vec<Vec<usize>>) -> ActionSubspace {
    ActionSubspace::from_sets(env, v).unwrap()
}

fn labelled(env: &Environment, rows: &[&str], cols: &[&str]) -> ActionSubspace {
    let r = rows.iter().map(|l| env.action_index(0, l).unwrap()).collect();
    let c = cols.iter().map(|l| env.action_index(1, l).unwrap()).collect();
    sets(env, vec![r, c])
}

#[test]
fn b_operator_examples() {
    let g = prisoners_dilemma_int(0, 1, 3, 6);
    let a = ActionSubspace::full(&g);
    let out = b_operator(&g, &a, &r_set(&g), M).unwrap();
    assert_eq!(out, sets(&g, vec![vec![1], vec![1]]));

    let g = prisoners_dilemma_int(0, 1, 3, 4);
    let a = ActionSubspace::full(&g);
    assert_eq!(b_operator(&g, &a, &r_set(&g), M).unwrap(), a);

    let ch = chicken();
    let a = ActionSubspace::full(&ch);
    let step = b_operator_traced(&ch, &a, &r_set(&ch), M).unwrap();
    assert_eq!(step.output, a);
    for w in &step.witnesses {
        assert!(w.alpha.marginal(&ch, w.player)[w.action] > crate::rational::zero());
        assert!(is_ice(&ch, &w.alpha, &ThreatSpace::new(a.union(&r_set(&ch))), M).unwrap().verdict);
    }
}

#[test]
fn a_infinity_examples() {
    let ch = chicken();
    let (set, trace) = a_infinity(&ch, M).unwrap();
    assert_eq!(set, ActionSubspace::full(&ch));
    assert_eq!(trace.steps.len(), 1);

    let g = prisoners_dilemma_int(0, 1, 3, 6);
    let (set, trace) = a_infinity(&g, M).unwrap();
    assert_eq!(set, sets(&g, vec![vec![1], vec![1]]));
    assert_eq!(trace.sequence().len(), 3);
}

#[test]
fn cycle_game_limit_keeps_the_dilemma() {
    // T is a best response to L and C to an even L/R belief, so R = A and the
    // threats never shrink: the limit is every action some ICE with B = A
    // plays, which is the inner dilemma.
    let e = punishment_cycle(2);
    assert_eq!(r_set(&e), ActionSubspace::full(&e));
    let inner = labelled(&e, &["C", "D"], &["C", "D"]);
    let (set, _) = a_infinity(&e, M).unwrap();
    assert_eq!(set, inner);
    let (alt, _) = a_infinity_with(&e, M, RNotion::Iterated).unwrap();
    assert_eq!(alt, inner);
}

#[test]
fn cycle_game_cooperation() {
    let e = punishment_cycle(2);
    let cc = JointDistribution::point_mass(&e, &[1, 1]).unwrap();
    assert!(is_ice(&e, &cc, &ThreatSpace::all(&e), M).unwrap().verdict);
    let inner = ThreatSpace::new(labelled(&e, &["C", "D"], &["C", "D"]));
    let cert = is_ice(&e, &cc, &inner, M).unwrap();
    assert!(!cert.verdict);
    assert!(cert.verify(&e, &cc));
    let c = classify(&e, &cc, M).unwrap();
    assert!(c.nash.holds);
}

#[test]
fn classify_examples() {
    let e = punishment_cycle(5);
    let cc = JointDistribution::point_mass(&e, &[1, 1]).unwrap();
    let c = classify(&e, &cc, M).unwrap();
    assert!(c.nash.holds);
    assert!(c.quasi_sequential.holds);
    assert!(c.flags.no_absolute_dominance);
    assert_eq!(c.quasi_sequential.threats, ActionSubspace::full(&e));
    assert!(c.sequential_2x2.is_none());

    let g = prisoners_dilemma_int(0, 1, 3, 4);
    let cc = JointDistribution::point_mass(&g, &[0, 0]).unwrap();
    let c = classify(&g, &cc, M).unwrap();
    assert!(c.flags.generic_2x2);
    assert_eq!(c.sequential_2x2.as_ref().map(|v| v.holds), Some(true));
    assert_eq!(c.violated_implication(), None);

    let g = prisoners_dilemma_int(0, 1, 3, 6);
    let cc = JointDistribution::point_mass(&g, &[0, 0]).unwrap();
    let c = classify(&g, &cc, M).unwrap();
    assert!(!c.nash.holds && !c.quasi_sequential.holds && !c.sequential_sufficient.holds);
    assert!(!c.sequential_necessary.holds);
    assert_eq!(c.sequential_2x2.as_ref().map(|v| v.holds), Some(false));

    let ch = chicken();
    let ww = JointDistribution::point_mass(&ch, &[1, 1]).unwrap();
    let c = classify(&ch, &ww, M).unwrap();
    assert!(c.flags.no_strict_dominance);
    assert!(c.nash.holds && c.quasi_sequential.holds && c.sequential_sufficient.holds);
    // Chicken repeats no payoff for either player.
    assert_eq!(c.sequential_2x2.as_ref().map(|v| v.holds), Some(true));
}

#[test]
fn size_cap_refuses_support_enumeration() {
    let e = punishment_cycle(2);
    assert!(matches!(support_order_capped(&e, 224), Err(Error::TooLarge { needed: 225, .. })));
    assert_eq!(support_order_capped(&e, 225).unwrap().len(), 225);
}

fn small_game(seed: u64) -> Environment {
    let mut r = random::rng(seed);
    let counts = [r.random_range(2..=3), r.random_range(2..=3)];
    random::game(&mut r, &counts, -5, 5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trace_decreases_to_a_fixed_point(seed in any::<u64>()) {
        let env = small_game(seed);
        let (limit, trace) = a_infinity(&env, M).unwrap();
        let seq = trace.sequence();
        for w in seq.windows(2) {
            prop_assert!(w[1].is_subset(w[0]));
        }
        prop_assert!(seq.len() <= env.action_counts().iter().sum::<usize>() + 1);
        let r = r_set(&env);
        prop_assert_eq!(b_operator(&env, &limit, &r, M).unwrap(), limit.clone());
        prop_assert!(!limit.has_empty_component());
    }

    #[test]
    fn lattice_is_consistent(seed in any::<u64>()) {
        let env = small_game(seed);
        let threat_sets = ThreatSets::compute(&env, M, RNotion::FirstOrder).unwrap();
        prop_assert!(threat_sets.a_infinity.union(&threat_sets.r).is_subset(&threat_sets.fcr));
        let mut r = random::rng(seed);
        for _ in 0..4 {
            let alpha = random::distribution(&mut r, &env, 6);
            let c = classify_with(&env, &alpha, M, &threat_sets).unwrap();
            prop_assert_eq!(c.violated_implication(), None);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn limit_contains_every_self_supporting_set(seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let env = random::game(&mut r, &[2, 3], -5, 5);
        let (limit, _) = a_infinity(&env, M).unwrap();
        let rr = r_set(&env);
        for s in ActionSubspace::all_nonempty_products(&env) {
            if s.is_subset(&b_operator(&env, &s, &rr, M).unwrap()) {
                prop_assert!(s.is_subset(&limit));
            }
        }
    }
}
