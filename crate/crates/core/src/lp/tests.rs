use super::*;
use crate::rational::{int, rat};
use proptest::prelude::*;

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

/// Independent optimality check: dual feasibility plus strong duality.
fn duals_certify(system: &LinearSystem, objective: &[Rational], sense: Sense, value: &Rational, duals: &[Rational]) -> bool {
    if duals.len() != system.num_constraints() {
        return false;
    }
    let signs_ok = system.constraints().iter().zip(duals).all(|(c, d)| match (sense, c.relation) {
        (_, Relation::Eq) => true,
        (Sense::Maximize, Relation::Le) | (Sense::Minimize, Relation::Ge) => !d.is_negative(),
        (Sense::Maximize, Relation::Ge) | (Sense::Minimize, Relation::Le) => !d.is_positive(),
    });
    let cols_ok = (0..system.num_variables()).all(|j| {
        let s = system
            .constraints()
            .iter()
            .zip(duals)
            .fold(Rational::zero(), |acc, (c, d)| acc + d * &c.coeffs[j]);
        if !system.is_nonneg(j) {
            s == objective[j]
        } else {
            match sense {
                Sense::Maximize => s >= objective[j],
                Sense::Minimize => s <= objective[j],
            }
        }
    });
    let dual_value = system
        .constraints()
        .iter()
        .zip(duals)
        .fold(Rational::zero(), |acc, (c, d)| acc + d * &c.rhs);
    signs_ok && cols_ok && &dual_value == value
}

#[test]
fn maximize_single_bound() {
    let mut s = LinearSystem::new();
    s.add_variable("x", true);
    s.add_constraint(ints(&[1]), Relation::Le, int(1));
    let out = solve(&s, Some(&ints(&[1])), Sense::Maximize).unwrap();
    match out {
        LpOutcome::Optimal { value, point, .. } => {
            assert_eq!(value, int(1));
            assert_eq!(point, ints(&[1]));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn one_variable_contradiction() {
    let mut s = LinearSystem::new();
    s.add_variable("x", true);
    s.add_constraint(ints(&[1]), Relation::Ge, int(1));
    s.add_constraint(ints(&[1]), Relation::Le, int(0));
    let out = solve(&s, None, Sense::Maximize).unwrap();
    let farkas = out.farkas().expect("infeasible").to_vec();
    assert_eq!(farkas, ints(&[1, 1]));
    assert!(verify_farkas(&s, &farkas));
}

#[test]
fn binding_face() {
    let mut s = LinearSystem::new();
    s.add_variable("x", true);
    s.add_variable("y", true);
    s.add_constraint(ints(&[1, 1]), Relation::Le, rat(7, 3));
    let obj = ints(&[1, 1]);
    let out = solve(&s, Some(&obj), Sense::Maximize).unwrap();
    assert_eq!(out.value(), Some(&rat(7, 3)));
    assert!(verify_point(&s, out.point().unwrap()));
}

#[test]
fn verify_point_examples() {
    let mut s = LinearSystem::new();
    s.add_variable("x", true);
    s.add_constraint(ints(&[1]), Relation::Le, int(1));
    assert!(verify_point(&s, &ints(&[1])));
    assert!(!verify_point(&s, &ints(&[2])));
    assert!(!verify_point(&s, &ints(&[1, 0])));
}

#[test]
fn verify_farkas_examples() {
    let mut s = LinearSystem::new();
    s.add_variable("x", false);
    s.add_constraint(ints(&[1]), Relation::Ge, int(1));
    s.add_constraint(ints(&[-1]), Relation::Ge, int(0));
    assert!(verify_farkas(&s, &ints(&[1, 1])));
    assert!(!verify_farkas(&s, &ints(&[1, 0])));
    assert!(!verify_farkas(&s, &ints(&[-1, -1])));
}

#[test]
fn free_variables_and_minimization() {
    // min x subject to x >= -5/2, x free
    let mut s = LinearSystem::new();
    s.add_variable("x", false);
    s.add_constraint(ints(&[1]), Relation::Ge, rat(-5, 2));
    let obj = ints(&[1]);
    let out = solve(&s, Some(&obj), Sense::Minimize).unwrap();
    match &out {
        LpOutcome::Optimal { value, point, duals } => {
            assert_eq!(value, &rat(-5, 2));
            assert_eq!(point, &vec![rat(-5, 2)]);
            assert!(duals_certify(&s, &obj, Sense::Minimize, value, duals));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn unbounded_ray() {
    let mut s = LinearSystem::new();
    s.add_variable("x", true);
    s.add_variable("y", true);
    s.add_constraint(ints(&[1, -1]), Relation::Le, int(1));
    let obj = ints(&[1, 0]);
    match solve(&s, Some(&obj), Sense::Maximize).unwrap() {
        LpOutcome::Unbounded { point, ray } => {
            assert!(verify_point(&s, &point));
            assert!(verify_ray(&s, &obj, Sense::Maximize, &ray));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn dimension_mismatch_is_an_error() {
    let mut s = LinearSystem::new();
    s.add_variable("x", true);
    s.add_constraint(ints(&[1, 2]), Relation::Le, int(1));
    assert!(matches!(solve(&s, None, Sense::Maximize), Err(Error::DimensionMismatch(_))));
    let mut ok = LinearSystem::new();
    ok.add_variable("x", true);
    assert!(solve(&ok, Some(&ints(&[1, 1])), Sense::Maximize).is_err());
}

#[test]
fn degenerate_redundant_rows_terminate() {
    // All-zero right-hand sides, duplicated and scaled rows: classic cycling
    // bait for largest-coefficient rules.
    let rows: [[i64; 4]; 6] = [
        [1, -1, 2, -3],
        [2, -2, 4, -6],
        [-1, 1, -2, 3],
        [1, 1, 1, 1],
        [0, 0, 0, 0],
        [3, -1, 0, 2],
    ];
    let mut s = LinearSystem::new();
    for k in 0..4 {
        s.add_variable(format!("x{k}"), true);
    }
    for r in rows {
        s.add_constraint(ints(&r), Relation::Le, int(0));
    }
    s.add_constraint(ints(&[1, 1, 1, 1]), Relation::Eq, int(0));
    s.add_constraint(ints(&[1, 1, 1, 1]), Relation::Eq, int(0));
    let obj = ints(&[1, 2, -1, 1]);
    let out = solve(&s, Some(&obj), Sense::Maximize).unwrap();
    assert_eq!(out.value(), Some(&int(0)));
    // Beale's cycling example (degenerate vertex at the origin).
    let mut b = LinearSystem::new();
    for k in 0..4 {
        b.add_variable(format!("x{k}"), true);
    }
    b.add_constraint(vec![rat(1, 4), int(-60), rat(-1, 25), int(9)], Relation::Le, int(0));
    b.add_constraint(vec![rat(1, 2), int(-90), rat(-1, 50), int(3)], Relation::Le, int(0));
    b.add_constraint(ints(&[0, 0, 1, 0]), Relation::Le, int(1));
    let obj = vec![rat(3, 4), int(-150), rat(1, 50), int(-6)];
    match solve(&b, Some(&obj), Sense::Maximize).unwrap() {
        LpOutcome::Optimal { value, point, duals } => {
            assert_eq!(value, rat(1, 20));
            assert!(verify_point(&b, &point));
            assert!(duals_certify(&b, &obj, Sense::Maximize, &value, &duals));
        }
        other => panic!("unexpected {other:?}"),
    }
}

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::Le), Just(Relation::Ge), Just(Relation::Eq)]
}

fn arb_system() -> impl Strategy<Value = (LinearSystem, Vec<Rational>, Sense)> {
    (1usize..=8, 1usize..=12).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(prop::bool::weighted(0.8), n),
            prop::collection::vec((prop::collection::vec(-3i64..=3, n), relation(), -5i64..=5), m),
            prop::collection::vec(-3i64..=3, n),
            prop::bool::ANY,
        )
            .prop_map(move |(nonneg, rows, obj, max)| {
                let mut s = LinearSystem::new();
                for (j, nn) in nonneg.iter().enumerate() {
                    s.add_variable(format!("x{j}"), *nn);
                }
                for (coeffs, rel, rhs) in rows {
                    s.add_constraint(ints(&coeffs), rel, int(rhs));
                }
                let sense = if max { Sense::Maximize } else { Sense::Minimize };
                (s, ints(&obj), sense)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn every_outcome_carries_a_valid_certificate((s, obj, sense) in arb_system()) {
        let feas = solve(&s, None, sense).unwrap();
        match &feas {
            LpOutcome::Feasible { point } => prop_assert!(verify_point(&s, point)),
            LpOutcome::Infeasible { farkas } => prop_assert!(verify_farkas(&s, farkas)),
            other => prop_assert!(false, "feasibility query returned {:?}", other),
        }
        let opt = solve(&s, Some(&obj), sense).unwrap();
        prop_assert_eq!(feas.is_feasible(), opt.is_feasible());
        match &opt {
            LpOutcome::Optimal { value, point, duals } => {
                prop_assert!(verify_point(&s, point));
                prop_assert!(duals_certify(&s, &obj, sense, value, duals));
            }
            LpOutcome::Infeasible { farkas } => prop_assert!(verify_farkas(&s, farkas)),
            LpOutcome::Unbounded { point, ray } => {
                prop_assert!(verify_point(&s, point));
                prop_assert!(verify_ray(&s, &obj, sense, ray));
            }
            LpOutcome::Feasible { .. } => prop_assert!(false, "optimization returned bare feasibility"),
        }
    }

    #[test]
    fn solver_is_deterministic((s, obj, sense) in arb_system()) {
        prop_assert_eq!(solve(&s, Some(&obj), sense).unwrap(), solve(&s, Some(&obj), sense).unwrap());
    }
}
