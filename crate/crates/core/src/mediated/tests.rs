use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::Rng;

use super::*;
use crate::catalog::{chicken, constant_game, prisoners_dilemma_int};
use crate::env::ActionProfile;
use crate::ice::{build_ice_system, is_ice, PunishmentMode, Slice};
use crate::rational::{int, rat};

fn uniform_mech(env: &Environment, alpha: &JointDistribution, threats: &ThreatSpace) -> MediatedMechanism {
    let theta = OrderingDistribution::uniform(env, alpha);
    MediatedMechanism::build(env, alpha, &theta, threats).unwrap()
}

fn pd_cooperate(temptation: i64) -> (Environment, JointDistribution) {
    let g = prisoners_dilemma_int(0, 1, 3, temptation);
    let cc = JointDistribution::point_mass(&g, &[0, 0]).unwrap();
    (g, cc)
}

#[test]
fn punishment_examples() {
    let (g, cc) = pd_cooperate(4);
    let mech = uniform_mech(&g, &cc, &ThreatSpace::all(&g));
    assert_eq!(mech.first_mover_punishment(0, 1).unwrap(), 1);
    assert_eq!(mech.first_mover_punishment(1, 1).unwrap(), 1);

    let ch = chicken();
    let ww = JointDistribution::point_mass(&ch, &[1, 1]).unwrap();
    let mech = uniform_mech(&ch, &ww, &ThreatSpace::all(&ch));
    assert_eq!(mech.first_mover_punishment(0, 0).unwrap(), 0);

    // Only W is a threat: the punisher has nothing else.
    let mech = uniform_mech(&ch, &ww, &ThreatSpace::none(&ch));
    assert_eq!(mech.first_mover_punishment(0, 0).unwrap(), 1);
}

#[test]
fn ties_pick_the_lowest_index() {
    let g = constant_game(&[2, 3], int(1));
    let alpha = JointDistribution::point_mass(&g, &[0, 2]).unwrap();
    let mech = uniform_mech(&g, &alpha, &ThreatSpace::all(&g));
    assert_eq!(mech.first_mover_punishment(0, 1).unwrap(), 0);
}

#[test]
fn missing_order_is_an_error() {
    let (g, cc) = pd_cooperate(4);
    let theta = OrderingDistribution::new(2);
    assert!(matches!(
        MediatedMechanism::build(&g, &cc, &theta, &ThreatSpace::all(&g)),
        Err(Error::MissingOrdering(0))
    ));
}

#[test]
fn deviation_payoff_examples() {
    let (g, cc) = pd_cooperate(4);
    let mech = uniform_mech(&g, &cc, &ThreatSpace::all(&g));
    let confess = DeviationStrategy(vec![1, 1]);
    assert_eq!(mech.deviation_payoff(0, &confess).unwrap(), rat(5, 2));
    assert_eq!(mech.deviation_payoff(0, &DeviationStrategy::compliant(2)).unwrap(), int(3));
    let check = mech.is_nash().unwrap();
    assert!(check.holds);
    assert_eq!(check.players[0].strategies, 4);

    let (g, cc) = pd_cooperate(6);
    let mech = uniform_mech(&g, &cc, &ThreatSpace::all(&g));
    assert_eq!(mech.deviation_payoff(0, &confess).unwrap(), rat(7, 2));
    let check = mech.is_nash().unwrap();
    assert!(!check.holds);
    // C ↦ D; the recommendation D is never received, so any play there ties.
    assert_eq!(check.players[0].best.0[0], 1);
    assert_eq!(check.players[0].gain(), rat(1, 2));
}

#[test]
fn compliance_is_the_expected_payoff() {
    let ch = chicken();
    let alpha = JointDistribution::uniform(&ch);
    let mech = uniform_mech(&ch, &alpha, &ThreatSpace::all(&ch));
    for i in 0..2 {
        assert_eq!(
            mech.deviation_payoff(i, &DeviationStrategy::compliant(2)).unwrap(),
            alpha.expected_payoff(&ch, i)
        );
    }
}

#[test]
fn pure_nash_needs_no_punishment() {
    let ch = chicken();
    let sw = JointDistribution::point_mass(&ch, &[0, 1]).unwrap();
    let mut theta = OrderingDistribution::new(2);
    theta.set_first_mover(ch.index_of(&[0, 1]), [rat(1, 7), rat(6, 7)]).unwrap();
    let mech = MediatedMechanism::build(&ch, &sw, &theta, &ThreatSpace::none(&ch)).unwrap();
    assert!(mech.is_nash().unwrap().holds);
}

#[test]
fn simulation_examples() {
    let (g, cc) = pd_cooperate(4);
    let mech = uniform_mech(&g, &cc, &ThreatSpace::all(&g));
    let sim = mech.simulate(7, 1000, None).unwrap();
    assert_eq!(sim.counts[0], 1000);
    assert_eq!(sim.mean_payoffs, vec![int(3), int(3)]);
    assert_eq!(sim, mech.simulate(7, 1000, None).unwrap());

    let ch = chicken();
    let alpha = JointDistribution::from_entries(&ch, [(ActionProfile::new(vec![0, 1]), rat(1, 2)), (ActionProfile::new(vec![1, 0]), rat(1, 2))]).unwrap();
    let mech = uniform_mech(&ch, &alpha, &ThreatSpace::all(&ch));
    let sim = mech.simulate(11, 10_000, None).unwrap();
    let f = sim.frequency(ch.index_of(&[0, 1]));
    assert!((f - rat(1, 2)).abs() <= rat(5, 100));
    assert_eq!(sim.counts.iter().sum::<u64>(), 10_000);
}

#[test]
fn simulated_deviation_approaches_its_value() {
    let ch = chicken();
    let alpha = JointDistribution::uniform(&ch);
    let mech = uniform_mech(&ch, &alpha, &ThreatSpace::all(&ch));
    let d = DeviationStrategy(vec![1, 0]);
    let exact = mech.deviation_payoff(0, &d).unwrap();
    let sim = mech.simulate(3, 20_000, Some((0, &d))).unwrap();
    assert!((&sim.mean_payoffs[0] - exact).abs() <= rat(1, 10));
}

#[test]
fn draw_follows_cumulative_weights() {
    let w = vec![rat(1, 4), Rational::zero(), rat(3, 4)];
    let mut r = random::rng(0);
    let mut hits = [0u32; 3];
    for _ in 0..4000 {
        hits[draw(&mut r, &w)] += 1;
    }
    assert_eq!(hits[1], 0);
    assert!((900..1100).contains(&hits[0]));
}

/// `γ(a, k) = α(a) θ(k|a)` laid out for `system`.
fn gamma_point(sys: &crate::ice::IceSystem, alpha: &JointDistribution, theta: &OrderingDistribution) -> Vec<Rational> {
    let mut point = vec![Rational::zero(); sys.system.num_variables()];
    for (pos, &p) in sys.profiles.iter().enumerate() {
        if let Some(probs) = theta.get(p) {
            for (k, q) in probs.iter().enumerate() {
                point[sys.var(pos, k)] = alpha.weight(p) * q;
            }
        }
    }
    point
}

/// Gain of the greedy deviation read off the incentive rows: for every
/// recommendation, the worst violated row.
fn row_gain(env: &Environment, alpha: &JointDistribution, theta: &OrderingDistribution, threats: &ThreatSpace, i: usize) -> Rational {
    let sys = build_ice_system(env, Slice::Fixed(alpha), threats, PunishmentMode::WorstInThreats).unwrap();
    let values = sys.incentive_values(&gamma_point(&sys, alpha, theta));
    (0..env.num_actions(i))
        .map(|rec| {
            values
                .iter()
                .filter(|(p, r, _, _)| *p == i && *r == rec)
                .map(|(_, _, _, v)| -v.clone())
                .fold(Rational::zero(), |m, v| if v > m { v } else { m })
        })
        .sum()
}

fn random_theta(rng: &mut impl Rng, env: &Environment, alpha: &JointDistribution) -> OrderingDistribution {
    let mut theta = OrderingDistribution::new(env.num_players());
    let k = theta.orderings().len();
    for p in alpha.support_indices() {
        let raw: Vec<i64> = (0..k).map(|_| rng.random_range(0..=4)).collect();
        let total: i64 = raw.iter().sum();
        let probs = if total == 0 {
            let mut v = vec![Rational::zero(); k];
            v[0] = Rational::one();
            v
        } else {
            raw.iter().map(|&x| rat(x, total)).collect()
        };
        theta.set(p, probs).unwrap();
    }
    theta
}

/// Every θ that puts all weight on one order at each supported profile.
fn degenerate_thetas(env: &Environment, alpha: &JointDistribution) -> Vec<OrderingDistribution> {
    let support = alpha.support_indices();
    let k = OrderingDistribution::new(env.num_players()).orderings().len();
    let lists = vec![(0..k).collect::<Vec<usize>>(); support.len()];
    crate::env::cartesian(&lists)
        .into_iter()
        .map(|choice| {
            let mut theta = OrderingDistribution::new(env.num_players());
            for (&p, &c) in support.iter().zip(&choice) {
                let mut v = vec![Rational::zero(); k];
                v[c] = Rational::one();
                theta.set(p, v).unwrap();
            }
            theta
        })
        .collect()
}

#[test]
fn three_player_mechanism_matches_rows() {
    let mut r = random::rng(5);
    let env = random::game(&mut r, &[2, 2, 2], -3, 3);
    let threats = ThreatSpace::all(&env);
    for _ in 0..4 {
        let alpha = random::distribution(&mut r, &env, 4);
        let theta = random_theta(&mut r, &env, &alpha);
        let mech = MediatedMechanism::build(&env, &alpha, &theta, &threats).unwrap();
        let check = mech.is_nash().unwrap();
        for i in 0..3 {
            assert_eq!(check.players[i].gain(), row_gain(&env, &alpha, &theta, &threats, i));
        }
    }
}

#[test]
fn three_player_punishers_minimize_jointly() {
    // Player 0 deviates first; players 1 and 2 jointly pick the minimizer.
    let names = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let env = Environment::from_fn(names(&["1", "2", "3"]), vec![names(&["x", "y"]); 3], |p| {
        let v = match (p[0], p[1], p[2]) {
            (1, 0, 1) => -4,
            (1, 1, 0) => -2,
            _ => 1,
        };
        vec![int(v), int(0), int(0)]
    })
    .unwrap();
    let alpha = JointDistribution::point_mass(&env, &[0, 0, 0]).unwrap();
    let mech = uniform_mech(&env, &alpha, &ThreatSpace::all(&env));
    assert_eq!(mech.punishment(0, 1, &[None, None, None]).unwrap(), vec![0, 1]);
    // After player 1 complied, only player 2 punishes.
    assert_eq!(mech.punishment(0, 1, &[None, Some(0), None]).unwrap(), vec![1]);
    assert_eq!(mech.punishment(0, 1, &[None, Some(1), None]).unwrap(), vec![0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn lp_and_mechanism_agree(seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let env = random::bimatrix_game(&mut r, 3, -5, 5);
        let alpha = random::distribution(&mut r, &env, 6);
        let threats = ThreatSpace::all(&env);
        let cert = is_ice(&env, &alpha, &threats, PunishmentMode::WorstInThreats).unwrap();
        prop_assert!(cert.verify(&env, &alpha));
        if cert.verdict {
            let theta = cert.theta(&env).unwrap();
            let mech = MediatedMechanism::build(&env, &alpha, &theta, &threats).unwrap();
            prop_assert!(mech.is_nash().unwrap().holds);
        } else {
            let mut thetas: Vec<_> = (0..10).map(|_| random_theta(&mut r, &env, &alpha)).collect();
            if alpha.support_indices().len() <= 5 {
                thetas.extend(degenerate_thetas(&env, &alpha));
            }
            for theta in thetas {
                let mech = MediatedMechanism::build(&env, &alpha, &theta, &threats).unwrap();
                prop_assert!(!mech.is_nash().unwrap().holds);
            }
        }
    }

    #[test]
    fn greedy_gain_equals_row_violation(seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let env = random::bimatrix_game(&mut r, 3, -5, 5);
        let alpha = random::distribution(&mut r, &env, 6);
        let threats = ThreatSpace::new(random::subspace(&mut r, &env));
        let theta = random_theta(&mut r, &env, &alpha);
        let mech = MediatedMechanism::build(&env, &alpha, &theta, &threats).unwrap();
        let check = mech.is_nash().unwrap();
        for i in 0..2 {
            let (greedy, value) = mech.greedy_deviation(i).unwrap();
            prop_assert_eq!(&value, &check.players[i].best_value);
            prop_assert_eq!(mech.deviation_payoff(i, &greedy).unwrap(), value);
            prop_assert_eq!(check.players[i].gain(), row_gain(&env, &alpha, &theta, &threats, i));
        }
    }

    #[test]
    fn effective_threats_cover_the_support(seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let env = random::bimatrix_game(&mut r, 3, -5, 5);
        let alpha = random::distribution(&mut r, &env, 6);
        let threats = ThreatSpace::new(random::subspace(&mut r, &env));
        let mech = uniform_mech(&env, &alpha, &threats);
        prop_assert!(alpha.support_subspace(&env).is_subset(mech.effective_threats()));
        for ((i, dev, prev), resp) in mech.punishment_table() {
            let o = 1 - i;
            prop_assert!(prev.iter().all(Option::is_none));
            prop_assert!(mech.effective_threats().contains(o, resp[0]));
            let mut p = vec![0; 2];
            p[*i] = *dev;
            let chosen = {
                p[o] = resp[0];
                env.payoff(*i, &p).clone()
            };
            for &b in mech.effective_threats().component(o) {
                p[o] = b;
                prop_assert!(env.payoff(*i, &p) >= &chosen);
            }
        }
    }
}
