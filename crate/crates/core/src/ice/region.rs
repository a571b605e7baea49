//! Exact payoff regions for two-player environments.
//!
//! Each region is the image of a polytope under the linear payoff map. A fan
//! of directions seeds the vertex set; every hull edge is then probed along
//! its outward normal, and a strictly better support point splits the edge.
//! The loop ends with every edge confirmed, so the hull is exact.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::system::build_support_system;
use super::{worst_punishment, PunishmentMode};
use crate::env::{ActionSubspace, Environment, ThreatSpace};
use crate::error::{Error, Result};
use crate::lp::{self, LinearSystem, LpOutcome, Relation, Sense};
use crate::rational::{int, one, rat, Rational};

pub type Point = (Rational, Rational);

fn cross(o: &Point, a: &Point, b: &Point) -> Rational {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Strictly convex hull, counterclockwise, lexicographically least vertex
/// first. Collinear and duplicate points are dropped.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= Rational::zero() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= Rational::zero() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Direction `k` of `count` spread around the boundary of `[-1,1]²`.
fn fan_direction(k: usize, count: usize) -> Point {
    let t = rat(8 * k as i64, count as i64);
    let two = int(2);
    if t < two {
        (one(), t - one())
    } else if t < int(4) {
        (int(3) - t, one())
    } else if t < int(6) {
        (-one(), int(5) - t)
    } else {
        (t - int(7), -one())
    }
}

struct Projection<'a> {
    system: &'a LinearSystem,
    payoffs: Vec<Point>,
}

impl Projection<'_> {
    fn support(&self, d: &Point) -> Result<Option<(Rational, Point)>> {
        let obj: Vec<Rational> = self.payoffs.iter().map(|(x, y)| &d.0 * x + &d.1 * y).collect();
        match lp::solve(self.system, Some(&obj), Sense::Maximize)? {
            LpOutcome::Optimal { value, point, .. } => {
                let mut p = (Rational::zero(), Rational::zero());
                for (x, (u1, u2)) in point.iter().zip(&self.payoffs) {
                    if !x.is_zero() {
                        p.0 += x * u1;
                        p.1 += x * u2;
                    }
                }
                Ok(Some((value, p)))
            }
            LpOutcome::Infeasible { .. } => Ok(None),
            other => Err(Error::Internal(format!("payoff projection returned {other:?}"))),
        }
    }

    fn vertices(&self, resolution: usize) -> Result<Vec<Point>> {
        let count = resolution.max(4);
        let mut points = Vec::new();
        for k in 0..count {
            match self.support(&fan_direction(k, count))? {
                Some((_, p)) => points.push(p),
                None => return Ok(Vec::new()),
            }
        }
        let mut confirmed: BTreeSet<(Point, Point)> = BTreeSet::new();
        loop {
            let hull = convex_hull(&points);
            if hull.len() < 2 {
                return Ok(hull);
            }
            let mut split = false;
            for k in 0..hull.len() {
                let p = &hull[k];
                let q = &hull[(k + 1) % hull.len()];
                let edge = (p.clone(), q.clone());
                if confirmed.contains(&edge) {
                    continue;
                }
                let normal = (&q.1 - &p.1, &p.0 - &q.0);
                let (value, v) = self
                    .support(&normal)?
                    .ok_or_else(|| Error::Internal("region became empty".into()))?;
                let on_edge = &normal.0 * &p.0 + &normal.1 * &p.1;
                if value > on_edge {
                    points.push(v);
                    split = true;
                    break;
                }
                confirmed.insert(edge);
            }
            if !split {
                return Ok(hull);
            }
        }
    }
}

fn require_two_players(env: &Environment) -> Result<()> {
    if env.num_players() != 2 {
        return Err(Error::Unsupported(format!(
            "payoff regions are drawn for two players, environment has {}",
            env.num_players()
        )));
    }
    Ok(())
}

fn require_full_threats(env: &Environment, threats: &ThreatSpace) -> Result<()> {
    if !threats.base().is_full(env) {
        return Err(Error::Unsupported(
            "support-enumeration required: with restricted threats the region is not one polytope; \
             solve is_ice_variable per support instead"
                .into(),
        ));
    }
    Ok(())
}

fn payoff_pair(env: &Environment, profile: usize) -> Point {
    (env.payoff_at(profile, 0).clone(), env.payoff_at(profile, 1).clone())
}

/// Vertices of the ICE payoff region (threats must be all of `A`).
pub fn ice_payoff_region(
    env: &Environment,
    threats: &ThreatSpace,
    mode: PunishmentMode,
    resolution: usize,
) -> Result<Vec<Point>> {
    require_two_players(env)?;
    require_full_threats(env, threats)?;
    let full = ActionSubspace::full(env);
    let ice = build_support_system(env, &full, threats, mode)?;
    let mut payoffs = Vec::with_capacity(ice.num_gamma());
    for &p in &ice.profiles {
        for _ in 0..ice.num_orderings {
            payoffs.push(payoff_pair(env, p));
        }
    }
    Projection {
        system: &ice.system,
        payoffs,
    }
    .vertices(resolution)
}

fn alpha_system(env: &Environment, row: impl Fn(usize, usize, usize, usize) -> Result<Rational>) -> Result<LinearSystem> {
    let mut sys = LinearSystem::new();
    for p in 0..env.num_profiles() {
        sys.add_variable(format!("a{p}"), true);
    }
    for i in 0..env.num_players() {
        for rec in 0..env.num_actions(i) {
            for dev in 0..env.num_actions(i) {
                let mut coeffs = vec![Rational::zero(); env.num_profiles()];
                for a in env.profiles().filter(|a| a[i] == rec) {
                    let p = env.index_of(&a);
                    coeffs[p] = row(i, rec, dev, p)?;
                }
                sys.add_constraint(coeffs, Relation::Ge, Rational::zero());
            }
        }
    }
    sys.add_constraint(vec![one(); env.num_profiles()], Relation::Eq, one());
    Ok(sys)
}

/// Vertices of the correlated-equilibrium payoff region.
pub fn ce_payoff_region(env: &Environment, resolution: usize) -> Result<Vec<Point>> {
    require_two_players(env)?;
    let sys = alpha_system(env, |i, _rec, dev, p| {
        let a = env.profile_at(p);
        Ok(env.payoff(i, &a) - env.payoff(i, &a.with(i, dev)))
    })?;
    let payoffs = (0..env.num_profiles()).map(|p| payoff_pair(env, p)).collect();
    Projection { system: &sys, payoffs }.vertices(resolution)
}

/// Vertices of the interim individually rational payoff region (threats
/// must be all of `A`).
pub fn ir_payoff_region(
    env: &Environment,
    threats: &ThreatSpace,
    mode: PunishmentMode,
    resolution: usize,
) -> Result<Vec<Point>> {
    require_two_players(env)?;
    require_full_threats(env, threats)?;
    let full = ActionSubspace::full(env);
    let sys = alpha_system(env, |i, rec, dev, p| {
        Ok(env.payoff_at(p, i) - worst_punishment(env, i, rec, dev, &full, mode)?)
    })?;
    let payoffs = (0..env.num_profiles()).map(|p| payoff_pair(env, p)).collect();
    Projection { system: &sys, payoffs }.vertices(resolution)
}

/// Convex hull of the pure Nash equilibrium payoffs.
pub fn nash_pure_hull(env: &Environment) -> Result<Vec<Point>> {
    require_two_players(env)?;
    let pts: Vec<Point> = env
        .pure_nash_profiles()
        .iter()
        .map(|a| payoff_pair(env, env.index_of(a)))
        .collect();
    Ok(convex_hull(&pts))
}
