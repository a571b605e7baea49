//! Exact rational linear programming.
//!
//! [`solve`] runs a dense two-phase simplex with Bland's least-index rule, so
//! it terminates on degenerate systems. Every verdict carries a certificate
//! stated against the caller's original constraint list:
//!
//! * feasible and optimal outcomes return a point (and, when optimizing, dual
//!   multipliers whose weighted right-hand side equals the optimum);
//! * infeasible outcomes return Farkas multipliers, one per constraint, for
//!   the constraints rewritten as `coeffs·x ≥ rhs` (`≤` rows negated). The
//!   multipliers are nonnegative on inequality rows and unrestricted on
//!   equality rows, and combine into `c·x ≥ d` with `c_j ≤ 0` on nonnegative
//!   variables, `c_j = 0` on free ones and `d > 0`.
//!
//! [`verify_point`] and [`verify_farkas`] re-check those certificates from
//! scratch without touching solver state.

mod simplex;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn lhs(&self, point: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .zip(point)
            .filter(|(c, _)| !c.is_zero())
            .fold(Rational::zero(), |acc, (c, x)| acc + c * x)
    }
}

/// Variables (with names and sign restrictions) plus a list of linear
/// constraints over them.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearSystem {
    names: Vec<String>,
    nonneg: Vec<bool>,
    constraints: Vec<Constraint>,
}

impl LinearSystem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable and pads every existing constraint with a zero
    /// coefficient for it.
    pub fn add_variable(&mut self, name: impl Into<String>, nonneg: bool) -> usize {
        self.names.push(name.into());
        self.nonneg.push(nonneg);
        for c in &mut self.constraints {
            c.coeffs.push(Rational::zero());
        }
        self.names.len() - 1
    }

    /// Adds a dense constraint. Lengths are checked by [`LinearSystem::validate`]
    /// and [`solve`].
    pub fn add_constraint(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> usize {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    /// Adds a constraint from `(variable, coefficient)` terms; repeated
    /// variables accumulate.
    pub fn add_sparse(&mut self, terms: &[(usize, Rational)], relation: Relation, rhs: Rational) -> usize {
        let mut coeffs = vec![Rational::zero(); self.names.len()];
        for (j, c) in terms {
            coeffs[*j] += c;
        }
        self.add_constraint(coeffs, relation, rhs)
    }

    pub fn num_variables(&self) -> usize {
        self.names.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn variable_names(&self) -> &[String] {
        &self.names
    }

    pub fn is_nonneg(&self, j: usize) -> bool {
        self.nonneg[j]
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.names.len();
        for (k, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "constraint {k} has {} coefficients for {n} variables",
                    c.coeffs.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    /// `duals[r]` prices constraint `r` so that `Σ duals·rhs == value`.
    Optimal {
        value: Rational,
        point: Vec<Rational>,
        duals: Vec<Rational>,
    },
    Feasible {
        point: Vec<Rational>,
    },
    Infeasible {
        farkas: Vec<Rational>,
    },
    /// `point + t·ray` is feasible for all `t ≥ 0` and improves the objective
    /// without bound.
    Unbounded {
        point: Vec<Rational>,
        ray: Vec<Rational>,
    },
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible { .. })
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { point, .. }
            | LpOutcome::Feasible { point }
            | LpOutcome::Unbounded { point, .. } => Some(point),
            LpOutcome::Infeasible { .. } => None,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn farkas(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Infeasible { farkas } => Some(farkas),
            _ => None,
        }
    }
}

/// Solves `system`, optimizing `objective` in direction `sense` when given and
/// deciding feasibility otherwise.
pub fn solve(system: &LinearSystem, objective: Option<&[Rational]>, sense: Sense) -> Result<LpOutcome> {
    system.validate()?;
    if let Some(c) = objective {
        if c.len() != system.num_variables() {
            return Err(Error::DimensionMismatch(format!(
                "objective has {} coefficients for {} variables",
                c.len(),
                system.num_variables()
            )));
        }
    }
    Ok(simplex::run(system, objective, sense))
}

/// Checks a point against every constraint and sign restriction.
pub fn verify_point(system: &LinearSystem, point: &[Rational]) -> bool {
    if point.len() != system.num_variables() {
        return false;
    }
    if (0..point.len()).any(|j| system.nonneg[j] && point[j].is_negative()) {
        return false;
    }
    system
        .constraints
        .iter()
        .all(|c| c.coeffs.len() == point.len() && c.relation.holds(&c.lhs(point), &c.rhs))
}

/// Checks that `multipliers` prove `system` infeasible (see module docs for
/// the orientation convention).
pub fn verify_farkas(system: &LinearSystem, multipliers: &[Rational]) -> bool {
    if multipliers.len() != system.num_constraints() || system.validate().is_err() {
        return false;
    }
    let n = system.num_variables();
    let mut combined = vec![Rational::zero(); n];
    let mut rhs = Rational::zero();
    for (c, y) in system.constraints.iter().zip(multipliers) {
        if y.is_zero() {
            continue;
        }
        let y = match c.relation {
            Relation::Ge => {
                if y.is_negative() {
                    return false;
                }
                y.clone()
            }
            Relation::Le => {
                if y.is_negative() {
                    return false;
                }
                -y.clone()
            }
            Relation::Eq => y.clone(),
        };
        for (acc, a) in combined.iter_mut().zip(&c.coeffs) {
            if !a.is_zero() {
                *acc += &y * a;
            }
        }
        rhs += &y * &c.rhs;
    }
    let coeffs_ok = combined.iter().enumerate().all(|(j, c)| {
        if system.nonneg[j] {
            !c.is_positive()
        } else {
            c.is_zero()
        }
    });
    coeffs_ok && rhs.is_positive()
}

/// Checks that `ray` is a recession direction of `system` that strictly
/// improves `objective`.
pub fn verify_ray(system: &LinearSystem, objective: &[Rational], sense: Sense, ray: &[Rational]) -> bool {
    if ray.len() != system.num_variables() || objective.len() != ray.len() {
        return false;
    }
    if (0..ray.len()).any(|j| system.nonneg[j] && ray[j].is_negative()) {
        return false;
    }
    let zero = Rational::zero();
    let homogeneous = system
        .constraints
        .iter()
        .all(|c| c.relation.holds(&c.lhs(ray), &zero));
    let gain = objective
        .iter()
        .zip(ray)
        .fold(Rational::zero(), |acc, (c, d)| acc + c * d);
    homogeneous
        && match sense {
            Sense::Maximize => gain.is_positive(),
            Sense::Minimize => gain.is_negative(),
        }
}

#[cfg(test)]
mod tests;
