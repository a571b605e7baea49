//! Dense two-phase tableau.
//!
//! Standard form: every row is scaled so its right-hand side is nonnegative,
//! free variables are split into a positive and a negative column, `≤` rows
//! get a slack, `≥` rows a surplus and an artificial, `=` rows an artificial.
//! Column order is structural, then slack/surplus, then artificial, and
//! Bland's rule picks the least index among both entering and leaving
//! candidates.

use num_traits::{One, Signed, Zero};

use super::{LinearSystem, LpOutcome, Relation, Sense};
use crate::rational::Rational;

struct Layout {
    // (column of x_j+, column of x_j- if free)
    var_cols: Vec<(usize, Option<usize>)>,
    // +1 / -1 scaling applied to each original row
    scale: Vec<Rational>,
    // column holding +e_r in the initial tableau
    unit_col: Vec<usize>,
    first_artificial: usize,
    ncols: usize,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    ncols: usize,
}

enum Phase {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rational {
        &self.rows[r][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r {
                continue;
            }
            let f = row[c].clone();
            if f.is_zero() {
                continue;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// `c_B B^{-1}` applied to column `j`.
    fn priced(&self, cost: &[Rational], j: usize) -> Rational {
        let mut acc = Rational::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() {
                let t = &self.rows[r][j];
                if !t.is_zero() {
                    acc += &cost[b] * t;
                }
            }
        }
        acc
    }

    /// Maximizes `cost` over the current basis using only `allowed` entering
    /// columns.
    fn optimize(&mut self, cost: &[Rational], allowed: &dyn Fn(usize) -> bool) -> Phase {
        loop {
            let entering = (0..self.ncols).find(|&j| {
                allowed(j) && !self.basis.contains(&j) && (&cost[j] - self.priced(cost, j)).is_positive()
            });
            let Some(e) = entering else {
                return Phase::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let t = &self.rows[r][e];
                if !t.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / t;
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, e),
                None => return Phase::Unbounded(e),
            }
        }
    }

    fn basic_values(&self) -> Vec<Rational> {
        let mut z = vec![Rational::zero(); self.ncols];
        for (r, &b) in self.basis.iter().enumerate() {
            z[b] = self.rhs(r).clone();
        }
        z
    }

    /// `c_B B^{-1} e_r` for each row, read off the initial unit columns.
    fn row_prices(&self, cost: &[Rational], layout: &Layout) -> Vec<Rational> {
        layout
            .unit_col
            .iter()
            .map(|&k| self.priced(cost, k))
            .collect()
    }
}

fn build(system: &LinearSystem) -> (Tableau, Layout) {
    let n = system.num_variables();
    let mut var_cols = Vec::with_capacity(n);
    let mut col = 0;
    for j in 0..n {
        if system.is_nonneg(j) {
            var_cols.push((col, None));
            col += 1;
        } else {
            var_cols.push((col, Some(col + 1)));
            col += 2;
        }
    }
    let nstruct = col;
    let m = system.num_constraints();
    let mut scale = Vec::with_capacity(m);
    let mut relations = Vec::with_capacity(m);
    for c in system.constraints() {
        let flip = c.rhs.is_negative();
        scale.push(if flip { -Rational::one() } else { Rational::one() });
        relations.push(match (c.relation, flip) {
            (Relation::Eq, _) => Relation::Eq,
            (Relation::Le, false) | (Relation::Ge, true) => Relation::Le,
            (Relation::Ge, false) | (Relation::Le, true) => Relation::Ge,
        });
    }
    let nslack = relations.iter().filter(|r| **r != Relation::Eq).count();
    let nart = relations.iter().filter(|r| **r != Relation::Le).count();
    let first_artificial = nstruct + nslack;
    let ncols = first_artificial + nart;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut unit_col = Vec::with_capacity(m);
    let mut next_slack = nstruct;
    let mut next_art = first_artificial;
    for (r, c) in system.constraints().iter().enumerate() {
        let s = &scale[r];
        let mut row = vec![Rational::zero(); ncols + 1];
        for (j, a) in c.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let v = a * s;
            let (pos, neg) = var_cols[j];
            if let Some(neg) = neg {
                row[neg] = -v.clone();
            }
            row[pos] = v;
        }
        row[ncols] = &c.rhs * s;
        match relations[r] {
            Relation::Le => {
                row[next_slack] = Rational::one();
                basis.push(next_slack);
                unit_col.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -Rational::one();
                next_slack += 1;
                row[next_art] = Rational::one();
                basis.push(next_art);
                unit_col.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = Rational::one();
                basis.push(next_art);
                unit_col.push(next_art);
                next_art += 1;
            }
        }
        rows.push(row);
    }
    (
        Tableau { rows, basis, ncols },
        Layout {
            var_cols,
            scale,
            unit_col,
            first_artificial,
            ncols,
        },
    )
}

fn to_original(z: &[Rational], layout: &Layout) -> Vec<Rational> {
    layout
        .var_cols
        .iter()
        .map(|&(p, n)| match n {
            Some(n) => &z[p] - &z[n],
            None => z[p].clone(),
        })
        .collect()
}

pub(super) fn run(system: &LinearSystem, objective: Option<&[Rational]>, sense: Sense) -> LpOutcome {
    let (mut tab, layout) = build(system);
    let art = layout.first_artificial;

    // Phase 1: maximize -Σ artificials.
    let mut cost1 = vec![Rational::zero(); layout.ncols];
    for c in cost1.iter_mut().skip(art) {
        *c = -Rational::one();
    }
    if art < layout.ncols {
        tab.optimize(&cost1, &|_| true);
        let infeasibility: Rational = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= art)
            .fold(Rational::zero(), |acc, (r, _)| acc + tab.rhs(r));
        if infeasibility.is_positive() {
            // y' = c_B B^{-1} satisfies y'A_j >= 0 on real columns and
            // y'b < 0; v = -y' oriented back to the caller's rows.
            let prices = tab.row_prices(&cost1, &layout);
            let farkas = system
                .constraints()
                .iter()
                .enumerate()
                .map(|(r, c)| {
                    let w = -(&prices[r]) * &layout.scale[r];
                    match c.relation {
                        Relation::Le => -w,
                        Relation::Ge | Relation::Eq => w,
                    }
                })
                .collect();
            return LpOutcome::Infeasible { farkas };
        }
        // Drive zero-level artificials out of the basis where possible; rows
        // with no real nonzero are redundant and stay inert.
        for r in 0..tab.rows.len() {
            if tab.basis[r] < art {
                continue;
            }
            if let Some(j) = (0..art).find(|&j| !tab.rows[r][j].is_zero()) {
                tab.pivot(r, j);
            }
        }
    }

    let Some(objective) = objective else {
        let z = tab.basic_values();
        return LpOutcome::Feasible {
            point: to_original(&z, &layout),
        };
    };

    let mut cost2 = vec![Rational::zero(); layout.ncols];
    for (j, c) in objective.iter().enumerate() {
        let c = match sense {
            Sense::Maximize => c.clone(),
            Sense::Minimize => -c.clone(),
        };
        let (p, n) = layout.var_cols[j];
        if let Some(n) = n {
            cost2[n] = -c.clone();
        }
        cost2[p] = c;
    }
    let phase = tab.optimize(&cost2, &|j| j < art);
    let z = tab.basic_values();
    let point = to_original(&z, &layout);
    match phase {
        Phase::Unbounded(e) => {
            let mut dz = vec![Rational::zero(); layout.ncols];
            dz[e] = Rational::one();
            for (r, &b) in tab.basis.iter().enumerate() {
                let t = &tab.rows[r][e];
                if !t.is_zero() {
                    dz[b] = -t.clone();
                }
            }
            LpOutcome::Unbounded {
                point,
                ray: to_original(&dz, &layout),
            }
        }
        Phase::Optimal => {
            let value = objective
                .iter()
                .zip(&point)
                .fold(Rational::zero(), |acc, (c, x)| acc + c * x);
            let prices = tab.row_prices(&cost2, &layout);
            let duals = prices
                .iter()
                .zip(&layout.scale)
                .map(|(y, s)| match sense {
                    Sense::Maximize => y * s,
                    Sense::Minimize => -(y * s),
                })
                .collect();
            LpOutcome::Optimal {
                value,
                point,
                duals,
            }
        }
    }
}
