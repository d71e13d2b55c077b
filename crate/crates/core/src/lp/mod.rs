//! Small dense linear programs.
//!
//! [`LinearProgram`] is a minimization with row constraints and per-variable
//! bounds. [`solve`] converts it to standard form and runs the two-phase
//! simplex in [`simplex`]; the returned [`LpSolution`] carries row duals so
//! that optimality can be certified independently with
//! [`verify_certificate`].

mod builder;
mod format;
mod simplex;

pub use builder::{AffineExpr, LpBuilder, Var};
pub use format::to_lp_format;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use simplex::{solve_standard, Outcome, StandardForm};

pub const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `min c^T x + c0` subject to the rows and `lower <= x <= upper`.
///
/// `lower` may be `-inf`; `upper` may be `+inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub objective_constant: f64,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub names: Vec<String>,
}

impl LinearProgram {
    /// An LP with `n` variables, zero objective, bounds `[0, inf)`.
    pub fn new(n: usize) -> Self {
        Self {
            num_vars: n,
            objective: vec![0.0; n],
            objective_constant: 0.0,
            constraints: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
            names: (0..n).map(|j| format!("x{j}")).collect(),
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) {
        self.constraints.push(Constraint { coeffs, sense, rhs });
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars;
        if self.objective.len() != n || self.lower.len() != n || self.upper.len() != n || self.names.len() != n {
            return Err(Error::Lp("objective/bounds length differs from num_vars".into()));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::Lp(format!("row {i} has {} coefficients, expected {n}", c.coeffs.len())));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
                return Err(Error::Lp(format!("row {i} has non-finite data")));
            }
        }
        for j in 0..n {
            if self.lower[j] == f64::INFINITY || self.upper[j] == f64::NEG_INFINITY || self.lower[j].is_nan() || self.upper[j].is_nan() {
                return Err(Error::Lp(format!("variable {j} has invalid bounds")));
            }
            if !self.objective[j].is_finite() {
                return Err(Error::Lp(format!("variable {j} has a non-finite cost")));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective_constant + dot(&self.objective, x)
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut v = 0.0f64;
        for c in &self.constraints {
            let lhs = dot(&c.coeffs, x);
            let e = match c.sense {
                Sense::Le => lhs - c.rhs,
                Sense::Ge => c.rhs - lhs,
                Sense::Eq => (lhs - c.rhs).abs(),
            };
            v = v.max(e);
        }
        for j in 0..self.num_vars {
            v = v.max(self.lower[j] - x[j]).max(x[j] - self.upper[j]);
        }
        v
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub value: f64,
    /// One multiplier per row; `>= 0` on `Ge` rows and `<= 0` on `Le` rows.
    pub duals: Vec<f64>,
}

enum VarMap {
    Shift { col: usize, lo: f64 },
    Neg { col: usize, hi: f64 },
    Split { pos: usize, neg: usize },
}

/// Solves the LP. Infeasible and unbounded programs are reported through
/// [`LpStatus`], not as errors.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_vars;

    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0;
    for j in 0..n {
        let (lo, hi) = (lp.lower[j], lp.upper[j]);
        maps.push(if lo.is_finite() {
            ncols += 1;
            VarMap::Shift { col: ncols - 1, lo }
        } else if hi.is_finite() {
            ncols += 1;
            VarMap::Neg { col: ncols - 1, hi }
        } else {
            ncols += 2;
            VarMap::Split { pos: ncols - 2, neg: ncols - 1 }
        });
    }

    // rows: (coefficients over structural columns, sense, rhs, sign flip)
    let mut rows: Vec<(Vec<f64>, Sense, f64)> = Vec::new();
    let lower_row = |coeffs: &[f64], rhs: f64| -> (Vec<f64>, f64) {
        let mut a = vec![0.0; ncols];
        let mut b = rhs;
        for (j, &v) in coeffs.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Shift { col, lo } => {
                    a[col] += v;
                    b -= v * lo;
                }
                VarMap::Neg { col, hi } => {
                    a[col] -= v;
                    b -= v * hi;
                }
                VarMap::Split { pos, neg } => {
                    a[pos] += v;
                    a[neg] -= v;
                }
            }
        }
        (a, b)
    };
    for c in &lp.constraints {
        let (a, b) = lower_row(&c.coeffs, c.rhs);
        rows.push((a, c.sense, b));
    }
    let n_orig_rows = rows.len();
    for j in 0..n {
        if let VarMap::Shift { col, lo } = maps[j] {
            if lp.upper[j].is_finite() {
                let mut a = vec![0.0; ncols];
                a[col] = 1.0;
                rows.push((a, Sense::Le, lp.upper[j] - lo));
            }
        }
    }

    let mut cost = vec![0.0; ncols];
    let mut c0 = lp.objective_constant;
    for j in 0..n {
        let v = lp.objective[j];
        match maps[j] {
            VarMap::Shift { col, lo } => {
                cost[col] += v;
                c0 += v * lo;
            }
            VarMap::Neg { col, hi } => {
                cost[col] -= v;
                c0 += v * hi;
            }
            VarMap::Split { pos, neg } => {
                cost[pos] += v;
                cost[neg] -= v;
            }
        }
    }

    // make b >= 0, then add slack / surplus / artificial columns
    let m = rows.len();
    let mut flip = vec![1.0; m];
    for (i, r) in rows.iter_mut().enumerate() {
        if r.2 < 0.0 {
            flip[i] = -1.0;
            r.0.iter_mut().for_each(|v| *v = -*v);
            r.2 = -r.2;
            r.1 = match r.1 {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }
    let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
    let total = ncols + n_slack + n_art;
    let mut a = vec![vec![0.0; total]; m];
    let mut identity_col = vec![0; m];
    let mut artificial = vec![false; total];
    let mut next = ncols;
    for (i, r) in rows.iter().enumerate() {
        a[i][..ncols].copy_from_slice(&r.0);
        match r.1 {
            Sense::Le => {
                a[i][next] = 1.0;
                identity_col[i] = next;
                next += 1;
            }
            Sense::Ge => {
                a[i][next] = -1.0;
                next += 1;
            }
            Sense::Eq => {}
        }
    }
    for (i, r) in rows.iter().enumerate() {
        if r.1 != Sense::Le {
            a[i][next] = 1.0;
            identity_col[i] = next;
            artificial[next] = true;
            next += 1;
        }
    }
    cost.resize(total, 0.0);
    let sf = StandardForm { a, b: rows.iter().map(|r| r.2).collect(), c: cost, identity_col, artificial };

    match solve_standard(&sf)? {
        Outcome::Infeasible => Ok(LpSolution { status: LpStatus::Infeasible, x: vec![], value: f64::NAN, duals: vec![] }),
        Outcome::Unbounded => Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: vec![],
            value: f64::NEG_INFINITY,
            duals: vec![],
        }),
        Outcome::Optimal { z, y } => {
            let x: Vec<f64> = maps
                .iter()
                .map(|mp| match *mp {
                    VarMap::Shift { col, lo } => lo + z[col],
                    VarMap::Neg { col, hi } => hi - z[col],
                    VarMap::Split { pos, neg } => z[pos] - z[neg],
                })
                .collect();
            let duals = (0..n_orig_rows).map(|i| flip[i] * y[i]).collect();
            let value = lp.objective_value(&x);
            debug_assert!((value - (c0 + dot(&sf.c, &z))).abs() <= 1e-7 * (1.0 + value.abs()));
            Ok(LpSolution { status: LpStatus::Optimal, x, value, duals })
        }
    }
}

/// Outcome of checking a primal/dual pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub primal_value: f64,
    pub dual_value: f64,
    pub primal_violation: f64,
    /// Worst sign violation of the row duals, or of a reduced cost pushing
    /// against an infinite bound.
    pub dual_violation: f64,
    /// Worst product of a nonzero multiplier with its constraint's slack.
    pub complementarity: f64,
}

impl Certificate {
    pub fn holds(&self, tol: f64) -> bool {
        (self.primal_value - self.dual_value).abs() <= tol * (1.0 + self.primal_value.abs())
            && self.primal_violation <= FEAS_TOL * 10.0
            && self.dual_violation <= tol
            && self.complementarity <= tol
    }
}

/// Rebuilds the dual objective from the row multipliers in `sol`, with
/// reduced costs `d = c - A^T y` priced at whichever bound they push against.
pub fn verify_certificate(lp: &LinearProgram, sol: &LpSolution) -> Result<Certificate> {
    if sol.status != LpStatus::Optimal {
        return Err(Error::Lp("certificate requested for a non-optimal solution".into()));
    }
    let n = lp.num_vars;
    let y = &sol.duals;
    let mut dual_violation = 0.0f64;
    let mut complementarity = 0.0f64;
    let mut dual_value = lp.objective_constant;
    for (c, &yi) in lp.constraints.iter().zip(y) {
        dual_violation = dual_violation.max(match c.sense {
            Sense::Ge => -yi,
            Sense::Le => yi,
            Sense::Eq => 0.0,
        });
        dual_value += c.rhs * yi;
        let slack = dot(&c.coeffs, &sol.x) - c.rhs;
        complementarity = complementarity.max((yi * slack).abs());
    }
    let scale = lp.objective.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    for j in 0..n {
        let mut d = lp.objective[j];
        for (c, &yi) in lp.constraints.iter().zip(y) {
            d -= c.coeffs[j] * yi;
        }
        if d.abs() <= 1e-11 * scale {
            continue;
        }
        let bound = if d > 0.0 { lp.lower[j] } else { lp.upper[j] };
        if bound.is_finite() {
            dual_value += d * bound;
            complementarity = complementarity.max((d * (sol.x[j] - bound)).abs());
        } else {
            dual_violation = dual_violation.max(d.abs());
        }
    }
    Ok(Certificate {
        primal_value: sol.value,
        dual_value,
        primal_violation: lp.max_violation(&sol.x),
        dual_violation,
        complementarity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_x_ge_one() {
        let mut lp = LinearProgram::new(1);
        lp.objective[0] = 1.0;
        lp.add_row(vec![1.0], Sense::Ge, 1.0);
        let s = solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!(verify_certificate(&lp, &s).unwrap().holds(1e-7));
    }

    #[test]
    fn sum_constraint_with_upper_bound() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, 1.0];
        lp.add_row(vec![1.0, 1.0], Sense::Ge, 2.0);
        lp.add_row(vec![1.0, 0.0], Sense::Le, 0.5);
        let s = solve(&lp).unwrap();
        assert!((s.value - 2.0).abs() < 1e-12);
        assert!(lp.max_violation(&s.x) < 1e-12);
        assert!(verify_certificate(&lp, &s).unwrap().holds(1e-7));
    }

    #[test]
    fn statuses() {
        let mut inf = LinearProgram::new(1);
        inf.add_row(vec![1.0], Sense::Le, -1.0);
        assert_eq!(solve(&inf).unwrap().status, LpStatus::Infeasible);

        let mut unb = LinearProgram::new(1);
        unb.objective[0] = -1.0;
        assert_eq!(solve(&unb).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_and_negative_bounds() {
        // min x - y, x free with x >= -3 via a row, y <= 2 with y free below
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, -1.0];
        lp.lower = vec![f64::NEG_INFINITY, f64::NEG_INFINITY];
        lp.upper = vec![f64::INFINITY, 2.0];
        lp.add_row(vec![1.0, 0.0], Sense::Ge, -3.0);
        lp.add_row(vec![1.0, 1.0], Sense::Eq, 0.5);
        let s = solve(&lp).unwrap();
        // x = 0.5 - y, value = 0.5 - 2y, y as large as possible: y = 2 -> x = -1.5
        assert!((s.value - (-3.5)).abs() < 1e-12, "{:?}", s);
        assert!(verify_certificate(&lp, &s).unwrap().holds(1e-7));
    }

    #[test]
    fn degenerate_redundant_rows() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, 2.0];
        lp.add_row(vec![1.0, 1.0], Sense::Eq, 1.0);
        lp.add_row(vec![2.0, 2.0], Sense::Eq, 2.0);
        lp.add_row(vec![1.0, 1.0], Sense::Ge, 1.0);
        let s = solve(&lp).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!(verify_certificate(&lp, &s).unwrap().holds(1e-7));
    }

    #[test]
    fn rejects_malformed() {
        let mut lp = LinearProgram::new(2);
        lp.add_row(vec![1.0], Sense::Le, 1.0);
        assert!(solve(&lp).is_err());
    }
}
