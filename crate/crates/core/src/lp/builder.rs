//! Incremental LP construction with exact epigraph handling of positive
//! parts.

use std::ops::{Add, Mul, Neg, Sub};

use super::{LinearProgram, Sense};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

/// `sum_k a_k x_k + constant`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AffineExpr {
    pub terms: Vec<(Var, f64)>,
    pub constant: f64,
}

impl AffineExpr {
    pub fn constant(c: f64) -> Self {
        Self { terms: Vec::new(), constant: c }
    }

    pub fn term(v: Var, a: f64) -> Self {
        Self { terms: vec![(v, a)], constant: 0.0 }
    }

    pub fn plus(mut self, v: Var, a: f64) -> Self {
        self.terms.push((v, a));
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|(v, a)| a * x[v.0]).sum::<f64>()
    }

    fn dense(&self, n: usize) -> Vec<f64> {
        let mut row = vec![0.0; n];
        for (v, a) in &self.terms {
            row[v.0] += a;
        }
        row
    }
}

impl From<Var> for AffineExpr {
    fn from(v: Var) -> Self {
        Self::term(v, 1.0)
    }
}

impl From<f64> for AffineExpr {
    fn from(c: f64) -> Self {
        Self::constant(c)
    }
}

impl<T: Into<AffineExpr>> Add<T> for AffineExpr {
    type Output = AffineExpr;
    fn add(mut self, rhs: T) -> AffineExpr {
        let r = rhs.into();
        self.terms.extend(r.terms);
        self.constant += r.constant;
        self
    }
}

impl<T: Into<AffineExpr>> Sub<T> for AffineExpr {
    type Output = AffineExpr;
    fn sub(self, rhs: T) -> AffineExpr {
        self + (-rhs.into())
    }
}

impl Neg for AffineExpr {
    type Output = AffineExpr;
    fn neg(self) -> AffineExpr {
        self * -1.0
    }
}

impl Mul<f64> for AffineExpr {
    type Output = AffineExpr;
    fn mul(mut self, k: f64) -> AffineExpr {
        self.terms.iter_mut().for_each(|t| t.1 *= k);
        self.constant *= k;
        self
    }
}

impl<T: Into<AffineExpr>> Add<T> for Var {
    type Output = AffineExpr;
    fn add(self, rhs: T) -> AffineExpr {
        AffineExpr::from(self) + rhs
    }
}

impl<T: Into<AffineExpr>> Sub<T> for Var {
    type Output = AffineExpr;
    fn sub(self, rhs: T) -> AffineExpr {
        AffineExpr::from(self) - rhs
    }
}

#[derive(Debug, Clone, Default)]
pub struct LpBuilder {
    names: Vec<String>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    objective: Vec<(Var, f64)>,
    objective_constant: f64,
    rows: Vec<(AffineExpr, Sense, f64)>,
}

impl LpBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> Var {
        self.names.push(name.into());
        self.lower.push(lower);
        self.upper.push(upper);
        Var(self.names.len() - 1)
    }

    /// Nonnegative variable without upper bound.
    pub fn add_nonneg(&mut self, name: impl Into<String>) -> Var {
        self.add_var(name, 0.0, f64::INFINITY)
    }

    /// Adds `expr` (including its constant) to the objective.
    pub fn add_objective(&mut self, expr: AffineExpr) {
        self.objective.extend(expr.terms);
        self.objective_constant += expr.constant;
    }

    /// `expr (sense) rhs`; the constant of `expr` moves to the right.
    pub fn add_constraint(&mut self, expr: impl Into<AffineExpr>, sense: Sense, rhs: f64) {
        self.rows.push((expr.into(), sense, rhs));
    }

    /// Adds `weight * (expr)^+` to a minimization objective through an
    /// epigraph variable `u >= expr`, `u >= 0`. Exact because `u` is pushed
    /// down onto `max(expr, 0)` at any optimum with `weight > 0`.
    pub fn add_pos_part_in_objective(&mut self, expr: AffineExpr, weight: f64) -> Result<Var> {
        if !(weight >= 0.0) {
            return Err(Error::InvalidArgument(format!("positive-part weight must be >= 0, got {weight}")));
        }
        let u = self.add_nonneg(format!("epi{}", self.names.len()));
        self.add_constraint(AffineExpr::from(u) - expr, Sense::Ge, 0.0);
        self.objective.push((u, weight));
        Ok(u)
    }

    /// Encodes `sum_j (expr_j)^+ <= budget` with slacks `s_j >= expr_j`,
    /// `s_j >= 0`, `sum_j s_j <= budget`. A point satisfies the original
    /// constraint iff some choice of slacks (`s_j = (expr_j)^+`) satisfies
    /// the relaxed rows.
    pub fn add_pos_part_budget(&mut self, exprs: Vec<AffineExpr>, budget: f64) -> Vec<Var> {
        let mut total = AffineExpr::default();
        let mut slacks = Vec::with_capacity(exprs.len());
        for e in exprs {
            let s = self.add_nonneg(format!("bud{}", self.names.len()));
            self.add_constraint(AffineExpr::from(s) - e, Sense::Ge, 0.0);
            total = total + s;
            slacks.push(s);
        }
        self.add_constraint(total, Sense::Le, budget);
        slacks
    }

    pub fn build(&self) -> LinearProgram {
        let n = self.num_vars();
        let mut lp = LinearProgram::new(n);
        lp.names = self.names.clone();
        lp.lower = self.lower.clone();
        lp.upper = self.upper.clone();
        for (v, a) in &self.objective {
            lp.objective[v.0] += a;
        }
        lp.objective_constant = self.objective_constant;
        for (e, s, rhs) in &self.rows {
            lp.add_row(e.dense(n), *s, rhs - e.constant);
        }
        lp
    }
}
