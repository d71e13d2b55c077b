//! Random piecewise-linear programs and a derivative-free oracle for them.

#![allow(dead_code)]

use fdnet::lp::{AffineExpr, LinearProgram, LpBuilder, Var};
use rand::Rng;

/// `min c.x + sum_k w_k (a_k.x + b_k)^+` subject to
/// `sum_j (e_j.x + f_j)^+ <= budget`, `x` in `[0, 2]^2`.
#[derive(Debug, Clone)]
pub struct PlProgram {
    pub c: [f64; 2],
    pub obj_terms: Vec<([f64; 2], f64, f64)>,
    pub budget_terms: Vec<([f64; 2], f64)>,
    pub budget: f64,
}

pub const BOX: f64 = 2.0;

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

impl PlProgram {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let c = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let obj_terms = (0..rng.random_range(1..=4))
            .map(|_| {
                let a = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
                (a, rng.random_range(-1.0..1.0), rng.random_range(0.1..2.0))
            })
            .collect();
        let budget_terms: Vec<([f64; 2], f64)> = (0..rng.random_range(1..=3))
            .map(|_| ([rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)], rng.random_range(-1.0..1.0)))
            .collect();
        // a budget that a random interior point meets keeps the program feasible
        let x0 = [rng.random_range(0.0..BOX), rng.random_range(0.0..BOX)];
        let used: f64 = budget_terms.iter().map(|(e, f)| pos(e[0] * x0[0] + e[1] * x0[1] + f)).sum();
        let budget = used + rng.random_range(0.05..1.0);
        Self { c, obj_terms, budget_terms, budget }
    }

    pub fn objective(&self, x: [f64; 2]) -> f64 {
        self.c[0] * x[0]
            + self.c[1] * x[1]
            + self.obj_terms.iter().map(|(a, b, w)| w * pos(a[0] * x[0] + a[1] * x[1] + b)).sum::<f64>()
    }

    pub fn budget_used(&self, x: [f64; 2]) -> f64 {
        self.budget_terms.iter().map(|(e, f)| pos(e[0] * x[0] + e[1] * x[1] + f)).sum()
    }

    pub fn to_lp(&self) -> (LinearProgram, [Var; 2]) {
        let mut b = LpBuilder::new();
        let x = [b.add_var("x0", 0.0, BOX), b.add_var("x1", 0.0, BOX)];
        b.add_objective(AffineExpr::term(x[0], self.c[0]).plus(x[1], self.c[1]));
        for (a, c0, w) in &self.obj_terms {
            let e = AffineExpr::constant(*c0).plus(x[0], a[0]).plus(x[1], a[1]);
            b.add_pos_part_in_objective(e, *w).unwrap();
        }
        let exprs = self
            .budget_terms
            .iter()
            .map(|(e, f)| AffineExpr::constant(*f).plus(x[0], e[0]).plus(x[1], e[1]))
            .collect();
        b.add_pos_part_budget(exprs, self.budget);
        (b.build(), x)
    }

    /// Grid search on `[0, 2]^2`: a 401 x 401 pass, then repeated 81 x 81
    /// zooms around the incumbent.
    pub fn grid_oracle(&self) -> f64 {
        let feasible = |x: [f64; 2]| self.budget_used(x) <= self.budget + 1e-12;
        let mut best = (f64::INFINITY, [0.0, 0.0]);
        let scan = |lo: [f64; 2], hi: [f64; 2], n: usize, best: &mut (f64, [f64; 2])| {
            for i in 0..=n {
                for j in 0..=n {
                    let x = [
                        lo[0] + (hi[0] - lo[0]) * i as f64 / n as f64,
                        lo[1] + (hi[1] - lo[1]) * j as f64 / n as f64,
                    ];
                    if feasible(x) {
                        let v = self.objective(x);
                        if v < best.0 {
                            *best = (v, x);
                        }
                    }
                }
            }
        };
        scan([0.0, 0.0], [BOX, BOX], 400, &mut best);
        let mut h = BOX / 400.0;
        for _ in 0..8 {
            let x = best.1;
            let lo = [(x[0] - 2.0 * h).max(0.0), (x[1] - 2.0 * h).max(0.0)];
            let hi = [(x[0] + 2.0 * h).min(BOX), (x[1] + 2.0 * h).min(BOX)];
            scan(lo, hi, 80, &mut best);
            h /= 20.0;
        }
        best.0
    }
}
