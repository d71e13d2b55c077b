//! Dense two-phase tableau simplex on `min c^T z, A z = b, z >= 0`.
//!
//! Every row carries an identity column (a slack or an artificial), so the
//! final tableau holds `B^{-1}` in those columns and the row duals come out
//! as `c_B^T B^{-1}` without a separate solve.

use crate::error::{Error, Result};

pub(crate) const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const MAX_ITERS: usize = 100_000;

pub(crate) struct StandardForm {
    /// Row-major `m x n` coefficients.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    /// Column holding `+e_i` for row `i`.
    pub identity_col: Vec<usize>,
    /// Columns that are phase-one artificials.
    pub artificial: Vec<bool>,
}

pub(crate) enum Outcome {
    Optimal { z: Vec<f64>, y: Vec<f64> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    m: usize,
    n: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.n + 1) + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.t[i * (self.n + 1) + self.n]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.n + 1;
        let p = self.t[r * w + c];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        self.t[r * w + c] = 1.0;
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                self.t[i * w + j] -= f * self.t[r * w + j];
            }
            self.t[i * w + c] = 0.0;
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            for (j, dj) in d.iter_mut().enumerate() {
                *dj -= cb * self.at(i, j);
            }
        }
        d
    }

    /// Bland's rule: lowest-index improving column, then the lowest-index
    /// basic variable among tied ratios.
    fn run(&mut self, cost: &[f64], allowed: &[bool]) -> Result<Phase> {
        for _ in 0..MAX_ITERS {
            let d = self.reduced_costs(cost);
            let scale = cost.iter().fold(1.0f64, |s, c| s.max(c.abs()));
            let entering = (0..self.n).find(|&j| allowed[j] && d[j] < -COST_TOL * scale && !self.basis.contains(&j));
            let Some(c) = entering else {
                return Ok(Phase::Optimal);
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                        if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match best {
                None => return Ok(Phase::Unbounded),
                Some((r, _)) => self.pivot(r, c),
            }
        }
        Err(Error::Lp(format!("simplex exceeded {MAX_ITERS} iterations")))
    }
}

pub(crate) fn solve_standard(sf: &StandardForm) -> Result<Outcome> {
    let m = sf.b.len();
    let n = sf.c.len();
    let mut t = vec![0.0; m * (n + 1)];
    for i in 0..m {
        t[i * (n + 1)..i * (n + 1) + n].copy_from_slice(&sf.a[i]);
        t[i * (n + 1) + n] = sf.b[i];
    }
    let mut tab = Tableau { m, n, t, basis: sf.identity_col.clone() };

    let bscale = sf.b.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    if sf.artificial.iter().any(|&a| a) {
        let cost1: Vec<f64> = sf.artificial.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
        let all = vec![true; n];
        tab.run(&cost1, &all)?;
        let infeas: f64 = (0..m)
            .filter(|&i| sf.artificial[tab.basis[i]])
            .map(|i| tab.rhs(i))
            .sum();
        if infeas > 1e-9 * bscale {
            return Ok(Outcome::Infeasible);
        }
        for i in 0..m {
            if !sf.artificial[tab.basis[i]] {
                continue;
            }
            // redundant rows keep their artificial basic at zero
            if let Some(j) = (0..n).find(|&j| !sf.artificial[j] && tab.at(i, j).abs() > PIVOT_TOL) {
                tab.pivot(i, j);
            }
        }
    }

    let allowed: Vec<bool> = sf.artificial.iter().map(|a| !a).collect();
    match tab.run(&sf.c, &allowed)? {
        Phase::Unbounded => Ok(Outcome::Unbounded),
        Phase::Optimal => {
            let mut z = vec![0.0; n];
            for i in 0..m {
                z[tab.basis[i]] = tab.rhs(i).max(0.0);
            }
            let y = (0..m)
                .map(|row| {
                    let col = sf.identity_col[row];
                    (0..m).map(|k| sf.c[tab.basis[k]] * tab.at(k, col)).sum()
                })
                .collect();
            Ok(Outcome::Optimal { z, y })
        }
    }
}
