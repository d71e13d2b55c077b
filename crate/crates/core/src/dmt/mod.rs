//! Diversity–multiplexing tradeoff.
//!
//! The sum-rate outage exponent is the value of a linear program over the
//! eigenvalue SNR exponents of the four channel matrices
//! ([`d_sum_csit`], [`d_sum_nocsit`]). The overall DMT is the minimum of that
//! exponent and the two point-to-point exponents ([`dmt_overall`]).
//! [`closed`] holds the closed-form special cases used as oracles, and
//! [`tradeoff`] the side-channel bandwidth results built on them.

pub mod closed;
mod extract;
pub mod tradeoff;

pub use closed::{closed_form_general, closed_form_general_dsum, closed_form_m11m, regime_boundaries, ClosedForm};
pub use extract::{extract_curve, ExtractedCurve};
pub use tradeoff::{
    compensate_csit_bandwidth, compensation_numeric, diversity_reach, interference_free_bandwidth, Compensation,
    InterferenceFree,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{ptp_dmt, PiecewiseLinear};
use crate::error::{Error, Result};
use crate::lp::{self, AffineExpr, LinearProgram, LpBuilder, LpStatus, Sense, Var};
use crate::model::{derived_dims, NetworkSpec};

/// Optimal SNR exponents of the eigenvalues of `H_dl`, `H_ul`, `H_I` and
/// `H_S`, each nondecreasing. `nu` is empty when `w = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentVars {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub theta: Vec<f64>,
    pub nu: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DmtQuery {
    pub spec: NetworkSpec,
    pub r_dl: f64,
    pub r_ul: f64,
    pub csit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumDiversity {
    /// Diversity order, clamped at zero.
    pub value: f64,
    /// Raw LP optimum before clamping.
    pub lp_value: f64,
    pub exponents: ExponentVars,
}

struct SumLp {
    builder: LpBuilder,
    mu: Vec<Var>,
    sigma: Vec<Var>,
    theta: Vec<Var>,
    nu: Vec<Var>,
}

fn nondecreasing_vars(b: &mut LpBuilder, name: &str, n: usize) -> Vec<Var> {
    let v: Vec<Var> = (1..=n).map(|i| b.add_nonneg(format!("{name}{i}"))).collect();
    for w in v.windows(2) {
        b.add_constraint(w[1] - w[0], Sense::Ge, 0.0);
    }
    v
}

fn check_r_sum(spec: &NetworkSpec, r_sum: f64) -> Result<()> {
    spec.validate()?;
    if !(r_sum >= 0.0 && r_sum.is_finite()) {
        return Err(Error::InvalidArgument(format!("r_sum must be finite and >= 0, got {r_sum}")));
    }
    Ok(())
}

/// Side-channel exponents after the substitution `nu' = w nu`, so that the
/// budget term reads `(w alpha_s - nu')^+` and `w = 0` simply drops them.
fn add_side_channel(b: &mut LpBuilder, spec: &NetworkSpec, budget: &mut Vec<AffineExpr>) -> Vec<Var> {
    let a = &spec.antennas;
    let m_i = derived_dims(a).m_i;
    if spec.w == 0.0 {
        return Vec::new();
    }
    let nu = nondecreasing_vars(b, "nu", m_i);
    for (l, &v) in nu.iter().enumerate() {
        let c = (a.m_ul + a.n_dl + 1 - 2 * (l + 1)) as f64 / spec.w;
        b.add_objective(AffineExpr::term(v, c));
        budget.push(AffineExpr::constant(spec.w * spec.levels.alpha_s) - v);
    }
    nu
}

fn build_csit(spec: &NetworkSpec, r_sum: f64) -> Result<SumLp> {
    let a = &spec.antennas;
    let d = derived_dims(a);
    let lv = &spec.levels;
    let ai = lv.alpha_i;
    let mut b = LpBuilder::new();

    let mu = nondecreasing_vars(&mut b, "mu", d.m_dl_min);
    let sigma = nondecreasing_vars(&mut b, "sigma", d.m_ul_min);
    let theta = nondecreasing_vars(&mut b, "theta", d.m_i);

    for (i, &v) in mu.iter().enumerate() {
        b.add_objective(AffineExpr::term(v, (a.m_dl + a.n_dl + 1 - 2 * (i + 1)) as f64));
    }
    for (j, &v) in sigma.iter().enumerate() {
        b.add_objective(AffineExpr::term(v, (a.m_ul + a.n_ul + 1 - 2 * (j + 1)) as f64));
    }
    for (k, &v) in theta.iter().enumerate() {
        b.add_objective(AffineExpr::term(v, (a.m_dl + a.n_ul + a.m_ul + a.n_dl + 1 - 2 * (k + 1)) as f64));
    }
    b.add_objective(AffineExpr::constant(-((a.m_dl + a.n_ul) as f64) * d.m_i as f64 * ai));

    let mut budget: Vec<AffineExpr> = Vec::new();
    budget.extend(mu.iter().map(|&v| AffineExpr::constant(lv.alpha_dl) - v));
    budget.extend(sigma.iter().map(|&v| AffineExpr::constant(lv.alpha_ul) - v));
    budget.extend(theta.iter().map(|&v| AffineExpr::constant(ai) - v));
    let nu = add_side_channel(&mut b, spec, &mut budget);

    for (i, &m) in mu.iter().enumerate() {
        let i1 = i + 1;
        for k1 in 1..=a.n_dl.saturating_sub(i1).min(a.m_ul) {
            b.add_pos_part_in_objective(AffineExpr::constant(ai) - m - theta[k1 - 1], 1.0)?;
        }
    }
    for (j, &s) in sigma.iter().enumerate() {
        let j1 = j + 1;
        for k1 in 1..=a.m_ul.saturating_sub(j1).min(a.n_dl) {
            b.add_pos_part_in_objective(AffineExpr::constant(ai) - s - theta[k1 - 1], 1.0)?;
        }
    }
    b.add_pos_part_budget(budget, r_sum);

    for (i, &m) in mu.iter().enumerate() {
        for (k, &t) in theta.iter().enumerate() {
            if i + k + 2 >= a.n_dl + 1 {
                b.add_constraint(m + t, Sense::Ge, ai);
            }
        }
    }
    for (j, &s) in sigma.iter().enumerate() {
        for (k, &t) in theta.iter().enumerate() {
            if j + k + 2 >= a.m_ul + 1 {
                b.add_constraint(s + t, Sense::Ge, ai);
            }
        }
    }
    Ok(SumLp { builder: b, mu, sigma, theta, nu })
}

fn build_nocsit(spec: &NetworkSpec, r_sum: f64) -> Result<SumLp> {
    let a = &spec.antennas;
    let d = derived_dims(a);
    let lv = &spec.levels;
    let ai = lv.alpha_i;
    let mut b = LpBuilder::new();

    let mu = nondecreasing_vars(&mut b, "mu", d.m_dl_min);
    let theta = nondecreasing_vars(&mut b, "theta", d.m_i);
    for (i, &v) in mu.iter().enumerate() {
        b.add_objective(AffineExpr::term(v, (a.m_dl + a.n_dl + 1 - 2 * (i + 1)) as f64));
    }
    for (k, &v) in theta.iter().enumerate() {
        b.add_objective(AffineExpr::term(v, (a.m_ul + a.n_dl + a.m_dl + 1 - 2 * (k + 1)) as f64));
    }
    b.add_objective(AffineExpr::constant(-(a.m_dl as f64) * d.m_i as f64 * ai));

    let mut budget: Vec<AffineExpr> = Vec::new();
    budget.extend(mu.iter().map(|&v| AffineExpr::constant(lv.alpha_dl) - v));
    budget.extend(theta.iter().map(|&v| AffineExpr::constant(ai) - v));
    let nu = add_side_channel(&mut b, spec, &mut budget);

    for (i, &m) in mu.iter().enumerate() {
        for k1 in 1..=a.n_dl.saturating_sub(i + 1).min(a.m_ul) {
            b.add_pos_part_in_objective(AffineExpr::constant(ai) - m - theta[k1 - 1], 1.0)?;
        }
    }
    b.add_pos_part_budget(budget, r_sum);

    for (i, &m) in mu.iter().enumerate() {
        for (k, &t) in theta.iter().enumerate() {
            if i + k + 2 >= a.n_dl + 1 {
                b.add_constraint(m + t, Sense::Ge, ai);
            }
        }
    }
    Ok(SumLp { builder: b, mu, sigma: Vec::new(), theta, nu })
}

/// The sum-event linear program at `r_sum`, for inspection or export.
pub fn sum_lp(spec: &NetworkSpec, r_sum: f64, csit: bool) -> Result<LinearProgram> {
    check_r_sum(spec, r_sum)?;
    let s = if csit { build_csit(spec, r_sum)? } else { build_nocsit(spec, r_sum)? };
    Ok(s.builder.build())
}

fn solve_sum(spec: &NetworkSpec, r_sum: f64, csit: bool) -> Result<SumDiversity> {
    check_r_sum(spec, r_sum)?;
    let s = if csit { build_csit(spec, r_sum)? } else { build_nocsit(spec, r_sum)? };
    let lp = s.builder.build();
    let sol = lp::solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Lp(format!("sum-diversity program is {:?}", sol.status)));
    }
    let pick = |v: &[Var]| v.iter().map(|x| sol.x[x.index()]).collect::<Vec<_>>();
    let w = spec.w;
    Ok(SumDiversity {
        value: sol.value.max(0.0),
        lp_value: sol.value,
        exponents: ExponentVars {
            mu: pick(&s.mu),
            sigma: pick(&s.sigma),
            theta: pick(&s.theta),
            nu: pick(&s.nu).into_iter().map(|v| v / w).collect(),
        },
    })
}

/// Sum-event diversity with CSIT, with optimal exponents.
pub fn d_sum_csit_detail(spec: &NetworkSpec, r_sum: f64) -> Result<SumDiversity> {
    solve_sum(spec, r_sum, true)
}

/// Sum-event diversity with CSIT.
pub fn d_sum_csit(spec: &NetworkSpec, r_sum: f64) -> Result<f64> {
    Ok(solve_sum(spec, r_sum, true)?.value)
}

/// Sum-event diversity without CSIT, with optimal exponents.
pub fn d_sum_nocsit_detail(spec: &NetworkSpec, r_sum: f64) -> Result<SumDiversity> {
    solve_sum(spec, r_sum, false)
}

/// Sum-event diversity without CSIT.
pub fn d_sum_nocsit(spec: &NetworkSpec, r_sum: f64) -> Result<f64> {
    Ok(solve_sum(spec, r_sum, false)?.value)
}

pub fn d_sum(spec: &NetworkSpec, r_sum: f64, csit: bool) -> Result<f64> {
    Ok(solve_sum(spec, r_sum, csit)?.value)
}

const CAP_TOL: f64 = 1e-9;

/// The two point-to-point exponents `alpha d_{M,N}(r / alpha)`.
pub fn ptp_curves(spec: &NetworkSpec) -> (PiecewiseLinear, PiecewiseLinear) {
    let a = &spec.antennas;
    (
        ptp_dmt(a.m_dl, a.n_dl, spec.levels.alpha_dl),
        ptp_dmt(a.m_ul, a.n_ul, spec.levels.alpha_ul),
    )
}

/// Overall DMT: minimum of the downlink, uplink and sum exponents.
pub fn dmt_overall(q: &DmtQuery) -> Result<f64> {
    q.spec.validate()?;
    let d = derived_dims(&q.spec.antennas);
    let cap_dl = d.m_dl_min as f64 * q.spec.levels.alpha_dl;
    let cap_ul = d.m_ul_min as f64 * q.spec.levels.alpha_ul;
    if !(q.r_dl >= 0.0 && q.r_ul >= 0.0) || q.r_dl > cap_dl + CAP_TOL || q.r_ul > cap_ul + CAP_TOL {
        return Err(Error::InvalidArgument(format!(
            "multiplexing gains ({}, {}) outside [0, {cap_dl}] x [0, {cap_ul}]",
            q.r_dl, q.r_ul
        )));
    }
    let (pdl, pul) = ptp_curves(&q.spec);
    let e_dl = pdl.eval(q.r_dl.min(cap_dl))?;
    let e_ul = pul.eval(q.r_ul.min(cap_ul))?;
    let e_sum = d_sum(&q.spec, q.r_dl + q.r_ul, q.csit)?;
    Ok(e_dl.min(e_ul).min(e_sum))
}

/// Largest symmetric multiplexing gain `r` with `r_dl = r_ul = r`.
pub fn symmetric_cap(spec: &NetworkSpec) -> f64 {
    let d = derived_dims(&spec.antennas);
    (d.m_dl_min as f64 * spec.levels.alpha_dl).min(d.m_ul_min as f64 * spec.levels.alpha_ul)
}

/// `n + 1` equally spaced points on `[0, hi]`.
pub fn uniform_grid(hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| hi * i as f64 / n as f64).collect()
}

/// Symmetric DMT `d(r, r)` over a grid, evaluated in parallel and returned
/// in grid order. Fails if the grid is not increasing, leaves the domain,
/// or the curve increases anywhere by more than `1e-7`.
pub fn dmt_curve_symmetric(spec: &NetworkSpec, csit: bool, r_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    spec.validate()?;
    if r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("r grid must be strictly increasing".into()));
    }
    let cap = symmetric_cap(spec);
    if let (Some(&lo), Some(&hi)) = (r_grid.first(), r_grid.last()) {
        if lo < 0.0 || hi > cap + CAP_TOL {
            return Err(Error::OutOfDomain { x: if lo < 0.0 { lo } else { hi }, lo: 0.0, hi: cap });
        }
    }
    let out: Result<Vec<(f64, f64)>> = r_grid
        .par_iter()
        .map(|&r| {
            let q = DmtQuery { spec: *spec, r_dl: r, r_ul: r, csit };
            Ok((r, dmt_overall(&q)?))
        })
        .collect();
    let out = out?;
    if let Some(w) = out.windows(2).find(|w| w[1].1 > w[0].1 + 1e-7) {
        return Err(Error::Lp(format!("DMT increases between r = {} and r = {}", w[0].0, w[1].0)));
    }
    Ok(out)
}

/// `d_sum` sampled on `r_sum` values, in parallel, grid order preserved.
pub fn d_sum_samples(spec: &NetworkSpec, csit: bool, r_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    r_grid.par_iter().map(|&r| Ok((r, d_sum(spec, r, csit)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AntennaConfig, LinkLevels};

    fn siso(w: f64, alpha_s: f64) -> NetworkSpec {
        NetworkSpec::unit(AntennaConfig::new(1, 1, 1, 1).unwrap(), w, alpha_s).unwrap()
    }

    #[test]
    fn siso_no_side_channel() {
        let s = siso(0.0, 1.0);
        assert!((d_sum_csit(&s, 0.0).unwrap() - 3.0).abs() < 1e-9);
        assert!((d_sum_nocsit(&s, 0.0).unwrap() - 2.0).abs() < 1e-9);
        for r in [0.1, 0.3, 0.7] {
            assert!((d_sum_csit(&s, r).unwrap() - 3.0 * (1.0 - r)).abs() < 1e-9);
        }
        let q = DmtQuery { spec: s, r_dl: 0.25, r_ul: 0.25, csit: true };
        assert!((dmt_overall(&q).unwrap() - 0.75).abs() < 1e-9);
    }

    #[test]
    fn zero_at_cap() {
        let s = siso(0.5, 1.0);
        assert!(d_sum_csit(&s, 1.5).unwrap().abs() < 1e-9);
        assert!(d_sum_nocsit(&s, 1.5).unwrap().abs() < 1e-9);
        assert!(d_sum_csit(&s, 1.4).unwrap() > 1e-3);
    }

    #[test]
    fn exponents_are_feasible() {
        let spec = NetworkSpec::new(
            AntennaConfig::new(3, 2, 3, 3).unwrap(),
            LinkLevels { alpha_i: 0.8, alpha_s: 1.2, ..LinkLevels::default() },
            0.4,
        )
        .unwrap();
        let d = d_sum_csit_detail(&spec, 1.7).unwrap();
        let e = &d.exponents;
        assert_eq!((e.mu.len(), e.sigma.len(), e.theta.len(), e.nu.len()), (2, 3, 2, 2));
        for v in [&e.mu, &e.sigma, &e.theta, &e.nu] {
            assert!(v.windows(2).all(|w| w[1] >= w[0] - 1e-9));
            assert!(v.iter().all(|&x| x >= -1e-9));
        }
        assert!(d_sum_nocsit_detail(&spec, 1.7).unwrap().exponents.sigma.is_empty());
    }

    #[test]
    fn rejects_bad_queries() {
        let s = siso(0.0, 1.0);
        assert!(d_sum_csit(&s, -0.1).is_err());
        let q = DmtQuery { spec: s, r_dl: 1.5, r_ul: 0.0, csit: true };
        assert!(dmt_overall(&q).is_err());
        assert!(dmt_curve_symmetric(&s, true, &[0.0, 0.5, 0.4]).is_err());
        assert!(dmt_curve_symmetric(&s, true, &[0.0, 1.2]).is_err());
    }
}
