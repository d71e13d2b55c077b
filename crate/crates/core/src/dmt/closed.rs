//! Closed-form symmetric DMT for base stations with `M` transmit and `M`
//! receive antennas, at unit link levels (`alpha_dl = alpha_ul = alpha_i = 1`).
//!
//! Every closed-form sum exponent here is a concatenation of scaled
//! point-to-point curves `s_y d_{a,b}(x / s_x)`, one per eigenvalue group,
//! so each regime is described by its group order and rendered by
//! [`stack`]. Where two regimes share a boundary both are evaluated and the
//! discrepancy is reported in [`ClosedForm::tie_gap`].

use serde::{Deserialize, Serialize};

use crate::curve::{min_pl, ptp_dmt, PiecewiseLinear};
use crate::error::{Error, Result};
use crate::model::AntennaConfig;

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    /// Symmetric DMT `d(r, r)` on `[0, min(N_dl, M_ul)]`.
    pub curve: PiecewiseLinear,
    /// Sum exponent `d_sum(r_sum)`, when the regime defines one.
    pub d_sum: Option<PiecewiseLinear>,
    pub regime: String,
    /// Largest disagreement with any other regime whose closed boundary
    /// contains the query.
    pub tie_gap: Option<f64>,
}

/// `s_y d_{a,b}(x / s_x)` for `x` in `[0, s_x min(a, b)]`.
#[derive(Debug, Clone, Copy)]
struct Group {
    a: usize,
    b: usize,
    sx: f64,
    sy: f64,
}

impl Group {
    fn unit(a: usize, b: usize) -> Self {
        Self { a, b, sx: 1.0, sy: 1.0 }
    }

    fn len(&self) -> f64 {
        self.sx * self.a.min(self.b) as f64
    }

    fn drop(&self) -> f64 {
        self.sy * (self.a * self.b) as f64
    }

    fn active(&self) -> bool {
        self.len() > 0.0
    }
}

fn stack(groups: &[Group]) -> Result<PiecewiseLinear> {
    let active: Vec<&Group> = groups.iter().filter(|g| g.active()).collect();
    let mut rest: f64 = active.iter().map(|g| g.drop()).sum();
    let mut x0 = 0.0;
    let mut pts = vec![(0.0, rest)];
    for g in active {
        rest -= g.drop();
        for k in 1..=g.a.min(g.b) {
            pts.push((x0 + g.sx * k as f64, rest + g.sy * ((g.a - k) * (g.b - k)) as f64));
        }
        x0 += g.len();
    }
    if pts.len() == 1 {
        pts.push((1.0, 0.0));
    }
    PiecewiseLinear::new(pts)
}

/// `min{d_{M,N_dl}(r), d_{M_ul,M}(r), d_sum(2r)}` on `[0, m_I]`.
fn symmetric(a: &AntennaConfig, d_sum: &PiecewiseLinear) -> Result<PiecewiseLinear> {
    let cap = a.n_dl.min(a.m_ul).min(a.m_dl).min(a.n_ul) as f64;
    let hi = d_sum.domain().1;
    let ds = if hi < 2.0 * cap { d_sum.extend_zero(2.0 * cap)? } else { d_sum.restrict(0.0, 2.0 * cap)? };
    let ds = ds.scaled(0.5, 1.0)?;
    let dl = ptp_dmt(a.m_dl, a.n_dl, 1.0).restrict(0.0, cap)?;
    let ul = ptp_dmt(a.m_ul, a.n_ul, 1.0).restrict(0.0, cap)?;
    min_pl(&[dl, ul, ds])
}

fn resolve(mut cands: Vec<(String, PiecewiseLinear, Option<PiecewiseLinear>)>, what: &str) -> Result<ClosedForm> {
    if cands.is_empty() {
        return Err(Error::NoClosedForm(what.to_string()));
    }
    let (regime, curve, d_sum) = cands.remove(0);
    let mut gap: Option<f64> = None;
    for (_, c, _) in &cands {
        let g = curve.max_abs_diff(c)?;
        gap = Some(gap.map_or(g, |x: f64| x.max(g)));
    }
    Ok(ClosedForm { curve, d_sum, regime, tie_gap: gap })
}

fn check_bs(a: &AntennaConfig) -> Result<usize> {
    a.validate()?;
    if a.m_dl != a.n_ul {
        return Err(Error::OutOfScope(format!("closed forms need M_dl = N_ul, got {:?}", a.as_tuple())));
    }
    let m = a.m_dl;
    if m < a.n_dl || m < a.m_ul {
        return Err(Error::OutOfScope(format!(
            "closed forms need M >= N_dl, M_ul, got {:?}",
            a.as_tuple()
        )));
    }
    Ok(m)
}

fn check_w(w: f64, alpha_s: f64) -> Result<()> {
    if !(w >= 0.0 && w.is_finite() && alpha_s >= 0.0 && alpha_s.is_finite()) {
        return Err(Error::InvalidArgument(format!("need w, alpha_s >= 0, got {w}, {alpha_s}")));
    }
    Ok(())
}

/// Symmetric DMT of the `(M, 1, 1, M)` network in every side-channel
/// regime, as explicit breakpoint lists.
pub fn closed_form_m11m(m: usize, w: f64, alpha_s: f64, csit: bool) -> Result<ClosedForm> {
    if m == 0 {
        return Err(Error::InvalidConfig("M must be >= 1".into()));
    }
    check_w(w, alpha_s)?;
    let mf = m as f64;
    let ws = w * alpha_s;
    let le = |a: f64, b: f64| a <= b + EPS;
    // c: slope factor of the steep sum segment; (k, den): knee offsets
    let (t, c, k, den) = if csit {
        (1.0 / (2.0 * mf + 1.0), 2.0 * mf + 1.0, mf + 1.0, 3.0 * mf + 2.0)
    } else {
        (1.0 / (mf + 1.0), mf + 1.0, 1.0, mf + 2.0)
    };
    let side = |r: f64| alpha_s + (1.0 - 2.0 * r) / w;
    let beta = || (alpha_s + 1.0 / w - mf) / (2.0 / w - mf);
    let e = 0.5 * (1.0 + ws);
    let b3 = (k + alpha_s) / den;
    let pad = |mut pts: Vec<(f64, f64)>| -> Result<PiecewiseLinear> {
        if pts.last().is_some_and(|p| p.0 < 1.0 - EPS) {
            pts.push((1.0, 0.0));
        }
        PiecewiseLinear::from_unsorted(pts, 1e-14)
    };

    let mut cands = Vec::new();
    if le(w, t) && le(ws, 1.0) {
        let b1 = (k + c * ws) / den;
        cands.push(("1", pad(vec![(0.0, mf), (b1, mf * (1.0 - b1)), (e, 0.0)])?));
    }
    if le(t, w) && le(mf / 2.0, alpha_s) && le(ws, 1.0) && 2.0 / w - mf > EPS {
        let b = beta();
        cands.push(("2", pad(vec![(0.0, mf), (b, mf * (1.0 - b)), (e, side(e).max(0.0))])?));
    }
    if le(t, w) && le(alpha_s, mf / 2.0) && le(ws, 1.0) {
        cands.push(("3", pad(vec![(0.0, mf), (b3, mf * (1.0 - b3)), (0.5, alpha_s), (e, 0.0)])?));
    }
    if le(t, w) && le(alpha_s, mf / 2.0) && le(1.0, ws) && (2.0 / w - mf).abs() > EPS {
        let b = beta();
        cands.push(("4", pad(vec![(0.0, mf), (b3, mf * (1.0 - b3)), (0.5, alpha_s), (b, mf * (1.0 - b)), (1.0, 0.0)])?));
    }
    if le(mf / 2.0, alpha_s) && le(1.0, ws) {
        cands.push(("5", pad(vec![(0.0, mf), (1.0, 0.0)])?));
    }
    let cands = cands.into_iter().map(|(r, c)| (format!("m11m-{}-{r}", if csit { "csit" } else { "nocsit" }), c, None)).collect();
    resolve(cands, "no (M,1,1,M) regime matched")
}

/// Closed-form sum exponent of the `(M, N_dl, M_ul, M)` network, or
/// [`Error::NoClosedForm`] when `w` falls between the published regimes.
pub fn closed_form_general_dsum(a: &AntennaConfig, w: f64, alpha_s: f64, csit: bool) -> Result<(PiecewiseLinear, String)> {
    let cf = general(a, w, alpha_s, csit)?;
    Ok((cf.d_sum.expect("general closed forms carry d_sum"), cf.regime))
}

/// Closed-form symmetric DMT of the `(M, N_dl, M_ul, M)` network.
pub fn closed_form_general(a: &AntennaConfig, w: f64, alpha_s: f64, csit: bool) -> Result<ClosedForm> {
    general(a, w, alpha_s, csit)
}

/// `a / b`, or infinity when the denominator is not positive.
fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        f64::INFINITY
    }
}

/// Finite `w` thresholds that delimit the closed-form regimes, ascending.
pub fn regime_boundaries(a: &AntennaConfig, csit: bool) -> Result<Vec<f64>> {
    let m = check_bs(a)? as f64;
    let (mu, nd) = (a.m_ul as f64, a.n_dl as f64);
    let df = (mu - nd).abs();
    let mut b = if csit {
        vec![
            ratio(df + 1.0, 2.0 * m + mu + nd - 1.0),
            ratio(mu + nd - 1.0, 2.0 * m + df + 1.0),
            ratio(df + 1.0, m + df - 1.0),
            ratio(mu + nd - 1.0, m - df + 1.0),
        ]
    } else {
        let mut v = Vec::new();
        if a.m_ul + 2 >= 2 * a.n_dl {
            v.push(ratio(mu - nd + 1.0, m + mu + nd - 1.0));
            v.push(ratio(mu + nd - 1.0, m + mu - nd + 1.0));
        }
        if a.n_dl >= a.m_ul && a.m_ul <= 2 {
            v.push(ratio(nd - mu + 1.0, m + mu + nd - 1.0));
            v.push(ratio(mu + nd - 1.0, m + nd - mu + 1.0));
            v.push(ratio(nd - mu + 1.0, m + nd - mu - 1.0));
            v.push(ratio(mu + nd - 1.0, m - nd + mu + 1.0));
        }
        v
    };
    b.retain(|x| x.is_finite());
    b.sort_by(f64::total_cmp);
    b.dedup_by(|x, y| (*x - *y).abs() < EPS);
    Ok(b)
}

fn general(a: &AntennaConfig, w: f64, alpha_s: f64, csit: bool) -> Result<ClosedForm> {
    let m = check_bs(a)?;
    check_w(w, alpha_s)?;
    let (mu, nd) = (a.m_ul, a.n_dl);
    let mf = m as f64;
    let (muf, ndf) = (mu as f64, nd as f64);
    let m_i = mu.min(nd);
    let m_x = mu.max(nd);
    let delta = m_x - m_i;
    let df = delta as f64;
    let le = |x: f64, y: f64| x <= y + EPS;
    let nu = Group { a: mu, b: nd, sx: w * alpha_s, sy: alpha_s };

    let mut orders: Vec<(&str, Vec<Group>)> = Vec::new();
    if csit {
        let th = Group::unit(m_i, 2 * m + m_x);
        let dg = Group::unit(delta, m);
        if le(w, ratio(df + 1.0, 2.0 * mf + muf + ndf - 1.0)) {
            orders.push(("csit-1", vec![nu, th, dg]));
        }
        let lo2 = ratio(muf + ndf - 1.0, 2.0 * mf + df + 1.0);
        if le(lo2, w) && le(w, ratio(df + 1.0, mf + df - 1.0)) {
            orders.push(("csit-2", vec![th, nu, dg]));
        }
        if le(ratio(muf + ndf - 1.0, mf - df + 1.0), w) {
            orders.push(("csit-3", vec![th, dg, nu]));
        }
    } else {
        let mut matched_branch = false;
        if mu + 2 >= 2 * nd {
            matched_branch = true;
            let th = Group::unit(nd, m + mu);
            if le(w, ratio(muf - ndf + 1.0, mf + muf + ndf - 1.0)) {
                orders.push(("nocsit-a1", vec![nu, th]));
            }
            if le(ratio(muf + ndf - 1.0, mf + muf - ndf + 1.0), w) {
                orders.push(("nocsit-a2", vec![th, nu]));
            }
        }
        if nd >= mu && mu <= 2 {
            matched_branch = true;
            let th = Group::unit(mu, m + nd);
            let dg = Group::unit(nd - mu, m);
            if le(w, ratio(ndf - muf + 1.0, mf + muf + ndf - 1.0)) {
                orders.push(("nocsit-b1", vec![nu, th, dg]));
            }
            let lo2 = ratio(muf + ndf - 1.0, mf + ndf - muf + 1.0);
            if le(lo2, w) && le(w, ratio(ndf - muf + 1.0, mf + ndf - muf - 1.0)) {
                orders.push(("nocsit-b2", vec![th, nu, dg]));
            }
            if le(ratio(muf + ndf - 1.0, mf - ndf + muf + 1.0), w) {
                orders.push(("nocsit-b3", vec![th, dg, nu]));
            }
        }
        if !matched_branch {
            return Err(Error::OutOfScope(format!(
                "no closed form without CSIT for {:?}: needs M_ul >= 2(N_dl - 1) or N_dl >= M_ul with M_ul <= 2",
                a.as_tuple()
            )));
        }
    }
    let mut cands = Vec::new();
    for (name, groups) in orders {
        let ds = stack(&groups)?;
        cands.push((name.to_string(), symmetric(a, &ds)?, Some(ds)));
    }
    resolve(cands, &format!("w = {w} lies between the closed-form regimes for {:?}", a.as_tuple()))
}
