//! How much side-channel bandwidth makes CSIT unnecessary, or makes the
//! interference invisible in the symmetric DMT.

use serde::{Deserialize, Serialize};

use super::{dmt_curve_symmetric, dmt_overall, symmetric_cap, uniform_grid, DmtQuery};
use crate::curve::d_mn;
use crate::error::{Error, Result};
use crate::model::{AntennaConfig, NetworkSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Compensation {
    pub w: f64,
    /// Side-channel level the bandwidth `w` relies on.
    pub alpha_s_min: f64,
    /// Which sufficient condition fired: 1 (bandwidth) or 2 (`w = 0`).
    pub condition: u8,
    /// Whether the supplied `alpha_s` meets `alpha_s_min`.
    pub sufficient: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceFree {
    pub w: f64,
    pub alpha_s_min: f64,
    pub sufficient: bool,
}

fn check_family(a: &AntennaConfig) -> Result<usize> {
    a.validate()?;
    let m = a.m_dl;
    if a.n_ul != m || m < a.n_dl || m < a.m_ul {
        return Err(Error::OutOfScope(format!(
            "expected (M, N_dl, M_ul, M) with M >= N_dl, M_ul, got {:?}",
            a.as_tuple()
        )));
    }
    Ok(m)
}

fn check_alpha_s(alpha_s: f64) -> Result<()> {
    if !(alpha_s >= 0.0 && alpha_s.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha_s must be finite and >= 0, got {alpha_s}")));
    }
    Ok(())
}

/// `k / alpha_s`, rejecting `alpha_s = 0` unless `k = 0`.
fn over_alpha(k: f64, alpha_s: f64) -> Result<f64> {
    if k <= 0.0 {
        return Ok(0.0);
    }
    if alpha_s <= 0.0 {
        return Err(Error::InvalidArgument("alpha_s = 0 needs unbounded bandwidth".into()));
    }
    Ok(k / alpha_s)
}

/// Sufficient side-channel bandwidth for the DMT without CSIT to equal the
/// DMT with CSIT. Defined for `N_dl >= M_ul` and `M_ul` in `{1, 2}`.
pub fn compensate_csit_bandwidth(a: &AntennaConfig, alpha_s: f64) -> Result<Compensation> {
    let m = check_family(a)?;
    check_alpha_s(alpha_s)?;
    let (nd, mu) = (a.n_dl, a.m_ul);
    if nd < mu || !(1..=2).contains(&mu) {
        return Err(Error::OutOfScope(format!(
            "no bandwidth condition known for {:?}: needs N_dl >= M_ul and M_ul in {{1, 2}}",
            a.as_tuple()
        )));
    }
    let (mf, ndf, muf) = (m as f64, nd as f64, mu as f64);
    if ndf >= d_mn(mu, m, muf / 2.0) / mf + muf {
        return Ok(Compensation { w: 0.0, alpha_s_min: 0.0, condition: 2, sufficient: true });
    }
    let floor = (d_mn(m, mu, muf / 2.0) - mf * (ndf - muf)) / (muf * ndf);
    let w_band = (ndf + muf - 1.0) / (mf + ndf - muf + 1.0);
    let w_level = over_alpha((2.0 - ndf / muf).max(0.0), alpha_s)?;
    Ok(Compensation {
        w: w_band.min(w_level),
        alpha_s_min: floor.max(0.0),
        condition: 1,
        sufficient: alpha_s >= floor - 1e-12,
    })
}

/// Sufficient side-channel bandwidth for the symmetric DMT to reach the
/// interference-free curve `min{d_{M,N_dl}(r), d_{M_ul,M}(r)}`.
pub fn interference_free_bandwidth(a: &AntennaConfig, alpha_s: f64, csit: bool) -> Result<InterferenceFree> {
    let m = check_family(a)?;
    check_alpha_s(alpha_s)?;
    let (nd, mu) = (a.n_dl, a.m_ul);
    let (m_i, m_x) = (nd.min(mu) as f64, nd.max(mu) as f64);
    let mf = m as f64;
    let (w, floor) = if !csit && mu >= nd {
        let floor = (mf - nd as f64 + 1.0) / (2.0 * (mu as f64 - nd as f64 + 1.0));
        (over_alpha(1.0, alpha_s)?, floor)
    } else {
        let delta = m_x - m_i;
        let floor = (2.0 * m_i - m_x) * (mf - m_i + 1.0) / (m_i * (2.0 * delta + 2.0));
        (over_alpha((2.0 - m_x / m_i).max(0.0), alpha_s)?, floor)
    };
    Ok(InterferenceFree { w, alpha_s_min: floor.max(0.0), sufficient: alpha_s >= floor - 1e-12 })
}

/// Smallest `w` on `w_grid` at which the symmetric DMT with and without
/// CSIT agree within `tol` on a uniform grid of `points` intervals. This is
/// a numeric search, used where no closed-form condition is known.
pub fn compensation_numeric(
    a: &AntennaConfig,
    alpha_s: f64,
    w_grid: &[f64],
    points: usize,
    tol: f64,
) -> Result<Option<f64>> {
    for &w in w_grid {
        let spec = NetworkSpec::unit(*a, w, alpha_s)?;
        let grid = uniform_grid(symmetric_cap(&spec), points);
        let c = dmt_curve_symmetric(&spec, true, &grid)?;
        let n = dmt_curve_symmetric(&spec, false, &grid)?;
        if c.iter().zip(&n).all(|(x, y)| (x.1 - y.1).abs() <= tol) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Largest symmetric multiplexing gain with positive diversity, found by
/// bisection to `1e-9`.
pub fn diversity_reach(spec: &NetworkSpec, csit: bool) -> Result<f64> {
    let d = |r: f64| dmt_overall(&DmtQuery { spec: *spec, r_dl: r, r_ul: r, csit });
    let (mut lo, mut hi) = (0.0, symmetric_cap(spec));
    if d(lo)? <= 1e-9 {
        return Ok(0.0);
    }
    if d(hi)? > 1e-9 {
        return Ok(hi);
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if d(mid)? > 1e-9 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m11m_compensation() {
        // (M, 1, 1, M): w = 1 / (M + 1), floor M / 2
        for m in 1..=4 {
            let a = AntennaConfig::symmetric_bs(m, 1, 1).unwrap();
            let c = compensate_csit_bandwidth(&a, m as f64).unwrap();
            assert_eq!(c.condition, 1);
            assert!((c.w - 1.0 / (m as f64 + 1.0)).abs() < 1e-12);
            assert!((c.alpha_s_min - m as f64 / 2.0).abs() < 1e-12);
            assert!(c.sufficient);
        }
    }

    #[test]
    fn condition_two_needs_no_bandwidth() {
        let a = AntennaConfig::symmetric_bs(4, 4, 1).unwrap();
        let c = compensate_csit_bandwidth(&a, 1.0).unwrap();
        assert_eq!((c.w, c.condition), (0.0, 2));
        assert!(compensate_csit_bandwidth(&AntennaConfig::symmetric_bs(4, 2, 3).unwrap(), 1.0).is_err());
    }

    #[test]
    fn interference_free_values() {
        let a = AntennaConfig::symmetric_bs(3, 2, 3).unwrap();
        let f = interference_free_bandwidth(&a, 1.0, true).unwrap();
        assert!((f.w - 0.5).abs() < 1e-12);
        assert!((f.alpha_s_min - 0.25).abs() < 1e-12);
        let f = interference_free_bandwidth(&a, 2.0, false).unwrap();
        assert!((f.w - 0.5).abs() < 1e-12);
        assert!((f.alpha_s_min - 1.0 / 2.0).abs() < 1e-12);
        // m_X >= 2 m_I needs no bandwidth with CSIT
        let a = AntennaConfig::symmetric_bs(4, 1, 3).unwrap();
        assert_eq!(interference_free_bandwidth(&a, 1.0, true).unwrap().w, 0.0);
        assert!(interference_free_bandwidth(&AntennaConfig::symmetric_bs(2, 2, 2).unwrap(), 0.0, true).is_err());
    }
}
