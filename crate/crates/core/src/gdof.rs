//! Generalized degrees-of-freedom regions and required side-channel
//! bandwidths.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{derived_dims, f_spatial1, f_spatial_sorted, pos, AntennaConfig, NetworkSpec};

/// `{DoF_dl <= dof_dl_max, DoF_ul <= dof_ul_max, sum <= dof_sum_max}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GdofRegion {
    pub dof_dl_max: f64,
    pub dof_ul_max: f64,
    pub dof_sum_max: f64,
}

impl GdofRegion {
    /// Largest achievable sum GDoF, i.e. the sum cap clipped by the two
    /// individual caps.
    pub fn max_sum(&self) -> f64 {
        self.dof_sum_max.min(self.dof_dl_max + self.dof_ul_max)
    }
}

fn require_unit_direct_links(spec: &NetworkSpec) -> Result<()> {
    spec.validate()?;
    if spec.levels.alpha_dl != 1.0 || spec.levels.alpha_ul != 1.0 {
        return Err(Error::OutOfScope(format!(
            "GDoF regions assume alpha_dl = alpha_ul = 1, got ({}, {})",
            spec.levels.alpha_dl, spec.levels.alpha_ul
        )));
    }
    Ok(())
}

/// Prelog of the interfered downlink receiver: downlink streams at level 1
/// and uplink interference at level `alpha_i`, filled strongest first.
fn dl_receiver_prelog(spec: &NetworkSpec) -> f64 {
    let a = &spec.antennas;
    f_spatial_sorted(a.n_dl, (spec.levels.alpha_i, a.m_ul), (1.0, a.m_dl))
}

fn side_prelog(spec: &NetworkSpec) -> f64 {
    let a = &spec.antennas;
    spec.w * f_spatial1(a.n_dl, spec.levels.alpha_s, a.m_ul)
}

/// GDoF region with CSIT.
pub fn gdof_csit(spec: &NetworkSpec) -> Result<GdofRegion> {
    require_unit_direct_links(spec)?;
    let a = &spec.antennas;
    let d = derived_dims(a);
    // uplink signal projected away from the interference directions
    let ul_residual = f_spatial_sorted(
        a.n_ul,
        (pos(1.0 - spec.levels.alpha_i), d.m_i),
        (1.0, a.m_ul.saturating_sub(a.n_dl)),
    );
    Ok(GdofRegion {
        dof_dl_max: d.m_dl_min as f64,
        dof_ul_max: d.m_ul_min as f64,
        dof_sum_max: ul_residual + dl_receiver_prelog(spec) + side_prelog(spec),
    })
}

/// Achievable GDoF region without CSIT.
pub fn gdof_nocsit(spec: &NetworkSpec) -> Result<GdofRegion> {
    require_unit_direct_links(spec)?;
    let d = derived_dims(&spec.antennas);
    let mi = d.m_i as f64;
    let cross = spec.levels.alpha_i * mi + spec.w * spec.levels.alpha_s * mi;
    Ok(GdofRegion {
        dof_dl_max: d.m_dl_min as f64,
        dof_ul_max: (d.m_ul_min as f64).min(cross),
        dof_sum_max: dl_receiver_prelog(spec) + side_prelog(spec),
    })
}

fn ratio(m: usize, n: usize) -> f64 {
    m.max(n) as f64 / m.min(n) as f64
}

/// Sum GDoF per antenna for `M_dl = M_ul = m`, `N_dl = N_ul = n`, with CSIT.
pub fn sum_gdof_per_antenna_case_a(m: usize, n: usize, alpha_i: f64, w: f64, alpha_s: f64) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidConfig("antenna counts must be >= 1".into()));
    }
    let q = ratio(m, n);
    let ws = w * alpha_s;
    Ok(if alpha_i < 1.0 {
        2f64.min(2.0 - pos(2.0 - q) * alpha_i + ws)
    } else {
        2f64.min(alpha_i + q - 1.0 + ws)
    })
}

fn check_case_b(a: &AntennaConfig) -> Result<()> {
    a.validate()?;
    if a.m_dl < a.m_ul.max(a.n_dl) || a.n_ul < a.m_ul.max(a.n_dl) {
        return Err(Error::OutOfScope(format!(
            "case B needs M_dl, N_ul >= M_ul, N_dl, got {:?}",
            a.as_tuple()
        )));
    }
    Ok(())
}

fn check_case_a(a: &AntennaConfig) -> Result<()> {
    a.validate()?;
    if a.m_dl != a.m_ul || a.n_dl != a.n_ul {
        return Err(Error::OutOfScope(format!(
            "case A needs M_dl = M_ul and N_dl = N_ul, got {:?}",
            a.as_tuple()
        )));
    }
    Ok(())
}

/// Sum GDoF per `m_I` antennas when the base station has at least as many
/// antennas as either mobile, with CSIT.
pub fn sum_gdof_per_antenna_case_b(a: &AntennaConfig, alpha_i: f64, w: f64, alpha_s: f64) -> Result<f64> {
    check_case_b(a)?;
    let d = derived_dims(a);
    let q = d.m_x as f64 / d.m_i as f64;
    let ws = w * alpha_s;
    Ok(if alpha_i < 1.0 {
        (q + 1.0).min(q + 1.0 - alpha_i + ws)
    } else {
        (q + 1.0).min(q - 1.0 + alpha_i + ws)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GdofCase {
    A,
    B,
}

/// Smallest `W` that reaches the no-interference sum GDoF.
///
/// Without CSIT only `alpha_i = 1` is covered.
pub fn required_w_gdof(a: &AntennaConfig, alpha_i: f64, alpha_s: f64, csit: bool, case: GdofCase) -> Result<f64> {
    if !(alpha_s > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha_s must be > 0, got {alpha_s}")));
    }
    if !(alpha_i >= 0.0) {
        return Err(Error::InvalidArgument(format!("alpha_i must be >= 0, got {alpha_i}")));
    }
    if !csit && alpha_i != 1.0 {
        return Err(Error::OutOfScope(format!(
            "required bandwidth without CSIT is only available for alpha_i = 1, got {alpha_i}"
        )));
    }
    match case {
        GdofCase::A => {
            check_case_a(a)?;
            let (m, n) = (a.m_dl, a.n_dl);
            let q = ratio(m, n);
            Ok(match (csit, alpha_i < 1.0) {
                (true, true) => alpha_i / alpha_s * pos(2.0 - q),
                (true, false) => pos(3.0 - q - alpha_i) / alpha_s,
                (false, _) if n >= m => pos(2.0 - n as f64 / m as f64) / alpha_s,
                (false, _) => 1.0 / alpha_s,
            })
        }
        GdofCase::B => {
            check_case_b(a)?;
            Ok(match (csit, alpha_i < 1.0) {
                (true, true) => alpha_i / alpha_s,
                (true, false) => pos(2.0 - alpha_i) / alpha_s,
                (false, _) if a.n_dl >= a.m_ul => 1.0 / alpha_s,
                (false, _) => a.m_ul as f64 / (a.n_dl as f64 * alpha_s),
            })
        }
    }
}

/// No-interference sum GDoF: `2 min(M, N)` for case A and `m_X + m_I` for
/// case B.
pub fn no_interference_sum_gdof(a: &AntennaConfig, case: GdofCase) -> Result<f64> {
    match case {
        GdofCase::A => {
            check_case_a(a)?;
            Ok(2.0 * a.m_dl.min(a.n_dl) as f64)
        }
        GdofCase::B => {
            check_case_b(a)?;
            let d = derived_dims(a);
            Ok((d.m_x + d.m_i) as f64)
        }
    }
}
