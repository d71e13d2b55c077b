//! Per-realization rate-region bounds.
//!
//! Every function returns a [`RateBounds`] triple describing the region
//! `{R_dl <= c_dl, R_ul <= c_ul, R_dl + R_ul <= c_sum}` in bits/s/Hz of main
//! channel. Constraints are reported raw; the sum constraint is not clipped
//! to `c_dl + c_ul`.

use serde::{Deserialize, Serialize};

use crate::channel::{gram, gram_t, logdet_i_plus, CMat, ChannelRealization, IPlusFactor, SnrPoint};
use crate::error::{Error, Result};
use crate::model::{derived_dims, AntennaConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBounds {
    pub c_dl: f64,
    pub c_ul: f64,
    pub c_sum: f64,
}

impl RateBounds {
    /// Whether `(r_dl, r_ul)` lies in the region.
    pub fn contains(&self, r_dl: f64, r_ul: f64) -> bool {
        r_dl <= self.c_dl && r_ul <= self.c_ul && r_dl + r_ul <= self.c_sum
    }

    /// Largest achievable sum rate inside the region.
    pub fn max_sum_rate(&self) -> f64 {
        self.c_sum.min(self.c_dl + self.c_ul)
    }

    fn sub_clamped(&self, d_dl: f64, d_ul: f64, d_sum: f64) -> Self {
        Self {
            c_dl: (self.c_dl - d_dl).max(0.0),
            c_ul: (self.c_ul - d_ul).max(0.0),
            c_sum: (self.c_sum - d_sum).max(0.0),
        }
    }

    pub fn le(&self, other: &Self, tol: f64) -> bool {
        self.c_dl <= other.c_dl + tol && self.c_ul <= other.c_ul + tol && self.c_sum <= other.c_sum + tol
    }
}

/// Fraction `lambda` of uplink power sent on the side-channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit {
    pub lambda: f64,
}

impl Default for PowerSplit {
    fn default() -> Self {
        Self { lambda: 0.5 }
    }
}

impl PowerSplit {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!("lambda must lie in [0, 1], got {lambda}")));
        }
        Ok(Self { lambda })
    }

    pub fn lambda_bar(&self) -> f64 {
        1.0 - self.lambda
    }
}

fn check_inputs(h: &ChannelRealization, snr: &SnrPoint, w: f64) -> Result<AntennaConfig> {
    let a = h.check_dims()?;
    snr.validate()?;
    if !(w.is_finite() && w >= 0.0) {
        return Err(Error::InvalidArgument(format!("w must be finite and >= 0, got {w}")));
    }
    Ok(a)
}

/// `w log2 |I + (p / w) H H^dagger|`, defined as zero for `w = 0`.
fn side_term(w: f64, p: f64, h_s: &CMat) -> Result<f64> {
    if w == 0.0 {
        return Ok(0.0);
    }
    Ok(w * logdet_i_plus(&gram(h_s).scale(p / w))?)
}

/// Outer bound on the capacity region.
pub fn outer_bound(h: &ChannelRealization, snr: &SnrPoint, w: f64, split: &PowerSplit) -> Result<RateBounds> {
    let a = check_inputs(h, snr, w)?;
    let sum_wo_const = high_snr_sum_unchecked(h, snr, w, split)?;
    Ok(RateBounds {
        c_dl: logdet_i_plus(&gram(&h.h_dl).scale(snr.rho_dl))?,
        c_ul: logdet_i_plus(&gram(&h.h_ul).scale(split.lambda_bar() * snr.rho_ul))?,
        c_sum: sum_wo_const + a.n_dl as f64,
    })
}

fn high_snr_sum_unchecked(h: &ChannelRealization, snr: &SnrPoint, w: f64, split: &PowerSplit) -> Result<f64> {
    let lb = split.lambda_bar();
    let g_dl = gram(&h.h_dl).scale(snr.rho_dl);
    let g_i = gram(&h.h_i).scale(lb * snr.rho_i);
    let at_dl = logdet_i_plus(&(g_dl + g_i))?;
    let side = side_term(w, split.lambda * snr.rho_s, &h.h_s)?;
    let f = IPlusFactor::new(&gram_t(&h.h_i).scale(lb * snr.rho_i))?;
    let at_ul = logdet_i_plus(&f.sandwich(&h.h_ul).scale(lb * snr.rho_ul))?;
    Ok(at_dl + side + at_ul)
}

/// High-SNR sum-capacity approximation: the outer sum bound without its
/// additive `N_dl` constant.
pub fn high_snr_sum(h: &ChannelRealization, snr: &SnrPoint, w: f64, split: &PowerSplit) -> Result<f64> {
    check_inputs(h, snr, w)?;
    high_snr_sum_unchecked(h, snr, w, split)
}

/// High-SNR capacity region: outer `c_dl`, `c_ul` with the high-SNR sum.
pub fn high_snr_region(h: &ChannelRealization, snr: &SnrPoint, w: f64, split: &PowerSplit) -> Result<RateBounds> {
    let o = outer_bound(h, snr, w, split)?;
    Ok(RateBounds { c_sum: o.c_sum - o_n_dl(h), ..o })
}

fn o_n_dl(h: &ChannelRealization) -> f64 {
    h.h_dl.nrows() as f64
}

/// Gap constants `(c1, c2)` between the outer and bin-and-cancel bounds.
pub fn gap_constants(a: &AntennaConfig, w: f64) -> (f64, f64) {
    let d = derived_dims(a);
    let mdl = a.m_dl as f64;
    let mul = a.m_ul as f64;
    let c1 = (a.m_dl + a.m_ul).min(a.n_dl) as f64 * mdl.max(mul).log2() + d.m_i as f64 * (1.0 + 1.0 / mul).log2();
    let c2 = (d.m_ul_min as f64 + w * d.m_i as f64) * mul.log2() + d.m_x as f64 * (mul + 1.0).log2();
    (c1, c2)
}

/// Bin-and-cancel inner bound: outer bound minus `(c1, c2, c1 + c2)`,
/// clamped at zero.
pub fn inner_bound_bc(h: &ChannelRealization, snr: &SnrPoint, w: f64, split: &PowerSplit) -> Result<RateBounds> {
    let o = outer_bound(h, snr, w, split)?;
    let (c1, c2) = gap_constants(&h.antennas(), w);
    Ok(o.sub_clamped(c1, c2, c1 + c2))
}

/// The individual mutual-information terms of the Gaussian bin-and-cancel
/// scheme, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiTerms {
    /// `I(X_dl; Y_dl | S_ul)`
    pub dl_given_common: f64,
    /// `I(S_ul, U_ul; Y_ul)`
    pub ul_total: f64,
    /// `I(X_S; Y_S)` including the bandwidth factor `w`
    pub side: f64,
    /// `I(U_ul; Y_ul | S_ul)`
    pub ul_private: f64,
    /// `I(S_ul; Y_dl | X_dl)`
    pub common_at_dl: f64,
    /// `I(X_dl, S_ul; Y_dl)`
    pub dl_and_common: f64,
}

/// Evaluates all mutual-information terms with the scheme's fixed input
/// covariances: equal power on the downlink and common uplink part, private
/// uplink covariance `(1/M_ul)(I + lambda_bar rho_I H_I^dagger H_I)^{-1}`.
pub fn mi_terms(h: &ChannelRealization, snr: &SnrPoint, w: f64, split: &PowerSplit) -> Result<MiTerms> {
    let a = check_inputs(h, snr, w)?;
    if w > 0.0 && !(split.lambda > 0.0 && split.lambda < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "exact MI region needs 0 < lambda < 1 when w > 0, got {}",
            split.lambda
        )));
    }
    let lb = split.lambda_bar();
    let mdl = a.m_dl as f64;
    let mul = a.m_ul as f64;

    let f = IPlusFactor::new(&gram_t(&h.h_i).scale(lb * snr.rho_i))?;
    // H K_u H^dagger with K_u = (1/M_ul)(I + ...)^{-1}
    let i_priv = f.sandwich(&h.h_i).scale(lb * snr.rho_i / mul);
    let ul_priv = f.sandwich(&h.h_ul).scale(lb * snr.rho_ul / mul);

    let g_dl = gram(&h.h_dl).scale(snr.rho_dl / mdl);
    let g_i = gram(&h.h_i).scale(lb * snr.rho_i / mul);

    let noise_plus_priv = logdet_i_plus(&i_priv)?;
    Ok(MiTerms {
        dl_given_common: logdet_i_plus(&(&g_dl + &i_priv))? - noise_plus_priv,
        ul_total: logdet_i_plus(&gram(&h.h_ul).scale(lb * snr.rho_ul / mul))?,
        side: side_term(w, split.lambda * snr.rho_s / mul, &h.h_s)?,
        ul_private: logdet_i_plus(&ul_priv)?,
        common_at_dl: logdet_i_plus(&g_i)? - noise_plus_priv,
        dl_and_common: logdet_i_plus(&(&g_dl + &g_i))? - noise_plus_priv,
    })
}

/// Exact achievable region of the Gaussian bin-and-cancel scheme.
pub fn achievable_mi_exact(h: &ChannelRealization, snr: &SnrPoint, w: f64, split: &PowerSplit) -> Result<RateBounds> {
    let t = mi_terms(h, snr, w, split)?;
    Ok(RateBounds {
        c_dl: t.dl_given_common.max(0.0),
        c_ul: t.ul_total.min(t.ul_private + t.common_at_dl + t.side).max(0.0),
        c_sum: (t.ul_private + t.dl_and_common + t.side).max(0.0),
    })
}

/// Scans `lambda` over `{0.05, 0.10, ..., 0.95}` and keeps the split whose
/// exact region has the largest sum rate.
pub fn best_split_exact(h: &ChannelRealization, snr: &SnrPoint, w: f64) -> Result<(PowerSplit, RateBounds)> {
    let mut best: Option<(PowerSplit, RateBounds)> = None;
    for k in 1..=19 {
        let s = PowerSplit::new(k as f64 * 0.05)?;
        let r = achievable_mi_exact(h, snr, w, &s)?;
        if best.as_ref().is_none_or(|b| r.max_sum_rate() > b.1.max_sum_rate()) {
            best = Some((s, r));
        }
    }
    Ok(best.expect("non-empty grid"))
}

/// Achievable region without transmitter CSI, all inputs at equal power.
///
/// With `for_outage` the uplink constraint keeps only the direct uplink
/// term: failing to decode the uplink message at the downlink mobile is not
/// an error event there.
pub fn nocsit_region(
    h: &ChannelRealization,
    snr: &SnrPoint,
    w: f64,
    split: &PowerSplit,
    for_outage: bool,
) -> Result<RateBounds> {
    let a = check_inputs(h, snr, w)?;
    let lb = split.lambda_bar();
    let mdl = a.m_dl as f64;
    let mul = a.m_ul as f64;
    let g_dl = gram(&h.h_dl).scale(snr.rho_dl / mdl);
    let g_i = gram(&h.h_i).scale(lb * snr.rho_i / mul);
    let side = side_term(w, split.lambda * snr.rho_s / mul, &h.h_s)?;
    let ul_direct = logdet_i_plus(&gram(&h.h_ul).scale(lb * snr.rho_ul / mul))?;
    let c_ul = if for_outage {
        ul_direct
    } else {
        ul_direct.min(logdet_i_plus(&g_i)? + side)
    };
    Ok(RateBounds {
        c_dl: logdet_i_plus(&g_dl)?,
        c_ul,
        c_sum: logdet_i_plus(&(&g_dl + &g_i))? + side,
    })
}
