//! Network configuration types and the antenna bookkeeping shared by every
//! other module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Antenna counts in the fixed tuple order `(M_dl, N_dl, M_ul, N_ul)`.
///
/// `m_dl`/`n_ul` live at the full-duplex base station; `n_dl` is the
/// downlink mobile and `m_ul` the uplink mobile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AntennaConfig {
    pub m_dl: usize,
    pub n_dl: usize,
    pub m_ul: usize,
    pub n_ul: usize,
}

impl AntennaConfig {
    pub fn new(m_dl: usize, n_dl: usize, m_ul: usize, n_ul: usize) -> Result<Self> {
        let a = Self { m_dl, n_dl, m_ul, n_ul };
        a.validate()?;
        Ok(a)
    }

    /// The symmetric `(M, N_dl, M_ul, M)` family.
    pub fn symmetric_bs(m: usize, n_dl: usize, m_ul: usize) -> Result<Self> {
        Self::new(m, n_dl, m_ul, m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_dl == 0 || self.n_dl == 0 || self.m_ul == 0 || self.n_ul == 0 {
            return Err(Error::InvalidConfig(format!(
                "antenna counts must be >= 1, got {:?}",
                self.as_tuple()
            )));
        }
        Ok(())
    }

    pub fn as_tuple(&self) -> (usize, usize, usize, usize) {
        (self.m_dl, self.n_dl, self.m_ul, self.n_ul)
    }

    pub fn dims(&self) -> DerivedDims {
        derived_dims(self)
    }
}

/// Link strength exponents: `rho_i = rho^alpha_i` for nominal SNR `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkLevels {
    pub alpha_dl: f64,
    pub alpha_ul: f64,
    pub alpha_i: f64,
    pub alpha_s: f64,
}

impl Default for LinkLevels {
    fn default() -> Self {
        Self { alpha_dl: 1.0, alpha_ul: 1.0, alpha_i: 1.0, alpha_s: 1.0 }
    }
}

impl LinkLevels {
    pub fn new(alpha_dl: f64, alpha_ul: f64, alpha_i: f64, alpha_s: f64) -> Result<Self> {
        let l = Self { alpha_dl, alpha_ul, alpha_i, alpha_s };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha_dl", self.alpha_dl),
            ("alpha_ul", self.alpha_ul),
            ("alpha_i", self.alpha_i),
            ("alpha_s", self.alpha_s),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub antennas: AntennaConfig,
    pub levels: LinkLevels,
    /// Side-channel bandwidth over main-channel bandwidth. Zero disables the
    /// side-channel.
    pub w: f64,
}

impl NetworkSpec {
    pub fn new(antennas: AntennaConfig, levels: LinkLevels, w: f64) -> Result<Self> {
        let s = Self { antennas, levels, w };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.antennas.validate()?;
        self.levels.validate()?;
        if !(self.w.is_finite() && self.w >= 0.0) {
            return Err(Error::InvalidConfig(format!("w must be finite and >= 0, got {}", self.w)));
        }
        Ok(())
    }

    /// Unit link levels except the side-channel, the setting of most closed
    /// forms.
    pub fn unit(antennas: AntennaConfig, w: f64, alpha_s: f64) -> Result<Self> {
        Self::new(antennas, LinkLevels { alpha_s, ..LinkLevels::default() }, w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedDims {
    pub m_dl_min: usize,
    pub m_ul_min: usize,
    pub m_i: usize,
    pub m_x: usize,
}

pub fn derived_dims(a: &AntennaConfig) -> DerivedDims {
    DerivedDims {
        m_dl_min: a.m_dl.min(a.n_dl),
        m_ul_min: a.m_ul.min(a.n_ul),
        m_i: a.m_ul.min(a.n_dl),
        m_x: a.m_ul.max(a.n_dl),
    }
}

#[inline]
pub(crate) fn pos(x: f64) -> f64 {
    x.max(0.0)
}

/// One-pair spatial-min: `min{x, x1} * y1^+`.
pub fn f_spatial1(x: usize, y1: f64, x1: usize) -> f64 {
    x.min(x1) as f64 * pos(y1)
}

/// Two-slope spatial-min `f(x, (y1, x1), (y2, x2))`.
///
/// The first `min{x, x1}` receive dimensions are filled at level `y1`, the
/// next `min{(x - x1)^+, x2}` at level `y2`. Callers must pass the stronger
/// level first.
pub fn f_spatial(x: usize, y1: f64, x1: usize, y2: f64, x2: usize) -> Result<f64> {
    if y1 < y2 {
        return Err(Error::InvalidArgument(format!(
            "f_spatial needs y1 >= y2, got y1 = {y1}, y2 = {y2}"
        )));
    }
    Ok(f_spatial1(x, y1, x1) + x.saturating_sub(x1).min(x2) as f64 * pos(y2))
}

/// Same as [`f_spatial`] but orders the two pairs by level first.
pub fn f_spatial_sorted(x: usize, a: (f64, usize), b: (f64, usize)) -> f64 {
    let (hi, lo) = if a.0 >= b.0 { (a, b) } else { (b, a) };
    f_spatial(x, hi.0, hi.1, lo.0, lo.1).expect("pairs sorted by level")
}
