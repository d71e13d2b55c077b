//! Rayleigh fading realizations and the complex-matrix kernels used by the
//! capacity expressions.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AntennaConfig, LinkLevels};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

pub const HERMITIAN_TOL: f64 = 1e-9;
pub const MAX_CONDITION: f64 = 1e12;

/// One draw of `{H_dl, H_ul, H_I, H_S}`. `h_i` and `h_s` both map the uplink
/// mobile's antennas to the downlink mobile's antennas; `h_s` is the
/// side-channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h_dl: CMat,
    pub h_ul: CMat,
    pub h_i: CMat,
    pub h_s: CMat,
}

impl ChannelRealization {
    /// Real scalar channels for the single-antenna case.
    pub fn siso(h_dl: f64, h_ul: f64, h_i: f64, h_s: f64) -> Self {
        let s = |v: f64| CMat::from_element(1, 1, C64::new(v, 0.0));
        Self { h_dl: s(h_dl), h_ul: s(h_ul), h_i: s(h_i), h_s: s(h_s) }
    }

    pub fn antennas(&self) -> AntennaConfig {
        AntennaConfig {
            m_dl: self.h_dl.ncols(),
            n_dl: self.h_dl.nrows(),
            m_ul: self.h_ul.ncols(),
            n_ul: self.h_ul.nrows(),
        }
    }

    /// Checks that the four matrices describe one consistent antenna
    /// configuration and returns it.
    pub fn check_dims(&self) -> Result<AntennaConfig> {
        let a = self.antennas();
        a.validate()
            .map_err(|_| Error::Dimension("empty channel matrix".into()))?;
        for (name, m) in [("h_i", &self.h_i), ("h_s", &self.h_s)] {
            if m.nrows() != a.n_dl || m.ncols() != a.m_ul {
                return Err(Error::Dimension(format!(
                    "{name} is {}x{}, expected {}x{} (N_dl x M_ul)",
                    m.nrows(),
                    m.ncols(),
                    a.n_dl,
                    a.m_ul
                )));
            }
        }
        Ok(a)
    }
}

/// Linear per-link SNR/INR values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrPoint {
    pub rho_dl: f64,
    pub rho_ul: f64,
    pub rho_i: f64,
    pub rho_s: f64,
}

impl SnrPoint {
    pub fn uniform(rho: f64) -> Self {
        Self { rho_dl: rho, rho_ul: rho, rho_i: rho, rho_s: rho }
    }

    pub fn validate(&self) -> Result<()> {
        for v in [self.rho_dl, self.rho_ul, self.rho_i, self.rho_s] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidArgument(format!("SNR must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

pub fn snrs_from_levels(rho: f64, levels: &LinkLevels) -> Result<SnrPoint> {
    if !(rho > 1.0 && rho.is_finite()) {
        return Err(Error::InvalidArgument(format!("nominal SNR must exceed 1, got {rho}")));
    }
    Ok(SnrPoint {
        rho_dl: rho.powf(levels.alpha_dl),
        rho_ul: rho.powf(levels.alpha_ul),
        rho_i: rho.powf(levels.alpha_i),
        rho_s: rho.powf(levels.alpha_s),
    })
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn cn01<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn cn_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| cn01(rng))
}

/// Draws i.i.d. CN(0, 1) entries for all four matrices.
pub fn sample_rayleigh<R: Rng + ?Sized>(a: &AntennaConfig, rng: &mut R) -> ChannelRealization {
    ChannelRealization {
        h_dl: cn_matrix(a.n_dl, a.m_dl, rng),
        h_ul: cn_matrix(a.n_ul, a.m_ul, rng),
        h_i: cn_matrix(a.n_dl, a.m_ul, rng),
        h_s: cn_matrix(a.n_dl, a.m_ul, rng),
    }
}

/// `H H^dagger`.
pub fn gram(h: &CMat) -> CMat {
    h * h.adjoint()
}

/// `H^dagger H`.
pub fn gram_t(h: &CMat) -> CMat {
    h.adjoint() * h
}

fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Symmetrized copy `(A + A^dagger)/2`, rejecting inputs whose asymmetry
/// exceeds the Hermitian tolerance relative to `max(1, max|a_ij|)`.
pub fn hermitian_part(a: &CMat) -> Result<CMat> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", a.nrows(), a.ncols())));
    }
    let adj = a.adjoint();
    let asym = max_abs(&(a - &adj));
    if asym > HERMITIAN_TOL * max_abs(a).max(1.0) {
        return Err(Error::NotHermitian(asym));
    }
    Ok((a + adj).scale(0.5))
}

/// `log2 |I + A|` for Hermitian PSD `A`, via a Cholesky factor of `I + A`.
pub fn logdet_i_plus(a: &CMat) -> Result<f64> {
    let mut m = hermitian_part(a)?;
    for i in 0..m.nrows() {
        m[(i, i)] += C64::new(1.0, 0.0);
    }
    logdet_hpd(m)
}

/// `log2 |A|` for Hermitian positive definite `A`.
fn logdet_hpd(m: CMat) -> Result<f64> {
    let n = m.nrows();
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::IllConditioned(f64::INFINITY))?;
    let l = chol.l_dirty();
    Ok((0..n).map(|i| l[(i, i)].re.log2()).sum::<f64>() * 2.0)
}

/// Cholesky factor of `I + P` for PSD `P`, used for solves. Since the
/// eigenvalues of `I + P` lie in `[1, 1 + tr P]`, `1 + tr P` bounds the
/// condition number; a bound past the limit is confirmed with an exact
/// eigenvalue computation before failing.
pub struct IPlusFactor {
    chol: nalgebra::Cholesky<C64, nalgebra::Dyn>,
}

impl IPlusFactor {
    pub fn new(p: &CMat) -> Result<Self> {
        let mut m = hermitian_part(p)?;
        let n = m.nrows();
        for i in 0..n {
            m[(i, i)] += C64::new(1.0, 0.0);
        }
        let bound = (0..n).map(|i| m[(i, i)].re).sum::<f64>();
        if bound > MAX_CONDITION {
            let ev = nalgebra::SymmetricEigen::new(m.clone()).eigenvalues;
            let hi = ev.iter().cloned().fold(f64::MIN, f64::max);
            let lo = ev.iter().cloned().fold(f64::MAX, f64::min);
            let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
            if cond > MAX_CONDITION {
                return Err(Error::IllConditioned(cond));
            }
        }
        let chol = m.cholesky().ok_or(Error::IllConditioned(f64::INFINITY))?;
        Ok(Self { chol })
    }

    /// `(I + P)^{-1} B`.
    pub fn solve(&self, b: &CMat) -> CMat {
        self.chol.solve(b)
    }

    /// `H (I + P)^{-1} H^dagger`, symmetrized.
    pub fn sandwich(&self, h: &CMat) -> CMat {
        let x = self.solve(&h.adjoint());
        let s = h * x;
        (&s + s.adjoint()).scale(0.5)
    }
}

/// Checks `|I + (I + G_dl)^{-1} G_ul| <= 2^n` for `G_ul <= G_dl`.
///
/// The determinant is evaluated as `prod (1 + mu_i)` over the eigenvalues of
/// the whitened matrix `L^{-1} G_ul L^{-dagger}` with `L L^dagger = I + G_dl`.
pub fn psd_gap_lemma_check(g_dl: &CMat, g_ul: &CMat) -> Result<bool> {
    let g_ul = hermitian_part(g_ul)?;
    let n = g_ul.nrows();
    if g_dl.nrows() != n {
        return Err(Error::Dimension("G_dl and G_ul differ in size".into()));
    }
    let f = IPlusFactor::new(g_dl)?;
    let l = f.chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or(Error::IllConditioned(f64::INFINITY))?;
    let w = &linv * g_ul * linv.adjoint();
    let w = (&w + w.adjoint()).scale(0.5);
    let ev = nalgebra::SymmetricEigen::new(w).eigenvalues;
    let mut log_det = 0.0;
    for mu in ev.iter() {
        let t = 1.0 + mu;
        if t <= 0.0 {
            return Ok(false);
        }
        log_det += t.log2();
    }
    Ok(log_det <= n as f64 + HERMITIAN_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn diag(v: &[f64]) -> CMat {
        let mut m = CMat::zeros(v.len(), v.len());
        for (i, x) in v.iter().enumerate() {
            m[(i, i)] = C64::new(*x, 0.0);
        }
        m
    }

    #[test]
    fn logdet_examples() {
        assert_eq!(logdet_i_plus(&CMat::zeros(3, 3)).unwrap(), 0.0);
        assert!((logdet_i_plus(&diag(&[1.0, 3.0])).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn logdet_rejects_non_hermitian() {
        let mut m = diag(&[1.0, 1.0]);
        m[(0, 1)] = C64::new(0.5, 0.0);
        assert!(matches!(logdet_i_plus(&m), Err(Error::NotHermitian(_))));
        assert!(matches!(logdet_i_plus(&CMat::zeros(2, 3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn snr_levels() {
        let l = LinkLevels { alpha_dl: 1.0, alpha_ul: 1.0, alpha_i: 0.5, alpha_s: 1.0 };
        let s = snrs_from_levels(100.0, &l).unwrap();
        assert!((s.rho_i - 10.0).abs() < 1e-12);
        assert_eq!(s.rho_dl, 100.0);
        let z = snrs_from_levels(50.0, &LinkLevels { alpha_i: 0.0, ..l }).unwrap();
        assert_eq!(z.rho_i, 1.0);
        let big = snrs_from_levels(1e3, &LinkLevels { alpha_i: 2.0, ..l }).unwrap();
        assert!((big.rho_i - 1e6).abs() < 1e-6);
        assert!(snrs_from_levels(1.0, &l).is_err());
    }

    #[test]
    fn sampling_shapes_and_determinism() {
        let a = AntennaConfig::new(3, 2, 4, 5).unwrap();
        let h1 = sample_rayleigh(&a, &mut ChaCha20Rng::seed_from_u64(7));
        let h2 = sample_rayleigh(&a, &mut ChaCha20Rng::seed_from_u64(7));
        assert_eq!(h1, h2);
        assert_eq!(h1.h_i.shape(), (2, 4));
        assert_eq!(h1.h_s.shape(), (2, 4));
        assert_eq!(h1.h_dl.shape(), (2, 3));
        assert_eq!(h1.h_ul.shape(), (5, 4));
        assert_eq!(h1.check_dims().unwrap(), a);
    }

    #[test]
    fn psd_lemma_examples() {
        let i2 = diag(&[1.0, 1.0]);
        assert!(psd_gap_lemma_check(&i2, &i2).unwrap());
        assert!(psd_gap_lemma_check(&i2, &CMat::zeros(2, 2)).unwrap());
    }

    #[test]
    fn ill_conditioned_inverse_is_an_error() {
        let p = diag(&[1e13, 0.0]);
        assert!(matches!(IPlusFactor::new(&p), Err(Error::IllConditioned(_))));
        assert!(IPlusFactor::new(&diag(&[1e6, 0.0])).is_ok());
    }
}
