//! Monte Carlo outage probability under i.i.d. Rayleigh fading.
//!
//! An outage at nominal SNR `rho` is the event that the rate pair
//! `(r_dl log2 rho, r_ul log2 rho)` lies outside the instantaneous region:
//! the high-SNR capacity region with CSIT, or the no-CSIT region without
//! the uplink cross constraint otherwise.
//!
//! Trials at each SNR are split into a fixed number of chunks, each driven
//! by its own ChaCha stream derived from the master seed, and chunk counts
//! are summed in chunk order. Results therefore do not depend on the
//! number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{high_snr_region, nocsit_region, PowerSplit};
use crate::channel::{db_to_linear, sample_rayleigh, snrs_from_levels};
use crate::error::{Error, Result};
use crate::model::NetworkSpec;

const CHUNKS: u64 = 64;
const WILSON_Z: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageConfig {
    pub spec: NetworkSpec,
    pub r_dl: f64,
    pub r_ul: f64,
    pub rho_grid_db: Vec<f64>,
    pub trials_per_rho: u64,
    /// Side-channel power fraction, in `(0, 1]`.
    pub lambda: f64,
    pub csit: bool,
    pub seed: u64,
}

impl OutageConfig {
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.trials_per_rho == 0 {
            return Err(Error::InvalidConfig("trials_per_rho must be >= 1".into()));
        }
        if self.rho_grid_db.is_empty() || self.rho_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("rho grid must be non-empty and strictly increasing".into()));
        }
        if self.rho_grid_db.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
            return Err(Error::InvalidConfig("rho grid must lie above 0 dB".into()));
        }
        if !(self.r_dl >= 0.0 && self.r_ul >= 0.0 && self.r_dl.is_finite() && self.r_ul.is_finite()) {
            return Err(Error::InvalidConfig(format!("bad multiplexing gains ({}, {})", self.r_dl, self.r_ul)));
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(Error::InvalidConfig(format!("lambda must lie in (0, 1], got {}", self.lambda)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutagePoint {
    pub rho_db: f64,
    pub trials: u64,
    pub outages: u64,
    pub p: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl OutagePoint {
    /// Binomial standard error of `p`.
    pub fn std_err(&self) -> f64 {
        (self.p * (1.0 - self.p) / self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    /// Root-mean-square residual of the fit in `log10 P`.
    pub residual: f64,
    /// SNR range (dB) of the points used.
    pub window: (f64, f64),
    pub used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageEstimate {
    pub points: Vec<OutagePoint>,
    pub fit: Option<SlopeFit>,
    /// Degenerate grids (all outage, no outage, too few usable points).
    pub flags: Vec<String>,
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = z * z;
    let den = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / den;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / den;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

fn count_chunk(cfg: &OutageConfig, rho_idx: usize, chunk: u64, trials: u64) -> Result<u64> {
    let rho = db_to_linear(cfg.rho_grid_db[rho_idx]);
    let snr = snrs_from_levels(rho, &cfg.spec.levels)?;
    let split = PowerSplit::new(cfg.lambda)?;
    let (r_dl, r_ul) = (cfg.r_dl * rho.log2(), cfg.r_ul * rho.log2());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(rho_idx as u64 * CHUNKS + chunk);
    let a = cfg.spec.antennas;
    let mut out = 0;
    for _ in 0..trials {
        let h = sample_rayleigh(&a, &mut rng);
        let region = if cfg.csit {
            high_snr_region(&h, &snr, cfg.spec.w, &split)?
        } else {
            nocsit_region(&h, &snr, cfg.spec.w, &split, true)?
        };
        if !region.contains(r_dl, r_ul) {
            out += 1;
        }
    }
    Ok(out)
}

/// Runs the simulation on the current rayon pool.
pub fn simulate_outage(cfg: &OutageConfig) -> Result<OutageEstimate> {
    cfg.validate()?;
    let n = cfg.trials_per_rho;
    let mut points = Vec::with_capacity(cfg.rho_grid_db.len());
    let mut flags = Vec::new();
    for (i, &rho_db) in cfg.rho_grid_db.iter().enumerate() {
        let sizes: Vec<(u64, u64)> = (0..CHUNKS)
            .map(|c| (c, n / CHUNKS + u64::from(c < n % CHUNKS)))
            .filter(|&(_, t)| t > 0)
            .collect();
        let counts: Result<Vec<u64>> = sizes.par_iter().map(|&(c, t)| count_chunk(cfg, i, c, t)).collect();
        let outages: u64 = counts?.iter().sum();
        let (ci_lo, ci_hi) = wilson_interval(outages, n, WILSON_Z);
        if outages == 0 {
            flags.push(format!("no outage observed at {rho_db} dB"));
        } else if outages == n {
            flags.push(format!("every trial in outage at {rho_db} dB"));
        }
        points.push(OutagePoint { rho_db, trials: n, outages, p: outages as f64 / n as f64, ci_lo, ci_hi });
    }
    let mut est = OutageEstimate { points, fit: None, flags };
    match fit_diversity_slope(&est, None) {
        Ok(f) => est.fit = Some(f),
        Err(e) => est.flags.push(format!("slope not fitted: {e}")),
    }
    Ok(est)
}

/// Least-squares slope of `-log10 P` against `log10 rho` over the points
/// with `10 / trials <= P <= 0.5`, optionally restricted to an SNR window
/// in dB. Rates scale as `log2 rho`, so the slope is directly a diversity
/// order.
pub fn fit_diversity_slope(est: &OutageEstimate, rho_window_db: Option<(f64, f64)>) -> Result<SlopeFit> {
    let pts: Vec<&OutagePoint> = est
        .points
        .iter()
        .filter(|p| rho_window_db.is_none_or(|(lo, hi)| p.rho_db >= lo && p.rho_db <= hi))
        .filter(|p| p.p <= 0.5 && p.p >= 10.0 / p.trials as f64 && p.p > 0.0)
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!("{} usable SNR points, need 3", pts.len())));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.rho_db / 10.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| -p.p.log10()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum::<f64>() / n).sqrt();
    Ok(SlopeFit {
        slope,
        residual,
        window: (pts[0].rho_db, pts[pts.len() - 1].rho_db),
        used: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AntennaConfig;

    fn synthetic(f: impl Fn(f64) -> f64, trials: u64) -> OutageEstimate {
        let points = (0..6)
            .map(|i| {
                let rho_db = 10.0 + 5.0 * i as f64;
                let p = f(db_to_linear(rho_db));
                OutagePoint { rho_db, trials, outages: (p * trials as f64) as u64, p, ci_lo: p, ci_hi: p }
            })
            .collect();
        OutageEstimate { points, fit: None, flags: Vec::new() }
    }

    #[test]
    fn exact_power_laws() {
        let e = synthetic(|r| 1.0 / r, 1_000_000_000);
        assert!((fit_diversity_slope(&e, None).unwrap().slope - 1.0).abs() < 1e-9);
        let e = synthetic(|r| 3.0 / (r * r), 1_000_000_000_000);
        assert!((fit_diversity_slope(&e, None).unwrap().slope - 2.0).abs() < 1e-9);
    }

    #[test]
    fn window_drops_saturated_points() {
        // 0.9 at the first point would bend the fit if kept
        let e = synthetic(|r| if r < 20.0 { 0.9 } else { 10.0 / r }, 1_000_000_000);
        let f = fit_diversity_slope(&e, None).unwrap();
        assert_eq!(f.used, 5);
        assert!((f.slope - 1.0).abs() < 1e-9);
        assert!(fit_diversity_slope(&e, Some((30.0, 35.0))).is_err());
    }

    #[test]
    fn wilson_covers_point_estimate() {
        let (lo, hi) = wilson_interval(30, 100, 1.96);
        assert!(lo < 0.3 && hi > 0.3);
        assert_eq!(wilson_interval(0, 10, 1.96).0, 0.0);
    }

    fn cfg(r: f64, seed: u64) -> OutageConfig {
        OutageConfig {
            spec: NetworkSpec::unit(AntennaConfig::new(1, 1, 1, 1).unwrap(), 0.0, 1.0).unwrap(),
            r_dl: r,
            r_ul: r,
            rho_grid_db: vec![10.0, 20.0],
            trials_per_rho: 2_000,
            lambda: 0.5,
            csit: true,
            seed,
        }
    }

    #[test]
    fn deterministic_and_zero_rate() {
        let a = simulate_outage(&cfg(0.3, 7)).unwrap();
        let b = simulate_outage(&cfg(0.3, 7)).unwrap();
        assert_eq!(a, b);
        let z = simulate_outage(&cfg(0.0, 7)).unwrap();
        assert!(z.points.iter().all(|p| p.outages == 0));
        assert!(z.fit.is_none() && !z.flags.is_empty());
    }

    #[test]
    fn invalid_configs() {
        let mut c = cfg(0.3, 1);
        c.trials_per_rho = 0;
        assert!(simulate_outage(&c).is_err());
        let mut c = cfg(0.3, 1);
        c.rho_grid_db = vec![20.0, 10.0];
        assert!(simulate_outage(&c).is_err());
        let mut c = cfg(0.3, 1);
        c.lambda = 0.0;
        assert!(simulate_outage(&c).is_err());
    }
}
