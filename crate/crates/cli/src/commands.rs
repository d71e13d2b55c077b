use clap::ValueEnum;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use fdnet::capacity::{
    achievable_mi_exact, gap_constants, high_snr_region, inner_bound_bc, nocsit_region, outer_bound, PowerSplit,
};
use fdnet::channel::{db_to_linear, sample_rayleigh, snrs_from_levels};
use fdnet::derived_dims;
use fdnet::dmt::{
    closed_form_general, closed_form_general_dsum, compensate_csit_bandwidth, d_sum_samples, dmt_curve_symmetric,
    interference_free_bandwidth, symmetric_cap, uniform_grid,
};
use fdnet::gdof::{
    gdof_csit, gdof_nocsit, no_interference_sum_gdof, required_w_gdof, sum_gdof_per_antenna_case_a,
    sum_gdof_per_antenna_case_b, GdofCase,
};
use fdnet::outage::{fit_diversity_slope, simulate_outage, OutageConfig};
use fdnet::{Error, PiecewiseLinear, RateBounds};

use crate::config::{antennas, NetConfig, NetFlags};
use crate::output::{num, opt_num, Run, Table};
use crate::Failure;

/// Keeps closed-form lookups that legitimately have no answer out of the
/// error path.
fn optional<T>(r: fdnet::Result<T>, what: &str) -> Result<Option<T>, Failure> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e @ (Error::NoClosedForm(_) | Error::OutOfScope(_))) => {
            eprintln!("note: no {what}: {e}");
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DmtKind {
    /// d(r, r) against r
    #[default]
    Symmetric,
    /// d_sum against r_dl + r_ul
    Sum,
}

#[derive(Debug, Clone, Default, clap::Args, Serialize)]
pub struct DmtFlags {
    #[command(flatten)]
    #[serde(flatten)]
    pub net: NetFlags,
    /// Assume transmitter channel state information
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub csit: Option<bool>,
    #[arg(long, value_enum)]
    pub kind: Option<DmtKind>,
    /// Grid intervals
    #[arg(long)]
    pub points: Option<usize>,
    /// Right end of the grid (default: where the curve reaches zero)
    #[arg(long)]
    pub r_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmtConfig {
    #[serde(flatten)]
    pub net: NetConfig,
    pub csit: bool,
    pub kind: DmtKind,
    pub points: usize,
    pub r_max: Option<f64>,
}

impl Default for DmtConfig {
    fn default() -> Self {
        Self { net: NetConfig::default(), csit: false, kind: DmtKind::Symmetric, points: 200, r_max: None }
    }
}

pub fn dmt(cfg: DmtConfig) -> Result<Run<DmtConfig>, Failure> {
    let spec = cfg.net.spec()?;
    if cfg.points == 0 {
        return Err(Failure::Usage("--points must be >= 1".into()));
    }
    let a = spec.antennas;
    let (lp, closed): (Vec<(f64, f64)>, Option<(PiecewiseLinear, String)>) = match cfg.kind {
        DmtKind::Symmetric => {
            let grid = uniform_grid(cfg.r_max.unwrap_or_else(|| symmetric_cap(&spec)), cfg.points);
            let cf = if cfg.net.unit_levels() {
                optional(closed_form_general(&a, spec.w, cfg.net.alpha_s, cfg.csit), "closed form")?
                    .map(|c| (c.curve, c.regime))
            } else {
                None
            };
            (dmt_curve_symmetric(&spec, cfg.csit, &grid)?, cf)
        }
        DmtKind::Sum => {
            let d = derived_dims(&a);
            let hi = d.m_dl_min as f64 * spec.levels.alpha_dl + d.m_ul_min as f64 * spec.levels.alpha_ul;
            let grid = uniform_grid(cfg.r_max.unwrap_or(hi), cfg.points);
            let cf = if cfg.net.unit_levels() {
                optional(closed_form_general_dsum(&a, spec.w, cfg.net.alpha_s, cfg.csit), "closed form")?
            } else {
                None
            };
            (d_sum_samples(&spec, cfg.csit, &grid)?, cf)
        }
    };
    let mut table = Table::new(&["r", "d_lp", "d_closed_form", "regime"]);
    for (r, d) in lp {
        let c = closed.as_ref().and_then(|(curve, _)| {
            let (_, hi) = curve.domain();
            // closed forms stop where the curve reaches zero
            if r > hi { Some(0.0) } else { curve.eval(r).ok() }
        });
        let label = closed.as_ref().map_or("", |(_, l)| l.as_str());
        table.push(vec![num(r), num(d), opt_num(c), label.to_string()]);
    }
    Ok(Run { command: "dmt", config: cfg, seed: None, table, results: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum CaseArg {
    /// M_dl = M_ul, N_dl = N_ul
    #[value(name = "A", alias = "a")]
    A,
    /// base station at least as large as either mobile
    #[value(name = "B", alias = "b")]
    B,
}

impl From<CaseArg> for GdofCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::A => GdofCase::A,
            CaseArg::B => GdofCase::B,
        }
    }
}

#[derive(Debug, Clone, Default, clap::Args, Serialize)]
pub struct GdofFlags {
    #[command(flatten)]
    #[serde(flatten)]
    pub net: NetFlags,
    /// Add the per-antenna closed form and required bandwidth of this case
    #[arg(long, value_enum)]
    pub case: Option<CaseArg>,
    /// Sweep alpha_i as LO,HI,STEPS instead of using --alpha-i
    #[arg(long, value_delimiter = ',')]
    pub alpha_i_sweep: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GdofConfig {
    #[serde(flatten)]
    pub net: NetConfig,
    pub case: Option<CaseArg>,
    pub alpha_i_sweep: Option<Vec<f64>>,
}

fn sweep(v: &[f64]) -> Result<Vec<f64>, Failure> {
    match *v {
        [lo, hi, n] if n >= 1.0 && n.fract() == 0.0 && hi >= lo => {
            let n = n as usize;
            Ok((0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect())
        }
        _ => Err(Failure::Usage(format!("sweep takes LO,HI,STEPS with HI >= LO and integer STEPS >= 1, got {v:?}"))),
    }
}

pub fn gdof(cfg: GdofConfig) -> Result<Run<GdofConfig>, Failure> {
    let base = cfg.net.spec()?;
    let a = base.antennas;
    let alphas = match &cfg.alpha_i_sweep {
        Some(s) => sweep(s)?,
        None => vec![base.levels.alpha_i],
    };
    let mut table = Table::new(&[
        "alpha_i",
        "dl_csit",
        "ul_csit",
        "sum_csit",
        "dl_nocsit",
        "ul_nocsit",
        "sum_nocsit",
        "per_antenna_csit",
        "required_w_csit",
    ]);
    for alpha_i in alphas {
        let mut spec = base;
        spec.levels.alpha_i = alpha_i;
        spec.validate()?;
        let c = gdof_csit(&spec)?;
        let n = gdof_nocsit(&spec)?;
        let (per, req) = match cfg.case {
            None => (None, None),
            Some(case) => {
                no_interference_sum_gdof(&a, case.into())?;
                let per = match case {
                    CaseArg::A => sum_gdof_per_antenna_case_a(a.m_dl, a.n_dl, alpha_i, spec.w, spec.levels.alpha_s)?,
                    CaseArg::B => sum_gdof_per_antenna_case_b(&a, alpha_i, spec.w, spec.levels.alpha_s)?,
                };
                (Some(per), Some(required_w_gdof(&a, alpha_i, spec.levels.alpha_s, true, case.into())?))
            }
        };
        table.push(vec![
            num(alpha_i),
            num(c.dof_dl_max),
            num(c.dof_ul_max),
            num(c.max_sum()),
            num(n.dof_dl_max),
            num(n.dof_ul_max),
            num(n.max_sum()),
            opt_num(per),
            opt_num(req),
        ]);
    }
    Ok(Run { command: "gdof", config: cfg, seed: None, table, results: None })
}

#[derive(Debug, Clone, Default, clap::Args, Serialize)]
pub struct CapacityFlags {
    #[command(flatten)]
    #[serde(flatten)]
    pub net: NetFlags,
    /// Share of the uplink power spent on the side-channel
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Nominal SNR points in dB
    #[arg(long, value_delimiter = ',')]
    pub snr_db: Option<Vec<f64>>,
    /// Channel realizations to average over
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityConfig {
    #[serde(flatten)]
    pub net: NetConfig,
    pub lambda: f64,
    pub snr_db: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for CapacityConfig {
    fn default() -> Self {
        Self {
            net: NetConfig::default(),
            lambda: 0.5,
            snr_db: vec![10.0, 20.0, 30.0, 40.0],
            samples: 100,
            seed: 1,
        }
    }
}

const BOUNDS: [&str; 5] = ["outer", "exact_mi", "inner_bc", "nocsit", "high_snr"];

pub fn capacity(cfg: CapacityConfig) -> Result<Run<CapacityConfig>, Failure> {
    let spec = cfg.net.spec()?;
    if cfg.samples == 0 || cfg.snr_db.is_empty() {
        return Err(Failure::Usage("need --samples >= 1 and at least one --snr-db value".into()));
    }
    let split = PowerSplit::new(cfg.lambda)?;
    let channels: Vec<_> = (0..cfg.samples as u64)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i);
            sample_rayleigh(&spec.antennas, &mut rng)
        })
        .collect();
    let mut table = Table::new(&["snr_db", "bound", "c_dl", "c_ul", "c_sum"]);
    for &db in &cfg.snr_db {
        let snr = snrs_from_levels(db_to_linear(db), &spec.levels)?;
        let per: Vec<[RateBounds; 5]> = channels
            .par_iter()
            .map(|h| {
                Ok([
                    outer_bound(h, &snr, spec.w, &split)?,
                    achievable_mi_exact(h, &snr, spec.w, &split)?,
                    inner_bound_bc(h, &snr, spec.w, &split)?,
                    nocsit_region(h, &snr, spec.w, &split, false)?,
                    high_snr_region(h, &snr, spec.w, &split)?,
                ])
            })
            .collect::<fdnet::Result<_>>()?;
        let n = per.len() as f64;
        for (k, name) in BOUNDS.iter().enumerate() {
            let mean = |f: fn(&RateBounds) -> f64| per.iter().map(|p| f(&p[k])).sum::<f64>() / n;
            table.push(vec![
                num(db),
                name.to_string(),
                num(mean(|r| r.c_dl)),
                num(mean(|r| r.c_ul)),
                num(mean(|r| r.c_sum)),
            ]);
        }
    }
    let (c1, c2) = gap_constants(&spec.antennas, spec.w);
    let results = json!({ "gap_c1": c1, "gap_c2": c2, "gap_per_dimension": (1.0 + spec.w) * c1.max(c2) });
    eprintln!("seed = {}", cfg.seed);
    let seed = Some(cfg.seed);
    Ok(Run { command: "capacity", config: cfg, seed, table, results: Some(results) })
}

#[derive(Debug, Clone, Default, clap::Args, Serialize)]
pub struct OutageFlags {
    #[command(flatten)]
    #[serde(flatten)]
    pub net: NetFlags,
    /// Downlink multiplexing gain
    #[arg(long)]
    pub r_dl: Option<f64>,
    /// Uplink multiplexing gain
    #[arg(long)]
    pub r_ul: Option<f64>,
    /// Nominal SNR points in dB, strictly increasing
    #[arg(long, value_delimiter = ',')]
    pub rho_db: Option<Vec<f64>>,
    /// Trials per SNR point
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub csit: Option<bool>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Restrict the slope fit to LO,HI dB
    #[arg(long, value_delimiter = ',')]
    pub fit_window: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageCliConfig {
    #[serde(flatten)]
    pub net: NetConfig,
    pub r_dl: f64,
    pub r_ul: f64,
    pub rho_db: Vec<f64>,
    pub trials: u64,
    pub lambda: f64,
    pub csit: bool,
    pub seed: u64,
    pub fit_window: Option<Vec<f64>>,
}

impl Default for OutageCliConfig {
    fn default() -> Self {
        Self {
            net: NetConfig::default(),
            r_dl: 0.25,
            r_ul: 0.25,
            rho_db: vec![15.0, 20.0, 25.0, 30.0, 35.0],
            trials: 100_000,
            lambda: 0.5,
            csit: false,
            seed: 1,
            fit_window: None,
        }
    }
}

pub fn outage(cfg: OutageCliConfig) -> Result<Run<OutageCliConfig>, Failure> {
    let sim = OutageConfig {
        spec: cfg.net.spec()?,
        r_dl: cfg.r_dl,
        r_ul: cfg.r_ul,
        rho_grid_db: cfg.rho_db.clone(),
        trials_per_rho: cfg.trials,
        lambda: cfg.lambda,
        csit: cfg.csit,
        seed: cfg.seed,
    };
    let window = match cfg.fit_window.as_deref() {
        None => None,
        Some(&[lo, hi]) if lo <= hi => Some((lo, hi)),
        Some(v) => return Err(Failure::Usage(format!("--fit-window takes LO,HI with LO <= HI, got {v:?}"))),
    };
    eprintln!("seed = {}", cfg.seed);
    let mut est = simulate_outage(&sim)?;
    if window.is_some() {
        est.fit = fit_diversity_slope(&est, window).ok();
    }
    let mut table = Table::new(&["rho_db", "trials", "outages", "p_out", "ci_lo", "ci_hi"]);
    for p in &est.points {
        table.push(vec![num(p.rho_db), p.trials.to_string(), p.outages.to_string(), num(p.p), num(p.ci_lo), num(p.ci_hi)]);
    }
    match &est.fit {
        Some(f) => eprintln!("fitted diversity {:.4} over {:?} dB ({} points)", f.slope, f.window, f.used),
        None => eprintln!("no slope fitted"),
    }
    for f in &est.flags {
        eprintln!("note: {f}");
    }
    let results = json!({ "fit": est.fit, "flags": est.flags });
    let seed = Some(cfg.seed);
    Ok(Run { command: "outage", config: cfg, seed, table, results: Some(results) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandwidthMode {
    /// Side-channel bandwidth that makes CSIT unnecessary for the DMT
    #[default]
    Compensate,
    /// Side-channel bandwidth that reaches the interference-free DMT
    InterferenceFree,
    /// Side-channel bandwidth that reaches the interference-free sum GDoF
    Gdof,
}

#[derive(Debug, Clone, Default, clap::Args, Serialize)]
pub struct BandwidthFlags {
    #[arg(long, value_enum)]
    pub mode: Option<BandwidthMode>,
    /// Antenna counts M_dl,N_dl,M_ul,N_ul
    #[arg(long, value_delimiter = ',')]
    pub antennas: Option<Vec<usize>>,
    /// One or more side-channel levels; one table row each
    #[arg(long, value_delimiter = ',')]
    pub alpha_s: Option<Vec<f64>>,
    /// Interference level (gdof mode)
    #[arg(long)]
    pub alpha_i: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub csit: Option<bool>,
    /// Antenna case (gdof mode)
    #[arg(long, value_enum)]
    pub case: Option<CaseArg>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthConfig {
    pub mode: BandwidthMode,
    pub antennas: Vec<usize>,
    pub alpha_s: Vec<f64>,
    pub alpha_i: f64,
    pub csit: bool,
    pub case: Option<CaseArg>,
}

impl Default for BandwidthConfig {
    fn default() -> Self {
        Self { mode: BandwidthMode::Compensate, antennas: Vec::new(), alpha_s: vec![1.0], alpha_i: 1.0, csit: false, case: None }
    }
}

pub fn bandwidth(cfg: BandwidthConfig) -> Result<Run<BandwidthConfig>, Failure> {
    let a = antennas(&cfg.antennas)?;
    if cfg.alpha_s.is_empty() {
        return Err(Failure::Usage("need at least one --alpha-s value".into()));
    }
    let table = match cfg.mode {
        BandwidthMode::Compensate => {
            let mut t = Table::new(&["alpha_s", "w", "alpha_s_min", "condition", "sufficient"]);
            for &s in &cfg.alpha_s {
                let c = compensate_csit_bandwidth(&a, s)?;
                t.push(vec![num(s), num(c.w), num(c.alpha_s_min), c.condition.to_string(), c.sufficient.to_string()]);
            }
            t
        }
        BandwidthMode::InterferenceFree => {
            let mut t = Table::new(&["alpha_s", "w", "alpha_s_min", "sufficient"]);
            for &s in &cfg.alpha_s {
                let f = interference_free_bandwidth(&a, s, cfg.csit)?;
                t.push(vec![num(s), num(f.w), num(f.alpha_s_min), f.sufficient.to_string()]);
            }
            t
        }
        BandwidthMode::Gdof => {
            let case = cfg.case.ok_or_else(|| Failure::Usage("gdof mode needs --case A or --case B".into()))?;
            let target = no_interference_sum_gdof(&a, case.into())?;
            let mut t = Table::new(&["alpha_s", "w", "no_interference_sum_gdof"]);
            for &s in &cfg.alpha_s {
                let w = required_w_gdof(&a, cfg.alpha_i, s, cfg.csit, case.into())?;
                t.push(vec![num(s), num(w), num(target)]);
            }
            t
        }
    };
    Ok(Run { command: "bandwidth", config: cfg, seed: None, table, results: None })
}
