//! LP against closed-form cross-checks, run as one table.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use fdnet::curve::PiecewiseLinear;
use fdnet::dmt::{
    closed_form_general, closed_form_m11m, compensate_csit_bandwidth, d_sum, dmt_curve_symmetric, dmt_overall,
    interference_free_bandwidth, regime_boundaries, symmetric_cap, uniform_grid, DmtQuery,
};
use fdnet::gdof::{gdof_csit, gdof_nocsit};
use fdnet::{min_pl, ptp_dmt, AntennaConfig, Error, NetworkSpec};

use crate::output::{num, Run, Table};
use crate::Failure;

#[derive(Debug, Clone, Default, clap::Args, Serialize)]
pub struct ValidateFlags {
    /// Grid intervals per curve
    #[arg(long)]
    pub points: Option<usize>,
    /// Pass threshold on the largest absolute difference
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateConfig {
    pub points: usize,
    pub tol: f64,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self { points: 200, tol: 1e-6 }
    }
}

#[derive(Default)]
struct Check {
    cases: usize,
    skipped: usize,
    max_err: f64,
    worst: String,
}

impl Check {
    fn record(&mut self, err: f64, at: impl FnOnce() -> String) {
        self.cases += 1;
        if err > self.max_err || self.worst.is_empty() {
            self.max_err = self.max_err.max(err);
            self.worst = at();
        }
    }

    /// Counts parameter points with no closed form; other errors abort.
    fn absorb<T>(&mut self, r: fdnet::Result<T>) -> fdnet::Result<Option<T>> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(Error::NoClosedForm(_) | Error::OutOfScope(_)) => {
                self.skipped += 1;
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }
}

fn lp_vs(spec: &NetworkSpec, csit: bool, target: &PiecewiseLinear, points: usize) -> fdnet::Result<f64> {
    let grid = uniform_grid(symmetric_cap(spec), points);
    let lp = dmt_curve_symmetric(spec, csit, &grid)?;
    let (_, hi) = target.domain();
    lp.iter().try_fold(0.0f64, |m, &(r, d)| {
        let t = if r > hi { 0.0 } else { target.eval(r)? };
        Ok(m.max((d - t).abs()))
    })
}

const GENERAL: [(usize, usize, usize); 5] = [(2, 1, 2), (3, 2, 2), (3, 2, 3), (4, 2, 3), (3, 3, 2)];

fn w_grid(a: &AntennaConfig, csit: bool) -> fdnet::Result<Vec<f64>> {
    let b = regime_boundaries(a, csit)?;
    let mut w = vec![0.0];
    let mut prev = 0.0;
    for &x in &b {
        w.push(0.5 * (prev + x));
        w.push(x);
        prev = x;
    }
    w.push(2.0 * prev.max(0.5));
    w.push(3.0);
    w.retain(|x| x.is_finite());
    w.sort_by(f64::total_cmp);
    w.dedup();
    Ok(w)
}

fn m11m(cfg: &ValidateConfig) -> fdnet::Result<Check> {
    let mut c = Check::default();
    for m in [1usize, 2, 4] {
        let mf = m as f64;
        let a = AntennaConfig::symmetric_bs(m, 1, 1)?;
        for w in [0.0, 1.0 / (2.0 * mf + 1.0), 1.0 / (mf + 1.0), 0.5, 2.0] {
            for alpha_s in [mf / 4.0, mf / 2.0, mf] {
                for csit in [true, false] {
                    let cf = closed_form_m11m(m, w, alpha_s, csit)?;
                    let e = lp_vs(&NetworkSpec::unit(a, w, alpha_s)?, csit, &cf.curve, cfg.points)?;
                    c.record(e, || format!("M={m} w={w:.4} alpha_s={alpha_s} csit={csit}"));
                }
            }
        }
    }
    Ok(c)
}

fn general(cfg: &ValidateConfig) -> fdnet::Result<Check> {
    let mut c = Check::default();
    for (m, nd, mu) in GENERAL {
        let a = AntennaConfig::symmetric_bs(m, nd, mu)?;
        for csit in [true, false] {
            for w in w_grid(&a, csit)? {
                for alpha_s in [0.5, 1.0, 2.0] {
                    let Some(cf) = c.absorb(closed_form_general(&a, w, alpha_s, csit))? else { continue };
                    let e = lp_vs(&NetworkSpec::unit(a, w, alpha_s)?, csit, &cf.curve, cfg.points)?;
                    c.record(e, || format!("{:?} w={w:.4} alpha_s={alpha_s} csit={csit}", a.as_tuple()));
                }
            }
        }
    }
    Ok(c)
}

/// At `w = 0` the closed forms are checked at their own breakpoints.
fn no_side_channel() -> fdnet::Result<Check> {
    let mut c = Check::default();
    for (m, nd, mu) in GENERAL.into_iter().chain([(1, 1, 1), (2, 1, 1), (4, 1, 1)]) {
        let a = AntennaConfig::symmetric_bs(m, nd, mu)?;
        let spec = NetworkSpec::unit(a, 0.0, 1.0)?;
        for csit in [true, false] {
            let Some(cf) = c.absorb(closed_form_general(&a, 0.0, 1.0, csit))? else { continue };
            let cap = symmetric_cap(&spec);
            let mut e = 0.0f64;
            for &(r, d) in cf.curve.breakpoints().iter().filter(|p| p.0 <= cap) {
                e = e.max((dmt_overall(&DmtQuery { spec, r_dl: r, r_ul: r, csit })? - d).abs());
            }
            c.record(e, || format!("{:?} csit={csit}", a.as_tuple()));
        }
    }
    Ok(c)
}

fn curves_gap(spec: &NetworkSpec, points: usize) -> fdnet::Result<f64> {
    let grid = uniform_grid(symmetric_cap(spec), points);
    let x = dmt_curve_symmetric(spec, true, &grid)?;
    let y = dmt_curve_symmetric(spec, false, &grid)?;
    Ok(x.iter().zip(&y).map(|(p, q)| (p.1 - q.1).abs()).fold(0.0, f64::max))
}

fn compensation(cfg: &ValidateConfig) -> fdnet::Result<Check> {
    let mut c = Check::default();
    for m in 1..=4usize {
        for nd in 1..=m {
            for mu in 1..=nd.min(2) {
                let a = AntennaConfig::symmetric_bs(m, nd, mu)?;
                let floor = compensate_csit_bandwidth(&a, 1.0)?.alpha_s_min;
                for alpha_s in [floor + 1.0, floor].into_iter().filter(|&s| s > 0.0) {
                    let comp = compensate_csit_bandwidth(&a, alpha_s)?;
                    let e = curves_gap(&NetworkSpec::unit(a, comp.w, alpha_s)?, cfg.points)?;
                    c.record(e, || format!("{:?} w={:.4} alpha_s={alpha_s:.3}", a.as_tuple(), comp.w));
                }
            }
        }
    }
    Ok(c)
}

fn interference_free(cfg: &ValidateConfig) -> fdnet::Result<Check> {
    let mut c = Check::default();
    for m in 1..=4usize {
        for nd in 1..=m {
            for mu in 1..=m {
                let a = AntennaConfig::symmetric_bs(m, nd, mu)?;
                let target = min_pl(&[ptp_dmt(m, nd, 1.0), ptp_dmt(mu, m, 1.0)])?;
                for csit in [true, false] {
                    let floor = interference_free_bandwidth(&a, 1.0, csit)?.alpha_s_min;
                    for alpha_s in [floor + 0.5, floor.max(2.0)] {
                        let f = interference_free_bandwidth(&a, alpha_s, csit)?;
                        let e = lp_vs(&NetworkSpec::unit(a, f.w, alpha_s)?, csit, &target, cfg.points)?;
                        c.record(e, || format!("{:?} w={:.4} alpha_s={alpha_s:.3} csit={csit}", a.as_tuple(), f.w));
                    }
                }
            }
        }
    }
    Ok(c)
}

fn gdof_cap() -> fdnet::Result<Check> {
    let mut c = Check::default();
    for (m, nd, mu) in GENERAL {
        let a = AntennaConfig::symmetric_bs(m, nd, mu)?;
        for w in [0.0, 0.5, 1.0] {
            for alpha_s in [0.5, 1.0, 2.0] {
                let spec = NetworkSpec::unit(a, w, alpha_s)?;
                for csit in [true, false] {
                    let cap = if csit { gdof_csit(&spec) } else { gdof_nocsit(&spec) }?.dof_sum_max;
                    let e = d_sum(&spec, cap, csit)?;
                    // positive just below the cap, so the zero is not early
                    let early = if d_sum(&spec, cap - 1e-4, csit)? > 0.0 { 0.0 } else { f64::INFINITY };
                    c.record(e.max(early), || format!("{:?} w={w} alpha_s={alpha_s} csit={csit}", a.as_tuple()));
                }
            }
        }
    }
    Ok(c)
}

type CheckFn = fn(&ValidateConfig) -> fdnet::Result<Check>;

const CHECKS: [(&str, CheckFn); 6] = [
    ("m11m-lp-vs-closed-form", m11m),
    ("general-lp-vs-closed-form", general),
    ("no-side-channel-breakpoints", |_| no_side_channel()),
    ("csit-compensation", compensation),
    ("interference-free-dmt", interference_free),
    ("zero-at-gdof-cap", |_| gdof_cap()),
];

/// Returns the run and whether every check passed.
pub fn validate(cfg: ValidateConfig) -> Result<(Run<ValidateConfig>, bool), Failure> {
    if cfg.points == 0 || !(cfg.tol > 0.0) {
        return Err(Failure::Usage("--points must be >= 1 and --tol > 0".into()));
    }
    let results: Vec<fdnet::Result<Check>> = CHECKS.par_iter().map(|(_, f)| f(&cfg)).collect();
    let mut table = Table::new(&["check", "cases", "skipped", "max_err", "tol", "status", "worst"]);
    let mut all = true;
    for ((name, _), r) in CHECKS.iter().zip(results) {
        let c = r?;
        let pass = c.cases > 0 && c.max_err <= cfg.tol;
        all &= pass;
        table.push(vec![
            name.to_string(),
            c.cases.to_string(),
            c.skipped.to_string(),
            num(c.max_err),
            num(cfg.tol),
            if pass { "PASS" } else { "FAIL" }.to_string(),
            c.worst,
        ]);
    }
    Ok((Run { command: "validate", config: cfg, seed: None, table, results: None }, all))
}

/// Fixed-width rendering for the terminal.
pub fn render(t: &Table) -> String {
    let cols = t.header.len();
    let width: Vec<usize> = (0..cols)
        .map(|j| t.rows.iter().map(|r| r[j].len()).chain([t.header[j].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: Vec<&str>| {
        cells[..cols].iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ")
    };
    let mut s = line(t.header.clone());
    s.push('\n');
    for r in &t.rows {
        s.push_str(&line(r.iter().map(String::as_str).collect()));
        s.push('\n');
    }
    s
}
