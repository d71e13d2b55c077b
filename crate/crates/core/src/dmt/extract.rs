//! Breakpoint recovery for piecewise-linear functions known only through
//! point evaluations.

use serde::{Deserialize, Serialize};

use crate::curve::PiecewiseLinear;
use crate::error::{Error, Result};

const SLOPE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractedCurve {
    /// Every evaluated point, sorted by abscissa.
    pub samples: Vec<(f64, f64)>,
    /// Fitted curve with kinks placed at intersections of adjacent pieces.
    pub fitted: PiecewiseLinear,
}

/// Samples `f` on `[lo, hi]` with a uniform grid of `initial` intervals,
/// bisects every interval whose midpoint departs from the chord by more
/// than `tol`, and then fits a piecewise-linear curve. Short intervals that
/// straddle a kink are collapsed onto the intersection of the lines on
/// either side.
pub fn extract_curve<F>(f: F, lo: f64, hi: f64, initial: usize, tol: f64) -> Result<ExtractedCurve>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if !(lo < hi) || initial == 0 {
        return Err(Error::InvalidArgument(format!("bad extraction interval [{lo}, {hi}] / {initial}")));
    }
    let min_width = (hi - lo) * 1e-7;
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(4 * initial);
    let grid: Vec<f64> = (0..=initial).map(|i| lo + (hi - lo) * i as f64 / initial as f64).collect();
    let vals: Result<Vec<f64>> = {
        use rayon::prelude::*;
        grid.par_iter().map(|&x| f(x)).collect()
    };
    let vals = vals?;
    pts.push((grid[0], vals[0]));
    for i in 0..initial {
        refine(&f, (grid[i], vals[i]), (grid[i + 1], vals[i + 1]), tol, min_width, &mut pts)?;
        pts.push((grid[i + 1], vals[i + 1]));
    }
    // slopes over refined intervals carry ~1e-8 of rounding noise
    let raw = PiecewiseLinear::new(pts.clone())?.simplified(SLOPE_TOL);
    let fitted = snap_kinks(&raw, 0.5 * (hi - lo) / initial as f64).simplified(SLOPE_TOL);
    Ok(ExtractedCurve { samples: pts, fitted })
}

fn refine<F>(f: &F, a: (f64, f64), b: (f64, f64), tol: f64, min_width: f64, out: &mut Vec<(f64, f64)>) -> Result<()>
where
    F: Fn(f64) -> Result<f64>,
{
    if b.0 - a.0 <= min_width {
        return Ok(());
    }
    let xm = 0.5 * (a.0 + b.0);
    let ym = f(xm)?;
    if (ym - 0.5 * (a.1 + b.1)).abs() <= tol {
        return Ok(());
    }
    refine(f, a, (xm, ym), tol, min_width, out)?;
    out.push((xm, ym));
    refine(f, (xm, ym), b, tol, min_width, out)
}

/// Replaces a short segment between two longer ones by the intersection
/// point of the long segments' lines, when that point lies inside it.
fn snap_kinks(c: &PiecewiseLinear, short: f64) -> PiecewiseLinear {
    let p = c.breakpoints();
    if p.len() < 4 {
        return c.clone();
    }
    let mut out: Vec<(f64, f64)> = vec![p[0]];
    let mut i = 1;
    while i < p.len() {
        let snapped = if i + 2 < p.len() {
            let (a0, a1, b0, b1) = (p[i - 1], p[i], p[i + 1], p[i + 2]);
            let mid = b0.0 - a1.0;
            if mid < short && a1.0 - a0.0 > mid && b1.0 - b0.0 > mid {
                intersect(a0, a1, b0, b1).filter(|q| q.0 >= a1.0 - 1e-15 && q.0 <= b0.0 + 1e-15)
            } else {
                None
            }
        } else {
            None
        };
        match snapped {
            Some(q) => {
                out.push(q);
                i += 2;
            }
            None => {
                out.push(p[i]);
                i += 1;
            }
        }
    }
    PiecewiseLinear::new(out).unwrap_or_else(|_| c.clone())
}

fn intersect(a0: (f64, f64), a1: (f64, f64), b0: (f64, f64), b1: (f64, f64)) -> Option<(f64, f64)> {
    let sa = (a1.1 - a0.1) / (a1.0 - a0.0);
    let sb = (b1.1 - b0.1) / (b1.0 - b0.0);
    if (sa - sb).abs() < 1e-12 {
        return None;
    }
    let x = (b0.1 - a1.1 + sa * a1.0 - sb * b0.0) / (sa - sb);
    Some((x, a1.1 + sa * (x - a1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_irrational_kink() {
        let k = std::f64::consts::FRAC_1_SQRT_2;
        let f = |x: f64| Ok(if x < k { 3.0 - 2.0 * x } else { 3.0 - 2.0 * k - 0.5 * (x - k) });
        let e = extract_curve(f, 0.0, 2.0, 40, 1e-10).unwrap();
        let bp = e.fitted.breakpoints();
        assert_eq!(bp.len(), 3, "{bp:?}");
        assert!((bp[1].0 - k).abs() < 1e-9, "{bp:?}");
        assert!(e.samples.len() > 41);
    }

    #[test]
    fn linear_stays_two_points() {
        let e = extract_curve(|x| Ok(1.0 - x), 0.0, 1.0, 10, 1e-12).unwrap();
        assert_eq!(e.fitted.breakpoints().len(), 2);
        assert_eq!(e.samples.len(), 11);
    }
}
