//! Piecewise-linear curves stored as exact breakpoints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed at the domain ends so that float grids built as
/// `i * step` still land inside.
const DOMAIN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    points: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    /// Builds a curve from breakpoints with strictly increasing `x`.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("curve needs at least one breakpoint".into()));
        }
        for p in &points {
            if !(p.0.is_finite() && p.1.is_finite()) {
                return Err(Error::InvalidArgument(format!("non-finite breakpoint {p:?}")));
            }
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidArgument("breakpoint x must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    /// Like [`new`](Self::new) but first merges breakpoints closer than
    /// `tol` in `x`, keeping the later one.
    pub fn from_unsorted(mut points: Vec<(f64, f64)>, tol: f64) -> Result<Self> {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(points.len());
        for p in points {
            match out.last_mut() {
                Some(last) if (p.0 - last.0).abs() <= tol => *last = p,
                _ => out.push(p),
            }
        }
        Self::new(out)
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.points[0].0, self.points[self.points.len() - 1].0)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(x >= lo - DOMAIN_EPS && x <= hi + DOMAIN_EPS) {
            return Err(Error::OutOfDomain { x, lo, hi });
        }
        Ok(self.eval_clamped(x))
    }

    fn eval_clamped(&self, x: f64) -> f64 {
        let p = &self.points;
        if x <= p[0].0 {
            return p[0].1;
        }
        if x >= p[p.len() - 1].0 {
            return p[p.len() - 1].1;
        }
        // first index with p[i].0 > x
        let i = p.partition_point(|q| q.0 <= x);
        let (x0, y0) = p[i - 1];
        let (x1, y1) = p[i];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Extends the curve with a flat zero segment up to `x_max` if the curve
    /// ends at zero before it. Curves that already reach `x_max` are clipped.
    pub fn extend_zero(&self, x_max: f64) -> Result<Self> {
        let (lo, hi) = self.domain();
        if x_max <= lo {
            return Err(Error::InvalidArgument(format!("x_max = {x_max} not beyond domain start {lo}")));
        }
        if x_max <= hi + DOMAIN_EPS {
            return self.restrict(lo, x_max);
        }
        let last = self.points[self.points.len() - 1];
        if last.1.abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "curve ends at y = {} != 0, cannot pad with zero",
                last.1
            )));
        }
        let mut pts = self.points.clone();
        pts.push((x_max, 0.0));
        Self::new(pts)
    }

    /// Restriction to `[a, b]` within the domain.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Self> {
        let (lo, hi) = self.domain();
        if a < lo - DOMAIN_EPS || b > hi + DOMAIN_EPS || b <= a {
            return Err(Error::OutOfDomain { x: if a < lo { a } else { b }, lo, hi });
        }
        let mut pts = vec![(a, self.eval_clamped(a))];
        pts.extend(self.points.iter().copied().filter(|p| p.0 > a && p.0 < b));
        pts.push((b, self.eval_clamped(b)));
        Self::new(pts)
    }

    /// `y -> sy * y`, `x -> sx * x`.
    pub fn scaled(&self, sx: f64, sy: f64) -> Result<Self> {
        if sx <= 0.0 {
            return Err(Error::InvalidArgument("x scale must be positive".into()));
        }
        Self::new(self.points.iter().map(|&(x, y)| (sx * x, sy * y)).collect())
    }

    /// Removes interior breakpoints where the slope does not change by more
    /// than `tol`.
    pub fn simplified(&self, tol: f64) -> Self {
        if self.points.len() <= 2 {
            return self.clone();
        }
        let mut out = vec![self.points[0]];
        for i in 1..self.points.len() - 1 {
            let a = *out.last().unwrap();
            let b = self.points[i];
            let c = self.points[i + 1];
            let s1 = (b.1 - a.1) / (b.0 - a.0);
            let s2 = (c.1 - b.1) / (c.0 - b.0);
            if (s1 - s2).abs() > tol {
                out.push(b);
            }
        }
        out.push(self.points[self.points.len() - 1]);
        Self { points: out }
    }

    /// Slopes of each segment, left to right.
    pub fn slopes(&self) -> Vec<f64> {
        self.points
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect()
    }

    pub fn is_convex(&self, tol: f64) -> bool {
        self.slopes().windows(2).all(|s| s[1] >= s[0] - tol)
    }

    pub fn is_nonincreasing(&self, tol: f64) -> bool {
        self.points.windows(2).all(|w| w[1].1 <= w[0].1 + tol)
    }

    /// Maximum absolute difference to `other` over the union of both
    /// breakpoint sets restricted to the common domain. Exact for two
    /// piecewise-linear curves.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let lo = self.domain().0.max(other.domain().0);
        let hi = self.domain().1.min(other.domain().1);
        if hi < lo {
            return Err(Error::InvalidArgument("curves have disjoint domains".into()));
        }
        let mut xs: Vec<f64> = self
            .points
            .iter()
            .chain(other.points.iter())
            .map(|p| p.0)
            .filter(|&x| x >= lo && x <= hi)
            .collect();
        xs.push(lo);
        xs.push(hi);
        Ok(xs
            .into_iter()
            .map(|x| (self.eval_clamped(x) - other.eval_clamped(x)).abs())
            .fold(0.0, f64::max))
    }
}

/// Point-to-point DMT `alpha * d_{m,n}(r / alpha)`, where `d_{m,n}` joins
/// `(k, (m-k)(n-k))` for integer `k`.
pub fn ptp_dmt(m: usize, n: usize, alpha: f64) -> PiecewiseLinear {
    if alpha <= 0.0 {
        return PiecewiseLinear { points: vec![(0.0, 0.0)] };
    }
    let kmax = m.min(n);
    let points = (0..=kmax)
        .map(|k| (k as f64 * alpha, alpha * ((m - k) * (n - k)) as f64))
        .collect();
    PiecewiseLinear { points }
}

/// Evaluates `d_{m,n}(r)` with the convention that it is zero past
/// `min(m, n)`. `m` or `n` equal to zero gives the zero function.
pub fn d_mn(m: usize, n: usize, r: f64) -> f64 {
    let kmax = m.min(n);
    if kmax == 0 || r >= kmax as f64 {
        return 0.0;
    }
    let r = r.max(0.0);
    let k = r.floor() as usize;
    let y0 = ((m - k) * (n - k)) as f64;
    let y1 = ((m - k - 1) * (n - k - 1)) as f64;
    y0 + (y1 - y0) * (r - k as f64)
}

fn min_pair(a: &PiecewiseLinear, b: &PiecewiseLinear) -> Result<PiecewiseLinear> {
    let lo = a.domain().0.max(b.domain().0);
    let hi = a.domain().1.min(b.domain().1);
    if hi < lo {
        return Err(Error::InvalidArgument("curves have disjoint domains".into()));
    }
    let mut xs: Vec<f64> = a
        .points
        .iter()
        .chain(b.points.iter())
        .map(|p| p.0)
        .filter(|&x| x > lo && x < hi)
        .collect();
    xs.push(lo);
    xs.push(hi);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut pts = Vec::with_capacity(xs.len() * 2);
    for (i, &x) in xs.iter().enumerate() {
        let da = a.eval_clamped(x);
        let db = b.eval_clamped(x);
        pts.push((x, da.min(db)));
        if let Some(&xn) = xs.get(i + 1) {
            let ea = a.eval_clamped(xn);
            let eb = b.eval_clamped(xn);
            let g0 = da - db;
            let g1 = ea - eb;
            if g0 * g1 < 0.0 {
                let t = g0 / (g0 - g1);
                let xc = x + t * (xn - x);
                if xc > x && xc < xn {
                    pts.push((xc, a.eval_clamped(xc).min(b.eval_clamped(xc))));
                }
            }
        }
    }
    let curve = PiecewiseLinear::from_unsorted(pts, 0.0)?;
    Ok(curve.simplified(1e-12))
}

/// Exact pointwise minimum over the intersection of the domains, with
/// crossing points inserted as breakpoints.
pub fn min_pl(curves: &[PiecewiseLinear]) -> Result<PiecewiseLinear> {
    let (first, rest) = curves
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("min_pl of an empty list".into()))?;
    let mut acc = first.clone();
    for c in rest {
        acc = min_pair(&acc, c)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pl(p: &[(f64, f64)]) -> PiecewiseLinear {
        PiecewiseLinear::new(p.to_vec()).unwrap()
    }

    #[test]
    fn ptp_examples() {
        assert_eq!(ptp_dmt(2, 2, 1.0).breakpoints(), &[(0.0, 4.0), (1.0, 1.0), (2.0, 0.0)]);
        assert_eq!(ptp_dmt(1, 1, 1.0).breakpoints(), &[(0.0, 1.0), (1.0, 0.0)]);
        assert_eq!(ptp_dmt(2, 2, 0.5).breakpoints(), &[(0.0, 2.0), (0.5, 0.5), (1.0, 0.0)]);
        assert_eq!(ptp_dmt(3, 2, 0.0).breakpoints(), &[(0.0, 0.0)]);
    }

    #[test]
    fn eval_examples() {
        let d22 = ptp_dmt(2, 2, 1.0);
        assert_eq!(d22.eval(0.5).unwrap(), 2.5);
        assert_eq!(d22.eval(1.0).unwrap(), 1.0);
        assert!(matches!(d22.eval(2.5), Err(Error::OutOfDomain { .. })));
        assert!(d22.eval(-0.1).is_err());
    }

    #[test]
    fn d_mn_matches_ptp() {
        for (m, n) in [(1, 1), (2, 3), (4, 2), (3, 3)] {
            let c = ptp_dmt(m, n, 1.0);
            for i in 0..=100 {
                let r = i as f64 * m.min(n) as f64 / 100.0;
                assert!((c.eval(r).unwrap() - d_mn(m, n, r)).abs() < 1e-12);
            }
        }
        assert_eq!(d_mn(0, 3, 0.0), 0.0);
        assert_eq!(d_mn(2, 2, 5.0), 0.0);
    }

    #[test]
    fn min_examples() {
        let a = pl(&[(0.0, 1.0), (1.0, 0.0)]);
        let b = pl(&[(0.0, 2.0), (1.0, 0.0)]);
        assert_eq!(min_pl(&[a.clone(), b]).unwrap().breakpoints(), &[(0.0, 1.0), (1.0, 0.0)]);

        let c = pl(&[(0.0, 2.0), (1.0, 0.0)]);
        let d = pl(&[(0.0, 0.0), (1.0, 2.0)]);
        let m = min_pl(&[c, d]).unwrap();
        assert_eq!(m.breakpoints(), &[(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]);

        assert_eq!(min_pl(&[a.clone()]).unwrap(), a);
        assert!(min_pl(&[]).is_err());
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(PiecewiseLinear::new(vec![]).is_err());
        assert!(PiecewiseLinear::new(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(PiecewiseLinear::new(vec![(1.0, 1.0), (0.0, 2.0)]).is_err());
    }

    #[test]
    fn extend_and_restrict() {
        let c = ptp_dmt(1, 1, 0.5).extend_zero(1.0).unwrap();
        assert_eq!(c.eval(0.75).unwrap(), 0.0);
        assert_eq!(c.domain(), (0.0, 1.0));
        assert!(ptp_dmt(2, 2, 1.0).restrict(0.0, 1.0).unwrap().breakpoints().len() == 2);
        let d = pl(&[(0.0, 1.0), (1.0, 0.5)]);
        assert!(d.extend_zero(2.0).is_err());
    }
}
