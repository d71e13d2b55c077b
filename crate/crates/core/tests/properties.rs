use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fdnet::capacity::{
    achievable_mi_exact, gap_constants, high_snr_region, inner_bound_bc, nocsit_region, outer_bound, PowerSplit,
    RateBounds,
};
use fdnet::channel::{gram, logdet_i_plus, sample_rayleigh, CMat, SnrPoint, C64};
use fdnet::curve::{min_pl, ptp_dmt, PiecewiseLinear};
use fdnet::dmt::{d_sum, dmt_overall, uniform_grid, DmtQuery};
use fdnet::gdof::{gdof_csit, gdof_nocsit, sum_gdof_per_antenna_case_a, sum_gdof_per_antenna_case_b};
use fdnet::lp::{solve, verify_certificate, LinearProgram, LpStatus, Sense};
use fdnet::{f_spatial, f_spatial1, AntennaConfig, LinkLevels, NetworkSpec};

fn antennas(max: usize) -> impl Strategy<Value = AntennaConfig> {
    (1..=max, 1..=max, 1..=max, 1..=max).prop_map(|(a, b, c, d)| AntennaConfig::new(a, b, c, d).unwrap())
}

fn all_components(r: &RateBounds) -> [f64; 3] {
    [r.c_dl, r.c_ul, r.c_sum]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ptp_shape(m in 1usize..6, n in 1usize..6, alpha in 0.05f64..3.0) {
        let c = ptp_dmt(m, n, alpha);
        prop_assert!(c.is_convex(1e-12));
        prop_assert!(c.is_nonincreasing(0.0));
        let (_, hi) = c.domain();
        prop_assert!((hi - m.min(n) as f64 * alpha).abs() < 1e-12);
        prop_assert_eq!(c.eval(hi).unwrap(), 0.0);
        let unit = ptp_dmt(m, n, 1.0);
        for r in uniform_grid(hi, 50) {
            let scaled = alpha * unit.eval((r / alpha).min(m.min(n) as f64)).unwrap();
            prop_assert!((c.eval(r).unwrap() - scaled).abs() < 1e-12);
        }
    }

    #[test]
    fn f_spatial_one_pair(x in 0usize..8, y1 in 0.0f64..3.0, x1 in 0usize..8, x2 in 0usize..8) {
        prop_assert_eq!(f_spatial(x, y1, x1, 0.0, x2).unwrap(), f_spatial1(x, y1, x1));
    }

    #[test]
    fn min_pl_is_pointwise_min(
        ys in prop::collection::vec(-5.0f64..5.0, 3..8),
        zs in prop::collection::vec(-5.0f64..5.0, 3..8),
    ) {
        let mk = |v: &[f64]| {
            let n = v.len() - 1;
            PiecewiseLinear::new(v.iter().enumerate().map(|(i, &y)| (2.0 * i as f64 / n as f64, y)).collect()).unwrap()
        };
        let (a, b) = (mk(&ys), mk(&zs));
        let m = min_pl(&[a.clone(), b.clone()]).unwrap();
        for x in uniform_grid(2.0, 997) {
            let want = a.eval(x).unwrap().min(b.eval(x).unwrap());
            prop_assert!((m.eval(x).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn logdet_nonnegative_and_monotone(n in 1usize..5, k in 1usize..4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = AntennaConfig::new(n, n, k, n).unwrap();
        let h = sample_rayleigh(&a, &mut rng);
        let base = gram(&h.h_dl).scale(10.0);
        let lo = logdet_i_plus(&base).unwrap();
        prop_assert!(lo >= 0.0);
        // B = A + C C^dagger dominates A
        let hi = logdet_i_plus(&(&base + gram(&h.h_i).scale(3.0))).unwrap();
        prop_assert!(lo <= hi + 1e-12);
    }

    #[test]
    fn sandwich_and_gap(a in antennas(3), db in 0.0f64..40.0, w in 0.0f64..2.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = sample_rayleigh(&a, &mut rng);
        let snr = SnrPoint::uniform(10f64.powf(db / 10.0));
        let split = PowerSplit::default();
        let o = outer_bound(&h, &snr, w, &split).unwrap();
        let e = achievable_mi_exact(&h, &snr, w, &split).unwrap();
        let i = inner_bound_bc(&h, &snr, w, &split).unwrap();
        prop_assert!(i.le(&e, 1e-9), "inner {:?} exact {:?}", i, e);
        prop_assert!(e.le(&o, 1e-9), "exact {:?} outer {:?}", e, o);
        let (c1, c2) = gap_constants(&a, w);
        let g = (1.0 + w) * c1.max(c2);
        prop_assert!(o.c_dl - e.c_dl <= g + 1e-9);
        prop_assert!(o.c_ul - e.c_ul <= g + 1e-9);
        for r in [o, e, i, nocsit_region(&h, &snr, w, &split, false).unwrap()] {
            prop_assert!(all_components(&r).iter().all(|v| v.is_finite() && *v >= 0.0));
        }
    }

    #[test]
    fn bounds_monotone_in_snr_and_w(
        a in antennas(3),
        db in 0.0f64..30.0,
        bump in 0.5f64..10.0,
        which in 0usize..3,
        w in 0.0f64..1.5,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = sample_rayleigh(&a, &mut rng);
        let split = PowerSplit::default();
        let s0 = SnrPoint::uniform(10f64.powf(db / 10.0));
        let f = 10f64.powf(bump / 10.0);
        let mut s1 = s0;
        match which {
            0 => s1.rho_dl *= f,
            1 => s1.rho_ul *= f,
            _ => s1.rho_s *= f,
        }
        for bound in [outer_bound, achievable_mi_exact, inner_bound_bc] {
            let x = bound(&h, &s0, w, &split).unwrap();
            let y = bound(&h, &s1, w, &split).unwrap();
            prop_assert!(x.le(&y, 1e-9), "{:?} -> {:?}", x, y);
        }
        let x = outer_bound(&h, &s0, w, &split).unwrap();
        let y = outer_bound(&h, &s0, w + 0.25, &split).unwrap();
        prop_assert!(x.c_sum <= y.c_sum + 1e-9);
    }

    #[test]
    fn nocsit_region_monotone_in_interference(a in antennas(3), db in 0.0f64..30.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = sample_rayleigh(&a, &mut rng);
        let split = PowerSplit::default();
        let s0 = SnrPoint::uniform(10f64.powf(db / 10.0));
        let s1 = SnrPoint { rho_i: s0.rho_i * 4.0, ..s0 };
        let x = nocsit_region(&h, &s0, 0.5, &split, true).unwrap();
        let y = nocsit_region(&h, &s1, 0.5, &split, true).unwrap();
        prop_assert!(x.le(&y, 1e-9));
    }

    #[test]
    fn gdof_ordering_and_monotonicity(
        a in antennas(4),
        alpha_i in 0.0f64..2.0,
        alpha_s in 0.0f64..2.0,
        w in 0.0f64..2.0,
        dw in 0.0f64..1.0,
    ) {
        let levels = LinkLevels { alpha_i, alpha_s, ..LinkLevels::default() };
        let s = NetworkSpec::new(a, levels, w).unwrap();
        let c = gdof_csit(&s).unwrap();
        let n = gdof_nocsit(&s).unwrap();
        prop_assert!(n.dof_dl_max <= c.dof_dl_max + 1e-12);
        prop_assert!(n.dof_ul_max <= c.dof_ul_max + 1e-12);
        prop_assert!(n.dof_sum_max <= c.dof_sum_max + 1e-12);
        let wider = NetworkSpec::new(a, levels, w + dw).unwrap();
        let stronger = NetworkSpec::new(a, LinkLevels { alpha_s: alpha_s + dw, ..levels }, w).unwrap();
        for t in [wider, stronger] {
            prop_assert!(gdof_csit(&s).unwrap().max_sum() <= gdof_csit(&t).unwrap().max_sum() + 1e-12);
            prop_assert!(gdof_nocsit(&s).unwrap().max_sum() <= gdof_nocsit(&t).unwrap().max_sum() + 1e-12);
        }
    }

    #[test]
    fn per_antenna_caps(m in 1usize..5, n in 1usize..5, alpha_i in 0.0f64..2.0, ws in 0.0f64..2.0) {
        prop_assert!(sum_gdof_per_antenna_case_a(m, n, alpha_i, 1.0, ws).unwrap() <= 2.0);
        let bs = m.max(n);
        let a = AntennaConfig::symmetric_bs(bs, m, n).unwrap();
        let q = m.max(n) as f64 / m.min(n) as f64;
        prop_assert!(sum_gdof_per_antenna_case_b(&a, alpha_i, 1.0, ws).unwrap() <= q + 1.0 + 1e-12);
    }

    #[test]
    fn random_lps_carry_certificates(
        n in 2usize..6,
        rows in prop::collection::vec((prop::collection::vec(-3.0f64..3.0, 6), 0usize..3, -2.0f64..4.0), 1..6),
        c in prop::collection::vec(-2.0f64..2.0, 6),
    ) {
        let mut lp = LinearProgram::new(n);
        lp.objective = c[..n].to_vec();
        for j in 0..n {
            lp.upper[j] = 3.0;
        }
        for (coef, s, rhs) in rows {
            let sense = [Sense::Le, Sense::Ge, Sense::Eq][s];
            lp.add_row(coef[..n].to_vec(), sense, rhs);
        }
        let sol = solve(&lp).unwrap();
        prop_assert_ne!(sol.status, LpStatus::Unbounded);
        if sol.status == LpStatus::Optimal {
            prop_assert!(lp.max_violation(&sol.x) <= 1e-8);
            let cert = verify_certificate(&lp, &sol).unwrap();
            prop_assert!(cert.holds(1e-7), "{:?}", cert);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn d_sum_convex_nonincreasing_and_csit_dominates(
        a in antennas(3),
        alpha_i in 0.3f64..1.5,
        alpha_s in 0.0f64..2.0,
        w in 0.0f64..1.5,
    ) {
        let levels = LinkLevels { alpha_i, alpha_s, ..LinkLevels::default() };
        let spec = NetworkSpec::new(a, levels, w).unwrap();
        let hi = gdof_csit(&spec).unwrap().dof_sum_max + 0.2;
        let grid = uniform_grid(hi, 40);
        for csit in [true, false] {
            let v: Vec<f64> = grid.iter().map(|&r| d_sum(&spec, r, csit).unwrap()).collect();
            prop_assert!(v.windows(2).all(|p| p[1] <= p[0] + 1e-9));
            prop_assert!(v.windows(3).all(|p| p[0] + p[2] - 2.0 * p[1] >= -1e-7), "not convex: {:?}", v);
        }
        let cap = a.m_dl.min(a.n_dl).min(a.m_ul.min(a.n_ul)) as f64;
        for r in uniform_grid(cap, 10) {
            let q = |csit| dmt_overall(&DmtQuery { spec, r_dl: r, r_ul: r, csit }).unwrap();
            prop_assert!(q(true) >= q(false) - 1e-9);
        }
    }
}

#[test]
fn sampled_channels_are_full_rank() {
    let a = AntennaConfig::new(4, 3, 2, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..2000 {
        let h = sample_rayleigh(&a, &mut rng);
        for m in [&h.h_dl, &h.h_ul, &h.h_i, &h.h_s] {
            let g: CMat = if m.nrows() <= m.ncols() { gram(m) } else { m.adjoint() * m };
            let ev = nalgebra::SymmetricEigen::new(g).eigenvalues;
            assert!(ev.iter().all(|&e| e > 1e-10), "rank deficient draw: {ev:?}");
        }
    }
    let _ = C64::new(0.0, 0.0);
}

#[test]
fn high_snr_region_drops_constant() {
    let a = AntennaConfig::new(2, 2, 2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let h = sample_rayleigh(&a, &mut rng);
    let snr = SnrPoint::uniform(100.0);
    let split = PowerSplit::default();
    let o = outer_bound(&h, &snr, 0.5, &split).unwrap();
    let r = high_snr_region(&h, &snr, 0.5, &split).unwrap();
    assert!((o.c_sum - r.c_sum - 2.0).abs() < 1e-12);
    assert_eq!((o.c_dl, o.c_ul), (r.c_dl, r.c_ul));
}
