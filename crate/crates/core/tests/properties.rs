use avalanche::constitutive::{self as cst, MaterialParams, PouliquenParams};
use avalanche::models::{self, KPolicy, ModelConfig, ViscosityPolicy};
use avalanche::solver::{self, Boundary, Grid1D, SimState, SolverConfig};
use proptest::prelude::*;

fn sh(theta: f64, delta0: f64) -> ModelConfig {
    let mat = MaterialParams::new(1e-3, 2500.0, 0.6, delta0, delta0).unwrap();
    ModelConfig::savage_hutter(theta, mat, KPolicy::Constant(1.0))
}

/// mu(I) configuration that coincides with `sh(theta, delta0)`.
fn coincident_mui(theta: f64, delta0: f64) -> ModelConfig {
    let p = PouliquenParams::new(delta0, delta0, 0.136, 6.5e-4).unwrap();
    ModelConfig::mu_i(theta, p, 1.0, ViscosityPolicy::Off)
}

fn depth() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), 1e-4..0.5f64]
}

fn profile(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (prop::collection::vec(depth(), n), prop::collection::vec(-1.0..1.0f64, n))
        .prop_map(|(h, u)| {
            let hu = h.iter().zip(&u).map(|(h, u)| if *h > 0.0 { h * u } else { 0.0 }).collect();
            (h, hu)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn models_coincide_cellwise(h in 1e-4..1.0f64, u in -2.0..2.0f64, slope in -0.5..0.5f64,
                                theta in 0.0..0.6f64, delta0 in 0.05..0.7f64) {
        let (a, b) = (sh(theta, delta0), coincident_mui(theta, delta0));
        let hu = h * u;
        prop_assert_eq!(models::flux(h, hu, 1.0, &a), models::flux(h, hu, 1.0, &b));
        prop_assert_eq!(models::wave_speeds(h, hu, 1.0, &a), models::wave_speeds(h, hu, 1.0, &b));
        prop_assert_eq!(models::source(h, hu, slope, &a), models::source(h, hu, slope, &b));
    }

    #[test]
    fn models_coincide_over_steps((h, hu) in profile(24), theta in 0.0..0.5f64, delta0 in 0.05..0.6f64) {
        let grid = Grid1D::uniform(24, 0.0, 1.0).unwrap();
        let scfg = SolverConfig { t_end: 1e9, bc: Boundary::Reflective, ..SolverConfig::default() };
        let (a, b) = (sh(theta, delta0), coincident_mui(theta, delta0));
        let mut sa = SimState::new(0.0, h.clone(), hu.clone());
        let mut sb = sa.clone();
        for _ in 0..20 {
            sa = solver::step(&sa, &grid, &a, &scfg).unwrap().0;
            sb = solver::step(&sb, &grid, &b, &scfg).unwrap().0;
        }
        prop_assert_eq!(sa, sb);
    }

    #[test]
    fn steps_keep_depth_non_negative((h, hu) in profile(32), theta in 0.0..0.6f64, cfl in 0.1..1.0f64) {
        let grid = Grid1D::uniform(32, 0.0, 1.0).unwrap().with_bed(|x| 0.1 * (6.0 * x).sin()).unwrap();
        let scfg = SolverConfig { t_end: 1e9, cfl, bc: Boundary::Reflective, ..SolverConfig::default() };
        let cfg = sh(theta, 0.3);
        let mut s = SimState::new(0.0, h, hu);
        let m0 = s.mass(grid.dx);
        for _ in 0..30 {
            s = solver::step(&s, &grid, &cfg, &scfg).unwrap().0;
            prop_assert!(s.h.iter().all(|&h| h >= 0.0));
        }
        prop_assert!((s.mass(grid.dx) - m0).abs() <= 1e-12 * m0.max(1e-300));
    }

    #[test]
    fn frictionless_lake_over_random_bed_is_still(bed in prop::collection::vec(0.0..0.3f64, 40), eta in 0.1..0.5f64) {
        // No friction, so nothing holds the surface but the balance of the
        // reconstructed pressures and the bed.
        let mut grid = Grid1D::uniform(40, 0.0, 1.0).unwrap();
        grid.b = bed;
        let cfg = sh(0.0, 0.0);
        let scfg = SolverConfig { t_end: 1e9, bc: Boundary::Reflective, ..SolverConfig::default() };
        let h0: Vec<f64> = grid.b.iter().map(|b| (eta - b).max(0.0)).collect();
        let mut s = SimState::at_rest(h0.clone());
        for _ in 0..50 {
            s = solver::step(&s, &grid, &cfg, &scfg).unwrap().0;
        }
        for i in 0..40 {
            prop_assert!((s.h[i] - h0[i]).abs() < 1e-12, "cell {}: {} vs {}", i, s.h[i], h0[i]);
            prop_assert!(s.hu[i].abs() < 1e-12);
        }
    }

    #[test]
    fn reflective_mirror_symmetry((h, hu) in profile(16)) {
        // Flat, level bed: mirroring the state mirrors the step.
        let grid = Grid1D::uniform(16, 0.0, 1.0).unwrap();
        let cfg = sh(0.0, 0.4);
        let scfg = SolverConfig { t_end: 1e9, bc: Boundary::Reflective, ..SolverConfig::default() };
        let s = SimState::new(0.0, h.clone(), hu.clone());
        let m = SimState::new(0.0, h.iter().rev().copied().collect(), hu.iter().rev().map(|v| -v).collect());
        let (a, _) = solver::step(&s, &grid, &cfg, &scfg).unwrap();
        let (b, _) = solver::step(&m, &grid, &cfg, &scfg).unwrap();
        for i in 0..16 {
            let j = 15 - i;
            prop_assert!((a.h[i] - b.h[j]).abs() <= 1e-14 * (1.0 + a.h[i]));
            prop_assert!((a.hu[i] + b.hu[j]).abs() <= 1e-13 * (1.0 + a.hu[i].abs()));
        }
    }

    #[test]
    fn friction_projection_contracts((h, hu) in profile(20), dt in 1e-5..0.05f64) {
        let cfg = sh(0.2, 0.4);
        let s = SimState::new(0.0, h, hu);
        let out = solver::coulomb_projection(&s, dt, &cfg);
        for (a, b) in s.hu.iter().zip(&out.hu) {
            prop_assert!(b.abs() <= a.abs());
            prop_assert!(*b == 0.0 || b.signum() == a.signum());
        }
    }

    #[test]
    fn flux_is_odd_in_momentum(h in 1e-4..1.0f64, hu in -1.0..1.0f64, k in 0.2..3.0f64) {
        let cfg = sh(0.3, 0.4);
        let f = models::flux(h, hu, k, &cfg);
        let g = models::flux(h, -hu, k, &cfg);
        prop_assert_eq!(g.f_h, -f.f_h);
        prop_assert_eq!(g.f_hu, f.f_hu);
    }

    #[test]
    fn mu_of_i_is_bounded_and_monotone(a in 0.0..10.0f64, b in 0.0..10.0f64,
                                       mu1 in 0.1..0.6f64, dmu in 0.0..0.5f64, i0 in 1e-3..2.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let m_lo = cst::mu_of_i(lo, mu1, mu1 + dmu, i0).unwrap();
        let m_hi = cst::mu_of_i(hi, mu1, mu1 + dmu, i0).unwrap();
        prop_assert!(m_lo <= m_hi);
        prop_assert!(mu1 <= m_lo && m_hi <= mu1 + dmu);
    }

    #[test]
    fn steady_froude_balances_friction(h in 1e-3..0.05f64, t in 0.01..0.99f64) {
        let p = PouliquenParams::new(21f64.to_radians(), 31f64.to_radians(), 0.136, 6.5e-4).unwrap();
        let theta = p.theta1 + t * (p.theta2 - p.theta1);
        let fr = models::steady_froude(h, theta, &p).unwrap();
        let mu = cst::mu_basal(fr, h, &p).unwrap();
        prop_assert!((mu - theta.tan()).abs() <= 1e-12);
    }
}
