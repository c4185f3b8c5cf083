//! Reference values from independent one-dimensional quadratures, frozen
//! here and compared with the QMC integrals and the simulator.

use std::f64::consts::{E, PI};

use stit_core::exact::{
    increment_variance_profile, tau, v_w_isotropic, variance_exact, xi_variance, IntegratorConfig,
};
use stit_core::functionals::estimate_a_phi2;
use stit_core::rng::stream;
use stit_core::{run_mnw, ConvexPolytope, FaceFunctional, HyperplaneMeasureSpec};

/// `2 ∬_{[0,1]²} (1 - e^{-|u-v|}) / |u-v| du dv = 4 (Ein(1) - 1/e)`.
const AXIS_SQUARE_VARIANCE: f64 = 1.714_880_632_5;
/// `3 ∬∬ (|a₁-b₁| + |a₂-b₂|)^{-1} = 16 ln 2 - 4`.
const XI_CUBE: f64 = 7.090_354_889_0;

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 40)
}

#[test]
fn frozen_oracles_match_quadrature() {
    // |u - v| has density 2(1 - r) on [0, 1].
    let g = |r: f64| if r == 0.0 { 1.0 } else { -(-r).exp_m1() / r };
    let v = 2.0 * adaptive_simpson(&|r| 2.0 * (1.0 - r) * g(r), 0.0, 1.0, 1e-13);
    assert!((v - AXIS_SQUARE_VARIANCE).abs() < 1e-9, "{v}");

    // Inner integral in closed form, x = u² removes the log singularity.
    let inner = |x: f64| (1.0 + x) * ((1.0 + x) / x).ln() - 1.0;
    let xi = 12.0 * adaptive_simpson(&|u| if u == 0.0 { 0.0 } else { 2.0 * u * (1.0 - u * u) * inner(u * u) }, 0.0, 1.0, 1e-13);
    assert!((xi - XI_CUBE).abs() < 1e-8, "{xi}");
    assert!((XI_CUBE - (16.0 * 2f64.ln() - 4.0)).abs() < 1e-9);
}

#[test]
fn qmc_variance_matches_quadrature() {
    let spec = HyperplaneMeasureSpec::axis_aligned(2);
    let cfg = IntegratorConfig {
        points: 1 << 14,
        ..Default::default()
    };
    let v = variance_exact(&spec, &ConvexPolytope::unit_cube(2), 1.0, &FaceFunctional::surface(), &cfg).unwrap();
    assert!((v.value / AXIS_SQUARE_VARIANCE - 1.0).abs() < 0.005, "{v:?}");
}

#[test]
fn small_time_asymptote_on_the_disk() {
    // ∫ Vol(W ∩ H)² Λ_iso(dH) = 2 ∫_0^1 (2√(1 - p²))² dp = 16/3 for the unit disk.
    let disk = adaptive_simpson(&|p| 2.0 * 4.0 * (1.0 - p * p), 0.0, 1.0, 1e-12);
    assert!((disk - 16.0 / 3.0).abs() < 1e-12);
    let spec = HyperplaneMeasureSpec::isotropic(2).unwrap();
    let cfg = IntegratorConfig {
        points: 4096,
        ..Default::default()
    };
    let w = ConvexPolytope::ball(2, 1.0).unwrap();
    let t = 1e-3;
    let v = variance_exact(&spec, &w, t, &FaceFunctional::surface(), &cfg).unwrap();
    assert!((v.value / t / disk - 1.0).abs() < 0.005, "{v:?}");
}

#[test]
fn variance_is_monotone_in_time() {
    let spec = HyperplaneMeasureSpec::isotropic(2).unwrap();
    let cfg = IntegratorConfig {
        points: 4096,
        ..Default::default()
    };
    let w = ConvexPolytope::unit_cube(2);
    let vals: Vec<f64> = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&t| variance_exact(&spec, &w, t, &FaceFunctional::surface(), &cfg).unwrap().value)
        .collect();
    assert_eq!(vals[0], 0.0);
    assert!(vals.windows(2).all(|p| p[1] > p[0]), "{vals:?}");
}

#[test]
fn xi_variance_is_stable_in_epsilon() {
    let spec = HyperplaneMeasureSpec::axis_aligned(3);
    let w = ConvexPolytope::unit_cube(3);
    let phi = FaceFunctional::surface();
    let values: Vec<_> = [1e-2, 1e-3]
        .iter()
        .map(|&epsilon| {
            let cfg = IntegratorConfig {
                points: 1 << 15,
                epsilon,
                ..Default::default()
            };
            xi_variance(&spec, &w, &phi, &cfg).unwrap()
        })
        .collect();
    for v in &values {
        assert!((v.value / XI_CUBE - 1.0).abs() < 0.01, "{v:?}");
        assert!(v.shell_correction.unwrap() > 0.0);
    }
    let combined = (values[0].error.powi(2) + values[1].error.powi(2)).sqrt();
    assert!((values[0].value - values[1].value).abs() < 4.0 * combined + 0.01, "{values:?}");
}

#[test]
fn large_time_variance_approaches_xi() {
    let spec = HyperplaneMeasureSpec::axis_aligned(3);
    let cfg = IntegratorConfig {
        points: 1 << 14,
        ..Default::default()
    };
    let w = ConvexPolytope::unit_cube(3);
    let v = variance_exact(&spec, &w, 256.0, &FaceFunctional::surface(), &cfg).unwrap();
    assert!(v.value < XI_CUBE && v.value > 0.97 * XI_CUBE, "{v:?}");
}

#[test]
fn compensator_mean_on_the_axis_square() {
    // E A_{φ²}(Y(s)) = 2 [2/s - 2(1 - e^{-s})/s²] for W = [0,1]².
    let spec = HyperplaneMeasureSpec::axis_aligned(2);
    let s = 1.0;
    let exact = 2.0 * (2.0 / s - 2.0 * (1.0 - (-s as f64).exp()) / (s * s));
    let mut acc = stit_core::MomentAccumulator::new();
    for i in 0..4000 {
        let mut rng = stream(11, "compensator", i);
        let st = run_mnw(ConvexPolytope::unit_cube(2), &spec, s, &mut rng).unwrap();
        acc.push(estimate_a_phi2(&st, &spec, &FaceFunctional::surface(), 4, &mut rng).unwrap().0);
    }
    let se = (acc.sample_variance() / 4000.0).sqrt();
    assert!((acc.mean() - exact).abs() < 4.0 * se, "{} vs {exact} ± {se}", acc.mean());
}

#[test]
fn isotropic_constants_from_the_closed_form() {
    assert!((v_w_isotropic(2, PI, 1.0) - PI * PI).abs() < 1e-12);
    assert!((v_w_isotropic(3, 4.0 * PI / 3.0, 1.0) - 32.0 * PI * PI / 3.0).abs() < 1e-10);
    assert!((v_w_isotropic(2, 1.0, 1.0) - PI).abs() < 1e-12);
    // Linear in the volume and in the mean of ζ².
    let a = v_w_isotropic(3, 2.0, 0.5);
    assert!((a - v_w_isotropic(3, 1.0, 1.0)).abs() < 1e-12);
}

#[test]
fn increment_profile_matches_quadrature() {
    let q = adaptive_simpson(&|s| PI / s, 0.5, 1.0, 1e-13);
    assert!((increment_variance_profile(PI, 0.5, 1.0, 2).unwrap() - q).abs() < 1e-10);
    let q = adaptive_simpson(&|s| s.powi(-2), 0.25, 1.0, 1e-13);
    assert!((increment_variance_profile(1.0, 0.25, 1.0, 3).unwrap() - q).abs() < 1e-10);
    assert!(increment_variance_profile(1.0, -0.1, 1.0, 2).is_err());
}

#[test]
fn time_change_endpoints() {
    for r in [3.0, 10.0, 64.0, 1e4] {
        assert!((tau(1.0, r).unwrap() - 1.0).abs() < 1e-14);
        assert!((tau(0.0, r).unwrap() - f64::ln(r) / r).abs() < 1e-14);
    }
    assert!(tau(0.5, E).is_err());
}
