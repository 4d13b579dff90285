use std::f64::consts::PI;
use std::sync::OnceLock;

use whitham_core::error::Error;
use whitham_core::hodograph::{trailing_edge, ZoneSolver};
use whitham_core::hopf::{breaking_point, InitialProfile};
use whitham_core::painleve::{airy, edge_expansion, layer_variable, HastingsMcLeod};
use whitham_core::quad::GaussLegendre;

fn hm() -> &'static HastingsMcLeod {
    static HM: OnceLock<HastingsMcLeod> = OnceLock::new();
    HM.get_or_init(|| HastingsMcLeod::standard().unwrap())
}

#[test]
fn airy_constants_and_monotonicity() {
    let gamma_2_3 = 1.354_117_939_426_400_4;
    assert!((airy(0.0) - 1.0 / (3f64.powf(2.0 / 3.0) * gamma_2_3)).abs() < 1e-15);
    let mut prev = airy(0.0);
    for i in 1..200 {
        let a = airy(0.05 * i as f64);
        assert!(a > 0.0 && a < prev);
        prev = a;
    }
}

#[test]
fn airy_matches_integral_representation() {
    // Ai(x) = e^{-ζ}/π ∫₀^∞ exp(-√x t²) cos(t³/3) dt, ζ = (2/3) x^{3/2}
    let gl = GaussLegendre::new(40);
    for &x in &[1.0f64, 2.5, 5.0] {
        let r = x.sqrt();
        let integral: f64 = (0..40)
            .map(|j| {
                let a = 0.25 * j as f64;
                gl.integrate(a, a + 0.25, |t| (-r * t * t).exp() * (t.powi(3) / 3.0).cos())
            })
            .sum();
        let zeta = 2.0 / 3.0 * x.powf(1.5);
        let oracle = (-zeta).exp() / PI * integral;
        assert!((airy(x) - oracle).abs() < 1e-12, "x={x}: {} vs {oracle}", airy(x));
    }
}

#[test]
fn hm_residual_off_grid() {
    let hm = hm();
    assert!(hm.residual <= 1e-10);
    let h = 1e-3;
    for i in 0..300 {
        let s = -9.5 + 0.0633 * i as f64;
        let dq = |x: f64| hm.eval_with_derivative(x).1;
        let d2 = (dq(s - 2.0 * h) - 8.0 * dq(s - h) + 8.0 * dq(s + h) - dq(s + 2.0 * h)) / (12.0 * h);
        let q = hm.eval(s);
        let r = d2 - s * q - 2.0 * q.powi(3);
        assert!(r.abs() < 1e-8, "s={s}: {r:.3e}");
    }
}

#[test]
fn hm_boundary_behaviour() {
    let hm = hm();
    assert!((hm.eval(8.0) / airy(8.0) - 1.0).abs() < 1e-4);
    assert!((hm.eval(-8.0) / 4f64.sqrt() - 1.0).abs() < 1e-3);
    assert!(hm.q.iter().all(|&q| q > 0.0));
}

#[test]
fn hm_value_at_origin_is_converged() {
    let base = hm().eval(0.0);
    let fine = HastingsMcLeod::new(10.0, 4001).unwrap().eval(0.0);
    let long = HastingsMcLeod::new(12.0, 2401).unwrap().eval(0.0);
    assert!((base - fine).abs() < 1e-8, "{base} vs {fine}");
    assert!((base - long).abs() < 1e-8, "{base} vs {long}");
}

#[test]
fn hm_rejects_bad_input() {
    assert!(HastingsMcLeod::new(7.9, 2000).is_err());
    assert!(HastingsMcLeod::new(10.0, 8).is_err());
}

#[test]
fn edge_constant_positive_after_breaking() {
    let p = InitialProfile::sech2();
    let tc = breaking_point(&p).unwrap().t_c;
    for i in 0..=8 {
        let t = tc + 0.05 + (0.6 - tc - 0.05) * i as f64 / 8.0;
        let e = trailing_edge(t, &p).unwrap();
        assert!(e.c_e > 0.0, "t={t}: {}", e.c_e);
        assert!(e.v > e.xi);
    }
}

#[test]
fn edge_solve_holds_across_times() {
    // late times put v within 1e-8 of the top of the branch, where the
    // residual floor rises with h_L'
    let p = InitialProfile::sech2();
    for t in [0.5, 0.6, 0.7, 0.75, 0.8, 1.0] {
        let e = trailing_edge(t, &p).unwrap();
        assert!(e.residual < 1e-9, "t={t}: {:.1e}", e.residual);
        assert!(e.v < 0.0 && e.v > e.xi && e.c_e > 0.0, "t={t}: {e:?}");
    }
    let zone = ZoneSolver::new(&p, 0.8).unwrap();
    assert!(zone.x_minus() < zone.x_plus());
}

#[test]
fn expansion_at_and_beyond_edge() {
    let p = InitialProfile::sech2();
    let t = 0.4;
    let eps = 1e-2;
    let e = trailing_edge(t, &p).unwrap();
    let h = 1e-4;
    let dtheta = (e.theta(e.x_minus + h) - e.theta(e.x_minus - h)) / (2.0 * h);
    assert!((dtheta - 2.0 * (e.v - e.xi).sqrt()).abs() < 1e-10);

    assert_eq!(layer_variable(e.x_minus, eps, &e), 0.0);
    let amp = 4.0 * eps.cbrt() * hm().eval(0.0) / e.c_e.cbrt();
    let u0 = edge_expansion(e.x_minus, t, eps, &e, hm()).unwrap();
    assert!((u0 - (e.v - amp * (e.theta0 / eps).cos())).abs() < 1e-14);

    // s ≈ 6 and s ≈ 9 to the left of the zone
    let scale = e.c_e.cbrt() * (e.v - e.xi).sqrt() * eps.powf(2.0 / 3.0);
    let near = (edge_expansion(e.x_minus - 6.0 * scale, t, eps, &e, hm()).unwrap() - e.v).abs();
    let far = (edge_expansion(e.x_minus - 9.0 * scale, t, eps, &e, hm()).unwrap() - e.v).abs();
    let bound = |s: f64| 4.0 * eps.cbrt() / e.c_e.cbrt() * airy(s) * 1.01;
    assert!(near <= bound(6.0) && far <= bound(9.0), "{near:.3e} {far:.3e}");
    assert!(far < 1e-6);
}

#[test]
fn expansion_errors() {
    let p = InitialProfile::sech2();
    let mut e = trailing_edge(0.4, &p).unwrap();
    assert!(edge_expansion(e.x_minus, 0.5, 1e-2, &e, hm()).is_err());
    assert!(edge_expansion(e.x_minus, 0.4, 0.0, &e, hm()).is_err());
    e.c_e = -1.0;
    assert!(matches!(edge_expansion(e.x_minus, 0.4, 1e-2, &e, hm()), Err(Error::Degeneracy(_))));
}
