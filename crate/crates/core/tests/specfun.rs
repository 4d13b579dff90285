use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use whitham_core::quad::GaussLegendre;
use whitham_core::specfun::{
    complete_integrals, ellip_e, ellip_k, jacobi_cn, theta3, theta3_value, ThetaParams,
};

#[test]
fn legendre_relation() {
    for i in 1..=9 {
        let m = i as f64 / 10.0;
        let (k, e) = (ellip_k(m).unwrap(), ellip_e(m).unwrap());
        let (kc, ec) = (ellip_k(1.0 - m).unwrap(), ellip_e(1.0 - m).unwrap());
        let lhs = e * kc + ec * k - k * kc;
        assert!((lhs - FRAC_PI_2).abs() < 1e-12, "m={m}: {lhs}");
    }
}

#[test]
fn endpoint_values() {
    assert!((ellip_k(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
    assert!((ellip_e(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
    assert!((ellip_e(1.0).unwrap() - 1.0).abs() < 1e-15);
    assert!(ellip_k(1.0).is_err());
    assert!(ellip_k(-0.1).is_err());
    assert!(ellip_e(1.1).is_err());
}

#[test]
fn small_m_series() {
    for &m in &[1e-3, 1e-4] {
        let k = (FRAC_PI_2) * (1.0 + m / 4.0 + 9.0 * m * m / 64.0);
        let e = (FRAC_PI_2) * (1.0 - m / 4.0 - 3.0 * m * m / 64.0);
        assert!((ellip_k(m).unwrap() - k).abs() < 2.0 * m.powi(3));
        assert!((ellip_e(m).unwrap() - e).abs() < 2.0 * m.powi(3));
    }
}

#[test]
fn logarithmic_law_near_one() {
    let m: f64 = 1.0 - 1e-6;
    let gap = ellip_k(m).unwrap() - 0.5 * (16.0 / (1.0 - m)).ln();
    assert!(gap.abs() < 1e-5, "{gap}");
}

#[test]
fn agm_matches_quadrature() {
    let gl = GaussLegendre::new(400);
    for &m in &[0.0, 0.3, 0.7, 0.95] {
        let k = gl.integrate(0.0, FRAC_PI_2, |p| 1.0 / (1.0 - m * p.sin().powi(2)).sqrt());
        let e = gl.integrate(0.0, FRAC_PI_2, |p| (1.0 - m * p.sin().powi(2)).sqrt());
        let ci = complete_integrals(m).unwrap();
        assert!((ci.k - k).abs() < 1e-10, "K({m})");
        assert!((ci.e - e).abs() < 1e-10, "E({m})");
    }
}

#[test]
fn cn_limits_and_zeros() {
    let k = ellip_k(0.5).unwrap();
    assert!((jacobi_cn(0.0, 0.5).unwrap() - 1.0).abs() < 1e-14);
    assert!(jacobi_cn(k, 0.5).unwrap().abs() < 1e-12);
    assert!((jacobi_cn(1.3, 0.0).unwrap() - 1.3f64.cos()).abs() < 1e-12);
    assert!((jacobi_cn(1.3, 1.0).unwrap() - 1.0 / 1.3f64.cosh()).abs() < 1e-12);
}

#[test]
fn cn_satisfies_its_ode() {
    // eighth-order centred first derivative
    let c = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let h = 1e-2;
    for &m in &[0.2, 0.5, 0.9] {
        for i in 0..40 {
            let z = -3.0 + 0.17 * i as f64;
            let d: f64 = (1..=4)
                .map(|j| {
                    let s = j as f64 * h;
                    c[j - 1] * (jacobi_cn(z + s, m).unwrap() - jacobi_cn(z - s, m).unwrap())
                })
                .sum::<f64>()
                / h;
            let cn = jacobi_cn(z, m).unwrap();
            let rhs = (1.0 - cn * cn) * (1.0 - m + m * cn * cn);
            assert!((d * d - rhs).abs() < 1e-8, "m={m} z={z}: {}", d * d - rhs);
        }
    }
}

#[test]
fn theta_matches_brute_force_sum() {
    let direct: f64 = 1.0 + 2.0 * (1..=50).map(|n| (-PI * (n * n) as f64).exp()).sum::<f64>();
    assert!((theta3_value(0.0, 1.0).unwrap() - direct).abs() < 1e-15);
    let shifted = theta3_value(1.3, 1.0).unwrap();
    assert!((shifted - theta3_value(0.3, 1.0).unwrap()).abs() < 1e-14);
    assert!(theta3_value(0.0, 0.0).is_err());
}

#[test]
fn theta_log_derivative_matches_differences() {
    let p = ThetaParams::new(0.6).unwrap();
    let h = 1e-3;
    for i in 0..20 {
        let z = 0.05 * i as f64;
        let lv = |z: f64| theta3(z, &p).value.ln();
        let fd = (-lv(z + 2.0 * h) + 16.0 * lv(z + h) - 30.0 * lv(z) + 16.0 * lv(z - h) - lv(z - 2.0 * h))
            / (12.0 * h * h);
        assert!((theta3(z, &p).log_d2() - fd).abs() < 1e-6);
    }
}

proptest! {
    #[test]
    fn cn_periodicity(z in -5.0f64..5.0, m in 0.01f64..0.99) {
        let k = ellip_k(m).unwrap();
        let a = jacobi_cn(z, m).unwrap();
        prop_assert!((jacobi_cn(z + 4.0 * k, m).unwrap() - a).abs() < 1e-11);
        prop_assert!((jacobi_cn(z + 2.0 * k, m).unwrap().powi(2) - a * a).abs() < 1e-11);
        prop_assert!(a.abs() <= 1.0 + 1e-15);
    }

    #[test]
    fn theta_even_and_periodic(z in -2.0f64..2.0, tau in 0.1f64..3.0) {
        let a = theta3_value(z, tau).unwrap();
        prop_assert!((theta3_value(-z, tau).unwrap() - a).abs() < 1e-13);
        prop_assert!((theta3_value(z + 1.0, tau).unwrap() - a).abs() < 1e-12);
        prop_assert!(a > 0.0);
    }

    #[test]
    fn k_minus_e_consistent(m in 0.0f64..0.999) {
        let ci = complete_integrals(m).unwrap();
        prop_assert!((ci.k - ci.e - ci.k_minus_e).abs() < 1e-13 * ci.k);
        prop_assert!(ci.k_minus_e >= 0.0);
    }
}
