use proptest::prelude::*;
use whitham_core::wave::RiemannTriple;
use whitham_core::whitham::{quasi_energy, quasi_momentum, speeds, speeds_via_k, AbelianDifferentials};

fn triple(a: f64, b: f64, c: f64) -> RiemannTriple {
    RiemannTriple::new(a, b, c).unwrap()
}

fn close(a: [f64; 3], b: [f64; 3], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn edge_limits() {
    let s = speeds(&triple(1.0, 1.0, 0.0));
    assert!(close(s.lambda, [4.0, 4.0, 0.0], 1e-12), "{:?}", s.lambda);
    let s = speeds(&triple(1.0, 0.0, 0.0));
    assert!(close(s.lambda, [6.0, -6.0, -6.0], 1e-12), "{:?}", s.lambda);
    let s = speeds(&triple(0.3, 0.3, 0.3));
    assert!(s.degenerate);
    assert!(close(s.lambda, [1.8; 3], 1e-15));
}

#[test]
fn compact_form_agrees() {
    for tr in [triple(1.0, 0.5, 0.0), triple(2.0, 0.3, -1.0)] {
        let a = speeds(&tr).lambda;
        let b = speeds_via_k(&tr).unwrap().lambda;
        assert!(close(a, b, 1e-8), "{a:?} vs {b:?}");
    }
    assert!(speeds_via_k(&triple(1.0, 1e-6, 0.0)).is_err());
}

#[test]
fn approach_to_soliton_edge() {
    let (b1, b3) = (1.0, -0.4);
    let w = b1 - b3;
    let mut prev = f64::INFINITY;
    for &d in &[1e-2, 1e-3, 1e-4, 1e-5, 1e-7] {
        let s = speeds(&triple(b1, b1 - d, b3)).lambda;
        let lim = 4.0 * b1 + 2.0 * b3;
        let err = (s[0] - lim).abs().max((s[1] - lim).abs());
        assert!(err < 20.0 * d * (1.0 - d.ln()), "d={d}: {err}");
        // λ₃ only approaches 6β₃ from below, like 4w/(½ log(16w/d) - 1)
        let l = 0.5 * (16.0 * w / d).ln();
        let e3 = 6.0 * b3 - s[2];
        assert!((e3 - 4.0 * w / (l - 1.0)).abs() < 0.05 * e3, "d={d}: {e3}");
        assert!(e3 < prev);
        prev = e3;
    }
}

#[test]
fn approach_to_harmonic_edge() {
    let (b1, b3) = (0.5, -1.0);
    let lim = [6.0 * b1, 12.0 * b3 - 6.0 * b1, 12.0 * b3 - 6.0 * b1];
    for &d in &[1e-3, 1e-5, 1e-8] {
        let s = speeds(&triple(b1, b3 + d, b3)).lambda;
        let err = (0..3).map(|i| (s[i] - lim[i]).abs()).fold(0.0, f64::max);
        assert!(err < 20.0 * d, "d={d}: {err}");
    }
}

#[test]
fn speeds_continuous_across_near_edge_switch() {
    let near = whitham_core::whitham::NEAR_EDGE;
    let pairs = [
        (near * (1.0 - 1e-9), near * (1.0 + 1e-9)),
        (1.0 - near * (1.0 - 1e-9), 1.0 - near * (1.0 + 1e-9)),
    ];
    for (ma, mb) in pairs {
        let a = speeds(&RiemannTriple::from_modulus(1.0, ma, 0.0).unwrap()).lambda;
        let b = speeds(&RiemannTriple::from_modulus(1.0, mb, 0.0).unwrap()).lambda;
        assert!(close(a, b, 1e-9), "m={ma}: {a:?} {b:?}");
    }
}

#[test]
fn differentials_normalised() {
    let tr = triple(1.0, 0.5, 0.0);
    let ad = AbelianDifferentials::new(&tr).unwrap();
    assert!(ad.gap_integral(|l| ad.dp_numerator(l)).abs() < 1e-10);
    assert!(ad.gap_integral(|l| ad.dq_numerator(l)).abs() < 1e-10);
}

#[test]
fn cycle_integrals_give_k_and_omega() {
    for tr in [triple(1.0, 0.5, 0.0), triple(0.2, -0.7, -0.9), triple(3.0, 2.9, -1.0)] {
        let p = quasi_momentum(&tr, tr.beta1).unwrap();
        let q = quasi_energy(&tr, tr.beta1).unwrap();
        assert!((2.0 * p - tr.k()).abs() < 1e-10, "k: {} vs {}", 2.0 * p, tr.k());
        assert!((2.0 * q - tr.omega()).abs() < 1e-10, "omega: {} vs {}", 2.0 * q, tr.omega());
    }
}

#[test]
fn quasi_momentum_on_bands() {
    let tr = triple(1.0, 0.5, 0.0);
    assert!(quasi_momentum(&tr, 0.25).is_err());
    assert!(quasi_momentum(&tr, 0.5).unwrap().abs() < 1e-14);
    // the lower band is reached through the gap, whose integral vanishes
    assert!(quasi_momentum(&tr, 0.0).unwrap().abs() < 1e-10);
    assert!(quasi_momentum(&tr, -2.0).unwrap().is_finite());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn strict_ordering(b3 in -3.0f64..3.0, a in 1e-3f64..3.0, b in 1e-3f64..3.0) {
        let tr = triple(b3 + a + b, b3 + a, b3);
        let s = speeds(&tr);
        prop_assert!(s.lambda1() > s.lambda2() && s.lambda2() > s.lambda3(), "{:?}", s.lambda);
    }

    #[test]
    fn galilean_shift(b3 in -2.0f64..2.0, d in 0.1f64..2.0, m in 0.01f64..0.99) {
        let c = 0.7;
        let a = speeds(&RiemannTriple::from_modulus(b3 + d, m, b3).unwrap()).lambda;
        let b = speeds(&RiemannTriple::from_modulus(b3 + d + c, m, b3 + c).unwrap()).lambda;
        for i in 0..3 {
            prop_assert!((b[i] - a[i] - 6.0 * c).abs() < 1e-11 * (1.0 + a[i].abs()));
        }
    }
}
