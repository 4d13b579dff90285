use std::f64::consts::{FRAC_PI_2, PI};

use whitham_core::hodograph::{
    dsw_solution, edges_near_breaking, epd_gradient, epd_q, solve_whitham, trailing_edge, tsarev_w, DswEvaluator, EpdPotential,
    HodographField, HodographSystem, ModulationState, ZoneSolver, ZoneTrace,
};
use whitham_core::hopf::{breaking_point, hopf_solve, Branch, InitialProfile, TabulatedProfile};
use whitham_core::quad::GaussLegendre;
use whitham_core::wave::RiemannTriple;
use whitham_core::whitham::speeds;

fn sech2() -> InitialProfile {
    InitialProfile::sech2()
}

fn h_l(u: f64) -> f64 {
    -(1.0 / (-u).sqrt()).acosh()
}

fn h_r(u: f64) -> f64 {
    (1.0 / (-u).sqrt()).acosh()
}

fn triple(a: f64, b: f64, c: f64) -> RiemannTriple {
    RiemannTriple::new(a, b, c).unwrap()
}

/// Panels of `[0, 1]` graded towards 1.
const PANELS: [f64; 7] = [0.0, 1e-4, 1e-3, 1e-2, 0.1, 0.4, 1.0];

/// Left-sheet double integral with `μ = 1-2s²`, `ν = sin θ`:
/// `q = (1/π) ∫₀¹ ds ∫ dθ h((1-s²) λ(θ) + s² β₃)`.
fn q0_literal(b: [f64; 3], h: impl Fn(f64) -> f64) -> f64 {
    let gl = GaussLegendre::new(40);
    let lam = |th: f64| b[1] + (b[0] - b[1]) * (1.0 + th.sin()) / 2.0;
    gl.integrate(-FRAC_PI_2, FRAC_PI_2, |th| {
        let l = lam(th);
        // s = 1 - r² clusters nodes at s = 1, where a near-minimum β₃ is felt
        PANELS
            .windows(2)
            .map(|p| {
                gl.integrate(p[0], p[1], |r| {
                    let s = 1.0 - r * r;
                    2.0 * r * h((1.0 - s * s) * l + s * s * b[2])
                })
            })
            .sum::<f64>()
    }) / PI
}

/// Right-sheet formula, `β₃` on the increasing branch of `-sech²`:
/// `q = (1/2π) ∫_{β₂}^{β₁} F(λ) dλ / sqrt((β₁-λ)(λ-β₂)(λ-β₃))`.
fn qnm_literal(b: [f64; 3]) -> f64 {
    let fmin = -1.0;
    let gl = GaussLegendre::new(60);
    let big_f = |l: f64| {
        // ξ = λ - (λ-f_min) sin²p
        let a = gl.integrate(0.0, FRAC_PI_2, |p| {
            h_l(l - (l - fmin) * p.sin().powi(2)) * 2.0 * (l - fmin).sqrt() * p.cos()
        });
        // ξ = f_min + (β₃-f_min) r²
        let c = PANELS
            .windows(2)
            .map(|w| {
                gl.integrate(w[0], w[1], |r| {
                    let xi = fmin + (b[2] - fmin) * r * r;
                    h_r(xi) * 2.0 * (b[2] - fmin) * r / (l - xi).sqrt()
                })
            })
            .sum::<f64>();
        a - c
    };
    let n = 200;
    let sum: f64 = (0..n)
        .map(|j| {
            let x = (PI * (j as f64 + 0.5) / n as f64).cos();
            let l = 0.5 * (b[0] + b[1]) + 0.5 * (b[0] - b[1]) * x;
            big_f(l) / (l - b[2]).sqrt()
        })
        .sum();
    sum / (2.0 * n as f64)
}

/// Profile whose decreasing branch is `h_L(u) = -4u - 4` on `u ∈ [-0.75, 0]`.
fn linear_left_profile() -> InitialProfile {
    let x: Vec<f64> = (0..=12).map(|i| -4.0 + 0.5 * i as f64).collect();
    let u: Vec<f64> = x
        .iter()
        .map(|&x: &f64| if x <= 0.0 { -1.0 - x / 4.0 } else { -1.0 + x / 2.0 })
        .collect();
    InitialProfile::Tabulated(TabulatedProfile::new(x, u).unwrap())
}

#[test]
fn diagonal_value() {
    let p = sech2();
    let b = -0.5;
    assert!((epd_q(&triple(b, b, b), &p).unwrap() - h_l(b)).abs() < 1e-12);
    let near = epd_q(&triple(b + 1e-7, b, b - 1e-7), &p).unwrap();
    assert!((near - h_l(b)).abs() < 1e-6);
}

#[test]
fn linear_closed_form() {
    let (a, c) = (-4.0, -4.0);
    let b = [-0.1, -0.35, -0.7];
    let sigma: f64 = b.iter().sum();
    let closed = a * sigma / 3.0 + c;
    // the quadrature oracle integrates the linear data exactly
    assert!((q0_literal(b, |u| a * u + c) - closed).abs() < 1e-13);
    let p = linear_left_profile();
    let tr = triple(b[0], b[1], b[2]);
    assert!((epd_q(&tr, &p).unwrap() - closed).abs() < 1e-9);
    let g = epd_gradient(&tr, &p).unwrap();
    for gi in g {
        assert!((gi - a / 3.0).abs() < 1e-8, "{g:?}");
    }
    let lam = speeds(&tr).lambda;
    let w = tsarev_w(&tr, &p).unwrap();
    for i in 0..3 {
        let wi = 0.5 * (lam[i] - 2.0 * sigma) * a / 3.0 + closed;
        assert!((w[i] - wi).abs() < 1e-8);
    }
}

#[test]
fn left_sheet_matches_double_integral() {
    let p = sech2();
    for b in [[-0.2, -0.5, -0.8], [-0.05, -0.3, -0.4], [-0.6, -0.61, -0.99], [-0.3, -0.3, -0.9]] {
        let lib = epd_q(&triple(b[0], b[1], b[2]), &p).unwrap();
        let lit = q0_literal(b, h_l);
        assert!((lib - lit).abs() < 1e-9, "{b:?}: {lib} vs {lit}");
    }
}

#[test]
fn right_sheet_matches_nested_integral() {
    let p = sech2();
    for b in [[-0.3, -0.6, -0.8], [-0.1, -0.5, -0.95], [-0.4, -0.45, -0.5]] {
        let s = ModulationState::from_triple(&triple(b[0], b[1], b[2]), Branch::Right, &p).unwrap();
        let lib = EpdPotential::new(&p).eval(&s).unwrap().q;
        let lit = qnm_literal(b);
        assert!((lib - lit).abs() < 1e-9, "{b:?}: {lib} vs {lit}");
    }
}

#[test]
fn sheets_join_at_hump_minimum() {
    let b = [-0.3, -0.6, -1.0 + 1e-6];
    let left = q0_literal(b, h_l);
    let right = qnm_literal(b);
    assert!((left - right).abs() < 1e-6, "{left} vs {right}");
    let p = sech2();
    let epd = EpdPotential::new(&p);
    let tr = triple(b[0], b[1], b[2]);
    let ql = epd.eval(&ModulationState::from_triple(&tr, Branch::Left, &p).unwrap()).unwrap().q;
    let qr = epd.eval(&ModulationState::from_triple(&tr, Branch::Right, &p).unwrap()).unwrap().q;
    assert!((ql - left).abs() < 1e-9 && (qr - right).abs() < 1e-9);
}

#[test]
fn gradient_matches_differences() {
    let p = sech2();
    let epd = EpdPotential::new(&p);
    let h = 1e-5;
    let states = [
        ModulationState::from_triple(&triple(-0.2, -0.5, -0.8), Branch::Left, &p).unwrap(),
        ModulationState::from_triple(&triple(-0.3, -0.6, -0.8), Branch::Right, &p).unwrap(),
        ModulationState { beta1: -0.25, beta2: -0.7, zeta3: 0.05 },
    ];
    for s in states {
        let g = epd.eval(&s).unwrap().grad;
        let q = |d1: f64, d2: f64, dz: f64| {
            epd.eval(&ModulationState { beta1: s.beta1 + d1, beta2: s.beta2 + d2, zeta3: s.zeta3 + dz })
                .unwrap()
                .q
        };
        let d1 = (q(h, 0.0, 0.0) - q(-h, 0.0, 0.0)) / (2.0 * h);
        let d2 = (q(0.0, h, 0.0) - q(0.0, -h, 0.0)) / (2.0 * h);
        // β₃ is moved through its foot: ∂q/∂ζ₃ = ∂q/∂β₃ f'(ζ₃)
        let dz = (q(0.0, 0.0, h) - q(0.0, 0.0, -h)) / (2.0 * h);
        assert!((g[0] - d1).abs() < 1e-6, "{s:?}: {} vs {d1}", g[0]);
        assert!((g[1] - d2).abs() < 1e-6, "{s:?}: {} vs {d2}", g[1]);
        assert!((g[2] * p.fprime(s.zeta3) - dz).abs() < 1e-6, "{s:?}");
    }
}

#[test]
fn gradient_symmetric_on_soliton_diagonal() {
    let p = sech2();
    let g = epd_gradient(&triple(-0.4, -0.4, -0.9), &p).unwrap();
    assert!((g[0] - g[1]).abs() < 1e-9, "{g:?}");
}

#[test]
fn euler_poisson_darboux_residual() {
    let p = sech2();
    let b = [-0.2, -0.5, -0.8];
    let h = 1e-5;
    let grad = |b: [f64; 3]| epd_gradient(&triple(b[0], b[1], b[2]), &p).unwrap();
    let g = grad(b);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let mut bp = b;
        let mut bm = b;
        bp[j] += h;
        bm[j] -= h;
        let mixed = (grad(bp)[i] - grad(bm)[i]) / (2.0 * h);
        let r = g[i] - g[j] - 2.0 * (b[i] - b[j]) * mixed;
        assert!(r.abs() < 1e-5, "({i},{j}): {r:.3e}");
    }
}

#[test]
fn tsarev_compatibility() {
    let p = sech2();
    let b = [-0.2, -0.5, -0.8];
    let h = 1e-5;
    let w = |b: [f64; 3]| tsarev_w(&triple(b[0], b[1], b[2]), &p).unwrap();
    let lam = |b: [f64; 3]| speeds(&triple(b[0], b[1], b[2])).lambda;
    let (w0, l0) = (w(b), lam(b));
    for i in 0..3 {
        for j in (0..3).filter(|&j| j != i) {
            let mut bp = b;
            let mut bm = b;
            bp[j] += h;
            bm[j] -= h;
            let dw = (w(bp)[i] - w(bm)[i]) / (2.0 * h);
            let dl = (lam(bp)[i] - lam(bm)[i]) / (2.0 * h);
            let r = dw / (w0[i] - w0[j]) - dl / (l0[i] - l0[j]);
            assert!(r.abs() < 1e-4, "({i},{j}): {r:.3e}");
        }
    }
}

#[test]
fn velocities_reduce_to_characteristics_on_diagonal() {
    let p = sech2();
    let beta = -0.6;
    let t = 0.3;
    for &d in &[1e-3, 1e-4] {
        let tr = triple(beta + d, beta, beta - d);
        let w = tsarev_w(&tr, &p).unwrap();
        let lam = speeds(&tr).lambda;
        for i in 0..3 {
            let x = lam[i] * t + w[i];
            assert!((x - (6.0 * beta * t + h_l(beta))).abs() < 50.0 * d, "d={d} i={i}");
        }
    }
}

#[test]
fn interior_solve_reproduces_x() {
    let p = sech2();
    let t = 0.4;
    let sys = HodographSystem::new(&p);
    let trace = ZoneTrace::compute(&sys, t).unwrap();
    let (a, b) = (trace.x_minus(), trace.x_plus());
    for i in 1..10 {
        let x = a + (b - a) * i as f64 / 10.0;
        let mut seed = trace.seed(x, &p);
        seed.beta1 += 1e-3;
        let s = solve_whitham(x, t, &p, &seed).unwrap();
        assert!(sys.residual(&s, x, t).unwrap() <= 1e-9);
        let tr = s.triple(&p).unwrap();
        assert!(tr.beta1 > tr.beta2 && tr.beta2 > tr.beta3);
    }
}

#[test]
fn trailing_edge_matches_hopf() {
    let p = sech2();
    for &t in &[0.3, 0.4, 0.6] {
        let e = trailing_edge(t, &p).unwrap();
        assert!(e.v > e.xi);
        let v = hopf_solve(e.x_minus, t, &p).unwrap();
        let gap = v.iter().map(|v| (v - e.v).abs()).fold(f64::INFINITY, f64::min);
        assert!(gap < 1e-6, "t={t}: {v:?} vs {}", e.v);
    }
}

#[test]
fn edges_match_hopf_values() {
    let p = sech2();
    let t = 0.4;
    let zone = ZoneSolver::new(&p, t).unwrap();
    let inner = zone.triple(zone.x_minus() + 1e-6).unwrap();
    let v = hopf_solve(zone.x_minus() + 1e-6, t, &p).unwrap();
    assert!((inner.beta1 - v[0]).abs() < 1e-4, "{inner:?} {v:?}");
    assert!((inner.beta2 - inner.beta3).abs() < 1e-3);
    let last = zone.trace().points.last().unwrap();
    let tr = last.state.triple(&p).unwrap();
    let v = hopf_solve(last.x, t, &p).unwrap();
    assert!((tr.beta3 - v[v.len() - 1]).abs() < 1e-4, "{tr:?} {v:?}");
    assert!(last.m > 1.0 - 1e-7);
}

#[test]
fn zone_continuous_after_breaking() {
    let p = sech2();
    let bp = breaking_point(&p).unwrap();
    let sys = HodographSystem::new(&p);
    let t0 = bp.t_c + 1e-3;
    let n = 24;
    let mut prev: Option<(f64, f64, f64)> = None;
    for i in 0..=n {
        let t = t0 + (0.6 - t0) * i as f64 / n as f64;
        let tr = ZoneTrace::compute(&sys, t).unwrap();
        let (a, b) = (tr.x_minus(), tr.x_plus());
        assert!(a < b, "t={t}");
        assert!(tr.is_monotone());
        if let Some((tp, ap, bp_)) = prev {
            // edge speeds stay within the range of characteristic speeds
            let dt = t - tp;
            assert!((a - ap).abs() < 12.0 * dt && (b - bp_).abs() < 12.0 * dt, "t={t}");
        }
        prev = Some((t, a, b));
    }
}

#[test]
fn zone_collapses_at_breaking() {
    let p = sech2();
    let bp = breaking_point(&p).unwrap();
    let t = bp.t_c + 1e-6;
    let trace = ZoneTrace::compute(&HodographSystem::new(&p), t).unwrap();
    for pt in &trace.points {
        let tr = pt.state.triple(&p).unwrap();
        for b in tr.as_array() {
            assert!((b - bp.u_c).abs() < 2e-2, "{tr:?}");
        }
        assert!((pt.x - bp.x_c).abs() < 1e-3);
    }
}

fn field_derivative_residuals(h: f64) -> (f64, f64) {
    let p = sech2();
    let t = 0.4;
    let zones: Vec<ZoneSolver> = [t - h, t, t + h].iter().map(|&s| ZoneSolver::new(&p, s).unwrap()).collect();
    let (a, b) = (zones[1].x_minus(), zones[1].x_plus());
    let mut pde: f64 = 0.0;
    let mut waves: f64 = 0.0;
    for i in 0..40 {
        let x = a + (b - a) * (0.2 + 0.6 * i as f64 / 39.0);
        let at = |z: usize, x: f64| zones[z].triple(x).unwrap();
        let (c, xl, xr, tl, tr) = (at(1, x), at(1, x - h), at(1, x + h), at(0, x), at(2, x));
        let lam = speeds(&c).lambda;
        let (bl, br, btl, btr) = (xl.as_array(), xr.as_array(), tl.as_array(), tr.as_array());
        for j in 0..3 {
            let bx = (br[j] - bl[j]) / (2.0 * h);
            let bt = (btr[j] - btl[j]) / (2.0 * h);
            pde = pde.max((bt + lam[j] * bx).abs());
        }
        let kt = (tr.k() - tl.k()) / (2.0 * h);
        let wx = (xr.omega() - xl.omega()) / (2.0 * h);
        waves = waves.max((kt + wx).abs());
    }
    (pde, waves)
}

#[test]
fn field_solves_whitham_to_second_order() {
    let (p1, w1) = field_derivative_residuals(4e-3);
    let (p2, w2) = field_derivative_residuals(2e-3);
    assert!(p1 < 5e-2 && w1 < 1e-2, "{p1:.3e} {w1:.3e}");
    assert!(p1 / p2 > 3.0, "Whitham residual ratio {:.2}", p1 / p2);
    assert!(w1 / w2 > 3.0, "wave conservation ratio {:.2}", w1 / w2);
}

#[test]
fn phase_derivative_identity() {
    let p = sech2();
    let t = 0.4;
    let eval = DswEvaluator::new(&p, t, 1e-2).unwrap();
    let zone = eval.zone();
    let (a, b) = (zone.x_minus(), zone.x_plus());
    let phase = |x: f64| {
        let (tr, phi0) = eval.modulation(x).unwrap();
        tr.k() * x - tr.omega() * t + phi0
    };
    let h = 1e-4;
    for i in 1..10 {
        let x = a + (b - a) * (0.1 + 0.8 * i as f64 / 10.0);
        let d = (phase(x + h) - phase(x - h)) / (2.0 * h);
        let k = eval.modulation(x).unwrap().0.k();
        assert!((d - k).abs() < 1e-5, "x={x}: {d} vs {k}");
    }
}

#[test]
fn outside_zone_is_hopf() {
    let p = sech2();
    let t = 0.4;
    let zone = ZoneSolver::new(&p, t).unwrap();
    for &x in &[zone.x_minus() - 0.5, zone.x_minus() - 1e-3] {
        let v = hopf_solve(x, t, &p).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(dsw_solution(x, t, &p, 1e-2).unwrap(), v[0]);
    }
    // the Hopf fold reaches past x₊; the wave rides on the leading sheet
    for &x in &[zone.x_plus() + 1e-3, zone.x_plus() + 1.0] {
        let v = hopf_solve(x, t, &p).unwrap();
        assert_eq!(dsw_solution(x, t, &p, 1e-2).unwrap(), v[v.len() - 1]);
    }
    assert_eq!(hopf_solve(zone.x_plus() + 1e-3, t, &p).unwrap().len(), 3);
}

#[test]
fn field_is_ordered_inside() {
    let p = sech2();
    let f = HodographField::compute(&p, &[0.3, 0.5], 60).unwrap();
    assert!(f.max_residual() <= 1e-9);
    for s in &f.slices {
        assert!(s.x_minus < s.x_plus);
        for tr in &s.triples {
            assert!(tr.beta1 > tr.beta2 && tr.beta2 > tr.beta3, "t={}: {tr:?}", s.t);
        }
    }
}

/// Relative deviation of the `τ^{3/2}` part of the traced edges from the
/// near-breaking expansion.
fn edge_expansion_deviation(tau: f64) -> (f64, f64) {
    let p = sech2();
    let bp = breaking_point(&p).unwrap();
    let t = bp.t_c + tau;
    let trace = ZoneTrace::compute(&HodographSystem::new(&p), t).unwrap();
    let (em, ep) = edges_near_breaking(t, &p).unwrap();
    let base = bp.x_c + 6.0 * bp.u_c * tau;
    (
        ((trace.x_minus() - base) / (em - base) - 1.0).abs(),
        ((trace.x_plus() - base) / (ep - base) - 1.0).abs(),
    )
}

#[test]
fn edges_follow_near_breaking_expansion() {
    let devs: Vec<(f64, f64)> = [1e-2, 1e-3, 1e-4].iter().map(|&tau| edge_expansion_deviation(tau)).collect();
    assert!(devs[1].0 < 0.02, "{devs:?}");
    // the x₊ correction is relatively larger and decays like √τ
    for w in devs.windows(2) {
        assert!(w[1].1 < 0.5 * w[0].1, "{devs:?}");
    }
    assert!(devs[2].1 < 0.03, "{devs:?}");
    assert!(edges_near_breaking(0.1, &sech2()).is_err());
}
