//! Trailing edge of the oscillation zone, where `β₂ = β₃ = ξ` and `β₁ = v`:
//!
//! ```text
//! x₋ = 6tv + h_L(v),   6t + φ(ξ; v) = 0,   ∂_ξ φ(ξ; v) = 0,
//! φ(ξ; v) = 1/(2 sqrt(v-ξ)) ∫_ξ^v h_L'(y) / sqrt(y-ξ) dy
//!         = ∫_0^{π/2} h_L'(ξ cos²θ + v sin²θ) cos θ dθ.
//! ```

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hopf::{breaking_point, Branch, InitialProfile};
use crate::quad::{graded_nodes, GaussLegendre};

/// `φ` and the derivatives entering the edge system and the edge layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiValues {
    pub phi: f64,
    pub d_xi: f64,
    pub d_v: f64,
    pub d_xi_xi: f64,
    pub d_xi_v: f64,
    /// Sum of the magnitudes of the terms in `φ` and `∂_ξ φ`, the scale of
    /// their rounding error.
    pub magnitude: f64,
}

const PHI_NODES: usize = 64;

/// Nodes `(θ, w)` on `[0, π/2]` for integrands in `y = ξ cos²θ + v sin²θ`.
/// Near the top of the decreasing branch `h_L` may be singular; there
/// `top - y ≈ (top - v) + (v - ξ)(π/2 - θ)²` and the nodes are graded
/// towards `θ = π/2`.
fn edge_nodes(xi: f64, v: f64, profile: &InitialProfile) -> Result<Vec<(f64, f64)>> {
    let gap = profile.left_range()?.1 - v;
    if v > xi && gap < 0.05 * (v - xi) {
        let a = (gap / (v - xi)).sqrt();
        Ok(graded_nodes(&GaussLegendre::new(20), a, FRAC_PI_2)
            .into_iter()
            .map(|(p, w)| (FRAC_PI_2 - p, w))
            .collect())
    } else {
        Ok(GaussLegendre::new(PHI_NODES).mapped(0.0, FRAC_PI_2).collect())
    }
}

/// `φ(ξ; v)` and its first and mixed/second derivatives, all by
/// differentiation under the integral after `y = ξ cos²θ + v sin²θ`.
pub fn phi(xi: f64, v: f64, profile: &InitialProfile) -> Result<PhiValues> {
    let mut out = PhiValues {
        phi: 0.0,
        d_xi: 0.0,
        d_v: 0.0,
        d_xi_xi: 0.0,
        d_xi_v: 0.0,
        magnitude: 0.0,
    };
    for (th, w) in edge_nodes(xi, v, profile)? {
        let (s, c) = th.sin_cos();
        let y = xi * c * c + v * s * s;
        let [h1, h2, h3] = profile.inverse_derivatives(y, Branch::Left)?;
        out.phi += w * h1 * c;
        out.d_xi += w * h2 * c.powi(3);
        out.d_v += w * h2 * s * s * c;
        out.d_xi_xi += w * h3 * c.powi(5);
        out.d_xi_v += w * h3 * c.powi(3) * s * s;
        out.magnitude += w * (h1.abs() * c + h2.abs() * c.powi(3));
    }
    Ok(out)
}

/// Solution of the trailing-edge system at one time, plus the constants of
/// the Painlevé II layer there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeLayerData {
    pub t: f64,
    /// `β₁` at the edge.
    pub v: f64,
    /// Common value of `β₂ = β₃` at the edge.
    pub xi: f64,
    pub x_minus: f64,
    /// `c = -sqrt(v-ξ) ∂²_ξ φ(ξ; v)`.
    pub c_e: f64,
    /// `2 ∫_ξ^v (h_L'(y) + 6t) sqrt(y-ξ) dy`.
    pub theta0: f64,
    /// `|6t + φ|` and `|∂_ξ φ|` at the returned point.
    pub residual: f64,
}

impl EdgeLayerData {
    /// `Θ(x) = 2 sqrt(v-ξ)(x - x₋) + theta0`.
    pub fn theta(&self, x: f64) -> f64 {
        2.0 * (self.v - self.xi).sqrt() * (x - self.x_minus) + self.theta0
    }
}

/// Residual accepted once Newton stalls, relative to the size of the terms.
const EDGE_TOL: f64 = 1e-11;

fn edge_newton(t: f64, seed: (f64, f64), profile: &InitialProfile) -> Result<(f64, f64, f64)> {
    let (mut xi, mut v) = seed;
    let top = profile.left_range()?.1;
    if !(v < top) {
        return Err(Error::Domain(format!("edge seed v={v} above the decreasing branch")));
    }
    let mut res = f64::INFINITY;
    let mut tol = EDGE_TOL;
    for _ in 0..60 {
        let p = phi(xi, v, profile)?;
        let f1 = 6.0 * t + p.phi;
        let f2 = p.d_xi;
        res = f1.abs().max(f2.abs());
        tol = EDGE_TOL * p.magnitude.max(1.0);
        if res < 1e-13 {
            return Ok((xi, v, res));
        }
        // [[φ_ξ, φ_v], [φ_ξξ, φ_ξv]] (dξ, dv) = -(f1, f2)
        let det = p.d_xi * p.d_xi_v - p.d_v * p.d_xi_xi;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dxi = (-f1 * p.d_xi_v + f2 * p.d_v) / det;
        let dv = (-f2 * p.d_xi + f1 * p.d_xi_xi) / det;
        let mut lam = 1.0;
        loop {
            let (nx, nv) = (xi + lam * dxi, v + lam * dv);
            if nv > nx && nv < top {
                if let Ok(q) = phi(nx, nv, profile) {
                    let r = (6.0 * t + q.phi).abs().max(q.d_xi.abs());
                    if r < res {
                        xi = nx;
                        v = nv;
                        break;
                    }
                }
            }
            lam *= 0.5;
            if lam < 1e-8 {
                // at the rounding floor no step decreases the residual
                if res < tol {
                    return Ok((xi, v, res));
                }
                return Err(Error::Numerical(format!(
                    "trailing-edge system stalled at t={t}, residual {res:.3e}"
                )));
            }
        }
    }
    if res < tol {
        Ok((xi, v, res))
    } else {
        Err(Error::Numerical(format!(
            "trailing-edge system did not converge at t={t}, residual {res:.3e}"
        )))
    }
}

/// Solve the trailing-edge system at time `t > t_c`, by continuation in `t`
/// from the breaking point.
///
/// The system involves `h_L'''`, so tabulated profiles (monotone cubic
/// Hermite, only C¹) are rejected.
pub fn trailing_edge(t: f64, profile: &InitialProfile) -> Result<EdgeLayerData> {
    if let InitialProfile::Tabulated(_) = profile {
        return Err(Error::Configuration(
            "the trailing edge needs three continuous derivatives of the profile; \
             tabulated profiles are only C1"
                .into(),
        ));
    }
    let bp = breaking_point(profile)?;
    if !(t > bp.t_c) {
        return Err(Error::Domain(format!(
            "trailing edge exists only after breaking: t={t} <= t_c={}",
            bp.t_c
        )));
    }
    let sigma = -profile.h_l_3rd(bp.u_c)?;
    if !(sigma > 0.0) {
        return Err(Error::Degeneracy(format!(
            "h_L'''(u_c) = {} is not negative; the generic breaking assumption fails",
            -sigma
        )));
    }
    let tau = t - bp.t_c;
    // ξ - u_c ≈ -sqrt(9τ/(2σ)), v - u_c ≈ -4(ξ - u_c) for small τ
    let seed = |tau: f64| {
        let a = -(9.0 * tau / (2.0 * sigma)).sqrt();
        (bp.u_c + a, bp.u_c - 4.0 * a)
    };
    const STEPS: usize = 24;
    let first = tau.min(1e-6);
    let mut state = edge_newton(bp.t_c + first, seed(first), profile)?;
    let mut prev_tau = first;
    let mut prev = (state.0, state.1);
    for k in 1..=STEPS {
        let tk = tau * (k as f64 / STEPS as f64).powi(2);
        if tk <= prev_tau {
            continue;
        }
        // extrapolate along the square-root law
        let r = (tk / prev_tau).sqrt();
        let guess = (
            bp.u_c + (prev.0 - bp.u_c) * r,
            bp.u_c + (prev.1 - bp.u_c) * r,
        );
        state = edge_newton(bp.t_c + tk, guess, profile)
            .or_else(|_| edge_newton(bp.t_c + tk, prev, profile))?;
        prev = (state.0, state.1);
        prev_tau = tk;
    }
    let (xi, v, residual) = state;
    let p = phi(xi, v, profile)?;
    let c_e = -(v - xi).sqrt() * p.d_xi_xi;
    let mut integral = 0.0;
    for (th, w) in edge_nodes(xi, v, profile)? {
        let (s, c) = th.sin_cos();
        let y = xi + (v - xi) * s * s;
        integral += w * (profile.h_l_prime(y)? + 6.0 * t) * s * s * c;
    }
    Ok(EdgeLayerData {
        t,
        v,
        xi,
        x_minus: 6.0 * t * v + profile.h_l(v)?,
        c_e,
        theta0: 4.0 * (v - xi).powf(1.5) * integral,
        residual,
    })
}
