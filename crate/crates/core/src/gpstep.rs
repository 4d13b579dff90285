//! Self-similar modulated wave for the decreasing step `u(x,0) = c` for
//! `x < 0`, `0` for `x > 0`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solve::brent;
use crate::wave::{cnoidal_u, RiemannTriple, WavePhase};
use crate::whitham::speeds;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepProblem {
    pub c: f64,
    /// Phase of the modulated wave; the self-similar construction leaves it free.
    #[serde(default)]
    pub phi0: f64,
    pub epsilon: f64,
}

impl StepProblem {
    pub fn new(c: f64, phi0: f64, epsilon: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::Parameter(format!("step height c must be positive, got {c}")));
        }
        if !(epsilon > 0.0) {
            return Err(Error::Parameter(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Self { c, phi0, epsilon })
    }
}

/// `λ₂(1, b, 0)`.
fn lambda2_unit(b: f64) -> f64 {
    speeds(&RiemannTriple::new(1.0, b, 0.0).expect("0 <= b <= 1")).lambda2()
}

fn check_monotone() -> bool {
    const N: usize = 2000;
    let vals: Vec<f64> = (0..=N).map(|i| lambda2_unit(i as f64 / N as f64)).collect();
    vals.windows(2).all(|w| w[1] > w[0])
}

/// `β₂ ∈ [0, c]` with `λ₂(c, β₂, 0) = z`.
pub fn gp_beta2(z: f64, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::Domain(format!("step height must be positive, got {c}")));
    }
    if !(-6.0 * c..=4.0 * c).contains(&z) {
        return Err(Error::Domain(format!(
            "similarity variable z={z} outside [-6c, 4c] = [{}, {}]",
            -6.0 * c,
            4.0 * c
        )));
    }
    static MONOTONE: OnceLock<bool> = OnceLock::new();
    if !*MONOTONE.get_or_init(check_monotone) {
        return Err(Error::Numerical("lambda_2(1, b, 0) is not monotone in b".into()));
    }
    // λ₂ is homogeneous of degree one: λ₂(c, c b, 0) = c λ₂(1, b, 0).
    let s = z / c;
    if s <= -6.0 {
        return Ok(0.0);
    }
    if s >= 4.0 {
        return Ok(c);
    }
    Ok(c * brent(0.0, 1.0, |b| lambda2_unit(b) - s, 1e-14)?)
}

/// `(z₋, z₊) = (-6c, 4c)`.
pub fn gp_edges(c: f64) -> Result<(f64, f64)> {
    if !(c > 0.0) {
        return Err(Error::Domain(format!("step height must be positive, got {c}")));
    }
    Ok((-6.0 * c, 4.0 * c))
}

/// Modulated cnoidal wave with `β = (c, β₂(x/t), 0)`; `c` to the left of the
/// zone and `0` to the right.
pub fn gp_solution(x: f64, t: f64, prob: &StepProblem) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("gp_solution needs t > 0, got {t}")));
    }
    let c = prob.c;
    let z = x / t;
    if z <= -6.0 * c {
        return Ok(c);
    }
    if z >= 4.0 * c {
        return Ok(0.0);
    }
    let b2 = gp_beta2(z, c)?;
    let triple = RiemannTriple::new(c, b2, 0.0)?;
    cnoidal_u(x, t, &triple, &WavePhase::new(prob.phi0, prob.epsilon)?)
}

/// `2c sech²[√c (x - x₊)/ε + ½ log(16c/(c-β₂)) + φ̃₀/ε]` near `x₊ = 4ct`.
pub fn leading_edge_soliton(x: f64, t: f64, prob: &StepProblem, phase_tilde: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("leading_edge_soliton needs t > 0, got {t}")));
    }
    let c = prob.c;
    let x_plus = 4.0 * c * t;
    let b2 = gp_beta2((x / t).clamp(-6.0 * c, 4.0 * c), c)?;
    if b2 >= c {
        return Ok(0.0);
    }
    let arg = c.sqrt() * (x - x_plus) / prob.epsilon
        + 0.5 * (16.0 * c / (c - b2)).ln()
        + phase_tilde / prob.epsilon;
    let s = 1.0 / arg.cosh();
    Ok(2.0 * c * s * s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta2_at_edges() {
        assert_eq!(gp_beta2(4.0, 1.0).unwrap(), 1.0);
        assert_eq!(gp_beta2(-6.0, 1.0).unwrap(), 0.0);
        assert!(gp_beta2(4.5, 1.0).is_err());
    }

    #[test]
    fn beta2_residual() {
        let b = gp_beta2(0.0, 1.0).unwrap();
        assert!(lambda2_unit(b).abs() < 1e-10);
        let b = gp_beta2(1.2, 2.0).unwrap();
        let l = speeds(&RiemannTriple::new(2.0, b, 0.0).unwrap()).lambda2();
        assert!((l - 1.2).abs() < 1e-10);
    }

    #[test]
    fn outside_zone_plateaus() {
        let p = StepProblem::new(1.0, 0.0, 0.05).unwrap();
        assert_eq!(gp_solution(-7.0, 1.0, &p).unwrap(), 1.0);
        assert_eq!(gp_solution(4.5, 1.0, &p).unwrap(), 0.0);
    }

    #[test]
    fn edges_scale() {
        assert_eq!(gp_edges(1.0).unwrap(), (-6.0, 4.0));
        assert_eq!(gp_edges(2.0).unwrap(), (-12.0, 8.0));
        assert!(gp_edges(0.0).is_err());
    }
}
