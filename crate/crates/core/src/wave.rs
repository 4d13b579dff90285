//! The periodic travelling wave of `u_t + 6 u u_x + ε² u_xxx = 0` in
//! Riemann-invariant coordinates, in both `cn²` and theta-function form.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{complete_integrals, jacobi_cn, theta3, ThetaParams};

/// `m` above this is treated through the soliton limit by [`theta_u`].
pub const SOLITON_SWITCH: f64 = 1.0 - 1e-10;
/// `m` below this is treated through the harmonic limit by [`theta_u`].
pub const HARMONIC_SWITCH: f64 = 1e-12;

/// Ordered modulation parameters `β₁ ≥ β₂ ≥ β₃`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannTriple {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
}

impl RiemannTriple {
    pub fn new(beta1: f64, beta2: f64, beta3: f64) -> Result<Self> {
        if !(beta1 >= beta2 && beta2 >= beta3) {
            return Err(Error::Parameter(format!(
                "Riemann invariants must satisfy b1 >= b2 >= b3, got ({beta1}, {beta2}, {beta3})"
            )));
        }
        Ok(Self { beta1, beta2, beta3 })
    }

    /// Build from `β₁`, `β₃` and the parameter `m`.
    pub fn from_modulus(beta1: f64, m: f64, beta3: f64) -> Result<Self> {
        Self::new(beta1, beta3 + m * (beta1 - beta3), beta3)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.beta1, self.beta2, self.beta3]
    }

    pub fn sum(&self) -> f64 {
        self.beta1 + self.beta2 + self.beta3
    }

    /// `β₁ - β₃`.
    pub fn width(&self) -> f64 {
        self.beta1 - self.beta3
    }

    pub fn is_constant(&self) -> bool {
        self.beta1 == self.beta3
    }

    /// `m = (β₂ - β₃)/(β₁ - β₃)`; zero for a constant state.
    pub fn m(&self) -> f64 {
        let d = self.width();
        if d == 0.0 {
            0.0
        } else {
            ((self.beta2 - self.beta3) / d).clamp(0.0, 1.0)
        }
    }

    /// Wavenumber `k = π sqrt(β₁-β₃)/K(m)`; zero in the soliton limit.
    pub fn k(&self) -> f64 {
        let m = self.m();
        if m >= 1.0 {
            return 0.0;
        }
        let kk = complete_integrals(m).expect("m in [0,1)").k;
        PI * self.width().sqrt() / kk
    }

    /// Frequency `ω = 2k(β₁+β₂+β₃)`.
    pub fn omega(&self) -> f64 {
        2.0 * self.k() * self.sum()
    }

    /// `α = -β₁ + (β₁-β₃) E(m)/K(m)`.
    pub fn alpha(&self) -> f64 {
        let m = self.m();
        if m >= 1.0 {
            return -self.beta1;
        }
        let ci = complete_integrals(m).expect("m in [0,1)");
        -self.beta1 + self.width() * ci.e / ci.k
    }

    /// `Im τ = K(1-m)/K(m)`.
    pub fn tau_im(&self) -> Result<f64> {
        Ok(ThetaParams::from_modulus(self.m())?.tau_im)
    }

    /// Wave speed `ω/k = 2(β₁+β₂+β₃)`.
    pub fn phase_speed(&self) -> f64 {
        2.0 * self.sum()
    }
}

/// Phase offset `φ₀` and dispersion parameter `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePhase {
    pub phi0: f64,
    pub epsilon: f64,
}

impl WavePhase {
    pub fn new(phi0: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::Parameter(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Self { phi0, epsilon })
    }

    /// `Ω = k x - ω t + φ₀`.
    pub fn omega_phase(&self, x: f64, t: f64, triple: &RiemannTriple) -> f64 {
        triple.k() * (x - triple.phase_speed() * t) + self.phi0
    }
}

/// `(e₁, e₂, e₃)` with `e₁ = β₁+β₂-β₃`, `e₂ = β₁-β₂+β₃`, `e₃ = -β₁+β₂+β₃`.
/// The wave oscillates between `e₂` (trough) and `e₁` (crest).
pub fn edge_values(triple: &RiemannTriple) -> (f64, f64, f64) {
    let RiemannTriple { beta1, beta2, beta3 } = *triple;
    (beta1 + beta2 - beta3, beta1 - beta2 + beta3, -beta1 + beta2 + beta3)
}

/// Inverse of [`edge_values`].
pub fn from_edge_values(e1: f64, e2: f64, e3: f64) -> Result<RiemannTriple> {
    RiemannTriple::new(0.5 * (e1 + e2), 0.5 * (e1 + e3), 0.5 * (e2 + e3))
}

fn check_phase(phase: &WavePhase) -> Result<()> {
    if !(phase.epsilon > 0.0) {
        return Err(Error::Parameter(format!(
            "epsilon must be positive, got {}",
            phase.epsilon
        )));
    }
    Ok(())
}

/// `cn²` form:
/// `u = β₁+β₃-β₂ + 2(β₂-β₃) cn²(K Ω/(πε) + K; m)`.
///
/// At `β₁ = β₂` exactly the period is infinite; the returned profile is the
/// soliton `β₃ + 2(β₁-β₃) sech²(sqrt(β₁-β₃)(x - (4β₁+2β₃)t)/ε + φ₀/ε)`.
pub fn cnoidal_u(x: f64, t: f64, triple: &RiemannTriple, phase: &WavePhase) -> Result<f64> {
    check_phase(phase)?;
    if triple.is_constant() {
        return Ok(triple.beta1);
    }
    let RiemannTriple { beta1, beta2, beta3 } = *triple;
    let eps = phase.epsilon;
    let m = triple.m();
    if m >= 1.0 {
        let arg = (triple.width().sqrt() * (x - triple.phase_speed() * t) + phase.phi0) / eps;
        let s = 1.0 / arg.cosh();
        return Ok(beta3 + 2.0 * (beta1 - beta3) * s * s);
    }
    let kk = complete_integrals(m)?.k;
    let omega = phase.omega_phase(x, t, triple);
    let cn = jacobi_cn(kk * omega / (PI * eps) + kk, m)?;
    Ok(beta1 + beta3 - beta2 + 2.0 * (beta2 - beta3) * cn * cn)
}

/// Theta-function form:
/// `u = β₁+β₂+β₃ + 2α + 2ε² ∂²ₓ log ϑ(Ω/(2πε); τ)`.
///
/// The second derivative is taken from the term-wise differentiated series.
/// With `Ω` defined identically in both forms, the crest of the `cn²` form
/// (`Ω/(2πε) ≡ -1/2 mod 1`) coincides with the maximum of `∂² log ϑ`
/// (`z ≡ 1/2 mod 1`), so no extra half-period shift is needed.
pub fn theta_u(x: f64, t: f64, triple: &RiemannTriple, phase: &WavePhase) -> Result<f64> {
    check_phase(phase)?;
    if triple.is_constant() {
        return Ok(triple.beta1);
    }
    let m = triple.m();
    if !(HARMONIC_SWITCH..=SOLITON_SWITCH).contains(&m) {
        return cnoidal_u(x, t, triple, phase);
    }
    let eps = phase.epsilon;
    let k = triple.k();
    let params = ThetaParams::from_modulus(m)?;
    let z = phase.omega_phase(x, t, triple) / (2.0 * PI * eps);
    let th = theta3(z, &params);
    // ∂ₓ z = k/(2πε)
    let scale = k / (2.0 * PI * eps);
    Ok(triple.sum() + 2.0 * triple.alpha() + 2.0 * eps * eps * scale * scale * th.log_d2())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_values_examples() {
        let t = RiemannTriple::new(1.0, 1.0, 0.0).unwrap();
        assert_eq!(edge_values(&t), (2.0, 0.0, 0.0));
        let t = RiemannTriple::new(1.0, 0.5, 0.0).unwrap();
        assert_eq!(edge_values(&t), (1.5, 0.5, -0.5));
    }

    #[test]
    fn ordering_is_enforced() {
        assert!(RiemannTriple::new(0.0, 1.0, 0.5).is_err());
        assert!(WavePhase::new(0.0, 0.0).is_err());
    }

    #[test]
    fn constant_state() {
        let t = RiemannTriple::new(0.3, 0.3, 0.3).unwrap();
        let p = WavePhase::new(0.2, 0.1).unwrap();
        assert_eq!(cnoidal_u(0.4, 1.0, &t, &p).unwrap(), 0.3);
        assert_eq!(theta_u(0.4, 1.0, &t, &p).unwrap(), 0.3);
        assert!((t.alpha() + 0.3).abs() < 1e-15);
    }

    #[test]
    fn crest_and_trough() {
        let t = RiemannTriple::new(1.0, 0.4, -0.2).unwrap();
        let p = WavePhase::new(0.0, 0.1).unwrap();
        let (e1, e2, _) = edge_values(&t);
        let period = 2.0 * PI * p.epsilon / t.k();
        let n = 4001;
        let us: Vec<f64> = (0..n)
            .map(|i| cnoidal_u(period * i as f64 / (n - 1) as f64, 0.0, &t, &p).unwrap())
            .collect();
        let max = us.iter().cloned().fold(f64::MIN, f64::max);
        let min = us.iter().cloned().fold(f64::MAX, f64::min);
        assert!((max - e1).abs() < 1e-6, "{max} vs {e1}");
        assert!((min - e2).abs() < 1e-6, "{min} vs {e2}");
    }

    #[test]
    fn theta_period() {
        let t = RiemannTriple::new(1.0, 0.5, 0.0).unwrap();
        let p = WavePhase::new(0.3, 0.1).unwrap();
        let period = 2.0 * PI * p.epsilon / t.k();
        for i in 0..10 {
            let x = 0.037 * i as f64;
            let a = theta_u(x, 0.2, &t, &p).unwrap();
            let b = theta_u(x + period, 0.2, &t, &p).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }
}
