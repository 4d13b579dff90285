//! The Euler–Poisson–Darboux potential `q(β₁, β₂, β₃)` fixed by
//! `q(β, β, β) = h_L(β)`, its gradient, and the Tsarev velocities.
//!
//! `β₃` is carried through its characteristic foot `ζ₃` (`β₃ = f(ζ₃)`), so
//! the passage of `β₃` around the hump minimum onto the increasing branch of
//! `f` is a smooth change of `ζ₃` rather than a switch of formula.
//!
//! Two quadrature representations are used. With `λ(θ) = β₂ + (β₁-β₂)(1+sinθ)/2`,
//! `D = λ - β₃` and
//!
//! ```text
//! J(λ) = ∫_{h_L(λ)}^{ζ₃} sqrt(λ - f(y)) dy,
//! q = ζ₃ - (1/π) ∫_{-π/2}^{π/2} J(λ(θ)) / sqrt(D) dθ,
//! ```
//!
//! the *y-form* integrates `J` directly after `y = y₀ + (ζ₃-y₀) r²`. On the
//! decreasing branch, substituting `u = f(y)` and `u = β₃ + D(1-r²)` gives the
//! *u-form* with integrand `-h_L'(u)`, which is smoother away from the hump
//! minimum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hopf::{Branch, InitialProfile};
use crate::quad::{graded_nodes, GaussLegendre};
use crate::wave::RiemannTriple;
use crate::whitham::speeds;

use std::borrow::Cow;
use std::f64::consts::{FRAC_PI_2, PI};

/// Relative distance of `β₃` above `f_min`, in units of `β₁-β₃`, above
/// which the u-form is used on the decreasing branch.
pub const U_FORM_MARGIN: f64 = 0.05;

/// Graded panels are used once the distance from the top of the decreasing
/// branch, where `h_L` may be singular, falls below this fraction of the
/// integration range.
const GRADE_RATIO: f64 = 0.05;

/// Point of the Whitham phase space: `(β₁, β₂)` and the foot `ζ₃` of `β₃`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationState {
    pub beta1: f64,
    pub beta2: f64,
    pub zeta3: f64,
}

impl ModulationState {
    /// `β₃` on the given branch of `f`.
    pub fn from_triple(triple: &RiemannTriple, branch: Branch, profile: &InitialProfile) -> Result<Self> {
        let zeta3 = match branch {
            Branch::Left => profile.h_l(triple.beta3)?,
            Branch::Right => profile.h_r(triple.beta3)?,
        };
        Ok(Self {
            beta1: triple.beta1,
            beta2: triple.beta2,
            zeta3,
        })
    }

    /// State with `β₂ = β₃ + m(β₁-β₃)`.
    pub fn from_modulus(beta1: f64, m: f64, zeta3: f64, profile: &InitialProfile) -> Self {
        let b3 = profile.f(zeta3);
        Self {
            beta1,
            beta2: b3 + m * (beta1 - b3),
            zeta3,
        }
    }

    /// `f(ζ₃)`, capped at `β₂` against rounding in the round trip through `ζ₃`.
    pub fn beta3(&self, profile: &InitialProfile) -> f64 {
        profile.f(self.zeta3).min(self.beta2)
    }

    pub fn triple(&self, profile: &InitialProfile) -> Result<RiemannTriple> {
        RiemannTriple::new(self.beta1, self.beta2, self.beta3(profile))
    }

    pub fn branch(&self, profile: &InitialProfile) -> Branch {
        match profile.zeta_min() {
            Some(z) if self.zeta3 > z => Branch::Right,
            _ => Branch::Left,
        }
    }
}

/// `q` and `(∂q/∂β₁, ∂q/∂β₂, ∂q/∂β₃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpdValue {
    pub q: f64,
    pub grad: [f64; 3],
}

/// Quadrature evaluator for the potential of one initial profile.
#[derive(Debug, Clone)]
pub struct EpdPotential<'a> {
    profile: &'a InitialProfile,
    theta: Vec<(f64, f64)>,
    radial: Vec<(f64, f64)>,
    panel: GaussLegendre,
}

impl<'a> EpdPotential<'a> {
    pub fn new(profile: &'a InitialProfile) -> Self {
        Self::with_orders(profile, 64, 64)
    }

    pub fn with_orders(profile: &'a InitialProfile, n_theta: usize, n_radial: usize) -> Self {
        Self {
            profile,
            theta: GaussLegendre::new(n_theta).mapped(-FRAC_PI_2, FRAC_PI_2).collect(),
            radial: GaussLegendre::new(n_radial).mapped(0.0, 1.0).collect(),
            panel: GaussLegendre::new(20),
        }
    }

    /// `θ` nodes. With `φ = π/2 - θ`, `top - λ ≈ (top - β₁) + (β₁-β₂)φ²/4`,
    /// so close to the top of the branch the nodes are graded towards `φ = 0`.
    fn theta_nodes(&self, b1: f64, b2: f64) -> Result<Cow<'_, [(f64, f64)]>> {
        let gap = self.profile.left_range()?.1 - b1;
        if b1 > b2 && gap < GRADE_RATIO * (b1 - b2) {
            let a = (4.0 * gap / (b1 - b2)).sqrt();
            Ok(Cow::Owned(
                graded_nodes(&self.panel, a, PI)
                    .into_iter()
                    .map(|(phi, w)| (FRAC_PI_2 - phi, w))
                    .collect(),
            ))
        } else {
            Ok(Cow::Borrowed(&self.theta))
        }
    }

    pub fn profile(&self) -> &InitialProfile {
        self.profile
    }

    fn check(&self, s: &ModulationState) -> Result<(f64, f64, f64)> {
        let b3 = s.beta3(self.profile);
        if !(s.beta1 >= s.beta2 && s.beta2 >= b3) {
            return Err(Error::Domain(format!(
                "unordered state ({}, {}, {b3})",
                s.beta1, s.beta2
            )));
        }
        let (lo, hi) = self.profile.left_range()?;
        if !(s.beta2 > lo && s.beta1 < hi) {
            return Err(Error::Domain(format!(
                "beta1, beta2 = ({}, {}) outside the decreasing branch range ({lo}, {hi})",
                s.beta1, s.beta2
            )));
        }
        Ok((s.beta1, s.beta2, b3))
    }

    /// `q` and its gradient at `s`.
    pub fn eval(&self, s: &ModulationState) -> Result<EpdValue> {
        let (b1, b2, b3) = self.check(s)?;
        if b1 == b3 {
            let h1 = self.profile.h_l_prime(b1)?;
            return Ok(EpdValue {
                q: s.zeta3,
                grad: [h1 / 3.0; 3],
            });
        }
        let use_u = s.branch(self.profile) == Branch::Left
            && b3 - self.profile.f_min() >= U_FORM_MARGIN * (b1 - b3);
        if use_u {
            self.eval_u_form(s, b1, b2, b3)
        } else {
            self.eval_y_form(s, b1, b2, b3)
        }
    }

    /// u-form: `F = 2D ∫₀¹ g(β₃ + D(1-r²)) r² dr`, `F' = ∫₀¹ g (1-r²) dr`,
    /// `g = -h_L'`.
    pub fn eval_u_form(&self, s: &ModulationState, b1: f64, b2: f64, b3: f64) -> Result<EpdValue> {
        let mut q_int = 0.0;
        let mut g1 = 0.0;
        let mut g2 = 0.0;
        let mut g3 = 0.0;
        let top = self.profile.left_range()?.1;
        let mut graded;
        for &(th, wt) in self.theta_nodes(b1, b2)?.iter() {
            let sn = th.sin();
            let lam = b2 + (b1 - b2) * 0.5 * (1.0 + sn);
            let d = lam - b3;
            // u = λ - D r² approaches the top of the branch at r = 0
            let rho = (top - lam) / d;
            let radial = if rho < GRADE_RATIO {
                graded = graded_nodes(&self.panel, rho.sqrt(), 1.0);
                &graded
            } else {
                &self.radial
            };
            let mut s2 = 0.0;
            let mut s0 = 0.0;
            for &(r, wr) in radial {
                let g = -self.profile.h_l_prime(b3 + d * (1.0 - r * r))?;
                s2 += wr * g * r * r;
                s0 += wr * g * (1.0 - r * r);
            }
            q_int += wt * 2.0 * d * s2;
            g1 += wt * s0 * 0.5 * (1.0 + sn);
            g2 += wt * s0 * 0.5 * (1.0 - sn);
            g3 += wt * s2;
        }
        Ok(EpdValue {
            q: s.zeta3 - q_int / PI,
            grad: [-g1 / PI, -g2 / PI, -g3 / PI],
        })
    }

    /// y-form, valid on both branches.
    pub fn eval_y_form(&self, s: &ModulationState, b1: f64, b2: f64, b3: f64) -> Result<EpdValue> {
        let p = self.profile;
        let mut q_int = 0.0;
        let mut g1 = 0.0;
        let mut g2 = 0.0;
        let mut g3 = 0.0;
        for &(th, wt) in self.theta_nodes(b1, b2)?.iter() {
            let sn = th.sin();
            let lam = b2 + (b1 - b2) * 0.5 * (1.0 + sn);
            let d = lam - b3;
            let y0 = p.h_l(lam)?;
            let len = s.zeta3 - y0;
            let mut sj = 0.0;
            let mut sl = 0.0;
            for &(r, wr) in &self.radial {
                let a = (lam - p.f(y0 + len * r * r)).max(0.0);
                if a > 0.0 {
                    let ra = a.sqrt();
                    sj += wr * r * ra;
                    sl += wr * r / ra;
                }
            }
            let j = 2.0 * len * sj;
            let j_lam = len * sl;
            let sd = d.sqrt();
            let fprime = j_lam / sd - j / (2.0 * d * sd);
            q_int += wt * j / sd;
            g1 += wt * fprime * 0.5 * (1.0 + sn);
            g2 += wt * fprime * 0.5 * (1.0 - sn);
            g3 += wt * j / (d * sd);
        }
        Ok(EpdValue {
            q: s.zeta3 - q_int / PI,
            grad: [-g1 / PI, -g2 / PI, -g3 / (2.0 * PI)],
        })
    }
}

/// `wᵢ = ½(λᵢ - 2Σβ) ∂q/∂βᵢ + q`.
pub fn tsarev_from(lambda: &[f64; 3], sum: f64, v: &EpdValue) -> [f64; 3] {
    let mut w = [0.0; 3];
    for i in 0..3 {
        w[i] = 0.5 * (lambda[i] - 2.0 * sum) * v.grad[i] + v.q;
    }
    w
}

/// `q` with `β₃` on the decreasing branch of `f`.
pub fn epd_q(triple: &RiemannTriple, profile: &InitialProfile) -> Result<f64> {
    let s = ModulationState::from_triple(triple, Branch::Left, profile)?;
    Ok(EpdPotential::new(profile).eval(&s)?.q)
}

/// Gradient of [`epd_q`].
pub fn epd_gradient(triple: &RiemannTriple, profile: &InitialProfile) -> Result<[f64; 3]> {
    let s = ModulationState::from_triple(triple, Branch::Left, profile)?;
    Ok(EpdPotential::new(profile).eval(&s)?.grad)
}

/// Tsarev velocities `(w₁, w₂, w₃)` with `β₃` on the decreasing branch.
pub fn tsarev_w(triple: &RiemannTriple, profile: &InitialProfile) -> Result<[f64; 3]> {
    let s = ModulationState::from_triple(triple, Branch::Left, profile)?;
    tsarev_w_state(&s, &EpdPotential::new(profile))
}

/// Tsarev velocities at an arbitrary state.
pub fn tsarev_w_state(s: &ModulationState, epd: &EpdPotential) -> Result<[f64; 3]> {
    let triple = s.triple(epd.profile())?;
    let v = epd.eval(s)?;
    Ok(tsarev_from(&speeds(&triple).lambda, triple.sum(), &v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_boundary_value() {
        let p = InitialProfile::sech2();
        let t = RiemannTriple::new(-0.5, -0.5, -0.5).unwrap();
        assert!((epd_q(&t, &p).unwrap() - p.h_l(-0.5).unwrap()).abs() < 1e-14);
        for i in 1..20 {
            let b = -(i as f64) / 20.0;
            let t = RiemannTriple::new(b, b, b).unwrap();
            assert!((epd_q(&t, &p).unwrap() - p.h_l(b).unwrap()).abs() < 1e-8, "b={b}");
        }
    }

    #[test]
    fn forms_agree_on_decreasing_branch() {
        let p = InitialProfile::sech2();
        let epd = EpdPotential::new(&p);
        let t = RiemannTriple::new(-0.2, -0.5, -0.8).unwrap();
        let s = ModulationState::from_triple(&t, Branch::Left, &p).unwrap();
        let a = epd.eval_u_form(&s, -0.2, -0.5, -0.8).unwrap();
        let b = epd.eval_y_form(&s, -0.2, -0.5, -0.8).unwrap();
        assert!((a.q - b.q).abs() < 1e-10, "{} {}", a.q, b.q);
        for i in 0..3 {
            assert!((a.grad[i] - b.grad[i]).abs() < 1e-8, "{i}: {:?} {:?}", a.grad, b.grad);
        }
    }

    #[test]
    fn right_branch_needs_h_r() {
        let t = RiemannTriple::new(0.8, 0.5, 0.2).unwrap();
        let p = InitialProfile::SmoothStep { c: 1.0, width: 1.0 };
        assert!(matches!(
            ModulationState::from_triple(&t, Branch::Right, &p),
            Err(Error::Configuration(_))
        ));
        let t = RiemannTriple::new(-0.2, -0.5, -0.8).unwrap();
        let p = InitialProfile::sech2();
        let s = ModulationState::from_triple(&t, Branch::Right, &p).unwrap();
        assert_eq!(s.branch(&p), Branch::Right);
        assert!(EpdPotential::new(&p).eval(&s).is_ok());
    }
}
