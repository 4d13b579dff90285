//! Hodograph equations `x = λᵢ t + wᵢ` and their solution by damped Newton.
//!
//! Unknowns are `(β₁, m, ζ₃)`. Near the trailing edge the equations
//! `E₂ = E₃` degenerate, so `E₃` is replaced by the difference quotient
//! `G₂₃ = t + (w₂-w₃)/(λ₂-λ₃)`; near the leading edge `E₁` is replaced by
//! `G₁₂ = t + (w₁-w₂)/(λ₁-λ₂)` in the same way.

use serde::{Deserialize, Serialize};

use super::edges::{trailing_edge, EdgeLayerData};
use super::epd::{tsarev_from, EpdPotential, ModulationState};
use crate::error::{Error, Result};
use crate::hopf::{breaking_point, InitialProfile};
use crate::solve::{newton, NewtonOptions};
use crate::whitham::speeds;

/// Largest `1-m` reached when tracing towards the leading edge.
pub const LEADING_EDGE_GAP: f64 = 1e-8;
/// `m` at which the trace leaves the trailing edge.
pub const TRAILING_EDGE_M: f64 = 1e-6;
/// Bound on `max |λᵢt + wᵢ - x|` for an accepted solution.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Stall level of the Newton iteration. The difference-quotient rows carry
/// the rounding error of `wᵢ` divided by `λᵢ-λⱼ`, so they stall well above
/// the physical residual; [`RESIDUAL_TOL`] is checked afterwards.
const STALL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EqSet {
    /// `[E₁, E₂, G₂₃]`, used for `m ≤ ½`.
    Trailing,
    /// `[E₃, E₂, G₁₂]`, used for `m > ½`.
    Leading,
}

impl EqSet {
    fn for_m(m: f64) -> Self {
        if m <= 0.5 {
            EqSet::Trailing
        } else {
            EqSet::Leading
        }
    }
}

/// Evaluator of the hodograph equations for one profile.
#[derive(Debug, Clone)]
pub struct HodographSystem<'a> {
    epd: EpdPotential<'a>,
}

/// `λᵢ t + wᵢ` for the three families.
#[derive(Debug, Clone, Copy)]
pub struct HodographValues {
    pub lambda: [f64; 3],
    pub w: [f64; 3],
    pub q: f64,
}

impl<'a> HodographSystem<'a> {
    pub fn new(profile: &'a InitialProfile) -> Self {
        Self {
            epd: EpdPotential::new(profile),
        }
    }

    pub fn with_potential(epd: EpdPotential<'a>) -> Self {
        Self { epd }
    }

    pub fn profile(&self) -> &InitialProfile {
        self.epd.profile()
    }

    pub fn potential(&self) -> &EpdPotential<'a> {
        &self.epd
    }

    pub fn values(&self, s: &ModulationState) -> Result<HodographValues> {
        let triple = s.triple(self.profile())?;
        let v = self.epd.eval(s)?;
        let lambda = speeds(&triple).lambda;
        Ok(HodographValues {
            lambda,
            w: tsarev_from(&lambda, triple.sum(), &v),
            q: v.q,
        })
    }

    /// `max |λᵢ t + wᵢ - x|`.
    pub fn residual(&self, s: &ModulationState, x: f64, t: f64) -> Result<f64> {
        let h = self.values(s)?;
        Ok((0..3).fold(0.0, |a, i| a.max((h.lambda[i] * t + h.w[i] - x).abs())))
    }

    fn equations(&self, beta1: f64, m: f64, zeta3: f64, x: f64, t: f64, set: EqSet) -> Result<Vec<f64>> {
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::Domain(format!("m={m} outside (0, 1)")));
        }
        let s = ModulationState::from_modulus(beta1, m, zeta3, self.profile());
        let h = self.values(&s)?;
        let e = |i: usize| h.lambda[i] * t + h.w[i] - x;
        Ok(match set {
            EqSet::Trailing => vec![
                e(0),
                e(1),
                t + (h.w[1] - h.w[2]) / (h.lambda[1] - h.lambda[2]),
            ],
            EqSet::Leading => vec![
                e(2),
                e(1),
                t + (h.w[0] - h.w[1]) / (h.lambda[0] - h.lambda[1]),
            ],
        })
    }
}

fn m_step(m: f64) -> f64 {
    1e-7f64.min(1e-3 * m).min(1e-3 * (1.0 - m))
}

/// `(β₁, m, ζ₃)` of a state.
fn unpack(s: &ModulationState, profile: &InitialProfile) -> (f64, f64, f64) {
    let b3 = s.beta3(profile);
    let d = s.beta1 - b3;
    let m = if d > 0.0 { (s.beta2 - b3) / d } else { 0.0 };
    (s.beta1, m, s.zeta3)
}

/// Parameter `m = (β₂-β₃)/(β₁-β₃)` of a state.
pub fn state_modulus(s: &ModulationState, profile: &InitialProfile) -> f64 {
    unpack(s, profile).1
}

/// Solve `x = λᵢ t + wᵢ` from `seed`.
pub fn solve_with(sys: &HodographSystem, x: f64, t: f64, seed: &ModulationState) -> Result<ModulationState> {
    let profile = sys.profile();
    let (b1, m0, z3) = unpack(seed, profile);
    let m0 = m0.clamp(1e-12, 1.0 - 1e-12);
    let set = EqSet::for_m(m0);
    let opts = NewtonOptions {
        tol: 1e-11,
        max_iter: 40,
        fd_steps: vec![1e-7, m_step(m0), 1e-7],
        min_damping: 1e-6,
        stall_tol: STALL_TOL,
    };
    let f = |u: &[f64]| sys.equations(u[0], u[1], u[2], x, t, set);
    match newton(f, &[b1, m0, z3], &opts) {
        Ok(r) => {
            let s = ModulationState::from_modulus(r.x[0], r.x[1], r.x[2], profile);
            let residual = sys.residual(&s, x, t)?;
            if residual > RESIDUAL_TOL {
                return Err(Error::ContinuationNeeded { x, t, residual });
            }
            Ok(s)
        }
        Err(_) => {
            let residual = sys
                .residual(&ModulationState::from_modulus(b1, m0, z3, profile), x, t)
                .unwrap_or(f64::NAN);
            Err(Error::ContinuationNeeded { x, t, residual })
        }
    }
}

/// [`solve_with`] using a fresh [`HodographSystem`].
pub fn solve_whitham(x: f64, t: f64, profile: &InitialProfile, seed: &ModulationState) -> Result<ModulationState> {
    solve_with(&HodographSystem::new(profile), x, t, seed)
}

/// One point of the zone trace: the solution with prescribed `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub m: f64,
    pub x: f64,
    pub state: ModulationState,
}

/// Solutions across the oscillation zone at fixed `t`, parameterised by `m`
/// from the trailing edge (`m → 0`) to the leading edge (`m → 1`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZoneTrace {
    pub t: f64,
    pub edge: EdgeLayerData,
    pub points: Vec<TracePoint>,
}

fn logit(m: f64) -> f64 {
    (m / (1.0 - m)).ln()
}

fn inv_logit(p: f64) -> f64 {
    if p > 0.0 {
        1.0 / (1.0 + (-p).exp())
    } else {
        let e = p.exp();
        e / (1.0 + e)
    }
}

fn solve_at_m(sys: &HodographSystem, m: f64, t: f64, guess: [f64; 3]) -> Result<TracePoint> {
    let set = EqSet::for_m(m);
    let opts = NewtonOptions {
        tol: 1e-11,
        max_iter: 30,
        fd_steps: vec![1e-7, 1e-7, 1e-7],
        min_damping: 1e-4,
        stall_tol: STALL_TOL,
    };
    let f = |u: &[f64]| sys.equations(u[0], m, u[1], u[2], t, set);
    let r = newton(f, &guess, &opts)?;
    let state = ModulationState::from_modulus(r.x[0], m, r.x[1], sys.profile());
    let residual = sys.residual(&state, r.x[2], t)?;
    if residual > RESIDUAL_TOL {
        return Err(Error::Numerical(format!(
            "hodograph residual {residual:.3e} at m={m}, t={t}"
        )));
    }
    Ok(TracePoint { m, x: r.x[2], state })
}

impl ZoneTrace {
    /// Trace the zone at time `t` with the default step in `logit m`.
    pub fn compute(sys: &HodographSystem, t: f64) -> Result<Self> {
        Self::compute_with_step(sys, t, 0.2)
    }

    pub fn compute_with_step(sys: &HodographSystem, t: f64, dp: f64) -> Result<Self> {
        let profile = sys.profile();
        let edge = trailing_edge(t, profile)?;
        let p_end = logit(1.0 - LEADING_EDGE_GAP);
        let mut p = logit(TRAILING_EDGE_M);
        let z_edge = profile.h_l(edge.xi)?;
        let first = solve_at_m(sys, inv_logit(p), t, [edge.v, z_edge, edge.x_minus])?;
        let mut points = vec![first];
        let mut params = vec![p];
        let mut step = dp;
        while p < p_end {
            let target = (p + step).min(p_end);
            let n = points.len();
            let last = &points[n - 1];
            let mut guess = [last.state.beta1, last.state.zeta3, last.x];
            if n >= 2 {
                let prev = &points[n - 2];
                let r = (target - params[n - 1]) / (params[n - 1] - params[n - 2]);
                guess[0] += r * (last.state.beta1 - prev.state.beta1);
                guess[1] += r * (last.state.zeta3 - prev.state.zeta3);
                guess[2] += r * (last.x - prev.x);
            }
            match solve_at_m(sys, inv_logit(target), t, guess) {
                Ok(pt) => {
                    points.push(pt);
                    params.push(target);
                    p = target;
                    step = (step * 1.5).min(dp);
                }
                Err(e) => {
                    step *= 0.5;
                    if step < 1e-4 {
                        return Err(Error::Numerical(format!(
                            "zone trace failed at t={t}, m={}: {e}",
                            inv_logit(target)
                        )));
                    }
                }
            }
        }
        Ok(Self { t, edge, points })
    }

    pub fn x_minus(&self) -> f64 {
        self.edge.x_minus
    }

    pub fn x_plus(&self) -> f64 {
        self.points.last().map_or(self.edge.x_minus, |p| p.x)
    }

    /// Whether `x(m)` is nondecreasing along the trace, up to the accuracy
    /// [`RESIDUAL_TOL`] of each point (`x` is nearly flat at both edges).
    pub fn is_monotone(&self) -> bool {
        let tol = RESIDUAL_TOL;
        self.edge.x_minus <= self.points[0].x + tol
            && self.points.windows(2).all(|w| w[1].x >= w[0].x - tol)
    }

    /// Newton seed at `x` by linear interpolation of `(β₁, m, ζ₃)` in `x`.
    pub fn seed(&self, x: f64, profile: &InitialProfile) -> ModulationState {
        let pts = &self.points;
        let i = pts.partition_point(|p| p.x < x);
        if i == 0 {
            return pts[0].state;
        }
        if i >= pts.len() {
            return pts[pts.len() - 1].state;
        }
        let (a, b) = (&pts[i - 1], &pts[i]);
        let r = (x - a.x) / (b.x - a.x);
        let lerp = |u: f64, v: f64| u + r * (v - u);
        ModulationState::from_modulus(
            lerp(a.state.beta1, b.state.beta1),
            lerp(a.m, b.m),
            lerp(a.state.zeta3, b.state.zeta3),
            profile,
        )
    }
}

/// `(x₋(t), x₊(t))`.
pub fn whitham_zone(t: f64, profile: &InitialProfile) -> Result<(f64, f64)> {
    let trace = ZoneTrace::compute(&HodographSystem::new(profile), t)?;
    Ok((trace.x_minus(), trace.x_plus()))
}

/// Leading terms of `(x₋(t), x₊(t))` just after breaking:
/// `x_c + 6u_c τ ∓ C (-h_L'''(u_c))^{-1/2} τ^{3/2}` with `τ = t - t_c`,
/// `C = 36√2` for `x₋` and `C = 4√10/3` for `x₊`.
pub fn edges_near_breaking(t: f64, profile: &InitialProfile) -> Result<(f64, f64)> {
    let bp = breaking_point(profile)?;
    let tau = t - bp.t_c;
    if !(tau >= 0.0) {
        return Err(Error::Domain(format!("t={t} precedes the breaking time {}", bp.t_c)));
    }
    let h3 = profile.h_l_3rd(bp.u_c)?;
    if !(h3 < 0.0) {
        return Err(Error::Degeneracy(format!("h_L'''(u_c) = {h3} is not negative")));
    }
    let base = bp.x_c + 6.0 * bp.u_c * tau;
    let scale = tau.powf(1.5) / (-h3).sqrt();
    Ok((base - 36.0 * 2f64.sqrt() * scale, base + 4.0 * 10f64.sqrt() / 3.0 * scale))
}
