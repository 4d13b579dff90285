//! Solved modulation field and the small-dispersion asymptotic profile.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::epd::ModulationState;
use super::solve::{solve_with, HodographSystem, ZoneTrace};
use crate::error::{Error, Result};
use crate::hopf::{hopf_solve, InitialProfile};
use crate::wave::{theta_u, RiemannTriple, WavePhase};

/// Modulation state anywhere inside the zone at one fixed time.
#[derive(Debug, Clone)]
pub struct ZoneSolver<'a> {
    sys: HodographSystem<'a>,
    trace: ZoneTrace,
}

impl<'a> ZoneSolver<'a> {
    pub fn new(profile: &'a InitialProfile, t: f64) -> Result<Self> {
        let sys = HodographSystem::new(profile);
        let trace = ZoneTrace::compute(&sys, t)?;
        Ok(Self { sys, trace })
    }

    pub fn system(&self) -> &HodographSystem<'a> {
        &self.sys
    }

    pub fn trace(&self) -> &ZoneTrace {
        &self.trace
    }

    pub fn t(&self) -> f64 {
        self.trace.t
    }

    pub fn x_minus(&self) -> f64 {
        self.trace.x_minus()
    }

    pub fn x_plus(&self) -> f64 {
        self.trace.x_plus()
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.x_minus() && x < self.x_plus()
    }

    /// Solution of the hodograph equations at `x`.
    ///
    /// Between an edge and the nearest trace point (`m < 10⁻⁶` or
    /// `1-m < 10⁻⁸`) the trace is interpolated instead of solved.
    pub fn state(&self, x: f64) -> Result<ModulationState> {
        let t = self.t();
        if !self.contains(x) {
            return Err(Error::OutsideZone { x, t });
        }
        let pts = &self.trace.points;
        let profile = self.sys.profile();
        if x <= pts[0].x {
            let e = &self.trace.edge;
            let r = (x - e.x_minus) / (pts[0].x - e.x_minus);
            let p = &pts[0];
            let z_edge = profile.h_l(e.xi)?;
            return Ok(ModulationState::from_modulus(
                e.v + r * (p.state.beta1 - e.v),
                r * p.m,
                z_edge + r * (p.state.zeta3 - z_edge),
                profile,
            ));
        }
        if x >= pts[pts.len() - 1].x {
            return Ok(pts[pts.len() - 1].state);
        }
        solve_with(&self.sys, x, t, &self.trace.seed(x, profile))
    }

    pub fn triple(&self, x: f64) -> Result<RiemannTriple> {
        self.state(x)?.triple(self.sys.profile())
    }
}

/// One time slice of a [`HodographField`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldSlice {
    pub t: f64,
    pub x_minus: f64,
    pub x_plus: f64,
    pub x: Vec<f64>,
    pub states: Vec<ModulationState>,
    pub triples: Vec<RiemannTriple>,
    /// Largest `max |λᵢt + wᵢ - x|` over the slice.
    pub max_residual: f64,
    /// Number of continuation points in the zone trace.
    pub trace_points: usize,
}

/// `β(x, t)` sampled on a uniform interior grid of each zone, plus the edges.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HodographField {
    pub slices: Vec<FieldSlice>,
}

impl HodographField {
    /// `nx` points strictly inside `(x₋(t), x₊(t))` for every `t` in `times`.
    pub fn compute(profile: &InitialProfile, times: &[f64], nx: usize) -> Result<Self> {
        Self::compute_with(profile, times, |lo, hi| {
            (1..=nx).map(|i| lo + (hi - lo) * i as f64 / (nx + 1) as f64).collect()
        })
    }

    /// As [`compute`](Self::compute) with the grid of each slice given by
    /// `grid(x₋, x₊)`; points outside the zone are dropped.
    pub fn compute_with<G>(profile: &InitialProfile, times: &[f64], grid: G) -> Result<Self>
    where
        G: Fn(f64, f64) -> Vec<f64> + Sync,
    {
        let slices = times
            .par_iter()
            .map(|&t| {
                let zone = ZoneSolver::new(profile, t)?;
                let xs: Vec<f64> = grid(zone.x_minus(), zone.x_plus())
                    .into_iter()
                    .filter(|&x| zone.contains(x))
                    .collect();
                let states = xs
                    .par_iter()
                    .map(|&x| zone.state(x))
                    .collect::<Result<Vec<_>>>()?;
                let triples = states
                    .iter()
                    .map(|s| s.triple(profile))
                    .collect::<Result<Vec<_>>>()?;
                let mut max_residual: f64 = 0.0;
                for (s, &x) in states.iter().zip(&xs) {
                    max_residual = max_residual.max(zone.system().residual(s, x, t)?);
                }
                Ok(FieldSlice {
                    t,
                    x_minus: zone.x_minus(),
                    x_plus: zone.x_plus(),
                    x: xs,
                    states,
                    triples,
                    max_residual,
                    trace_points: zone.trace().points.len(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { slices })
    }

    /// `(t, x₋(t), x₊(t))` for every slice.
    pub fn edge_curves(&self) -> Vec<(f64, f64, f64)> {
        self.slices.iter().map(|s| (s.t, s.x_minus, s.x_plus)).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.slices.iter().fold(0.0, |a, s| a.max(s.max_residual))
    }
}

/// Leading-order small-`ε` profile at one time: the modulated theta-function
/// wave with `φ₀ = -k q` inside the zone, the Hopf solution outside.
#[derive(Debug, Clone)]
pub struct DswEvaluator<'a> {
    zone: ZoneSolver<'a>,
    epsilon: f64,
}

impl<'a> DswEvaluator<'a> {
    pub fn new(profile: &'a InitialProfile, t: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::Parameter(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Self {
            zone: ZoneSolver::new(profile, t)?,
            epsilon,
        })
    }

    pub fn zone(&self) -> &ZoneSolver<'a> {
        &self.zone
    }

    /// `(triple, φ₀)` at `x` inside the zone.
    pub fn modulation(&self, x: f64) -> Result<(RiemannTriple, f64)> {
        let s = self.zone.state(x)?;
        let triple = s.triple(self.zone.system().profile())?;
        let q = self.zone.system().potential().eval(&s)?.q;
        Ok((triple, -triple.k() * q))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let t = self.zone.t();
        if self.zone.contains(x) {
            let (triple, phi0) = self.modulation(x)?;
            return theta_u(x, t, &triple, &WavePhase::new(phi0, self.epsilon)?);
        }
        let branches = hopf_solve(x, t, self.zone.system().profile())?;
        let v = if x <= self.zone.x_minus() {
            branches.first()
        } else {
            branches.last()
        };
        v.copied()
            .ok_or_else(|| Error::Numerical(format!("no characteristic through x={x}, t={t}")))
    }

    pub fn eval_many(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.par_iter().map(|&x| self.eval(x)).collect()
    }
}

/// One-off evaluation of the asymptotic profile; traces the zone on every
/// call, so use [`DswEvaluator`] for many points.
pub fn dsw_solution(x: f64, t: f64, profile: &InitialProfile, epsilon: f64) -> Result<f64> {
    DswEvaluator::new(profile, t, epsilon)?.eval(x)
}
