//! Dry-run checks: resolved config, warnings and a cost estimate, without
//! running the scenario.

use serde_json::{json, Value};
use whitham_core::hopf::breaking_point;
use whitham_core::kdv::{Periodization, SpectralGrid};
use whitham_core::InitialProfile;

use crate::config::*;
use crate::scenarios::max_abs;
use crate::CliError;

/// A direct run as the scenario will set it up.
struct DirectRun {
    grid: SpectralGrid,
    profile: InitialProfile,
    periodization: Periodization,
    t_end: f64,
    snapshots: usize,
}

fn direct_run(cfg: &ScenarioConfig) -> Result<Option<DirectRun>, CliError> {
    let last = |ts: &[f64]| ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let run = match cfg {
        ScenarioConfig::GpStep(c) if c.direct => DirectRun {
            grid: c.grid.spectral(c.epsilon)?,
            profile: c.profile(),
            periodization: Periodization::default(),
            t_end: c.t,
            snapshots: 1,
        },
        ScenarioConfig::Edge(c) if c.direct => DirectRun {
            grid: c.grid.spectral(c.epsilon)?,
            profile: c.profile.clone(),
            periodization: Periodization::default(),
            t_end: c.t,
            snapshots: 1,
        },
        ScenarioConfig::Kdv(c) => DirectRun {
            grid: c.grid.spectral(c.epsilon)?,
            profile: c.profile.clone(),
            periodization: c.periodization,
            t_end: c.t_end,
            snapshots: c.snapshots.len() + 1,
        },
        ScenarioConfig::Compare(c) => DirectRun {
            grid: c.grid.spectral(c.epsilon)?,
            profile: c.profile.clone(),
            periodization: Periodization::default(),
            t_end: last(&c.times),
            snapshots: c.times.len(),
        },
        _ => return Ok(None),
    };
    Ok(Some(run))
}

/// Times that need a formed shock must come after breaking.
fn check_after_breaking(cfg: &ScenarioConfig) -> Result<(), CliError> {
    let (profile, times): (&InitialProfile, Vec<f64>) = match cfg {
        ScenarioConfig::Dsw(c) => (&c.profile, c.times.clone()),
        ScenarioConfig::Edge(c) => (&c.profile, vec![c.t]),
        ScenarioConfig::Compare(c) => (&c.profile, c.times.clone()),
        ScenarioConfig::Edges(c) => (&c.profile, vec![]),
        _ => return Ok(()),
    };
    let tc = breaking_point(profile)?.t_c;
    for t in times {
        if t <= tc {
            return Err(CliError::Config(format!(
                "times: t = {t} is before the breaking time t_c = {tc}"
            )));
        }
    }
    Ok(())
}

/// Warnings for a direct run. Dispersive shocks reach twice the initial
/// amplitude, so the resolution heuristic is applied to `2 max|u₀|`.
fn direct_warnings(run: &DirectRun) -> Vec<String> {
    let mut w = Vec::new();
    let g = &run.grid;
    let amp = max_abs(&run.profile);
    let ratio = (g.lx / g.n as f64) / g.required_spacing(2.0 * amp);
    if ratio > 1.0 {
        w.push(format!(
            "resolution: Lx/N = {:.3e} is {ratio:.2}x the spacing needed for oscillations of amplitude {:.3}; \
             consider N = {}",
            g.lx / g.n as f64,
            2.0 * amp,
            ((g.n as f64 * ratio).ceil() as usize).next_power_of_two()
        ));
    }
    let dt_max = g.stable_dt(2.0 * amp);
    if g.dt > dt_max {
        w.push(format!(
            "resolution: dt = {:.3e} exceeds {dt_max:.3e}, the stability bound for amplitude {:.3}",
            g.dt,
            2.0 * amp
        ));
    }
    let jump = run.profile.f(-g.lx) - run.profile.f(g.lx);
    if jump.abs() > 0.0 {
        let ramp = run.periodization.width * g.lx;
        if ramp < 5.0 * g.epsilon {
            w.push(format!(
                "resolution: epsilon = {} is too large for the domain; the periodization ramp of width {ramp:.3} \
                 radiates linear waves (use Lx >= {:.1})",
                g.epsilon,
                5.0 * g.epsilon / run.periodization.width
            ));
        }
        let (lo, _) = run.periodization.influence(g, 2.0 * amp, run.t_end);
        let front = 4.0 * amp * run.t_end;
        if lo < front {
            w.push(format!(
                "domain: the periodization ramp influences x >= {lo:.3}, overlapping the wave front near {front:.3}"
            ));
        }
    }
    w
}

/// Warnings without running anything; errors for configs the run would
/// reject.
pub fn warnings(cfg: &ScenarioConfig) -> Result<Vec<String>, CliError> {
    check_after_breaking(cfg)?;
    let Some(run) = direct_run(cfg)? else {
        return Ok(Vec::new());
    };
    run.grid.check(max_abs(&run.profile).max(f64::MIN_POSITIVE))?;
    Ok(direct_warnings(&run))
}

/// Report printed by `whitham validate`.
pub fn report(cfg: &ScenarioConfig) -> Result<Value, CliError> {
    let warnings = warnings(cfg)?;
    let estimate = direct_run(cfg)?.map(|run| {
        let g = run.grid;
        let steps = (run.t_end / g.dt).ceil();
        json!({
            "steps": steps,
            "fft_work": steps * 20.0 * g.n as f64 * (g.n as f64).log2(),
            "memory_bytes": (run.snapshots + 8) * g.n * 16,
        })
    });
    Ok(json!({
        "scenario": cfg.name().as_str(),
        "config": cfg.resolved(),
        "config_sha256": cfg.hash(),
        "warnings": warnings,
        "estimate": estimate,
    }))
}
