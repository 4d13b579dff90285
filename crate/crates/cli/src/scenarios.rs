//! Scenario runners. Each turns a resolved config into tables and a JSON
//! summary; nothing here touches the filesystem.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::{json, Value};
use whitham_core::gpstep::{gp_beta2, gp_edges, gp_solution, StepProblem};
use whitham_core::hodograph::{edges_near_breaking, trailing_edge, whitham_zone, DswEvaluator};
use whitham_core::hopf::{breaking_point, hopf_solve};
use whitham_core::kdv::{compare, envelope_report, evolve, GridSolution, Periodization};
use whitham_core::painleve::{edge_expansion, layer_variable, HastingsMcLeod};
use whitham_core::wave::{cnoidal_u, edge_values, theta_u, RiemannTriple, WavePhase};
use whitham_core::{InitialProfile, Result};

use crate::config::*;
use crate::output::{time_tag, RunOutput, Table};
use crate::CliError;

pub fn run(cfg: &ScenarioConfig) -> std::result::Result<RunOutput, CliError> {
    let out = match cfg {
        ScenarioConfig::Cnoidal(c) => cnoidal(c)?,
        ScenarioConfig::GpStep(c) => gp_step(c)?,
        ScenarioConfig::Dsw(c) => dsw(c)?,
        ScenarioConfig::Edge(c) => edge(c)?,
        ScenarioConfig::Kdv(c) => kdv(c)?,
        ScenarioConfig::Compare(c) => compare_run(c)?,
        ScenarioConfig::Edges(c) => edges(c)?,
    };
    Ok(out)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn sup(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn drift_json(sol: &GridSolution) -> Value {
    let (mass, energy) = sol.max_drift();
    json!({ "mass": mass, "energy": energy })
}

fn cnoidal(c: &CnoidalConfig) -> Result<RunOutput> {
    let tr = RiemannTriple::new(c.beta[0], c.beta[1], c.beta[2])?;
    let phase = WavePhase::new(c.phi0, c.epsilon)?;
    let k = tr.k();
    let wavelength = if k > 0.0 { 2.0 * PI * c.epsilon / k } else { f64::INFINITY };
    let span = if wavelength.is_finite() {
        c.periods * wavelength
    } else {
        20.0 * c.epsilon / tr.width().max(1e-300).sqrt()
    };
    let centre = tr.phase_speed() * c.t;
    let xs = linspace(centre - 0.5 * span, centre + 0.5 * span, c.points);
    let rows = xs
        .par_iter()
        .map(|&x| Ok((x, cnoidal_u(x, c.t, &tr, &phase)?, theta_u(x, c.t, &tr, &phase)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new("cnoidal.csv", &["x", "u_cnoidal", "u_theta"]);
    for &(x, a, b) in &rows {
        table.push(vec![Some(x), Some(a), Some(b)]);
    }
    let (e1, e2, e3) = edge_values(&tr);
    let summary = json!({
        "m": tr.m(),
        "k": k,
        "omega": tr.omega(),
        "phase_speed": tr.phase_speed(),
        "wavelength": wavelength.is_finite().then_some(wavelength),
        "crest": e1,
        "trough": e2,
        "e3": e3,
        "max_form_difference": sup(rows.iter().map(|r| (r.1 - r.2).abs())),
    });
    Ok(RunOutput {
        tables: vec![table],
        summary,
    })
}

fn gp_step(c: &GpStepConfig) -> Result<RunOutput> {
    let prob = StepProblem::new(c.c, c.phase, c.epsilon)?;
    let (zl, zr) = gp_edges(c.c)?;
    let (zl, zr) = (zl * c.t, zr * c.t);
    let pad = 0.25 * (zr - zl);
    let (lo, hi) = (zl - pad, zr + pad);
    let envelopes = |x: f64| -> Result<(f64, f64)> {
        let b2 = gp_beta2((x / c.t).clamp(-6.0 * c.c, 4.0 * c.c), c.c)?;
        let (e1, e2, _) = edge_values(&RiemannTriple::new(c.c, b2, 0.0)?);
        Ok((e2, e1))
    };
    let mut summary = json!({ "x_minus": zl, "x_plus": zr });

    let (xs, direct) = if c.direct {
        let g = c.grid.spectral(c.epsilon)?;
        let per = Periodization::default();
        let sol = evolve(&c.profile(), &g, c.t, &[], &per)?;
        let u = sol.snapshot_at(c.t)?.to_vec();
        let buffer = 0.1 * (zr - zl);
        let env = envelope_report(&sol, c.t, envelopes, (zl + buffer, zr - buffer))?;
        let (ramp, _) = per.influence(&g, c.c, c.t);
        let peak = (1..u.len() - 1)
            .rev()
            .find(|&i| sol.x[i] > zl && sol.x[i] < hi && u[i] > u[i - 1] && u[i] >= u[i + 1] && u[i] > 0.2 * c.c)
            .map(|i| u[i]);
        summary["direct"] = json!({
            "leading_peak": peak,
            "envelopes": env,
            "left_plateau": compare(&sol, c.t, |_| Ok(c.c), (-g.lx, zl - buffer))?,
            "right_plateau": compare(&sol, c.t, |_| Ok(0.0), (zr + buffer, ramp))?,
            "drift": drift_json(&sol),
        });
        let keep: Vec<usize> = (0..u.len()).filter(|&i| sol.x[i] >= lo && sol.x[i] <= hi).collect();
        (
            keep.iter().map(|&i| sol.x[i]).collect::<Vec<_>>(),
            Some(keep.iter().map(|&i| u[i]).collect::<Vec<_>>()),
        )
    } else {
        (linspace(lo, hi, 2000), None)
    };

    let gp = xs
        .par_iter()
        .map(|&x| {
            let env = if x > zl && x < zr { Some(envelopes(x)?) } else { None };
            Ok((gp_solution(x, c.t, &prob)?, env))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new("gp_step.csv", &["x", "u_direct", "u_gp", "envelope_lower", "envelope_upper"]);
    for (i, (&x, (ugp, env))) in xs.iter().zip(&gp).enumerate() {
        table.push(vec![
            Some(x),
            direct.as_ref().map(|d| d[i]),
            Some(*ugp),
            env.map(|e| e.0),
            env.map(|e| e.1),
        ]);
    }
    Ok(RunOutput {
        tables: vec![table],
        summary,
    })
}

struct DswRow {
    triple: Option<RiemannTriple>,
    u: f64,
    /// Hopf solution where it is single-valued.
    hopf: Option<f64>,
}

/// Modulation, asymptotic profile and Hopf solution at one time on `xs`.
fn dsw_rows(ev: &DswEvaluator, profile: &InitialProfile, xs: &[f64]) -> Result<Vec<DswRow>> {
    let zone = ev.zone();
    xs.par_iter()
        .map(|&x| {
            let triple = if zone.contains(x) { Some(ev.modulation(x)?.0) } else { None };
            let roots = hopf_solve(x, zone.t(), profile)?;
            Ok(DswRow {
                triple,
                u: ev.eval(x)?,
                hopf: (roots.len() == 1).then(|| roots[0]),
            })
        })
        .collect()
}

fn dsw(c: &DswConfig) -> Result<RunOutput> {
    let mut tables = Vec::new();
    let mut edges = Table::new("edges.csv", &["t", "x_minus", "x_plus"]);
    let mut times = Vec::new();
    for &t in &c.times {
        let ev = DswEvaluator::new(&c.profile, t, c.epsilon)?;
        let (xm, xp) = (ev.zone().x_minus(), ev.zone().x_plus());
        let xs = linspace(xm - c.margin, xp + c.margin, c.points);
        let rows = dsw_rows(&ev, &c.profile, &xs)?;
        let mut table = Table::new(
            format!("dsw_{}.csv", time_tag(t)),
            &["x", "beta1", "beta2", "beta3", "u_asymptotic", "u_hopf"],
        );
        for (&x, r) in xs.iter().zip(&rows) {
            let tr = r.triple;
            table.push(vec![
                Some(x),
                tr.map(|b| b.beta1),
                tr.map(|b| b.beta2),
                tr.map(|b| b.beta3),
                Some(r.u),
                r.hopf,
            ]);
        }
        tables.push(table);
        edges.push(vec![Some(t), Some(xm), Some(xp)]);
        times.push(json!({ "t": t, "x_minus": xm, "x_plus": xp }));
    }
    tables.push(edges);
    Ok(RunOutput {
        tables,
        summary: json!({ "t_c": breaking_point(&c.profile)?.t_c, "times": times }),
    })
}

fn edge(c: &EdgeConfig) -> Result<RunOutput> {
    let e = trailing_edge(c.t, &c.profile)?;
    let hm = HastingsMcLeod::new(c.hm.l, c.hm.n)?;
    let mut pii = Table::new("painleve.csv", &["s", "q", "dq"]);
    for s in linspace(-hm.l, hm.l, 801) {
        let (q, dq) = hm.eval_with_derivative(s);
        pii.push(vec![Some(s), Some(q), Some(dq)]);
    }
    let scale = e.c_e.cbrt() * (e.v - e.xi).sqrt() * c.epsilon.powf(2.0 / 3.0);
    let (lo, hi) = (e.x_minus - c.window * scale, e.x_minus + c.window * scale);
    let mut summary = json!({
        "edge": e,
        "hm_residual": hm.residual,
        "hm_q0": hm.eval(0.0),
        "layer_scale": scale,
    });
    let (xs, direct) = if c.direct {
        let g = c.grid.spectral(c.epsilon)?;
        let sol = evolve(&c.profile, &g, c.t, &[], &Periodization::default())?;
        let u = sol.snapshot_at(c.t)?;
        let keep: Vec<usize> = (0..u.len()).filter(|&i| sol.x[i] >= lo && sol.x[i] <= hi).collect();
        summary["drift"] = drift_json(&sol);
        (
            keep.iter().map(|&i| sol.x[i]).collect::<Vec<_>>(),
            Some(keep.iter().map(|&i| u[i]).collect::<Vec<_>>()),
        )
    } else {
        (linspace(lo, hi, 401), None)
    };
    let ue = xs
        .iter()
        .map(|&x| edge_expansion(x, c.t, c.epsilon, &e, &hm))
        .collect::<Result<Vec<_>>>()?;
    let mut overlay = Table::new("edge_overlay.csv", &["x", "s", "u_edge", "u_direct"]);
    for (i, &x) in xs.iter().enumerate() {
        overlay.push(vec![
            Some(x),
            Some(layer_variable(x, c.epsilon, &e)),
            Some(ue[i]),
            direct.as_ref().map(|d| d[i]),
        ]);
    }
    if let Some(d) = &direct {
        // the layer is sharpest for s >= 0; inside the zone it loses phase
        let diff = |outside: bool| {
            let pts = xs.iter().zip(d).zip(&ue);
            sup(pts
                .filter(|((&x, _), _)| (x <= e.x_minus) == outside)
                .map(|((_, a), b)| (a - b).abs()))
        };
        summary["max_difference"] = json!({ "outside": diff(true), "inside": diff(false) });
    }
    Ok(RunOutput {
        tables: vec![pii, overlay],
        summary,
    })
}

fn kdv(c: &KdvConfig) -> Result<RunOutput> {
    let g = c.grid.spectral(c.epsilon)?;
    let u0 = c.periodization.sample(&c.profile, &g);
    let sol = evolve(&c.profile, &g, c.t_end, &c.snapshots, &c.periodization)?;
    let mut cols = vec!["x".to_string(), "u_t0".to_string()];
    cols.extend(sol.times.iter().map(|&t| format!("u_{}", time_tag(t))));
    let mut table = Table {
        name: "kdv.csv".into(),
        columns: cols,
        rows: Vec::new(),
    };
    for (i, &x) in sol.x.iter().enumerate() {
        let mut row = vec![Some(x), Some(u0[i])];
        row.extend(sol.snapshots.iter().map(|s| Some(s[i])));
        table.push(row);
    }
    let mut cons = Table::new("conservation.csv", &["t", "mass", "energy"]);
    for r in &sol.conservation {
        cons.push(vec![Some(r.t), Some(r.mass), Some(r.energy)]);
    }
    Ok(RunOutput {
        tables: vec![table, cons],
        summary: json!({
            "times": sol.times,
            "drift": drift_json(&sol),
            "conservation": sol.conservation,
        }),
    })
}

/// Sup and L² of a difference over `points` with spacing `dx`.
fn stats(points: &[(f64, f64)], dx: f64, region: (f64, f64)) -> Option<Value> {
    let inside: Vec<&(f64, f64)> = points.iter().filter(|p| p.0 >= region.0 && p.0 <= region.1).collect();
    if region.0 >= region.1 || inside.is_empty() {
        return None;
    }
    let (mut s, mut arg, mut sq) = (0.0f64, inside[0].0, 0.0);
    for &&(x, d) in &inside {
        if d.abs() > s {
            s = d.abs();
            arg = x;
        }
        sq += d * d * dx;
    }
    Some(json!({ "region": [region.0, region.1], "sup": s, "l2": sq.sqrt(), "argmax": arg, "points": inside.len() }))
}

fn compare_run(c: &CompareConfig) -> Result<RunOutput> {
    let g = c.grid.spectral(c.epsilon)?;
    let per = Periodization::default();
    let t_end = c.times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sol = evolve(&c.profile, &g, t_end, &c.times, &per)?;
    let (f_lo, f_hi) = c.profile.range();
    let (ramp, _) = per.influence(&g, f_lo.abs().max(f_hi.abs()), t_end);
    let buffer = c.buffer * c.epsilon.powf(2.0 / 3.0);
    let mut tables = Vec::new();
    let mut reports = Vec::new();
    for &t in &c.times {
        let ev = DswEvaluator::new(&c.profile, t, c.epsilon)?;
        let (xm, xp) = (ev.zone().x_minus(), ev.zone().x_plus());
        let u = sol.snapshot_at(t)?;
        let idx: Vec<usize> = (0..u.len())
            .filter(|&i| sol.x[i] >= xm - c.margin && sol.x[i] <= (xp + c.margin).min(ramp))
            .collect();
        let xs: Vec<f64> = idx.iter().map(|&i| sol.x[i]).collect();
        let asym = ev.eval_many(&xs)?;
        let mut table = Table::new(
            format!("compare_{}.csv", time_tag(t)),
            &["x", "u_direct", "u_asymptotic", "difference"],
        );
        let mut diffs = Vec::with_capacity(xs.len());
        for (j, &i) in idx.iter().enumerate() {
            let d = u[i] - asym[j];
            diffs.push((xs[j], d));
            table.push(vec![Some(xs[j]), Some(u[i]), Some(asym[j]), Some(d)]);
        }
        tables.push(table);
        let dx = g.dx();
        reports.push(json!({
            "t": t,
            "x_minus": xm,
            "x_plus": xp,
            "interior": stats(&diffs, dx, (xm + buffer, xp - buffer)),
            "left": stats(&diffs, dx, (xm - c.margin, xm - buffer)),
            "right": stats(&diffs, dx, (xp + buffer, xp + c.margin)),
        }));
    }
    Ok(RunOutput {
        tables,
        summary: json!({ "buffer": buffer, "times": reports, "drift": drift_json(&sol) }),
    })
}

fn edges(c: &EdgesConfig) -> std::result::Result<RunOutput, CliError> {
    let tc = breaking_point(&c.profile)?.t_c;
    let t0 = tc + c.offset;
    if !(c.t_end > t0) {
        return Err(CliError::Config(format!(
            "t_end: must exceed t_c + offset = {t0}, got {}",
            c.t_end
        )));
    }
    let rows = linspace(t0, c.t_end, c.count)
        .par_iter()
        .map(|&t| {
            let (xm, xp) = whitham_zone(t, &c.profile)?;
            let (am, ap) = edges_near_breaking(t, &c.profile)?;
            let layer = trailing_edge(t, &c.profile).ok();
            Ok((t, xm, xp, am, ap, layer))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(
        "edges.csv",
        &["t", "x_minus", "x_plus", "x_minus_expansion", "x_plus_expansion", "v", "xi", "c_e"],
    );
    for (t, xm, xp, am, ap, layer) in &rows {
        table.push(vec![
            Some(*t),
            Some(*xm),
            Some(*xp),
            Some(*am),
            Some(*ap),
            layer.map(|e| e.v),
            layer.map(|e| e.xi),
            layer.map(|e| e.c_e),
        ]);
    }
    let missing = rows.iter().filter(|r| r.5.is_none()).count();
    Ok(RunOutput {
        tables: vec![table],
        summary: json!({ "t_c": tc, "points": rows.len(), "edge_layer_failures": missing }),
    })
}

/// Largest `|u₀|`, the amplitude the resolution heuristics start from.
pub fn max_abs(profile: &InitialProfile) -> f64 {
    let (lo, hi) = profile.range();
    lo.abs().max(hi.abs())
}
