use anyhow::Result;
use btwist_core::billiard::{cross_check, simulate, Trajectory};
use btwist_core::ckam::{ab_along_graph, criterion_scan, mather_bound_check, CriterionMode, GraphSample};
use btwist_core::generating::{convergence_probe, jet_grid, verify_twist};
use btwist_core::profile::{classify, compute_sigmas, KappaHypothesis, DEFAULT_NORM_GRID};
use btwist_core::twist::{extend, iterate_orbit, map_step, BlendBands, Direction};
use btwist_core::variational::{mather_probe, minimize_periodic, rotation_number};
use btwist_core::{CylinderState, GenFunction, GeneratingFunction, ParticleState, RadiusProfile, StripSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::cli::*;
use crate::io::{load_profile, num, to_csv, to_json, Output};
use crate::CliError;

/// Strips never extend beyond this flight time when `sigma` is infinite.
const TAU_CAP: f64 = 1000.0;

fn hypothesis(critical_point_mode: bool) -> KappaHypothesis {
    if critical_point_mode {
        KappaHypothesis::CriticalPoint
    } else {
        KappaHypothesis::GlobalMax
    }
}

fn strip_for(profile: &RadiusProfile, args: &StripArgs, epsilon: f64) -> Result<StripSpec> {
    let full = GeneratingFunction::full_strip(profile, args.c, epsilon)?;
    let hi = args.tau_max.unwrap_or(full.tau_max.min(TAU_CAP));
    let lo = args.tau_min.unwrap_or(0.0);
    Ok(StripSpec::new(lo, hi)?)
}

fn generating_function(profile: &RadiusProfile, args: &StripArgs, epsilon: f64) -> Result<GeneratingFunction> {
    let strip = strip_for(profile, args, epsilon)?;
    Ok(GeneratingFunction::with_epsilon(profile.clone(), args.c, strip, epsilon)?)
}

fn bands(values: &[f64]) -> Result<BlendBands> {
    match values {
        &[a, b, c, d] => Ok(BlendBands::new(a, b, c, d)),
        _ => Err(CliError::Usage("--bands takes four comma-separated values a'',a',b',b''".into()).into()),
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Classify(a) => classify_cmd(a),
        Command::TwistCheck(a) => twist_check(a),
        Command::Convergence(a) => convergence(a),
        Command::Orbit(a) => orbit(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Minimize(a) => minimize(a),
        Command::MatherProbe(a) => mather(a),
        Command::CriterionScan(a) => scan(a),
        Command::BoundCheck(a) => bound_check(a),
    }
}

fn classify_cmd(a: ClassifyArgs) -> Result<()> {
    let profile = load_profile(&a.common.profile)?;
    let out = Output::new(a.common.out.clone())?;
    let report = classify(&profile, a.common.epsilon, a.grid, hypothesis(a.critical_point_mode))?;
    out.primary("class_report.json", &to_json(&report)?)
}

fn twist_check(a: TwistCheckArgs) -> Result<()> {
    let profile = load_profile(&a.common.profile)?;
    let out = Output::new(a.common.out.clone())?;
    if a.dump_jets && !out.has_dir() {
        return Err(CliError::Usage("--dump-jets needs --out".into()).into());
    }
    let gf = generating_function(&profile, &a.strip, a.common.epsilon)?;
    let strip = gf.strip();
    let twist = verify_twist(&gf, a.grid)?;

    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let (lo, hi) = (strip.tau_min, strip.tau_max);
    let (mut max_dt, mut max_dk): (f64, f64) = (0.0, 0.0);
    for _ in 0..a.samples {
        let t: f64 = rng.gen();
        let tau = rng.gen_range(lo + 1e-3 * (hi - lo)..hi * (1.0 - 1e-3));
        let k = gf.jet(t, t + tau)?.d1;
        let there = map_step(&gf, CylinderState::new(t, k), Direction::Forward)?;
        let back = map_step(&gf, there.image, Direction::Backward)?;
        let dt = (back.image.t - t).rem_euclid(1.0);
        max_dt = max_dt.max(dt.min(1.0 - dt));
        max_dk = max_dk.max((back.image.k - k).abs() / k.abs().max(1.0));
    }

    let extension = match &a.bands {
        Some(b) => {
            let ext = extend(gf.clone(), bands(b)?, a.lambda)?;
            Some(json!({
                "bands": b,
                "lambda": ext.tail_coefficient(),
                "worst_band_d12": ext.worst_band_d12()?,
            }))
        }
        None => None,
    };
    if a.dump_jets {
        let rows: Vec<Vec<String>> = jet_grid(&gf, a.grid, a.grid)?
            .iter()
            .map(|s| {
                let j = s.jet;
                vec![num(s.t0), num(s.tau), num(j.value), num(j.d1), num(j.d2), num(j.d11), num(j.d12), num(j.d22)]
            })
            .collect();
        out.file("jets.csv", &to_csv(&["t0", "tau", "value", "d1", "d2", "d11", "d12", "d22"], &rows)?)?;
    }
    let report = json!({
        "c": a.strip.c,
        "strip": strip,
        "twist": twist,
        "round_trip": {
            "samples": a.samples,
            "seed": a.seed,
            "max_phase_error": max_dt,
            "max_momentum_error": max_dk,
        },
        "extension": extension,
    });
    out.primary("twist_report.json", &to_json(&report)?)?;
    if max_dt.max(max_dk) > a.tol {
        return Err(CliError::ToleranceExceeded { what: "round trip", value: max_dt.max(max_dk), tol: a.tol }.into());
    }
    Ok(())
}

fn convergence(a: ConvergenceArgs) -> Result<()> {
    let profile = load_profile(&a.common.profile)?;
    let out = Output::new(a.common.out.clone())?;
    let c_top = a.c_values.iter().copied().fold(0.0, f64::max);
    let hi = match a.tau_max {
        Some(t) => t,
        None => GeneratingFunction::full_strip(&profile, c_top, a.common.epsilon)?.tau_max.min(TAU_CAP),
    };
    let lo = a.tau_min.unwrap_or(hi.min(2.0) / 2.0);
    let strip = StripSpec::new(lo, hi)?;
    let report = convergence_probe(&profile, strip, &a.c_values, a.common.epsilon)?;
    out.primary("convergence_report.json", &to_json(&json!({ "strip": strip, "report": report }))?)
}

#[derive(Serialize)]
struct OrbitSummary {
    t0: f64,
    #[serde(rename = "K0")]
    k0: f64,
    steps: usize,
    max_del_residual: f64,
    stop: Option<&'static str>,
    rotation_number: Option<f64>,
    rotation_error_bound: Option<f64>,
    extension_lambda: Option<f64>,
}

fn orbit(a: OrbitArgs) -> Result<()> {
    let profile = load_profile(&a.common.profile)?;
    let out = Output::new(a.common.out.clone())?;
    let gf = generating_function(&profile, &a.strip, a.common.epsilon)?;
    match &a.bands {
        Some(b) => {
            let ext = extend(gf, bands(b)?, a.lambda)?;
            let lambda = ext.tail_coefficient();
            orbit_with(&ext, &a, &out, Some(lambda))
        }
        None => orbit_with(&gf, &a, &out, None),
    }
}

fn orbit_with<G: GenFunction>(g: &G, a: &OrbitArgs, out: &Output, lambda: Option<f64>) -> Result<()> {
    let k0 = match (a.k, a.tau) {
        (Some(k), _) => k,
        (None, Some(tau)) => g.jet(a.t0, a.t0 + tau)?.d1,
        (None, None) => return Err(CliError::Usage("one of --k or --tau is required".into()).into()),
    };
    let orbit = iterate_orbit(g, CylinderState::new(a.t0, k0), a.n)?;
    let rows: Vec<Vec<String>> = (0..orbit.states.len())
        .map(|n| {
            let s = orbit.states[n];
            let tau = orbit.taus.get(n).copied().unwrap_or(f64::NAN);
            vec![n.to_string(), num(orbit.lifted_times[n]), num(s.t), num(s.k), num(tau), num(orbit.del_residuals[n])]
        })
        .collect();
    let rotation = rotation_number(&orbit).ok();
    let summary = OrbitSummary {
        t0: a.t0,
        k0,
        steps: orbit.len(),
        max_del_residual: orbit.max_del_residual(),
        stop: orbit.stop.as_ref().map(|s| s.error.name()),
        rotation_number: rotation.map(|r| r.omega),
        rotation_error_bound: rotation.map(|r| r.error_bound),
        extension_lambda: lambda,
    };
    out.file("orbit_summary.json", &to_json(&summary)?)?;
    out.primary("orbit.csv", &to_csv(&["n", "t_lift", "t_mod1", "K", "tau", "del_residual"], &rows)?)?;
    if summary.max_del_residual > a.tol {
        return Err(CliError::ToleranceExceeded { what: "DEL residual", value: summary.max_del_residual, tol: a.tol }.into());
    }
    Ok(())
}

#[derive(Serialize)]
struct TrajectorySummary {
    index: usize,
    r: f64,
    theta: f64,
    vr: f64,
    vtheta: f64,
    time: f64,
    c: f64,
    events: usize,
    stop: Option<&'static str>,
    angular_momentum_drift: f64,
    max_del_residual: Option<f64>,
    cross_check_error: Option<&'static str>,
}

fn events_csv(traj: &Trajectory) -> Result<String> {
    let rows: Vec<Vec<String>> = traj
        .events
        .iter()
        .enumerate()
        .map(|(n, e)| {
            vec![
                n.to_string(),
                num(e.time),
                num(e.angle),
                num(e.radial_speed_in),
                num(e.radial_speed_out),
                num(e.angular_momentum),
                num(e.energy_in),
                num(e.energy_out),
            ]
        })
        .collect();
    to_csv(&["n", "time", "angle", "vr_in", "vr_out", "c", "energy_in", "energy_out"], &rows)
}

/// Launch parameters `(r, theta, v_r, v_theta, time)`.
type Launch = (f64, f64, f64, f64, f64);

fn run_trajectory(profile: &RadiusProfile, epsilon: f64, index: usize, launch: Launch, bounces: usize) -> Result<(Trajectory, TrajectorySummary)> {
    let (r, theta, vr, vtheta, time) = launch;
    let traj = simulate(profile, ParticleState::from_polar(r, theta, vr, vtheta, time), bounces)?;
    let c = traj.events.first().map_or(r * vtheta, |e| e.angular_momentum).abs();
    let check = GeneratingFunction::full_strip(profile, c, epsilon)
        .and_then(|s| StripSpec::new(s.tau_min, s.tau_max.min(TAU_CAP)))
        .and_then(|s| GeneratingFunction::with_epsilon(profile.clone(), c, s, epsilon))
        .and_then(|g| cross_check(&traj.events, &g, c));
    let summary = TrajectorySummary {
        index,
        r,
        theta,
        vr,
        vtheta,
        time,
        c,
        events: traj.events.len(),
        stop: traj.stop.as_ref().map(|e| e.name()),
        angular_momentum_drift: traj.angular_momentum_drift(),
        max_del_residual: check.as_ref().ok().copied(),
        cross_check_error: check.as_ref().err().map(|e| e.name()),
    };
    Ok((traj, summary))
}

fn simulate_cmd(a: SimulateArgs) -> Result<()> {
    let profile = load_profile(&a.common.profile)?;
    let out = Output::new(a.common.out.clone())?;
    let eps = a.common.epsilon;
    let worst = |s: &[TrajectorySummary]| s.iter().filter_map(|t| t.max_del_residual).fold(0.0, f64::max);

    let Some(count) = a.ensemble else {
        let launch = (a.r.unwrap_or(0.0), a.theta, a.vr.unwrap_or(0.0), a.vtheta.unwrap_or(0.0), a.time);
        let (traj, summary) = run_trajectory(&profile, eps, 0, launch, a.bounces)?;
        let residual = worst(std::slice::from_ref(&summary));
        out.file("simulate_summary.json", &to_json(&summary)?)?;
        out.primary("events.csv", &events_csv(&traj)?)?;
        eprintln!("cross-check max DEL residual: {}", summary.max_del_residual.map_or("n/a".into(), num));
        return tolerance(residual, a.tol);
    };

    let norms = profile.norms(DEFAULT_NORM_GRID)?;
    let (_, sigma_b) = compute_sigmas(&norms, eps);
    let r_min = norms.r_min;
    let c_max = (eps * r_min * r_min / sigma_b).min(0.1 * r_min * r_min);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let launches: Vec<Launch> = (0..count)
        .map(|_| {
            let c = c_max * rng.gen_range(1e-3..1.0);
            let r = r_min * rng.gen_range(0.2..0.9);
            let speed: f64 = rng.gen_range(0.3..3.0) * r_min;
            let vtheta = c / r;
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let vr = sign * (speed * speed - vtheta * vtheta).sqrt();
            (r, rng.gen_range(0.0..std::f64::consts::TAU), vr, vtheta, rng.gen())
        })
        .collect();
    let results: Vec<(Trajectory, TrajectorySummary)> = launches
        .par_iter()
        .enumerate()
        .map(|(i, &l)| run_trajectory(&profile, eps, i, l, a.bounces))
        .collect::<Result<_>>()?;
    for (traj, s) in &results {
        out.file(&format!("events_{:04}.csv", s.index), &events_csv(traj)?)?;
    }
    let summaries: Vec<&TrajectorySummary> = results.iter().map(|(_, s)| s).collect();
    let residual = results.iter().filter_map(|(_, s)| s.max_del_residual).fold(0.0, f64::max);
    let drift = results.iter().map(|(_, s)| s.angular_momentum_drift).fold(0.0, f64::max);
    let report = json!({
        "seed": a.seed,
        "bounces": a.bounces,
        "c_max": c_max,
        "max_del_residual": residual,
        "max_angular_momentum_drift": drift,
        "trajectories": summaries,
    });
    out.primary("simulate_summary.json", &to_json(&report)?)?;
    tolerance(residual, a.tol)
}

fn tolerance(residual: f64, tol: f64) -> Result<()> {
    if residual > tol {
        return Err(CliError::ToleranceExceeded { what: "cross-check residual", value: residual, tol }.into());
    }
    Ok(())
}

fn minimize(a: MinimizeArgs) -> Result<()> {
    let profile = load_profile(&a.common.profile)?;
    let out = Output::new(a.common.out.clone())?;
    let gf = generating_function(&profile, &a.strip, a.common.epsilon)?;
    let cfg = minimize_periodic(&gf, a.p, a.q, None)?;
    let gaps = cfg.gaps();
    let rows: Vec<Vec<String>> = (0..cfg.times.len())
        .map(|n| {
            let t = cfg.times[n];
            vec![n.to_string(), num(t), num(t.rem_euclid(1.0)), num(gaps[n]), num(cfg.del_residuals[n])]
        })
        .collect();
    out.file("configuration.json", &to_json(&cfg)?)?;
    out.primary("configuration.csv", &to_csv(&["n", "t_lift", "t_mod1", "gap", "del_residual"], &rows)?)?;
    if cfg.max_del_residual > a.tol {
        return Err(CliError::ToleranceExceeded { what: "DEL residual", value: cfg.max_del_residual, tol: a.tol }.into());
    }
    Ok(())
}

fn mather(a: MatherProbeArgs) -> Result<()> {
    let profile = load_profile(&a.common.profile)?;
    let out = Output::new(a.common.out.clone())?;
    let gf = generating_function(&profile, &a.strip, a.common.epsilon)?;
    let probe = mather_probe(&gf, a.omega, a.depth)?;
    out.primary("mather_probe.json", &to_json(&probe)?)
}

fn scan(a: CriterionScanArgs) -> Result<()> {
    let profile = load_profile(&a.common.profile)?;
    let out = Output::new(a.common.out.clone())?;
    let mode = match a.mode {
        Mode::FermiUlam => CriterionMode::FermiUlam,
        Mode::Billiard => CriterionMode::Billiard,
    };
    let s = criterion_scan(&profile, a.common.epsilon, a.grid, mode, hypothesis(a.critical_point_mode))?;
    let rows: Vec<Vec<String>> = s
        .points
        .iter()
        .map(|p| vec![num(p.omega), num(p.a_low), num(p.a_up), num(p.f_value), num(p.f_no_a), p.in_xi.to_string()])
        .collect();
    out.file("scan.csv", &to_csv(&["omega", "a_low", "a_up", "F", "F_noA", "in_xi"], &rows)?)?;
    out.primary("verdict.json", &to_json(&s)?)
}

fn bound_check(a: BoundCheckArgs) -> Result<()> {
    let profile = load_profile(&a.common.profile)?;
    let out = Output::new(a.common.out.clone())?;
    let gf = generating_function(&profile, &a.strip, a.common.epsilon)?;
    let (kind, graph) = match (a.omega, a.p, a.q) {
        (Some(w), _, _) => ("rigid", GraphSample::rigid(w, a.grid)?),
        (None, Some(p), Some(q)) => ("minimizer", GraphSample::from_configuration(&minimize_periodic(&gf, p, q, None)?)?),
        _ => return Err(CliError::Usage("give --omega or both --p and --q".into()).into()),
    };
    let filled = ab_along_graph(&gf, &graph)?;
    let report = mather_bound_check(&filled, !a.uncapped)?;
    let doc = json!({
        "graph": kind,
        "omega": graph.omega,
        "points": graph.points.len(),
        "report": report,
    });
    out.primary("bound_report.json", &to_json(&doc)?)
}
