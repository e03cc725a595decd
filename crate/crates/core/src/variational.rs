//! Periodic action minimizers and rotation numbers.
//!
//! A `(p, q)` configuration is `t_0 < ... < t_{q-1}` extended by
//! `t_{n+q} = t_n + p`. Its action is `W = sum_{n<q} h(t_n, t_{n+1})` and the
//! gradient `g_n = d2 h(t_{n-1}, t_n) + d1 h(t_n, t_{n+1})` is the
//! discrete Euler-Lagrange residual. Newton's method on `g = 0` uses the
//! cyclic tridiagonal Hessian of `W`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::generating::{GenFunction, Jet2};
use crate::linalg::CyclicTridiag;
use crate::math;
use crate::twist::{CylinderState, Orbit};
use crate::{Error, Result};

/// Convergence threshold on `max |g_n|`.
pub const DEL_TOL: f64 = 1e-10;

pub const MAX_NEWTON_ITERATIONS: usize = 200;

/// Step halvings before a Newton step is given up.
pub const MAX_HALVINGS: usize = 30;

/// Phases tried for the uniform initial configuration.
const PHASE_SCAN: usize = 64;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Configuration {
    /// Lifted `t_0..t_{q-1}`.
    pub times: Vec<f64>,
    pub p: u64,
    pub q: u64,
    pub action: f64,
    pub max_del_residual: f64,
    /// Per-index `|g_n|`.
    pub del_residuals: Vec<f64>,
    /// Newton iterations used.
    pub iterations: usize,
    /// Negative eigenvalues of the Hessian of the action.
    pub negative_modes: usize,
    /// No negative mode and a nonsingular Hessian.
    pub local_min: bool,
}

impl Configuration {
    pub fn omega(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// `t_n` for any `n`, using `t_{n+q} = t_n + p`.
    pub fn time(&self, n: i64) -> f64 {
        periodic_time(&self.times, self.p as f64, n)
    }

    /// `t_{n+1} - t_n` for `n < q`.
    pub fn gaps(&self) -> Vec<f64> {
        (0..self.q as i64).map(|n| self.time(n + 1) - self.time(n)).collect()
    }

    /// `max_n |t_{n+1} - t_n - p/q|`.
    pub fn max_deviation(&self) -> f64 {
        let w = self.omega();
        self.gaps().iter().map(|g| (g - w).abs()).fold(0.0, f64::max)
    }

    /// The periodic orbit of the twist map through this configuration,
    /// unrolled over `periods` periods.
    pub fn to_orbit<G: GenFunction>(&self, gf: &G, periods: usize) -> Result<Orbit> {
        let n = self.q as usize * periods.max(1);
        let lifted: Vec<f64> = (0..=n as i64).map(|i| self.time(i)).collect();
        let mut states = Vec::with_capacity(n + 1);
        let mut taus = Vec::with_capacity(n);
        let mut del = Vec::with_capacity(n + 1);
        let mut prev = gf.jet(self.time(-1), lifted[0])?;
        for i in 0..=n {
            let next = gf.jet(lifted[i], self.time(i as i64 + 1))?;
            states.push(CylinderState { t: math::fract(lifted[i]), k: next.d1 });
            del.push((next.d1 + prev.d2).abs());
            if i < n {
                taus.push(lifted[i + 1] - lifted[i]);
            }
            prev = next;
        }
        Ok(Orbit { states, lifted_times: lifted, taus, del_residuals: del, stop: None })
    }
}

fn periodic_time(times: &[f64], p: f64, n: i64) -> f64 {
    let q = times.len() as i64;
    let k = n.div_euclid(q);
    times[n.rem_euclid(q) as usize] + k as f64 * p
}

/// Jets of all `q` links `(t_n, t_{n+1})`, or `None` if a link leaves the strip.
fn link_jets<G: GenFunction>(gf: &G, times: &[f64], p: f64) -> Result<Vec<Jet2>> {
    let q = times.len() as i64;
    (0..q).map(|n| gf.jet(periodic_time(times, p, n), periodic_time(times, p, n + 1))).collect()
}

fn gradient(links: &[Jet2]) -> Vec<f64> {
    let q = links.len();
    (0..q).map(|n| links[(n + q - 1) % q].d2 + links[n].d1).collect()
}

fn hessian(links: &[Jet2]) -> CyclicTridiag {
    let q = links.len();
    let diag = (0..q).map(|n| links[(n + q - 1) % q].d22 + links[n].d11).collect();
    let off = links.iter().map(|j| j.d12).collect();
    CyclicTridiag::new(diag, off)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Action of a `(p, q)` configuration.
pub fn action<G: GenFunction>(gf: &G, times: &[f64], p: u64) -> Result<f64> {
    Ok(link_jets(gf, times, p as f64)?.iter().map(|j| j.value).sum())
}

/// Action gradient `g_n`.
pub fn action_gradient<G: GenFunction>(gf: &G, times: &[f64], p: u64) -> Result<Vec<f64>> {
    Ok(gradient(&link_jets(gf, times, p as f64)?))
}

/// `t_n = theta + n p / q` with the phase `theta in [0, 1/q)` of least action;
/// ties keep the smaller phase.
pub fn uniform_start<G: GenFunction>(gf: &G, p: u64, q: u64) -> Result<Vec<f64>> {
    let w = p as f64 / q as f64;
    let config = |theta: f64| -> Vec<f64> { (0..q).map(|n| theta + n as f64 * w).collect() };
    let mut best = (config(0.0), action(gf, &config(0.0), p)?);
    for i in 1..PHASE_SCAN {
        let theta = i as f64 / (PHASE_SCAN as f64 * q as f64);
        let c = config(theta);
        let a = action(gf, &c, p)?;
        if a < best.1 {
            best = (c, a);
        }
    }
    Ok(best.0)
}

/// Stationary `(p, q)` configuration by damped Newton on the discrete
/// Euler-Lagrange system.
///
/// Starts from `seed` if given, otherwise from [`uniform_start`]. On an
/// indefinite Hessian a negative-curvature step is tried first and kept if
/// the action drops; otherwise the step is pure Newton (positive definite
/// Hessian) or shifted Newton, halved up to [`MAX_HALVINGS`] times until it
/// stays in the strip and passes an Armijo test on the action. Local
/// minimality is reported, not enforced; bounded deviation
/// `|t_{n+1} - t_n - p/q| <= 1` is enforced.
pub fn minimize_periodic<G: GenFunction>(gf: &G, p: u64, q: u64, seed: Option<&[f64]>) -> Result<Configuration> {
    if q == 0 || p == 0 {
        return Err(Error::InvalidArgument { reason: "rotation number p/q needs p, q >= 1" });
    }
    if math::gcd(p, q) != 1 {
        return Err(Error::InvalidArgument { reason: "p and q must be coprime" });
    }
    let omega = p as f64 / q as f64;
    let strip = gf.strip();
    if !(omega > 1.0) || !strip.contains(omega) {
        return Err(Error::OutOfRange { omega, lo: strip.tau_min.max(1.0), hi: strip.tau_max });
    }
    let pf = p as f64;
    let mut t = match seed {
        Some(s) if s.len() == q as usize => s.to_vec(),
        Some(_) => return Err(Error::InvalidArgument { reason: "seed length must equal q" }),
        None => uniform_start(gf, p, q)?,
    };

    let mut links = link_jets(gf, &t, pf)?;
    let mut g = gradient(&links);
    let mut iterations = 0;
    loop {
        let hess = hessian(&links);
        let scale = hessian_scale(&hess);
        let converged = max_abs(&g) <= DEL_TOL;
        let factor = hess.ldl(1e-14 * scale).ok();
        // With a negative mode, first try to descend along it; this also
        // leaves saddles that symmetric starting points converge to.
        let escape = factor.as_ref().and_then(|f| f.negative_direction()).map(|d| {
            let m = max_abs(&d);
            let sign = if g.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>() > 0.0 { -1.0 } else { 1.0 };
            d.iter().map(|x| sign * x * ESCAPE_STEP / m).collect::<Vec<f64>>()
        });
        if converged && escape.is_none() {
            break;
        }
        if iterations == MAX_NEWTON_ITERATIONS {
            return Err(Error::NoConvergence { iterations, residual: max_abs(&g) });
        }
        iterations += 1;

        let w0: f64 = links.iter().map(|j| j.value).sum();
        let merit: f64 = g.iter().map(|x| x * x).sum();
        let mut candidates: Vec<(Vec<f64>, Step)> = Vec::with_capacity(2);
        if let Some(d) = escape {
            candidates.push((d, Step::Escape));
        }
        if !converged {
            match &factor {
                Some(f) if f.negative_count() == 0 => {
                    candidates.push((f.solve(&g.iter().map(|x| -x).collect::<Vec<_>>()), Step::Newton))
                }
                _ => candidates.push((shifted_step(&hess, &g), Step::Shifted)),
            }
        }
        let mut accepted = false;
        let mut escaped = false;
        'candidates: for (dir, kind) in &candidates {
            let slope: f64 = g.iter().zip(dir).map(|(a, b)| a * b).sum();
            let mut alpha = 1.0;
            for _ in 0..=MAX_HALVINGS {
                let trial: Vec<f64> = t.iter().zip(dir).map(|(ti, di)| ti + alpha * di).collect();
                match link_jets(gf, &trial, pf) {
                    Ok(trial_links) => {
                        let trial_g = gradient(&trial_links);
                        let trial_merit: f64 = trial_g.iter().map(|x| x * x).sum();
                        let trial_w: f64 = trial_links.iter().map(|j| j.value).sum();
                        let ok = match kind {
                            Step::Escape => trial_w < w0 - 1e-12 * w0.abs().max(1.0),
                            Step::Newton => trial_w < w0 + 1e-4 * alpha * slope || trial_merit < merit,
                            Step::Shifted => trial_w < w0 + 1e-4 * alpha * slope,
                        };
                        if ok {
                            t = trial;
                            links = trial_links;
                            g = trial_g;
                            accepted = true;
                            break 'candidates;
                        }
                    }
                    Err(Error::OutOfStrip { .. }) | Err(Error::DiscriminantNonPositive { .. }) => escaped = true,
                    Err(e) => return Err(e),
                }
                alpha *= 0.5;
            }
        }
        if !accepted {
            if converged {
                // Flat negative mode: keep the stationary point, report it.
                break;
            }
            if escaped {
                return Err(Error::StripEscape { iteration: iterations });
            }
            return Err(Error::NoConvergence { iterations, residual: max_abs(&g) });
        }
    }

    let hess = hessian(&links);
    let scale = hessian_scale(&hess);
    let (negative_modes, local_min) = match hess.shifted(1e-10 * scale).ldl(1e-14 * scale) {
        Ok(f) => (f.negative_count(), f.negative_count() == 0),
        Err(_) => (0, false),
    };
    let del_residuals: Vec<f64> = g.iter().map(|x| x.abs()).collect();
    let config = Configuration {
        action: links.iter().map(|j| j.value).sum(),
        max_del_residual: max_abs(&g),
        times: t,
        p,
        q,
        del_residuals,
        iterations,
        negative_modes,
        local_min,
    };
    for (index, gap) in config.gaps().iter().enumerate() {
        let deviation = (gap - omega).abs();
        if deviation > 1.0 {
            return Err(Error::BoundedDeviation { index, deviation });
        }
    }
    Ok(config)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    /// Negative-curvature direction; accepted when the action drops.
    Escape,
    /// Pure Newton on a positive definite Hessian; accepted when the action
    /// or the residual drops.
    Newton,
    /// Levenberg-shifted Newton; accepted on sufficient action decrease.
    Shifted,
}

/// Largest coordinate move of a saddle-escape step.
const ESCAPE_STEP: f64 = 0.25;

fn hessian_scale(hess: &CyclicTridiag) -> f64 {
    hess.diag.iter().map(|d| d.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE)
}

/// `-(H + mu I)^-1 g` with the smallest tried `mu` making `H + mu I`
/// positive definite; a descent direction for the action.
fn shifted_step(hess: &CyclicTridiag, g: &[f64]) -> Vec<f64> {
    let scale = hessian_scale(hess);
    let neg: Vec<f64> = g.iter().map(|x| -x).collect();
    let mut shift = 1e-8 * scale;
    for _ in 0..16 {
        if let Ok(f) = hess.shifted(shift).ldl(1e-14 * scale) {
            if f.negative_count() == 0 {
                return f.solve(&neg);
            }
        }
        shift *= 10.0;
    }
    neg.iter().map(|x| x / scale).collect()
}

/// Rotation number estimate and its a-priori error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RotationEstimate {
    pub omega: f64,
    pub error_bound: f64,
}

/// Averages `(t_{n+m} - t_n) / m` over all windows of length `m = N / 2`.
///
/// For an orbit on an invariant graph `|t_n - t_0 - n omega| <= 1`, so every
/// window is within `1/m` and so is the average.
pub fn rotation_number(orbit: &Orbit) -> Result<RotationEstimate> {
    let t = &orbit.lifted_times;
    let n = t.len().saturating_sub(1);
    if n < 100 {
        return Err(Error::InvalidArgument { reason: "rotation number needs an orbit of length >= 100" });
    }
    let m = n / 2;
    let windows = n - m + 1;
    let sum: f64 = (0..windows).map(|i| (t[i + m] - t[i]) / m as f64).sum();
    Ok(RotationEstimate { omega: sum / windows as f64, error_bound: 1.0 / m as f64 })
}

/// Continued-fraction convergents `p_k / q_k`, `k = 0..=depth`, of a positive `omega`.
pub fn convergents(omega: f64, depth: usize) -> Vec<(u64, u64)> {
    let mut out = Vec::with_capacity(depth + 1);
    let (mut p_prev, mut q_prev) = (1u64, 0u64);
    let (mut p_prev2, mut q_prev2) = (0u64, 1u64);
    let mut x = omega;
    for _ in 0..=depth {
        let a = math::floor(x);
        if !(a >= 0.0) || a > 1e12 {
            break;
        }
        let a = a as u64;
        let (p, q) = (a * p_prev + p_prev2, a * q_prev + q_prev2);
        out.push((p, q));
        p_prev2 = p_prev;
        q_prev2 = q_prev;
        p_prev = p;
        q_prev = q;
        let frac = x - a as f64;
        if frac < 1e-12 {
            break;
        }
        x = 1.0 / frac;
    }
    out
}

/// Hull gap statistics of minimizers along the convergents of `omega`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MatherProbe {
    pub omega_target: f64,
    pub convergents: Vec<(u64, u64)>,
    /// Convergents whose minimization failed, with the error name.
    pub failures: Vec<(u64, u64, String)>,
    /// `(p, q)` of the configuration the hull comes from.
    pub deepest: (u64, u64),
    /// Sorted `t_n mod 1` of the deepest successful minimizer.
    pub hull_points: Vec<f64>,
    pub largest_gap: f64,
    /// `largest_gap - 1 / q`.
    pub excess_gap: f64,
    /// Midpoint of the largest gap, mod 1.
    pub gap_location: f64,
    pub actions: Vec<f64>,
}

/// Minimizes along the convergents of `omega` and measures how far the
/// deepest minimizer is from equidistribution.
pub fn mather_probe<G: GenFunction>(gf: &G, omega: f64, depth: usize) -> Result<MatherProbe> {
    let strip = gf.strip();
    if !(omega > 1.0) || !strip.contains(omega) {
        return Err(Error::OutOfRange { omega, lo: strip.tau_min.max(1.0), hi: strip.tau_max });
    }
    let conv = convergents(omega, depth);
    let mut failures = Vec::new();
    let mut actions = Vec::new();
    let mut deepest: Option<Configuration> = None;
    for &(p, q) in &conv {
        match minimize_periodic(gf, p, q, None) {
            Ok(c) => {
                actions.push(c.action / q as f64);
                deepest = Some(c);
            }
            Err(e) => {
                actions.push(f64::NAN);
                failures.push((p, q, String::from(e.name())));
            }
        }
    }
    let Some(best) = deepest else {
        return Err(Error::NoConvergence { iterations: 0, residual: f64::INFINITY });
    };
    let mut hull: Vec<f64> = best.times.iter().map(|&t| math::fract(t)).collect();
    hull.sort_by(f64::total_cmp);
    let (largest_gap, gap_location) = largest_circular_gap(&hull);
    Ok(MatherProbe {
        omega_target: omega,
        convergents: conv,
        failures,
        deepest: (best.p, best.q),
        excess_gap: largest_gap - 1.0 / best.q as f64,
        hull_points: hull,
        largest_gap,
        gap_location,
        actions,
    })
}

/// Largest gap between sorted points of the unit circle and its midpoint.
pub fn largest_circular_gap(sorted: &[f64]) -> (f64, f64) {
    let n = sorted.len();
    if n == 0 {
        return (1.0, 0.5);
    }
    let mut best = (sorted[0] + 1.0 - sorted[n - 1], math::fract(sorted[n - 1] + 0.5 * (sorted[0] + 1.0 - sorted[n - 1])));
    for w in sorted.windows(2) {
        let gap = w[1] - w[0];
        if gap > best.0 {
            best = (gap, 0.5 * (w[0] + w[1]));
        }
    }
    best
}
