//! Converse-KAM bounds.
//!
//! Along an invariant Lipschitz graph of rotation number `omega` with Birkhoff
//! map `phi`, the coefficient `a(x) = h22(phi^-1 x, x) + h11(x, phi x)` is
//! bounded below by `A_low(omega)`, while concavity of `R` at its maximum
//! forces `a(x_0) <= A_up(omega)` somewhere. Rotation numbers with
//! `A_up < A_low` admit no such graph; they form the set `Xi`.
//!
//! With `b_low = (2 R_min / (w + 1) - ||R'||)^2 / (w + 1)` and
//! `H_up = (2 ||R'||^2 + 4 R_max ||R''||) / (w - 1) + 8 R_max ||R'|| / (w - 1)^2 + 8 R_max^2 / (w - 1)^3`:
//!
//! ```text
//! A_low = 2 b_low^2 / H_up
//! A_up  = -kappa den / (w + 1) + 8 R_max^2 / (w - 1)^3
//! F     = (w + 1) / den * (8 R_max^2 / (w - 1)^3 - A_low)
//! ```
//!
//! where `den = 2 (R_max + R_min)` (or `4 R_min` for the critical-point
//! hypothesis). `A_up < A_low` is the same as `kappa > F`.

use alloc::vec::Vec;

use crate::generating::GenFunction;
use crate::math;
use crate::profile::{compute_sigmas, critical_point_kappa, KappaHypothesis, ProfileNorms, RadiusProfile, DEFAULT_NORM_GRID};
use crate::variational::Configuration;
use crate::{Error, Result};

/// Endpoint tolerance of the `Xi` intervals.
pub const XI_TOL: f64 = 1e-8;

/// Upper end of the scanned rotation interval when `sigma` is infinite.
pub const OMEGA_CAP: f64 = 1000.0;

/// Which strip width the scan uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CriterionMode {
    /// `sigma_0`, the Fermi-Ulam map.
    FermiUlam,
    /// `sigma_B`, the billiard map for small `c`.
    #[default]
    Billiard,
}

/// The closed-form bounds for one profile and one strip width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Criterion {
    pub r_min: f64,
    pub r_max: f64,
    pub d1: f64,
    pub d2: f64,
    pub sigma: f64,
    pub kappa: f64,
    pub hypothesis: KappaHypothesis,
}

impl Criterion {
    pub fn from_norms(norms: &ProfileNorms, epsilon: f64, mode: CriterionMode, hypothesis: KappaHypothesis) -> Self {
        let (sigma0, sigma_b) = compute_sigmas(norms, epsilon);
        let sigma = match mode {
            CriterionMode::FermiUlam => sigma0,
            CriterionMode::Billiard => sigma_b,
        };
        Criterion {
            r_min: norms.r_min,
            r_max: norms.r_max,
            d1: norms.d1_norm,
            d2: norms.d2_norm,
            sigma,
            kappa: norms.kappa,
            hypothesis,
        }
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    /// The open rotation interval `(1, sigma - 1)`.
    pub fn domain(&self) -> (f64, f64) {
        (1.0, self.sigma - 1.0)
    }

    pub fn check(&self, omega: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if omega > lo && omega < hi {
            Ok(())
        } else {
            Err(Error::OutOfRange { omega, lo, hi })
        }
    }

    fn den(&self) -> f64 {
        match self.hypothesis {
            KappaHypothesis::GlobalMax => 2.0 * (self.r_max + self.r_min),
            KappaHypothesis::CriticalPoint => 4.0 * self.r_min,
        }
    }

    pub fn b_low(&self, omega: f64) -> f64 {
        let w1 = omega + 1.0;
        let x = 2.0 * self.r_min / w1 - self.d1;
        x * x / w1
    }

    pub fn h_up(&self, omega: f64) -> f64 {
        let w = omega - 1.0;
        (2.0 * self.d1 * self.d1 + 4.0 * self.r_max * self.d2) / w
            + 8.0 * self.r_max * self.d1 / (w * w)
            + 8.0 * self.r_max * self.r_max / (w * w * w)
    }

    fn leading(&self, omega: f64) -> f64 {
        let w = omega - 1.0;
        8.0 * self.r_max * self.r_max / (w * w * w)
    }

    pub fn a_low(&self, omega: f64) -> Result<f64> {
        self.check(omega)?;
        let b = self.b_low(omega);
        Ok(2.0 * b * b / self.h_up(omega))
    }

    pub fn a_up(&self, omega: f64) -> Result<f64> {
        self.check(omega)?;
        Ok(-self.kappa * self.den() / (omega + 1.0) + self.leading(omega))
    }

    /// `F(omega)`; `kappa > F` exactly when `omega` is in `Xi`.
    pub fn f(&self, omega: f64) -> Result<f64> {
        let a = self.a_low(omega)?;
        Ok((omega + 1.0) / self.den() * (self.leading(omega) - a))
    }

    /// `F` without the `A_low` term.
    pub fn f_no_a(&self, omega: f64) -> Result<f64> {
        self.check(omega)?;
        Ok((omega + 1.0) / self.den() * self.leading(omega))
    }

    pub fn point(&self, omega: f64) -> Result<CriterionPoint> {
        let a_low = self.a_low(omega)?;
        let a_up = self.a_up(omega)?;
        Ok(CriterionPoint {
            omega,
            a_low,
            a_up,
            f_value: self.f(omega)?,
            f_no_a: self.f_no_a(omega)?,
            in_xi: a_up < a_low,
        })
    }

    /// Scan grid over the domain; the upper end is capped at [`OMEGA_CAP`].
    /// Empty when `sigma <= 2`.
    pub fn omega_grid(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.scan_limits();
        if !(hi > lo) || n < 2 {
            return Vec::new();
        }
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    fn scan_limits(&self) -> (f64, f64) {
        let (lo, hi) = self.domain();
        let hi = hi.min(OMEGA_CAP);
        let delta = 1e-9 * hi.abs().max(1.0);
        (lo + delta, hi - delta)
    }

    /// `(argmin, inf F)` by grid scan plus golden-section refinement.
    ///
    /// For `sigma = inf` the infimum is the limit `0` at `omega -> inf`; for
    /// an empty domain it is `+inf` at `NaN`.
    pub fn inf_f(&self, grid: usize) -> (f64, f64) {
        self.inf_of(grid, |w| self.f(w))
    }

    pub fn inf_f_no_a(&self, grid: usize) -> (f64, f64) {
        self.inf_of(grid, |w| self.f_no_a(w))
    }

    fn inf_of(&self, grid: usize, f: impl Fn(f64) -> Result<f64>) -> (f64, f64) {
        if self.sigma == f64::INFINITY {
            return (f64::INFINITY, 0.0);
        }
        let omegas = self.omega_grid(grid.max(2));
        if omegas.is_empty() {
            return (f64::NAN, f64::INFINITY);
        }
        let value = |w: f64| f(w).unwrap_or(f64::INFINITY);
        let mut best = (0, f64::INFINITY);
        for (i, &w) in omegas.iter().enumerate() {
            let v = value(w);
            if v < best.1 {
                best = (i, v);
            }
        }
        let (lo, hi) = self.scan_limits();
        let step = omegas[1] - omegas[0];
        let (x, v) = math::refine_cell(value, omegas[best.0], step, lo, hi, false, 1e-12);
        if v < best.1 {
            (x, v)
        } else {
            (omegas[best.0], best.1)
        }
    }

    /// `Xi` as a union of intervals, from sign changes of `A_up - A_low` on
    /// the grid refined by bisection.
    pub fn xi_intervals(&self, grid: usize) -> Vec<(f64, f64)> {
        let omegas = self.omega_grid(grid);
        let diff = |w: f64| match (self.a_up(w), self.a_low(w)) {
            (Ok(u), Ok(l)) => u - l,
            _ => f64::INFINITY,
        };
        let mut out = Vec::new();
        let mut start: Option<f64> = None;
        let mut prev: Option<(f64, f64)> = None;
        for &w in &omegas {
            let d = diff(w);
            let inside = d < 0.0;
            match (prev, inside) {
                (None, true) => start = Some(w),
                (Some((pw, pd)), true) if pd >= 0.0 => start = Some(math::bisect(diff, pw, w, pd, XI_TOL)),
                (Some((pw, pd)), false) if pd < 0.0 => {
                    let end = math::bisect(diff, pw, w, pd, XI_TOL);
                    out.push((start.take().unwrap_or(pw), end));
                }
                _ => {}
            }
            prev = Some((w, d));
        }
        if let (Some(s), Some((w, _))) = (start, prev) {
            out.push((s, w));
        }
        out
    }

    /// `2 R_max^2 / (R_min sigma^2)`.
    pub fn legacy_threshold(&self) -> f64 {
        2.0 * self.r_max * self.r_max / (self.r_min * self.sigma * self.sigma)
    }
}

/// Free-standing `A_low` for a profile and strip width.
pub fn a_low(norms: &ProfileNorms, sigma: f64, omega: f64) -> Result<f64> {
    criterion_for(norms, sigma, norms.kappa).a_low(omega)
}

/// Free-standing `A_up` with the global-max denominator.
pub fn a_up(norms: &ProfileNorms, sigma: f64, omega: f64, kappa: f64) -> Result<f64> {
    criterion_for(norms, sigma, kappa).a_up(omega)
}

fn criterion_for(norms: &ProfileNorms, sigma: f64, kappa: f64) -> Criterion {
    Criterion {
        r_min: norms.r_min,
        r_max: norms.r_max,
        d1: norms.d1_norm,
        d2: norms.d2_norm,
        sigma,
        kappa,
        hypothesis: KappaHypothesis::GlobalMax,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CriterionPoint {
    pub omega: f64,
    pub a_low: f64,
    pub a_up: f64,
    #[cfg_attr(feature = "serde", serde(rename = "F"))]
    pub f_value: f64,
    #[cfg_attr(feature = "serde", serde(rename = "F_noA"))]
    pub f_no_a: f64,
    pub in_xi: bool,
}

/// Result of [`criterion_scan`]. The per-point table is not serialized;
/// it goes to CSV.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CriterionScan {
    pub mode: CriterionMode,
    pub hypothesis: KappaHypothesis,
    pub epsilon: f64,
    #[cfg_attr(feature = "serde", serde(with = "crate::ext_real"))]
    pub sigma: f64,
    pub kappa: f64,
    #[cfg_attr(feature = "serde", serde(rename = "inf_F", with = "crate::ext_real"))]
    pub inf_f: f64,
    #[cfg_attr(feature = "serde", serde(rename = "inf_F_location", with = "crate::ext_real"))]
    pub inf_f_location: f64,
    #[cfg_attr(feature = "serde", serde(rename = "inf_F_noA", with = "crate::ext_real"))]
    pub inf_f_no_a: f64,
    pub legacy_threshold: f64,
    pub xi_intervals: Vec<(f64, f64)>,
    /// `100 (inf F_noA - inf F) / inf F_noA`.
    pub improvement_pct: f64,
    /// Admissible angular momenta `(0, eps R_min^2 / sigma_B)`.
    pub c_range: (f64, f64),
    /// `kappa > inf F`.
    pub verdict_new: bool,
    /// `kappa > inf F_noA`.
    pub verdict_intermediate: bool,
    /// `kappa > legacy` and `sigma > 4`.
    pub verdict_old: bool,
    /// True when the grid stopped at [`OMEGA_CAP`] instead of `sigma - 1`.
    pub truncated: bool,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub points: Vec<CriterionPoint>,
}

/// Evaluates the criterion on a rotation grid.
pub fn criterion_scan(
    profile: &RadiusProfile,
    epsilon: f64,
    omega_grid: usize,
    mode: CriterionMode,
    hypothesis: KappaHypothesis,
) -> Result<CriterionScan> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument { reason: "epsilon must lie in (0, 1)" });
    }
    if omega_grid < 2 {
        return Err(Error::InvalidArgument { reason: "omega grid needs at least 2 points" });
    }
    let norms = profile.norms(DEFAULT_NORM_GRID)?;
    let kappa = match hypothesis {
        KappaHypothesis::GlobalMax => norms.kappa,
        KappaHypothesis::CriticalPoint => critical_point_kappa(profile, DEFAULT_NORM_GRID).1,
    };
    let crit = Criterion::from_norms(&norms, epsilon, mode, hypothesis).with_kappa(kappa);
    if !(crit.sigma > 2.0) {
        return Err(Error::NotInClass { sigma: crit.sigma });
    }
    let points = crit
        .omega_grid(omega_grid)
        .into_iter()
        .map(|w| crit.point(w))
        .collect::<Result<Vec<_>>>()?;
    let (inf_f_location, inf_f) = crit.inf_f(omega_grid);
    let (_, inf_f_no_a) = crit.inf_f_no_a(omega_grid);
    let improvement_pct = if inf_f_no_a > 0.0 && inf_f_no_a.is_finite() {
        100.0 * (inf_f_no_a - inf_f) / inf_f_no_a
    } else {
        0.0
    };
    let (_, sigma_b) = compute_sigmas(&norms, epsilon);
    let c_max = if sigma_b.is_finite() { epsilon * norms.r_min * norms.r_min / sigma_b } else { 0.0 };
    let legacy_threshold = crit.legacy_threshold();
    Ok(CriterionScan {
        mode,
        hypothesis,
        epsilon,
        sigma: crit.sigma,
        kappa,
        inf_f,
        inf_f_location,
        inf_f_no_a,
        legacy_threshold,
        xi_intervals: crit.xi_intervals(omega_grid),
        improvement_pct,
        c_range: (0.0, c_max),
        verdict_new: kappa > 0.0 && kappa > inf_f,
        verdict_intermediate: kappa > 0.0 && kappa > inf_f_no_a,
        verdict_old: kappa > legacy_threshold && crit.sigma > 4.0,
        truncated: crit.sigma - 1.0 > OMEGA_CAP,
        points,
    })
}

/// Extremes of the second partials over `t in [0, 1)`, `tau in [w - 1, w + 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StripExtrema {
    pub omega: f64,
    #[cfg_attr(feature = "serde", serde(rename = "H11"))]
    pub h11: f64,
    #[cfg_attr(feature = "serde", serde(rename = "H22"))]
    pub h22: f64,
    /// `min -d12`
    pub b_min: f64,
    /// `max -d12`
    pub b_max: f64,
}

/// Grid scan plus alternating golden-section refinement in `tau` and `t`.
pub fn strip_extrema<G: GenFunction>(gf: &G, omega: f64, grid: usize) -> Result<StripExtrema> {
    if grid < 128 {
        return Err(Error::InvalidArgument { reason: "strip extrema need at least 128 points per axis" });
    }
    let strip = gf.strip();
    let (lo, hi) = (omega - 1.0, omega + 1.0);
    for tau in [lo, hi] {
        strip.check(tau)?;
    }
    let taus: Vec<f64> = (0..grid).map(|j| lo + (hi - lo) * j as f64 / (grid - 1) as f64).collect();
    // Objectives, all maximized: |d11|, |d22|, d12 (= -b, so max gives b_min), -d12.
    let objective = |k: usize, t: f64, tau: f64| -> f64 {
        match gf.jet(t, t + tau) {
            Ok(j) => match k {
                0 => j.d11.abs(),
                1 => j.d22.abs(),
                2 => j.d12,
                _ => -j.d12,
            },
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let mut best = [(0.0, 0.0, f64::NEG_INFINITY); 4];
    for i in 0..grid {
        let t = i as f64 / grid as f64;
        for &tau in &taus {
            let j = gf.jet(t, t + tau)?;
            let vals = [j.d11.abs(), j.d22.abs(), j.d12, -j.d12];
            for k in 0..4 {
                if vals[k] > best[k].2 {
                    best[k] = (t, tau, vals[k]);
                }
            }
        }
    }
    let dt = 1.0 / grid as f64;
    let dtau = (hi - lo) / (grid - 1) as f64;
    for (k, b) in best.iter_mut().enumerate() {
        for _ in 0..3 {
            let (t, tau, v) = *b;
            let (x, vx) = math::refine_cell(|s| objective(k, t, s), tau, dtau, lo, hi, true, 1e-12);
            if vx > v {
                *b = (t, x, vx);
            }
            let (t, tau, v) = *b;
            let (y, vy) = math::golden_max(|s| objective(k, s, tau), t - dt, t + dt, 1e-12);
            if vy > v {
                *b = (y, tau, vy);
            }
        }
    }
    Ok(StripExtrema { omega, h11: best[0].2, h22: best[1].2, b_min: -best[2].2, b_max: best[3].2 })
}

/// Samples of a candidate invariant graph through its Birkhoff map.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GraphSample {
    pub omega: f64,
    /// `(x, phi(x), phi^-1(x))`, ordered by `x in [0, 1)`.
    pub points: Vec<(f64, f64, f64)>,
    /// `a(x)`
    pub a_values: Vec<f64>,
    /// `b(x) = -h12(phi^-1 x, x)`
    pub b_values: Vec<f64>,
    /// `b(phi x) = -h12(x, phi x)`
    pub b_next_values: Vec<f64>,
}

impl GraphSample {
    pub fn new(omega: f64, points: Vec<(f64, f64, f64)>) -> Result<Self> {
        let g = GraphSample { omega, points, a_values: Vec::new(), b_values: Vec::new(), b_next_values: Vec::new() };
        g.validate()?;
        Ok(g)
    }

    /// `phi(x) = x + tau0` at `n` equally spaced `x`.
    pub fn rigid(tau0: f64, n: usize) -> Result<Self> {
        let pts = (0..n).map(|i| {
            let x = i as f64 / n as f64;
            (x, x + tau0, x - tau0)
        });
        Self::new(tau0, pts.collect())
    }

    /// The graph traced by a periodic configuration: `x = t_n`,
    /// `phi(x) = t_{n+1}`, shifted so `x in [0, 1)`.
    pub fn from_configuration(config: &Configuration) -> Result<Self> {
        let mut pts: Vec<(f64, f64, f64)> = (0..config.q as i64)
            .map(|n| {
                let x = config.time(n);
                let k = math::floor(x);
                (x - k, config.time(n + 1) - k, config.time(n - 1) - k)
            })
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self::new(config.omega(), pts)
    }

    /// Checks the Birkhoff ordering and the `[w - 1, w + 1]` gap bound.
    pub fn validate(&self) -> Result<()> {
        let tol = 1e-12;
        for (i, &(x, fx, gx)) in self.points.iter().enumerate() {
            let forward = fx - x;
            let backward = x - gx;
            let in_band = |g: f64| g >= self.omega - 1.0 - tol && g <= self.omega + 1.0 + tol;
            if !(0.0..1.0).contains(&x) || !in_band(forward) || !in_band(backward) {
                return Err(Error::InvalidGraph { index: i });
            }
            if i > 0 {
                let (px, pfx, pgx) = self.points[i - 1];
                if !(x > px && fx > pfx && gx > pgx) {
                    return Err(Error::InvalidGraph { index: i });
                }
            }
        }
        // phi(x + 1) = phi(x) + 1 across the wrap.
        if let (Some(&(x0, f0, _)), Some(&(xl, fl, _))) = (self.points.first(), self.points.last()) {
            if self.points.len() > 1 && !(f0 + 1.0 > fl && x0 + 1.0 > xl) {
                return Err(Error::InvalidGraph { index: 0 });
            }
        }
        Ok(())
    }
}

/// Fills `a(x)`, `b(x)` and `b(phi x)` from the jets of `gf`.
pub fn ab_along_graph<G: GenFunction>(gf: &G, graph: &GraphSample) -> Result<GraphSample> {
    graph.validate()?;
    let mut out = graph.clone();
    out.a_values.clear();
    out.b_values.clear();
    out.b_next_values.clear();
    for &(x, fx, gx) in &graph.points {
        let back = gf.jet(gx, x)?;
        let fwd = gf.jet(x, fx)?;
        out.a_values.push(back.d22 + fwd.d11);
        out.b_values.push(-back.d12);
        out.b_next_values.push(-fwd.d12);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundReport {
    pub capped: bool,
    #[cfg_attr(feature = "serde", serde(rename = "B_plus"))]
    pub b_plus: f64,
    #[cfg_attr(feature = "serde", serde(rename = "B_minus"))]
    pub b_minus: f64,
    /// After capping at `B^2 / 8` when `capped`.
    #[cfg_attr(feature = "serde", serde(rename = "C_plus"))]
    pub c_plus: f64,
    #[cfg_attr(feature = "serde", serde(rename = "C_minus"))]
    pub c_minus: f64,
    #[cfg_attr(feature = "serde", serde(rename = "C_plus_raw"))]
    pub c_plus_raw: f64,
    #[cfg_attr(feature = "serde", serde(rename = "C_minus_raw"))]
    pub c_minus_raw: f64,
    #[cfg_attr(feature = "serde", serde(rename = "D_plus"))]
    pub d_plus: f64,
    #[cfg_attr(feature = "serde", serde(rename = "D_minus"))]
    pub d_minus: f64,
    pub min_slack: f64,
    pub argmin_x: f64,
}

/// Checks `a(x) >= b(phi x) D^- + b(x) / D^+` along a filled graph.
///
/// `B+ = sup a / b(phi)`, `B- = sup a / b`, `C+ = inf b(phi) / b`,
/// `C- = inf b / b(phi)`; with `capped` each `C` becomes `min(C, B^2/8)`.
/// Then `D- = (B- - sqrt(B-^2 - 4C-)) / (2C-)` and
/// `D+ = (B+ + sqrt(B+^2 - 4C+)) / 2`. Uncapped, a zero discriminant is
/// accepted.
pub fn mather_bound_check(graph: &GraphSample, capped: bool) -> Result<BoundReport> {
    let n = graph.points.len();
    if n == 0 || graph.a_values.len() != n || graph.b_values.len() != n || graph.b_next_values.len() != n {
        return Err(Error::InvalidArgument { reason: "graph sample needs filled a and b values" });
    }
    let (mut bp, mut bm) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let (mut cp, mut cm) = (f64::INFINITY, f64::INFINITY);
    for i in 0..n {
        let (a, b, bn) = (graph.a_values[i], graph.b_values[i], graph.b_next_values[i]);
        if !(b > 0.0 && bn > 0.0) {
            return Err(Error::InvalidGraph { index: i });
        }
        bp = bp.max(a / bn);
        bm = bm.max(a / b);
        cp = cp.min(bn / b);
        cm = cm.min(b / bn);
    }
    let (cp_used, cm_used) = if capped { (cp.min(bp * bp / 8.0), cm.min(bm * bm / 8.0)) } else { (cp, cm) };
    let disc_p = bp * bp - 4.0 * cp_used;
    let disc_m = bm * bm - 4.0 * cm_used;
    let bad = |d: f64| if capped { !(d > 0.0) } else { !(d >= 0.0) };
    if bad(disc_p) {
        return Err(Error::DegenerateDiscriminant { b: bp, c: cp_used });
    }
    if bad(disc_m) {
        return Err(Error::DegenerateDiscriminant { b: bm, c: cm_used });
    }
    let d_minus = (bm - math::sqrt(disc_m)) / (2.0 * cm_used);
    let d_plus = (bp + math::sqrt(disc_p)) / 2.0;
    let mut min_slack = f64::INFINITY;
    let mut argmin_x = 0.0;
    for i in 0..n {
        let slack = graph.a_values[i] - graph.b_next_values[i] * d_minus - graph.b_values[i] / d_plus;
        if slack < min_slack {
            min_slack = slack;
            argmin_x = graph.points[i].0;
        }
    }
    Ok(BoundReport {
        capped,
        b_plus: bp,
        b_minus: bm,
        c_plus: cp_used,
        c_minus: cm_used,
        c_plus_raw: cp,
        c_minus_raw: cm,
        d_plus,
        d_minus,
        min_slack,
        argmin_x,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DriftEntry {
    pub c: f64,
    pub sup_a_drift: f64,
    pub sup_b_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DriftReport {
    pub entries: Vec<DriftEntry>,
    /// Log-log slope of `max(sup_a_drift, sup_b_drift)` against `c`.
    pub slope: f64,
}

/// How far `a` and `b` along a fixed graph move when `h_0` is replaced by
/// `h_c`. `make_gf(c)` builds the generating function for each `c`.
pub fn drift_probe<G: GenFunction>(
    graph: &GraphSample,
    c_values: &[f64],
    mut make_gf: impl FnMut(f64) -> Result<G>,
) -> Result<DriftReport> {
    let base = ab_along_graph(&make_gf(0.0)?, graph)?;
    let mut entries = Vec::with_capacity(c_values.len());
    for &c in c_values {
        let s = ab_along_graph(&make_gf(c)?, graph)?;
        let sup = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        entries.push(DriftEntry {
            c,
            sup_a_drift: sup(&s.a_values, &base.a_values),
            sup_b_drift: sup(&s.b_values, &base.b_values),
        });
    }
    let x: Vec<f64> = entries.iter().map(|e| math::ln(e.c)).collect();
    let y: Vec<f64> = entries.iter().map(|e| math::ln(e.sup_a_drift.max(e.sup_b_drift).max(f64::MIN_POSITIVE))).collect();
    let slope = if entries.len() >= 2 { math::ls_slope(&x, &y) } else { f64::NAN };
    Ok(DriftReport { entries, slope })
}
