//! Breathing radius profiles.
//!
//! A profile is a finite Fourier series with period one,
//!
//! ```text
//! R(t) = mean + sum_k ( a_k cos(2 pi k t) + b_k sin(2 pi k t) ),
//! ```
//!
//! so every derivative is available in closed form and the sup-norms that
//! define the strip widths `sigma_0` and `sigma_B` can be computed reliably.

use alloc::vec::Vec;

use crate::ckam::{Criterion, CriterionMode};
use crate::math::{self, TAU};
use crate::{Error, Result};

/// Default number of samples for sup-norms.
pub const DEFAULT_NORM_GRID: usize = 1 << 16;

/// Tolerance of the golden-section refinement of sup-norms, in time units.
pub const NORM_REFINE_TOL: f64 = 1e-10;

/// `kappa_R` is `-R''(t_bar)` shrunk by this factor so that the strict
/// inequality `R''(t_bar) < -kappa_R` holds.
pub const KAPPA_SHRINK: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct RadiusProfile {
    pub mean: f64,
    /// `(a_k, b_k)` for `k = 1..=K`.
    #[cfg_attr(feature = "serde", serde(default))]
    pub harmonics: Vec<(f64, f64)>,
}

/// `R`, `R'` and `R''` at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusJet {
    pub r: f64,
    pub dr: f64,
    pub ddr: f64,
}

impl RadiusJet {
    /// `(R^2)'' = 2 (R'^2 + R R'')`.
    #[inline]
    pub fn d2_square(&self) -> f64 {
        2.0 * (self.dr * self.dr + self.r * self.ddr)
    }
}

impl RadiusProfile {
    pub fn new(mean: f64, harmonics: Vec<(f64, f64)>) -> Result<Self> {
        let profile = RadiusProfile { mean, harmonics };
        profile.validate()?;
        Ok(profile)
    }

    pub fn constant(radius: f64) -> Result<Self> {
        Self::new(radius, Vec::new())
    }

    /// Checks the coefficients are finite and the mean non-negative.
    ///
    /// Positivity of `R` itself is checked by [`RadiusProfile::norms`].
    pub fn validate(&self) -> Result<()> {
        if !self.mean.is_finite() || self.mean < 0.0 {
            return Err(Error::InvalidProfile { reason: "mean must be finite and non-negative" });
        }
        if self.harmonics.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidProfile { reason: "non-finite Fourier coefficient" });
        }
        Ok(())
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        RadiusProfile {
            mean: self.mean * factor,
            harmonics: self.harmonics.iter().map(|&(a, b)| (a * factor, b * factor)).collect(),
        }
    }

    /// True when the profile has no cosine-free part, i.e. `R(-t) = R(t)`.
    pub fn is_even(&self) -> bool {
        self.harmonics.iter().all(|&(_, b)| b == 0.0)
    }

    /// Exact `R`, `R'`, `R''` at `t`.
    pub fn evaluate(&self, t: f64) -> RadiusJet {
        let phase = TAU * math::fract(t);
        let mut r = self.mean;
        let mut dr = 0.0;
        let mut ddr = 0.0;
        if self.harmonics.is_empty() {
            return RadiusJet { r, dr, ddr };
        }
        // cos(k x), sin(k x) by the angle-addition recurrence.
        let (s1, c1) = (math::sin(phase), math::cos(phase));
        let (mut sk, mut ck) = (s1, c1);
        for (k, &(a, b)) in self.harmonics.iter().enumerate() {
            let w = TAU * (k + 1) as f64;
            let even = a * ck + b * sk;
            r += even;
            dr += w * (b * ck - a * sk);
            ddr -= w * w * even;
            let next_c = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = next_c;
        }
        RadiusJet { r, dr, ddr }
    }

    #[inline]
    pub fn radius(&self, t: f64) -> f64 {
        self.evaluate(t).r
    }

    /// Sup-norms by dense sampling followed by golden-section refinement.
    pub fn norms(&self, grid_points: usize) -> Result<ProfileNorms> {
        compute_norms(self, grid_points)
    }
}

/// Sup-norms and extremal data of a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ProfileNorms {
    pub r_min: f64,
    pub r_max: f64,
    /// `||R'||`
    pub d1_norm: f64,
    /// `||R''||`
    pub d2_norm: f64,
    /// `||(R^2)''||`
    pub d2_sq_norm: f64,
    /// Smallest global maximiser of `R` in `[0, 1)`.
    pub t_bar: f64,
    /// `kappa_R = -R''(t_bar) * (1 - 1e-6)`, or zero when `R''(t_bar) >= 0`.
    pub kappa: f64,
}

impl ProfileNorms {
    /// `sigma_0 = R_min / ||R'||`.
    pub fn sigma0(&self) -> f64 {
        ratio_or_inf(self.r_min, self.d1_norm)
    }

    /// `sigma_B`; see [`compute_sigmas`].
    pub fn sigma_b(&self, epsilon: f64) -> f64 {
        compute_sigmas(self, epsilon).1
    }
}

fn ratio_or_inf(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

pub fn compute_norms(profile: &RadiusProfile, grid_points: usize) -> Result<ProfileNorms> {
    if grid_points < 1024 {
        return Err(Error::InvalidArgument { reason: "norm grid needs at least 1024 points" });
    }
    profile.validate()?;
    let n = grid_points;
    let h = 1.0 / n as f64;

    let mut i_min = 0;
    let mut i_max = 0;
    let mut i_d1 = 0;
    let mut i_d2 = 0;
    let mut i_d2sq = 0;
    let mut best = [f64::INFINITY, f64::NEG_INFINITY, -1.0, -1.0, -1.0];
    for i in 0..n {
        let j = profile.evaluate(i as f64 * h);
        // Strict comparisons keep the smallest t on ties.
        if j.r < best[0] {
            best[0] = j.r;
            i_min = i;
        }
        if j.r > best[1] {
            best[1] = j.r;
            i_max = i;
        }
        if j.dr.abs() > best[2] {
            best[2] = j.dr.abs();
            i_d1 = i;
        }
        if j.ddr.abs() > best[3] {
            best[3] = j.ddr.abs();
            i_d2 = i;
        }
        if j.d2_square().abs() > best[4] {
            best[4] = j.d2_square().abs();
            i_d2sq = i;
        }
    }
    if best[0] <= 0.0 {
        return Err(Error::NonPositiveRadius { t: i_min as f64 * h, radius: best[0] });
    }

    let refine_min = |i: usize, f: &dyn Fn(f64) -> f64, grid_value: f64| -> (f64, f64) {
        let t = i as f64 * h;
        let (x, v) = math::golden_min(f, t - h, t + h, NORM_REFINE_TOL);
        if v < grid_value {
            (math::fract(x), v)
        } else {
            (t, grid_value)
        }
    };
    let refine_max = |i: usize, f: &dyn Fn(f64) -> f64, grid_value: f64| -> (f64, f64) {
        let (t, v) = refine_min(i, &|x| -f(x), -grid_value);
        (t, -v)
    };

    let (t_min, r_min) = refine_min(i_min, &|t| profile.radius(t), best[0]);
    if r_min <= 0.0 {
        return Err(Error::NonPositiveRadius { t: t_min, radius: r_min });
    }
    let (t_bar, r_max) = refine_max(i_max, &|t| profile.radius(t), best[1]);
    let (_, d1_norm) = refine_max(i_d1, &|t| profile.evaluate(t).dr.abs(), best[2]);
    let (_, d2_norm) = refine_max(i_d2, &|t| profile.evaluate(t).ddr.abs(), best[3]);
    let (_, d2_sq_norm) = refine_max(i_d2sq, &|t| profile.evaluate(t).d2_square().abs(), best[4]);

    let kappa = (-profile.evaluate(t_bar).ddr).max(0.0) * KAPPA_SHRINK;
    Ok(ProfileNorms { r_min, r_max, d1_norm, d2_norm, d2_sq_norm, t_bar, kappa })
}

/// `(sigma_0, sigma_B)`.
///
/// `sigma_0 = R_min / ||R'||` and
/// `sigma_B = min( R_min / (2 ||R'||), 2 sqrt(1 + sqrt(1 - eps^2)) R_min / sqrt(||(R^2)''||) )`,
/// each term `+inf` when its denominator vanishes.
pub fn compute_sigmas(norms: &ProfileNorms, epsilon: f64) -> (f64, f64) {
    let sigma0 = ratio_or_inf(norms.r_min, norms.d1_norm);
    let first = ratio_or_inf(norms.r_min, 2.0 * norms.d1_norm);
    let curvature = 2.0 * math::sqrt(1.0 + math::sqrt(1.0 - epsilon * epsilon)) * norms.r_min;
    let second = ratio_or_inf(curvature, math::sqrt(norms.d2_sq_norm));
    (sigma0, first.min(second))
}

/// Which hypothesis on the concavity point defines `kappa_R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum KappaHypothesis {
    /// `t_bar` is a global maximum of `R`; threshold denominator `2 (R_max + R_min)`.
    #[default]
    GlobalMax,
    /// `t_bar` is any critical point with `R'' < 0`; denominator `4 R_min`.
    CriticalPoint,
}

/// Picks the critical point of `R` with the most negative `R''`.
///
/// Returns `(t, kappa)` with the same `1 - 1e-6` shrink as the global-max
/// choice; `kappa` is zero when no strict local maximum exists.
pub fn critical_point_kappa(profile: &RadiusProfile, grid_points: usize) -> (f64, f64) {
    let n = grid_points.max(1024);
    let h = 1.0 / n as f64;
    let r: Vec<f64> = (0..n).map(|i| profile.radius(i as f64 * h)).collect();
    let mut best = (0.0, 0.0);
    for i in 0..n {
        let prev = r[(i + n - 1) % n];
        let next = r[(i + 1) % n];
        if r[i] > prev && r[i] >= next {
            let t = i as f64 * h;
            // R' vanishes at the local max; refine it by maximizing R.
            let (x, _) = math::golden_max(|s| profile.radius(s), t - h, t + h, NORM_REFINE_TOL);
            let k = -profile.evaluate(x).ddr;
            if k > best.1 {
                best = (math::fract(x), k);
            }
        }
    }
    (best.0, best.1.max(0.0) * KAPPA_SHRINK)
}

/// Class membership and the quantities behind it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ClassReport {
    #[cfg_attr(feature = "serde", serde(with = "crate::ext_real"))]
    pub sigma0: f64,
    #[cfg_attr(feature = "serde", serde(rename = "sigmaB", with = "crate::ext_real"))]
    pub sigma_b: f64,
    pub epsilon: f64,
    pub hypothesis: KappaHypothesis,
    /// Concavity point actually used for `kappa`.
    pub t_bar: f64,
    pub kappa: f64,
    #[cfg_attr(feature = "serde", serde(rename = "in_R0"))]
    pub in_r0: bool,
    #[cfg_attr(feature = "serde", serde(rename = "in_RB"))]
    pub in_rb: bool,
    #[cfg_attr(feature = "serde", serde(rename = "in_R0_tilde"))]
    pub in_r0_tilde: bool,
    #[cfg_attr(feature = "serde", serde(rename = "in_RB_tilde"))]
    pub in_rb_tilde: bool,
    /// `inf F` over `(1, sigma_B - 1)`.
    #[cfg_attr(feature = "serde", serde(rename = "inf_F", with = "crate::ext_real"))]
    pub inf_f: f64,
    #[cfg_attr(feature = "serde", serde(rename = "inf_F_location", with = "crate::ext_real"))]
    pub inf_f_location: f64,
    /// `inf F` over `(1, sigma_0 - 1)`.
    #[cfg_attr(feature = "serde", serde(rename = "inf_F0", with = "crate::ext_real"))]
    pub inf_f0: f64,
    #[cfg_attr(feature = "serde", serde(rename = "inf_F0_location", with = "crate::ext_real"))]
    pub inf_f0_location: f64,
    /// Upper end of the admissible angular momenta, `eps R_min^2 / sigma_B`.
    pub c_max: f64,
    pub norms: ProfileNorms,
}

/// Decides membership in the four classes.
///
/// `in_R0 <=> sigma_0 > 2`, `in_RB <=> sigma_B > 2`; the tilde classes also
/// need `kappa > 0` and `kappa > inf F` over the matching rotation interval.
pub fn classify(
    profile: &RadiusProfile,
    epsilon: f64,
    omega_grid: usize,
    hypothesis: KappaHypothesis,
) -> Result<ClassReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument { reason: "epsilon must lie in (0, 1)" });
    }
    if omega_grid < 256 {
        return Err(Error::InvalidArgument { reason: "omega grid needs at least 256 points" });
    }
    let norms = compute_norms(profile, DEFAULT_NORM_GRID)?;
    let (sigma0, sigma_b) = compute_sigmas(&norms, epsilon);
    let (t_bar, kappa) = match hypothesis {
        KappaHypothesis::GlobalMax => (norms.t_bar, norms.kappa),
        KappaHypothesis::CriticalPoint => critical_point_kappa(profile, DEFAULT_NORM_GRID),
    };

    let billiard = Criterion::from_norms(&norms, epsilon, CriterionMode::Billiard, hypothesis).with_kappa(kappa);
    let fermi = Criterion::from_norms(&norms, epsilon, CriterionMode::FermiUlam, hypothesis).with_kappa(kappa);
    let (inf_f_location, inf_f) = billiard.inf_f(omega_grid);
    let (inf_f0_location, inf_f0) = fermi.inf_f(omega_grid);

    let in_r0 = sigma0 > 2.0;
    let in_rb = sigma_b > 2.0;
    let c_max = if sigma_b.is_finite() { epsilon * norms.r_min * norms.r_min / sigma_b } else { 0.0 };
    Ok(ClassReport {
        sigma0,
        sigma_b,
        epsilon,
        hypothesis,
        t_bar,
        kappa,
        in_r0,
        in_rb,
        in_r0_tilde: in_r0 && kappa > 0.0 && kappa > inf_f0,
        in_rb_tilde: in_rb && kappa > 0.0 && kappa > inf_f,
        inf_f,
        inf_f_location,
        inf_f0,
        inf_f0_location,
        c_max,
        norms,
    })
}
