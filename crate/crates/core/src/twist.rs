//! The implicit cylinder maps generated by `h` and their global extension.
//!
//! A state `(t, K)` is mapped to `(t1, K1)` by solving `K = d1 h(t, t1)` for
//! `t1` and setting `K1 = -d2 h(t, t1)`. The twist condition `d12 h < 0`
//! makes `d1 h(t, t + tau)` strictly decreasing in `tau`, so the root is
//! unique whenever it exists.

use alloc::vec::Vec;

use crate::generating::{GenFunction, GeneratingFunction, Jet2, StripSpec};
use crate::math;
use crate::{Error, Result};

/// Tolerance of the flight-time root solve.
pub const ROOT_TOL: f64 = 1e-12;

/// Cells of the geometric bracketing grid.
const BRACKET_CELLS: usize = 64;

/// A point of the reduced phase cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CylinderState {
    /// Impact phase; any real is accepted, images are reported mod 1.
    pub t: f64,
    /// Conjugate momentum `K = d1 h`.
    #[cfg_attr(feature = "serde", serde(rename = "K"))]
    pub k: f64,
}

impl CylinderState {
    pub fn new(t: f64, k: f64) -> Self {
        CylinderState { t, k }
    }

    /// True when `K` exceeds the twist-region threshold.
    pub fn above(&self, threshold: f64) -> bool {
        self.k > threshold
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// One application of the map, with the flight time it used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapStep {
    pub image: CylinderState,
    /// Lifted image phase: `t + tau` forward, `t - tau` backward.
    pub t_lift: f64,
    pub tau: f64,
}

/// Image of `state` under the map or its inverse; the phase is reduced mod 1.
pub fn forward_map<G: GenFunction>(gf: &G, state: CylinderState, direction: Direction) -> Result<CylinderState> {
    map_step(gf, state, direction).map(|s| s.image)
}

/// Like [`forward_map`] but keeps the lifted phase and flight time.
pub fn map_step<G: GenFunction>(gf: &G, state: CylinderState, direction: Direction) -> Result<MapStep> {
    let t = state.t;
    let k = state.k;
    if !t.is_finite() || !k.is_finite() {
        return Err(Error::InvalidArgument { reason: "state must be finite" });
    }
    // Both momentum curves are decreasing in tau with slope d12.
    let momentum = |tau: f64| -> Result<Jet2> {
        match direction {
            Direction::Forward => gf.jet(t, t + tau),
            Direction::Backward => gf.jet(t - tau, t),
        }
    };
    let curve = |j: &Jet2| match direction {
        Direction::Forward => j.d1,
        Direction::Backward => -j.d2,
    };

    let strip = gf.strip();
    let (lo, hi) = bracket_limits(strip, |tau| momentum(tau).map(|j| curve(&j) - k))?;
    let nodes = geometric_grid(lo, hi, BRACKET_CELLS);
    let mut prev_tau = nodes[0];
    let mut prev_f = curve(&momentum(prev_tau)?) - k;
    let k_hi = prev_f + k;
    if prev_f < 0.0 {
        let k_lo = curve(&momentum(hi)?);
        return Err(Error::NoRootInStrip { t, k, k_lo, k_hi });
    }
    let mut bracket = None;
    for &tau in &nodes[1..] {
        let f = curve(&momentum(tau)?) - k;
        if f <= 0.0 {
            bracket = Some((prev_tau, prev_f, tau, f));
            break;
        }
        prev_tau = tau;
        prev_f = f;
    }
    let Some((mut a, fa, mut b, fb)) = bracket else {
        return Err(Error::NoRootInStrip { t, k, k_lo: prev_f + k, k_hi });
    };
    let tau = if fa == 0.0 {
        a
    } else if fb == 0.0 {
        b
    } else {
        // Safeguarded Newton: keep the bracket [a, b] with f(a) > 0 > f(b).
        let mut x = 0.5 * (a + b);
        for _ in 0..200 {
            let j = momentum(x)?;
            let f = curve(&j) - k;
            if f == 0.0 {
                break;
            }
            if f > 0.0 {
                a = x;
            } else {
                b = x;
            }
            let newton = x - f / j.d12;
            let next = if j.d12 < 0.0 && newton > a && newton < b { newton } else { 0.5 * (a + b) };
            let done = (next - x).abs() <= ROOT_TOL || b - a <= ROOT_TOL;
            x = next;
            if done {
                break;
            }
        }
        x
    };

    let (t_lift, j) = match direction {
        Direction::Forward => (t + tau, momentum(tau)?),
        Direction::Backward => (t - tau, momentum(tau)?),
    };
    let k_image = match direction {
        Direction::Forward => -j.d2,
        Direction::Backward => j.d1,
    };
    Ok(MapStep { image: CylinderState { t: math::fract(t_lift), k: k_image }, t_lift, tau })
}

/// Search interval for the root: the strip shrunk by a relative `1e-6`.
fn bracket_limits(strip: StripSpec, mut f: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    if strip.tau_max.is_finite() {
        let hi = strip.tau_max * (1.0 - 1e-6);
        let lo = if strip.tau_min > 0.0 { strip.tau_min * (1.0 + 1e-6) } else { 1e-6 * strip.tau_max };
        return Ok((lo, hi));
    }
    // Unbounded strips (twist extensions): double until the curve drops below K.
    let lo = if strip.tau_min > 0.0 { strip.tau_min * (1.0 + 1e-6) } else { 1e-6 };
    let mut hi = (2.0 * lo).max(1.0);
    for _ in 0..80 {
        if f(hi)? <= 0.0 {
            break;
        }
        hi *= 2.0;
    }
    Ok((lo, hi))
}

fn geometric_grid(lo: f64, hi: f64, cells: usize) -> Vec<f64> {
    let ratio = hi / lo;
    let mut v: Vec<f64> = (0..=cells).map(|j| lo * math::exp(math::ln(ratio) * j as f64 / cells as f64)).collect();
    v[0] = lo;
    v[cells] = hi;
    v
}

/// Why an orbit stopped before the requested length.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitStop {
    /// Index of the state whose image could not be computed.
    pub index: usize,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    /// States with phases mod 1.
    pub states: Vec<CylinderState>,
    pub lifted_times: Vec<f64>,
    /// `taus[n] = t_{n+1} - t_n`.
    pub taus: Vec<f64>,
    /// `|d1 h(t_n, t_{n+1}) + d2 h(t_{n-1}, t_n)|` at interior `n`; at `n = 0`
    /// the mismatch `|d1 h(t_0, t_1) - K_0|`, and zero at the last state.
    pub del_residuals: Vec<f64>,
    pub stop: Option<OrbitStop>,
}

impl Orbit {
    pub fn max_del_residual(&self) -> f64 {
        self.del_residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Number of completed steps.
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }
}

/// `n` forward images of `state`. A failed step ends the orbit and is
/// recorded in [`Orbit::stop`] rather than returned as an error.
pub fn iterate_orbit<G: GenFunction>(gf: &G, state: CylinderState, n: usize) -> Result<Orbit> {
    if n == 0 {
        return Err(Error::InvalidArgument { reason: "orbit length must be at least 1" });
    }
    let mut states = Vec::with_capacity(n + 1);
    let mut lifted = Vec::with_capacity(n + 1);
    let mut taus = Vec::with_capacity(n);
    states.push(CylinderState { t: math::fract(state.t), k: state.k });
    lifted.push(state.t);
    let mut stop = None;
    let mut current = state;
    for i in 0..n {
        match map_step(gf, current, Direction::Forward) {
            Ok(step) => {
                let t_lift = lifted[i] + step.tau;
                taus.push(step.tau);
                lifted.push(t_lift);
                states.push(step.image);
                current = CylinderState { t: t_lift, k: step.image.k };
            }
            Err(error) => {
                stop = Some(OrbitStop { index: i, error });
                break;
            }
        }
    }

    let m = lifted.len();
    let mut del_residuals = alloc::vec![0.0; m];
    if m >= 2 {
        let mut prev = gf.jet(lifted[0], lifted[1])?;
        del_residuals[0] = (prev.d1 - states[0].k).abs();
        for i in 1..m - 1 {
            let next = gf.jet(lifted[i], lifted[i + 1])?;
            del_residuals[i] = (next.d1 + prev.d2).abs();
            prev = next;
        }
    }
    Ok(Orbit { states, lifted_times: lifted, taus, del_residuals, stop })
}

/// `sigma* = max_t d1 h(t, t + tau_max (1 - 1e-6))`: below it the forward
/// map can leave the strip.
pub fn twist_threshold<G: GenFunction>(gf: &G, grid: usize) -> Result<f64> {
    let tau = gf.strip().tau_max * (1.0 - 1e-6);
    if !tau.is_finite() {
        return Err(Error::InvalidArgument { reason: "twist threshold needs a bounded strip" });
    }
    let n = grid.max(16);
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 0..n {
        let t = i as f64 / n as f64;
        let v = gf.jet(t, t + tau)?.d1;
        if v > best.1 {
            best = (t, v);
        }
    }
    let h = 1.0 / n as f64;
    let (_, v) = math::golden_max(
        |t| gf.jet(t, t + tau).map(|j| j.d1).unwrap_or(f64::NEG_INFINITY),
        best.0 - h,
        best.0 + h,
        1e-12,
    );
    Ok(v.max(best.1))
}

/// `S(x) = 20x^3 - 45x^4 + 36x^5 - 10x^6`: `S(0) = 0`, `S(1) = 1`, first and
/// second derivatives vanish at both ends, and `S(x) x^2 / 2` is convex on
/// `[0, 1]`.
#[inline]
fn blend(x: f64) -> (f64, f64, f64) {
    let x2 = x * x;
    let x3 = x2 * x;
    let s = x3 * (20.0 - 45.0 * x + 36.0 * x2 - 10.0 * x3);
    let ds = x2 * (60.0 - 180.0 * x + 180.0 * x2 - 60.0 * x3);
    let dds = x * (120.0 - 540.0 * x + 720.0 * x2 - 300.0 * x3);
    (s, ds, dds)
}

/// Blend bands `a'' < a' < b' < b''`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlendBands {
    pub a_outer: f64,
    pub a_inner: f64,
    pub b_inner: f64,
    pub b_outer: f64,
}

impl BlendBands {
    pub fn new(a_outer: f64, a_inner: f64, b_inner: f64, b_outer: f64) -> Self {
        BlendBands { a_outer, a_inner, b_inner, b_outer }
    }
}

/// Quadratic tail `A + B v + lambda v^2 / 2`, `v` measured from an inner
/// band edge.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Tail {
    edge: f64,
    a: f64,
    b: f64,
}

/// A generating function equal to `inner` for `tau in [a', b']`, to a
/// quadratic in `tau` with leading coefficient `lambda / 2` outside
/// `(a'', b'')`, and twist everywhere.
///
/// The tails are `lambda (tau - e)^2 / 2` plus an affine function of `tau`,
/// where `e` is the inner band edge; the affine part does not change the
/// map and keeps the blend convex.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedGF {
    inner: GeneratingFunction,
    bands: BlendBands,
    lambda: f64,
    left: Tail,
    right: Tail,
}

/// Phases averaged to get the tail offsets.
const TAIL_SAMPLES: usize = 256;

/// Grid per axis used to certify the extension.
pub const EXTENSION_GRID: usize = 256;

/// Builds the twist extension.
///
/// `lambda` starts at `max(lambda_hint, 2 sup |d12 h|)` over `[a'', b'']` and
/// is doubled up to 8 times until `d12 < 0` holds on the certification grid.
pub fn extend(inner: GeneratingFunction, bands: BlendBands, lambda_hint: f64) -> Result<ExtendedGF> {
    let strip = inner.strip();
    let BlendBands { a_outer, a_inner, b_inner, b_outer } = bands;
    let ordered = strip.tau_min < a_outer && a_outer < a_inner && a_inner < b_inner && b_inner < b_outer;
    if !ordered || !strip.contains(a_outer) || !strip.contains(b_outer) {
        return Err(Error::InvalidArgument { reason: "extension needs tau_min < a'' < a' < b' < b'' < tau_max" });
    }
    let tail_at = |edge: f64| -> Result<Tail> {
        let (mut a, mut b) = (0.0, 0.0);
        for i in 0..TAIL_SAMPLES {
            let t0 = i as f64 / TAIL_SAMPLES as f64;
            let j = inner.jet(t0, t0 + edge)?;
            a += j.value;
            b += j.d2;
        }
        Ok(Tail { edge, a: a / TAIL_SAMPLES as f64, b: b / TAIL_SAMPLES as f64 })
    };
    let left = tail_at(a_inner)?;
    let right = tail_at(b_inner)?;

    let mut sup_d12: f64 = 0.0;
    for i in 0..EXTENSION_GRID {
        let t0 = i as f64 / EXTENSION_GRID as f64;
        for j in 0..EXTENSION_GRID {
            let tau = a_outer + (b_outer - a_outer) * j as f64 / (EXTENSION_GRID - 1) as f64;
            sup_d12 = sup_d12.max(inner.jet(t0, t0 + tau)?.d12.abs());
        }
    }
    let mut lambda = lambda_hint.max(2.0 * sup_d12);
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument { reason: "tail coefficient must be positive" });
    }
    let mut worst = 0.0;
    for _ in 0..=8 {
        let ext = ExtendedGF { inner: inner.clone(), bands, lambda, left, right };
        worst = ext.worst_band_d12()?;
        if worst < 0.0 {
            return Ok(ext);
        }
        lambda *= 2.0;
    }
    Err(Error::ExtensionFailed { lambda: lambda / 2.0, worst_d12: worst })
}

impl ExtendedGF {
    pub fn inner(&self) -> &GeneratingFunction {
        &self.inner
    }

    pub fn bands(&self) -> BlendBands {
        self.bands
    }

    pub fn tail_coefficient(&self) -> f64 {
        self.lambda
    }

    /// Largest `d12` on the certification grid over both blend bands.
    pub fn worst_band_d12(&self) -> Result<f64> {
        let b = self.bands;
        let mut worst = f64::NEG_INFINITY;
        for (lo, hi) in [(b.a_outer, b.a_inner), (b.b_inner, b.b_outer)] {
            for i in 0..EXTENSION_GRID {
                let t0 = i as f64 / EXTENSION_GRID as f64;
                for j in 0..EXTENSION_GRID {
                    let tau = lo + (hi - lo) * j as f64 / (EXTENSION_GRID - 1) as f64;
                    worst = worst.max(self.jet_unchecked(t0, t0 + tau)?.d12);
                }
            }
        }
        Ok(worst)
    }

    fn tail_jet(&self, tail: &Tail, tau: f64) -> (f64, f64, f64) {
        let v = tau - tail.edge;
        (tail.a + tail.b * v + 0.5 * self.lambda * v * v, tail.b + self.lambda * v, self.lambda)
    }

    fn jet_unchecked(&self, t0: f64, t1: f64) -> Result<Jet2> {
        let tau = t1 - t0;
        let b = self.bands;
        if tau >= b.a_inner && tau <= b.b_inner {
            return self.inner.jet(t0, t1);
        }
        let (tail, x, dx) = if tau < b.a_inner {
            let w = b.a_inner - b.a_outer;
            (&self.left, (b.a_inner - tau) / w, -1.0 / w)
        } else {
            let w = b.b_outer - b.b_inner;
            (&self.right, (tau - b.b_inner) / w, 1.0 / w)
        };
        let (p, dp, ddp) = self.tail_jet(tail, tau);
        if x >= 1.0 {
            return Ok(Jet2 { value: p, d1: -dp, d2: dp, d11: ddp, d12: -ddp, d22: ddp });
        }
        let h = self.inner.jet(t0, t1)?;
        let (sx, dsx, ddsx) = blend(x);
        let s = 1.0 - sx;
        let ds = -dsx * dx;
        let dds = -ddsx * dx * dx;
        let u = h.value - p;
        Ok(Jet2 {
            value: p + s * u,
            d1: -dp - ds * u + s * (h.d1 + dp),
            d2: dp + ds * u + s * (h.d2 - dp),
            d11: (1.0 - s) * ddp + dds * u - 2.0 * ds * (h.d1 + dp) + s * h.d11,
            d22: (1.0 - s) * ddp + dds * u + 2.0 * ds * (h.d2 - dp) + s * h.d22,
            d12: -(1.0 - s) * ddp - dds * u + ds * (h.d1 - h.d2 + 2.0 * dp) + s * h.d12,
        })
    }
}

impl GenFunction for ExtendedGF {
    /// Defined for every positive flight time.
    fn jet(&self, t0: f64, t1: f64) -> Result<Jet2> {
        let tau = t1 - t0;
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::OutOfStrip { tau, lo: 0.0, hi: f64::INFINITY });
        }
        self.jet_unchecked(t0, t1)
    }

    fn strip(&self) -> StripSpec {
        StripSpec { tau_min: 0.0, tau_max: f64::INFINITY }
    }
}
