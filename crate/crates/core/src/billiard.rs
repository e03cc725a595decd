//! Event-driven simulation of a point particle in the breathing disk.
//!
//! Free flight is exact (affine in time). Wall crossings are bracketed by
//! marching and refined by bisection; at impact the radial velocity relative
//! to the wall is reversed: `v' = v + 2 (R'(t) - v.n) n`.

use alloc::vec::Vec;

use crate::generating::GenFunction;
use crate::math::{self, TAU};
use crate::profile::{RadiusProfile, DEFAULT_NORM_GRID};
use crate::{Error, Result};

/// Impact time tolerance.
pub const IMPACT_TOL: f64 = 1e-13;

/// Relative radial speeds below this count as tangential.
pub const GRAZING_TOL: f64 = 1e-8;

/// Distance from the wall within which a state counts as on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParticleState {
    pub position: [f64; 2],
    pub velocity: [f64; 2],
    pub time: f64,
}

impl ParticleState {
    pub fn new(position: [f64; 2], velocity: [f64; 2], time: f64) -> Self {
        ParticleState { position, velocity, time }
    }

    /// From polar position `(r, theta)` and radial / angular velocity
    /// components `(v_r, v_theta)`.
    pub fn from_polar(r: f64, theta: f64, v_r: f64, v_theta: f64, time: f64) -> Self {
        let (s, c) = (math::sin(theta), math::cos(theta));
        ParticleState {
            position: [r * c, r * s],
            velocity: [v_r * c - v_theta * s, v_r * s + v_theta * c],
            time,
        }
    }

    pub fn radius(&self) -> f64 {
        math::hypot(self.position[0], self.position[1])
    }

    pub fn speed(&self) -> f64 {
        math::hypot(self.velocity[0], self.velocity[1])
    }

    /// `x ^ v`.
    pub fn angular_momentum(&self) -> f64 {
        self.position[0] * self.velocity[1] - self.position[1] * self.velocity[0]
    }

    pub fn energy(&self) -> f64 {
        let v = self.velocity;
        0.5 * (v[0] * v[0] + v[1] * v[1])
    }

    /// Radial velocity `v . x / |x|`; zero at the origin.
    pub fn radial_speed(&self) -> f64 {
        let r = self.radius();
        if r == 0.0 {
            return 0.0;
        }
        (self.velocity[0] * self.position[0] + self.velocity[1] * self.position[1]) / r
    }

    /// Free flight to time `t`.
    pub fn advance(&self, t: f64) -> ParticleState {
        let dt = t - self.time;
        ParticleState {
            position: [self.position[0] + self.velocity[0] * dt, self.position[1] + self.velocity[1] * dt],
            velocity: self.velocity,
            time: t,
        }
    }
}

/// Data at one wall collision.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ImpactEvent {
    pub time: f64,
    /// Polar angle of the impact point in `[0, 2 pi)`.
    pub angle: f64,
    pub radial_speed_in: f64,
    /// Radial speed after the reflection law is applied.
    pub radial_speed_out: f64,
    pub wall_speed: f64,
    pub angular_momentum: f64,
    pub energy_in: f64,
    pub energy_out: f64,
}

/// Step bound of the crossing search: `min(0.01, R_min / (4 |v|))`.
fn march_step(r_min: f64, speed: f64) -> f64 {
    (r_min / (4.0 * speed)).min(0.01)
}

fn search_horizon(r_min: f64, r_max: f64, d1: f64, speed: f64) -> f64 {
    let crossing = 10.0 * (2.0 * r_max / speed + 1.0);
    if d1 > 0.0 {
        crossing.max(10.0 * r_min / d1)
    } else {
        crossing
    }
}

/// Simulation context: the profile plus cached bounds.
#[derive(Debug, Clone)]
pub struct Billiard {
    profile: RadiusProfile,
    r_min: f64,
    r_max: f64,
    d1: f64,
}

impl Billiard {
    pub fn new(profile: RadiusProfile) -> Result<Self> {
        let n = profile.norms(DEFAULT_NORM_GRID)?;
        Ok(Billiard { profile, r_min: n.r_min, r_max: n.r_max, d1: n.d1_norm })
    }

    pub fn profile(&self) -> &RadiusProfile {
        &self.profile
    }

    /// Signed distance outside the wall at time `t`.
    fn gap(&self, state: &ParticleState, t: f64) -> f64 {
        state.advance(t).radius() - self.profile.radius(t)
    }

    /// First wall crossing after `state.time`; returns the event and the
    /// particle at impact, before reflection.
    pub fn next_impact(&self, state: &ParticleState) -> Result<(ImpactEvent, ParticleState)> {
        let speed = state.speed();
        if !(speed > 0.0) || !speed.is_finite() {
            return Err(Error::InvalidArgument { reason: "particle speed must be positive" });
        }
        let dt = march_step(self.r_min, speed);
        let t0 = state.time;
        let horizon = t0 + search_horizon(self.r_min, self.r_max, self.d1, speed);
        let mut a = t0;
        let mut ga = self.gap(state, a).min(0.0);
        let mut k = 1u64;
        loop {
            let b = t0 + k as f64 * dt;
            if b > horizon {
                return Err(Error::NoImpact { time: t0, horizon });
            }
            let gb = self.gap(state, b);
            if gb >= 0.0 {
                let t = if ga == 0.0 && a > t0 {
                    a
                } else {
                    math::bisect(|t| self.gap(state, t), a, b, ga, IMPACT_TOL)
                };
                let at = state.advance(t);
                return Ok((self.event_at(&at), at));
            }
            a = b;
            ga = gb;
            k += 1;
        }
    }

    fn event_at(&self, at: &ParticleState) -> ImpactEvent {
        let jet = self.profile.evaluate(at.time);
        let vr = at.radial_speed();
        let vr_out = 2.0 * jet.dr - vr;
        let vt2 = 2.0 * at.energy() - vr * vr;
        ImpactEvent {
            time: at.time,
            angle: math::fract(math::atan2(at.position[1], at.position[0]) / TAU) * TAU,
            radial_speed_in: vr,
            radial_speed_out: vr_out,
            wall_speed: jet.dr,
            angular_momentum: at.angular_momentum(),
            energy_in: at.energy(),
            energy_out: 0.5 * (vt2 + vr_out * vr_out),
        }
    }

    /// Applies the moving-wall reflection law to a particle on the wall.
    pub fn reflect(&self, incoming: &ParticleState) -> Result<ParticleState> {
        let r = incoming.radius();
        let jet = self.profile.evaluate(incoming.time);
        if (r - jet.r).abs() > BOUNDARY_TOL * jet.r.max(1.0) {
            return Err(Error::InvalidArgument { reason: "reflection needs a particle on the wall" });
        }
        let n = [incoming.position[0] / r, incoming.position[1] / r];
        let vr = incoming.velocity[0] * n[0] + incoming.velocity[1] * n[1];
        let relative = vr - jet.dr;
        if relative.abs() < GRAZING_TOL {
            return Err(Error::GrazingImpact { time: incoming.time, relative_speed: relative });
        }
        if relative < 0.0 {
            return Err(Error::InvalidArgument { reason: "particle is moving away from the wall" });
        }
        let kick = 2.0 * (jet.dr - vr);
        Ok(ParticleState {
            position: incoming.position,
            velocity: [incoming.velocity[0] + kick * n[0], incoming.velocity[1] + kick * n[1]],
            time: incoming.time,
        })
    }

    /// Alternates [`Billiard::next_impact`] and [`Billiard::reflect`].
    ///
    /// A start on the wall moving outward relative to it is first reflected
    /// without recording an event. A grazing impact ends the trajectory and
    /// is recorded in [`Trajectory::stop`].
    pub fn simulate(&self, init: ParticleState, bounces: usize) -> Result<Trajectory> {
        if bounces == 0 {
            return Err(Error::InvalidArgument { reason: "bounce count must be at least 1" });
        }
        let jet = self.profile.evaluate(init.time);
        let mut state = init;
        if init.radius() > jet.r + BOUNDARY_TOL {
            return Err(Error::InvalidArgument { reason: "initial position is outside the disk" });
        }
        if (init.radius() - jet.r).abs() <= BOUNDARY_TOL && init.radial_speed() > jet.dr {
            state = self.reflect(&init)?;
        }
        let mut events = Vec::with_capacity(bounces);
        let mut states = Vec::with_capacity(bounces + 1);
        states.push(state);
        let mut stop = None;
        for _ in 0..bounces {
            let (event, at) = self.next_impact(&state)?;
            match self.reflect(&at) {
                Ok(next) => {
                    events.push(event);
                    states.push(next);
                    state = next;
                }
                Err(e @ Error::GrazingImpact { .. }) => {
                    events.push(event);
                    stop = Some(e);
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        Ok(Trajectory { events, states, stop })
    }
}

/// Events and post-reflection states; `states[0]` is the launch state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub events: Vec<ImpactEvent>,
    pub states: Vec<ParticleState>,
    pub stop: Option<Error>,
}

impl Trajectory {
    pub fn impact_times(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.time).collect()
    }

    /// Largest deviation of `x ^ v` from its first value `c`, relative to
    /// `max(|c|, sqrt(eps) |x| |v|)` so that near-radial launches do not
    /// divide by roundoff.
    pub fn angular_momentum_drift(&self) -> f64 {
        let Some(first) = self.events.first() else { return 0.0 };
        let c0 = first.angular_momentum;
        let floor = self.states.first().map_or(0.0, |s| s.radius() * s.speed()) * math::sqrt(f64::EPSILON);
        let scale = c0.abs().max(floor).max(f64::MIN_POSITIVE);
        self.events
            .iter()
            .map(|e| e.angular_momentum)
            .chain(self.states.iter().map(|s| s.angular_momentum()))
            .map(|c| (c - c0).abs() / scale)
            .fold(0.0, f64::max)
    }
}

/// Convenience wrapper around [`Billiard::new`] and [`Billiard::next_impact`].
pub fn next_impact(profile: &RadiusProfile, state: &ParticleState) -> Result<ImpactEvent> {
    Billiard::new(profile.clone())?.next_impact(state).map(|(e, _)| e)
}

/// Convenience wrapper around [`Billiard::simulate`].
pub fn simulate(profile: &RadiusProfile, init: ParticleState, bounces: usize) -> Result<Trajectory> {
    Billiard::new(profile.clone())?.simulate(init, bounces)
}

/// Largest `|d1 h(t_n, t_{n+1}) + d2 h(t_{n-1}, t_n)|` over interior impacts.
///
/// `gf` must use the trajectory's `|c|`; `h_c` is even in `c`.
pub fn cross_check<G: GenFunction>(events: &[ImpactEvent], gf: &G, c: f64) -> Result<f64> {
    if let Some(e) = events.first() {
        let mismatch = (e.angular_momentum.abs() - c).abs();
        if mismatch > 1e-8 * c.max(1.0) {
            return Err(Error::InvalidArgument { reason: "trajectory and generating function disagree on c" });
        }
    }
    let times: Vec<f64> = events.iter().map(|e| e.time).collect();
    let mut worst: f64 = 0.0;
    for w in times.windows(3) {
        let before = gf.jet(w[0], w[1])?;
        let after = gf.jet(w[1], w[2])?;
        worst = worst.max((after.d1 + before.d2).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p0() -> Billiard {
        Billiard::new(RadiusProfile::constant(1.0).unwrap()).unwrap()
    }

    #[test]
    fn diameter_crossing() {
        let (e, at) = p0().next_impact(&ParticleState::new([-1.0, 0.0], [1.0, 0.0], 0.0)).unwrap();
        assert_relative_eq!(e.time, 2.0, epsilon = 1e-12);
        assert!(e.angle < 1e-12 || (TAU - e.angle) < 1e-12);
        assert_relative_eq!(at.position[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn unit_speed_from_center() {
        let (e, _) = p0().next_impact(&ParticleState::new([0.0, 0.0], [0.6, 0.8], 0.0)).unwrap();
        assert_relative_eq!(e.time, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn static_reflection_reverses_radial_speed() {
        let at = ParticleState::new([1.0, 0.0], [1.0, 0.3], 0.0);
        let out = p0().reflect(&at).unwrap();
        assert_eq!(out.velocity, [-1.0, 0.3]);
        assert_eq!(out.energy(), at.energy());
        assert!(matches!(
            p0().reflect(&ParticleState::new([1.0, 0.0], [0.0, 1.0], 0.0)),
            Err(Error::GrazingImpact { .. })
        ));
    }

    #[test]
    fn moving_mirror_law() {
        // R(t) = 1 + 0.1 sin(2 pi t) / (2 pi) has R'(0) = 0.1.
        let b = Billiard::new(RadiusProfile::new(1.0, alloc::vec![(0.0, 0.1 / TAU)]).unwrap()).unwrap();
        let out = b.reflect(&ParticleState::new([1.0, 0.0], [1.0, 0.0], 0.0)).unwrap();
        assert_relative_eq!(out.velocity[0], -0.8, epsilon = 1e-15);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn launch_from_wall_and_chord_orbit() {
        let tr = p0().simulate(ParticleState::from_polar(1.0, 3.14159, 1.0, 0.0, 0.0), 5).unwrap();
        for (n, t) in tr.impact_times().iter().enumerate() {
            assert_relative_eq!(*t, 2.0 * (n + 1) as f64, epsilon = 1e-11);
        }
        assert!(tr.angular_momentum_drift() < 1e-10);
        // Speed 1, c = 0.8: chord length 2 sqrt(1 - 0.64) = 1.2.
        let tr = p0().simulate(ParticleState::from_polar(1.0, 0.0, -0.6, 0.8, 0.0), 6).unwrap();
        let t = tr.impact_times();
        for w in t.windows(2) {
            assert_relative_eq!(w[1] - w[0], 1.2, epsilon = 1e-11);
        }
        assert!(tr.angular_momentum_drift() < 1e-12);
    }

    #[test]
    fn outside_start_is_rejected() {
        assert!(p0().simulate(ParticleState::new([2.0, 0.0], [1.0, 0.0], 0.0), 1).is_err());
    }
}
