mod common;

use btwist_core::billiard::{cross_check, simulate, Billiard};
use btwist_core::{GeneratingFunction, ParticleState};
use common::{any_profile, p0, p2};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn launch(r: f64, theta: f64, speed: f64, c: f64, outward: bool, t: f64) -> ParticleState {
    let v_theta = c / r;
    let v_r = (speed * speed - v_theta * v_theta).sqrt() * if outward { 1.0 } else { -1.0 };
    ParticleState::from_polar(r, theta, v_r, v_theta, t)
}

#[test]
#[allow(clippy::approx_constant)]
fn diameter_bounces_on_unit_disk() {
    let init = ParticleState::from_polar(1.0, 3.14159, 1.0, 0.0, 0.0);
    let traj = simulate(&p0(), init, 5).unwrap();
    let times = traj.impact_times();
    for (k, t) in times.iter().enumerate() {
        assert!((t - 2.0 * (k + 1) as f64).abs() < 1e-9, "{t}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn angular_momentum_is_conserved(p in any_profile(), r in 0.2f64..0.8, theta in 0.0f64..TAU, speed in 0.5f64..3.0,
                                     c in 0.001f64..0.1, out: bool, t in 0.0f64..1.0) {
        let traj = simulate(&p, launch(r, theta, speed, c, out, t), 100).unwrap();
        prop_assert!(traj.angular_momentum_drift() <= 1e-10);
    }

    #[test]
    fn static_wall_conserves_energy(r in 0.0f64..0.9, theta in 0.0f64..TAU, speed in 0.2f64..5.0,
                                    c in 0.0f64..0.1, out: bool) {
        let traj = simulate(&p0(), launch(r.max(c / speed + 1e-3), theta, speed, c, out, 0.0), 100).unwrap();
        let e0 = traj.states[0].energy();
        for e in &traj.events {
            prop_assert!((e.energy_in - e0).abs() <= 1e-10 * e0);
            prop_assert!((e.energy_out - e0).abs() <= 1e-10 * e0);
        }
    }

    #[test]
    fn flights_are_affine(p in any_profile(), r in 0.2f64..0.8, theta in 0.0f64..TAU, speed in 0.5f64..3.0, c in 0.0f64..0.1) {
        let billiard = Billiard::new(p.clone()).unwrap();
        let traj = billiard.simulate(launch(r, theta, speed, c, false, 0.0), 20).unwrap();
        for (state, event) in traj.states.iter().zip(&traj.events) {
            let mid = state.advance(0.5 * (state.time + event.time));
            let end = state.advance(event.time);
            for k in 0..2 {
                let lin = state.position[k] + (mid.time - state.time) * state.velocity[k];
                prop_assert!((mid.position[k] - lin).abs() <= 1e-12);
            }
            prop_assert!((end.radius() - p.radius(event.time)).abs() <= 1e-10);
            let angle = end.position[1].atan2(end.position[0]).rem_euclid(std::f64::consts::TAU);
            let da = (angle - event.angle).abs();
            prop_assert!(da.min(std::f64::consts::TAU - da) <= 1e-9);
        }
    }

    #[test]
    fn trajectories_satisfy_discrete_euler_lagrange(r in 0.2f64..0.9, theta in 0.0f64..TAU, speed in 0.3f64..3.0,
                                                    c in 0.0f64..0.0364, out: bool, t in 0.0f64..1.0) {
        let p = p2();
        let traj = simulate(&p, launch(r, theta, speed, c, out, t), 60).unwrap();
        let c_abs = traj.events[0].angular_momentum.abs();
        let strip = GeneratingFunction::full_strip(&p, c_abs, 0.5).unwrap();
        let g = GeneratingFunction::new(p, c_abs, strip).unwrap();
        prop_assert!(cross_check(&traj.events, &g, c_abs).unwrap() <= 1e-8);
    }
}
