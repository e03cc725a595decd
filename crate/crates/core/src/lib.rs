//! Numerical toolkit for the breathing circle billiard and the Fermi-Ulam map.
//!
//! The billiard is a disk whose radius `R(t)` oscillates with period one. After
//! fixing the angular momentum `c >= 0` the impact dynamics reduces to an
//! exact symplectic twist map of the cylinder, generated by a diagonally
//! periodic function `h_c(t0, t1)` of consecutive impact times. The case
//! `c = 0` is the Fermi-Ulam map along a diameter.
//!
//! The crate is organised as follows:
//!
//! * [`profile`]: Fourier radius profiles, their sup-norms, the strip widths
//!   `sigma_0`, `sigma_B` and the class membership tests.
//! * [`generating`]: closed-form 2-jets of `h_0` and `h_c`, twist checks and the
//!   `h_c -> h_0` convergence probe.
//! * [`twist`]: the implicit cylinder maps, orbit iteration and the global
//!   twist extension with quadratic tails.
//! * [`billiard`]: an event-driven simulator of the physical particle, used as
//!   an independent oracle for the generating function.
//! * [`variational`]: periodic action minimizers (damped Newton on the
//!   discrete Euler-Lagrange system), rotation numbers and Cantor-gap probes.
//! * [`ckam`]: the quantitative converse-KAM bounds `A_low`, `A_up`, the
//!   threshold `F(omega)`, the exclusion set `Xi_R` and a checker for the
//!   two-sided graph inequality.
//!
//! The crate is `no_std` and only needs `alloc`; all transcendental functions
//! come from `libm`, so results are bit-reproducible across platforms.
#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod linalg;
pub mod math;

pub mod billiard;
pub mod ckam;
pub mod generating;
pub mod profile;
pub mod twist;
pub mod variational;

#[cfg(feature = "serde")]
pub mod ext_real;

pub use error::{Error, Result};

pub use billiard::{ImpactEvent, ParticleState, Trajectory};
pub use ckam::{BoundReport, CriterionMode, CriterionPoint, CriterionScan, GraphSample, StripExtrema};
pub use generating::{GenFunction, GeneratingFunction, Jet2, StripSpec};
pub use profile::{ClassReport, KappaHypothesis, ProfileNorms, RadiusProfile};
pub use twist::{CylinderState, Direction, ExtendedGF, Orbit};
pub use variational::{Configuration, MatherProbe};
