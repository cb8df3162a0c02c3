//! Quantum time-of-arrival distributions for one-dimensional wave packets.
//!
//! The crate computes the arrival-time amplitude and density at a detector
//! point `X` for states with a definite direction of motion, together with the
//! ordinary probability current, the positive-definite current, mean arrival
//! times by four independent routes, barrier transmission, and the closed-form
//! asymptotics of two-packet superpositions.
//!
//! Modules:
//!
//! * [`packets`]: physical constants, momentum grids and Gaussian amplitudes.
//! * [`oscquad`]: the oscillatory momentum functional `I[f]`, grid selection
//!   and stationary-phase asymptotics.
//! * [`observables`]: arrival amplitudes, currents, mean times, Wigner check.
//! * [`scattering`]: transmission models and the transmitted state.
//! * [`asymptotics`]: two-packet closed forms and the semiclassical scan.
//! * [`sweep`]: parallel/sequential evaluation of independent grid points.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod observables;
pub mod oscquad;
pub mod packets;
pub mod scattering;
pub mod sweep;

mod quad;

pub use error::{Error, Result};
pub use num_complex::Complex64;
