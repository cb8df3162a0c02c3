//! Transmission through one-dimensional barriers located at the origin.
//!
//! A transmitted packet is represented by multiplying each momentum component
//! by the barrier's transmission amplitude: an incident `exp(ipx/hbar)`
//! continues as `t(p) exp(ipx/hbar)` beyond the barrier and is reflected as
//! `r(p) exp(-ipx/hbar)`, with `|t|^2 + |r|^2 = 1`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::packets::{Direction, MomentumAmplitude, PhysicalConstants};

/// Transmitted norm below which the packet counts as fully reflected.
pub const OPAQUE_NORM: f64 = 1e-100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Barrier {
    Free,
    /// `V(x) = strength * delta(x)`.
    Delta {
        strength: f64,
    },
    /// `V(x) = height` on `[0, width]`.
    Rectangular {
        height: f64,
        width: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionModel {
    barrier: Barrier,
    constants: PhysicalConstants,
}

impl TransmissionModel {
    pub fn free(constants: PhysicalConstants) -> Self {
        Self {
            barrier: Barrier::Free,
            constants,
        }
    }

    pub fn delta_barrier(strength: f64, constants: PhysicalConstants) -> Result<Self> {
        if !(strength.is_finite() && strength >= 0.0) {
            return Err(Error::invalid(
                "strength",
                format!("must be >= 0, got {strength}"),
            ));
        }
        Ok(Self {
            barrier: Barrier::Delta { strength },
            constants,
        })
    }

    pub fn rectangular_barrier(
        height: f64,
        width: f64,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        if !(height.is_finite() && height > 0.0) {
            return Err(Error::invalid(
                "height",
                format!("must be > 0, got {height}"),
            ));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::invalid("width", format!("must be > 0, got {width}")));
        }
        Ok(Self {
            barrier: Barrier::Rectangular { height, width },
            constants,
        })
    }

    pub fn barrier(&self) -> Barrier {
        self.barrier
    }

    pub fn constants(&self) -> PhysicalConstants {
        self.constants
    }

    /// Transmission amplitude for incident momentum `p > 0`.
    pub fn transmission(&self, p: f64) -> Complex64 {
        self.amplitudes(p).0
    }

    /// Reflection amplitude for incident momentum `p > 0`.
    pub fn reflection(&self, p: f64) -> Complex64 {
        self.amplitudes(p).1
    }

    fn amplitudes(&self, p: f64) -> (Complex64, Complex64) {
        let hbar = self.constants.hbar();
        let m = self.constants.mass();
        match self.barrier {
            Barrier::Free => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            Barrier::Delta { strength } => {
                let t = 1.0 / Complex64::new(1.0, m * strength / (hbar * p));
                (t, t - 1.0)
            }
            Barrier::Rectangular { height, width } => {
                rectangular(p / hbar, 2.0 * m * height / (hbar * hbar), width)
            }
        }
    }

    /// Multiply `a` by `t(p)` and renormalize. Returns the transmitted state
    /// and the norm before renormalization, the total transmission probability.
    pub fn transmit(&self, a: &MomentumAmplitude) -> Result<(MomentumAmplitude, f64)> {
        if a.direction() != Direction::Positive {
            return Err(Error::invalid(
                "direction",
                "barrier transmission is defined for packets moving toward +x",
            ));
        }
        if a.constants() != self.constants {
            return Err(Error::invalid(
                "constants",
                "amplitude and barrier use different constants",
            ));
        }
        if self.barrier == Barrier::Free {
            return Ok((a.clone(), a.norm()));
        }
        let values = a
            .grid()
            .nodes()
            .iter()
            .zip(a.values())
            .map(|(&p, v)| v * self.transmission(p))
            .collect();
        let out = a.with_values(values)?;
        let norm = out.norm();
        if norm < OPAQUE_NORM {
            return Err(Error::OpaqueBarrier { norm });
        }
        Ok((out.normalized()?, norm))
    }
}

/// `(t, r)` for wavenumber `k` against a step of strength `u = 2 m V0 / hbar^2`
/// and width `l`.
fn rectangular(k: f64, u: f64, l: f64) -> (Complex64, Complex64) {
    let i = Complex64::i();
    let free = Complex64::from_polar(1.0, -k * l);
    let k2 = k * k;
    let kappa2 = k2 - u;
    if kappa2 >= 0.0 {
        // oscillatory inside; sinc keeps E = V0 finite
        let kp = kappa2.sqrt();
        let x = kp * l;
        let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
        let denom = Complex64::new(2.0 * k * x.cos(), -(k2 + kappa2) * l * sinc);
        let t = 2.0 * k * free / denom;
        let r = i * (kappa2 - k2) * l * sinc / denom;
        (t, r)
    } else {
        // evanescent inside; factor exp(qL) taken out of cosh and sinh
        let q = (-kappa2).sqrt();
        let x = q * l;
        let c = 0.5 * (1.0 + (-2.0 * x).exp());
        let sh = -(-2.0 * x).exp_m1() / (2.0 * x);
        let denom = Complex64::new((k2 - q * q) * l * sh, 2.0 * k * c);
        let t = 2.0 * i * k * free * (-x).exp() / denom;
        let r = (q * q + k2) * l * sh / denom;
        (t, r)
    }
}
