//! Closed-form leading-order currents for a superposition of two narrow,
//! non-overlapping Gaussian packets, and the semiclassical `hbar` scan of the
//! arrival density.
//!
//! With `A = 2 sqrt(2 pi) dp / (m h)` and
//! `theta = ((p2^2 - p1^2) tau / 2m + (p2 - p1)(x0 - X)) / hbar`:
//!
//! * `J(tau)  = A (a1^2 p1 + a2^2 p2 + a1 a2 (p1 + p2) cos theta)`
//! * `J+(tau) = A (a1^2 p1 + a2^2 p2 + 2 a1 a2 sqrt(p1 p2) cos theta)`
//!
//! Only the `+x` direction is modelled; mirrored packets follow from the
//! packet-level symmetry.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::observables::arrival_amplitude;
use crate::oscquad::{stationary_phase_value, PhaseContext, WeightKind};
use crate::packets::{
    Direction, GaussianComponent, MomentumAmplitude, PhysicalConstants, WavePacketSpec,
};

/// Default factor standing in for "much greater than" in the negative-flux condition.
pub const DEFAULT_MARGIN: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPacketParams {
    alpha1: f64,
    alpha2: f64,
    p1: f64,
    p2: f64,
    delta_p: f64,
    x0: f64,
    constants: PhysicalConstants,
}

impl TwoPacketParams {
    pub fn new(
        alpha1: f64,
        alpha2: f64,
        p1: f64,
        p2: f64,
        delta_p: f64,
        x0: f64,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        for (name, v) in [
            ("alpha1", alpha1),
            ("alpha2", alpha2),
            ("p1", p1),
            ("p2", p2),
            ("delta_p", delta_p),
            ("x0", x0),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if !(p1 > 0.0) {
            return Err(Error::invalid("p1", format!("must be > 0, got {p1}")));
        }
        if !(p2 > p1) {
            return Err(Error::invalid(
                "p2",
                format!("must exceed p1 = {p1}, got {p2}"),
            ));
        }
        if !(delta_p > 0.0) {
            return Err(Error::invalid(
                "delta_p",
                format!("must be > 0, got {delta_p}"),
            ));
        }
        if delta_p > (p2 - p1) / 10.0 {
            return Err(Error::invalid(
                "delta_p",
                format!(
                    "{delta_p} exceeds (p2 - p1)/10 = {}; packets overlap",
                    (p2 - p1) / 10.0
                ),
            ));
        }
        let norm = alpha1 * alpha1 + alpha2 * alpha2;
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "alpha",
                format!("alpha1^2 + alpha2^2 = {norm}, expected 1"),
            ));
        }
        Ok(Self {
            alpha1,
            alpha2,
            p1,
            p2,
            delta_p,
            x0,
            constants,
        })
    }

    /// Weights `(a1, a2)` with `a1 / a2 = ratio`, normalized.
    pub fn from_ratio(
        ratio: f64,
        p1: f64,
        p2: f64,
        delta_p: f64,
        x0: f64,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(Error::invalid("ratio", format!("must be > 0, got {ratio}")));
        }
        let alpha2 = 1.0 / (1.0 + ratio * ratio).sqrt();
        Self::new(ratio * alpha2, alpha2, p1, p2, delta_p, x0, constants)
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn delta_p(&self) -> f64 {
        self.delta_p
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn constants(&self) -> PhysicalConstants {
        self.constants
    }

    pub fn with_delta_p(&self, delta_p: f64) -> Result<Self> {
        Self::new(
            self.alpha1,
            self.alpha2,
            self.p1,
            self.p2,
            delta_p,
            self.x0,
            self.constants,
        )
    }

    /// The superposition as a packet specification for exact quadrature.
    pub fn to_spec(&self) -> Result<WavePacketSpec> {
        let mut comps = Vec::with_capacity(2);
        for (w, p) in [(self.alpha1, self.p1), (self.alpha2, self.p2)] {
            if w != 0.0 {
                comps.push(GaussianComponent::new(w, p, self.delta_p, self.x0)?);
            }
        }
        WavePacketSpec::new(comps, Direction::Positive)
    }

    fn prefactor(&self) -> f64 {
        let c = self.constants;
        2.0 * (2.0 * PI).sqrt() * self.delta_p / (c.mass() * c.h())
    }

    fn beat_phase(&self, tau: f64, x: f64) -> f64 {
        let c = self.constants;
        let (p1, p2) = (self.p1, self.p2);
        ((p2 * p2 - p1 * p1) * tau / (2.0 * c.mass()) + (p2 - p1) * (self.x0 - x)) / c.hbar()
    }
}

/// Leading-order `±<J(X)>` of the two-packet superposition.
pub fn asym_current(params: &TwoPacketParams, tau: f64, x: f64) -> f64 {
    let p = params;
    p.prefactor()
        * (p.alpha1 * p.alpha1 * p.p1
            + p.alpha2 * p.alpha2 * p.p2
            + p.alpha1 * p.alpha2 * (p.p1 + p.p2) * p.beat_phase(tau, x).cos())
}

/// Leading-order `<J+(X)>` of the two-packet superposition.
pub fn asym_positive_current(params: &TwoPacketParams, tau: f64, x: f64) -> f64 {
    let p = params;
    p.prefactor()
        * (p.alpha1 * p.alpha1 * p.p1
            + p.alpha2 * p.alpha2 * p.p2
            + 2.0 * p.alpha1 * p.alpha2 * (p.p1 * p.p2).sqrt() * p.beat_phase(tau, x).cos())
}

/// Period in `tau` of both asymptotic currents, `4 pi m hbar / (p2^2 - p1^2)`.
pub fn interference_period(params: &TwoPacketParams) -> f64 {
    let c = params.constants;
    4.0 * PI * c.mass() * c.hbar() / (params.p2 * params.p2 - params.p1 * params.p1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativeFluxDiagnostics {
    /// `alpha1 / alpha2`.
    pub ratio1: f64,
    /// `p2 / p1`.
    pub ratio2: f64,
    pub margin: f64,
    pub satisfied: bool,
    /// Minimum over `tau` of [`asym_current`].
    pub min_current_estimate: f64,
}

/// Checks `margin <= alpha1/alpha2` and `margin * alpha1/alpha2 <= p2/p1`.
pub fn negative_flux_condition(
    params: &TwoPacketParams,
    margin: f64,
) -> Result<NegativeFluxDiagnostics> {
    if params.alpha2 == 0.0 {
        return Err(Error::invalid(
            "alpha2",
            "must be nonzero for an interference term",
        ));
    }
    if !(margin.is_finite() && margin > 0.0) {
        return Err(Error::invalid(
            "margin",
            format!("must be > 0, got {margin}"),
        ));
    }
    let p = params;
    let ratio1 = p.alpha1 / p.alpha2;
    let ratio2 = p.p2 / p.p1;
    let satisfied = ratio1 >= margin && ratio2 / ratio1 >= margin;
    let min_current_estimate = p.prefactor()
        * (p.alpha1 * p.alpha1 * p.p1 + p.alpha2 * p.alpha2 * p.p2
            - (p.alpha1 * p.alpha2).abs() * (p.p1 + p.p2));
    Ok(NegativeFluxDiagnostics {
        ratio1,
        ratio2,
        margin,
        satisfied,
        min_current_estimate,
    })
}

/// Interference-dominated approximation
/// `A a1 a2 p2 cos((p2^2 tau / 2m + p2 (x0 - X)) / hbar)`.
pub fn asym_interference_current(
    params: &TwoPacketParams,
    tau: f64,
    x: f64,
    margin: f64,
) -> Result<f64> {
    let d = negative_flux_condition(params, margin)?;
    if !d.satisfied {
        return Err(Error::ConditionNotSatisfied {
            ratio1: d.ratio1,
            ratio2: d.ratio2,
            margin,
        });
    }
    let p = params;
    let c = p.constants;
    let phase = (p.p2 * p.p2 * tau / (2.0 * c.mass()) + p.p2 * (p.x0 - x)) / c.hbar();
    Ok(p.prefactor() * p.alpha1 * p.alpha2 * p.p2 * phase.cos())
}

/// Upper bound on `|asym_current - asym_interference_current|`: the dropped
/// diagonal and `p1` cross terms plus the slow phase `(p1^2 tau / 2m + p1 (x0 - X)) / hbar`
/// that the approximation ignores.
pub fn interference_error_bound(params: &TwoPacketParams, tau: f64, x: f64) -> f64 {
    let p = params;
    let c = p.constants;
    let slow = (p.p1 * p.p1 * tau / (2.0 * c.mass()) + p.p1 * (p.x0 - x)) / c.hbar();
    let (a1, a2) = (p.alpha1.abs(), p.alpha2.abs());
    p.prefactor() * (a1 * a1 * p.p1 + a2 * a2 * p.p2 + a1 * a2 * p.p1 + a1 * a2 * p.p2 * slow.abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiclassicalPoint {
    pub p0: f64,
    pub exact_density: f64,
    pub asym_density: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemiclassicalRow {
    pub scale: f64,
    pub outcome: Result<SemiclassicalPoint>,
}

/// Exact versus leading-order arrival density as `hbar` is scaled down with
/// `|psi(p)|` and the phase function held fixed. Failures at an individual
/// scale (grid too coarse, no stationary point) are reported in that row.
pub fn semiclassical_scan(
    a: &MomentumAmplitude,
    tau: f64,
    x: f64,
    scales: &[f64],
) -> Result<Vec<SemiclassicalRow>> {
    if scales.is_empty() {
        return Err(Error::invalid("scales", "must not be empty"));
    }
    if scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::invalid("scales", "entries must be finite and > 0"));
    }
    if scales.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("scales", "must be strictly decreasing"));
    }
    Ok(scales
        .iter()
        .map(|&scale| SemiclassicalRow {
            scale,
            outcome: semiclassical_point(a, tau, x, scale),
        })
        .collect())
}

fn semiclassical_point(
    a: &MomentumAmplitude,
    tau: f64,
    x: f64,
    scale: f64,
) -> Result<SemiclassicalPoint> {
    let scaled = a.with_hbar_scale(scale)?;
    let c = scaled.constants();
    let exact_density = arrival_amplitude(&scaled, tau, x)?.norm_sqr();
    let ctx = PhaseContext::for_amplitude(&scaled, tau, x);
    let sp = stationary_phase_value(&scaled, WeightKind::SqrtP, &ctx)?;
    let asym_density = sp.value.norm_sqr() / (c.mass() * c.h());
    Ok(SemiclassicalPoint {
        p0: sp.p0,
        exact_density,
        asym_density,
        abs_error: (exact_density - asym_density).abs(),
    })
}
