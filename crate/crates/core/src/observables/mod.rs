//! Arrival amplitudes, arrival-time densities and current expectations at a
//! detector point `X`.
//!
//! Everything is expressed through the momentum functional of [`crate::oscquad`]:
//!
//! * arrival amplitude `Psi(tau; X) = I[sqrt p] / sqrt(m h)`;
//! * positive current `<J+(X)> = |I[sqrt p]|^2 / (m h)`, identical to `|Psi|^2`;
//! * ordinary current `±<J(X)> = Re(conj(I[p]) I[1]) / (m h)`, which may be negative.

mod means;
mod wigner;

pub use means::{
    mean_time_ab_operator, mean_time_current, mean_time_current_with, mean_time_grt_operator,
    mean_time_spectral, OperatorMean,
};
pub use wigner::{wigner_current_check, wigner_function, WignerGrid};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oscquad::{eval_functional, eval_functionals, PhaseContext, WeightKind};
use crate::packets::{Direction, MomentumAmplitude};
use crate::quad::trapezoid;
use crate::sweep::{self, Execution};

/// Tolerance on arrival-probability normalization over a tau window.
pub const P_TOL: f64 = 1e-3;

/// Uniform tau grid over `[lo, hi]`.
pub(crate) fn tau_nodes(window: (f64, f64), n: usize) -> Result<Vec<f64>> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) || n < 2 {
        return Err(Error::InvalidWindow { lo, hi, n });
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut nodes: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
    nodes[n - 1] = hi;
    Ok(nodes)
}

/// Rejects tau grids too coarse for the fastest density beat
/// `(p_max^2 - p_min^2) / (2 m hbar)` present in the amplitude.
pub(crate) fn check_tau_sampling(
    a: &MomentumAmplitude,
    window: (f64, f64),
    n: usize,
) -> Result<()> {
    let g = a.grid();
    let c = a.constants();
    let step = (window.1 - window.0) / (n - 1) as f64;
    let beat = (g.p_max().powi(2) - g.p_min().powi(2)) / (2.0 * c.mass() * c.hbar());
    let phase_step = step * beat;
    if phase_step > std::f64::consts::FRAC_PI_2 {
        return Err(Error::WindowInadequate {
            reason: format!(
                "tau step {step:.3e} advances the fastest density beat by {phase_step:.3} rad"
            ),
        });
    }
    Ok(())
}

/// Amplitude for detection at `x` at time `tau`.
pub fn arrival_amplitude(a: &MomentumAmplitude, tau: f64, x: f64) -> Result<Complex64> {
    let ctx = PhaseContext::for_amplitude(a, tau, x);
    let c = a.constants();
    Ok(eval_functional(a, WeightKind::SqrtP, &ctx)? / (c.mass() * c.h()).sqrt())
}

/// Position-space wavefunction `psi(x, tau) = I[1] / sqrt(h)`.
pub fn position_amplitude(a: &MomentumAmplitude, tau: f64, x: f64) -> Result<Complex64> {
    let ctx = PhaseContext::for_amplitude(a, tau, x);
    Ok(eval_functional(a, WeightKind::Unity, &ctx)? / a.constants().h().sqrt())
}

/// `±<psi(tau)|J(X)|psi(tau)>`, oriented along the direction of motion.
pub fn current_expectation(a: &MomentumAmplitude, tau: f64, x: f64) -> Result<f64> {
    let ctx = PhaseContext::for_amplitude(a, tau, x);
    let f = eval_functionals(a, &ctx)?;
    let c = a.constants();
    Ok((f.linear_p.conj() * f.unity).re / (c.mass() * c.h()))
}

/// `<psi(tau)|J+(X)|psi(tau)>`, never negative.
pub fn positive_current_expectation(a: &MomentumAmplitude, tau: f64, x: f64) -> Result<f64> {
    let ctx = PhaseContext::for_amplitude(a, tau, x);
    let f = eval_functionals(a, &ctx)?;
    let c = a.constants();
    Ok(f.sqrt_p.norm_sqr() / (c.mass() * c.h()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalDistribution {
    pub tau_nodes: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
    pub densities: Vec<f64>,
    pub x: f64,
    pub direction: Direction,
}

impl ArrivalDistribution {
    pub fn spacing(&self) -> f64 {
        self.tau_nodes[1] - self.tau_nodes[0]
    }

    /// Trapezoid integral of the density over the window.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.densities, self.spacing())
    }

    /// Probability missing from the window, `1 - integral`.
    pub fn tail_mass(&self) -> f64 {
        1.0 - self.integral()
    }
}

pub fn arrival_distribution(
    a: &MomentumAmplitude,
    window: (f64, f64),
    n_tau: usize,
    x: f64,
) -> Result<ArrivalDistribution> {
    arrival_distribution_with(Execution::default(), a, window, n_tau, x)
}

pub fn arrival_distribution_with(
    exec: Execution,
    a: &MomentumAmplitude,
    window: (f64, f64),
    n_tau: usize,
    x: f64,
) -> Result<ArrivalDistribution> {
    let tau_nodes = tau_nodes(window, n_tau)?;
    let amplitudes = sweep::try_map(exec, &tau_nodes, |&tau| arrival_amplitude(a, tau, x))?;
    let densities = amplitudes.iter().map(|z| z.norm_sqr()).collect();
    Ok(ArrivalDistribution {
        tau_nodes,
        amplitudes,
        densities,
        x,
        direction: a.direction(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurrentSeries {
    pub tau_nodes: Vec<f64>,
    /// `±<J(X)>` per node.
    pub j_values: Vec<f64>,
    /// `<J+(X)>` per node.
    pub jplus_values: Vec<f64>,
    pub x: f64,
}

impl CurrentSeries {
    pub fn spacing(&self) -> f64 {
        self.tau_nodes[1] - self.tau_nodes[0]
    }
}

pub fn current_series(
    a: &MomentumAmplitude,
    window: (f64, f64),
    n_tau: usize,
    x: f64,
) -> Result<CurrentSeries> {
    current_series_with(Execution::default(), a, window, n_tau, x)
}

pub fn current_series_with(
    exec: Execution,
    a: &MomentumAmplitude,
    window: (f64, f64),
    n_tau: usize,
    x: f64,
) -> Result<CurrentSeries> {
    let tau_nodes = tau_nodes(window, n_tau)?;
    let c = a.constants();
    let norm = c.mass() * c.h();
    let pairs = sweep::try_map(exec, &tau_nodes, |&tau| {
        let f = eval_functionals(a, &PhaseContext::for_amplitude(a, tau, x))?;
        Ok::<_, Error>((
            (f.linear_p.conj() * f.unity).re / norm,
            f.sqrt_p.norm_sqr() / norm,
        ))
    })?;
    let (j_values, jplus_values) = pairs.into_iter().unzip();
    Ok(CurrentSeries {
        tau_nodes,
        j_values,
        jplus_values,
        x,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalProbability {
    /// `∫ <J+(X)> dtau` over the window.
    pub jplus_total: f64,
    /// `±∫ <J(X)> dtau` over the window.
    pub j_total: f64,
}

/// Arrival probability inside the window computed from both currents.
pub fn total_arrival_probability(
    a: &MomentumAmplitude,
    window: (f64, f64),
    n_tau: usize,
    x: f64,
) -> Result<TotalProbability> {
    let _ = tau_nodes(window, n_tau)?;
    check_tau_sampling(a, window, n_tau)?;
    let s = current_series(a, window, n_tau, x)?;
    let h = s.spacing();
    Ok(TotalProbability {
        jplus_total: trapezoid(&s.jplus_values, h),
        j_total: trapezoid(&s.j_values, h),
    })
}
