//! Mean arrival times: from the sampled density, from the current, and as
//! expectation values of the symmetrized time-of-arrival operators.

use num_complex::Complex64;

use super::{check_tau_sampling, current_series_with, ArrivalDistribution, P_TOL};
use crate::error::{Error, Result};
use crate::packets::MomentumAmplitude;
use crate::quad::{derivative4, trapezoid};
use crate::sweep::Execution;

/// Largest allowed `|psi(p_min)|^2 (m / p_min) dp` before the `1/p` factor
/// in the operator means is considered unresolved.
pub const DIVERGENCE_LIMIT: f64 = 1e-8;

/// First moment of the sampled density. Fails when more than [`P_TOL`] of the
/// probability lies outside the window.
pub fn mean_time_spectral(d: &ArrivalDistribution) -> Result<f64> {
    let mass = d.integral();
    if (1.0 - mass).abs() > P_TOL {
        return Err(Error::WindowInadequate {
            reason: format!("window holds probability {mass:.6}, outside 1 ± {P_TOL}"),
        });
    }
    let weighted: Vec<f64> = d
        .tau_nodes
        .iter()
        .zip(&d.densities)
        .map(|(t, p)| t * p)
        .collect();
    Ok(trapezoid(&weighted, d.spacing()) / mass)
}

/// `∫ tau <J(X)> dtau / ∫ <J(X)> dtau` over the window.
pub fn mean_time_current(
    a: &MomentumAmplitude,
    window: (f64, f64),
    n_tau: usize,
    x: f64,
) -> Result<f64> {
    mean_time_current_with(Execution::default(), a, window, n_tau, x)
}

pub fn mean_time_current_with(
    exec: Execution,
    a: &MomentumAmplitude,
    window: (f64, f64),
    n_tau: usize,
    x: f64,
) -> Result<f64> {
    let s = current_series_with(exec, a, window, n_tau, x)?;
    check_tau_sampling(a, window, n_tau)?;
    let h = s.spacing();
    let total = trapezoid(&s.j_values, h);
    if (1.0 - total).abs() > P_TOL {
        return Err(Error::WindowInadequate {
            reason: format!("current integrates to {total:.6}, outside 1 ± {P_TOL}"),
        });
    }
    let weighted: Vec<f64> = s
        .tau_nodes
        .iter()
        .zip(&s.j_values)
        .map(|(t, j)| t * j)
        .collect();
    Ok(trapezoid(&weighted, h) / total)
}

/// Expectation value of a time operator. `imag_residue` is the imaginary part
/// of the discretized quadratic form, zero for an exactly symmetric operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorMean {
    pub value: f64,
    pub imag_residue: f64,
}

fn check_divergence(a: &MomentumAmplitude) -> Result<()> {
    let g = a.grid();
    let p_min = g.p_min();
    let edge = a.values()[0].norm_sqr() * a.constants().mass() / p_min * g.spacing();
    if edge > DIVERGENCE_LIMIT {
        return Err(Error::DivergenceGuard {
            edge,
            limit: DIVERGENCE_LIMIT,
        });
    }
    Ok(())
}

/// `(X - Xhat) u` with `Xhat = i hbar d/dp` in the direction-oriented representation.
fn shifted_position(u: &[Complex64], x_eff: f64, spacing: f64, hbar: f64) -> Vec<Complex64> {
    let du = derivative4(u, spacing);
    u.iter()
        .zip(du)
        .map(|(&v, d)| v * x_eff - Complex64::i() * hbar * d)
        .collect()
}

fn quadratic_form(a: &MomentumAmplitude, image: &[Complex64]) -> Result<OperatorMean> {
    let g = a.grid();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, (v, w)) in a.values().iter().zip(image).enumerate() {
        acc += v.conj() * w * g.weight(i);
    }
    let norm = a.norm();
    if norm == 0.0 {
        return Err(Error::NormUnderflow { norm });
    }
    Ok(OperatorMean {
        value: acc.re / norm,
        imag_residue: acc.im / norm,
    })
}

/// `<½[(X - Xhat) m/p + m/p (X - Xhat)]>`.
pub fn mean_time_ab_operator(a: &MomentumAmplitude, x: f64) -> Result<OperatorMean> {
    check_divergence(a)?;
    let c = a.constants();
    let g = a.grid();
    let x_eff = a.direction().sign() * x;
    let inv: Vec<f64> = g.nodes().iter().map(|&p| c.mass() / p).collect();
    let psi = a.values();
    let u: Vec<Complex64> = psi.iter().zip(&inv).map(|(v, r)| v * r).collect();
    let left = shifted_position(&u, x_eff, g.spacing(), c.hbar());
    let right = shifted_position(psi, x_eff, g.spacing(), c.hbar());
    let image: Vec<Complex64> = left
        .iter()
        .zip(&right)
        .zip(&inv)
        .map(|((l, r), k)| 0.5 * (l + r * k))
        .collect();
    quadratic_form(a, &image)
}

/// `<sqrt(m/p) (X - Xhat) sqrt(m/p)>`.
pub fn mean_time_grt_operator(a: &MomentumAmplitude, x: f64) -> Result<OperatorMean> {
    check_divergence(a)?;
    let c = a.constants();
    let g = a.grid();
    let x_eff = a.direction().sign() * x;
    let root: Vec<f64> = g.nodes().iter().map(|&p| (c.mass() / p).sqrt()).collect();
    let v: Vec<Complex64> = a.values().iter().zip(&root).map(|(v, r)| v * r).collect();
    let image: Vec<Complex64> = shifted_position(&v, x_eff, g.spacing(), c.hbar())
        .into_iter()
        .zip(&root)
        .map(|(w, r)| w * r)
        .collect();
    quadratic_form(a, &image)
}
