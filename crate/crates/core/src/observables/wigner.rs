//! Wigner function of the position-space state and the current computed from it.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::packets::MomentumAmplitude;
use crate::quad::{derivative4, trap_weight};

/// Largest tolerated imaginary part of a computed Wigner value.
pub const IMAG_TOL: f64 = 1e-10;
/// Relative density allowed at the edges of the position window.
pub const COVERAGE_TOL: f64 = 1e-8;
/// Position half-window for the current check, in units of the position spread.
const CHECK_SIGMAS: f64 = 12.0;

#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub x_nodes: Vec<f64>,
    pub p_nodes: Vec<f64>,
    /// Row-major, `values[i * p_nodes.len() + j] = f_W(x_i, p_j)`.
    pub values: Vec<f64>,
    pub max_imag_residue: f64,
}

impl WignerGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p_nodes.len() + j]
    }
}

/// `psi(x, tau)` on the points `x`, by direct momentum quadrature.
fn position_wavefunction(a: &MomentumAmplitude, xs: &[f64]) -> Vec<Complex64> {
    let g = a.grid();
    let hbar = a.constants().hbar();
    let eps = a.direction().sign();
    let scale = 1.0 / a.constants().h().sqrt();
    xs.iter()
        .map(|&x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, (&p, v)) in g.nodes().iter().zip(a.values()).enumerate() {
                acc += v * Complex64::from_polar(g.weight(i), eps * p * x / hbar);
            }
            acc * scale
        })
        .collect()
}

/// Largest physical momentum magnitude the amplitude can carry.
fn momentum_bound(a: &MomentumAmplitude) -> f64 {
    a.grid().p_min().abs().max(a.grid().p_max().abs())
}

/// Wigner transform at the points `centers` using a shared fine position grid
/// `fine` of spacing `dy`; `centers[i]` indexes `fine`, `half` is the number
/// of fine steps spanned on each side.
fn wigner_rows(
    fine: &[Complex64],
    centers: &[usize],
    half: usize,
    dy: f64,
    p_nodes: &[f64],
    hbar: f64,
) -> (Vec<f64>, f64) {
    let n = 2 * half + 1;
    let mut values = Vec::with_capacity(centers.len() * p_nodes.len());
    let mut residue: f64 = 0.0;
    for &c in centers {
        let products: Vec<Complex64> = (0..n)
            .map(|k| {
                let (plus, minus) = (c + k - half, c + half - k);
                fine[plus].conj() * fine[minus] * trap_weight(k, n, dy)
            })
            .collect();
        for &p in p_nodes {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, prod) in products.iter().enumerate() {
                let y = (k as f64 - half as f64) * dy;
                acc += prod * Complex64::from_polar(1.0, 2.0 * p * y / hbar);
            }
            let f = acc / (PI * hbar);
            residue = residue.max(f.im.abs());
            values.push(f.re);
        }
    }
    (values, residue)
}

fn check_coverage(edge: f64, peak: f64) -> Result<()> {
    if peak == 0.0 {
        return Ok(());
    }
    let ratio = edge / peak;
    if ratio > COVERAGE_TOL {
        return Err(Error::SupportCoverage { ratio });
    }
    Ok(())
}

fn sorted_finite(name: &'static str, nodes: &[f64]) -> Result<()> {
    if nodes.is_empty() || nodes.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(
            name,
            "must be a non-empty list of finite values",
        ));
    }
    if nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(name, "must be strictly increasing"));
    }
    Ok(())
}

/// Wigner function of `a` (at its own time origin) on `x_nodes × p_nodes`,
/// with `p` the physical momentum. `x_nodes` must bracket the position
/// support of the state; the relative density at the outermost nodes must be
/// below [`COVERAGE_TOL`].
pub fn wigner_function(
    a: &MomentumAmplitude,
    x_nodes: &[f64],
    p_nodes: &[f64],
) -> Result<WignerGrid> {
    sorted_finite("x_nodes", x_nodes)?;
    sorted_finite("p_nodes", p_nodes)?;
    let hbar = a.constants().hbar();
    let p_abs = p_nodes.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let dy_max = PI * hbar / (4.0 * (p_abs + momentum_bound(a)));
    let x_lo = x_nodes[0];
    let x_hi = x_nodes[x_nodes.len() - 1];
    let span = x_hi - x_lo;

    let step = if x_nodes.len() > 1 {
        span / (x_nodes.len() - 1) as f64
    } else {
        0.0
    };
    let uniform = x_nodes
        .iter()
        .enumerate()
        .all(|(i, &x)| (x - (x_lo + i as f64 * step)).abs() <= 1e-9 * span.max(1.0));

    let (values, residue, edge, peak) = if uniform && x_nodes.len() > 1 {
        let refine = (step / dy_max).ceil().max(1.0) as usize;
        let dy = step / refine as f64;
        let half = (span / dy).ceil() as usize;
        let total = (x_nodes.len() - 1) * refine + 2 * half + 1;
        let xs: Vec<f64> = (0..total)
            .map(|k| x_lo + (k as f64 - half as f64) * dy)
            .collect();
        let fine = position_wavefunction(a, &xs);
        let centers: Vec<usize> = (0..x_nodes.len()).map(|i| half + i * refine).collect();
        let (values, residue) = wigner_rows(&fine, &centers, half, dy, p_nodes, hbar);
        let edge = fine[centers[0]]
            .norm_sqr()
            .max(fine[*centers.last().unwrap()].norm_sqr());
        let peak = fine.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
        (values, residue, edge, peak)
    } else {
        let half = (span.max(dy_max) / dy_max).ceil() as usize;
        let dy = span.max(dy_max) / half as f64;
        let mut values = Vec::with_capacity(x_nodes.len() * p_nodes.len());
        let mut residue: f64 = 0.0;
        let mut peak: f64 = 0.0;
        let mut edges = Vec::with_capacity(x_nodes.len());
        for &x in x_nodes {
            let xs: Vec<f64> = (0..=2 * half)
                .map(|k| x + (k as f64 - half as f64) * dy)
                .collect();
            let fine = position_wavefunction(a, &xs);
            let (v, r) = wigner_rows(&fine, &[half], half, dy, p_nodes, hbar);
            values.extend(v);
            residue = residue.max(r);
            peak = fine.iter().map(|v| v.norm_sqr()).fold(peak, f64::max);
            edges.push(fine[half].norm_sqr());
        }
        let edge = edges[0].max(*edges.last().unwrap());
        (values, residue, edge, peak)
    };
    check_coverage(edge, peak)?;
    if residue > IMAG_TOL {
        return Err(Error::invalid(
            "wigner",
            format!("imaginary residue {residue:.3e} exceeds {IMAG_TOL:e}"),
        ));
    }
    Ok(WignerGrid {
        x_nodes: x_nodes.to_vec(),
        p_nodes: p_nodes.to_vec(),
        values,
        max_imag_residue: residue,
    })
}

/// Mean and spread of the position distribution of `a`.
fn position_moments(a: &MomentumAmplitude) -> (f64, f64) {
    let g = a.grid();
    let hbar = a.constants().hbar();
    let d = derivative4(a.values(), g.spacing());
    let mut first = 0.0;
    let mut second = 0.0;
    for (i, (v, dv)) in a.values().iter().zip(&d).enumerate() {
        let w = g.weight(i);
        first += (v.conj() * Complex64::i() * hbar * dv).re * w;
        second += (hbar * hbar) * dv.norm_sqr() * w;
    }
    let norm = a.norm();
    let mean = a.direction().sign() * first / norm;
    let var = (second / norm - (first / norm).powi(2)).max(0.0);
    (mean, var.sqrt())
}

/// `±∫ f_W(X, p; tau) p/m dp`, the current at `x` evaluated through the
/// Wigner function of the evolved state.
pub fn wigner_current_check(a: &MomentumAmplitude, tau: f64, x: f64) -> Result<f64> {
    let evolved = a.evolved(tau);
    let (mean, spread) = position_moments(&evolved);
    let reach = (mean - x).abs() + CHECK_SIGMAS * spread;
    let eps = a.direction().sign();
    let g = a.grid();
    let mut p_nodes: Vec<f64> = g.nodes().iter().map(|p| eps * p).collect();
    if eps < 0.0 {
        p_nodes.reverse();
    }
    let hbar = a.constants().hbar();
    let dy_max = PI * hbar / (8.0 * momentum_bound(a));
    let half = (reach / dy_max).ceil() as usize;
    let dy = reach / half as f64;
    let xs: Vec<f64> = (0..=2 * half)
        .map(|k| x + (k as f64 - half as f64) * dy)
        .collect();
    let fine = position_wavefunction(&evolved, &xs);
    let peak = fine.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    let edge = fine[0].norm_sqr().max(fine[2 * half].norm_sqr());
    check_coverage(edge, peak)?;
    let (row, residue) = wigner_rows(&fine, &[half], half, dy, &p_nodes, hbar);
    if residue > IMAG_TOL {
        return Err(Error::invalid(
            "wigner",
            format!("imaginary residue {residue:.3e} exceeds {IMAG_TOL:e}"),
        ));
    }
    let m = a.constants().mass();
    let n = p_nodes.len();
    let sum: f64 = row
        .iter()
        .zip(&p_nodes)
        .enumerate()
        .map(|(j, (f, p))| f * p / m * trap_weight(j, n, g.spacing()))
        .sum();
    Ok(eps * sum)
}
