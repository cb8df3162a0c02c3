//! The oscillatory momentum functional
//!
//! ```text
//! I[f] = ∫_0^∞ dp f(p) psi(p) exp(-i (p^2 tau / 2m - eps p X) / hbar)
//! ```
//!
//! evaluated by the trapezoid rule on grids that resolve the phase, plus its
//! leading-order stationary-phase approximation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::packets::{
    polar_decompose, Direction, MomentumAmplitude, MomentumGrid, PhysicalConstants, WavePacketSpec,
    DEFAULT_GRID_NODES,
};

/// Largest integrand phase advance per momentum step that is accepted.
pub const NYQUIST_STEP_LIMIT: f64 = PI / 2.0;
/// Phase advance per step targeted by [`choose_grid`].
pub const GRID_STEP_TARGET: f64 = PI / 4.0;
/// Default cap on the number of momentum nodes.
pub const MAX_GRID_NODES: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightKind {
    Unity,
    SqrtP,
    LinearP,
}

impl WeightKind {
    #[inline]
    pub fn eval(self, p: f64) -> f64 {
        match self {
            WeightKind::Unity => 1.0,
            WeightKind::SqrtP => p.sqrt(),
            WeightKind::LinearP => p,
        }
    }
}

/// Detector position, time and direction at which the phase
/// `chi(p) = phi(p) - p^2 tau / 2m + eps p X` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseContext {
    pub tau: f64,
    pub x: f64,
    pub direction: Direction,
    pub constants: PhysicalConstants,
}

impl PhaseContext {
    pub fn new(tau: f64, x: f64, direction: Direction, constants: PhysicalConstants) -> Self {
        Self {
            tau,
            x,
            direction,
            constants,
        }
    }

    /// Context sharing the amplitude's direction and constants.
    pub fn for_amplitude(a: &MomentumAmplitude, tau: f64, x: f64) -> Self {
        Self::new(tau, x, a.direction(), a.constants())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPhaseResult {
    pub p0: f64,
    pub chi_at_p0: f64,
    pub chi_second: f64,
    /// Leading-order value of `I[f]`.
    pub value: Complex64,
}

fn check_context(a: &MomentumAmplitude, ctx: &PhaseContext) -> Result<()> {
    if a.direction() != ctx.direction {
        return Err(Error::DirectionMismatch);
    }
    if a.constants() != ctx.constants {
        return Err(Error::invalid(
            "constants",
            "phase context constants differ from the amplitude's",
        ));
    }
    if !(ctx.tau.is_finite() && ctx.x.is_finite()) {
        return Err(Error::invalid("context", "tau and X must be finite"));
    }
    Ok(())
}

/// Refuse grids on which the integrand phase advances more than
/// [`NYQUIST_STEP_LIMIT`] between adjacent nodes.
pub fn check_nyquist(a: &MomentumAmplitude, ctx: &PhaseContext) -> Result<()> {
    let grid = a.grid();
    let slope =
        a.position_reach() + grid.p_max() * ctx.tau.abs() / ctx.constants.mass() + ctx.x.abs();
    let step = grid.spacing() * slope / ctx.constants.hbar();
    if step > NYQUIST_STEP_LIMIT {
        return Err(Error::Nyquist {
            step,
            limit: NYQUIST_STEP_LIMIT,
        });
    }
    Ok(())
}

#[inline]
fn kernel(p: f64, ctx: &PhaseContext) -> Complex64 {
    let m = ctx.constants.mass();
    let hbar = ctx.constants.hbar();
    let eps = ctx.direction.sign();
    Complex64::from_polar(1.0, -(p * p * ctx.tau / (2.0 * m) - eps * p * ctx.x) / hbar)
}

/// Trapezoid value of `I[f]` at `ctx`.
pub fn eval_functional(
    a: &MomentumAmplitude,
    f: WeightKind,
    ctx: &PhaseContext,
) -> Result<Complex64> {
    check_context(a, ctx)?;
    check_nyquist(a, ctx)?;
    let grid = a.grid();
    Ok(grid
        .nodes()
        .iter()
        .zip(a.values())
        .enumerate()
        .map(|(i, (&p, &v))| v * kernel(p, ctx) * (f.eval(p) * grid.weight(i)))
        .sum())
}

/// `I[1]`, `I[sqrt p]` and `I[p]` from one pass over the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Functionals {
    pub unity: Complex64,
    pub sqrt_p: Complex64,
    pub linear_p: Complex64,
}

pub(crate) fn eval_functionals(a: &MomentumAmplitude, ctx: &PhaseContext) -> Result<Functionals> {
    check_context(a, ctx)?;
    check_nyquist(a, ctx)?;
    let grid = a.grid();
    let mut out = Functionals {
        unity: Complex64::new(0.0, 0.0),
        sqrt_p: Complex64::new(0.0, 0.0),
        linear_p: Complex64::new(0.0, 0.0),
    };
    for (i, (&p, &v)) in grid.nodes().iter().zip(a.values()).enumerate() {
        let term = v * kernel(p, ctx) * grid.weight(i);
        out.unity += term;
        out.sqrt_p += term * p.sqrt();
        out.linear_p += term * p;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    pub n_min: usize,
    pub n_max: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            n_min: DEFAULT_GRID_NODES,
            n_max: MAX_GRID_NODES,
        }
    }
}

/// Momentum grid over the packet's default window, fine enough that the
/// phase advances at most [`GRID_STEP_TARGET`] per node for `|tau| <= tau_max`.
/// The packet's own contribution is bounded by its largest origin plus its
/// widest position spread.
pub fn choose_grid(
    spec: &WavePacketSpec,
    tau_max: f64,
    x: f64,
    c: PhysicalConstants,
) -> Result<MomentumGrid> {
    choose_grid_with(spec, tau_max, x, c, GridOptions::default())
}

pub fn choose_grid_with(
    spec: &WavePacketSpec,
    tau_max: f64,
    x: f64,
    c: PhysicalConstants,
    opts: GridOptions,
) -> Result<MomentumGrid> {
    if !(tau_max.is_finite() && tau_max >= 0.0) {
        return Err(Error::invalid(
            "tau_max",
            format!("must be >= 0, got {tau_max}"),
        ));
    }
    let (lo, hi) = spec.default_window();
    let slope = hi * tau_max / c.mass()
        + x.abs()
        + spec.max_abs_origin()
        + spec.max_position_spread(c.hbar());
    let n = if slope == 0.0 {
        opts.n_min as f64
    } else {
        let max_spacing = GRID_STEP_TARGET * c.hbar() / slope;
        (((hi - lo) / max_spacing).ceil() + 1.0).max(opts.n_min as f64)
    };
    if n > opts.n_max as f64 {
        return Err(Error::GridCapExceeded {
            needed: n,
            cap: opts.n_max,
        });
    }
    MomentumGrid::new(lo, hi, n as usize)
}

/// Phase derivatives of the amplitude on its grid.
struct PhaseData {
    modulus: Vec<f64>,
    phase: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    support: (usize, usize),
}

fn phase_data(a: &MomentumAmplitude) -> Result<PhaseData> {
    let polar = polar_decompose(a)?;
    let h = a.grid().spacing();
    let n = polar.phase.len();
    let phi = &polar.phase;
    let d1 = (0..n)
        .map(|i| match i {
            0 => (phi[1] - phi[0]) / h,
            _ if i == n - 1 => (phi[n - 1] - phi[n - 2]) / h,
            _ => (phi[i + 1] - phi[i - 1]) / (2.0 * h),
        })
        .collect();
    let d2 = (0..n)
        .map(|i| {
            let j = i.clamp(1, n.saturating_sub(2).max(1));
            if n < 3 {
                0.0
            } else {
                (phi[j + 1] - 2.0 * phi[j] + phi[j - 1]) / (h * h)
            }
        })
        .collect();
    let peak = polar.modulus.iter().copied().fold(0.0, f64::max);
    let support = if peak == 0.0 {
        (0, n - 1)
    } else {
        let floor = peak * crate::packets::EDGE_TOL.sqrt();
        let first = polar.modulus.iter().position(|&r| r >= floor).unwrap_or(0);
        let last = polar
            .modulus
            .iter()
            .rposition(|&r| r >= floor)
            .unwrap_or(n - 1);
        (first, last)
    };
    Ok(PhaseData {
        modulus: polar.modulus,
        phase: polar.phase,
        d1,
        d2,
        support,
    })
}

/// Linear interpolation of `values` at `p` on `grid` (clamped to the window).
fn interp(grid: &MomentumGrid, values: &[f64], p: f64) -> f64 {
    let h = grid.spacing();
    let n = values.len();
    let x = ((p - grid.p_min()) / h).clamp(0.0, (n - 1) as f64);
    let i = (x.floor() as usize).min(n - 2);
    let t = x - i as f64;
    values[i] * (1.0 - t) + values[i + 1] * t
}

fn stationary_point(a: &MomentumAmplitude, ctx: &PhaseContext, data: &PhaseData) -> Result<f64> {
    if ctx.tau == 0.0 {
        return Err(Error::ZeroTau);
    }
    let grid = a.grid();
    let nodes = grid.nodes();
    let m = ctx.constants.mass();
    let eps = ctx.direction.sign();
    let chi1 = |p: f64| interp(grid, &data.d1, p) - p * ctx.tau / m + eps * ctx.x;

    // bracket candidates; keep the one sitting on the largest modulus
    let mut best: Option<(usize, f64)> = None;
    for i in 0..nodes.len() - 1 {
        let (a0, a1) = (chi1(nodes[i]), chi1(nodes[i + 1]));
        if a0 == 0.0 || a0.signum() != a1.signum() {
            let weight = data.modulus[i].max(data.modulus[i + 1]);
            if best.is_none_or(|(_, w)| weight > w) {
                best = Some((i, weight));
            }
        }
    }
    let (i, _) = best.ok_or(Error::NoStationaryPoint)?;

    let (mut lo, mut hi) = (nodes[i], nodes[i + 1]);
    let (mut flo, fhi) = (chi1(lo), chi1(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let fm = chi1(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    // secant polish inside the final bracket
    let (mut p0, mut p1) = (lo, hi);
    for _ in 0..4 {
        let (f0, f1) = (chi1(p0), chi1(p1));
        if f1 == f0 {
            break;
        }
        let p2 = p1 - f1 * (p1 - p0) / (f1 - f0);
        if !(p2 >= nodes[i] && p2 <= nodes[i + 1]) {
            break;
        }
        p0 = p1;
        p1 = p2;
    }
    let root = if chi1(p1).abs() <= chi1(lo).abs().min(chi1(hi).abs()) {
        p1
    } else if chi1(lo).abs() < chi1(hi).abs() {
        lo
    } else {
        hi
    };
    Ok(root)
}

/// Stationary point `p0` of `chi` inside the momentum window.
pub fn find_stationary_point(a: &MomentumAmplitude, ctx: &PhaseContext) -> Result<f64> {
    check_context(a, ctx)?;
    let data = phase_data(a)?;
    stationary_point(a, ctx, &data)
}

/// Leading-order stationary-phase value of `I[f]`.
pub fn stationary_phase_value(
    a: &MomentumAmplitude,
    f: WeightKind,
    ctx: &PhaseContext,
) -> Result<StationaryPhaseResult> {
    check_context(a, ctx)?;
    let data = phase_data(a)?;
    let p0 = stationary_point(a, ctx, &data)?;
    let grid = a.grid();
    let m = ctx.constants.mass();
    let hbar = ctx.constants.hbar();
    let eps = ctx.direction.sign();

    let chi_second = interp(grid, &data.d2, p0) - ctx.tau / m;
    let width = grid.p_max() - grid.p_min();
    let max_d1 = data.d1[data.support.0..=data.support.1]
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let action = hbar + width * (max_d1 + grid.p_max() * ctx.tau.abs() / m + ctx.x.abs());
    let threshold = 1e-12 * action / (width * width);
    if !(chi_second.abs() >= threshold) {
        return Err(Error::DegenerateStationaryPoint {
            chi_second,
            threshold,
        });
    }

    let chi_at_p0 =
        interp(grid, &data.phase, p0) - p0 * p0 * ctx.tau / (2.0 * m) + eps * p0 * ctx.x;
    let modulus = interp(grid, &data.modulus, p0);
    let magnitude = f.eval(p0) * modulus * (ctx.constants.h() / chi_second.abs()).sqrt();
    let value = Complex64::from_polar(magnitude, PI / 4.0 * chi_second.signum() + chi_at_p0 / hbar);
    Ok(StationaryPhaseResult {
        p0,
        chi_at_p0,
        chi_second,
        value,
    })
}
