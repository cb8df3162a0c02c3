//! Momentum-space states with a definite direction of motion.
//!
//! A state moving towards the detector from the left is supported on `p > 0`,
//! one arriving from the right on `p < 0`. Both are stored on a grid of
//! positive momenta `p`, with values meaning `<eps p|psi>` where `eps` is the
//! [`Direction`] sign.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::quad::{trap_weight, trapezoid};

/// Maximum tolerated probability on the wrong-sign momentum half-line.
pub const TAIL_TOL: f64 = 1e-8;
/// Tolerance on the discrete norm of a normalized amplitude.
pub const NORM_TOL: f64 = 1e-6;
/// Edge density, relative to the peak, below which the grid ends count as decayed.
pub const EDGE_TOL: f64 = 1e-12;
/// Default (and minimum) number of momentum nodes.
pub const DEFAULT_GRID_NODES: usize = 4096;
/// Half-width of the default momentum window in units of the spread.
pub const WINDOW_SIGMAS: f64 = 8.0;

/// Amplitudes whose norm is already within this of one are left untouched by
/// normalization, which makes normalization idempotent bit for bit.
const RENORM_SKIP: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    hbar: f64,
    mass: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::invalid(
                "hbar",
                format!("must be finite and > 0, got {hbar}"),
            ));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::invalid(
                "mass",
                format!("must be finite and > 0, got {mass}"),
            ));
        }
        Ok(Self { hbar, mass })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Planck's constant `h = 2 pi hbar`.
    pub fn h(&self) -> f64 {
        2.0 * PI * self.hbar
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
        }
    }
}

/// Direction of motion towards the detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Support on `p > 0`: arrival from the left.
    Positive,
    /// Support on `p < 0`: arrival from the right.
    Negative,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Positive => 1.0,
            Direction::Negative => -1.0,
        }
    }

    pub fn from_sign(sign: i64) -> Option<Self> {
        match sign {
            1 => Some(Direction::Positive),
            -1 => Some(Direction::Negative),
            _ => None,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Direction::Positive => Direction::Negative,
            Direction::Negative => Direction::Positive,
        }
    }
}

/// Minimum-uncertainty Gaussian `weight * [2 pi spread^2]^(-1/4)
/// exp(-((p - center)/(2 spread))^2 - i p origin / hbar)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianComponent {
    pub weight: f64,
    pub center: f64,
    pub spread: f64,
    pub origin: f64,
}

impl GaussianComponent {
    pub fn new(weight: f64, center: f64, spread: f64, origin: f64) -> Result<Self> {
        let c = Self {
            weight,
            center,
            spread,
            origin,
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        if !self.weight.is_finite() {
            return Err(Error::invalid("weight", "must be finite"));
        }
        if !(self.center.is_finite() && self.center > 0.0) {
            return Err(Error::invalid(
                "center",
                format!("must be > 0, got {}", self.center),
            ));
        }
        if !(self.spread.is_finite() && self.spread > 0.0) {
            return Err(Error::invalid(
                "spread",
                format!("must be > 0, got {}", self.spread),
            ));
        }
        if !self.origin.is_finite() {
            return Err(Error::invalid("origin", "must be finite"));
        }
        Ok(())
    }

    /// Envelope value (no phase) at momentum `p`.
    fn envelope(&self, p: f64) -> f64 {
        let z = (p - self.center) / (2.0 * self.spread);
        self.weight * (2.0 * PI * self.spread * self.spread).powf(-0.25) * (-z * z).exp()
    }

    /// Probability this component alone puts on `p < 0`.
    fn wrong_sign_weight(&self) -> f64 {
        0.5 * erfc(self.center / (std::f64::consts::SQRT_2 * self.spread))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavePacketSpec {
    components: Vec<GaussianComponent>,
    direction: Direction,
}

impl WavePacketSpec {
    pub fn new(components: Vec<GaussianComponent>, direction: Direction) -> Result<Self> {
        Self::with_tail_tol(components, direction, TAIL_TOL)
    }

    pub fn with_tail_tol(
        components: Vec<GaussianComponent>,
        direction: Direction,
        tail_tol: f64,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid(
                "components",
                "at least one component is required",
            ));
        }
        for c in &components {
            c.validate()?;
        }
        let weight = wrong_sign_tail_weight(&components);
        if !(weight < tail_tol) {
            return Err(Error::WrongSignTail {
                weight,
                tol: tail_tol,
            });
        }
        Ok(Self {
            components,
            direction,
        })
    }

    /// Single Gaussian moving in the positive direction.
    pub fn single(center: f64, spread: f64, origin: f64) -> Result<Self> {
        Self::new(
            vec![GaussianComponent::new(1.0, center, spread, origin)?],
            Direction::Positive,
        )
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Parity image: origins negated and the direction of motion reversed.
    pub fn mirrored(&self) -> Self {
        Self {
            components: self
                .components
                .iter()
                .map(|c| GaussianComponent {
                    origin: -c.origin,
                    ..*c
                })
                .collect(),
            direction: self.direction.flipped(),
        }
    }

    /// Momentum window holding every component to `WINDOW_SIGMAS` spreads.
    pub fn default_window(&self) -> (f64, f64) {
        let min_center = self
            .components
            .iter()
            .map(|c| c.center)
            .fold(f64::INFINITY, f64::min);
        let lo = self
            .components
            .iter()
            .map(|c| c.center - WINDOW_SIGMAS * c.spread)
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .components
            .iter()
            .map(|c| c.center + WINDOW_SIGMAS * c.spread)
            .fold(f64::NEG_INFINITY, f64::max);
        (lo.max(1e-6 * min_center), hi)
    }

    pub fn default_grid(&self) -> Result<MomentumGrid> {
        let (lo, hi) = self.default_window();
        MomentumGrid::new(lo, hi, DEFAULT_GRID_NODES)
    }

    /// Largest initial position spread `hbar / (2 spread)` over the components.
    pub(crate) fn max_position_spread(&self, hbar: f64) -> f64 {
        self.components
            .iter()
            .map(|c| hbar / (2.0 * c.spread))
            .fold(0.0, f64::max)
    }

    /// Largest `|origin|` over the components.
    pub(crate) fn max_abs_origin(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.origin.abs())
            .fold(0.0, f64::max)
    }
}

/// Uniform grid of positive momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    p_min: f64,
    p_max: f64,
    spacing: f64,
    nodes: Vec<f64>,
}

impl MomentumGrid {
    pub fn new(p_min: f64, p_max: f64, n: usize) -> Result<Self> {
        if !(p_min.is_finite() && p_max.is_finite() && p_min > 0.0 && p_min < p_max) {
            return Err(Error::invalid(
                "grid",
                format!("need 0 < p_min < p_max, got [{p_min}, {p_max}]"),
            ));
        }
        if n < 2 {
            return Err(Error::invalid(
                "grid",
                format!("need at least 2 nodes, got {n}"),
            ));
        }
        let spacing = (p_max - p_min) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| p_min + i as f64 * spacing).collect();
        nodes[n - 1] = p_max;
        Ok(Self {
            p_min,
            p_max,
            spacing,
            nodes,
        })
    }

    pub fn p_min(&self) -> f64 {
        self.p_min
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Trapezoid weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        trap_weight(i, self.nodes.len(), self.spacing)
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        trapezoid(values, self.spacing)
    }

    /// Grid refined by an integer factor over the same window.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.p_min, self.p_max, (self.len() - 1) * factor.max(1) + 1)
    }
}

/// Sampled momentum amplitude `<eps p|psi>` on a positive-momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumAmplitude {
    grid: MomentumGrid,
    values: Vec<Complex64>,
    direction: Direction,
    constants: PhysicalConstants,
    reach: f64,
}

impl MomentumAmplitude {
    pub fn new(
        grid: MomentumGrid,
        values: Vec<Complex64>,
        direction: Direction,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(
                "values",
                format!("expected {} samples, got {}", grid.len(), values.len()),
            ));
        }
        if values
            .iter()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::invalid("values", "non-finite sample"));
        }
        let reach = measure_reach(&values, grid.spacing, constants.hbar);
        Ok(Self {
            grid,
            values,
            direction,
            constants,
            reach,
        })
    }

    pub fn zeros(grid: MomentumGrid, direction: Direction, constants: PhysicalConstants) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self {
            grid,
            values,
            direction,
            constants,
            reach: 0.0,
        }
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn constants(&self) -> PhysicalConstants {
        self.constants
    }

    /// `hbar * max|dpsi/dp| / max|psi|` from adjacent-node differences: a
    /// bound on the position-space extent the samples have to resolve. Unlike
    /// the derivative of the phase it stays finite near zeros of `psi`.
    pub fn position_reach(&self) -> f64 {
        self.reach
    }

    /// Trapezoid norm `sum |psi|^2 dp`.
    pub fn norm(&self) -> f64 {
        let dens: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        self.grid.integrate(&dens)
    }

    /// Rescaled to unit trapezoid norm.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if !(norm > f64::MIN_POSITIVE * 1e10) || !norm.is_finite() {
            return Err(Error::NormUnderflow { norm });
        }
        if (norm - 1.0).abs() <= RENORM_SKIP {
            return Ok(self.clone());
        }
        let scale = norm.sqrt().recip();
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= scale);
        Ok(out)
    }

    /// `max(|psi(p_min)|^2, |psi(p_max)|^2) / max |psi|^2`, zero for a zero amplitude.
    pub fn edge_ratio(&self) -> f64 {
        let peak = self.values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let first = self.values[0].norm_sqr();
        let last = self.values[self.values.len() - 1].norm_sqr();
        first.max(last) / peak
    }

    pub fn satisfies_edge_decay(&self, edge_tol: f64) -> bool {
        self.edge_ratio() <= edge_tol
    }

    /// Amplitude with the same grid, direction and constants but new samples.
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        Self::new(self.grid.clone(), values, self.direction, self.constants)
    }

    /// Free evolution by `tau`: `psi(p) -> psi(p) exp(-i p^2 tau / (2 m hbar))`.
    pub fn evolved(&self, tau: f64) -> Self {
        let c = tau / (2.0 * self.constants.mass * self.constants.hbar);
        let values = self
            .grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&p, &v)| v * Complex64::from_polar(1.0, -c * p * p))
            .collect();
        Self::new(self.grid.clone(), values, self.direction, self.constants)
            .expect("evolution preserves shape and finiteness")
    }

    /// Replace `hbar` by `scale * hbar` in every oscillatory factor while
    /// keeping the modulus `|psi(p)|` and the phase function `phi(p)` fixed.
    pub fn with_hbar_scale(&self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::invalid(
                "hbar_scale",
                format!("must be > 0, got {scale}"),
            ));
        }
        let polar = polar_decompose(self)?;
        let constants = PhysicalConstants::new(scale * self.constants.hbar, self.constants.mass)?;
        let hbar = constants.hbar;
        let values = polar
            .modulus
            .iter()
            .zip(&polar.phase)
            .map(|(&r, &phi)| Complex64::from_polar(r, phi / hbar))
            .collect();
        Self::new(self.grid.clone(), values, self.direction, constants)
    }
}

fn measure_reach(values: &[Complex64], spacing: f64, hbar: f64) -> f64 {
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    values
        .windows(2)
        .map(|w| (w[1] - w[0]).norm())
        .fold(0.0, f64::max)
        * hbar
        / (spacing * peak)
}

/// Sample the Gaussian superposition on `grid` and normalize.
pub fn build_amplitude(
    spec: &WavePacketSpec,
    grid: &MomentumGrid,
    constants: PhysicalConstants,
) -> Result<MomentumAmplitude> {
    let (need_min, need_max) = spec.default_window();
    let slack = 1e-12 * need_max.abs().max(1.0);
    if grid.p_min() > need_min + slack || grid.p_max() < need_max - slack {
        return Err(Error::GridCoverage {
            p_min: grid.p_min(),
            p_max: grid.p_max(),
            need_min,
            need_max,
        });
    }
    let eps = spec.direction().sign();
    let hbar = constants.hbar();
    let values = grid
        .nodes()
        .iter()
        .map(|&p| {
            spec.components()
                .iter()
                .map(|c| Complex64::from_polar(c.envelope(p), -eps * p * c.origin / hbar))
                .sum()
        })
        .collect();
    MomentumAmplitude::new(grid.clone(), values, spec.direction(), constants)?.normalized()
}

/// Weighted probability on the wrong-sign momentum half-line.
///
/// Each component contributes `weight^2 * erfc(center / (sqrt(2) spread)) / 2`;
/// cross terms between components are neglected, which is an upper-bound
/// heuristic for well-separated components.
pub fn wrong_sign_tail_weight(components: &[GaussianComponent]) -> f64 {
    let total: f64 = components.iter().map(|c| c.weight * c.weight).sum();
    if total == 0.0 {
        return 0.0;
    }
    components
        .iter()
        .map(|c| c.weight * c.weight * c.wrong_sign_weight())
        .sum::<f64>()
        / total
}

/// `psi(p) = modulus(p) * exp(i phase(p) / hbar)` with a continuous phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarForm {
    pub modulus: Vec<f64>,
    /// Phase in action units, unwrapped along the grid.
    pub phase: Vec<f64>,
}

pub fn polar_decompose(a: &MomentumAmplitude) -> Result<PolarForm> {
    let values = a.values();
    let hbar = a.constants().hbar();
    let modulus: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    let peak = modulus.iter().copied().fold(0.0, f64::max);
    let n = values.len();
    if peak == 0.0 {
        return Ok(PolarForm {
            modulus,
            phase: vec![0.0; n],
        });
    }

    let significant = |r: f64| r * r >= EDGE_TOL * peak * peak;
    let first = modulus.iter().position(|&r| significant(r)).unwrap_or(0);
    let last = modulus
        .iter()
        .rposition(|&r| significant(r))
        .unwrap_or(n - 1);
    if let Some(i) = (first..=last).find(|&i| modulus[i] < f64::MIN_POSITIVE) {
        return Err(Error::PhaseUndefined {
            p: a.grid().nodes()[i],
        });
    }

    // raw angles, carrying the last defined angle across exact zeros
    let mut raw = Vec::with_capacity(n);
    let mut last_angle = values[first].arg();
    for (v, &r) in values.iter().zip(&modulus) {
        if r > 0.0 {
            last_angle = v.arg();
        }
        raw.push(last_angle);
    }

    let mut phase = Vec::with_capacity(n);
    let mut acc = raw[0];
    phase.push(hbar * acc);
    for w in raw.windows(2) {
        let mut d = w[1] - w[0];
        d -= 2.0 * PI * (d / (2.0 * PI)).round();
        acc += d;
        phase.push(hbar * acc);
    }
    Ok(PolarForm { modulus, phase })
}
