use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("momentum grid [{p_min}, {p_max}] does not cover the packet window [{need_min}, {need_max}]")]
    GridCoverage {
        p_min: f64,
        p_max: f64,
        need_min: f64,
        need_max: f64,
    },

    #[error("amplitude norm {norm:e} is too small to normalize")]
    NormUnderflow { norm: f64 },

    #[error("wrong-sign momentum weight {weight:e} exceeds tolerance {tol:e}")]
    WrongSignTail { weight: f64, tol: f64 },

    #[error("phase undefined at p = {p}: modulus underflows inside the support")]
    PhaseUndefined { p: f64 },

    #[error("momentum grid under-resolves the integrand: phase step {step:.4} rad exceeds {limit:.4} rad")]
    Nyquist { step: f64, limit: f64 },

    #[error("amplitude direction does not match the phase context direction")]
    DirectionMismatch,

    #[error("grid needs {needed} nodes, above the cap of {cap}")]
    GridCapExceeded { needed: f64, cap: usize },

    #[error("no stationary point of the phase inside the momentum window")]
    NoStationaryPoint,

    #[error("stationary point requires tau != 0")]
    ZeroTau,

    #[error("degenerate stationary point: |chi''| = {chi_second:e} below {threshold:e}")]
    DegenerateStationaryPoint { chi_second: f64, threshold: f64 },

    #[error("tau window inadequate: {reason}")]
    WindowInadequate { reason: String },

    #[error("invalid tau window [{lo}, {hi}] with {n} nodes")]
    InvalidWindow { lo: f64, hi: f64, n: usize },

    #[error("small-momentum divergence guard: edge weight {edge:e} exceeds {limit:e}")]
    DivergenceGuard { edge: f64, limit: f64 },

    #[error("position grid does not cover the packet: edge density ratio {ratio:e}")]
    SupportCoverage { ratio: f64 },

    #[error("transmitted norm {norm:e} underflows (opaque barrier)")]
    OpaqueBarrier { norm: f64 },

    #[error("negative-flux condition not satisfied (alpha1/alpha2 = {ratio1}, p2/p1 = {ratio2}, margin {margin})")]
    ConditionNotSatisfied {
        ratio1: f64,
        ratio2: f64,
        margin: f64,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
