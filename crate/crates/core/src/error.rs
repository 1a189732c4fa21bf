//! Error type shared across the simulator modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A state vector and an operator (or two operators) have
    /// incompatible dimensions.
    #[error("dimension mismatch: state has {state_dim} amplitudes, operator is {op_dim}x{op_dim}")]
    DimensionMismatch { state_dim: usize, op_dim: usize },

    /// A matrix that must be Hermitian is not, within tolerance.
    #[error("matrix is not Hermitian: max |H - H^dag| entry = {residual:.3e} (tolerance {tolerance:.1e})")]
    NotHermitian { residual: f64, tolerance: f64 },

    /// A state whose amplitudes must be normalized is not.
    #[error("state is not normalized: |norm - 1| = {deviation:.3e} (tolerance {tolerance:.1e})")]
    NotNormalized { deviation: f64, tolerance: f64 },

    /// Amplitude vector length does not match the particle number.
    #[error("amplitude vector has length {len}, expected {expected} for {atoms} atoms")]
    BadStateLength { len: usize, expected: usize, atoms: usize },

    /// Twin-Fock preparation needs an even atom number.
    #[error("twin-Fock state requires an even atom number >= 2, got {0}")]
    OddAtomNumber(usize),

    /// A parameter that must be finite (or positive) is not.
    #[error("invalid parameter {name}: {value} ({requirement})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// Collapse-time estimate is undefined without a dephasing scale.
    #[error("no dephasing scale: collapse time needs kappa > 0 and delta_n > 0 (kappa = {kappa}, delta_n = {delta_n})")]
    NoDephasingScale { kappa: f64, delta_n: f64 },

    /// The scanned time grid is too short for collapse/revival detection.
    #[error("tau grid too short: covers up to {covered:.6}, need at least {required:.6} (= 1.2 pi / kappa)")]
    GridTooShort { covered: f64, required: f64 },

    /// Ring-mode truncation too small for the coupling to act.
    #[error("ring cutoff must be >= 1, got {0}")]
    CutoffTooSmall(usize),

    /// Population-oscillation fit did not resolve a frequency.
    #[error("oscillation fit failed: {peaks} peak(s) resolved over duration {duration} (epsilon = {epsilon:.3}); extend the duration or reduce epsilon")]
    FitFailed {
        peaks: usize,
        duration: f64,
        epsilon: f64,
    },

    /// Adiabatic elimination of the excited state is invalid at zero detuning.
    #[error("adiabatic elimination invalid: delta_1 = 0")]
    ZeroDetuning,

    /// Closed-form coefficients disagree with the evolution oracle.
    #[error("coefficient formula mismatch: {0}")]
    CoefficientMismatch(String),

    /// Eigensolver failed to converge (should not happen for Hermitian input).
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:.3e})")]
    EigenNoConvergence { sweeps: usize, residual: f64 },

    /// An expectation value that must be real acquired an imaginary part.
    #[error("expectation value not real: |Im| = {residual:.3e} exceeds {tolerance:.1e}")]
    NotReal { residual: f64, tolerance: f64 },

    /// The adaptive integrator hit its step budget.
    #[error("ODE integrator exceeded {max_steps} steps at t = {t} (target {target})")]
    StepLimit { max_steps: usize, t: f64, target: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
