//! Fock-space representation of two trapped condensate modes.
//!
//! The fixed-N sector is spanned by |n>_1 |N-n>_2 with n = number of atoms
//! in trap 1, ordered ascending n = 0..N. On that sector the two modes map
//! onto a spin j = N/2 via the Schwinger representation,
//!
//!   jx = (c1^dag c2 + c2^dag c1)/2,
//!   jy = (c2^dag c1 - c1^dag c2)/(2i),
//!   jz = (c2^dag c2 - c1^dag c1)/2,
//!
//! which closes the right-handed algebra [jx, jy] = i jz. Time evolution is
//! exact: the dense Hamiltonian is eigendecomposed and exp(-iHt) applied
//! spectrally, so piecewise-constant schedules need no step integrator.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, Eigh};

/// Tolerance on |norm - 1| accepted when constructing a state.
pub const NORM_TOL: f64 = 1e-10;
/// Tolerance on the Hermiticity residual of operators.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Normalized amplitudes over the (N+1)-dimensional two-mode number basis.
///
/// Index n counts atoms in trap 1; trap 2 holds N - n.
#[derive(Debug, Clone)]
pub struct FockStateVector {
    total_atoms: usize,
    amplitudes: Array1<Complex64>,
}

impl FockStateVector {
    /// Build a state from raw amplitudes, validating length and norm.
    pub fn new(total_atoms: usize, amplitudes: Array1<Complex64>) -> Result<Self> {
        if amplitudes.len() != total_atoms + 1 {
            return Err(Error::BadStateLength {
                len: amplitudes.len(),
                expected: total_atoms + 1,
                atoms: total_atoms,
            });
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let deviation = (norm_sq.sqrt() - 1.0).abs();
        if deviation > NORM_TOL {
            return Err(Error::NotNormalized {
                deviation,
                tolerance: NORM_TOL,
            });
        }
        Ok(Self {
            total_atoms,
            amplitudes,
        })
    }

    /// Basis state |n>_1 |N-n>_2.
    pub fn basis_state(total_atoms: usize, n: usize) -> Result<Self> {
        assert!(n <= total_atoms, "basis index {n} exceeds N = {total_atoms}");
        let mut amps = Array1::zeros(total_atoms + 1);
        amps[n] = Complex64::new(1.0, 0.0);
        Self::new(total_atoms, amps)
    }

    pub fn total_atoms(&self) -> usize {
        self.total_atoms
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Component-wise max distance to another state.
    pub fn max_component_distance(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// The spin-j matrices for the fixed-N sector, dimension (N+1)^2 each.
#[derive(Debug, Clone)]
pub struct AngularMomentumOps {
    pub jx: Array2<Complex64>,
    pub jy: Array2<Complex64>,
    pub jz: Array2<Complex64>,
    total_atoms: usize,
}

impl AngularMomentumOps {
    pub fn total_atoms(&self) -> usize {
        self.total_atoms
    }
}

/// Parameters of the effective two-mode Hamiltonian.
///
/// All frequencies are angular (hbar = 1). `e0` is retained for
/// completeness but never enters the dynamics: at fixed N it contributes
/// only a global phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeParams {
    pub total_atoms: usize,
    /// Self-interaction strength kappa.
    pub kappa: f64,
    /// Josephson coupling strength g.
    pub g: f64,
    /// Coupling phase theta (radians).
    pub theta: f64,
    /// Single-mode energy; global phase only within a fixed-N sector.
    pub e0: f64,
}

impl TwoModeParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("kappa", self.kappa),
            ("g", self.g),
            ("theta", self.theta),
            ("e0", self.e0),
        ] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    requirement: "must be finite",
                });
            }
        }
        Ok(())
    }
}

/// A dense operator validated to be Hermitian at construction.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    matrix: Array2<Complex64>,
}

impl HermitianOperator {
    pub fn new(matrix: Array2<Complex64>) -> Result<Self> {
        assert_eq!(matrix.nrows(), matrix.ncols());
        let residual = linalg::hermiticity_residual(&matrix);
        if residual > HERMITICITY_TOL * max_scale(&matrix) {
            return Err(Error::NotHermitian {
                residual,
                tolerance: HERMITICITY_TOL,
            });
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    /// <psi| H |psi>, real part (imaginary part is roundoff for Hermitian H).
    pub fn expectation(&self, state: &FockStateVector) -> f64 {
        expectation_of(&self.matrix, state.amplitudes())
    }

    pub fn eigendecompose(&self) -> Result<Eigh> {
        linalg::eigh(&self.matrix)
    }
}

fn max_scale(m: &Array2<Complex64>) -> f64 {
    linalg::max_abs(m).max(1.0)
}

pub(crate) fn expectation_of(m: &Array2<Complex64>, amps: &Array1<Complex64>) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, ai) in amps.iter().enumerate() {
        let mut row = Complex64::new(0.0, 0.0);
        for (j, aj) in amps.iter().enumerate() {
            row += m[[i, j]] * aj;
        }
        acc += ai.conj() * row;
    }
    acc.re
}

/// Build jx, jy, jz on the fixed-N sector.
///
/// N = 0 yields 1x1 zero matrices.
pub fn build_angular_ops(total_atoms: usize) -> AngularMomentumOps {
    let n = total_atoms;
    let dim = n + 1;
    let mut jx = Array2::<Complex64>::zeros((dim, dim));
    let mut jy = Array2::<Complex64>::zeros((dim, dim));
    let mut jz = Array2::<Complex64>::zeros((dim, dim));

    for k in 0..dim {
        // jz |n> = (N/2 - n) |n>  since jz = (n2 - n1)/2.
        jz[[k, k]] = Complex64::new(n as f64 / 2.0 - k as f64, 0.0);
    }
    // c1^dag c2 |n> = sqrt((n+1)(N-n)) |n+1>
    for k in 0..n {
        let amp = (((k + 1) * (n - k)) as f64).sqrt() / 2.0;
        jx[[k + 1, k]] = Complex64::new(amp, 0.0);
        jx[[k, k + 1]] = Complex64::new(amp, 0.0);
        // jy = i (c1^dag c2 - c2^dag c1)/2 with the sign closing
        // [jx, jy] = i jz for this jz convention.
        jy[[k + 1, k]] = Complex64::new(0.0, amp);
        jy[[k, k + 1]] = Complex64::new(0.0, -amp);
    }

    AngularMomentumOps {
        jx,
        jy,
        jz,
        total_atoms: n,
    }
}

/// Effective two-mode Hamiltonian on the fixed-N sector:
///
///   H = kappa jz^2 - g (cos(theta) jx + sin(theta) jy)
///
/// The single-mode energy term and the constant sector offset are dropped
/// (global phase at fixed N). At theta = pi this reduces to
/// H = kappa jz^2 + g jx.
pub fn build_two_mode_hamiltonian(p: &TwoModeParams) -> Result<HermitianOperator> {
    p.validate()?;
    let ops = build_angular_ops(p.total_atoms);
    let jz2 = ops.jz.dot(&ops.jz);
    let cos_t = Complex64::new(p.theta.cos(), 0.0);
    let sin_t = Complex64::new(p.theta.sin(), 0.0);
    let g = Complex64::new(p.g, 0.0);
    let kappa = Complex64::new(p.kappa, 0.0);
    let h = &jz2 * kappa - (&ops.jx * cos_t + &ops.jy * sin_t) * g;
    HermitianOperator::new(h)
}

/// Exact unitary evolution exp(-i H t) |state> via eigendecomposition.
///
/// Negative t evolves backward.
pub fn evolve(state: &FockStateVector, h: &HermitianOperator, t: f64) -> Result<FockStateVector> {
    if state.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            state_dim: state.dim(),
            op_dim: h.dim(),
        });
    }
    if t == 0.0 {
        return Ok(state.clone());
    }
    let eig = h.eigendecompose()?;
    let out = eig.propagate(state.amplitudes(), t);
    FockStateVector::new(state.total_atoms(), out)
}

/// Evolve with a pre-computed eigendecomposition (hot loops over t).
pub fn evolve_with(
    state: &FockStateVector,
    eig: &Eigh,
    t: f64,
) -> Result<FockStateVector> {
    if state.dim() != eig.values.len() {
        return Err(Error::DimensionMismatch {
            state_dim: state.dim(),
            op_dim: eig.values.len(),
        });
    }
    let out = eig.propagate(state.amplitudes(), t);
    FockStateVector::new(state.total_atoms(), out)
}

/// The number-squeezed starting state |N/2>_1 |N/2>_2.
pub fn twin_fock_state(total_atoms: usize) -> Result<FockStateVector> {
    if total_atoms < 2 || total_atoms % 2 != 0 {
        return Err(Error::OddAtomNumber(total_atoms));
    }
    FockStateVector::basis_state(total_atoms, total_atoms / 2)
}

/// Mean and standard deviation of n = c1^dag c1.
///
/// Errors if the state norm deviates from 1 by more than 1e-6.
pub fn number_statistics(state: &FockStateVector) -> Result<(f64, f64)> {
    let deviation = (state.norm() - 1.0).abs();
    if deviation > 1e-6 {
        return Err(Error::NotNormalized {
            deviation,
            tolerance: 1e-6,
        });
    }
    let mut total = 0.0;
    let mut mean = 0.0;
    let mut mean_sq = 0.0;
    for (n, a) in state.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        total += p;
        mean += n as f64 * p;
        mean_sq += (n as f64) * (n as f64) * p;
    }
    // Normalizing by the summed probability keeps the variance clean when
    // the norm sits a few ulp away from 1 (spectral evolution roundoff);
    // otherwise the norm defect masquerades as number variance.
    mean /= total;
    mean_sq /= total;
    let var = (mean_sq - mean * mean).max(0.0);
    Ok((mean, var.sqrt()))
}
