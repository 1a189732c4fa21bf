//! Dense complex-Hermitian eigendecomposition.
//!
//! A cyclic Jacobi solver: adequate for the matrix sizes this simulator
//! produces (a few thousand at most), quadratically convergent, and
//! dependency-free. Eigenvalues come back sorted ascending with the
//! matching unitary of column eigenvectors.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigendecomposition H = V diag(values) V^dag of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigh {
    /// Real eigenvalues, ascending.
    pub values: Array1<f64>,
    /// Unitary matrix whose k-th column is the eigenvector of `values[k]`.
    pub vectors: Array2<Complex64>,
}

/// Max-abs entry of M - M^dag.
pub fn hermiticity_residual(m: &Array2<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let r = (m[[i, j]] - m[[j, i]].conj()).norm();
            if r > worst {
                worst = r;
            }
        }
    }
    worst
}

/// Largest |entry| of a matrix.
pub fn max_abs(m: &Array2<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn off_diagonal_norm(m: &Array2<Complex64>) -> f64 {
    let n = m.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += m[[i, j]].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

const MAX_SWEEPS: usize = 60;

/// Diagonalize a Hermitian matrix by cyclic Jacobi rotations.
///
/// The input is assumed Hermitian; callers that cannot guarantee this
/// should check [`hermiticity_residual`] first.
pub fn eigh(h: &Array2<Complex64>) -> Result<Eigh> {
    let n = h.nrows();
    assert_eq!(n, h.ncols(), "eigh requires a square matrix");

    if n == 0 {
        return Ok(Eigh {
            values: Array1::zeros(0),
            vectors: Array2::zeros((0, 0)),
        });
    }

    let mut w = h.clone();
    let mut v: Array2<Complex64> = Array2::eye(n);
    let scale = max_abs(h).max(f64::MIN_POSITIVE);
    // Quadratic convergence makes the last sweep overshoot machine
    // precision; n * eps * scale leaves no stray structure behind.
    let target = (n as f64) * f64::EPSILON * scale;

    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(&w) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let hpq = w[[p, q]];
                let habs = hpq.norm();
                if habs <= f64::EPSILON * scale * 1e-3 {
                    continue;
                }
                let phase = hpq / habs; // e^{i alpha}
                let a = w[[p, p]].re;
                let b = w[[q, q]].re;
                let tau = (b - a) / (2.0 * habs);
                // tan(theta) with |theta| <= pi/4 for stability.
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_phase = phase * s; // s e^{i alpha}
                let s_phase_conj = s_phase.conj();

                // Rows/columns p and q of the working matrix.
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let wkp = w[[k, p]];
                    let wkq = w[[k, q]];
                    let new_kp = wkp * c - wkq * s_phase_conj;
                    let new_kq = wkp * s_phase + wkq * c;
                    w[[k, p]] = new_kp;
                    w[[p, k]] = new_kp.conj();
                    w[[k, q]] = new_kq;
                    w[[q, k]] = new_kq.conj();
                }
                let new_pp = a * c * c + b * s * s - 2.0 * s * c * habs;
                let new_qq = a * s * s + b * c * c + 2.0 * s * c * habs;
                w[[p, p]] = Complex64::new(new_pp, 0.0);
                w[[q, q]] = Complex64::new(new_qq, 0.0);
                w[[p, q]] = Complex64::new(0.0, 0.0);
                w[[q, p]] = Complex64::new(0.0, 0.0);

                // Accumulate the rotation into the eigenvector matrix.
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = vkp * c - vkq * s_phase_conj;
                    v[[k, q]] = vkp * s_phase + vkq * c;
                }
            }
        }
    }

    let residual = off_diagonal_norm(&w);
    if residual > target * 10.0 {
        return Err(Error::EigenNoConvergence {
            sweeps: MAX_SWEEPS,
            residual,
        });
    }

    // Sort eigenpairs ascending.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[[i, i]].re.partial_cmp(&w[[j, j]].re).unwrap());
    let values = Array1::from_iter(order.iter().map(|&i| w[[i, i]].re));
    let mut vectors = Array2::zeros((n, n));
    for (col, &i) in order.iter().enumerate() {
        for k in 0..n {
            vectors[[k, col]] = v[[k, i]];
        }
    }

    Ok(Eigh { values, vectors })
}

impl Eigh {
    /// Apply exp(-i H t) to a vector using the stored decomposition.
    pub fn propagate(&self, state: &Array1<Complex64>, t: f64) -> Array1<Complex64> {
        let coeffs: Array1<Complex64> = self
            .vectors
            .t()
            .map(|z| z.conj())
            .dot(state);
        let phased = Array1::from_iter(
            coeffs
                .iter()
                .zip(self.values.iter())
                .map(|(&ck, &ek)| ck * Complex64::from_polar(1.0, -ek * t)),
        );
        self.vectors.dot(&phased)
    }
}

/// Deterministic value stream in [-0.5, 0.5); keeps checks reproducible
/// without an RNG dependency.
pub fn lcg_stream(seed: u64) -> impl FnMut() -> f64 {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
    move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        // top 53 bits -> [0, 1)
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }
}

/// Dense Hermitian matrix with deterministic pseudo-random entries.
pub fn random_hermitian(n: usize, seed: u64) -> Array2<Complex64> {
    let mut next = lcg_stream(seed);
    let mut h = Array2::zeros((n, n));
    for i in 0..n {
        h[[i, i]] = Complex64::new(next(), 0.0);
        for j in (i + 1)..n {
            let z = Complex64::new(next(), next());
            h[[i, j]] = z;
            h[[j, i]] = z.conj();
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstructs_the_input() {
        for &n in &[1usize, 2, 3, 8, 25] {
            let h = random_hermitian(n, 42 + n as u64);
            let eig = eigh(&h).unwrap();
            // V diag V^dag
            let mut rebuilt = Array2::<Complex64>::zeros((n, n));
            for k in 0..n {
                let lam = eig.values[k];
                for i in 0..n {
                    for j in 0..n {
                        rebuilt[[i, j]] +=
                            eig.vectors[[i, k]] * eig.vectors[[j, k]].conj() * lam;
                    }
                }
            }
            let err = max_abs(&(&rebuilt - &h));
            assert!(err < 1e-12 * (1.0 + max_abs(&h)), "n={n}: err={err:.3e}");
        }
    }

    #[test]
    fn eigenvectors_are_unitary() {
        let h = random_hermitian(17, 7);
        let eig = eigh(&h).unwrap();
        let vdag = eig.vectors.t().map(|z| z.conj());
        let prod = vdag.dot(&eig.vectors);
        let eye: Array2<Complex64> = Array2::eye(17);
        assert!(max_abs(&(&prod - &eye)) < 1e-13);
    }

    #[test]
    fn eigenvalues_sorted_and_real_for_diagonal_input() {
        let mut h = Array2::<Complex64>::zeros((3, 3));
        h[[0, 0]] = Complex64::new(3.0, 0.0);
        h[[1, 1]] = Complex64::new(-1.0, 0.0);
        h[[2, 2]] = Complex64::new(2.0, 0.0);
        let eig = eigh(&h).unwrap();
        assert_eq!(eig.values.to_vec(), vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn propagate_matches_scalar_phase() {
        // 1x1: exp(-i e t)
        let mut h = Array2::<Complex64>::zeros((1, 1));
        h[[0, 0]] = Complex64::new(0.7, 0.0);
        let eig = eigh(&h).unwrap();
        let psi = Array1::from_elem(1, Complex64::new(1.0, 0.0));
        let out = eig.propagate(&psi, 2.0);
        let expect = Complex64::from_polar(1.0, -1.4);
        assert!((out[0] - expect).norm() < 1e-15);
    }

    #[test]
    fn hermiticity_residual_flags_asymmetry() {
        let mut m = Array2::<Complex64>::zeros((2, 2));
        m[[0, 1]] = Complex64::new(1.0, 0.0);
        m[[1, 0]] = Complex64::new(0.5, 0.0);
        assert!((hermiticity_residual(&m) - 0.5).abs() < 1e-15);
    }
}
