//! Integrity suite: the module invariants bundled into one runnable set.
//!
//! Each check is deterministic and self-contained; the CLI `selftest`
//! subcommand runs them all and adds its own sweep-determinism check on
//! top.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::bragg::{first_order_dynamics, BraggLadderParams};
use crate::fock::{build_angular_ops, evolve, FockStateVector, HermitianOperator};
use crate::linalg;
use crate::ring::{build_ring_hamiltonian, RingBasis, RingCouplingModel};

/// Outcome of one named invariant check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn from_residual(name: &'static str, residual: f64, tolerance: f64) -> Self {
        Self {
            name,
            passed: residual < tolerance,
            detail: format!("max residual {residual:.3e} (tolerance {tolerance:.1e})"),
        }
    }
}

const ANGULAR_MAX_N: usize = 64;

fn commutator(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    a.dot(b) - b.dot(a)
}

/// [jx, jy] = i jz and cyclic permutations, N = 0..=64.
pub fn check_su2_algebra() -> CheckResult {
    let i = Complex64::new(0.0, 1.0);
    let mut worst = 0.0f64;
    for n in 0..=ANGULAR_MAX_N {
        let ops = build_angular_ops(n);
        worst = worst
            .max(linalg::max_abs(&(commutator(&ops.jx, &ops.jy) - &ops.jz * i)))
            .max(linalg::max_abs(&(commutator(&ops.jy, &ops.jz) - &ops.jx * i)))
            .max(linalg::max_abs(&(commutator(&ops.jz, &ops.jx) - &ops.jy * i)));
    }
    CheckResult::from_residual("su2_algebra", worst, 1e-12)
}

/// jx^2 + jy^2 + jz^2 = (N/2)(N/2 + 1) I, N = 0..=64.
pub fn check_casimir() -> CheckResult {
    let mut worst = 0.0f64;
    for n in 0..=ANGULAR_MAX_N {
        let ops = build_angular_ops(n);
        let c = ops.jx.dot(&ops.jx) + ops.jy.dot(&ops.jy) + ops.jz.dot(&ops.jz);
        let j = n as f64 / 2.0;
        let expected: Array2<Complex64> =
            Array2::eye(n + 1) * Complex64::new(j * (j + 1.0), 0.0);
        worst = worst.max(linalg::max_abs(&(&c - &expected)));
    }
    CheckResult::from_residual("casimir", worst, 1e-10)
}

fn deterministic_state(dim: usize, seed: u64) -> Array1<Complex64> {
    let mut next = linalg::lcg_stream(seed);
    let mut amps = Array1::<Complex64>::zeros(dim);
    for a in amps.iter_mut() {
        *a = Complex64::new(next(), next());
    }
    let nrm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    amps.mapv_inplace(|z| z / nrm);
    amps
}

/// Norm preservation and forward/backward reversibility of the spectral
/// propagator on a deterministic dense Hermitian operator.
pub fn check_unitarity() -> CheckResult {
    let dim = 25;
    let h = HermitianOperator::new(linalg::random_hermitian(dim, 2024)).expect("hermitian");
    let state = FockStateVector::new(dim - 1, deterministic_state(dim, 77)).expect("state");
    let mut norm_dev = 0.0f64;
    let mut round_trip = 0.0f64;
    for &t in &[0.7, -1.3, 5.0, 23.0] {
        let fwd = match evolve(&state, &h, t) {
            Ok(s) => s,
            Err(e) => {
                return CheckResult {
                    name: "unitarity",
                    passed: false,
                    detail: format!("evolution failed: {e}"),
                }
            }
        };
        norm_dev = norm_dev.max((fwd.norm() - 1.0).abs());
        let back = evolve(&fwd, &h, -t).expect("backward evolution");
        round_trip = round_trip.max(back.max_component_distance(&state));
    }
    CheckResult {
        name: "unitarity",
        passed: norm_dev < 1e-10 && round_trip < 1e-9,
        detail: format!(
            "norm deviation {norm_dev:.3e} (tolerance 1e-10), round trip {round_trip:.3e} (tolerance 1e-9)"
        ),
    }
}

/// <H> before and after evolution, relative to the operator scale.
pub fn check_energy_conservation() -> CheckResult {
    let dim = 25;
    let h = HermitianOperator::new(linalg::random_hermitian(dim, 4096)).expect("hermitian");
    let state = FockStateVector::new(dim - 1, deterministic_state(dim, 33)).expect("state");
    let scale = linalg::max_abs(h.matrix());
    let before = h.expectation(&state);
    let mut worst = 0.0f64;
    for &t in &[0.9, 7.7, -4.2] {
        let after = h.expectation(&evolve(&state, &h, t).expect("evolution"));
        worst = worst.max((after - before).abs() / scale);
    }
    CheckResult::from_residual("energy_conservation", worst, 1e-9)
}

/// Total atom number across trap and ring modes is conserved: the
/// Hamiltonian commutes with the number operator and its expectation is
/// static under evolution.
pub fn check_number_conservation() -> CheckResult {
    let model = RingCouplingModel {
        n_particles: 2,
        ..RingCouplingModel::symmetric(0.08, 1.0, 0.9)
    };
    let basis = RingBasis::new(model.n_particles, model.ring_cutoff);
    let h = match build_ring_hamiltonian(&model, &basis) {
        Ok(h) => h,
        Err(e) => {
            return CheckResult {
                name: "number_conservation",
                passed: false,
                detail: format!("hamiltonian build failed: {e}"),
            }
        }
    };
    let mut num = Array2::<Complex64>::zeros((basis.dim(), basis.dim()));
    for (i, s) in basis.states().iter().enumerate() {
        num[[i, i]] = Complex64::new(s.iter().sum::<usize>() as f64, 0.0);
    }
    let comm_residual = linalg::max_abs(&(num.dot(h.matrix()) - h.matrix().dot(&num)));

    let eig = h.eigendecompose().expect("eigendecomposition");
    let psi0 = deterministic_state(basis.dim(), 5150);
    let expect_n = |psi: &Array1<Complex64>| -> f64 {
        basis
            .states()
            .iter()
            .zip(psi.iter())
            .map(|(s, a)| s.iter().sum::<usize>() as f64 * a.norm_sqr())
            .sum()
    };
    let n0 = expect_n(&psi0);
    let mut drift = 0.0f64;
    for &t in &[3.0, 17.0, 111.0] {
        let psi = eig.propagate(&psi0, t);
        drift = drift.max((expect_n(&psi) - n0).abs());
    }
    CheckResult {
        name: "number_conservation",
        passed: comm_residual < 1e-12 && drift < 1e-10,
        detail: format!(
            "[N, H] residual {comm_residual:.3e} (tolerance 1e-12), <N> drift {drift:.3e} (tolerance 1e-10)"
        ),
    }
}

/// Norm conservation of the adaptive three-level integrator over ten
/// two-photon Rabi periods.
pub fn check_ode_norm_conservation() -> CheckResult {
    let omega_k = 1.0;
    let p = BraggLadderParams {
        omega_pump: 1.0,
        omega_probe: 1.0,
        detuning: 5.0 - omega_k,
        nu: 4.0 * omega_k,
        omega_k,
        order: 1,
    };
    let end = 10.0 * PI * p.delta_1();
    let grid: Vec<f64> = (0..50).map(|k| end * k as f64 / 49.0).collect();
    let path = match first_order_dynamics(&p, &grid) {
        Ok(p) => p,
        Err(e) => {
            return CheckResult {
                name: "ode_norm_conservation",
                passed: false,
                detail: format!("integration failed: {e}"),
            }
        }
    };
    let worst = path
        .iter()
        .map(|a| (a.norm_sqr_sum() - 1.0).abs())
        .fold(0.0f64, f64::max);
    CheckResult::from_residual("ode_norm_conservation", worst, 1e-9)
}

/// Run every library-side invariant check.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        check_su2_algebra(),
        check_casimir(),
        check_unitarity(),
        check_energy_conservation(),
        check_number_conservation(),
        check_ode_norm_conservation(),
    ]
}
