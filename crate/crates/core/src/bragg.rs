//! First-order Bragg scattering: the three-level momentum ladder.
//!
//! A pump/probe beam pair couples the zero-momentum ground state g_0 to
//! the excited state e_k and on to the 2k ground state g_2k. In the
//! interaction picture the amplitudes obey i da/dt = H3 a with
//!
//!   H3 = [[0,      Omega,   0      ],
//!         [Omega,  Delta_1, Omega' ],
//!         [0,      Omega',  Delta_1 - Delta_2]],
//!
//! Delta_1 = Delta + omega_k, Delta_2 = Delta + omega_k - omega_2k + nu.
//! The Bragg resonance Delta_1 - Delta_2 = 4 omega_k - nu vanishes at
//! nu = 4 omega_k. For Delta_1 >> Omega, Omega' the excited state follows
//! the ground amplitudes adiabatically and drops out, leaving an
//! effective two-level transfer g_0 <-> g_2k; the M-th order ladder
//! (a 2M-photon process) is summarized by the end-to-end coupling
//! gamma(M) rather than integrated level by level.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{integrate_to_grid, OdeOptions};

/// Parameters of the Raman ladder (all angular frequencies).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BraggLadderParams {
    /// Pump coupling strength Omega.
    pub omega_pump: f64,
    /// Probe coupling strength Omega'.
    pub omega_probe: f64,
    /// Laser detuning Delta from the atomic transition.
    pub detuning: f64,
    /// Frequency difference nu between the Bragg beams.
    pub nu: f64,
    /// Single-photon recoil frequency omega_k (> 0).
    pub omega_k: f64,
    /// Bragg order M (>= 1).
    pub order: usize,
}

impl BraggLadderParams {
    /// omega_{2k} = 4 omega_k (quadratic dispersion).
    pub fn omega_2k(&self) -> f64 {
        4.0 * self.omega_k
    }

    /// Delta_1 = Delta + omega_k.
    pub fn delta_1(&self) -> f64 {
        self.detuning + self.omega_k
    }

    /// Delta_2 = Delta + omega_k - omega_2k + nu.
    pub fn delta_2(&self) -> f64 {
        self.detuning + self.omega_k - self.omega_2k() + self.nu
    }

    /// Whether the excited state is far enough detuned for the
    /// elimination to be quantitative.
    pub fn is_adiabatic(&self) -> bool {
        self.delta_1() >= 10.0 * self.omega_pump.abs().max(self.omega_probe.abs())
    }

    fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("omega_pump", self.omega_pump),
            ("omega_probe", self.omega_probe),
            ("detuning", self.detuning),
            ("nu", self.nu),
        ] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    requirement: "must be finite",
                });
            }
        }
        if !self.omega_k.is_finite() || self.omega_k <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "omega_k",
                value: self.omega_k,
                requirement: "must be finite and > 0",
            });
        }
        if self.order == 0 {
            return Err(Error::InvalidParameter {
                name: "order",
                value: 0.0,
                requirement: "must be >= 1",
            });
        }
        Ok(())
    }
}

/// Amplitudes of the three ladder states.
#[derive(Debug, Clone, Copy)]
pub struct AmplitudeTriple {
    pub a_g0: Complex64,
    pub a_ek: Complex64,
    pub a_g2k: Complex64,
}

impl AmplitudeTriple {
    pub fn norm_sqr_sum(&self) -> f64 {
        self.a_g0.norm_sqr() + self.a_ek.norm_sqr() + self.a_g2k.norm_sqr()
    }
}

fn ladder_rhs(p: &BraggLadderParams) -> impl Fn(f64, &[Complex64], &mut [Complex64]) {
    let omega = p.omega_pump;
    let probe = p.omega_probe;
    let d1 = p.delta_1();
    let d12 = p.delta_1() - p.delta_2();
    move |_t, a, da| {
        let i = Complex64::i();
        da[0] = -i * (omega * a[1]);
        da[1] = -i * (d1 * a[1] + omega * a[0] + probe * a[2]);
        da[2] = -i * (d12 * a[2] + probe * a[1]);
    }
}

/// Integrate the full three-level dynamics from (1, 0, 0) through the
/// time grid (the first grid entry is the initial time).
pub fn first_order_dynamics(
    p: &BraggLadderParams,
    t_grid: &[f64],
) -> Result<Vec<AmplitudeTriple>> {
    p.validate()?;
    let y0 = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    ];
    let path = integrate_to_grid(&ladder_rhs(p), t_grid, &y0, &OdeOptions::default())?;
    Ok(path
        .into_iter()
        .map(|y| AmplitudeTriple {
            a_g0: y[0],
            a_ek: y[1],
            a_g2k: y[2],
        })
        .collect())
}

/// Integrate the reduced dynamics after adiabatic elimination of e_k:
///
///   i da_g0/dt  = -(Omega^2 a_g0 + Omega Omega' a_g2k) / Delta_1
///   i da_g2k/dt = (Delta_1 - Delta_2) a_g2k
///                 - (Omega Omega' a_g0 + Omega'^2 a_g2k) / Delta_1
///
/// (off resonance the Delta_1 - Delta_2 diagonal term stays on g_2k).
/// At resonance with Omega = Omega' the transfer is
/// P_2k(t) = sin^2(Omega Omega' t / Delta_1).
pub fn reduced_two_level_dynamics(
    p: &BraggLadderParams,
    t_grid: &[f64],
) -> Result<Vec<(Complex64, Complex64)>> {
    p.validate()?;
    let d1 = p.delta_1();
    if d1 == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    let omega = p.omega_pump;
    let probe = p.omega_probe;
    let d12 = p.delta_1() - p.delta_2();
    let f = move |_t: f64, a: &[Complex64], da: &mut [Complex64]| {
        let i = Complex64::i();
        da[0] = -i * (-(omega * omega * a[0] + omega * probe * a[1]) / d1);
        da[1] = -i * (d12 * a[1] - (omega * probe * a[0] + probe * probe * a[1]) / d1);
    };
    let y0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let path = integrate_to_grid(&f, t_grid, &y0, &OdeOptions::default())?;
    Ok(path.into_iter().map(|y| (y[0], y[1])).collect())
}

/// Bragg resonance detuning Delta_1 - Delta_2 = 4 omega_k - nu.
pub fn resonance_detuning(p: &BraggLadderParams) -> f64 {
    p.delta_1() - p.delta_2()
}

/// End-to-end coupling of the M-th order ladder:
///
///   gamma = | (Omega Omega' / Delta)^M / ([(M-1)!]^2 omega_2k^{M-1}) |.
///
/// Evaluated directly when every factor stays in f64 range (so M = 1
/// reduces exactly to |Omega Omega' / Delta|), in log space otherwise.
pub fn effective_gamma(p: &BraggLadderParams) -> Result<f64> {
    p.validate()?;
    if p.detuning == 0.0 {
        return Err(Error::InvalidParameter {
            name: "detuning",
            value: 0.0,
            requirement: "must be nonzero for the ladder coupling",
        });
    }
    let m = p.order;
    let base = (p.omega_pump * p.omega_probe / p.detuning).abs();
    let omega_2k = p.omega_2k();

    let direct = {
        let mut fact = 1.0f64;
        for k in 2..m {
            fact *= k as f64;
        }
        base.powi(m as i32) / (fact * fact * omega_2k.powi(m as i32 - 1))
    };
    if direct.is_finite() && direct != 0.0 || base == 0.0 {
        return Ok(direct);
    }
    // log-space fallback for extreme orders
    let mut ln_fact = 0.0f64;
    for k in 2..m {
        ln_fact += (k as f64).ln();
    }
    let ln_gamma = m as f64 * base.ln() - 2.0 * ln_fact - (m as f64 - 1.0) * omega_2k.ln();
    Ok(ln_gamma.exp())
}

/// Transfer probability |a_g2k|^2 of the full ladder after `pulse_time`,
/// for each beam-frequency difference in `nu_values`.
pub fn nu_scan(
    p: &BraggLadderParams,
    nu_values: &[f64],
    pulse_time: f64,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(nu_values.len());
    for &nu in nu_values {
        let params = BraggLadderParams { nu, ..*p };
        let path = first_order_dynamics(&params, &[0.0, pulse_time])?;
        out.push((nu, path[1].a_g2k.norm_sqr()));
    }
    Ok(out)
}
