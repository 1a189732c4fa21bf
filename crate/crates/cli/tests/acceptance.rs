//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see them on success).
//!
//! Criterion 4 carries a known, physics-forced failure in its collapse
//! clause; the failure message documents the mechanism. Everything else
//! passes at the stated tolerances.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use ojj_core::bragg::{
    effective_gamma, first_order_dynamics, nu_scan, reduced_two_level_dynamics, BraggLadderParams,
};
use ojj_core::fock::number_statistics;
use ojj_core::interference::{detect_collapse_revival, intensity_closed_form, intensity_trace};
use ojj_core::protocol::{
    c_coefficients, d_coefficients, phase_signal_slope, run_protocol, trap_to_pm_basis,
    CoefficientSource, PulseSchedule,
};
use ojj_core::ring::{transfer_curve, validate_adiabatic, RingCouplingModel};

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn grid(points: usize, stop: f64) -> Vec<f64> {
    (0..points)
        .map(|i| stop * i as f64 / (points - 1) as f64)
        .collect()
}

fn pulse_state(n: usize, phi: f64) -> ojj_core::fock::FockStateVector {
    run_protocol(n, &PulseSchedule::single_pulse(1.0, PI, 0.0, phi).unwrap())
        .unwrap()
        .final_state
}

fn delta_n_law(n: usize, phi: f64) -> f64 {
    (n as f64 * (n as f64 + 2.0) / 8.0).sqrt() * phi.sin().abs()
}

/// Criterion 1: simulated delta_n equals sqrt(N(N+2)/8) |sin phi| within
/// 1e-8 on a 50-point phi grid for N in {2,...,32}, and the large-N form
/// agrees within relative error 1/N wherever |sin phi| > 0.1; under 5 s.
#[test]
fn criterion_1_delta_n_law() {
    let start = Instant::now();
    let mut worst_law = 0.0f64;
    let mut worst_margin = f64::NEG_INFINITY;
    for &n in &[2usize, 4, 8, 16, 32] {
        for &phi in &grid(50, PI) {
            let schedule = PulseSchedule::single_pulse(1.0, PI, 0.0, phi).unwrap();
            let res = run_protocol(n, &schedule).unwrap();
            worst_law = worst_law.max((res.delta_n_simulated - delta_n_law(n, phi)).abs());
            if phi.sin().abs() > 0.1 {
                let rel = (res.delta_n_paper - res.delta_n_simulated).abs()
                    / res.delta_n_simulated;
                worst_margin = worst_margin.max(rel - 1.0 / n as f64);
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = worst_law < 1e-8 && worst_margin <= 0.0 && elapsed < 5.0;
    println!(
        "criterion 1: {} - max law deviation {worst_law:.3e} (tol 1e-8), \
         worst (rel gap - 1/N) {worst_margin:.3e} (must be <= 0), {elapsed:.2} s (budget 5 s)",
        status(ok)
    );
    assert!(ok);
}

/// Criterion 2: the phi = 0 signal slope equals sqrt(N(N+2)/8) within
/// 1e-6, and the N = 32 / N = 16 slope ratio equals
/// sqrt(32*34)/sqrt(16*18) within 1e-6.
#[test]
fn criterion_2_heisenberg_scaling_proxy() {
    let h = 1e-4;
    let slope16 = phase_signal_slope(16, h).unwrap();
    let slope32 = phase_signal_slope(32, h).unwrap();
    let law16 = (16.0f64 * 18.0 / 8.0).sqrt();
    let law32 = (32.0f64 * 34.0 / 8.0).sqrt();
    let dev16 = (slope16 - law16).abs();
    let dev32 = (slope32 - law32).abs();
    let ratio = slope32 / slope16;
    let ratio_expect = (32.0f64 * 34.0).sqrt() / (16.0f64 * 18.0).sqrt();
    let ratio_dev = (ratio - ratio_expect).abs();
    let ok = dev16 < 1e-6 && dev32 < 1e-6 && ratio_dev < 1e-6;
    println!(
        "criterion 2: {} - slope deviations {dev16:.3e} / {dev32:.3e} (tol 1e-6), \
         ratio deviation {ratio_dev:.3e} (tol 1e-6)",
        status(ok)
    );
    assert!(ok);
}

/// Criterion 3: coefficient formulas. C_m normalization within 1e-10 up
/// to N = 64; the twin-Fock basis transform reproduces (-1)^m C_m up to
/// one global phase within 1e-10 for N <= 20; D_n moduli match direct
/// evolution within 1e-8 for N in {4, 8, 12} (oracle fallback with a
/// recorded diagnostic also counts as a pass).
#[test]
fn criterion_3_coefficient_formulas() {
    // C_m normalization
    let mut worst_norm = 0.0f64;
    for n in (2..=64usize).step_by(2) {
        let c = c_coefficients(n).unwrap();
        let sum: f64 = c.iter().map(|x| x * x).sum();
        worst_norm = worst_norm.max((sum - 1.0).abs());
    }

    // twin-Fock transform against (-1)^m C_m
    let mut worst_transform = 0.0f64;
    for n in (2..=20usize).step_by(2) {
        let pm = trap_to_pm_basis(&ojj_core::fock::twin_fock_state(n).unwrap()).unwrap();
        let c = c_coefficients(n).unwrap();
        let (m_ref, _) = c
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        let expect_ref = if m_ref % 2 == 0 { c[m_ref] } else { -c[m_ref] };
        let phase = pm.amplitudes()[2 * m_ref] / expect_ref;
        for (m, cm) in c.iter().enumerate() {
            let expect = if m % 2 == 0 { *cm } else { -cm };
            worst_transform = worst_transform
                .max((pm.amplitudes()[2 * m] / phase - expect).norm());
        }
        for a in (1..n).step_by(2) {
            worst_transform = worst_transform.max(pm.amplitudes()[a].norm());
        }
    }

    // D_n against the direct-evolution oracle
    let mut worst_d = 0.0f64;
    let mut diagnostics = Vec::new();
    for &n in &[4usize, 8, 12] {
        for &phi in &[0.3, PI / 4.0, 1.0, 2.0, 2.8] {
            let d = d_coefficients(n, phi).unwrap();
            match d.source {
                CoefficientSource::ClosedForm {
                    max_modulus_deviation: Some(dev),
                } => worst_d = worst_d.max(dev),
                CoefficientSource::ClosedForm {
                    max_modulus_deviation: None,
                } => unreachable!("N <= 12 is always validated"),
                CoefficientSource::OracleFallback { diagnostic, .. } => {
                    diagnostics.push(diagnostic);
                }
            }
        }
    }

    let ok = worst_norm < 1e-10 && worst_transform < 1e-10 && (worst_d < 1e-8);
    println!(
        "criterion 3: {} - C_m normalization {worst_norm:.3e} (tol 1e-10), \
         transform deviation {worst_transform:.3e} (tol 1e-10), \
         D_n modulus deviation {worst_d:.3e} (tol 1e-8), {} fallback diagnostics",
        status(ok),
        diagnostics.len()
    );
    for d in &diagnostics {
        println!("criterion 3 diagnostic: {d}");
    }
    assert!(ok);
}

/// Criterion 4, parts a and b: the closed-form intensity equals the
/// direct expectation within 1e-10 on a 200-point grid (N = 8), and even-N
/// traces are antiperiodic, I(tau + pi/kappa) = -I(tau), within 1e-8;
/// under 10 s.
#[test]
fn criterion_4_interference_oracle_and_antiperiodicity() {
    let start = Instant::now();
    let kappa = 1.0;

    let state = pulse_state(8, PI / 3.0);
    let tau = grid(200, 1.2 * PI / kappa);
    let trace = intensity_trace(&state, kappa, &tau, 1.0).unwrap();
    let amps = state.amplitudes().to_vec();
    let mut worst_gap = 0.0f64;
    for (k, &t) in tau.iter().enumerate() {
        worst_gap = worst_gap
            .max((intensity_closed_form(&amps, 8, kappa, t) - trace.intensity[k]).abs());
    }

    let mut worst_anti = 0.0f64;
    for &n in &[8usize, 16] {
        let state = pulse_state(n, PI / 3.0);
        let base = grid(100, PI / kappa);
        let shifted: Vec<f64> = base.iter().map(|t| t + PI / kappa).collect();
        let i0 = intensity_trace(&state, kappa, &base, 1.0).unwrap();
        let i1 = intensity_trace(&state, kappa, &shifted, 1.0).unwrap();
        for (a, b) in i0.intensity.iter().zip(i1.intensity.iter()) {
            worst_anti = worst_anti.max((a + b).abs());
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    let ok = worst_gap < 1e-10 && worst_anti < 1e-8 && elapsed < 10.0;
    println!(
        "criterion 4 (oracle, antiperiodicity): {} - closed-form gap {worst_gap:.3e} \
         (tol 1e-10), antiperiodicity residual {worst_anti:.3e} (tol 1e-8), \
         {elapsed:.2} s (budget 10 s)",
        status(ok)
    );
    assert!(ok);
}

/// Criterion 4, collapse clause, exactly as stated: the measured collapse
/// time for N = 32, phi = pi/2 (1/e envelope threshold) within a factor
/// of 2 of pi/(2 kappa delta_n).
///
/// KNOWN FAILURE. The exact simulation shows this cannot hold:
///  - at phi = pi/2 the pulsed twin-Fock state populates only even trap
///    occupations (numerically: odd amplitudes < 3e-14 for N = 32), so
///    the fringe coherence <c1+ c2 + c2+ c1> vanishes identically --
///    there is no signal whose collapse could be timed;
///  - independently, for N = 32 the dephased fringe background sits near
///    0.42 of the envelope peak at every pulse phase, above the 1/e
///    threshold, so the stated detector never fires at this atom number
///    (it first becomes usable near N ~ 48).
/// The companion test in `crates/core/tests/interference_checks.rs`
/// demonstrates the intended inverse-proportionality at a half-peak
/// threshold where the signal exists.
#[test]
fn criterion_4_collapse_time_factor_two() {
    let kappa = 1.0;
    let schedule = PulseSchedule::single_pulse(1.0, PI, 0.0, PI / 2.0).unwrap();
    let res = run_protocol(32, &schedule).unwrap();
    let (_, dn) = number_statistics(&res.final_state).unwrap();
    let tau = grid(2000, 1.2 * PI / kappa);
    let trace = intensity_trace(&res.final_state, kappa, &tau, 1.0).unwrap();
    let report =
        detect_collapse_revival(&trace, 1.0 / std::f64::consts::E, dn).unwrap();

    let verdict = match report.t_coll_measured {
        Some(measured) => {
            let ratio = report.t_coll_estimate / measured;
            let ok = (0.5..=2.0).contains(&ratio);
            println!(
                "criterion 4 (collapse time): {} - estimate {:.4}, measured {measured:.4}, ratio {ratio:.3}",
                status(ok),
                report.t_coll_estimate
            );
            ok
        }
        None => {
            println!(
                "criterion 4 (collapse time): FAIL - no collapse measurable at N=32, phi=pi/2: \
                 the interference signal is identically zero (even-occupation parity selection; \
                 max |I| = {:.3e}), and the 1/e threshold lies below the N=32 speckle plateau",
                trace.intensity.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            );
            false
        }
    };
    assert!(
        verdict,
        "collapse clause unattainable as stated: at phi = pi/2 the pulsed state has even-only \
         occupation (parity selection), so the fringe signal vanishes identically and no \
         collapse time exists; see the doc comment and the half-peak companion test"
    );
}

/// Criterion 5: adiabatic elimination. Fitted single-particle Rabi
/// frequency within 5% of g at epsilon = 0.02; ring occupancy < 10 eps^2
/// for eps <= 0.1; doubling the ring cutoff changes populations by
/// < 1e-6; populations theta-independent within 1e-10; under 10 s.
#[test]
fn criterion_5_adiabatic_elimination() {
    let start = Instant::now();

    let model = RingCouplingModel::symmetric(0.02, 1.0, 0.0);
    let g = ojj_core::ring::effective_coupling_g(&model);
    let report = validate_adiabatic(&model, 2.5 * 2.0 * PI / g).unwrap();
    let fit_ok = report.relative_error < 0.05;

    let mut occupancy_ok = true;
    let mut worst_occupancy_ratio = 0.0f64;
    for &eps in &[0.02, 0.05, 0.1] {
        let m = RingCouplingModel::symmetric(eps, 1.0, 0.0);
        let g = ojj_core::ring::effective_coupling_g(&m);
        let r = validate_adiabatic(&m, 2.5 * 2.0 * PI / g).unwrap();
        let ratio = r.max_ring_population / (10.0 * eps * eps);
        worst_occupancy_ratio = worst_occupancy_ratio.max(ratio);
        occupancy_ok &= ratio < 1.0;
    }

    // cutoff doubling in the validation regime (single particle; two
    // covers every sector the coupling reaches)
    let t_grid = grid(400, 2.5 * 2.0 * PI / g);
    let mut cutoff_dev = 0.0f64;
    for n_particles in [1usize, 2] {
        let mut curves = Vec::new();
        for &cutoff in &[2usize, 4] {
            let m = RingCouplingModel {
                n_particles,
                ring_cutoff: cutoff,
                ..RingCouplingModel::symmetric(0.05, 1.0, 0.0)
            };
            curves.push(transfer_curve(&m, &t_grid).unwrap());
        }
        for (a, b) in curves[0].iter().zip(curves[1].iter()) {
            cutoff_dev = cutoff_dev.max((a - b).abs());
        }
    }

    let theta_grid = grid(400, 2.5 * 2.0 * PI / g);
    let p0 = transfer_curve(&RingCouplingModel::symmetric(0.02, 1.0, 0.0), &theta_grid).unwrap();
    let p1 = transfer_curve(
        &RingCouplingModel::symmetric(0.02, 1.0, PI / 3.0),
        &theta_grid,
    )
    .unwrap();
    let theta_dev = p0
        .iter()
        .zip(p1.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);

    let elapsed = start.elapsed().as_secs_f64();
    let ok = fit_ok && occupancy_ok && cutoff_dev < 1e-6 && theta_dev < 1e-10 && elapsed < 10.0;
    println!(
        "criterion 5: {} - fit error {:.4} (tol 0.05), occupancy/(10 eps^2) {:.3} (must be < 1), \
         cutoff-doubling deviation {cutoff_dev:.3e} (tol 1e-6), theta deviation {theta_dev:.3e} \
         (tol 1e-10), {elapsed:.2} s (budget 10 s)",
        status(ok),
        report.relative_error,
        worst_occupancy_ratio
    );
    assert!(ok);
}

/// Criterion 6: Bragg ladder. Reduced transfer sin^2(Omega Omega' t /
/// Delta_1) within 1e-6 at resonance with Omega = Omega'; full vs reduced
/// populations within 0.05 at Delta_1 = 20 Omega; nu-scan transfer
/// maximized at nu = 4 omega_k within one step; gamma(M=1) =
/// Omega Omega' / |Delta| exactly; under 10 s.
#[test]
fn criterion_6_bragg_ladder() {
    let start = Instant::now();
    let omega_k = 1.0;
    let params = BraggLadderParams {
        omega_pump: 1.0,
        omega_probe: 1.0,
        detuning: 20.0 - omega_k, // Delta_1 = 20 Omega
        nu: 4.0 * omega_k,
        omega_k,
        order: 1,
    };
    let d1 = params.delta_1();

    let t_grid = grid(200, 1.5 * PI * d1);
    let reduced = reduced_two_level_dynamics(&params, &t_grid).unwrap();
    let mut sin2_dev = 0.0f64;
    for (k, (_, g2k)) in reduced.iter().enumerate() {
        let expect = (t_grid[k] / d1).sin().powi(2);
        sin2_dev = sin2_dev.max((g2k.norm_sqr() - expect).abs());
    }

    let cmp_grid = grid(400, 1.2 * PI * d1);
    let full = first_order_dynamics(&params, &cmp_grid).unwrap();
    let red = reduced_two_level_dynamics(&params, &cmp_grid).unwrap();
    let mut full_red_dev = 0.0f64;
    for (f, r) in full.iter().zip(red.iter()) {
        full_red_dev = full_red_dev
            .max((f.a_g0.norm_sqr() - r.0.norm_sqr()).abs())
            .max((f.a_g2k.norm_sqr() - r.1.norm_sqr()).abs());
    }

    let t_pi = PI * d1 / 2.0;
    let nus = grid(81, 4.0).iter().map(|x| 2.0 + x).collect::<Vec<_>>();
    let scan = nu_scan(&params, &nus, t_pi).unwrap();
    let (best_nu, _) = scan
        .iter()
        .fold((f64::NAN, -1.0), |acc, &(nu, tr)| if tr > acc.1 { (nu, tr) } else { acc });
    let step = nus[1] - nus[0];
    let scan_ok = (best_nu - 4.0 * omega_k).abs() <= step + 1e-12;

    let gamma = effective_gamma(&params).unwrap();
    let gamma_exact = gamma == (params.omega_pump * params.omega_probe / params.detuning).abs();

    let elapsed = start.elapsed().as_secs_f64();
    let ok = sin2_dev < 1e-6 && full_red_dev <= 0.05 && scan_ok && gamma_exact && elapsed < 10.0;
    println!(
        "criterion 6: {} - sin^2 deviation {sin2_dev:.3e} (tol 1e-6), full-vs-reduced \
         {full_red_dev:.4} (tol 0.05), scan peak at nu = {best_nu:.3} (target 4, step {step:.3}), \
         gamma(M=1) exact: {gamma_exact}, {elapsed:.2} s (budget 10 s)",
        status(ok)
    );
    assert!(ok);
}

/// Criterion 7: the `selftest` subcommand passes every invariant check
/// (su(2) algebra, Casimir, unitarity, number conservation, ODE norm
/// conservation, sweep determinism) in under 60 s.
#[test]
fn criterion_7_integrity_suite() {
    let start = Instant::now();
    let output = Command::new(env!("CARGO_BIN_EXE_ojj"))
        .arg("selftest")
        .output()
        .expect("selftest runs");
    let elapsed = start.elapsed().as_secs_f64();
    let stdout = String::from_utf8_lossy(&output.stdout);
    let all_pass = output.status.success()
        && stdout.lines().filter(|l| l.starts_with("PASS")).count() == 7
        && !stdout.contains("FAIL");
    let ok = all_pass && elapsed < 60.0;
    println!(
        "criterion 7: {} - selftest exit {:?}, {} PASS lines, {elapsed:.2} s (budget 60 s)",
        status(ok),
        output.status.code(),
        stdout.lines().filter(|l| l.starts_with("PASS")).count()
    );
    if !ok {
        println!("--- selftest output ---\n{stdout}");
    }
    assert!(ok);
}
