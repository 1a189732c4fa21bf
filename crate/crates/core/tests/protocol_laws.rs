//! Grid-level checks of the measurement-protocol laws against the exact
//! simulation.

use ojj_core::protocol::{
    analytic_delta_n, delta_n_law, exact_delta_n_oracle, phase_signal_slope, run_protocol,
    PulseSchedule,
};
use std::f64::consts::PI;

fn phi_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| PI * i as f64 / (points - 1) as f64)
        .collect()
}

#[test]
fn delta_n_matches_rotation_law_across_n_and_phi() {
    for n in (2..=40usize).step_by(2) {
        for &phi in &phi_grid(50) {
            let schedule = PulseSchedule::single_pulse(1.0, PI, 0.0, phi).unwrap();
            let res = run_protocol(n, &schedule).unwrap();
            let law = delta_n_law(n, phi);
            assert!(
                (res.delta_n_simulated - law).abs() < 1e-8,
                "N={n}, phi={phi}: sim {} vs law {law}",
                res.delta_n_simulated
            );
        }
    }
}

#[test]
fn large_n_form_converges_at_rate_one_over_n() {
    for n in (2..=40usize).step_by(2) {
        for &phi in &phi_grid(50) {
            if phi.sin().abs() <= 0.1 {
                continue;
            }
            let exact = exact_delta_n_oracle(n, phi).unwrap();
            let paper = analytic_delta_n(n, phi);
            let rel = (paper - exact).abs() / exact;
            assert!(
                rel <= 1.0 / n as f64,
                "N={n}, phi={phi}: relative gap {rel} exceeds 1/N"
            );
        }
    }
}

#[test]
fn signal_slope_grows_linearly_in_n() {
    let h = 1e-4;
    let mut slopes = Vec::new();
    for &n in &[16usize, 32] {
        let slope = phase_signal_slope(n, h).unwrap();
        let law = (n as f64 * (n as f64 + 2.0) / 8.0).sqrt();
        assert!(
            (slope - law).abs() < 1e-6,
            "N={n}: slope {slope} vs law {law}"
        );
        slopes.push(slope);
    }
    let expected_ratio = (32.0f64 * 34.0).sqrt() / (16.0f64 * 18.0).sqrt();
    assert!(
        (slopes[1] / slopes[0] - expected_ratio).abs() < 1e-6,
        "slope ratio {} vs {expected_ratio}",
        slopes[1] / slopes[0]
    );
}

#[test]
fn negative_phase_branch_mirrors_positive() {
    // delta_n is even in phi; this is what makes the odd-extension slope
    // estimator exact.
    for &phi in &[0.05, 0.3, 1.1] {
        let plus = run_protocol(
            12,
            &PulseSchedule::single_pulse(1.0, PI, 0.0, phi).unwrap(),
        )
        .unwrap();
        let minus = run_protocol(
            12,
            &PulseSchedule::single_pulse(-1.0, PI, 0.0, phi).unwrap(),
        )
        .unwrap();
        assert!((plus.delta_n_simulated - minus.delta_n_simulated).abs() < 1e-10);
        assert!((plus.phi + minus.phi).abs() < 1e-15);
    }
}
