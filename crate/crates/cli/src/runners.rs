//! Scenario execution: one runner per configuration kind.

use rayon::prelude::*;
use serde_json::{json, Map, Value};
use std::f64::consts::PI;

use ojj_core::fock::{build_angular_ops, build_two_mode_hamiltonian, HermitianOperator, TwoModeParams};
use ojj_core::interference::{detect_collapse_revival, intensity_closed_form, intensity_trace};
use ojj_core::linalg;
use ojj_core::protocol::{run_protocol, PulseSchedule};
use ojj_core::ring::{
    build_ring_hamiltonian, effective_coupling_g, transfer_curve, validate_adiabatic, RingBasis,
    RingCouplingModel,
};
use ojj_core::bragg::{effective_gamma, first_order_dynamics, nu_scan, resonance_detuning, BraggLadderParams};

use crate::config::{BraggConfig, InterferenceConfig, Kind, ProtocolConfig, RingConfig, SweepConfig};
use crate::svg::{PlotSpec, Series};
use crate::table::{round_sig, ResultTable};

/// Norm-drift gate applied to every run.
pub const NORM_DRIFT_TOL: f64 = 1e-10;
/// Hermiticity-residual gate (relative to the operator scale).
pub const HERMITICITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default)]
pub struct Integrity {
    pub max_norm_drift: f64,
    pub max_hermiticity_residual: f64,
    /// Scale of the largest operator that contributed a residual.
    pub hermiticity_scale: f64,
}

impl Integrity {
    fn record_norm(&mut self, norm: f64) {
        self.max_norm_drift = self.max_norm_drift.max((norm - 1.0).abs());
    }

    fn record_operator(&mut self, matrix: &ojj_core::ndarray::Array2<ojj_core::num_complex::Complex64>) {
        self.max_hermiticity_residual = self
            .max_hermiticity_residual
            .max(linalg::hermiticity_residual(matrix));
        self.hermiticity_scale = self.hermiticity_scale.max(linalg::max_abs(matrix)).max(1.0);
    }

    fn merge(&mut self, other: &Integrity) {
        self.max_norm_drift = self.max_norm_drift.max(other.max_norm_drift);
        self.max_hermiticity_residual = self
            .max_hermiticity_residual
            .max(other.max_hermiticity_residual);
        self.hermiticity_scale = self.hermiticity_scale.max(other.hermiticity_scale);
    }

    pub fn breach(&self) -> Option<String> {
        if self.max_norm_drift > NORM_DRIFT_TOL {
            return Some(format!(
                "norm drift {:.3e} exceeds {NORM_DRIFT_TOL:.1e}",
                self.max_norm_drift
            ));
        }
        if self.max_hermiticity_residual > HERMITICITY_TOL * self.hermiticity_scale.max(1.0) {
            return Some(format!(
                "hermiticity residual {:.3e} exceeds {HERMITICITY_TOL:.1e} (scale {:.3e})",
                self.max_hermiticity_residual, self.hermiticity_scale
            ));
        }
        None
    }

    pub fn to_json(self) -> Value {
        json!({
            "max_norm_drift": round_sig(self.max_norm_drift),
            "max_hermiticity_residual": round_sig(self.max_hermiticity_residual),
        })
    }
}

#[derive(Debug)]
pub enum RunError {
    /// Bad configuration or parameters: exit code 1.
    Config(String),
    /// Numerical integrity failure: exit code 2.
    Integrity(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "configuration error: {m}"),
            RunError::Integrity(m) => write!(f, "numerical integrity failure: {m}"),
        }
    }
}

fn lift(err: ojj_core::Error) -> RunError {
    use ojj_core::Error::*;
    match err {
        NotHermitian { .. } | NotNormalized { .. } | NotReal { .. }
        | EigenNoConvergence { .. } | StepLimit { .. } | CoefficientMismatch(_) => {
            RunError::Integrity(err.to_string())
        }
        _ => RunError::Config(err.to_string()),
    }
}

#[derive(Debug)]
pub struct ScenarioOutput {
    /// (file stem, table); written as `<stem>.csv`.
    pub tables: Vec<(String, ResultTable)>,
    /// The "results" block of the summary.
    pub results: Map<String, Value>,
    /// Scalar summary used as sweep-row columns.
    pub metrics: Vec<(String, f64)>,
    pub integrity: Integrity,
    pub plots: Vec<PlotSpec>,
}

/// Dispatch a parsed scenario.
pub fn run_kind(kind: &Kind) -> Result<ScenarioOutput, RunError> {
    match kind {
        Kind::Protocol(cfg) => run_protocol_scenario(cfg),
        Kind::Interference(cfg) => run_interference_scenario(cfg),
        Kind::Ring(cfg) => run_ring_scenario(cfg),
        Kind::Bragg(cfg) => run_bragg_scenario(cfg),
        Kind::Sweep(cfg) => run_sweep_scenario(cfg),
    }
}

/// The documented self-test hook: drive a deliberately non-Hermitian
/// matrix through the operator gate.
fn run_injection_hook(n: usize) -> Result<(), RunError> {
    let mut m = build_angular_ops(n.max(1)).jx;
    m[[0, 1]] *= 2.0;
    HermitianOperator::new(m).map_err(lift)?;
    Ok(())
}

fn pulse_duration(phi: f64, g: f64) -> Result<f64, RunError> {
    if g == 0.0 {
        if phi == 0.0 {
            return Ok(0.0);
        }
        return Err(RunError::Config(
            "g must be nonzero to reach a nonzero phi (duration = phi / g)".into(),
        ));
    }
    let duration = phi / g;
    if duration < 0.0 {
        return Err(RunError::Config(format!(
            "phi / g = {duration} is negative; negative phases need g < 0"
        )));
    }
    Ok(duration)
}

// ---------------------------------------------------------------------------
// protocol
// ---------------------------------------------------------------------------

fn run_protocol_scenario(cfg: &ProtocolConfig) -> Result<ScenarioOutput, RunError> {
    if cfg.inject_non_hermitian {
        run_injection_hook(cfg.n)?;
    }
    let phis = cfg.phi_values().map_err(RunError::Config)?;
    let mut integrity = Integrity::default();

    // one representative Hamiltonian for the hermiticity record
    let params = TwoModeParams {
        total_atoms: cfg.n,
        kappa: cfg.kappa,
        g: cfg.g,
        theta: cfg.theta,
        e0: 0.0,
    };
    let h = build_two_mode_hamiltonian(&params).map_err(lift)?;
    integrity.record_operator(h.matrix());

    let mut table = ResultTable::new(&["phi", "delta_n_sim", "delta_n_eq22", "delta_n_exact"]);
    for &phi in &phis {
        let duration = pulse_duration(phi, cfg.g)?;
        let schedule =
            PulseSchedule::single_pulse(cfg.g, cfg.theta, cfg.kappa, duration).map_err(lift)?;
        let res = run_protocol(cfg.n, &schedule).map_err(lift)?;
        integrity.record_norm(res.final_state.norm());
        table.push_row(vec![
            phi,
            res.delta_n_simulated,
            res.delta_n_paper,
            res.delta_n_exact,
        ]);
    }

    let max_sim = table.rows.iter().map(|r| r[1]).fold(0.0f64, f64::max);
    let max_gap = table
        .rows
        .iter()
        .map(|r| (r[1] - r[3]).abs())
        .fold(0.0f64, f64::max);
    let mut results = Map::new();
    results.insert("points".into(), json!(table.rows.len()));
    results.insert("max_delta_n_sim".into(), json!(round_sig(max_sim)));
    results.insert(
        "max_gap_sim_vs_exact".into(),
        json!(round_sig(max_gap)),
    );
    if let [row] = table.rows.as_slice() {
        results.insert("phi".into(), json!(round_sig(row[0])));
        results.insert("delta_n_sim".into(), json!(round_sig(row[1])));
        results.insert("delta_n_eq22".into(), json!(round_sig(row[2])));
        results.insert("delta_n_exact".into(), json!(round_sig(row[3])));
    }

    let metrics = match table.rows.as_slice() {
        [row] => vec![
            ("phi".to_string(), row[0]),
            ("delta_n_sim".to_string(), row[1]),
            ("delta_n_eq22".to_string(), row[2]),
            ("delta_n_exact".to_string(), row[3]),
        ],
        _ => vec![
            ("max_delta_n_sim".to_string(), max_sim),
            ("max_gap_sim_vs_exact".to_string(), max_gap),
        ],
    };

    let plot = PlotSpec {
        file_name: "protocol.svg".into(),
        title: format!("number uncertainty vs pulse phase (N = {})", cfg.n),
        x_label: "phi".into(),
        y_label: "delta_n".into(),
        series: vec![
            Series {
                label: "simulated".into(),
                points: table.rows.iter().map(|r| (r[0], r[1])).collect(),
            },
            Series {
                label: "large-N law".into(),
                points: table.rows.iter().map(|r| (r[0], r[2])).collect(),
            },
            Series {
                label: "rotation oracle".into(),
                points: table.rows.iter().map(|r| (r[0], r[3])).collect(),
            },
        ],
    };

    Ok(ScenarioOutput {
        tables: vec![("protocol".into(), table)],
        results,
        metrics,
        integrity,
        plots: vec![plot],
    })
}

// ---------------------------------------------------------------------------
// interference
// ---------------------------------------------------------------------------

fn run_interference_scenario(cfg: &InterferenceConfig) -> Result<ScenarioOutput, RunError> {
    if cfg.inject_non_hermitian {
        run_injection_hook(cfg.n)?;
    }
    if cfg.kappa <= 0.0 || !cfg.kappa.is_finite() {
        return Err(RunError::Config(format!(
            "kappa = {} must be > 0: the hold evolution and the revival scale pi/kappa need it",
            cfg.kappa
        )));
    }
    if cfg.grid_points < 2 {
        return Err(RunError::Config("grid_points must be >= 2".into()));
    }
    let mut integrity = Integrity::default();

    let duration = pulse_duration(cfg.phi, cfg.g)?;
    let schedule = PulseSchedule::single_pulse(cfg.g, cfg.theta, 0.0, duration).map_err(lift)?;
    let pulse = run_protocol(cfg.n, &schedule).map_err(lift)?;
    integrity.record_norm(pulse.final_state.norm());
    let params = TwoModeParams {
        total_atoms: cfg.n,
        kappa: 0.0,
        g: cfg.g,
        theta: cfg.theta,
        e0: 0.0,
    };
    integrity.record_operator(build_two_mode_hamiltonian(&params).map_err(lift)?.matrix());

    let span = cfg.span_factor * PI / cfg.kappa;
    let grid: Vec<f64> = (0..cfg.grid_points)
        .map(|i| span * i as f64 / (cfg.grid_points - 1) as f64)
        .collect();
    let trace =
        intensity_trace(&pulse.final_state, cfg.kappa, &grid, cfg.prefactor).map_err(lift)?;

    // cross-check the explicit double-sum form on the same grid
    let amps = pulse.final_state.amplitudes().to_vec();
    let mut max_gap = 0.0f64;
    for (k, &tau) in grid.iter().enumerate() {
        let cf = cfg.prefactor * intensity_closed_form(&amps, cfg.n, cfg.kappa, tau);
        max_gap = max_gap.max((cf - trace.intensity[k]).abs());
    }

    let report = detect_collapse_revival(&trace, cfg.threshold_fraction, pulse.delta_n_simulated)
        .map_err(lift)?;

    let mut table = ResultTable::new(&["tau", "intensity"]);
    for (k, &tau) in grid.iter().enumerate() {
        table.push_row(vec![tau, trace.intensity[k]]);
    }

    let i_max = trace.intensity.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut results = Map::new();
    results.insert("phi".into(), json!(round_sig(pulse.phi)));
    results.insert(
        "delta_n_sim".into(),
        json!(round_sig(pulse.delta_n_simulated)),
    );
    results.insert("i_max".into(), json!(round_sig(i_max)));
    results.insert(
        "max_closed_form_gap".into(),
        json!(round_sig(max_gap)),
    );
    results.insert(
        "t_coll_estimate".into(),
        json!(round_sig(report.t_coll_estimate)),
    );
    results.insert(
        "t_coll_measured".into(),
        report
            .t_coll_measured
            .map_or(Value::Null, |v| json!(round_sig(v))),
    );
    results.insert(
        "t_revival_measured".into(),
        report
            .t_revival_measured
            .map_or(Value::Null, |v| json!(round_sig(v))),
    );
    results.insert(
        "envelope_threshold".into(),
        json!(round_sig(report.envelope_threshold)),
    );

    let metrics = vec![
        ("i_max".to_string(), i_max),
        ("t_coll_estimate".to_string(), report.t_coll_estimate),
        (
            "t_coll_measured".to_string(),
            report.t_coll_measured.unwrap_or(f64::NAN),
        ),
        (
            "t_revival_measured".to_string(),
            report.t_revival_measured.unwrap_or(f64::NAN),
        ),
    ];

    let plot = PlotSpec {
        file_name: "interference.svg".into(),
        title: format!(
            "fringe intensity vs hold time (N = {}, phi = {:.4})",
            cfg.n, pulse.phi
        ),
        x_label: "tau".into(),
        y_label: "intensity".into(),
        series: vec![Series {
            label: "I(tau)".into(),
            points: table.rows.iter().map(|r| (r[0], r[1])).collect(),
        }],
    };

    Ok(ScenarioOutput {
        tables: vec![("interference".into(), table)],
        results,
        metrics,
        integrity,
        plots: vec![plot],
    })
}

// ---------------------------------------------------------------------------
// ring
// ---------------------------------------------------------------------------

fn run_ring_scenario(cfg: &RingConfig) -> Result<ScenarioOutput, RunError> {
    if cfg.inject_non_hermitian {
        run_injection_hook(2)?;
    }
    let model = RingCouplingModel {
        gamma_prime_1: cfg.gamma_prime_1,
        gamma_prime_2: cfg.gamma_prime_2,
        omega_k1: cfg.omega_k1,
        omega_k2: cfg.omega_k2,
        theta: cfg.theta,
        n_particles: cfg.n_particles,
        ring_cutoff: cfg.ring_cutoff,
        trap_kappa: cfg.trap_kappa,
    };
    let g_eff = effective_coupling_g(&model);
    let duration = match cfg.duration {
        Some(d) => d,
        None => {
            if g_eff <= 0.0 {
                return Err(RunError::Config(
                    "couplings vanish: supply an explicit duration".into(),
                ));
            }
            2.5 * 2.0 * PI / g_eff
        }
    };

    let mut integrity = Integrity::default();
    let basis = RingBasis::new(model.n_particles, model.ring_cutoff);
    let h = build_ring_hamiltonian(&model, &basis).map_err(lift)?;
    integrity.record_operator(h.matrix());
    let eig = h.eigendecompose().map_err(lift)?;
    let psi0 = basis
        .number_state(&[model.n_particles, 0, 0, 0])
        .expect("initial state");
    let final_state = eig.propagate(&psi0, duration);
    integrity.record_norm(final_state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());

    let report = validate_adiabatic(&model, duration).map_err(lift)?;

    if cfg.curve_points < 2 {
        return Err(RunError::Config("curve_points must be >= 2".into()));
    }
    let grid: Vec<f64> = (0..cfg.curve_points)
        .map(|i| duration * i as f64 / (cfg.curve_points - 1) as f64)
        .collect();
    let curve = transfer_curve(&model, &grid).map_err(lift)?;

    let mut table = ResultTable::new(&[
        "fitted_rabi_frequency",
        "effective_g",
        "relative_error",
        "max_ring_population",
        "epsilon",
    ]);
    table.push_row(vec![
        report.fitted_rabi_frequency,
        report.effective_g,
        report.relative_error,
        report.max_ring_population,
        report.epsilon,
    ]);
    let mut curve_table = ResultTable::new(&["t", "p2"]);
    for (k, &t) in grid.iter().enumerate() {
        curve_table.push_row(vec![t, curve[k]]);
    }

    let mut results = Map::new();
    results.insert(
        "fitted_rabi_frequency".into(),
        json!(round_sig(report.fitted_rabi_frequency)),
    );
    results.insert("effective_g".into(), json!(round_sig(report.effective_g)));
    results.insert(
        "relative_error".into(),
        json!(round_sig(report.relative_error)),
    );
    results.insert(
        "max_ring_population".into(),
        json!(round_sig(report.max_ring_population)),
    );
    results.insert("epsilon".into(), json!(round_sig(report.epsilon)));
    results.insert("basis_dimension".into(), json!(basis.dim()));

    let metrics = vec![
        ("fitted_rabi_frequency".to_string(), report.fitted_rabi_frequency),
        ("effective_g".to_string(), report.effective_g),
        ("relative_error".to_string(), report.relative_error),
        ("max_ring_population".to_string(), report.max_ring_population),
        ("epsilon".to_string(), report.epsilon),
    ];

    let plot = PlotSpec {
        file_name: "ring.svg".into(),
        title: "trap-2 population under the full trap+ring model".into(),
        x_label: "t".into(),
        y_label: "P2".into(),
        series: vec![Series {
            label: "P2(t)".into(),
            points: curve_table.rows.iter().map(|r| (r[0], r[1])).collect(),
        }],
    };

    Ok(ScenarioOutput {
        tables: vec![("ring".into(), table), ("ring_transfer".into(), curve_table)],
        results,
        metrics,
        integrity,
        plots: vec![plot],
    })
}

// ---------------------------------------------------------------------------
// bragg
// ---------------------------------------------------------------------------

fn run_bragg_scenario(cfg: &BraggConfig) -> Result<ScenarioOutput, RunError> {
    if cfg.inject_non_hermitian {
        run_injection_hook(2)?;
    }
    if cfg.omega_k <= 0.0 || !cfg.omega_k.is_finite() {
        return Err(RunError::Config(format!(
            "omega_k = {} must be finite and > 0",
            cfg.omega_k
        )));
    }
    let params = BraggLadderParams {
        omega_pump: cfg.omega_pump,
        omega_probe: cfg.omega_probe,
        detuning: cfg.detuning,
        nu: cfg.nu.unwrap_or(4.0 * cfg.omega_k),
        omega_k: cfg.omega_k,
        order: cfg.order,
    };
    let pulse_time = match cfg.pulse_time {
        Some(t) => t,
        None => {
            let coupling = params.omega_pump * params.omega_probe;
            if coupling == 0.0 {
                return Err(RunError::Config(
                    "pump and probe couplings vanish: supply an explicit pulse_time".into(),
                ));
            }
            PI * params.delta_1() / (2.0 * coupling)
        }
    };

    let gamma = effective_gamma(&params).map_err(lift)?;
    let mut integrity = Integrity::default();
    let mut table = ResultTable::new(&[
        if matches!(&cfg.scan, Some(s) if s.parameter == "delta") {
            "delta"
        } else {
            "nu"
        },
        "transfer_probability",
        "gamma_eff",
    ]);

    match &cfg.scan {
        None => {
            let path = first_order_dynamics(&params, &[0.0, pulse_time]).map_err(lift)?;
            integrity.record_norm(path[1].norm_sqr_sum().sqrt());
            table.push_row(vec![params.nu, path[1].a_g2k.norm_sqr(), gamma]);
        }
        Some(scan) if scan.parameter == "nu" => {
            if scan.points < 2 {
                return Err(RunError::Config("scan.points must be >= 2".into()));
            }
            let nus: Vec<f64> = (0..scan.points)
                .map(|i| {
                    scan.start + (scan.stop - scan.start) * i as f64 / (scan.points - 1) as f64
                })
                .collect();
            let rows = nu_scan(&params, &nus, pulse_time).map_err(lift)?;
            for (nu, transfer) in rows {
                table.push_row(vec![nu, transfer, gamma]);
            }
        }
        Some(scan) if scan.parameter == "delta" => {
            if scan.points < 2 {
                return Err(RunError::Config("scan.points must be >= 2".into()));
            }
            for i in 0..scan.points {
                let delta = scan.start
                    + (scan.stop - scan.start) * i as f64 / (scan.points - 1) as f64;
                let p = BraggLadderParams {
                    detuning: delta,
                    ..params
                };
                let path = first_order_dynamics(&p, &[0.0, pulse_time]).map_err(lift)?;
                integrity.record_norm(path[1].norm_sqr_sum().sqrt());
                let g = effective_gamma(&p).map_err(lift)?;
                table.push_row(vec![delta, path[1].a_g2k.norm_sqr(), g]);
            }
        }
        Some(scan) => {
            return Err(RunError::Config(format!(
                "unknown scan parameter \"{}\" (expected \"nu\" or \"delta\")",
                scan.parameter
            )));
        }
    }

    let (best_x, best_transfer) = table
        .rows
        .iter()
        .map(|r| (r[0], r[1]))
        .fold((f64::NAN, -1.0), |acc, (x, t)| if t > acc.1 { (x, t) } else { acc });

    let mut results = Map::new();
    results.insert(
        "resonance_detuning".into(),
        json!(round_sig(resonance_detuning(&params))),
    );
    results.insert("gamma_eff".into(), json!(round_sig(gamma)));
    results.insert("pulse_time".into(), json!(round_sig(pulse_time)));
    results.insert("best_transfer".into(), json!(round_sig(best_transfer)));
    results.insert("best_at".into(), json!(round_sig(best_x)));
    results.insert("adiabatic".into(), json!(params.is_adiabatic()));

    let metrics = vec![
        ("transfer_probability".to_string(), best_transfer),
        ("gamma_eff".to_string(), gamma),
        ("resonance_detuning".to_string(), resonance_detuning(&params)),
    ];

    let plot = PlotSpec {
        file_name: "bragg.svg".into(),
        title: "ladder transfer probability".into(),
        x_label: table.columns[0].clone(),
        y_label: "P(2k)".into(),
        series: vec![Series {
            label: "transfer".into(),
            points: table.rows.iter().map(|r| (r[0], r[1])).collect(),
        }],
    };

    Ok(ScenarioOutput {
        tables: vec![("bragg".into(), table)],
        results,
        metrics,
        integrity,
        plots: vec![plot],
    })
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

type SweepPoint = (Vec<(String, f64)>, Integrity);

fn sweep_point(
    inner_kind: &str,
    scenario: &Value,
    parameter: &str,
    value: &serde_json::Number,
) -> Result<SweepPoint, RunError> {
    let mut body = scenario
        .as_object()
        .cloned()
        .ok_or_else(|| RunError::Config("sweep.scenario must be a JSON object".into()))?;
    body.remove("kind");
    body.insert(parameter.to_string(), Value::Number(value.clone()));
    let kind = crate::config::parse_kind(inner_kind, Value::Object(body))
        .map_err(RunError::Config)?;
    let out = run_kind(&kind)?;
    Ok((out.metrics, out.integrity))
}

pub fn run_sweep_scenario(cfg: &SweepConfig) -> Result<ScenarioOutput, RunError> {
    if cfg.values.is_empty() {
        return Err(RunError::Config("sweep.values must be nonempty".into()));
    }
    let inner_kind = cfg
        .scenario
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| RunError::Config("sweep.scenario must carry a \"kind\"".into()))?
        .to_string();
    if inner_kind == "sweep" {
        return Err(RunError::Config("sweeps do not nest".into()));
    }

    // rows are assembled in ascending order of the swept value
    let mut values = cfg.values.clone();
    values.sort_by(|a, b| {
        a.as_f64()
            .unwrap_or(f64::NAN)
            .partial_cmp(&b.as_f64().unwrap_or(f64::NAN))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let run_one = |v: &serde_json::Number| sweep_point(&inner_kind, &cfg.scenario, &cfg.parameter, v);
    let points: Vec<Result<SweepPoint, RunError>> = if cfg.parallel {
        values.par_iter().map(run_one).collect()
    } else {
        values.iter().map(run_one).collect()
    };

    let mut rows = Vec::with_capacity(points.len());
    let mut integrity = Integrity::default();
    for p in points {
        let (metrics, point_integrity) = p?;
        integrity.merge(&point_integrity);
        rows.push(metrics);
    }

    let metric_names: Vec<String> = rows[0].iter().map(|(k, _)| k.clone()).collect();
    for row in &rows {
        let names: Vec<String> = row.iter().map(|(k, _)| k.clone()).collect();
        if names != metric_names {
            return Err(RunError::Config(
                "sweep points produced inconsistent metric sets".into(),
            ));
        }
    }

    let mut columns = vec![cfg.parameter.as_str()];
    columns.extend(metric_names.iter().map(|s| s.as_str()));
    let mut table = ResultTable::new(&columns);
    for (value, row) in values.iter().zip(rows.iter()) {
        let mut cells = vec![value.as_f64().unwrap_or(f64::NAN)];
        cells.extend(row.iter().map(|(_, v)| *v));
        table.push_row(cells);
    }

    let mut results = Map::new();
    results.insert("parameter".into(), json!(cfg.parameter));
    results.insert("rows".into(), json!(table.rows.len()));
    results.insert("scenario_kind".into(), json!(inner_kind));

    let plot = PlotSpec {
        file_name: "sweep.svg".into(),
        title: format!("sweep over {}", cfg.parameter),
        x_label: cfg.parameter.clone(),
        y_label: metric_names.first().cloned().unwrap_or_default(),
        series: vec![Series {
            label: metric_names.first().cloned().unwrap_or_default(),
            points: table.rows.iter().map(|r| (r[0], r[1])).collect(),
        }],
    };

    Ok(ScenarioOutput {
        tables: vec![("sweep".into(), table)],
        results,
        metrics: Vec::new(),
        integrity,
        plots: vec![plot],
    })
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

/// Library invariants plus the CLI-level sweep-determinism check.
pub fn run_selftest() -> Vec<ojj_core::selftest::CheckResult> {
    let mut checks = ojj_core::selftest::run_all();
    checks.push(sweep_determinism_check());
    checks
}

fn sweep_determinism_check() -> ojj_core::selftest::CheckResult {
    let make = |parallel: bool| -> Result<String, RunError> {
        let cfg = SweepConfig {
            parameter: "N".into(),
            values: vec![2.into(), 8.into(), 4.into()],
            scenario: json!({"kind": "protocol", "N": 2, "phi": 0.4}),
            parallel,
        };
        let out = run_sweep_scenario(&cfg)?;
        Ok(out.tables[0].1.to_csv())
    };
    match (make(false), make(true)) {
        (Ok(serial), Ok(parallel)) => {
            let passed = serial == parallel;
            ojj_core::selftest::CheckResult {
                name: "sweep_determinism",
                passed,
                detail: if passed {
                    "serial and parallel sweeps are byte-identical".into()
                } else {
                    "serial and parallel sweep outputs differ".into()
                },
            }
        }
        (Err(e), _) | (_, Err(e)) => ojj_core::selftest::CheckResult {
            name: "sweep_determinism",
            passed: false,
            detail: format!("sweep failed: {e}"),
        },
    }
}
