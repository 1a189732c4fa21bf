//! Scenario configuration: one JSON document per run.
//!
//! Common keys: `schema_version` (must be 1), `kind`, optional
//! `output_dir` and `emit_plots`. Everything else is kind-specific and
//! strictly validated: unknown keys are rejected, missing required keys
//! are reported by name.

use serde::Deserialize;
use serde_json::Value;
use std::f64::consts::PI;
use std::path::PathBuf;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug)]
pub struct ScenarioConfig {
    pub kind: Kind,
    pub output_dir: Option<PathBuf>,
    pub emit_plots: bool,
    /// The raw document, echoed into the summary provenance block.
    pub raw: Value,
}

#[derive(Debug)]
pub enum Kind {
    Protocol(ProtocolConfig),
    Interference(InterferenceConfig),
    Ring(RingConfig),
    Bragg(BraggConfig),
    Sweep(SweepConfig),
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::Protocol(_) => "protocol",
            Kind::Interference(_) => "interference",
            Kind::Ring(_) => "ring",
            Kind::Bragg(_) => "bragg",
            Kind::Sweep(_) => "sweep",
        }
    }
}

fn default_g() -> f64 {
    1.0
}
fn default_theta() -> f64 {
    PI
}
fn default_prefactor() -> f64 {
    1.0
}
fn default_threshold() -> f64 {
    1.0 / std::f64::consts::E
}
fn default_grid_points() -> usize {
    2000
}
fn default_span_factor() -> f64 {
    1.2
}
fn default_n_particles() -> usize {
    1
}
fn default_ring_cutoff() -> usize {
    2
}
fn default_order() -> usize {
    1
}
fn default_curve_points() -> usize {
    500
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        (0..self.points)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / (self.points - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default = "default_g")]
    pub g: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default)]
    pub phi: Option<f64>,
    #[serde(default)]
    pub phi_grid: Option<GridSpec>,
    /// Self-test hook: feed a deliberately non-Hermitian matrix through
    /// the integrity gate (forces exit code 2).
    #[serde(default)]
    pub inject_non_hermitian: bool,
}

impl ProtocolConfig {
    pub fn phi_values(&self) -> Result<Vec<f64>, String> {
        match (&self.phi, &self.phi_grid) {
            (Some(phi), None) => Ok(vec![*phi]),
            (None, Some(grid)) => {
                if grid.points == 0 {
                    return Err("phi_grid.points must be >= 1".into());
                }
                Ok(grid.values())
            }
            (None, None) => Err("one of \"phi\" or \"phi_grid\" is required".into()),
            (Some(_), Some(_)) => Err("\"phi\" and \"phi_grid\" are mutually exclusive".into()),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferenceConfig {
    #[serde(rename = "N")]
    pub n: usize,
    pub phi: f64,
    pub kappa: f64,
    #[serde(default = "default_g")]
    pub g: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_span_factor")]
    pub span_factor: f64,
    #[serde(default = "default_prefactor")]
    pub prefactor: f64,
    #[serde(default = "default_threshold")]
    pub threshold_fraction: f64,
    #[serde(default)]
    pub inject_non_hermitian: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingConfig {
    pub gamma_prime_1: f64,
    pub gamma_prime_2: f64,
    pub omega_k1: f64,
    pub omega_k2: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default = "default_n_particles")]
    pub n_particles: usize,
    #[serde(default = "default_ring_cutoff")]
    pub ring_cutoff: usize,
    #[serde(default)]
    pub trap_kappa: f64,
    /// Defaults to 2.5 effective Rabi periods.
    #[serde(default)]
    pub duration: Option<f64>,
    #[serde(default = "default_curve_points")]
    pub curve_points: usize,
    #[serde(default)]
    pub inject_non_hermitian: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BraggConfig {
    pub omega_pump: f64,
    pub omega_probe: f64,
    pub detuning: f64,
    pub omega_k: f64,
    /// Defaults to the Bragg resonance 4 omega_k.
    #[serde(default)]
    pub nu: Option<f64>,
    #[serde(default = "default_order")]
    pub order: usize,
    /// Defaults to the pi-pulse time pi Delta_1 / (2 Omega Omega').
    #[serde(default)]
    pub pulse_time: Option<f64>,
    #[serde(default)]
    pub scan: Option<ScanSpec>,
    #[serde(default)]
    pub inject_non_hermitian: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    /// "nu" or "delta".
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: String,
    pub values: Vec<serde_json::Number>,
    pub scenario: Value,
    #[serde(default = "default_true")]
    pub parallel: bool,
}

/// Parse and validate a scenario document.
pub fn parse(raw: &str) -> Result<ScenarioConfig, String> {
    let value: Value = serde_json::from_str(raw).map_err(|e| format!("invalid JSON: {e}"))?;
    let obj = value
        .as_object()
        .ok_or_else(|| "configuration must be a JSON object".to_string())?;

    let version = obj
        .get("schema_version")
        .ok_or_else(|| "missing field `schema_version`".to_string())?
        .as_u64()
        .ok_or_else(|| "`schema_version` must be an integer".to_string())?;
    if version != SCHEMA_VERSION {
        return Err(format!(
            "unsupported schema_version {version} (expected {SCHEMA_VERSION})"
        ));
    }

    let kind_name = obj
        .get("kind")
        .ok_or_else(|| "missing field `kind`".to_string())?
        .as_str()
        .ok_or_else(|| "`kind` must be a string".to_string())?
        .to_string();

    let output_dir = match obj.get("output_dir") {
        None => None,
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(_) => return Err("`output_dir` must be a string".into()),
    };
    let emit_plots = match obj.get("emit_plots") {
        None => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err("`emit_plots` must be a boolean".into()),
    };

    let mut body = obj.clone();
    for common in ["schema_version", "kind", "output_dir", "emit_plots"] {
        body.remove(common);
    }
    let body = Value::Object(body);

    let kind = parse_kind(&kind_name, body)?;
    Ok(ScenarioConfig {
        kind,
        output_dir,
        emit_plots,
        raw: value,
    })
}

pub fn parse_kind(kind_name: &str, body: Value) -> Result<Kind, String> {
    let report = |e: serde_json::Error| format!("invalid {kind_name} configuration: {e}");
    match kind_name {
        "protocol" => Ok(Kind::Protocol(
            serde_json::from_value(body).map_err(report)?,
        )),
        "interference" => Ok(Kind::Interference(
            serde_json::from_value(body).map_err(report)?,
        )),
        "ring" => Ok(Kind::Ring(serde_json::from_value(body).map_err(report)?)),
        "bragg" => Ok(Kind::Bragg(serde_json::from_value(body).map_err(report)?)),
        "sweep" => Ok(Kind::Sweep(serde_json::from_value(body).map_err(report)?)),
        other => Err(format!(
            "unknown kind \"{other}\" (expected protocol | interference | ring | bragg | sweep)"
        )),
    }
}
