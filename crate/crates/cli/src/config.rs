//! Run configuration: a flat JSON object with snake_case keys.
//!
//! Frequencies are read in Hz from `*_hz` keys and stored as angular rates.
//! Every key is optional; the defaults reproduce the reference setup.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::path::PathBuf;

use optomech::experiments::{
    linspace, logspace, Settings, DEFAULT_GAIN_MAX_IN_KAPPA, DEFAULT_GAIN_POINTS, DEFAULT_TEMPERATURE_MAX,
    DEFAULT_TEMPERATURE_MIN, DEFAULT_TEMPERATURE_POINTS, DEFAULT_THETA_POINTS,
};
use optomech::model::{derive_constants, AmplitudeModel, Detunings, FixedPointOptions};
use optomech::{Derived, Params};
use serde::{Deserialize, Serialize};

/// OPA gain used when the config gives neither `opa_gain_hz` nor
/// `opa_gain_in_kappa`, in units of κ.
pub const DEFAULT_OPA_GAIN_IN_KAPPA: f64 = 5.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModelChoice {
    /// `AmplitudeModel::Unconjugated`
    Paper,
    Exact,
}

impl From<ModelChoice> for AmplitudeModel {
    fn from(m: ModelChoice) -> Self {
        match m {
            ModelChoice::Paper => AmplitudeModel::Unconjugated,
            ModelChoice::Exact => AmplitudeModel::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DetuningMode {
    Bare,
    Effective,
}

/// The document as written. Absent keys are `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub mass_kg: Option<f64>,
    pub omega_m_hz: Option<f64>,
    pub gamma_m_hz: Option<f64>,
    pub cavity_length_m: Option<f64>,
    pub finesse: Option<f64>,
    pub wavelength_1_m: Option<f64>,
    pub wavelength_2_m: Option<f64>,
    pub power_1_w: Option<f64>,
    pub power_2_w: Option<f64>,
    pub detuning_mode: Option<DetuningMode>,
    pub detuning_1_hz: Option<f64>,
    pub detuning_2_hz: Option<f64>,
    pub opa_gain_hz: Option<f64>,
    pub opa_gain_in_kappa: Option<f64>,
    pub opa_phase_rad: Option<f64>,
    pub temperature_k: Option<f64>,
    pub amplitude_model: Option<ModelChoice>,
    pub fixed_point_damping: Option<f64>,
    pub theta_min_rad: Option<f64>,
    pub theta_max_rad: Option<f64>,
    pub theta_points: Option<usize>,
    pub gain_min_in_kappa: Option<f64>,
    pub gain_max_in_kappa: Option<f64>,
    pub gain_points: Option<usize>,
    pub temperature_min_k: Option<f64>,
    pub temperature_max_k: Option<f64>,
    pub temperature_points: Option<usize>,
    pub output: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "mass_kg",
    "omega_m_hz",
    "gamma_m_hz",
    "cavity_length_m",
    "finesse",
    "wavelength_1_m",
    "wavelength_2_m",
    "power_1_w",
    "power_2_w",
    "detuning_mode",
    "detuning_1_hz",
    "detuning_2_hz",
    "opa_gain_hz",
    "opa_gain_in_kappa",
    "opa_phase_rad",
    "temperature_k",
    "amplitude_model",
    "fixed_point_damping",
    "theta_min_rad",
    "theta_max_rad",
    "theta_points",
    "gain_min_in_kappa",
    "gain_max_in_kappa",
    "gain_points",
    "temperature_min_k",
    "temperature_max_k",
    "temperature_points",
    "output",
];

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub model: Option<ModelChoice>,
    pub detunings: Option<DetuningMode>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grids {
    pub theta_rad: Vec<f64>,
    pub gain_in_kappa: Vec<f64>,
    pub temperature_k: Vec<f64>,
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: Params,
    pub derived: Derived,
    /// G/κ as configured, so that it round-trips unchanged into the output.
    pub opa_gain_in_kappa: f64,
    pub model: ModelChoice,
    pub detuning_mode: DetuningMode,
    pub settings: Settings,
    pub grids: Grids,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn kappa(&self) -> f64 {
        self.derived.kappa
    }

    /// Gain grid in rad/s.
    pub fn gains(&self) -> Vec<f64> {
        self.grids.gain_in_kappa.iter().map(|g| g * self.kappa()).collect()
    }

    pub fn gain_bounds(&self) -> (f64, f64) {
        let g = &self.grids.gain_in_kappa;
        (g[0] * self.kappa(), g[g.len() - 1] * self.kappa())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: Option<String>,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: ")?,
            (Some(l), None) => write!(f, "line {l}: ")?,
            _ => {}
        }
        if let Some(k) = &self.key {
            write!(f, "{k}: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Parses and resolves a config document. Blank input means all defaults.
pub fn parse_config(text: &str, overrides: Overrides) -> Result<RunConfig, ConfigError> {
    let raw = parse_raw(text)?;
    resolve(&raw, overrides).map_err(|mut e| {
        if let Some(key) = &e.key {
            if let Some((line, column)) = locate(text, key) {
                e.line = Some(line);
                e.column = Some(column);
            }
        }
        e
    })
}

pub fn parse_raw(text: &str) -> Result<RawConfig, ConfigError> {
    if text.trim().is_empty() {
        return Ok(RawConfig::default());
    }
    serde_json::from_str(text).map_err(|e| {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep the position separately.
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        let key = unknown_field(&message);
        let message = match key.as_deref().and_then(unit_hint) {
            Some(k) => format!("unknown key; did you mean `{k}`?"),
            None => message,
        };
        ConfigError {
            key,
            line: Some(e.line()).filter(|l| *l > 0),
            column: Some(e.column()).filter(|c| *c > 0),
            message,
        }
    })
}

fn unknown_field(message: &str) -> Option<String> {
    let rest = message.strip_prefix("unknown field `")?;
    Some(rest[..rest.find('`')?].to_string())
}

const UNITS: &[&str] = &["_hz", "_rad_s", "_rad", "_kg", "_m", "_w", "_k"];

fn strip_unit(key: &str) -> &str {
    UNITS.iter().find_map(|u| key.strip_suffix(u)).unwrap_or(key)
}

/// Suggests the key with the expected unit suffix for something like
/// `omega_m` or `gamma_m_rad_s`.
fn unit_hint(key: &str) -> Option<&'static str> {
    KEYS.iter()
        .copied()
        .find(|k| *k != key && (strip_unit(k) == key || strip_unit(k) == strip_unit(key)))
}

/// 1-based line and column of `"key"` in the document.
fn locate(text: &str, key: &str) -> Option<(usize, usize)> {
    let needle = format!("\"{key}\"");
    let offset = text.find(&needle)?;
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = offset - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    Some((line, column))
}

fn field_error(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        key: Some(key.to_string()),
        line: None,
        column: None,
        message: message.into(),
    }
}

/// Config key for a field name reported by the core validation.
fn config_key(field: &str, detunings_bare: bool) -> &'static str {
    match field {
        "mass" => "mass_kg",
        "omega_m" => "omega_m_hz",
        "gamma_m" => "gamma_m_hz",
        "cavity_length" => "cavity_length_m",
        "finesse" => "finesse",
        "wavelength_1" => "wavelength_1_m",
        "wavelength_2" => "wavelength_2_m",
        "power_1" => "power_1_w",
        "power_2" => "power_2_w",
        "opa_gain" => "opa_gain_hz",
        "opa_phase" => "opa_phase_rad",
        "temperature" => "temperature_k",
        "delta_1" | "delta_01" => "detuning_1_hz",
        "delta_2" | "delta_02" => "detuning_2_hz",
        _ if detunings_bare => "detuning_mode",
        _ => "unknown",
    }
}

fn resolve(raw: &RawConfig, overrides: Overrides) -> Result<RunConfig, ConfigError> {
    let reference = Params::reference();
    let omega_m = raw.omega_m_hz.map_or(reference.omega_m, |f| TAU * f);
    let detuning_mode = overrides.detunings.or(raw.detuning_mode).unwrap_or(DetuningMode::Effective);
    let d1 = raw.detuning_1_hz.map_or(omega_m, |f| TAU * f);
    let d2 = raw.detuning_2_hz.map_or(-omega_m, |f| TAU * f);
    let detunings = match detuning_mode {
        DetuningMode::Bare => Detunings::Bare { delta_01: d1, delta_02: d2 },
        DetuningMode::Effective => Detunings::Effective { delta_1: d1, delta_2: d2 },
    };

    let mut params = Params {
        mass: raw.mass_kg.unwrap_or(reference.mass),
        omega_m,
        gamma_m: raw.gamma_m_hz.map_or(reference.gamma_m, |f| TAU * f),
        cavity_length: raw.cavity_length_m.unwrap_or(reference.cavity_length),
        finesse: raw.finesse.unwrap_or(reference.finesse),
        wavelength_1: raw.wavelength_1_m.unwrap_or(reference.wavelength_1),
        wavelength_2: raw.wavelength_2_m.unwrap_or(reference.wavelength_2),
        power_1: raw.power_1_w.unwrap_or(reference.power_1),
        power_2: raw.power_2_w.unwrap_or(reference.power_2),
        detunings,
        opa_gain: 0.0,
        opa_phase: raw.opa_phase_rad.unwrap_or(FRAC_PI_2),
        temperature: raw.temperature_k.unwrap_or(reference.temperature),
    };

    let bare = detuning_mode == DetuningMode::Bare;
    let core_error = |e: optomech::Error| match e {
        optomech::Error::InvalidParameter { field, reason } => field_error(config_key(field, bare), reason),
        other => ConfigError {
            key: None,
            line: None,
            column: None,
            message: other.to_string(),
        },
    };

    let derived = derive_constants(&params).map_err(core_error)?;
    let gain_in_kappa = match (raw.opa_gain_hz, raw.opa_gain_in_kappa) {
        (Some(_), Some(_)) => {
            return Err(field_error(
                "opa_gain_in_kappa",
                "give either opa_gain_hz or opa_gain_in_kappa, not both",
            ))
        }
        (Some(f), None) => {
            params.opa_gain = TAU * f;
            params.opa_gain / derived.kappa
        }
        (None, Some(g)) => {
            if !(g.is_finite() && g >= 0.0) {
                return Err(field_error("opa_gain_in_kappa", format!("must be finite and >= 0, got {g}")));
            }
            params.opa_gain = g * derived.kappa;
            g
        }
        (None, None) => {
            params.opa_gain = DEFAULT_OPA_GAIN_IN_KAPPA * derived.kappa;
            DEFAULT_OPA_GAIN_IN_KAPPA
        }
    };
    params.validate().map_err(core_error)?;

    let model = overrides.model.or(raw.amplitude_model).unwrap_or(ModelChoice::Paper);
    let mut fixed_point = FixedPointOptions::default();
    if let Some(damping) = raw.fixed_point_damping {
        if !(damping > 0.0 && damping <= 1.0) {
            return Err(field_error("fixed_point_damping", format!("must lie in (0, 1], got {damping}")));
        }
        fixed_point.damping = damping;
    }

    let theta = grid(
        ("theta_min_rad", raw.theta_min_rad.unwrap_or(0.0)),
        ("theta_max_rad", raw.theta_max_rad.unwrap_or(PI)),
        ("theta_points", raw.theta_points.unwrap_or(DEFAULT_THETA_POINTS)),
        false,
    )?;
    let gain = grid(
        ("gain_min_in_kappa", raw.gain_min_in_kappa.unwrap_or(0.0)),
        ("gain_max_in_kappa", raw.gain_max_in_kappa.unwrap_or(DEFAULT_GAIN_MAX_IN_KAPPA)),
        ("gain_points", raw.gain_points.unwrap_or(DEFAULT_GAIN_POINTS)),
        false,
    )?;
    if gain[0] < 0.0 {
        return Err(field_error("gain_min_in_kappa", format!("must be >= 0, got {}", gain[0])));
    }
    let temperature = grid(
        ("temperature_min_k", raw.temperature_min_k.unwrap_or(DEFAULT_TEMPERATURE_MIN)),
        ("temperature_max_k", raw.temperature_max_k.unwrap_or(DEFAULT_TEMPERATURE_MAX)),
        ("temperature_points", raw.temperature_points.unwrap_or(DEFAULT_TEMPERATURE_POINTS)),
        true,
    )?;

    Ok(RunConfig {
        params,
        derived,
        opa_gain_in_kappa: gain_in_kappa,
        model,
        detuning_mode,
        settings: Settings {
            model: model.into(),
            fixed_point,
        },
        grids: Grids {
            theta_rad: theta,
            gain_in_kappa: gain,
            temperature_k: temperature,
        },
        output: raw.output.clone(),
    })
}

fn grid(
    (min_key, min): (&str, f64),
    (max_key, max): (&str, f64),
    (points_key, points): (&str, usize),
    log: bool,
) -> Result<Vec<f64>, ConfigError> {
    if !min.is_finite() || (log && min <= 0.0) {
        return Err(field_error(min_key, format!("invalid grid start {min}")));
    }
    if !max.is_finite() {
        return Err(field_error(max_key, format!("invalid grid end {max}")));
    }
    if points == 0 {
        return Err(field_error(points_key, "must be at least 1"));
    }
    if points > 1 && max <= min {
        return Err(field_error(max_key, format!("must exceed {min_key} ({max} <= {min})")));
    }
    Ok(if log { logspace(min, max, points) } else { linspace(min, max, points) })
}
