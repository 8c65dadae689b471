//! Run configuration: a strict TOML schema, resolved into a [`RunConfig`]
//! with every default filled in.
//!
//! ```toml
//! mode = "oscillate"        # oscillate | entropy | flavor-corr | validate | map-params
//! steps = 4500              # default 4500
//! stride = 1                # default 1, output every stride-th step
//! encoding = "six-level"    # six-level | three-qubit | qubit-qutrit
//! source = "e"              # source flavor, default e
//!
//! [walk]                    # either [walk] ...
//! theta = [0.001, 0.00615654, 0.0664688]
//! ktilde = 0.01             # default 0.01
//!
//! [physical]                # ... or [physical], in one of two forms:
//! masses_ev = [0.0, 0.0086, 0.0496]   # direct: rest energies, momentum, time step
//! momentum_ev = 1.0e9
//! dt_seconds = 1.0e-26
//! # or splittings: dm21_sq, dm31_sq, dm32_sq (default dm31 - dm21), energy_gev,
//! # baseline_km, theta1 (default 0.001), ktilde (default 0.01), dt_seconds (optional)
//!
//! [pmns]                    # defaults: MixingParams::default()
//! theta12 = 0.5836
//!
//! [wavepacket]
//! ktilde0 = 0.01
//! xi = 100.0
//! spacing = 0.001
//! epsilon = [0.02, 0.05, 0.15]   # default [0.01] for flavor-corr
//!
//! [output]
//! path = "out.csv"          # default: standard output
//! format = "csv"            # csv | json
//! ```
//!
//! Any angle key also accepts a `_deg` variant in degrees; giving both is an
//! error.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oscillation::{map_physical_to_walk, match_splittings, PhysicalParams};
use crate::pmns::{Flavor, MixingParams};
use crate::walk::{Encoding, RegimeWarning, WalkParams};
use crate::wavepacket::WavepacketSpec;

pub const DEFAULT_STEPS: u64 = 4500;
pub const DEFAULT_KTILDE: f64 = 0.01;
pub const DEFAULT_THETA1: f64 = 0.001;

/// A configuration problem tied to a key path and, when known, a line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("config error")?;
        if let Some(line) = self.line {
            write!(f, " on line {line}")?;
        }
        if !self.key.is_empty() {
            write!(f, " at `{}`", self.key)?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Oscillate,
    Entropy,
    FlavorCorr,
    Validate,
    MapParams,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::Oscillate,
        Mode::Entropy,
        Mode::FlavorCorr,
        Mode::Validate,
        Mode::MapParams,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Oscillate => "oscillate",
            Mode::Entropy => "entropy",
            Mode::FlavorCorr => "flavor-corr",
            Mode::Validate => "validate",
            Mode::MapParams => "map-params",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = ConfigError;

    fn from_str(s: &str) -> std::result::Result<Self, ConfigError> {
        Mode::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            ConfigError::new(
                "mode",
                format!(
                    "unknown mode `{s}`, expected one of oscillate, entropy, flavor-corr, validate, map-params"
                ),
            )
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = ConfigError;

    fn from_str(s: &str) -> std::result::Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(ConfigError::new(
                "output.format",
                format!("unknown format `{s}`, expected csv or json"),
            )),
        }
    }
}

/// Physical inputs, before conversion to walk angles.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum PhysicalInput {
    Direct {
        masses_ev: [f64; 3],
        momentum_ev: f64,
        dt_seconds: f64,
    },
    Splittings {
        #[serde(flatten)]
        params: PhysicalParams,
        theta1: f64,
        ktilde: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        dt_seconds: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parameters {
    Walk(WalkParams),
    Physical(PhysicalInput),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WavepacketConfig {
    pub ktilde0: f64,
    pub xi: f64,
    pub spacing: f64,
    pub epsilon: Vec<f64>,
}

impl WavepacketConfig {
    pub fn specs(&self) -> Vec<WavepacketSpec> {
        self.epsilon
            .iter()
            .map(|&epsilon| WavepacketSpec {
                ktilde0: self.ktilde0,
                epsilon,
                xi: self.xi,
                spacing: self.spacing,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub steps: u64,
    pub stride: u64,
    pub encoding: Encoding,
    pub source: Flavor,
    pub parameters: Parameters,
    pub pmns: MixingParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavepacket: Option<WavepacketConfig>,
    pub output: OutputConfig,
}

impl RunConfig {
    /// Walk angles for this run and any regime warnings raised on the way.
    pub fn walk_params(&self) -> Result<(WalkParams, Vec<RegimeWarning>)> {
        let walk = match &self.parameters {
            Parameters::Walk(w) => *w,
            Parameters::Physical(PhysicalInput::Direct {
                masses_ev,
                momentum_ev,
                dt_seconds,
            }) => {
                let mapped = map_physical_to_walk(*masses_ev, *momentum_ev, *dt_seconds)?;
                return Ok((mapped.walk, mapped.warnings));
            }
            Parameters::Physical(PhysicalInput::Splittings {
                params,
                theta1,
                ktilde,
                dt_seconds,
            }) => {
                let mut w = match_splittings(params, *theta1, *ktilde, self.steps)?;
                w.dt_seconds = *dt_seconds;
                w.a_meters = dt_seconds.map(|dt| dt * crate::oscillation::constants::SPEED_OF_LIGHT);
                w
            }
        };
        let warnings = walk.regime_warnings();
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok((walk, warnings))
    }

    /// The resolved configuration as `key.path = value` lines.
    pub fn describe(&self) -> Vec<String> {
        let value = serde_json::to_value(self).expect("config serializes to JSON");
        let mut lines = Vec::new();
        flatten("", &value, &mut lines);
        lines
    }
}

fn flatten(prefix: &str, value: &serde_json::Value, out: &mut Vec<String>) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        other => out.push(format!("{prefix} = {other}")),
    }
}

/// Command-line values that replace the corresponding config keys.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub steps: Option<u64>,
    pub stride: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<Mode>,
    steps: Option<u64>,
    stride: Option<u64>,
    encoding: Option<Encoding>,
    source: Option<Flavor>,
    walk: Option<RawWalk>,
    physical: Option<RawPhysical>,
    pmns: Option<RawPmns>,
    wavepacket: Option<RawWavepacket>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWalk {
    theta: Option<[f64; 3]>,
    theta_deg: Option<[f64; 3]>,
    ktilde: Option<f64>,
    ktilde_deg: Option<f64>,
    dt_seconds: Option<f64>,
    a_meters: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhysical {
    masses_ev: Option<[f64; 3]>,
    momentum_ev: Option<f64>,
    dt_seconds: Option<f64>,
    dm21_sq: Option<f64>,
    dm31_sq: Option<f64>,
    dm32_sq: Option<f64>,
    energy_gev: Option<f64>,
    baseline_km: Option<f64>,
    theta1: Option<f64>,
    theta1_deg: Option<f64>,
    ktilde: Option<f64>,
    ktilde_deg: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPmns {
    theta12: Option<f64>,
    theta12_deg: Option<f64>,
    theta13: Option<f64>,
    theta13_deg: Option<f64>,
    theta23: Option<f64>,
    theta23_deg: Option<f64>,
    delta: Option<f64>,
    delta_deg: Option<f64>,
    alpha1: Option<f64>,
    alpha1_deg: Option<f64>,
    alpha2: Option<f64>,
    alpha2_deg: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWavepacket {
    ktilde0: Option<f64>,
    ktilde0_deg: Option<f64>,
    xi: Option<f64>,
    spacing: Option<f64>,
    spacing_deg: Option<f64>,
    epsilon: Option<Vec<f64>>,
    epsilon_deg: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    format: Option<Format>,
}

const REQUIRED_PARAMETERS: &str = "walk.theta, or [physical] with masses_ev, momentum_ev, dt_seconds \
     or with dm21_sq, dm31_sq, energy_gev, baseline_km";

/// Parses and resolves a config with no command-line overrides.
pub fn parse_config(text: &str) -> std::result::Result<RunConfig, ConfigError> {
    parse_config_with(text, &Overrides::default())
}

pub fn parse_config_with(
    text: &str,
    overrides: &Overrides,
) -> std::result::Result<RunConfig, ConfigError> {
    let raw = deserialize(text)?;
    resolve(raw, overrides)
}

/// Reads, parses and resolves a config file.
pub fn load_config(path: &std::path::Path, overrides: &Overrides) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_config_with(&text, overrides)?)
}

fn deserialize(text: &str) -> std::result::Result<RawConfig, ConfigError> {
    let line_of = |span: Option<std::ops::Range<usize>>| {
        span.map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
    };
    let de = toml::Deserializer::parse(text).map_err(|e| ConfigError {
        key: String::new(),
        line: line_of(e.span()),
        message: e.message().trim().to_string(),
    })?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let key = e.path().to_string();
        let inner = e.into_inner();
        ConfigError {
            key: if key == "." { String::new() } else { key },
            line: line_of(inner.span()),
            message: inner.message().trim().to_string(),
        }
    })
}

fn angle(
    key: &str,
    radians: Option<f64>,
    degrees: Option<f64>,
) -> std::result::Result<Option<f64>, ConfigError> {
    match (radians, degrees) {
        (Some(_), Some(_)) => Err(ConfigError::new(
            key,
            format!("give either `{0}` or `{0}_deg`, not both", key.rsplit('.').next().unwrap_or(key)),
        )),
        (Some(r), None) => Ok(Some(r)),
        (None, Some(d)) => Ok(Some(d.to_radians())),
        (None, None) => Ok(None),
    }
}

fn angles<const N: usize>(
    key: &str,
    radians: Option<[f64; N]>,
    degrees: Option<[f64; N]>,
) -> std::result::Result<Option<[f64; N]>, ConfigError> {
    match (radians, degrees) {
        (Some(_), Some(_)) => Err(ConfigError::new(
            key,
            format!("give either `{0}` or `{0}_deg`, not both", key.rsplit('.').next().unwrap_or(key)),
        )),
        (Some(r), None) => Ok(Some(r)),
        (None, Some(d)) => Ok(Some(d.map(f64::to_radians))),
        (None, None) => Ok(None),
    }
}

fn check(key: &str, result: Result<()>) -> std::result::Result<(), ConfigError> {
    result.map_err(|e| ConfigError::new(key, e.to_string()))
}

fn resolve(raw: RawConfig, overrides: &Overrides) -> std::result::Result<RunConfig, ConfigError> {
    let mode = overrides.mode.or(raw.mode);
    let parameters_given = raw.walk.is_some() || raw.physical.is_some();
    match (mode, parameters_given) {
        (None, false) => {
            return Err(ConfigError::new(
                "",
                format!("missing required keys: mode; {REQUIRED_PARAMETERS}"),
            ))
        }
        (None, true) => return Err(ConfigError::new("mode", "missing required key `mode`")),
        (Some(_), false) => {
            return Err(ConfigError::new(
                "",
                format!("missing required keys: {REQUIRED_PARAMETERS}"),
            ))
        }
        (Some(_), true) => {}
    }
    let mode = mode.expect("checked above");

    let steps = overrides.steps.or(raw.steps).unwrap_or(DEFAULT_STEPS);
    let stride = overrides.stride.or(raw.stride).unwrap_or(1);
    if stride == 0 {
        return Err(ConfigError::new("stride", "stride must be at least 1"));
    }

    let parameters = match (raw.walk, raw.physical) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::new(
                "",
                "give either [walk] or [physical] parameters, not both",
            ))
        }
        (Some(w), None) => Parameters::Walk(resolve_walk(w)?),
        (None, Some(p)) => Parameters::Physical(resolve_physical(p)?),
        (None, None) => unreachable!("checked above"),
    };

    let pmns = resolve_pmns(raw.pmns.unwrap_or_default())?;

    let wavepacket = match (raw.wavepacket, mode) {
        (Some(w), _) => Some(resolve_wavepacket(w, mode)?),
        (None, Mode::Entropy | Mode::FlavorCorr) => {
            Some(resolve_wavepacket(RawWavepacket::default(), mode)?)
        }
        (None, _) => None,
    };
    if let Some(w) = &wavepacket {
        if w.epsilon.len() != 1 && matches!(mode, Mode::Oscillate | Mode::FlavorCorr) {
            return Err(ConfigError::new(
                "wavepacket.epsilon",
                format!("mode {mode} takes a single epsilon, got {}", w.epsilon.len()),
            ));
        }
    }

    let raw_output = raw.output.unwrap_or_default();
    let output = OutputConfig {
        path: overrides.out.clone().or(raw_output.path),
        format: overrides.format.or(raw_output.format).unwrap_or_default(),
    };

    Ok(RunConfig {
        mode,
        steps,
        stride,
        encoding: raw.encoding.unwrap_or_default(),
        source: raw.source.unwrap_or(Flavor::Electron),
        parameters,
        pmns,
        wavepacket,
        output,
    })
}

fn resolve_walk(w: RawWalk) -> std::result::Result<WalkParams, ConfigError> {
    let theta = angles("walk.theta", w.theta, w.theta_deg)?
        .ok_or_else(|| ConfigError::new("walk.theta", "missing required key `theta`"))?;
    let ktilde = angle("walk.ktilde", w.ktilde, w.ktilde_deg)?.unwrap_or(DEFAULT_KTILDE);
    let params = WalkParams {
        theta,
        ktilde,
        dt_seconds: w.dt_seconds,
        a_meters: w.a_meters,
    };
    check("walk", params.validate())?;
    for (key, v) in [("walk.dt_seconds", w.dt_seconds), ("walk.a_meters", w.a_meters)] {
        if let Some(v) = v {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ConfigError::new(key, format!("must be positive, got {v}")));
            }
        }
    }
    Ok(params)
}

fn resolve_physical(p: RawPhysical) -> std::result::Result<PhysicalInput, ConfigError> {
    let direct_given = p.masses_ev.is_some() || p.momentum_ev.is_some();
    let splitting_keys = [
        ("dm21_sq", p.dm21_sq.is_some()),
        ("dm31_sq", p.dm31_sq.is_some()),
        ("dm32_sq", p.dm32_sq.is_some()),
        ("energy_gev", p.energy_gev.is_some()),
        ("baseline_km", p.baseline_km.is_some()),
        ("theta1", p.theta1.is_some() || p.theta1_deg.is_some()),
        ("ktilde", p.ktilde.is_some() || p.ktilde_deg.is_some()),
    ];
    let splittings_given = splitting_keys.iter().any(|(_, given)| *given);

    if direct_given && splittings_given {
        return Err(ConfigError::new(
            "physical",
            "give either masses_ev/momentum_ev/dt_seconds or the splitting keys, not both",
        ));
    }

    let require = |key: &str, v: Option<f64>| {
        v.ok_or_else(|| ConfigError::new(format!("physical.{key}"), format!("missing required key `{key}`")))
    };

    if direct_given {
        let masses_ev = p.masses_ev.ok_or_else(|| {
            ConfigError::new("physical.masses_ev", "missing required key `masses_ev`")
        })?;
        let input = PhysicalInput::Direct {
            masses_ev,
            momentum_ev: require("momentum_ev", p.momentum_ev)?,
            dt_seconds: require("dt_seconds", p.dt_seconds)?,
        };
        if let PhysicalInput::Direct {
            masses_ev,
            momentum_ev,
            dt_seconds,
        } = input
        {
            check("physical", map_physical_to_walk(masses_ev, momentum_ev, dt_seconds).map(|_| ()))?;
        }
        return Ok(input);
    }

    let dm21_sq = require("dm21_sq", p.dm21_sq)?;
    let dm31_sq = require("dm31_sq", p.dm31_sq)?;
    let params = PhysicalParams {
        dm21_sq,
        dm31_sq,
        dm32_sq: p.dm32_sq.unwrap_or(dm31_sq - dm21_sq),
        energy_gev: require("energy_gev", p.energy_gev)?,
        baseline_km: require("baseline_km", p.baseline_km)?,
    };
    check("physical", params.validate())?;
    if let Some(dt) = p.dt_seconds {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(ConfigError::new(
                "physical.dt_seconds",
                format!("must be positive, got {dt}"),
            ));
        }
    }
    Ok(PhysicalInput::Splittings {
        params,
        theta1: angle("physical.theta1", p.theta1, p.theta1_deg)?.unwrap_or(DEFAULT_THETA1),
        ktilde: angle("physical.ktilde", p.ktilde, p.ktilde_deg)?.unwrap_or(DEFAULT_KTILDE),
        dt_seconds: p.dt_seconds,
    })
}

fn resolve_pmns(p: RawPmns) -> std::result::Result<MixingParams, ConfigError> {
    let d = MixingParams::default();
    let params = MixingParams {
        theta12: angle("pmns.theta12", p.theta12, p.theta12_deg)?.unwrap_or(d.theta12),
        theta13: angle("pmns.theta13", p.theta13, p.theta13_deg)?.unwrap_or(d.theta13),
        theta23: angle("pmns.theta23", p.theta23, p.theta23_deg)?.unwrap_or(d.theta23),
        delta: angle("pmns.delta", p.delta, p.delta_deg)?.unwrap_or(d.delta),
        alpha1: angle("pmns.alpha1", p.alpha1, p.alpha1_deg)?.unwrap_or(d.alpha1),
        alpha2: angle("pmns.alpha2", p.alpha2, p.alpha2_deg)?.unwrap_or(d.alpha2),
    };
    check("pmns", params.validate())?;
    Ok(params)
}

fn resolve_wavepacket(
    w: RawWavepacket,
    mode: Mode,
) -> std::result::Result<WavepacketConfig, ConfigError> {
    let d = WavepacketSpec::default();
    let epsilon = match (w.epsilon, w.epsilon_deg) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::new(
                "wavepacket.epsilon",
                "give either `epsilon` or `epsilon_deg`, not both",
            ))
        }
        (Some(e), None) => e,
        (None, Some(e)) => e.into_iter().map(f64::to_radians).collect(),
        (None, None) if mode == Mode::FlavorCorr => vec![0.01],
        (None, None) => vec![0.02, 0.05, 0.15],
    };
    if epsilon.is_empty() {
        return Err(ConfigError::new("wavepacket.epsilon", "epsilon list is empty"));
    }
    let config = WavepacketConfig {
        ktilde0: angle("wavepacket.ktilde0", w.ktilde0, w.ktilde0_deg)?.unwrap_or(d.ktilde0),
        xi: w.xi.unwrap_or(d.xi),
        spacing: angle("wavepacket.spacing", w.spacing, w.spacing_deg)?.unwrap_or(d.spacing),
        epsilon,
    };
    for spec in config.specs() {
        check("wavepacket", spec.validate())?;
    }
    Ok(config)
}
