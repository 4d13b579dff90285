//! Scenario configuration: one JSON document per run, validated against the
//! scenario's schema before anything is computed.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use whitham_core::kdv::{Periodization, SpectralGrid};
use whitham_core::InitialProfile;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    Cnoidal,
    GpStep,
    Dsw,
    Edge,
    Kdv,
    Compare,
    Edges,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 7] = [
        ScenarioName::Cnoidal,
        ScenarioName::GpStep,
        ScenarioName::Dsw,
        ScenarioName::Edge,
        ScenarioName::Kdv,
        ScenarioName::Compare,
        ScenarioName::Edges,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::Cnoidal => "cnoidal",
            ScenarioName::GpStep => "gp-step",
            ScenarioName::Dsw => "dsw",
            ScenarioName::Edge => "edge",
            ScenarioName::Kdv => "kdv",
            ScenarioName::Compare => "compare",
            ScenarioName::Edges => "edges",
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| CliError::Config(format!("scenario: unknown scenario `{s}`")))
    }
}

/// Direct-solver grid. All three fields must be given together.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lx: f64,
    pub n: usize,
    pub dt: f64,
}

impl GridConfig {
    pub fn spectral(&self, epsilon: f64) -> whitham_core::Result<SpectralGrid> {
        SpectralGrid::new(self.lx, self.n, epsilon, self.dt)
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CnoidalConfig {
    #[serde(default = "CnoidalConfig::default_beta")]
    pub beta: [f64; 3],
    #[serde(default = "CnoidalConfig::default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub phi0: f64,
    #[serde(default)]
    pub t: f64,
    /// Number of wavelengths sampled.
    #[serde(default = "CnoidalConfig::default_periods")]
    pub periods: f64,
    #[serde(default = "CnoidalConfig::default_points")]
    pub points: usize,
}

impl CnoidalConfig {
    fn default_beta() -> [f64; 3] {
        [1.0, 0.5, 0.0]
    }
    fn default_epsilon() -> f64 {
        0.1
    }
    fn default_periods() -> f64 {
        2.0
    }
    fn default_points() -> usize {
        1000
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GpStepConfig {
    #[serde(default = "GpStepConfig::default_c")]
    pub c: f64,
    #[serde(default = "GpStepConfig::default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "GpStepConfig::default_t")]
    pub t: f64,
    /// Phase `φ₀` of the modulated wave, left free by the construction.
    #[serde(default)]
    pub phase: f64,
    /// Mollification width of the step in the direct run; `ε` if absent.
    #[serde(default)]
    pub width: Option<f64>,
    #[serde(default = "GpStepConfig::default_grid")]
    pub grid: GridConfig,
    #[serde(default = "default_true")]
    pub direct: bool,
}

impl GpStepConfig {
    fn default_c() -> f64 {
        1.0
    }
    fn default_epsilon() -> f64 {
        0.15
    }
    fn default_t() -> f64 {
        1.0
    }
    fn default_grid() -> GridConfig {
        GridConfig {
            lx: 60.0,
            n: 4096,
            dt: 1e-3,
        }
    }
    pub fn width(&self) -> f64 {
        self.width.unwrap_or(self.epsilon)
    }
    pub fn profile(&self) -> InitialProfile {
        InitialProfile::SmoothStep {
            c: self.c,
            width: self.width(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DswConfig {
    pub profile: InitialProfile,
    #[serde(default = "DswConfig::default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "DswConfig::default_times")]
    pub times: Vec<f64>,
    #[serde(default = "DswConfig::default_points")]
    pub points: usize,
    /// Distance sampled on either side of the zone.
    #[serde(default = "DswConfig::default_margin")]
    pub margin: f64,
}

impl DswConfig {
    fn default_epsilon() -> f64 {
        1e-2
    }
    fn default_times() -> Vec<f64> {
        vec![0.3, 0.4]
    }
    fn default_points() -> usize {
        2000
    }
    fn default_margin() -> f64 {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HmConfig {
    pub l: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeConfig {
    pub profile: InitialProfile,
    #[serde(default = "EdgeConfig::default_t")]
    pub t: f64,
    #[serde(default = "EdgeConfig::default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "EdgeConfig::default_hm")]
    pub hm: HmConfig,
    #[serde(default = "EdgeConfig::default_grid")]
    pub grid: GridConfig,
    /// Half-width of the overlay window in units of the layer scale.
    #[serde(default = "EdgeConfig::default_window")]
    pub window: f64,
    #[serde(default = "default_true")]
    pub direct: bool,
}

impl EdgeConfig {
    fn default_t() -> f64 {
        0.4
    }
    fn default_epsilon() -> f64 {
        1e-2
    }
    fn default_hm() -> HmConfig {
        HmConfig { l: 10.0, n: 2001 }
    }
    fn default_grid() -> GridConfig {
        GridConfig {
            lx: 20.0,
            n: 1 << 14,
            dt: 1e-4,
        }
    }
    fn default_window() -> f64 {
        3.0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KdvConfig {
    pub profile: InitialProfile,
    pub epsilon: f64,
    pub grid: GridConfig,
    pub t_end: f64,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default)]
    pub periodization: Periodization,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub profile: InitialProfile,
    #[serde(default = "DswConfig::default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "DswConfig::default_times")]
    pub times: Vec<f64>,
    #[serde(default = "EdgeConfig::default_grid")]
    pub grid: GridConfig,
    /// Edge buffers are `buffer · ε^{2/3}` wide.
    #[serde(default = "CompareConfig::default_buffer")]
    pub buffer: f64,
    #[serde(default = "DswConfig::default_margin")]
    pub margin: f64,
}

impl CompareConfig {
    fn default_buffer() -> f64 {
        5.0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgesConfig {
    pub profile: InitialProfile,
    /// First time is `t_c + offset`.
    #[serde(default = "EdgesConfig::default_offset")]
    pub offset: f64,
    #[serde(default = "EdgesConfig::default_t_end")]
    pub t_end: f64,
    #[serde(default = "EdgesConfig::default_count")]
    pub count: usize,
}

impl EdgesConfig {
    fn default_offset() -> f64 {
        1e-3
    }
    fn default_t_end() -> f64 {
        0.6
    }
    fn default_count() -> usize {
        50
    }
}

/// A fully resolved configuration.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "scenario", rename_all = "kebab-case")]
pub enum ScenarioConfig {
    Cnoidal(CnoidalConfig),
    GpStep(GpStepConfig),
    Dsw(DswConfig),
    Edge(EdgeConfig),
    Kdv(KdvConfig),
    Compare(CompareConfig),
    Edges(EdgesConfig),
}

fn parse<T: DeserializeOwned>(v: Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        let at = if path == "." { String::new() } else { format!("{path}: ") };
        CliError::Config(format!("{at}{}", e.inner()))
    })
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name}: must be positive, got {v}")))
    }
}

fn times(name: &str, ts: &[f64]) -> Result<(), CliError> {
    if ts.is_empty() {
        return Err(CliError::Config(format!("{name}: at least one time is required")));
    }
    for t in ts {
        positive(name, *t)?;
    }
    Ok(())
}

impl ScenarioConfig {
    /// Parse a config document. `expected` is the scenario named on the
    /// command line; the document may omit its `scenario` field then.
    pub fn from_value(mut v: Value, expected: Option<ScenarioName>) -> Result<Self, CliError> {
        let obj = v
            .as_object_mut()
            .ok_or_else(|| CliError::Config("config must be a JSON object".into()))?;
        let named = match obj.remove("scenario") {
            None => None,
            Some(Value::String(s)) => Some(s.parse::<ScenarioName>()?),
            Some(other) => return Err(CliError::Config(format!("scenario: expected a string, got {other}"))),
        };
        let name = match (named, expected) {
            (Some(a), Some(b)) if a != b => {
                return Err(CliError::Config(format!(
                    "scenario: config is for `{a}` but `{b}` was requested"
                )))
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => return Err(CliError::Config("scenario: missing field `scenario`".into())),
        };
        let cfg = match name {
            ScenarioName::Cnoidal => ScenarioConfig::Cnoidal(parse(v)?),
            ScenarioName::GpStep => {
                let mut c: GpStepConfig = parse(v)?;
                c.width = Some(c.width());
                ScenarioConfig::GpStep(c)
            }
            ScenarioName::Dsw => ScenarioConfig::Dsw(parse(v)?),
            ScenarioName::Edge => ScenarioConfig::Edge(parse(v)?),
            ScenarioName::Kdv => ScenarioConfig::Kdv(parse(v)?),
            ScenarioName::Compare => ScenarioConfig::Compare(parse(v)?),
            ScenarioName::Edges => ScenarioConfig::Edges(parse(v)?),
        };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, expected: Option<ScenarioName>) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: invalid JSON: {e}", path.display())))?;
        Self::from_value(v, expected)
    }

    pub fn name(&self) -> ScenarioName {
        match self {
            ScenarioConfig::Cnoidal(_) => ScenarioName::Cnoidal,
            ScenarioConfig::GpStep(_) => ScenarioName::GpStep,
            ScenarioConfig::Dsw(_) => ScenarioName::Dsw,
            ScenarioConfig::Edge(_) => ScenarioName::Edge,
            ScenarioConfig::Kdv(_) => ScenarioName::Kdv,
            ScenarioConfig::Compare(_) => ScenarioName::Compare,
            ScenarioConfig::Edges(_) => ScenarioName::Edges,
        }
    }

    /// Range checks that serde cannot express.
    fn check(&self) -> Result<(), CliError> {
        let profile = match self {
            ScenarioConfig::Cnoidal(c) => {
                positive("epsilon", c.epsilon)?;
                positive("periods", c.periods)?;
                if c.points < 2 {
                    return Err(CliError::Config("points: need at least 2".into()));
                }
                whitham_core::RiemannTriple::new(c.beta[0], c.beta[1], c.beta[2])
                    .map_err(|e| CliError::Config(format!("beta: {e}")))?;
                None
            }
            ScenarioConfig::GpStep(c) => {
                positive("c", c.c)?;
                positive("epsilon", c.epsilon)?;
                positive("t", c.t)?;
                positive("width", c.width())?;
                if !c.phase.is_finite() {
                    return Err(CliError::Config(format!("phase: must be finite, got {}", c.phase)));
                }
                None
            }
            ScenarioConfig::Dsw(c) => {
                positive("epsilon", c.epsilon)?;
                times("times", &c.times)?;
                if c.points < 2 {
                    return Err(CliError::Config("points: need at least 2".into()));
                }
                Some(&c.profile)
            }
            ScenarioConfig::Edge(c) => {
                positive("epsilon", c.epsilon)?;
                positive("t", c.t)?;
                positive("window", c.window)?;
                Some(&c.profile)
            }
            ScenarioConfig::Kdv(c) => {
                positive("epsilon", c.epsilon)?;
                positive("t_end", c.t_end)?;
                Some(&c.profile)
            }
            ScenarioConfig::Compare(c) => {
                positive("epsilon", c.epsilon)?;
                times("times", &c.times)?;
                Some(&c.profile)
            }
            ScenarioConfig::Edges(c) => {
                positive("offset", c.offset)?;
                if c.count < 2 {
                    return Err(CliError::Config("count: need at least 2".into()));
                }
                Some(&c.profile)
            }
        };
        if let Some(p) = profile {
            p.validate().map_err(|e| match e {
                whitham_core::Error::Configuration(m) => CliError::Config(format!("profile: {m}")),
                other => CliError::Config(format!("profile: {other}")),
            })?;
        }
        Ok(())
    }

    /// Resolved config as JSON, including every default.
    pub fn resolved(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// SHA-256 of the resolved config.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(&self.resolved()).expect("config serializes");
        hex(&Sha256::digest(text.as_bytes()))
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
