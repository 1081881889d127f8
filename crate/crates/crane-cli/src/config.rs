//! Scenario configuration: JSON schema, defaults, bundled presets, and
//! conversion into the library types.

use crane_core::certify::{DEFAULT_CERTIFY_SEED, DEFAULT_SIGMA_SAMPLES};
use crane_core::sim::{IntegrationMethod, IntegratorOptions};
use crane_core::synthesis::PoleSet;
use crane_core::{ActuationVariant, CraneError, CraneParams, State};
use nalgebra::Complex;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub trolley_mass: f64,
    pub hook_mass: f64,
    pub payload_mass: f64,
    pub hook_inertia: f64,
    pub payload_inertia: f64,
    pub payload_rope: f64,
    pub gravity: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        let p = CraneParams::default();
        ParamsConfig {
            trolley_mass: p.trolley_mass,
            hook_mass: p.hook_mass,
            payload_mass: p.payload_mass,
            hook_inertia: p.hook_inertia,
            payload_inertia: p.payload_inertia,
            payload_rope: p.payload_rope,
            gravity: p.gravity,
        }
    }
}

impl From<ParamsConfig> for CraneParams {
    fn from(c: ParamsConfig) -> Self {
        CraneParams {
            trolley_mass: c.trolley_mass,
            hook_mass: c.hook_mass,
            payload_mass: c.payload_mass,
            hook_inertia: c.hook_inertia,
            payload_inertia: c.payload_inertia,
            payload_rope: c.payload_rope,
            gravity: c.gravity,
        }
    }
}

/// A pole entry: plain number for a real pole, `{re, im}` for a complex one.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum PoleEntry {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl PoleEntry {
    pub fn to_complex(self) -> Complex<f64> {
        match self {
            PoleEntry::Real(re) => Complex::new(re, 0.0),
            PoleEntry::Complex { re, im } => Complex::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum VariantConfig {
    Underactuated,
    FullyActuated,
}

impl From<VariantConfig> for ActuationVariant {
    fn from(v: VariantConfig) -> Self {
        match v {
            VariantConfig::Underactuated => ActuationVariant::Underactuated,
            VariantConfig::FullyActuated => ActuationVariant::FullyActuated,
        }
    }
}

/// Where the feedback gain comes from: synthesized by pole placement, or
/// the published reference gain for the default data set.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, clap::ValueEnum, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GainSource {
    #[default]
    Place,
    Reference,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum MethodConfig {
    Rk45Adaptive,
    Rk4Fixed,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub method: MethodConfig,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub fixed_step: f64,
    pub t_end: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        let o = IntegratorOptions::default();
        IntegratorConfig {
            method: MethodConfig::Rk45Adaptive,
            rel_tol: o.rel_tol,
            abs_tol: o.abs_tol,
            max_step: o.max_step,
            fixed_step: o.fixed_step,
            t_end: o.t_end,
        }
    }
}

impl From<IntegratorConfig> for IntegratorOptions {
    fn from(c: IntegratorConfig) -> Self {
        IntegratorOptions {
            method: match c.method {
                MethodConfig::Rk45Adaptive => IntegrationMethod::Rk45Adaptive,
                MethodConfig::Rk4Fixed => IntegrationMethod::Rk4Fixed,
            },
            rel_tol: c.rel_tol,
            abs_tol: c.abs_tol,
            max_step: c.max_step,
            fixed_step: c.fixed_step,
            t_end: c.t_end,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct CertifyConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub max_bisections: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            n_samples: DEFAULT_SIGMA_SAMPLES,
            seed: DEFAULT_CERTIFY_SEED,
            max_bisections: 24,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputsConfig {
    pub csv: String,
    pub summary: String,
}

impl Default for OutputsConfig {
    fn default() -> Self {
        OutputsConfig {
            csv: "trajectory.csv".into(),
            summary: "summary.json".into(),
        }
    }
}

/// One fully-specified design-and-simulate scenario. The defaults equal the
/// bundled reference data set (underactuated variant, default pole set,
/// swing-damping initial state).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub params: ParamsConfig,
    pub variant: VariantConfig,
    pub gain: GainSource,
    pub poles: Vec<PoleEntry>,
    pub x0: [f64; 8],
    pub integrator: IntegratorConfig,
    pub certify: CertifyConfig,
    pub outputs: OutputsConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            params: ParamsConfig::default(),
            variant: VariantConfig::Underactuated,
            gain: GainSource::Place,
            poles: vec![
                PoleEntry::Real(-0.5),
                PoleEntry::Real(-1.0),
                PoleEntry::Real(-1.5),
                PoleEntry::Real(-2.0),
                PoleEntry::Real(-2.5),
                PoleEntry::Real(-3.0),
                PoleEntry::Real(-3.5),
                PoleEntry::Real(-4.0),
            ],
            x0: [0.234, 0.2, 0.0, -0.001, 0.0, 0.0, 0.0, 0.0],
            integrator: IntegratorConfig::default(),
            certify: CertifyConfig::default(),
            outputs: OutputsConfig::default(),
        }
    }
}

impl ScenarioConfig {
    /// Bundled scenario presets (`--figure 3|5|6|8`).
    pub fn figure_preset(n: u32) -> Result<Self, CraneError> {
        let mut cfg = ScenarioConfig::default();
        match n {
            3 => {}
            5 => {
                cfg.x0[0] = 0.235;
            }
            6 => {
                cfg.variant = VariantConfig::FullyActuated;
                cfg.integrator.t_end = 15.0;
            }
            8 => {
                cfg.variant = VariantConfig::FullyActuated;
                cfg.gain = GainSource::Reference;
                cfg.x0 = [3.0, 1.0, 0.0, -0.001, 0.0, 0.0, 0.0, 0.0];
                cfg.integrator.t_end = 15.0;
            }
            other => {
                return Err(CraneError::InvalidInput(format!(
                    "no bundled scenario preset number {other} (available: 3, 5, 6, 8)"
                )))
            }
        }
        Ok(cfg)
    }

    /// Parses and validates a JSON config file.
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let cfg: ScenarioConfig = serde_json::from_str(&text)
            .map_err(|e| format!("cannot parse config {}: {e}", path.display()))?;
        Ok(cfg)
    }

    pub fn crane_params(&self) -> CraneParams {
        self.params.clone().into()
    }

    pub fn actuation_variant(&self) -> ActuationVariant {
        self.variant.into()
    }

    pub fn pole_set(&self) -> Result<PoleSet, CraneError> {
        PoleSet::new(self.poles.iter().map(|p| p.to_complex()).collect())
    }

    pub fn initial_state(&self) -> State {
        State::from(self.x0)
    }

    pub fn integrator_options(&self) -> IntegratorOptions {
        self.integrator.clone().into()
    }

    /// Full validation before any computation.
    pub fn validate(&self) -> Result<(), CraneError> {
        self.crane_params().validate()?;
        self.crane_params().validate_for_synthesis()?;
        let poles = self.pole_set()?;
        if poles.len() != 8 {
            return Err(CraneError::InvalidInput(format!(
                "need 8 poles, got {}",
                poles.len()
            )));
        }
        if !poles.is_stable() {
            return Err(CraneError::InvalidInput(
                "all poles must have negative real part".into(),
            ));
        }
        if !self.x0.iter().all(|v| v.is_finite()) {
            return Err(CraneError::InvalidInput("x0 has non-finite entries".into()));
        }
        self.integrator_options().validate()?;
        if self.certify.n_samples == 0 {
            return Err(CraneError::InvalidInput(
                "certify.n_samples must be positive".into(),
            ));
        }
        if self.gain == GainSource::Reference && !self.is_reference_data_set() {
            return Err(CraneError::InvalidInput(
                "the reference gain is only valid for the default parameter and pole set".into(),
            ));
        }
        if self.outputs.csv.is_empty() || self.outputs.summary.is_empty() {
            return Err(CraneError::InvalidInput(
                "output paths must not be empty".into(),
            ));
        }
        Ok(())
    }

    /// Whether params and poles equal the defaults the reference gain was
    /// computed for.
    fn is_reference_data_set(&self) -> bool {
        let d = ScenarioConfig::default();
        self.params == d.params && self.poles == d.poles
    }

    /// Joins the output file names onto an output directory.
    pub fn rebase_outputs(&mut self, out_dir: &Path) {
        let join = |name: &str| out_dir.join(name).to_string_lossy().into_owned();
        self.outputs.csv = join(&self.outputs.csv);
        self.outputs.summary = join(&self.outputs.summary);
    }
}

/// Parses a comma-separated pole list; each entry is a real number or a
/// complex literal such as `-1+2i` / `-1-2i`.
pub fn parse_pole_list(text: &str) -> Result<Vec<PoleEntry>, String> {
    let mut out = Vec::new();
    for raw in text.split(',') {
        let item = raw.trim();
        if item.is_empty() {
            return Err("empty pole entry".into());
        }
        out.push(parse_pole(item)?);
    }
    Ok(out)
}

fn parse_pole(item: &str) -> Result<PoleEntry, String> {
    if let Ok(re) = item.parse::<f64>() {
        return Ok(PoleEntry::Real(re));
    }
    let inner = item
        .strip_suffix('i')
        .ok_or_else(|| format!("cannot parse pole '{item}'"))?;
    // Split at the sign of the imaginary part (skip a leading sign).
    let bytes = inner.as_bytes();
    let mut split = None;
    for pos in (1..bytes.len()).rev() {
        if (bytes[pos] == b'+' || bytes[pos] == b'-')
            && bytes[pos - 1] != b'e'
            && bytes[pos - 1] != b'E'
        {
            split = Some(pos);
            break;
        }
    }
    let pos = split.ok_or_else(|| format!("cannot parse pole '{item}'"))?;
    let re: f64 = inner[..pos]
        .parse()
        .map_err(|_| format!("cannot parse pole '{item}'"))?;
    let im_text = &inner[pos..];
    let im: f64 = if im_text == "+" {
        1.0
    } else if im_text == "-" {
        -1.0
    } else {
        im_text
            .parse()
            .map_err(|_| format!("cannot parse pole '{item}'"))?
    };
    Ok(PoleEntry::Complex { re, im })
}

/// Parses the 8 comma-separated initial-state components.
pub fn parse_state_list(text: &str) -> Result<[f64; 8], String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 8 {
        return Err(format!("x0 needs 8 components, got {}", parts.len()));
    }
    let mut out = [0.0; 8];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .parse()
            .map_err(|_| format!("cannot parse x0 component '{part}'"))?;
    }
    Ok(out)
}
