//! Run configuration: schema validation, parsing and scene resolution.

use std::fmt;

use chernlab_core::geometry::MetricField;
use chernlab_core::global::ProbeOptions;
use chernlab_core::maps::HolomorphicMapField;
use chernlab_core::registry::{build_map, build_metric};
use chernlab_core::scenes::{bochner_scene, EntryRef};
use chernlab_core::{ChartPoint, FdConfig, GridSpec, C64};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::RunError;

pub const CONFIG_SCHEMA: &str = include_str!("../schemas/config.schema.json");
pub const REPORT_SCHEMA: &str = include_str!("../schemas/report.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Curvature,
    Bochner1,
    Bochner2,
    SchwarzA,
    SchwarzB,
    SchwarzC,
    Rigidity,
    Integral,
    Gauduchon,
    Kahler,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Curvature => "curvature",
            Suite::Bochner1 => "bochner1",
            Suite::Bochner2 => "bochner2",
            Suite::SchwarzA => "schwarz-a",
            Suite::SchwarzB => "schwarz-b",
            Suite::SchwarzC => "schwarz-c",
            Suite::Rigidity => "rigidity",
            Suite::Integral => "integral",
            Suite::Gauduchon => "gauduchon",
            Suite::Kahler => "kahler",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Either a registered scene name or explicit registry entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SceneRef {
    Named(String),
    Inline(InlineScene),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineScene {
    pub domain: EntryRef,
    #[serde(default)]
    pub target: Option<EntryRef>,
    #[serde(default)]
    pub map: Option<EntryRef>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdOverrides {
    pub step: Option<f64>,
    pub richardson: Option<bool>,
    pub min_domain_margin: Option<f64>,
}

impl FdOverrides {
    pub fn resolve(&self) -> FdConfig {
        let base = FdConfig::default();
        let step = self.step.unwrap_or(base.step);
        let richardson = self.richardson.unwrap_or(base.richardson);
        let mut cfg = if self.step.is_some() {
            FdConfig::with_step(step, richardson)
        } else {
            FdConfig { richardson, ..base }
        };
        if let Some(m) = self.min_domain_margin {
            cfg.min_domain_margin = m;
        }
        cfg
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeOverrides {
    pub n_samples: Option<usize>,
    pub refine_steps: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Pass threshold for identity residuals (default: per-report FD tolerance).
    pub residual: Option<f64>,
    /// Allowed negative eigenvalue of Gram forms.
    pub gram: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub suite: Option<Suite>,
    pub scene: SceneRef,
    #[serde(default)]
    pub points: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub ell: Option<usize>,
    #[serde(default)]
    pub fd: FdOverrides,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub probe: ProbeOverrides,
    #[serde(default)]
    pub tolerance: Tolerances,
}

fn schema_validator(schema: &str) -> jsonschema::Validator {
    let schema: Value = serde_json::from_str(schema).expect("bundled schema is valid JSON");
    jsonschema::validator_for(&schema).expect("bundled schema compiles")
}

/// Checks `doc` against a bundled schema, returning every violation.
pub fn validate_against(schema: &str, doc: &Value) -> Result<(), Vec<String>> {
    let v = schema_validator(schema);
    let errors: Vec<String> = v
        .iter_errors(doc)
        .map(|e| format!("{} at '{}'", e, e.instance_path()))
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

impl RunConfig {
    /// Parses and validates a config document.
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        let doc: Value = serde_json::from_str(text).map_err(|e| RunError::invalid(format!("config is not valid JSON: {e}")))?;
        validate_against(CONFIG_SCHEMA, &doc)
            .map_err(|errs| RunError::invalid(format!("config violates the schema: {}", errs.join("; "))))?;
        let cfg: RunConfig =
            serde_json::from_value(doc).map_err(|e| RunError::invalid(format!("config is malformed: {e}")))?;
        if cfg.ell == Some(0) {
            return Err(RunError::invalid("ell must be at least 1"));
        }
        cfg.fd.resolve().validate().map_err(RunError::from)?;
        Ok(cfg)
    }

    pub fn probe_options(&self) -> ProbeOptions {
        let d = ProbeOptions::default();
        ProbeOptions {
            n_samples: self.probe.n_samples.unwrap_or(d.n_samples),
            seed: self.seed,
            refine_steps: self.probe.refine_steps.unwrap_or(d.refine_steps),
        }
    }
}

/// The built objects of a scene plus the defaults it carries.
pub struct Resolved {
    pub name: Option<String>,
    pub domain: EntryRef,
    pub target: Option<EntryRef>,
    pub map: Option<EntryRef>,
    pub g: MetricField,
    pub h: Option<MetricField>,
    pub f: Option<HolomorphicMapField>,
    pub default_points: Vec<ChartPoint>,
    pub default_ells: Vec<usize>,
}

impl Resolved {
    pub fn describe(&self) -> Value {
        serde_json::json!({
            "name": self.name,
            "domain": self.domain,
            "target": self.target,
            "map": self.map,
        })
    }

    pub fn pair(&self) -> Result<(&MetricField, &HolomorphicMapField), RunError> {
        match (&self.h, &self.f) {
            (Some(h), Some(f)) => Ok((h, f)),
            _ => Err(RunError::invalid("this suite needs a scene with a target metric and a map")),
        }
    }
}

pub fn resolve_scene(scene: &SceneRef) -> Result<Resolved, RunError> {
    let (name, domain, target, map, points, ells) = match scene {
        SceneRef::Named(n) => {
            let s = bochner_scene(n).ok_or_else(|| RunError::invalid(format!("unknown scene '{n}'")))?;
            let built = s.build()?;
            (Some(s.name), s.domain, Some(s.target), Some(s.map), built.points, s.ells)
        }
        SceneRef::Inline(s) => (None, s.domain.clone(), s.target.clone(), s.map.clone(), Vec::new(), Vec::new()),
    };
    if target.is_some() != map.is_some() {
        return Err(RunError::invalid("scene needs both a target and a map, or neither"));
    }
    let g = build_metric(&domain.id, &domain.params)?;
    let h = target.as_ref().map(|t| build_metric(&t.id, &t.params)).transpose()?;
    let f = map.as_ref().map(|m| build_map(&m.id, &m.params)).transpose()?;
    if let (Some(h), Some(f)) = (&h, &f) {
        if f.dim_in() != g.dim() || f.dim_out() != h.dim() {
            return Err(RunError::invalid(format!(
                "map '{}' is C^{} → C^{}, but the metrics have dimensions {} and {}",
                f.label(),
                f.dim_in(),
                f.dim_out(),
                g.dim(),
                h.dim()
            )));
        }
    }
    Ok(Resolved {
        name,
        domain,
        target,
        map,
        g,
        h,
        f,
        default_points: points,
        default_ells: ells,
    })
}

pub fn parse_points(raw: &[Vec<[f64; 2]>], dim: usize) -> Result<Vec<ChartPoint>, RunError> {
    raw.iter()
        .map(|p| {
            if p.len() != dim {
                return Err(RunError::invalid(format!("point has {} coordinates, expected {dim}", p.len())));
            }
            ChartPoint::new(p.iter().map(|&[re, im]| C64::new(re, im)).collect()).map_err(RunError::from)
        })
        .collect()
}
