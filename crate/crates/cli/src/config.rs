//! JSON run configuration for the sweep and lemma subcommands.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use bianchi::field::CLASS_NUMBER_ONE;
use bianchi::hyperbolic::Region;
use bianchi::que::{ScheduleSpec, SWEEP_EPS};
use bianchi::FieldContext;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Field discriminant `D`.
    pub field: i64,
    /// Subcommand the file is meant for; checked when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<String>,
    #[serde(default = "default_regions")]
    pub regions: Vec<RegionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleConfig>,
    /// Pointwise Fourier truncation eps of the evaluator.
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Base Gauss node counts per axis, for regions that do not set their own.
    #[serde(default = "default_nodes")]
    pub nodes: [usize; 3],
    /// Number of critical zeros used by the critical-line sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeros: Option<usize>,
    /// Registry name of the test function for the whole-manifold lemma.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub id: String,
    pub x1: (f64, f64),
    pub x2: (f64, f64),
    pub y: (f64, f64),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    /// `constant_sigma` or `approach_one`.
    pub kind: String,
    #[serde(default)]
    pub params: ScheduleParams,
    pub t_grid: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_inf: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
}

fn default_regions() -> Vec<RegionConfig> {
    [("A", Region::default_a()), ("B", Region::default_b())]
        .into_iter()
        .map(|(id, r)| RegionConfig {
            id: id.into(),
            x1: r.x1_range,
            x2: r.x2_range,
            y: r.y_range,
            nodes: None,
        })
        .collect()
}

fn default_eps() -> f64 {
    SWEEP_EPS
}

fn default_nodes() -> [usize; 3] {
    [6, 6, 8]
}

impl RunConfig {
    /// Reads and validates a config file. Every failure is a config error.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if !CLASS_NUMBER_ONE.contains(&self.field) {
            return bad(format!("field {} is not one of {CLASS_NUMBER_ONE:?}", self.field));
        }
        if !(self.eps > 0.0 && self.eps <= 1e-3) {
            return bad(format!("eps must lie in (0, 1e-3], got {}", self.eps));
        }
        if self.nodes.iter().any(|&n| n < 2) {
            return bad(format!("node counts must be at least 2, got {:?}", self.nodes));
        }
        if self.regions.is_empty() {
            return bad("at least one region is required".into());
        }
        let mut seen = HashSet::new();
        for r in &self.regions {
            if r.id.is_empty() || !seen.insert(r.id.as_str()) {
                return bad(format!("region ids must be non-empty and unique, got {:?}", r.id));
            }
            if r.nodes.is_some_and(|n| n.iter().any(|&k| k < 2)) {
                return bad(format!("region {}: node counts must be at least 2", r.id));
            }
        }
        if self.zeros == Some(0) {
            return bad("zeros must be positive".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        if let Some(s) = &self.schedule {
            s.to_spec()?;
        }
        Ok(())
    }

    pub fn schedule_spec(&self) -> Result<ScheduleSpec, CliError> {
        self.schedule
            .as_ref()
            .ok_or_else(|| CliError::Config("this subcommand needs a schedule".into()))?
            .to_spec()
    }

    /// Certified boxes, in config order.
    pub fn certified_regions(&self, ctx: &FieldContext) -> Result<Vec<(String, Region)>, CliError> {
        self.regions
            .iter()
            .map(|r| {
                let region = Region::new(r.x1, r.x2, r.y, r.nodes.unwrap_or(self.nodes))
                    .and_then(|b| b.certify(ctx))
                    .map_err(|e| CliError::Config(format!("region {}: {e}", r.id)))?;
                Ok((r.id.clone(), region))
            })
            .collect()
    }
}

impl ScheduleConfig {
    pub fn to_spec(&self) -> Result<ScheduleSpec, CliError> {
        let missing = |p: &str| CliError::Config(format!("schedule {} needs params.{p}", self.kind));
        let spec = match self.kind.as_str() {
            "constant_sigma" => {
                ScheduleSpec::constant(self.params.sigma_inf.ok_or_else(|| missing("sigma_inf"))?, self.t_grid.clone())
            }
            "approach_one" => {
                ScheduleSpec::approach_one(self.params.rate.ok_or_else(|| missing("rate"))?, self.t_grid.clone())
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown schedule kind {other:?}; expected constant_sigma or approach_one"
                )))
            }
        };
        spec.map_err(|e| CliError::Config(format!("schedule: {e}")))
    }
}
