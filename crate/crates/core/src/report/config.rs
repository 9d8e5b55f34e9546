//! Run configuration: one structured file reproduces every number in a
//! report.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::operator::OperatorKind;

use super::ReportError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub potential: PotentialConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub operator: Option<OperatorConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub expression: String,
    pub dimension: usize,
    /// One `[lower, upper]` pair per axis.
    pub domain: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Operator grid; defaults to 4001 in 1D and 257 per axis in 2D.
    pub nodes_per_axis: Option<usize>,
    /// Landscape-analysis grid; defaults to 1025 in 1D and 257 in 2D.
    pub topology_nodes_per_axis: Option<usize>,
}

impl GridConfig {
    pub fn operator_nodes(&self, dim: usize) -> usize {
        self.nodes_per_axis
            .unwrap_or(if dim == 1 { 4001 } else { 257 })
    }

    pub fn topology_nodes(&self, dim: usize) -> usize {
        self.topology_nodes_per_axis
            .unwrap_or(if dim == 1 { 1025 } else { 257 })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    pub kind: Option<OperatorKind>,
    pub h: Option<f64>,
    pub h_list: Option<Vec<f64>>,
    pub window_c: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Gradient tolerance, relative to `1 + max |grad W|`.
    pub tol_grad_rel: f64,
    /// Newton seed grid density per axis.
    pub seeds_per_axis: usize,
    /// Eigensolver residual tolerance, relative to the matrix norm.
    pub eigensolver_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_grad_rel: 1e-10,
            seeds_per_axis: 48,
            eigensolver_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ReportError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str(&text)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Result<Self, ReportError> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| ReportError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ReportError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ReportError::Config(format!(
                "schema_version {} unsupported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let dim = self.potential.dimension;
        if dim != 1 && dim != 2 {
            return Err(ReportError::Config(format!("dimension {dim}, expected 1 or 2")));
        }
        if self.potential.domain.len() != dim {
            return Err(ReportError::Config(format!(
                "domain has {} axes for dimension {dim}",
                self.potential.domain.len()
            )));
        }
        if let Some(n) = self.grid.nodes_per_axis {
            if n < 65 {
                return Err(ReportError::Config(format!("nodes_per_axis {n} < 65")));
            }
        }
        if let Some(n) = self.grid.topology_nodes_per_axis {
            if n < 64 {
                return Err(ReportError::Config(format!(
                    "topology_nodes_per_axis {n} < 64"
                )));
            }
        }
        if !(self.tolerances.tol_grad_rel > 0.0) || !(self.tolerances.eigensolver_tol > 0.0) {
            return Err(ReportError::Config("tolerances must be positive".into()));
        }
        if self.tolerances.seeds_per_axis < 16 {
            return Err(ReportError::Config("seeds_per_axis must be >= 16".into()));
        }
        if let Some(op) = &self.operator {
            if let Some(h) = op.h {
                if !(h > 0.0) {
                    return Err(ReportError::Config(format!("h = {h} must be positive")));
                }
            }
            if let Some(list) = &op.h_list {
                if list.iter().any(|&h| !(h > 0.0)) {
                    return Err(ReportError::Config("h_list entries must be positive".into()));
                }
                if list.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(ReportError::Config(
                        "h_list must be strictly increasing".into(),
                    ));
                }
            }
            if let Some(c) = op.window_c {
                if !(c > 0.0) {
                    return Err(ReportError::Config(format!(
                        "window_c = {c} must be positive"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
schema_version = 1

[potential]
expression = "0.1*(x^2-1)^2"
dimension = 1
domain = [[-2.5, 2.5]]

[operator]
kind = "witten"
h_list = [0.02, 0.025, 0.03]
"#;

    #[test]
    fn parses_and_defaults() {
        let cfg = RunConfig::from_str(GOOD).unwrap();
        assert_eq!(cfg.grid.operator_nodes(1), 4001);
        assert_eq!(cfg.grid.topology_nodes(1), 1025);
        assert_eq!(cfg.tolerances.seeds_per_axis, 48);
        assert_eq!(cfg.operator.unwrap().kind, Some(OperatorKind::Witten));
    }

    #[test]
    fn rejects_bad_h_list() {
        let bad = GOOD.replace("[0.02, 0.025, 0.03]", "[0.03, 0.02]");
        assert!(matches!(
            RunConfig::from_str(&bad),
            Err(ReportError::Config(_))
        ));
    }

    #[test]
    fn rejects_wrong_schema_and_unknown_fields() {
        let bad = GOOD.replace("schema_version = 1", "schema_version = 9");
        assert!(RunConfig::from_str(&bad).is_err());
        let bad = format!("{GOOD}\n[extra]\nfoo = 1\n");
        assert!(RunConfig::from_str(&bad).is_err());
    }
}
