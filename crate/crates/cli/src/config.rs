use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use slipflow::geometry::InclusionShape;
use slipflow::saddle::PicardOptions;
use slipflow::scaling::{CounterflowCorrection, PoiseuilleMode, ScalingParams};

use crate::error::HarnessError;

pub const DEFAULT_CONFIG: &str = include_str!("../config/default.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub parameters: ParameterConfig,
    pub solver: SolverConfig,
    pub analysis: AnalysisConfig,
    pub output: OutputConfig,
    #[serde(default)]
    pub flags: Flags,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub shape: InclusionShape,
    pub cells_per_period: usize,
    pub rows_below: usize,
    pub height_above: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterConfig {
    #[serde(default)]
    pub eta: Vec<f64>,
    /// Explicit `[delta, gamma]` points.
    #[serde(default)]
    pub pairs: Vec<[f64; 2]>,
    pub epsilon: Vec<f64>,
    pub force: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub tol: f64,
    pub damping: f64,
    pub max_iter: usize,
    pub growth_limit: usize,
    pub convection: bool,
    pub poiseuille: PoiseuilleMode,
    pub correction: CounterflowCorrection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub rate_force: f64,
    pub slip_epsilon: f64,
    pub slip_eta: f64,
    pub saffman_epsilon: f64,
    pub closed_loop_forces: Vec<f64>,
    pub radii: Vec<f64>,
    pub asymmetric_shape: InclusionShape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub cache: PathBuf,
    pub dir: PathBuf,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    #[serde(default)]
    pub allow_out_of_hypothesis: bool,
    #[serde(default)]
    pub skip_dns: bool,
    #[serde(default)]
    pub refine_check: bool,
}

/// One (δ, γ) regime of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub eta: Option<f64>,
    pub delta: f64,
    pub gamma: f64,
}

impl Regime {
    pub fn params(&self, epsilon: f64, force: f64) -> ScalingParams {
        match self.eta {
            Some(eta) => ScalingParams::from_eta(epsilon, eta, force),
            None => ScalingParams::new(epsilon, self.delta, self.gamma, force),
        }
    }

    pub fn label(&self) -> String {
        match self.eta {
            Some(e) => format!("eta={e}"),
            None => format!("delta={},gamma={}", self.delta, self.gamma),
        }
    }
}

/// The part of the configuration that determines computed results.
#[derive(Serialize)]
struct HashView<'a> {
    geometry: &'a GeometryConfig,
    parameters: &'a ParameterConfig,
    solver: &'a SolverConfig,
    analysis: &'a AnalysisConfig,
    allow_out_of_hypothesis: bool,
    refine_check: bool,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>) -> Result<Self, HarnessError> {
        match path {
            None => Self::from_toml(DEFAULT_CONFIG),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| HarnessError::Config(format!("{}: {e}", p.display())))?;
                Self::from_toml(&text).map_err(|e| match e {
                    HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", p.display())),
                    other => other,
                })
            }
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        let p = &self.parameters;
        if p.eta.is_empty() && p.pairs.is_empty() {
            return bad("parameters: need at least one eta or [delta, gamma] pair".into());
        }
        if p.epsilon.is_empty() || p.force.is_empty() {
            return bad("parameters: epsilon and force lists must be non-empty".into());
        }
        if let Some(e) = p.epsilon.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
            return bad(format!("parameters.epsilon: {e} outside (0, 1]"));
        }
        if let Some(e) = p.eta.iter().find(|e| !e.is_finite()) {
            return bad(format!("parameters.eta: {e} is not finite"));
        }
        if p.force.iter().any(|f| !f.is_finite()) {
            return bad("parameters.force: values must be finite".into());
        }
        if !(self.solver.tol > 0.0) || !(self.solver.damping > 0.0 && self.solver.damping <= 1.0) {
            return bad("solver: need tol > 0 and damping in (0, 1]".into());
        }
        if self.geometry.cells_per_period == 0 || !(self.geometry.height_above > 0.0) {
            return bad("geometry: cells_per_period and height_above must be positive".into());
        }
        Ok(())
    }

    pub fn regimes(&self) -> Vec<Regime> {
        let mut out: Vec<Regime> = self
            .parameters
            .eta
            .iter()
            .map(|&eta| {
                let p = ScalingParams::from_eta(1.0, eta, 0.0);
                Regime {
                    eta: Some(eta),
                    delta: p.delta,
                    gamma: p.gamma,
                }
            })
            .collect();
        out.extend(self.parameters.pairs.iter().map(|&[delta, gamma]| Regime {
            eta: None,
            delta,
            gamma,
        }));
        out
    }

    pub fn picard(&self) -> PicardOptions {
        PicardOptions {
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            damping: self.solver.damping,
            growth_limit: self.solver.growth_limit,
        }
    }

    /// SHA-256 over everything that influences written results; output
    /// locations and `skip_dns` are excluded.
    pub fn hash(&self) -> String {
        let view = HashView {
            geometry: &self.geometry,
            parameters: &self.parameters,
            solver: &self.solver,
            analysis: &self.analysis,
            allow_out_of_hypothesis: self.flags.allow_out_of_hypothesis,
            refine_check: self.flags.refine_check,
        };
        let bytes = serde_json::to_vec(&view).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    /// The hashed part of the configuration as JSON, embedded in reports.
    pub fn resolved(&self) -> serde_json::Value {
        serde_json::json!({
            "geometry": self.geometry,
            "parameters": self.parameters,
            "solver": self.solver,
            "analysis": self.analysis,
            "allow_out_of_hypothesis": self.flags.allow_out_of_hypothesis,
            "refine_check": self.flags.refine_check,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_parses() {
        let c = RunConfig::load(None).unwrap();
        assert_eq!(c.regimes().len(), 3);
        assert_eq!(c.parameters.epsilon.len(), 4);
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = DEFAULT_CONFIG.replace("rows_below = 5", "rows_below = 5\nrow_below = 4");
        let err = RunConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("row_below"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn output_paths_do_not_change_the_hash() {
        let a = RunConfig::load(None).unwrap();
        let mut b = a.clone();
        b.output.dir = "elsewhere".into();
        b.flags.skip_dns = true;
        assert_eq!(a.hash(), b.hash());
        b.parameters.force.push(2.0);
        assert_ne!(a.hash(), b.hash());
    }
}
