//! JSON run configuration: the model keys at top level plus optional
//! command blocks.

use ruinwerk::models::RiskModel;
use ruinwerk::sim::{PathConfig, DEFAULT_DT};
use ruinwerk::validation::BatteryOptions;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

const MODEL_KEYS: [&str; 3] = ["premium_rate", "claim", "perturbation"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurvivalBlock {
    pub x_max: f64,
    pub h: f64,
    pub tol: f64,
    /// Spacing of the rows written to the curve file.
    pub output_step: f64,
}

impl Default for SurvivalBlock {
    fn default() -> Self {
        Self {
            x_max: 10.0,
            h: 1e-3,
            tol: 1e-8,
            output_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformBlock {
    pub beta: Vec<f64>,
}

impl Default for TransformBlock {
    fn default() -> Self {
        Self {
            beta: vec![0.5, 1.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationBlock {
    /// Defaults to `40/d` when absent.
    pub horizon: Option<f64>,
    pub dt: f64,
    pub small_jump_cutoff: f64,
    pub seed: u64,
    pub n_paths: usize,
    pub ruin_levels: Vec<f64>,
}

impl Default for SimulationBlock {
    fn default() -> Self {
        Self {
            horizon: None,
            dt: DEFAULT_DT,
            small_jump_cutoff: 0.0,
            seed: 0,
            n_paths: 10_000,
            ruin_levels: vec![0.0, 1.0, 2.0],
        }
    }
}

impl SimulationBlock {
    pub fn path_config(&self, model: &RiskModel) -> CliResult<PathConfig> {
        let base = PathConfig::for_model(model, self.seed, self.n_paths);
        let cfg = PathConfig {
            horizon: self.horizon.unwrap_or(base.horizon),
            dt: self.dt,
            small_jump_cutoff: self.small_jump_cutoff,
            ..base
        };
        cfg.validate()?;
        if let Some(x) = self.ruin_levels.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
            return Err(CliError::Config(format!("simulation.ruin_levels must be finite and >= 0, got {x}")));
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Blocks {
    survival: SurvivalBlock,
    transform: TransformBlock,
    simulation: SimulationBlock,
    validation: BatteryOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: RiskModel,
    pub survival: SurvivalBlock,
    pub transform: TransformBlock,
    pub simulation: SimulationBlock,
    pub validation: BatteryOptions,
}

impl RunConfig {
    pub fn new(model: RiskModel) -> Self {
        Self {
            model,
            survival: SurvivalBlock::default(),
            transform: TransformBlock::default(),
            simulation: SimulationBlock::default(),
            validation: BatteryOptions::default(),
        }
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid JSON: {e}")))?;
        let Value::Object(mut map) = value else {
            return Err(CliError::Config("configuration must be a JSON object".into()));
        };
        let mut model_map = Map::new();
        for key in MODEL_KEYS {
            if let Some(v) = map.remove(key) {
                model_map.insert(key.to_string(), v);
            }
        }
        let model: RiskModel = serde_json::from_value(Value::Object(model_map))
            .map_err(|e| CliError::Config(format!("model: {e}")))?;
        let blocks: Blocks =
            serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Self {
            model,
            survival: blocks.survival,
            transform: blocks.transform,
            simulation: blocks.simulation,
            validation: blocks.validation,
        })
    }

    pub fn to_value(&self) -> Value {
        let mut map = match serde_json::to_value(self.model).expect("model serializes") {
            Value::Object(m) => m,
            _ => unreachable!("models serialize as objects"),
        };
        let blocks = Blocks {
            survival: self.survival.clone(),
            transform: self.transform.clone(),
            simulation: self.simulation.clone(),
            validation: self.validation.clone(),
        };
        if let Value::Object(b) = serde_json::to_value(&blocks).expect("blocks serialize") {
            map.extend(b);
        }
        Value::Object(map)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("config serializes")
    }
}
