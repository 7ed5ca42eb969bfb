use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub split: SplitSection,
    #[serde(default)]
    pub data: DataSection,
    #[serde(default)]
    pub probes: Vec<ProbeSpec>,
    #[serde(default)]
    pub gates: Vec<Gate>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("kgh-out")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    #[serde(rename = "L")]
    pub box_length: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub dt: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(default = "one")]
    pub sample_every: usize,
}

fn one() -> usize {
    1
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            dt: 1.0 / 64.0,
            horizon: 0.5,
            sample_every: 1,
        }
    }
}

/// A single level or a list of levels.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Levels {
    One(i32),
    Many(Vec<i32>),
}

impl Levels {
    pub fn to_vec(&self) -> Vec<i32> {
        match self {
            Levels::One(j) => vec![*j],
            Levels::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSection {
    #[serde(rename = "J")]
    pub levels: Levels,
    pub s: f64,
}

impl Default for SplitSection {
    fn default() -> Self {
        Self {
            levels: Levels::One(3),
            s: 0.7,
        }
    }
}

/// Power-law random data `|φ̂(ξ)| ~ ⟨ξ⟩^{−3/2−s−δ}` scaled to a data norm.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_norm")]
    pub norm: f64,
}

fn default_delta() -> f64 {
    0.01
}

fn default_norm() -> f64 {
    1.0
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            delta: default_delta(),
            norm: default_norm(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProbeSpec {
    Recombine {
        #[serde(default)]
        order: bool,
    },
    Exponents,
    StrichartzSlope {
        j: i32,
        h: Vec<f64>,
        r: Vec<f64>,
        trials: usize,
        #[serde(rename = "T")]
        horizon: Option<f64>,
        steps: Option<usize>,
    },
    Hls {
        p: f64,
        count: usize,
    },
    Commutator {
        j: Vec<i32>,
        r: f64,
    },
    ForcingBounds {
        r1: f64,
        r2: f64,
    },
    BootstrapTable {
        r1: f64,
        r2: f64,
        #[serde(default = "default_levels")]
        levels: i32,
        constants: Option<[f64; 5]>,
    },
    SplitBounds {
        sigma: Option<f64>,
    },
    EnergyGrowth,
    Trajectory {
        #[serde(default)]
        snapshots: bool,
    },
}

fn default_levels() -> i32 {
    20
}

/// Bound on one measured quantity, named `experiment.quantity`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gate {
    pub quantity: String,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

pub const PRESETS: [&str; 7] = [
    "recombine",
    "exponents",
    "strichartz-slope",
    "hls",
    "commutator",
    "forcing-bounds",
    "bootstrap-table",
];

fn desk_grid(gamma: f64) -> Value {
    json!({ "n": 32, "L": 2.0 * std::f64::consts::PI, "gamma": gamma })
}

pub fn preset(name: &str) -> Result<Value, CliError> {
    let value = match name {
        "recombine" => json!({
            "grid": desk_grid(2.5),
            "solver": { "dt": 1.0 / 64.0, "T": 0.5 },
            "split": { "J": 3, "s": 0.7 },
            "probes": [{ "kind": "recombine", "order": true }],
            "output": "recombine-out",
        }),
        "exponents" => json!({
            "grid": desk_grid(2.4),
            "probes": [{ "kind": "exponents" }],
            "output": "exponents-out",
        }),
        "strichartz-slope" => json!({
            "grid": { "n": 64, "L": 4.0 * std::f64::consts::PI, "gamma": 2.5 },
            "probes": [{ "kind": "strichartz-slope", "j": 5, "h": [0.0625, 0.03125, 0.015625], "r": [2.0, 4.0], "trials": 8 }],
            "seed": 11,
            "output": "strichartz-out",
        }),
        "hls" => json!({
            "grid": desk_grid(2.5),
            "probes": [{ "kind": "hls", "p": 2.0, "count": 100 }],
            "gates": [{ "quantity": "hls.maxmin_ratio", "max": 20.0 }],
            "seed": 500,
            "output": "hls-out",
        }),
        "commutator" => json!({
            "grid": { "n": 64, "L": std::f64::consts::PI / 2.0, "gamma": 2.5 },
            "probes": [{ "kind": "commutator", "j": [3, 4, 5], "r": 4.0 }],
            "gates": [{ "quantity": "commutator.maxmin_ratio", "max": 4.0 }],
            "seed": 100,
            "output": "commutator-out",
        }),
        "forcing-bounds" => json!({
            "grid": desk_grid(2.5),
            "solver": { "dt": 1.0 / 32.0, "T": 0.5 },
            "split": { "J": [1, 2, 3], "s": 0.7 },
            "probes": [{ "kind": "forcing-bounds", "r1": 3.0, "r2": 10.0 }],
            "output": "forcing-bounds-out",
        }),
        "bootstrap-table" => json!({
            "grid": desk_grid(2.4),
            "split": { "J": 1, "s": 0.65 },
            "probes": [{ "kind": "bootstrap-table", "r1": 3.3, "r2": 40.0, "levels": 20 }],
            "output": "bootstrap-out",
        }),
        other => {
            return Err(CliError::Config(format!(
                "unknown preset `{other}`; available: {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(value)
}

/// Applies `a.b.c=value`; the value is parsed as JSON and falls back to a string.
pub fn apply_override(root: &mut Value, spec: &str) -> Result<(), CliError> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{spec}` is not key=value")))?;
    let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let keys: Vec<&str> = path.split('.').collect();
    for (i, key) in keys.iter().enumerate() {
        let last = i + 1 == keys.len();
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(key.to_string(), value);
                    return Ok(());
                }
                map.entry(key.to_string()).or_insert_with(|| json!({}))
            }
            Value::Array(items) => {
                let idx: usize = key.parse().map_err(|_| {
                    CliError::Config(format!("`{key}` in `{path}` is not an index"))
                })?;
                let len = items.len();
                let slot = items.get_mut(idx).ok_or_else(|| {
                    CliError::Config(format!("index {idx} in `{path}` exceeds {len}"))
                })?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => {
                return Err(CliError::Config(format!(
                    "`{path}` does not name a section"
                )))
            }
        };
    }
    Err(CliError::Config(format!("empty override path in `{spec}`")))
}

pub fn from_value(value: Value) -> Result<ExperimentConfig, CliError> {
    serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))
}

pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses() {
        for name in PRESETS {
            from_value(preset(name).unwrap()).unwrap();
        }
        assert!(preset("nope").is_err());
    }

    #[test]
    fn overrides_patch_nested_values() {
        let mut v = preset("recombine").unwrap();
        apply_override(&mut v, "grid.gamma=2.4").unwrap();
        apply_override(&mut v, "split.J=[2,3]").unwrap();
        apply_override(&mut v, "probes.0.order=false").unwrap();
        apply_override(&mut v, "output=somewhere").unwrap();
        let c = from_value(v).unwrap();
        assert_eq!(c.grid.gamma, 2.4);
        assert_eq!(c.split.levels.to_vec(), vec![2, 3]);
        assert!(matches!(c.probes[0], ProbeSpec::Recombine { order: false }));
        assert_eq!(c.output, PathBuf::from("somewhere"));
        let mut v = preset("recombine").unwrap();
        assert!(apply_override(&mut v, "grid").is_err());
        assert!(apply_override(&mut v, "probes.5.order=true").is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut v = preset("hls").unwrap();
        apply_override(&mut v, "grid.size=3").unwrap();
        assert!(from_value(v).is_err());
        let mut v = preset("hls").unwrap();
        apply_override(&mut v, "probes.0.extra=1").unwrap();
        assert!(from_value(v).is_err());
    }
}
