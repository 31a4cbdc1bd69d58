//! Experiment configuration: a JSON file with a group, a measure, budgets
//! and an r-grid given as fractions of the estimated radius.

use std::path::{Path, PathBuf};

use relwalk::engine::MemoryBudget;
use relwalk::parabolic::ParabolicBudget;
use relwalk::{FactorKind, FactorSpec, GroupSpec, Measure};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FactorConfig {
    FreeAbelian {
        rank: u32,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        generators: Vec<String>,
    },
    FiniteCyclic {
        order: u32,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        generators: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    #[default]
    Exact,
    Float,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budgets {
    pub n_max: usize,
    /// Word-ball radius explored by first-return kernels.
    pub exploration: u32,
    /// Path length of first-return kernels.
    pub horizon: usize,
    /// `(m, B)`: syllable count and syllable length.
    pub truncation: (usize, u64),
    pub series_order: usize,
    pub memory_cap_gb: f64,
    /// LLT fit window; defaults to `[12, n_max]`.
    pub window: Option<(usize, usize)>,
    pub samples: usize,
    pub ancona_ball: (usize, u64),
    pub automaton: (usize, u64),
    /// Fingerprint radius; defaults to `2 d + 1`.
    pub cone_radius: Option<u64>,
    pub seed: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            n_max: 28,
            exploration: 10,
            horizon: 300,
            truncation: (8, 8),
            series_order: 24,
            memory_cap_gb: 16.0,
            window: None,
            samples: 500,
            ancona_ball: (3, 3),
            automaton: (4, 3),
            cone_radius: None,
            seed: 1,
        }
    }
}

impl Budgets {
    pub fn memory(&self) -> MemoryBudget {
        MemoryBudget {
            cap_bytes: (self.memory_cap_gb * (1u64 << 30) as f64) as u64,
        }
    }

    pub fn parabolic(&self) -> ParabolicBudget {
        ParabolicBudget {
            horizon: self.horizon,
            exploration: self.exploration,
            memory: self.memory(),
            ..ParabolicBudget::default()
        }
    }

    pub fn window(&self) -> (usize, usize) {
        self.window.unwrap_or((12, self.n_max))
    }
}

fn default_r_grid() -> Vec<f64> {
    vec![0.3, 0.5, 0.8]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub group: Vec<FactorConfig>,
    /// `(element, weight)` with weights written `"p/q"`.
    pub measure: Vec<(String, String)>,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default = "default_r_grid")]
    pub r_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default)]
    pub arithmetic: Arithmetic,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Io {
        path: String,
        message: String,
    },
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    Field {
        field: String,
        message: String,
    },
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Io { path, message } => write!(f, "{path}: {message}"),
            ConfigError::Syntax {
                line,
                column,
                message,
            } => write!(f, "line {line}, column {column}: {message}"),
            ConfigError::Field { field, message } => write!(f, "field `{field}`: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn field(field: impl Into<String>, message: impl std::fmt::Display) -> ConfigError {
    ConfigError::Field {
        field: field.into(),
        message: message.to_string(),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn check(&self) -> Result<(), ConfigError> {
        let b = &self.budgets;
        let positive = [
            ("budgets.n_max", b.n_max as f64),
            ("budgets.exploration", b.exploration as f64),
            ("budgets.horizon", b.horizon as f64),
            ("budgets.truncation[0]", b.truncation.0 as f64),
            ("budgets.truncation[1]", b.truncation.1 as f64),
            ("budgets.series_order", b.series_order as f64),
            ("budgets.memory_cap_gb", b.memory_cap_gb),
            ("budgets.samples", b.samples as f64),
            ("budgets.automaton[1]", b.automaton.1 as f64),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(field(name, "must be positive"));
            }
        }
        for (i, r) in self.r_grid.iter().enumerate() {
            if !(*r >= 0.0 && *r <= 1.0) {
                return Err(field(
                    format!("r_grid[{i}]"),
                    format!("{r} is not a fraction of the radius in [0, 1]"),
                ));
            }
        }
        self.group_spec()?;
        self.measure_for(self.arithmetic)?;
        Ok(())
    }

    pub fn group_spec(&self) -> Result<GroupSpec, ConfigError> {
        let factors = self
            .group
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let (kind, generators) = match f {
                    FactorConfig::FreeAbelian { rank, generators } => {
                        (FactorKind::FreeAbelian { rank: *rank }, generators)
                    }
                    FactorConfig::FiniteCyclic { order, generators } => {
                        (FactorKind::FiniteCyclic { order: *order }, generators)
                    }
                };
                FactorSpec {
                    id: (i + 1) as u16,
                    kind,
                    generators: generators.clone(),
                }
            })
            .collect();
        GroupSpec::new(factors).map_err(|e| field("group", e))
    }

    pub fn measure_for(&self, mode: Arithmetic) -> Result<Measure, ConfigError> {
        let spec = self.group_spec()?;
        for (i, (g, _)) in self.measure.iter().enumerate() {
            spec.parse_element(g)
                .map_err(|e| field(format!("measure[{i}][0]"), e))?;
        }
        let pairs: Vec<(&str, &str)> = self
            .measure
            .iter()
            .map(|(g, w)| (g.as_str(), w.as_str()))
            .collect();
        let m = Measure::parse(spec, &pairs).map_err(|e| field("measure", e))?;
        Ok(match mode {
            Arithmetic::Exact => m,
            Arithmetic::Float => m.to_float(),
        })
    }
}

/// The file at `path`, or `path.json`, or `configs/<name>.json`.
pub fn resolve(path: &Path) -> Option<PathBuf> {
    let mut candidates = vec![path.to_path_buf(), path.with_extension("json")];
    if let Some(name) = path.file_name() {
        let mut p = PathBuf::from("configs").join(name);
        p.set_extension("json");
        candidates.push(p);
    }
    candidates.into_iter().find(|p| p.is_file())
}

pub fn load(path: &Path) -> Result<(ExperimentConfig, Vec<u8>, PathBuf), ConfigError> {
    let resolved = resolve(path).ok_or_else(|| ConfigError::Io {
        path: path.display().to_string(),
        message: "no such config file".into(),
    })?;
    let bytes = std::fs::read(&resolved).map_err(|e| ConfigError::Io {
        path: resolved.display().to_string(),
        message: e.to_string(),
    })?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| ConfigError::Io {
        path: resolved.display().to_string(),
        message: e.to_string(),
    })?;
    Ok((ExperimentConfig::parse(&text)?, bytes, resolved))
}
