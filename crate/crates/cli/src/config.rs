//! Run configuration from flags and an optional `key = value` file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use amfem::adapt::{AdaptConfig, StopRule};
use amfem::estimator::AWeights;
use amfem::problem::Benchmark;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("missing required setting `{0}`")]
    Missing(&'static str),
    #[error("invalid value for `{key}`: {value}")]
    Invalid { key: String, value: String },
    #[error("unknown setting `{0}`")]
    UnknownKey(String),
    #[error("{path}:{line}: expected `key = value`")]
    Syntax { path: PathBuf, line: usize },
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] amfem::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Adaptive,
    Uniform,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub benchmark: Benchmark,
    pub mode: Mode,
    pub adapt: AdaptConfig,
    pub out: PathBuf,
    /// Write `mesh_<k>.vtk` every this many iterations; 0 disables.
    pub vtk_every: usize,
    /// Dump each system matrix in MatrixMarket format.
    pub dump_matrix: bool,
}

pub const KEYS: &[&str] = &[
    "benchmark",
    "epsilon",
    "theta",
    "b",
    "mode",
    "levels",
    "max-dof",
    "max-iters",
    "eta-target",
    "weights",
    "out",
    "vtk-every",
    "dump-matrix",
];

/// Settings as strings, keyed by flag name.
#[derive(Debug, Clone, Default)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn parse_file(path: &Path) -> Result<Settings, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                path: path.to_path_buf(),
                line: i + 1,
            })?;
            let key = k.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey(key));
            }
            map.insert(key, v.trim().to_string());
        }
        Ok(Settings(map))
    }

    pub fn set(&mut self, key: &str, value: Option<String>) {
        if let Some(v) = value {
            self.0.insert(key.to_string(), v);
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        self.get(key)
            .map(|v| {
                v.parse().map_err(|_| ConfigError::Invalid {
                    key: key.to_string(),
                    value: v.to_string(),
                })
            })
            .transpose()
    }

    pub fn into_config(self) -> Result<RunConfig, ConfigError> {
        let name = self.get("benchmark").ok_or(ConfigError::Missing("benchmark"))?;
        let epsilon: Option<f64> = self.parsed("epsilon")?;
        if epsilon.is_some_and(|e| !(e > 0.0 && e.is_finite())) {
            return Err(invalid("epsilon", self.get("epsilon")));
        }
        let benchmark = Benchmark::parse(name, epsilon)?;
        let mode = match self.get("mode").unwrap_or("adaptive") {
            "adaptive" => Mode::Adaptive,
            "uniform" => Mode::Uniform,
            other => return Err(invalid("mode", Some(other))),
        };
        let theta = self.parsed("theta")?.unwrap_or(benchmark.default_theta());
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(invalid("theta", self.get("theta")));
        }
        let bisections = self.parsed("b")?.unwrap_or(AdaptConfig::default().bisections);
        if bisections == 0 {
            return Err(invalid("b", self.get("b")));
        }
        let mut stop = StopRule::default();
        if let Some(n) = self.parsed::<usize>("max-iters")? {
            stop.max_iters = n;
        }
        if let Some(n) = self.parsed::<usize>("levels")? {
            stop.max_iters = n;
        }
        if stop.max_iters == 0 {
            return Err(invalid("max-iters", Some("0")));
        }
        if let Some(n) = self.parsed::<usize>("max-dof")? {
            stop.max_dof = n;
        }
        stop.eta_target = self.parsed("eta-target")?;
        let weights = match self.get("weights") {
            None => AWeights::default(),
            Some(w) => parse_weights(w).ok_or_else(|| invalid("weights", Some(w)))?,
        };
        let out = PathBuf::from(self.get("out").unwrap_or("."));
        let vtk_every = self.parsed("vtk-every")?.unwrap_or(0);
        let dump_matrix = self.parsed("dump-matrix")?.unwrap_or(false);
        Ok(RunConfig {
            benchmark,
            mode,
            adapt: AdaptConfig {
                theta,
                bisections,
                stop,
                weights,
                ..AdaptConfig::default()
            },
            out,
            vtk_every,
            dump_matrix,
        })
    }
}

fn invalid(key: &str, value: Option<&str>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        value: value.unwrap_or("").to_string(),
    }
}

/// `d,g1,g2`, all non-negative.
pub fn parse_weights(s: &str) -> Option<AWeights> {
    let v: Vec<f64> = s.split(',').map(|x| x.trim().parse().ok()).collect::<Option<_>>()?;
    if v.len() != 3 || v.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
        return None;
    }
    Some(AWeights {
        divergence: v[0],
        estimator: v[1],
        data: v[2],
    })
}
