//! Experiment configuration: a flat `key = value` text format or JSON.
//!
//! Text grammar, one entry per line:
//!
//! ```text
//! # comment
//! key = value
//! ```
//!
//! Values are numbers, `true`/`false`, bare strings, or lists written as
//! `[a, b, c]`. The list keys (`n_grid`, `gamma_grid`, `lambda_grid`,
//! `methods`, `streams`) also accept a bare comma-separated list. A file
//! whose first non-blank character is `{` is parsed as a JSON object with
//! the same keys.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentId {
    Rate,
    Regret,
    Stability,
    Sparse,
    Regime,
    Margin,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 6] = [
        ExperimentId::Rate,
        ExperimentId::Regret,
        ExperimentId::Stability,
        ExperimentId::Sparse,
        ExperimentId::Regime,
        ExperimentId::Margin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Rate => "rate",
            ExperimentId::Regret => "regret",
            ExperimentId::Stability => "stability",
            ExperimentId::Sparse => "sparse",
            ExperimentId::Regime => "regime",
            ExperimentId::Margin => "margin",
        }
    }

    /// Replicate count used when the config does not set one.
    pub fn default_replicates(self) -> usize {
        match self {
            ExperimentId::Rate => 50,
            ExperimentId::Regret => 10,
            ExperimentId::Stability => 200,
            ExperimentId::Sparse => 10,
            ExperimentId::Regime => 20,
            ExperimentId::Margin => 1,
        }
    }

    pub fn default_n_grid(self) -> Vec<usize> {
        let pow2 = |lo: u32, hi: u32| (lo..=hi).map(|k| 1usize << k).collect();
        match self {
            ExperimentId::Rate => pow2(5, 12),
            ExperimentId::Regret => vec![10, 100, 1000, 10_000],
            ExperimentId::Stability => vec![64],
            ExperimentId::Sparse => pow2(7, 12),
            ExperimentId::Regime => pow2(0, 14),
            ExperimentId::Margin => vec![1000],
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// A validated experiment configuration. Experiment-specific keys stay in
/// `params` and are read through the typed getters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub seed: u64,
    pub replicates: usize,
    pub n_grid: Vec<usize>,
    pub out: Option<PathBuf>,
    pub params: BTreeMap<String, Value>,
}

const LIST_KEYS: [&str; 5] = ["n_grid", "gamma_grid", "lambda_grid", "methods", "streams"];

impl ExperimentConfig {
    /// Defaults for `experiment` with no extra parameters.
    pub fn new(experiment: ExperimentId) -> Self {
        Self {
            experiment,
            seed: 0,
            replicates: experiment.default_replicates(),
            n_grid: experiment.default_n_grid(),
            out: None,
            params: BTreeMap::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses either format; see the module docs for the grammar.
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_map(parse_map(text)?)
    }

    /// Like [`ExperimentConfig::parse`] for a known experiment: the
    /// `experiment` key may be omitted but must agree when present.
    pub fn parse_for(experiment: ExperimentId, text: &str) -> Result<Self> {
        let mut map = parse_map(text)?;
        match map.get("experiment") {
            None => {
                map.insert("experiment".into(), Value::String(experiment.name().into()));
            }
            Some(Value::String(s)) if s.trim() == experiment.name() => {}
            Some(other) => {
                return Err(Error::Config(format!(
                    "config is for experiment {other}, not `{experiment}`"
                )))
            }
        }
        Self::from_map(map)
    }

    pub fn load_for(experiment: ExperimentId, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_for(experiment, &text)
    }

    pub fn from_map(mut map: Map<String, Value>) -> Result<Self> {
        let experiment = match map.remove("experiment") {
            Some(Value::String(s)) => s.parse()?,
            Some(other) => return Err(Error::Config(format!("`experiment` must be a string, got {other}"))),
            None => return Err(Error::Config("missing key `experiment`".into())),
        };
        let mut cfg = Self::new(experiment);
        for (key, value) in map {
            cfg.set(&key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key, used for file entries and CLI overrides alike.
    pub fn set(&mut self, key: &str, value: Value) -> Result<()> {
        match key {
            "experiment" => {
                let id = value
                    .as_str()
                    .ok_or_else(|| Error::Config("`experiment` must be a string".into()))?;
                self.experiment = id.parse()?;
            }
            "seed" => self.seed = as_u64(&value, key)?,
            "replicates" => self.replicates = as_u64(&value, key)? as usize,
            "n_grid" => {
                self.n_grid = as_list(&value, key)?
                    .iter()
                    .map(|v| as_u64(v, key).map(|x| x as usize))
                    .collect::<Result<_>>()?
            }
            "out" => {
                self.out = Some(PathBuf::from(
                    value
                        .as_str()
                        .ok_or_else(|| Error::Config("`out` must be a path string".into()))?,
                ))
            }
            _ => {
                self.params.insert(key.to_string(), value);
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("`replicates` must be at least 1".into()));
        }
        if self.n_grid.is_empty() {
            return Err(Error::Config("`n_grid` must not be empty".into()));
        }
        if self.n_grid[0] == 0 {
            return Err(Error::Config("`n_grid` entries must be positive".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("`n_grid` must be strictly increasing".into()));
        }
        Ok(())
    }

    pub fn has(&self, key: &str) -> bool {
        self.params.contains_key(key)
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .ok_or_else(|| Error::Config(format!("`{key}` must be a number, got {v}"))),
        }
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => as_u64(v, key).map(|x| x as usize),
        }
    }

    pub fn get_str(&self, key: &str, default: &str) -> Result<String> {
        match self.params.get(key) {
            None => Ok(default.to_string()),
            Some(Value::String(s)) => Ok(s.clone()),
            // a bare number can still name something, e.g. `lbar = 0`
            Some(Value::Number(n)) => Ok(n.to_string()),
            Some(v) => Err(Error::Config(format!("`{key}` must be a string, got {v}"))),
        }
    }

    pub fn get_f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.params.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => as_list(v, key)?
                .iter()
                .map(|x| {
                    x.as_f64()
                        .ok_or_else(|| Error::Config(format!("`{key}` entries must be numbers, got {x}")))
                })
                .collect(),
        }
    }

    pub fn get_str_list(&self, key: &str, default: &[&str]) -> Result<Vec<String>> {
        match self.params.get(key) {
            None => Ok(default.iter().map(|s| s.to_string()).collect()),
            Some(v) => as_list(v, key)?
                .iter()
                .map(|x| match x {
                    Value::String(s) => Ok(s.clone()),
                    other => Err(Error::Config(format!("`{key}` entries must be strings, got {other}"))),
                })
                .collect(),
        }
    }

    /// The whole config as a JSON object, for metadata echo.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("experiment".into(), Value::String(self.experiment.name().into()));
        map.insert("seed".into(), Value::from(self.seed));
        map.insert("replicates".into(), Value::from(self.replicates));
        map.insert("n_grid".into(), Value::from(self.n_grid.clone()));
        if let Some(out) = &self.out {
            map.insert("out".into(), Value::String(out.display().to_string()));
        }
        for (k, v) in &self.params {
            map.insert(k.clone(), v.clone());
        }
        Value::Object(map)
    }

    /// Applies a `key=value` override written in the flat syntax.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = split_assignment(assignment)
            .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
        self.set(key, parse_value(key, raw)?)?;
        self.validate()
    }
}

fn parse_map(text: &str) -> Result<Map<String, Value>> {
    if text.trim_start().starts_with('{') {
        match serde_json::from_str::<Value>(text)
            .map_err(|e| Error::Config(format!("invalid JSON config: {e}")))?
        {
            Value::Object(map) => Ok(map),
            _ => Err(Error::Config("JSON config must be an object".into())),
        }
    } else {
        parse_flat(text)
    }
}

fn as_u64(v: &Value, key: &str) -> Result<u64> {
    if let Some(x) = v.as_u64() {
        return Ok(x);
    }
    match v.as_f64() {
        Some(x) if x >= 0.0 && x.fract() == 0.0 && x < 2f64.powi(63) => Ok(x as u64),
        _ => Err(Error::Config(format!("`{key}` must be a non-negative integer, got {v}"))),
    }
}

fn as_list<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Config(format!("`{key}` must be a list, got {v}")))
}

fn split_assignment(line: &str) -> Option<(&str, &str)> {
    let (k, v) = line.split_once('=')?;
    let k = k.trim();
    if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return None;
    }
    Some((k, v.trim()))
}

fn parse_scalar(raw: &str) -> Value {
    let raw = raw.trim();
    if let Ok(i) = raw.parse::<u64>() {
        return Value::Number(i.into());
    }
    if let Ok(i) = raw.parse::<i64>() {
        return Value::Number(i.into());
    }
    if let Ok(x) = raw.parse::<f64>() {
        if let Some(n) = Number::from_f64(x) {
            return Value::Number(n);
        }
    }
    match raw {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        _ => Value::String(raw.trim_matches('"').to_string()),
    }
}

fn parse_value(key: &str, raw: &str) -> Result<Value> {
    if let Some(inner) = raw.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| Error::Config(format!("unterminated list for `{key}`")))?;
        let items = inner
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(parse_scalar)
            .collect();
        return Ok(Value::Array(items));
    }
    if LIST_KEYS.contains(&key) {
        return Ok(Value::Array(
            raw.split(',').map(str::trim).filter(|s| !s.is_empty()).map(parse_scalar).collect(),
        ));
    }
    Ok(parse_scalar(raw))
}

fn parse_flat(text: &str) -> Result<Map<String, Value>> {
    let mut map = Map::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, raw) = split_assignment(line)
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        if map.insert(key.to_string(), parse_value(key, raw)?).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
    }
    Ok(map)
}
