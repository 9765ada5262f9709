//! Configuration spaces: typed parameter definitions, random sampling and
//! the numeric encoding consumed by the tree models.
//!
//! A space is an ordered list of parameters. The order fixes the layout of
//! every encoded feature vector, so a configuration with `p` parameters
//! always encodes to exactly `p` features. Categorical values encode to
//! their ordinal position in the declared value list.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUILTIN_SPARK: &str = include_str!("../../../spaces/spark.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ParamKind {
    Continuous { lo: f64, hi: f64 },
    Integer { lo: i64, hi: i64 },
    Categorical { values: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: ParamKind,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub units: String,
}

impl ParamSpec {
    pub fn continuous(name: &str, lo: f64, hi: f64) -> Self {
        Self::new(name, ParamKind::Continuous { lo, hi })
    }

    pub fn integer(name: &str, lo: i64, hi: i64) -> Self {
        Self::new(name, ParamKind::Integer { lo, hi })
    }

    pub fn categorical<S: AsRef<str>>(name: &str, values: &[S]) -> Self {
        Self::new(
            name,
            ParamKind::Categorical {
                values: values.iter().map(|v| v.as_ref().to_string()).collect(),
            },
        )
    }

    fn new(name: &str, kind: ParamKind) -> Self {
        ParamSpec {
            name: name.to_string(),
            kind,
            units: String::new(),
        }
    }

    pub fn with_units(mut self, units: &str) -> Self {
        self.units = units.to_string();
        self
    }

    fn validate(&self) -> Result<()> {
        match &self.kind {
            ParamKind::Continuous { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::domain(
                        &self.name,
                        format!("need lo < hi, got [{lo}, {hi}]"),
                    ));
                }
            }
            ParamKind::Integer { lo, hi } => {
                if lo >= hi {
                    return Err(Error::domain(
                        &self.name,
                        format!("need lo < hi, got [{lo}, {hi}]"),
                    ));
                }
            }
            ParamKind::Categorical { values } => {
                if values.is_empty() {
                    return Err(Error::domain(&self.name, "empty categorical value list"));
                }
                let mut seen = HashSet::new();
                for v in values {
                    if !seen.insert(v.as_str()) {
                        return Err(Error::domain(&self.name, format!("duplicate value `{v}`")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Number of distinct values, or `None` for continuous parameters.
    pub fn cardinality(&self) -> Option<u128> {
        match &self.kind {
            ParamKind::Continuous { .. } => None,
            ParamKind::Integer { lo, hi } => Some((*hi as i128 - *lo as i128 + 1) as u128),
            ParamKind::Categorical { values } => Some(values.len() as u128),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Value {
        match &self.kind {
            ParamKind::Continuous { lo, hi } => Value::Real(rng.gen_range(*lo..=*hi)),
            ParamKind::Integer { lo, hi } => Value::Int(rng.gen_range(*lo..=*hi)),
            ParamKind::Categorical { values } => Value::Cat(values[rng.gen_range(0..values.len())].clone()),
        }
    }

    pub fn encode_value(&self, value: &Value) -> Result<f64> {
        match (&self.kind, value) {
            (ParamKind::Continuous { lo, hi }, Value::Real(x)) => {
                if x.is_finite() && lo <= x && x <= hi {
                    Ok(*x)
                } else {
                    Err(Error::domain(&self.name, format!("{x} outside [{lo}, {hi}]")))
                }
            }
            (ParamKind::Continuous { .. }, Value::Int(i)) => self.encode_value(&Value::Real(*i as f64)),
            (ParamKind::Integer { lo, hi }, Value::Int(i)) => {
                if lo <= i && i <= hi {
                    Ok(*i as f64)
                } else {
                    Err(Error::domain(&self.name, format!("{i} outside [{lo}, {hi}]")))
                }
            }
            (ParamKind::Categorical { values }, Value::Cat(s)) => values
                .iter()
                .position(|v| v == s)
                .map(|i| i as f64)
                .ok_or_else(|| Error::domain(&self.name, format!("`{s}` is not a declared value"))),
            (_, v) => Err(Error::domain(
                &self.name,
                format!("value `{v}` has the wrong type"),
            )),
        }
    }

    /// Parses the textual form used in trace files.
    pub fn parse_value(&self, text: &str) -> Result<Value> {
        let text = text.trim();
        let value = match &self.kind {
            ParamKind::Continuous { .. } => Value::Real(
                text.parse()
                    .map_err(|_| Error::domain(&self.name, format!("`{text}` is not a number")))?,
            ),
            ParamKind::Integer { .. } => Value::Int(
                text.parse()
                    .map_err(|_| Error::domain(&self.name, format!("`{text}` is not an integer")))?,
            ),
            ParamKind::Categorical { .. } => Value::Cat(text.to_string()),
        };
        self.encode_value(&value)?;
        Ok(value)
    }
}

/// One parameter setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Real(f64),
    Cat(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Real(x) => write!(f, "{x}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Cat(s) => f.write_str(s),
        }
    }
}

/// A point in a [`ConfigSpace`], values aligned with the space's parameter order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub values: Vec<Value>,
}

impl Configuration {
    pub fn new(values: Vec<Value>) -> Self {
        Configuration { values }
    }
}

#[derive(Debug, Deserialize)]
struct SpaceFile {
    param: Vec<ParamSpec>,
}

#[derive(Debug, Serialize)]
struct SpaceFileRef<'a> {
    param: &'a [ParamSpec],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigSpace {
    params: Vec<ParamSpec>,
}

impl ConfigSpace {
    pub fn new(params: Vec<ParamSpec>) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::InvalidSpace("no parameters".into()));
        }
        let mut names = HashSet::new();
        for p in &params {
            if !names.insert(p.name.as_str()) {
                return Err(Error::InvalidSpace(format!("duplicate parameter `{}`", p.name)));
            }
            p.validate()?;
        }
        Ok(ConfigSpace { params })
    }

    /// The 25-parameter hardware/software space of a two-socket Spark node.
    pub fn builtin_spark() -> Self {
        Self::from_toml_str(BUILTIN_SPARK).expect("bundled space file is valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: SpaceFile = toml::from_str(text).map_err(|e| Error::InvalidSpace(e.to_string()))?;
        Self::new(file.param)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: SpaceFile = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        Self::new(file.param)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&SpaceFileRef { param: &self.params }).expect("space serializes")
    }

    pub fn params(&self) -> &[ParamSpec] {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.params.len()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.params.iter().map(|p| p.name.as_str())
    }

    /// Total number of distinct configurations, `None` when any parameter is
    /// continuous or the count overflows.
    pub fn cardinality(&self) -> Option<u128> {
        self.params
            .iter()
            .try_fold(1u128, |acc, p| acc.checked_mul(p.cardinality()?))
    }

    pub fn sample_random<R: Rng + ?Sized>(&self, rng: &mut R) -> Configuration {
        Configuration::new(self.params.iter().map(|p| p.sample(rng)).collect())
    }

    pub fn validate(&self, config: &Configuration) -> Result<()> {
        self.encode(config).map(|_| ())
    }

    pub fn encode(&self, config: &Configuration) -> Result<Vec<f64>> {
        if config.values.len() != self.params.len() {
            return Err(Error::Arity {
                expected: self.params.len(),
                got: config.values.len(),
            });
        }
        self.params
            .iter()
            .zip(&config.values)
            .map(|(p, v)| p.encode_value(v))
            .collect()
    }

    /// Draws `n` distinct configurations by i.i.d. sampling with duplicate
    /// rejection.
    pub fn candidate_pool<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<Configuration>> {
        if n == 0 {
            return Err(Error::InvalidParam(
                "candidate pool size must be at least 1".into(),
            ));
        }
        if let Some(card) = self.cardinality() {
            if card < n as u128 {
                return Err(Error::PoolExhausted {
                    requested: n,
                    found: card as usize,
                });
            }
        }
        let max_draws = n.saturating_mul(100).saturating_add(1000);
        let mut seen = HashSet::with_capacity(n);
        let mut pool = Vec::with_capacity(n);
        for _ in 0..max_draws {
            if pool.len() == n {
                break;
            }
            let config = self.sample_random(rng);
            let key = encoded_key(&self.encode(&config)?);
            if seen.insert(key) {
                pool.push(config);
            }
        }
        if pool.len() < n {
            return Err(Error::PoolExhausted {
                requested: n,
                found: pool.len(),
            });
        }
        Ok(pool)
    }
}

/// Bit-exact identity of an encoded configuration, usable as a hash key.
pub fn encoded_key(features: &[f64]) -> Vec<u64> {
    features.iter().map(|x| x.to_bits()).collect()
}
