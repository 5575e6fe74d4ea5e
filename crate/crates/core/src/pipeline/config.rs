//! TOML run configuration.
//!
//! ```toml
//! input = "adult.csv"
//! algorithm = "ola"          # or "mondrian"
//! k = 20
//! eps = 8.0
//! max_suppression = 0.05     # OLA only, default 0.05
//! confidence = 0.99          # optional
//! seed = 7
//! runs = 30
//! output_dir = "out"
//!
//! [[derive]]                 # optional: name = offset + scale * from
//! name = "year_of_birth"
//! from = "age"
//! offset = 1994
//! scale = -1
//!
//! [synth]                    # optional: append synthetic measures
//! params = "builtin:plausible"
//! age_column = "age"
//! gender_column = "sex"
//! measures = ["height"]
//!
//! [[column]]
//! name = "year_of_birth"
//! kind = "numeric"
//! role = "k_quasi"
//! hierarchy = "builtin:year_of_birth"
//! ```
//!
//! `hierarchy` is `builtin:NAME` or a path to a hierarchy CSV. `order` lists
//! the values of a categorical k-quasi for Mondrian. Relative paths are
//! resolved against the directory of the configuration file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeClassification, Column, ColumnKind, Role, Schema};
use crate::error::{Error, Result};
use crate::hierarchy::{self, Hierarchy};
use crate::synth::{AnthropometricModel, Measure};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmChoice {
    Ola,
    Mondrian,
}

impl std::str::FromStr for AlgorithmChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ola" => Ok(AlgorithmChoice::Ola),
            "mondrian" => Ok(AlgorithmChoice::Mondrian),
            other => Err(Error::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnConfig {
    pub name: String,
    pub kind: ColumnKind,
    pub role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hierarchy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeriveConfig {
    pub name: String,
    pub from: String,
    #[serde(default)]
    pub offset: f64,
    #[serde(default = "one")]
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    /// `builtin:plausible` or a parameter CSV.
    pub params: String,
    pub age_column: String,
    pub gender_column: String,
    pub measures: Vec<String>,
    /// Defaults to the run seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SynthConfig {
    pub fn measures(&self) -> Result<Vec<Measure>> {
        self.measures.iter().map(|m| Measure::parse(m)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub input: PathBuf,
    pub algorithm: AlgorithmChoice,
    pub k: usize,
    pub eps: f64,
    #[serde(default = "default_max_suppression")]
    pub max_suppression: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one_run")]
    pub runs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, rename = "derive", skip_serializing_if = "Vec::is_empty")]
    pub derived: Vec<DeriveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthConfig>,
    #[serde(rename = "column")]
    pub columns: Vec<ColumnConfig>,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn one() -> f64 {
    1.0
}

fn one_run() -> usize {
    1
}

fn default_max_suppression() -> f64 {
    0.05
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg = Self::parse(&std::fs::read_to_string(path)?)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn input_path(&self) -> PathBuf {
        self.resolve(&self.input)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Config(format!("k must be at least 2, got {}", self.k)));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::Config(format!("eps must be positive, got {}", self.eps)));
        }
        if !(0.0..=1.0).contains(&self.max_suppression) {
            return Err(Error::Config(format!(
                "max_suppression must lie in [0, 1], got {}",
                self.max_suppression
            )));
        }
        if let Some(c) = self.confidence {
            if !(0.0..1.0).contains(&c) {
                return Err(Error::Config(format!("confidence must lie in [0, 1), got {c}")));
            }
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if let Some(s) = &self.synth {
            s.measures()?;
        }
        self.classification()
            .validate_for_pipeline(&self.schema()?)
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.algorithm == AlgorithmChoice::Ola {
            for c in self.columns.iter().filter(|c| c.role == Role::KQuasi) {
                if c.hierarchy.is_none() {
                    return Err(Error::Config(format!("k-quasi `{}` needs a hierarchy for OLA", c.name)));
                }
            }
        }
        Ok(())
    }

    /// Columns produced by `[[derive]]` and `[synth]` rather than read.
    pub fn generated_columns(&self) -> Vec<String> {
        let mut out: Vec<String> = self.derived.iter().map(|d| d.name.clone()).collect();
        if let Some(s) = &self.synth {
            if let Ok(ms) = s.measures() {
                out.extend(ms.iter().map(|m| m.column_name().to_string()));
            }
        }
        out
    }

    /// Full schema after derived and synthetic columns are added.
    pub fn schema(&self) -> Result<Schema> {
        Schema::new(
            self.columns
                .iter()
                .map(|c| Column::new(c.name.clone(), c.kind))
                .collect(),
        )
    }

    /// Schema of the columns read from the input CSV.
    pub fn input_schema(&self) -> Result<Schema> {
        let generated = self.generated_columns();
        Schema::new(
            self.columns
                .iter()
                .filter(|c| !generated.contains(&c.name))
                .map(|c| Column::new(c.name.clone(), c.kind))
                .collect(),
        )
    }

    pub fn classification(&self) -> AttributeClassification {
        let mut cls = AttributeClassification::new();
        for c in &self.columns {
            cls.set(c.name.clone(), c.role);
        }
        cls
    }

    /// Hierarchies of the k-quasis, in column order.
    pub fn hierarchies(&self) -> Result<Vec<Hierarchy>> {
        self.columns
            .iter()
            .filter(|c| c.role == Role::KQuasi)
            .filter_map(|c| c.hierarchy.as_ref().map(|h| (c, h)))
            .map(|(c, h)| self.load_hierarchy_ref(h).map(|x| x.renamed(c.name.clone())))
            .collect()
    }

    fn load_hierarchy_ref(&self, reference: &str) -> Result<Hierarchy> {
        match reference.strip_prefix("builtin:") {
            Some(name) => hierarchy::builtin(name)
                .ok_or_else(|| Error::Config(format!("no built-in hierarchy `{name}`"))),
            None => hierarchy::load_hierarchy(self.resolve(Path::new(reference))),
        }
    }

    pub fn orders(&self) -> BTreeMap<String, Vec<String>> {
        self.columns
            .iter()
            .filter_map(|c| c.order.clone().map(|o| (c.name.clone(), o)))
            .collect()
    }

    pub fn synth_model<T: Scalar>(&self) -> Result<Option<AnthropometricModel<T>>> {
        let Some(s) = &self.synth else { return Ok(None) };
        let model = match s.params.strip_prefix("builtin:") {
            Some("plausible") => AnthropometricModel::plausible_defaults(),
            Some(other) => return Err(Error::Config(format!("no built-in synth parameters `{other}`"))),
            None => AnthropometricModel::load(self.resolve(Path::new(&s.params)))?,
        };
        Ok(Some(model))
    }

    pub fn eps_column(&self) -> Result<String> {
        let eps: Vec<&ColumnConfig> = self.columns.iter().filter(|c| c.role == Role::EpsQuasi).collect();
        match eps.as_slice() {
            [one] => Ok(one.name.clone()),
            [] => Err(Error::Config("no ε-quasi column".into())),
            _ => Err(Error::Unsupported(format!(
                "{} ε-quasi columns; exactly one is supported",
                eps.len()
            ))),
        }
    }
}
