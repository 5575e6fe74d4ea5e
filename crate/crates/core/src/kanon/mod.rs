//! k-anonymous partitions of the k-quasi columns.
//!
//! [`ola_anonymise`] performs global recoding over the lattice of hierarchy
//! levels with a suppression budget; [`mondrian_anonymise`] performs local
//! recoding by recursive median splits.
//!
//! Class members and suppressed records are *source indices* (see
//! [`Dataset::source_index`](crate::dataset::Dataset::source_index)).

mod mondrian;
mod ola;

pub use mondrian::mondrian_anonymise;
pub use ola::{ola_anonymise, ola_loss_exact, OlaSearch};

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::dataset::{AttributeClassification, Dataset, Role};
use crate::error::{Error, Result};
use crate::hierarchy::LatticeNode;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Ola,
    Mondrian,
    /// Classes read back from an already published dataset.
    Observed,
}

/// Generalised value of one k-quasi within a class.
#[derive(Debug, Clone, PartialEq)]
pub enum KeyPart<T> {
    Token(String),
    Range { lo: T, hi: T },
    Categories { lo: String, hi: String },
}

impl<T: Scalar> KeyPart<T> {
    pub fn render(&self) -> String {
        match self {
            KeyPart::Token(s) => s.clone(),
            KeyPart::Range { lo, hi } if lo == hi => format!("{lo}"),
            KeyPart::Range { lo, hi } => format!("[{lo}..{hi}]"),
            KeyPart::Categories { lo, hi } if lo == hi => lo.clone(),
            KeyPart::Categories { lo, hi } => format!("[{lo}..{hi}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceClass<T> {
    /// One entry per k-quasi, in schema order.
    pub key: Vec<KeyPart<T>>,
    /// Source indices of member records.
    pub members: Vec<usize>,
}

impl<T> EquivalenceClass<T> {
    pub fn m(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partition<T> {
    pub classes: Vec<EquivalenceClass<T>>,
    /// Sorted source indices of suppressed records.
    pub suppressed: Vec<usize>,
    pub k: usize,
    pub algorithm: Algorithm,
    /// Chosen lattice node (OLA only).
    pub node: Option<LatticeNode>,
    /// k-quasi column names, in key order.
    pub attributes: Vec<String>,
}

impl<T: Scalar> Partition<T> {
    /// Records covered: class members plus suppressed.
    pub fn n(&self) -> usize {
        self.retained() + self.suppressed.len()
    }

    pub fn retained(&self) -> usize {
        self.classes.iter().map(|c| c.m()).sum()
    }

    /// Suppressed records as a fraction of all records.
    pub fn suppression_fraction(&self) -> f64 {
        let n = self.n();
        if n == 0 {
            0.0
        } else {
            self.suppressed.len() as f64 / n as f64
        }
    }

    /// Checks that classes and the suppressed set are disjoint, cover exactly
    /// `records`, and that every class has at least `k` members with a key
    /// of the right arity.
    pub fn check(&self, records: &[usize]) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (i, c) in self.classes.iter().enumerate() {
            if c.m() < self.k {
                return Err(Error::Parameter(format!(
                    "class {i} has {} < k = {} members",
                    c.m(),
                    self.k
                )));
            }
            if c.key.len() != self.attributes.len() {
                return Err(Error::Parameter(format!("class {i} key has wrong arity")));
            }
            for &r in &c.members {
                if !seen.insert(r) {
                    return Err(Error::Parameter(format!("record {r} appears twice")));
                }
            }
        }
        for &r in &self.suppressed {
            if !seen.insert(r) {
                return Err(Error::Parameter(format!("record {r} appears twice")));
            }
        }
        let expected: BTreeSet<usize> = records.iter().copied().collect();
        if seen != expected {
            return Err(Error::Parameter("partition does not cover the dataset".into()));
        }
        Ok(())
    }

    /// Groups records of `ds` by the text of their k-quasi cells. Used to
    /// recover classes from a published dataset, where equal generalised keys
    /// identify a class.
    pub fn from_published(ds: &Dataset<T>, cls: &AttributeClassification, k: usize) -> Result<Self> {
        let attributes: Vec<String> = cls
            .columns_with(ds.schema(), Role::KQuasi)
            .into_iter()
            .map(str::to_string)
            .collect();
        if attributes.is_empty() {
            return Err(Error::Classification("no k-quasi column".into()));
        }
        let idx = attributes
            .iter()
            .map(|a| ds.column_index(a))
            .collect::<Result<Vec<_>>>()?;
        let mut order: Vec<Vec<String>> = Vec::new();
        let mut groups: HashMap<Vec<String>, Vec<usize>> = HashMap::new();
        for i in 0..ds.n() {
            let key: Vec<String> = idx.iter().map(|&c| ds.text(i, c)).collect();
            let entry = groups.entry(key.clone()).or_default();
            if entry.is_empty() {
                order.push(key);
            }
            entry.push(ds.source_index(i));
        }
        let classes = order
            .into_iter()
            .map(|key| {
                let members = groups.remove(&key).expect("grouped key");
                EquivalenceClass {
                    key: key.into_iter().map(KeyPart::Token).collect(),
                    members,
                }
            })
            .collect();
        Ok(Partition {
            classes,
            suppressed: Vec::new(),
            k,
            algorithm: Algorithm::Observed,
            node: None,
            attributes,
        })
    }

    pub fn report(&self) -> PartitionReport {
        PartitionReport {
            algorithm: self.algorithm,
            k: self.k,
            node: self.node.as_ref().map(|n| n.levels.clone()),
            attributes: self.attributes.clone(),
            classes: self
                .classes
                .iter()
                .map(|c| ClassReport {
                    key: c.key.iter().map(KeyPart::render).collect(),
                    size: c.m(),
                })
                .collect(),
            suppressed: self.suppressed.clone(),
        }
    }
}

/// JSON form of a partition.
#[derive(Debug, Clone, Serialize)]
pub struct PartitionReport {
    pub algorithm: Algorithm,
    pub k: usize,
    pub node: Option<Vec<usize>>,
    pub attributes: Vec<String>,
    pub classes: Vec<ClassReport>,
    pub suppressed: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    pub key: Vec<String>,
    pub size: usize,
}

pub(crate) fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    if k > n {
        return Err(Error::Infeasible { k, n });
    }
    Ok(())
}
