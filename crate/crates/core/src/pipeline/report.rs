use std::collections::BTreeMap;

use serde::Serialize;

use super::config::RunConfig;
use crate::kanon::{Algorithm, Partition};
use crate::loss::LossReport;
use crate::risk::RiskReport;
use crate::Scalar;

/// Metrics of one stochastic repetition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetrics {
    pub run: usize,
    pub seed: u64,
    pub empirical_error: f64,
    pub risk: f64,
    pub links: usize,
    pub confidence_suppressed: Option<usize>,
    /// Fraction of all input records.
    pub confidence_suppression: Option<f64>,
    /// Perturbed values outside the original column's range. They are kept.
    pub out_of_domain: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecordCounts {
    pub input: usize,
    pub ola_suppressed: usize,
    pub confidence_suppressed: usize,
    pub emitted: usize,
}

impl RecordCounts {
    pub fn consistent(&self) -> bool {
        self.ola_suppressed + self.confidence_suppressed + self.emitted == self.input
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionSummary {
    pub algorithm: Algorithm,
    pub k: usize,
    pub classes: usize,
    pub retained: usize,
    pub suppressed: usize,
    pub suppression_fraction: f64,
    /// Class size → number of classes.
    pub size_histogram: BTreeMap<usize, usize>,
    pub node: Option<Vec<usize>>,
}

impl PartitionSummary {
    pub fn of<T: Scalar>(p: &Partition<T>) -> Self {
        let mut size_histogram = BTreeMap::new();
        for c in &p.classes {
            *size_histogram.entry(c.m()).or_insert(0) += 1;
        }
        PartitionSummary {
            algorithm: p.algorithm,
            k: p.k,
            classes: p.classes.len(),
            retained: p.retained(),
            suppressed: p.suppressed.len(),
            suppression_fraction: p.suppression_fraction(),
            size_histogram,
            node: p.node.as_ref().map(|n| n.levels.clone()),
        }
    }
}

/// Means over repetitions.
#[derive(Debug, Clone, Serialize)]
pub struct RunMeans {
    pub runs: usize,
    pub empirical_error: f64,
    pub risk: f64,
    /// Standard error of the mean risk across runs.
    pub risk_standard_error: f64,
    pub confidence_suppression: Option<f64>,
}

impl RunMeans {
    pub fn of(runs: &[RunMetrics]) -> Self {
        let n = runs.len() as f64;
        let mean = |f: &dyn Fn(&RunMetrics) -> f64| runs.iter().map(f).sum::<f64>() / n;
        let risk = mean(&|r| r.risk);
        let risk_standard_error = if runs.len() > 1 {
            let var = runs.iter().map(|r| (r.risk - risk).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        let confidence_suppression = if runs.iter().all(|r| r.confidence_suppression.is_some()) && !runs.is_empty() {
            Some(mean(&|r| r.confidence_suppression.unwrap_or(0.0)))
        } else {
            None
        };
        RunMeans {
            runs: runs.len(),
            empirical_error: mean(&|r| r.empirical_error),
            risk,
            risk_standard_error,
            confidence_suppression,
        }
    }
}

/// Everything known about one pipeline invocation. The first repetition is
/// the one whose dataset is published.
#[derive(Debug, Clone, Serialize)]
pub struct AnonymisationReport {
    pub config: RunConfig,
    pub counts: RecordCounts,
    pub partition: PartitionSummary,
    pub loss: LossReport,
    pub risk: RiskReport,
    pub means: RunMeans,
    pub runs: Vec<RunMetrics>,
    pub timings_ms: BTreeMap<String, f64>,
}

impl AnonymisationReport {
    pub fn to_json(&self) -> crate::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
