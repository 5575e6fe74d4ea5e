//! Information loss: precision loss of the k-quasis, and analytic and
//! empirical relative error of the perturbed ε-quasi.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rand::Rng;
use serde::Serialize;

use crate::dataset::{ColumnKind, Dataset};
use crate::dp::{check_eps, diam};
use crate::error::{Error, Result};
use crate::hierarchy::LatticeNode;
use crate::kanon::{KeyPart, Partition};
use crate::Scalar;

/// `level / (levels - 1)`; zero for a hierarchy with one level.
pub fn categorical_precision_loss<T: Scalar>(level: usize, levels: usize) -> Result<T> {
    if level >= levels {
        return Err(Error::LevelRange { level, levels });
    }
    if levels == 1 {
        return Ok(T::zero());
    }
    Ok(T::of_usize(level) / T::of_usize(levels - 1))
}

/// Width of `[lo, hi]` relative to the domain `[dom_lo, dom_hi]`.
pub fn numerical_precision_loss<T: Scalar>(lo: T, hi: T, dom_lo: T, dom_hi: T) -> Result<T> {
    if hi < lo || dom_hi < dom_lo || lo < dom_lo || hi > dom_hi {
        return Err(Error::Domain(format!(
            "range [{lo}, {hi}] is not inside domain [{dom_lo}, {dom_hi}]"
        )));
    }
    if dom_hi == dom_lo {
        return Ok(T::zero());
    }
    Ok((hi - lo) / (dom_hi - dom_lo))
}

/// Mean categorical precision loss over the attributes of a lattice node.
pub fn ola_loss<T: Scalar>(node: &LatticeNode, level_counts: &[usize]) -> Result<T> {
    if node.levels.len() != level_counts.len() || level_counts.is_empty() {
        return Err(Error::Parameter("node arity does not match the hierarchies".into()));
    }
    let mut sum = T::zero();
    for (&l, &h) in node.levels.iter().zip(level_counts) {
        sum = sum + categorical_precision_loss::<T>(l, h)?;
    }
    Ok(sum / T::of_usize(level_counts.len()))
}

pub fn harmonic_mean<T: Scalar>(values: &[T]) -> Result<T> {
    if values.is_empty() {
        return Err(Error::Domain("harmonic mean of an empty vector".into()));
    }
    let mut inv = T::zero();
    for &v in values {
        if v.is_nan() || v <= T::zero() {
            return Err(Error::Domain(format!("harmonic mean needs positive values, got {v}")));
        }
        inv = inv + v.recip();
    }
    Ok(T::of_usize(values.len()) / inv)
}

/// Expected relative error of one class: `diam / (ε · harmonic mean)`.
pub fn expected_ec_error<T: Scalar>(values: &[T], eps: T) -> Result<T> {
    check_eps(eps)?;
    Ok(diam(values)? / (eps * harmonic_mean(values)?))
}

/// Size-weighted mean of [`expected_ec_error`] over classes.
pub fn expected_dataset_error<T: Scalar, V: AsRef<[T]>>(classes: &[V], eps: T) -> Result<T> {
    check_eps(eps)?;
    let n: usize = classes.iter().map(|c| c.as_ref().len()).sum();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut acc = T::zero();
    for c in classes {
        let c = c.as_ref();
        acc = acc + expected_ec_error(c, eps)? * T::of_usize(c.len());
    }
    Ok(acc / T::of_usize(n))
}

/// Mean of `|perturbed - original| / |original|`.
pub fn empirical_relative_error<T: Scalar>(original: &[T], perturbed: &[T]) -> Result<T> {
    if original.len() != perturbed.len() {
        return Err(Error::Parameter("original and perturbed lengths differ".into()));
    }
    if original.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut acc = T::zero();
    for (&v, &p) in original.iter().zip(perturbed) {
        if v.is_nan() || v <= T::zero() {
            return Err(Error::Domain(format!("relative error needs positive values, got {v}")));
        }
        acc = acc + (p - v).abs() / v.abs();
    }
    Ok(acc / T::of_usize(original.len()))
}

/// Expected relative error of multiplicative uniform noise `v·(1 + U(-p, p))`.
pub fn uniform_baseline_error<T: Scalar>(p: T) -> T {
    p / T::of(2.0)
}

/// The `p` whose uniform baseline has expected relative error `target`.
pub fn uniform_matching_p<T: Scalar>(target: T) -> T {
    T::of(2.0) * target
}

pub fn uniform_perturb<T: Scalar, R: Rng + ?Sized>(values: &[T], p: T, rng: &mut R) -> Vec<T> {
    let p = p.to_f64_lossy();
    values
        .iter()
        .map(|&v| v * T::of(1.0 + p * (2.0 * rng.random::<f64>() - 1.0)))
        .collect()
}

/// Original ε-quasi values of each class, in member order.
pub fn class_values<T: Scalar>(
    original: &Dataset<T>,
    partition: &Partition<T>,
    column: &str,
) -> Result<Vec<Vec<T>>> {
    let col = original.column_index(column)?;
    let by_source = original.rows_by_source();
    partition
        .classes
        .iter()
        .map(|c| {
            c.members
                .iter()
                .map(|s| {
                    let r = by_source
                        .get(s)
                        .ok_or_else(|| Error::Parameter(format!("unknown record {s}")))?;
                    original.row(*r)[col]
                        .as_num()
                        .ok_or_else(|| Error::Classification(format!("`{column}` is not numeric")))
                })
                .collect()
        })
        .collect()
}

/// Pairs each published ε-quasi value with the original value of the same
/// source record. Returns `(original, published)`.
pub fn paired_values<T: Scalar>(
    original: &Dataset<T>,
    published: &Dataset<T>,
    column: &str,
) -> Result<(Vec<T>, Vec<T>)> {
    let oc = original.column_index(column)?;
    let pc = published.column_index(column)?;
    let by_source = original.rows_by_source();
    let mut orig = Vec::with_capacity(published.n());
    let mut publ = Vec::with_capacity(published.n());
    for i in 0..published.n() {
        let s = published.source_index(i);
        let r = by_source
            .get(&s)
            .ok_or_else(|| Error::Parameter(format!("published record {i} has no original")))?;
        let not_numeric = || Error::Classification(format!("`{column}` is not numeric"));
        orig.push(original.row(*r)[oc].as_num().ok_or_else(not_numeric)?);
        publ.push(published.row(i)[pc].as_num().ok_or_else(not_numeric)?);
    }
    Ok((orig, publ))
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassLoss {
    pub size: usize,
    pub diameter: f64,
    pub harmonic_mean: f64,
    pub expected_error: f64,
}

/// Loss summary of one anonymisation.
#[derive(Debug, Clone, Serialize)]
pub struct LossReport {
    pub eps: f64,
    /// Record-weighted precision loss of each k-quasi over retained records.
    pub k_quasi_loss: BTreeMap<String, f64>,
    /// Mean categorical precision loss of the chosen node (OLA only).
    pub ola_loss: Option<f64>,
    /// Record-weighted class range of the ε-quasi relative to its domain.
    pub eps_range_loss: f64,
    pub expected_error: f64,
    pub empirical_error: Option<f64>,
    pub classes: Vec<ClassLoss>,
}

/// Builds a [`LossReport`]. `level_counts` gives hierarchy heights for OLA
/// partitions; `published` enables the empirical error.
pub fn loss_report<T: Scalar>(
    original: &Dataset<T>,
    partition: &Partition<T>,
    eps_column: &str,
    eps: T,
    level_counts: Option<&[usize]>,
    published: Option<&Dataset<T>>,
) -> Result<LossReport> {
    let values = class_values(original, partition, eps_column)?;
    let all = original.numeric_column(eps_column)?;
    let dom = diam(&all)?;
    let retained = partition.retained();

    let mut classes = Vec::with_capacity(values.len());
    let mut range_acc = 0.0;
    for v in &values {
        let d = diam(v)?;
        let hm = harmonic_mean(v)?;
        classes.push(ClassLoss {
            size: v.len(),
            diameter: d.to_f64_lossy(),
            harmonic_mean: hm.to_f64_lossy(),
            expected_error: (d / (eps * hm)).to_f64_lossy(),
        });
        if dom > T::zero() {
            range_acc += (d / dom).to_f64_lossy() * v.len() as f64;
        }
    }

    let ola = match (&partition.node, level_counts) {
        (Some(node), Some(h)) => Some(ola_loss::<f64>(node, h)?),
        _ => None,
    };

    let mut k_quasi_loss = BTreeMap::new();
    for (a, name) in partition.attributes.iter().enumerate() {
        let loss = attribute_loss(original, partition, a, name, level_counts)?;
        k_quasi_loss.insert(name.clone(), loss);
    }

    let empirical = match published {
        Some(p) => {
            let (o, q) = paired_values(original, p, eps_column)?;
            Some(empirical_relative_error(&o, &q)?.to_f64_lossy())
        }
        None => None,
    };

    Ok(LossReport {
        eps: eps.to_f64_lossy(),
        k_quasi_loss,
        ola_loss: ola,
        eps_range_loss: if retained == 0 { 0.0 } else { range_acc / retained as f64 },
        expected_error: expected_dataset_error(&values, eps)?.to_f64_lossy(),
        empirical_error: empirical,
        classes,
    })
}

/// Precision loss of the `a`-th k-quasi. Lattice levels for OLA; numeric
/// ranges against the column domain; ordered categorical ranges as the share
/// of the column's distinct values spanned by the class, `(d - 1) / (D - 1)`.
fn attribute_loss<T: Scalar>(
    original: &Dataset<T>,
    partition: &Partition<T>,
    a: usize,
    name: &str,
    level_counts: Option<&[usize]>,
) -> Result<f64> {
    let retained = partition.retained();
    if retained == 0 {
        return Ok(0.0);
    }
    if let (Some(node), Some(h)) = (&partition.node, level_counts) {
        return categorical_precision_loss(node.levels[a], h[a]);
    }
    let col = original.column_index(name)?;
    let by_source = original.rows_by_source();
    let kind = original.schema().columns()[col].kind;
    let mut acc = 0.0;
    match kind {
        ColumnKind::Numeric => {
            let all = original.numeric_column(name)?;
            let (dlo, dhi) = bounds(&all);
            for c in &partition.classes {
                let loss = match &c.key[a] {
                    KeyPart::Range { lo, hi } => numerical_precision_loss(*lo, *hi, dlo, dhi)?,
                    _ => {
                        let vals: Vec<T> = c
                            .members
                            .iter()
                            .map(|s| original.row(by_source[s])[col].as_num().expect("numeric"))
                            .collect();
                        let (lo, hi) = bounds(&vals);
                        numerical_precision_loss(lo, hi, dlo, dhi)?
                    }
                };
                acc += loss.to_f64_lossy() * c.m() as f64;
            }
        }
        ColumnKind::Categorical => {
            let distinct: BTreeSet<String> = (0..original.n()).map(|i| original.text(i, col)).collect();
            let total = distinct.len();
            for c in &partition.classes {
                let d: BTreeSet<String> = c
                    .members
                    .iter()
                    .map(|s| original.text(by_source[s], col))
                    .collect();
                let loss = if total > 1 {
                    (d.len() - 1) as f64 / (total - 1) as f64
                } else {
                    0.0
                };
                acc += loss * c.m() as f64;
            }
        }
    }
    Ok(acc / retained as f64)
}

fn bounds<T: Scalar>(v: &[T]) -> (T, T) {
    v.iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Writes `k,eps,error` rows for plotting.
pub fn write_error_triples<W: Write>(writer: W, triples: &[(usize, f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["k", "eps", "error"])?;
    for (k, eps, err) in triples {
        w.write_record([k.to_string(), eps.to_string(), err.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
