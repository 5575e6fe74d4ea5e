//! Re-identification risk of the perturbed ε-quasi.
//!
//! An attacker who knows a record's class and the original ε-quasi values of
//! that class links a published value to the nearest original. A link
//! succeeds when the record's own original is among the nearest (ties count
//! as success). Confidence suppression removes published values whose
//! confidence interval holds too few originals to hide among.

use serde::Serialize;

use crate::dp::{check_eps, diam};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::kanon::Partition;
use crate::Scalar;

/// Whether published value `i` links to its own original by nearest
/// distance over all of `original`. Straightforward O(m) form.
pub fn link_indicator<T: Scalar>(i: usize, published: &[T], original: &[T]) -> bool {
    let y = published[i];
    let own = (y - original[i]).abs();
    original.iter().all(|&x| own <= (y - x).abs())
}

/// [`link_indicator`] for every member of a class, via binary search on the
/// sorted originals.
pub fn class_links<T: Scalar>(published: &[T], original: &[T]) -> Vec<bool> {
    let mut sorted = original.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    published
        .iter()
        .zip(original)
        .map(|(&y, &x)| {
            let pos = sorted.partition_point(|&v| v < y);
            let mut best = T::infinity();
            if pos < sorted.len() {
                best = best.min(sorted[pos] - y);
            }
            if pos > 0 {
                best = best.min(y - sorted[pos - 1]);
            }
            (y - x).abs() <= best
        })
        .collect()
}

/// `r` with `P(|Lap(0, diam/ε)| ≤ r) = c`, i.e. `-(diam/ε)·ln(1 - c)`.
pub fn confidence_range<T: Scalar>(diam: T, eps: T, c: T) -> Result<T> {
    check_eps(eps)?;
    if !(c >= T::zero() && c < T::one()) {
        return Err(Error::Domain(format!("confidence must lie in [0, 1), got {c}")));
    }
    if diam < T::zero() {
        return Err(Error::Domain(format!("negative diameter {diam}")));
    }
    Ok(-(diam / eps) * (T::one() - c).ln())
}

/// Number of originals within `r` of each published value.
pub fn neighbour_counts<T: Scalar>(published: &[T], original: &[T], r: T) -> Vec<usize> {
    let mut sorted = original.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    published
        .iter()
        .map(|&y| {
            let lo = sorted.partition_point(|&v| v < y - r);
            let hi = sorted.partition_point(|&v| v <= y + r);
            hi - lo
        })
        .collect()
}

/// Outcome of confidence suppression on one class, as member positions.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSuppression {
    pub range: f64,
    /// Members with `0 < ℓ < k`.
    pub records: Vec<usize>,
    /// `|ec| - |{ℓ < k}| < k`: the whole class goes.
    pub whole_class: bool,
}

pub fn suppress_class<T: Scalar>(
    published: &[T],
    original: &[T],
    k: usize,
    eps: T,
    c: T,
) -> Result<ClassSuppression> {
    let r = confidence_range(diam(original)?, eps, c)?;
    let counts = neighbour_counts(published, original, r);
    let records = counts
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 0 && l < k)
        .map(|(i, _)| i)
        .collect();
    let below = counts.iter().filter(|&&l| l < k).count();
    Ok(ClassSuppression {
        range: r.to_f64_lossy(),
        records,
        whole_class: original.len() - below < k,
    })
}

/// Original and published ε-quasi values of each class, aligned by member.
pub fn class_pairs<T: Scalar>(
    original: &Dataset<T>,
    published: &Dataset<T>,
    partition: &Partition<T>,
    column: &str,
) -> Result<Vec<(Vec<T>, Vec<T>)>> {
    let oc = original.column_index(column)?;
    let pc = published.column_index(column)?;
    let orig_rows = original.rows_by_source();
    let pub_rows = published.rows_by_source();
    let value = |ds: &Dataset<T>, rows: &std::collections::HashMap<usize, usize>, col: usize, s: usize| -> Result<T> {
        let r = rows
            .get(&s)
            .ok_or_else(|| Error::Parameter(format!("record {s} is missing")))?;
        ds.row(*r)[col]
            .as_num()
            .ok_or_else(|| Error::Classification(format!("`{column}` is not numeric")))
    };
    partition
        .classes
        .iter()
        .map(|c| {
            let o = c
                .members
                .iter()
                .map(|&s| value(original, &orig_rows, oc, s))
                .collect::<Result<Vec<_>>>()?;
            let p = c
                .members
                .iter()
                .map(|&s| value(published, &pub_rows, pc, s))
                .collect::<Result<Vec<_>>>()?;
            Ok((o, p))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct LinkResult {
    pub links: usize,
    pub retained: usize,
    pub risk: f64,
    pub per_class: Vec<ClassRisk>,
}

impl LinkResult {
    /// Binomial standard error of `risk`.
    pub fn standard_error(&self) -> f64 {
        if self.retained == 0 {
            return 0.0;
        }
        (self.risk * (1.0 - self.risk) / self.retained as f64).sqrt()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassRisk {
    pub size: usize,
    pub links: usize,
}

pub fn linking_risk<T: Scalar>(pairs: &[(Vec<T>, Vec<T>)]) -> LinkResult {
    let per_class: Vec<ClassRisk> = pairs
        .iter()
        .map(|(o, p)| ClassRisk {
            size: o.len(),
            links: class_links(p, o).into_iter().filter(|&l| l).count(),
        })
        .collect();
    let links = per_class.iter().map(|c| c.links).sum();
    let retained = per_class.iter().map(|c| c.size).sum();
    LinkResult {
        links,
        retained,
        risk: if retained == 0 { 0.0 } else { links as f64 / retained as f64 },
        per_class,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfidenceSuppression {
    /// Source indices removed, sorted.
    pub records: Vec<usize>,
    /// Indices of classes removed whole.
    pub classes: Vec<usize>,
    /// Removed records over all records covered by the partition, so it adds
    /// directly to the k-anonymisation suppression.
    pub fraction: f64,
}

pub fn confidence_suppression<T: Scalar>(
    pairs: &[(Vec<T>, Vec<T>)],
    partition: &Partition<T>,
    eps: T,
    c: T,
) -> Result<ConfidenceSuppression> {
    if pairs.len() != partition.classes.len() {
        return Err(Error::Parameter("class values do not match the partition".into()));
    }
    let mut records = Vec::new();
    let mut classes = Vec::new();
    for (ci, ((o, p), class)) in pairs.iter().zip(&partition.classes).enumerate() {
        let s = suppress_class(p, o, partition.k, eps, c)?;
        if s.whole_class {
            classes.push(ci);
            records.extend(&class.members);
        } else {
            records.extend(s.records.iter().map(|&i| class.members[i]));
        }
    }
    records.sort_unstable();
    let n = partition.n();
    Ok(ConfidenceSuppression {
        fraction: if n == 0 { 0.0 } else { records.len() as f64 / n as f64 },
        records,
        classes,
    })
}

/// JSON form written next to a published dataset.
#[derive(Debug, Clone, Serialize)]
pub struct RiskReport {
    pub k: usize,
    pub eps: f64,
    pub c: Option<f64>,
    pub risk: f64,
    pub risk_standard_error: f64,
    pub ola_suppression: f64,
    pub confidence_suppression: Option<f64>,
    pub per_class: Vec<ClassRisk>,
}

impl RiskReport {
    pub fn new(
        partition: &Partition<impl Scalar>,
        eps: f64,
        c: Option<f64>,
        links: LinkResult,
        conf: Option<&ConfidenceSuppression>,
    ) -> Self {
        RiskReport {
            k: partition.k,
            eps,
            c,
            risk: links.risk,
            risk_standard_error: links.standard_error(),
            ola_suppression: partition.suppression_fraction(),
            confidence_suppression: conf.map(|s| s.fraction),
            per_class: links.per_class,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn naive_links() {
        let x = [150.0, 160.0, 170.0];
        assert!(link_indicator(0, &[151.0, 0.0, 0.0], &x));
        assert!(!link_indicator(0, &[158.0, 0.0, 0.0], &x));
        // tie counts as success
        assert!(link_indicator(0, &[155.0, 0.0, 0.0], &x));
        // duplicated originals
        assert!(link_indicator(1, &[0.0, 151.0], &[150.0, 150.0]));
    }

    #[test]
    fn confidence_ranges() {
        assert_relative_eq!(
            confidence_range(40.0, 1.0, 0.99).unwrap(),
            40.0 * 100f64.ln(),
            epsilon = 1e-9
        );
        assert_relative_eq!(confidence_range(40.0, 1.0, 0.99).unwrap(), 184.207, epsilon = 1e-3);
        assert_eq!(confidence_range(0.0, 1.0, 0.5).unwrap(), 0.0);
        assert_eq!(confidence_range(10.0, 1.0, 0.0).unwrap(), 0.0);
        assert!(matches!(confidence_range(40.0, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(confidence_range(40.0, 1.0, -0.1).is_err());
        assert!(confidence_range(40.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn counts_and_class_rule() {
        let x = [100.0, 101.0, 102.0, 200.0];
        let y = [100.5, 101.5, 300.0, 199.0];
        // diam 100, ε large so r = 1 with c = 1 - e^{-1} at ε = 100
        let c = 1.0 - (-1.0f64).exp();
        let r = confidence_range(100.0, 100.0, c).unwrap();
        assert_relative_eq!(r, 1.0, epsilon = 1e-12);
        assert_eq!(neighbour_counts(&y, &x, r), vec![2, 2, 0, 1]);

        let s = suppress_class(&y, &x, 2, 100.0, c).unwrap();
        assert_eq!(s.records, vec![3]);
        // ℓ < k for two members: 4 - 2 = 2, not below k = 2
        assert!(!s.whole_class);
        let s3 = suppress_class(&y, &x, 3, 100.0, c).unwrap();
        assert_eq!(s3.records, vec![0, 1, 3]);
        assert!(s3.whole_class);
    }

    #[test]
    fn zero_diameter_class_kept() {
        let x = [170.0; 5];
        let s = suppress_class(&x, &x, 5, 0.05, 0.99).unwrap();
        assert!(s.records.is_empty());
        assert!(!s.whole_class);
    }

    proptest! {
        #[test]
        fn fast_links_match_naive(
            x in prop::collection::vec(-50i32..50, 1..30),
            noise in prop::collection::vec(-20i32..20, 30),
        ) {
            let x: Vec<f64> = x.into_iter().map(f64::from).collect();
            let y: Vec<f64> = x.iter().zip(&noise).map(|(a, n)| a + f64::from(*n) / 2.0).collect();
            let fast = class_links(&y, &x);
            for (i, &f) in fast.iter().enumerate() {
                prop_assert_eq!(f, link_indicator(i, &y, &x));
            }
        }

        #[test]
        fn counts_match_naive(
            x in prop::collection::vec(-50i32..50, 1..30),
            y in prop::collection::vec(-60i32..60, 1..30),
            r in 0u32..20,
        ) {
            let x: Vec<f64> = x.into_iter().map(f64::from).collect();
            let y: Vec<f64> = y.into_iter().map(f64::from).collect();
            let r = f64::from(r) / 2.0;
            let got = neighbour_counts(&y, &x, r);
            for (yi, g) in y.iter().zip(got) {
                let want = x.iter().filter(|&&v| (v - yi).abs() <= r).count();
                prop_assert_eq!(g, want);
            }
        }
    }
}
