//! Strict multidimensional Mondrian partitioning.
//!
//! A region is split on the k-quasi with the widest normalised range (range
//! within the region divided by the range over the whole dataset; ties go to
//! the earlier column). Records at or below the lower median go left, the
//! rest go right. A cut is allowed only when both halves keep at least `k`
//! records; if the widest attribute admits no cut the next widest is tried,
//! and a region with no allowable cut becomes an equivalence class.

use std::collections::{BTreeMap, HashMap};

use super::{check_k, Algorithm, EquivalenceClass, KeyPart, Partition};
use crate::dataset::{AttributeClassification, ColumnKind, Dataset};
use crate::error::{Error, Result};
use crate::Scalar;

enum Axis<'a> {
    Numeric,
    Ordered(&'a [String]),
}

struct Space<'a, T> {
    /// `coords[a][row]`: numeric value, or rank in the supplied order.
    coords: Vec<Vec<T>>,
    axes: Vec<Axis<'a>>,
    full_range: Vec<T>,
    k: usize,
}

impl<T: Scalar> Space<'_, T> {
    fn extent(&self, a: usize, rows: &[usize]) -> (T, T) {
        rows.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &r| {
            let v = self.coords[a][r];
            (lo.min(v), hi.max(v))
        })
    }

    fn try_split(&self, rows: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
        let mut widths: Vec<(usize, T)> = (0..self.coords.len())
            .map(|a| {
                let (lo, hi) = self.extent(a, rows);
                let w = if self.full_range[a] > T::zero() {
                    (hi - lo) / self.full_range[a]
                } else {
                    T::zero()
                };
                (a, w)
            })
            .filter(|(_, w)| *w > T::zero())
            .collect();
        // stable: equal widths keep column order
        widths.sort_by(|x, y| y.1.partial_cmp(&x.1).expect("finite widths"));

        for (a, _) in widths {
            let mut vals: Vec<T> = rows.iter().map(|&r| self.coords[a][r]).collect();
            let mid = (vals.len() - 1) / 2;
            let (_, median, _) =
                vals.select_nth_unstable_by(mid, |x, y| x.partial_cmp(y).expect("finite values"));
            let median = *median;
            let (lower, upper): (Vec<usize>, Vec<usize>) =
                rows.iter().partition(|&&r| self.coords[a][r] <= median);
            if lower.len() >= self.k && upper.len() >= self.k {
                return Some((lower, upper));
            }
        }
        None
    }

    fn leaf(&self, rows: &[usize], source: &[usize]) -> EquivalenceClass<T> {
        let key = (0..self.coords.len())
            .map(|a| {
                let (lo, hi) = self.extent(a, rows);
                match self.axes[a] {
                    Axis::Numeric => KeyPart::Range { lo, hi },
                    Axis::Ordered(order) => KeyPart::Categories {
                        lo: order[lo.to_usize().expect("rank")].clone(),
                        hi: order[hi.to_usize().expect("rank")].clone(),
                    },
                }
            })
            .collect();
        EquivalenceClass {
            key,
            members: rows.iter().map(|&r| source[r]).collect(),
        }
    }

    fn partition(&self, rows: Vec<usize>, source: &[usize], out: &mut Vec<EquivalenceClass<T>>) {
        match self.try_split(&rows) {
            Some((lower, upper)) => {
                self.partition(lower, source, out);
                self.partition(upper, source, out);
            }
            None => out.push(self.leaf(&rows, source)),
        }
    }
}

/// Mondrian over the k-quasis of `ds`. Numeric k-quasis are split on their
/// values; categorical ones need a total order in `orders` (keyed by column
/// name) listing every value that occurs.
pub fn mondrian_anonymise<T: Scalar>(
    ds: &Dataset<T>,
    cls: &AttributeClassification,
    orders: &BTreeMap<String, Vec<String>>,
    k: usize,
) -> Result<Partition<T>> {
    check_k(k, ds.n())?;
    let quasis = cls.k_quasis(ds.schema());
    if quasis.is_empty() {
        return Err(Error::Classification("no k-quasi column".into()));
    }

    let mut coords = Vec::with_capacity(quasis.len());
    let mut axes = Vec::with_capacity(quasis.len());
    for q in &quasis {
        let col = ds.column_index(q)?;
        match ds.schema().columns()[col].kind {
            ColumnKind::Numeric => {
                coords.push(ds.numeric_column(q)?);
                axes.push(Axis::Numeric);
            }
            ColumnKind::Categorical => {
                let order = orders.get(*q).ok_or_else(|| {
                    Error::Config(format!("categorical k-quasi `{q}` needs a value order for Mondrian"))
                })?;
                let rank: HashMap<&str, usize> =
                    order.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
                if rank.len() != order.len() {
                    return Err(Error::Config(format!("order for `{q}` repeats a value")));
                }
                let ranks = ds
                    .rows()
                    .iter()
                    .map(|r| {
                        let v = r[col].as_text().expect("categorical cell");
                        rank.get(v).map(|&i| T::of_usize(i)).ok_or_else(|| {
                            Error::Domain(format!("`{v}` is missing from the order for `{q}`"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                coords.push(ranks);
                axes.push(Axis::Ordered(order));
            }
        }
    }

    let all: Vec<usize> = (0..ds.n()).collect();
    let mut space = Space {
        coords,
        axes,
        full_range: Vec::new(),
        k,
    };
    space.full_range = (0..quasis.len())
        .map(|a| {
            let (lo, hi) = space.extent(a, &all);
            hi - lo
        })
        .collect();

    let mut classes = Vec::new();
    space.partition(all, ds.source_indices(), &mut classes);
    Ok(Partition {
        classes,
        suppressed: Vec::new(),
        k,
        algorithm: Algorithm::Mondrian,
        node: None,
        attributes: quasis.into_iter().map(str::to_string).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Column, Role, Schema, Value};

    fn numeric(values: &[f64]) -> (Dataset<f64>, AttributeClassification) {
        let schema = Schema::new(vec![Column::numeric("q"), Column::numeric("x")]).unwrap();
        let rows = values
            .iter()
            .map(|&v| vec![Value::Num(v), Value::Num(150.0 + v)])
            .collect();
        let cls = AttributeClassification::new()
            .with("q", Role::KQuasi)
            .with("x", Role::EpsQuasi);
        (Dataset::new(schema, rows).unwrap(), cls)
    }

    fn member_values(p: &Partition<f64>, values: &[f64]) -> Vec<Vec<f64>> {
        p.classes
            .iter()
            .map(|c| c.members.iter().map(|&i| values[i]).collect())
            .collect()
    }

    #[test]
    fn splits_four_values() {
        let v = [3.0, 1.0, 4.0, 2.0];
        let (ds, cls) = numeric(&v);
        let p = mondrian_anonymise(&ds, &cls, &BTreeMap::new(), 2).unwrap();
        assert_eq!(member_values(&p, &v), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(p.classes[0].key, vec![KeyPart::Range { lo: 1.0, hi: 2.0 }]);
        assert_eq!(p.classes[1].key[0].render(), "[3..4]");
    }

    #[test]
    fn too_few_records_for_a_cut() {
        let (ds, cls) = numeric(&[1.0, 2.0, 3.0]);
        let p = mondrian_anonymise(&ds, &cls, &BTreeMap::new(), 2).unwrap();
        assert_eq!(p.classes.len(), 1);
        assert_eq!(p.classes[0].m(), 3);
    }

    #[test]
    fn constant_values_stay_together() {
        let (ds, cls) = numeric(&[5.0; 4]);
        let p = mondrian_anonymise(&ds, &cls, &BTreeMap::new(), 2).unwrap();
        assert_eq!(p.classes.len(), 1);
        assert_eq!(p.classes[0].key[0].render(), "5");
    }

    #[test]
    fn ties_at_median_block_cut() {
        // median 1: lower half {1,1,1,1}, upper {2} < k
        let (ds, cls) = numeric(&[1.0, 1.0, 1.0, 1.0, 2.0]);
        let p = mondrian_anonymise(&ds, &cls, &BTreeMap::new(), 2).unwrap();
        assert_eq!(p.classes.len(), 1);
    }

    #[test]
    fn falls_back_to_next_attribute() {
        // q1 is widest but tied at the median; q2 can be cut.
        let schema = Schema::new(vec![Column::numeric("q1"), Column::numeric("q2")]).unwrap();
        let rows = [(0.0, 0.0), (0.0, 0.0), (0.0, 1.0), (10.0, 1.0)]
            .iter()
            .map(|&(a, b)| vec![Value::Num(a), Value::Num(b)])
            .collect();
        let cls = AttributeClassification::new()
            .with("q1", Role::KQuasi)
            .with("q2", Role::KQuasi);
        let ds: Dataset<f64> = Dataset::new(schema, rows).unwrap();
        let p = mondrian_anonymise(&ds, &cls, &BTreeMap::new(), 2).unwrap();
        assert_eq!(p.classes.len(), 2);
        assert_eq!(p.classes[0].members, vec![0, 1]);
    }

    #[test]
    fn ordered_categories() {
        let schema = Schema::new(vec![Column::categorical("g"), Column::numeric("x")]).unwrap();
        let rows = ["b", "a", "c", "a", "c", "b"]
            .iter()
            .map(|g| vec![Value::Text(g.to_string()), Value::Num(1.0)])
            .collect();
        let cls = AttributeClassification::new()
            .with("g", Role::KQuasi)
            .with("x", Role::EpsQuasi);
        let ds: Dataset<f64> = Dataset::new(schema, rows).unwrap();
        let mut orders = BTreeMap::new();
        orders.insert("g".to_string(), vec!["a".into(), "b".into(), "c".into()]);
        let p = mondrian_anonymise(&ds, &cls, &orders, 2).unwrap();
        let keys: Vec<String> = p.classes.iter().map(|c| c.key[0].render()).collect();
        assert_eq!(keys, vec!["a", "b", "c"]);

        assert!(matches!(
            mondrian_anonymise(&ds, &cls, &BTreeMap::new(), 2),
            Err(Error::Config(_))
        ));
        orders.insert("g".to_string(), vec!["a".into(), "b".into()]);
        assert!(matches!(mondrian_anonymise(&ds, &cls, &orders, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn k_above_n() {
        let (ds, cls) = numeric(&[1.0, 2.0]);
        assert!(matches!(
            mondrian_anonymise(&ds, &cls, &BTreeMap::new(), 3),
            Err(Error::Infeasible { .. })
        ));
    }
}
