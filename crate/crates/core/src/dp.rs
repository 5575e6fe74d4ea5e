//! Laplace perturbation of the ε-quasi, calibrated per equivalence class.
//!
//! Every record of a class receives independent `Lap(0, diam(ec) / ε)` noise
//! where the diameter is taken over the class's original values. A class
//! whose values are all equal gets no noise. Perturbed values are not clamped.

use rand::Rng;

use crate::dataset::{AttributeClassification, Column, ColumnKind, Dataset, Role, Schema, Value};
use crate::error::{Error, Result};
use crate::kanon::Partition;
use crate::rng::{self, Purpose};
use crate::Scalar;

/// `max - min` of a non-empty slice.
pub fn diam<T: Scalar>(values: &[T]) -> Result<T> {
    if values.is_empty() {
        return Err(Error::Domain("diameter of an empty vector".into()));
    }
    let (lo, hi) = values
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    Ok(hi - lo)
}

/// Location and scale of a Laplace distribution; variance is `2 b²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceParams<T> {
    pub mu: T,
    pub b: T,
}

impl<T: Scalar> LaplaceParams<T> {
    pub fn new(mu: T, b: T) -> Result<Self> {
        if b.is_nan() || b < T::zero() || !b.is_finite() || !mu.is_finite() {
            return Err(Error::Parameter(format!("invalid Laplace parameters mu={mu}, b={b}")));
        }
        Ok(LaplaceParams { mu, b })
    }

    /// Zero-centred noise for a set with diameter `diam` at privacy level `eps`.
    pub fn for_diameter(diam: T, eps: T) -> Result<Self> {
        check_eps(eps)?;
        Self::new(T::zero(), diam / eps)
    }

    pub fn variance(&self) -> T {
        T::of(2.0) * self.b * self.b
    }
}

pub(crate) fn check_eps<T: Scalar>(eps: T) -> Result<()> {
    if eps > T::zero() && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("ε must be a positive finite number, got {eps}")))
    }
}

/// Inverse-CDF draw: `mu - b·sgn(u)·ln(1 - 2|u|)` with `u` uniform on
/// `(-1/2, 1/2)`. Returns exactly `mu` when `b = 0` (and then consumes no
/// randomness).
pub fn sample_laplace<T: Scalar, R: Rng + ?Sized>(params: &LaplaceParams<T>, rng: &mut R) -> T {
    if params.b == T::zero() {
        return params.mu;
    }
    let u = loop {
        let u: f64 = rng.random::<f64>() - 0.5;
        if u > -0.5 {
            break u;
        }
    };
    // magnitude is an Exp(1) draw; computed in f64 so f32 cannot round 1-2|u| to 0
    let magnitude = -(1.0 - 2.0 * u.abs()).ln();
    let signed = if u < 0.0 { -magnitude } else { magnitude };
    params.mu + params.b * T::of(signed)
}

/// Noisy ε-quasi values of one class.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseAssignment<T> {
    pub values: Vec<T>,
    pub eps: T,
    pub diam: T,
}

impl<T: Scalar> NoiseAssignment<T> {
    pub fn scale(&self) -> T {
        self.diam / self.eps
    }
}

pub fn perturb_equivalence_class<T: Scalar, R: Rng + ?Sized>(
    values: &[T],
    eps: T,
    rng: &mut R,
) -> Result<NoiseAssignment<T>> {
    check_eps(eps)?;
    let d = diam(values)?;
    let params = LaplaceParams::for_diameter(d, eps)?;
    let noisy = values.iter().map(|&v| v + sample_laplace(&params, rng)).collect();
    Ok(NoiseAssignment {
        values: noisy,
        eps,
        diam: d,
    })
}

/// Noise for the class at `class_index`, drawn from its own stream under
/// `master_seed`. [`apply_dp`] uses exactly these values.
pub fn class_noise<T: Scalar>(
    values: &[T],
    eps: T,
    master_seed: u64,
    class_index: usize,
) -> Result<NoiseAssignment<T>> {
    let mut rng = rng::stream(master_seed, Purpose::ClassNoise, class_index as u64);
    perturb_equivalence_class(values, eps, &mut rng)
}

/// Publishes one anonymised copy of `ds`: suppressed records are dropped,
/// k-quasi cells are replaced by their class key, and the ε-quasi of each
/// class is perturbed with the class's own noise stream (derived from
/// `master_seed` and the class index). Rows come out class by class; other
/// columns pass through unchanged.
pub fn apply_dp<T: Scalar>(
    ds: &Dataset<T>,
    partition: &Partition<T>,
    cls: &AttributeClassification,
    eps: T,
    master_seed: u64,
) -> Result<Dataset<T>> {
    check_eps(eps)?;
    let eps_name = single_eps_quasi(cls, ds.schema())?;
    let eps_col = ds.column_index(eps_name)?;
    let key_cols = partition
        .attributes
        .iter()
        .map(|a| ds.column_index(a))
        .collect::<Result<Vec<_>>>()?;

    let by_source = ds.rows_by_source();
    let row_of = |src: usize| {
        by_source
            .get(&src)
            .copied()
            .ok_or_else(|| Error::Parameter(format!("partition refers to unknown record {src}")))
    };

    let schema = Schema::new(
        ds.schema()
            .columns()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if key_cols.contains(&i) {
                    Column::new(c.name.clone(), ColumnKind::Categorical)
                } else {
                    c.clone()
                }
            })
            .collect(),
    )?;

    let mut rows = Vec::with_capacity(partition.retained());
    let mut source = Vec::with_capacity(partition.retained());
    for (ci, class) in partition.classes.iter().enumerate() {
        let member_rows = class
            .members
            .iter()
            .map(|&s| row_of(s))
            .collect::<Result<Vec<_>>>()?;
        let original: Vec<T> = member_rows
            .iter()
            .map(|&r| ds.row(r)[eps_col].as_num().expect("numeric ε-quasi"))
            .collect();
        let noisy = class_noise(&original, eps, master_seed, ci)?;
        let key: Vec<String> = class.key.iter().map(|k| k.render()).collect();
        for ((&r, &src), v) in member_rows.iter().zip(&class.members).zip(noisy.values) {
            let mut row = ds.row(r).to_vec();
            for (kc, token) in key_cols.iter().zip(&key) {
                row[*kc] = Value::Text(token.clone());
            }
            row[eps_col] = Value::Num(v);
            rows.push(row);
            source.push(src);
        }
    }
    Ok(Dataset::from_parts(schema, rows, source))
}

/// The single ε-quasi of `schema`. More than one is rejected since the
/// privacy budget would have to be split between them.
pub fn single_eps_quasi<'a>(cls: &AttributeClassification, schema: &'a Schema) -> Result<&'a str> {
    let cols = cls.columns_with(schema, Role::EpsQuasi);
    match cols.as_slice() {
        [one] => Ok(one),
        [] => Err(Error::Classification("no ε-quasi column".into())),
        _ => Err(Error::Unsupported(format!(
            "{} ε-quasi columns; exactly one is supported",
            cols.len()
        ))),
    }
}
