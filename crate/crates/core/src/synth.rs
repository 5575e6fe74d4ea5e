//! Synthetic body measurements for datasets that lack a numeric ε-quasi.
//!
//! Height is drawn from a normal distribution and weight from a log-normal
//! one, both conditioned on a 10-year age band and gender. Parameters come
//! from a CSV with columns `age_band,gender,distribution,param1,param2`:
//! `normal` rows give mean and standard deviation in cm, `lognormal` rows
//! give the median in kg and the standard deviation of its logarithm.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use serde::Deserialize;

use crate::dataset::{Column, Dataset, Value};
use crate::error::{Error, Result};
use crate::rng::{self, Purpose};
use crate::Scalar;

const DEFAULTS: &str = include_str!("../../../data/anthropometric_defaults.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gender {
    Male,
    Female,
}

impl Gender {
    /// Accepts `male`/`female`/`m`/`f` in any case.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "male" | "m" => Ok(Gender::Male),
            "female" | "f" => Ok(Gender::Female),
            other => Err(Error::Domain(format!("unknown gender `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Height,
    Weight,
}

impl Measure {
    pub fn column_name(self) -> &'static str {
        match self {
            Measure::Height => "height",
            Measure::Weight => "weight",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "height" => Ok(Measure::Height),
            "weight" => Ok(Measure::Weight),
            other => Err(Error::Config(format!("unknown measure `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct BandParams<T> {
    height: Option<(T, T)>,
    weight: Option<(T, T)>,
}

/// Height and weight distributions per (age band, gender).
#[derive(Debug, Clone, PartialEq)]
pub struct AnthropometricModel<T> {
    /// Keyed by the lower bound of the band; bands are `[lo, lo + 9]`.
    bands: BTreeMap<(i64, Gender), BandParams<T>>,
}

#[derive(Deserialize)]
struct Row {
    age_band: String,
    gender: String,
    distribution: String,
    param1: f64,
    param2: f64,
}

impl<T: Scalar> AnthropometricModel<T> {
    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut bands: BTreeMap<(i64, Gender), BandParams<T>> = BTreeMap::new();
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        for (i, row) in rdr.deserialize::<Row>().enumerate() {
            let row = row?;
            let bad = |m: String| Error::Parse {
                row: i + 1,
                column: "age_band".into(),
                message: m,
            };
            let (lo, hi) = row
                .age_band
                .split_once('-')
                .and_then(|(a, b)| Some((a.trim().parse::<i64>().ok()?, b.trim().parse::<i64>().ok()?)))
                .ok_or_else(|| bad(format!("`{}` is not of the form lo-hi", row.age_band)))?;
            if lo.rem_euclid(10) != 0 || hi != lo + 9 {
                return Err(bad(format!("`{}` is not a 10-year band", row.age_band)));
            }
            if !(row.param1 > 0.0 && row.param2 > 0.0) {
                return Err(Error::Parameter(format!(
                    "row {}: distribution parameters must be positive",
                    i + 1
                )));
            }
            let gender = Gender::parse(&row.gender)?;
            let entry = bands.entry((lo, gender)).or_insert(BandParams {
                height: None,
                weight: None,
            });
            let params = Some((T::of(row.param1), T::of(row.param2)));
            let slot = match row.distribution.to_ascii_lowercase().as_str() {
                "normal" => &mut entry.height,
                "lognormal" => &mut entry.weight,
                other => return Err(Error::Parameter(format!("unknown distribution `{other}`"))),
            };
            if slot.is_some() {
                return Err(Error::Parameter(format!(
                    "duplicate {} row for {} {:?}",
                    row.distribution, row.age_band, gender
                )));
            }
            *slot = params;
        }
        if bands.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(AnthropometricModel { bands })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read(std::fs::File::open(path)?)
    }

    /// Built-in plausible adult values (ages 10 to 99). These are rough
    /// figures meant for demonstrations and tests, not reference statistics.
    pub fn plausible_defaults() -> Self {
        Self::read(DEFAULTS.as_bytes()).expect("bundled parameters parse")
    }

    fn band(&self, age: T, gender: Gender) -> Result<&BandParams<T>> {
        let a = age
            .floor()
            .to_i64()
            .ok_or_else(|| Error::Domain(format!("age {age} is not finite")))?;
        self.bands
            .get(&(a.div_euclid(10) * 10, gender))
            .ok_or_else(|| Error::Domain(format!("no parameters for age {age}, {gender:?}")))
    }

    /// `(mean, sd)` of height in cm.
    pub fn height_params(&self, age: T, gender: Gender) -> Result<(T, T)> {
        self.band(age, gender)?
            .height
            .ok_or_else(|| Error::Domain(format!("no height parameters for age {age}, {gender:?}")))
    }

    /// `(median, log-sd)` of weight in kg.
    pub fn weight_params(&self, age: T, gender: Gender) -> Result<(T, T)> {
        self.band(age, gender)?
            .weight
            .ok_or_else(|| Error::Domain(format!("no weight parameters for age {age}, {gender:?}")))
    }

    pub fn generate_height<R: Rng + ?Sized>(&self, age: T, gender: Gender, rng: &mut R) -> Result<T> {
        let (mean, sd) = self.height_params(age, gender)?;
        let d = Normal::new(mean.to_f64_lossy(), sd.to_f64_lossy())
            .map_err(|e| Error::Parameter(e.to_string()))?;
        Ok(T::of(d.sample(rng)))
    }

    pub fn generate_weight<R: Rng + ?Sized>(&self, age: T, gender: Gender, rng: &mut R) -> Result<T> {
        let (median, sigma) = self.weight_params(age, gender)?;
        let d = LogNormal::new(median.to_f64_lossy().ln(), sigma.to_f64_lossy())
            .map_err(|e| Error::Parameter(e.to_string()))?;
        Ok(T::of(d.sample(rng)))
    }

    pub fn generate<R: Rng + ?Sized>(
        &self,
        measure: Measure,
        age: T,
        gender: Gender,
        rng: &mut R,
    ) -> Result<T> {
        match measure {
            Measure::Height => self.generate_height(age, gender, rng),
            Measure::Weight => self.generate_weight(age, gender, rng),
        }
    }
}

/// Appends one numeric column per measure. Each record draws from its own
/// stream keyed by its source index, so values do not depend on row order.
pub fn augment_dataset<T: Scalar>(
    ds: &Dataset<T>,
    model: &AnthropometricModel<T>,
    age_column: &str,
    gender_column: &str,
    measures: &[Measure],
    seed: u64,
) -> Result<Dataset<T>> {
    let ages = ds.numeric_column(age_column)?;
    let gc = ds.column_index(gender_column)?;
    let genders = (0..ds.n())
        .map(|i| Gender::parse(&ds.text(i, gc)))
        .collect::<Result<Vec<_>>>()?;
    let mut out = ds.clone();
    for (m, &measure) in measures.iter().enumerate() {
        let values = (0..ds.n())
            .map(|i| {
                let index = ds.source_index(i) as u64 * measures.len() as u64 + m as u64;
                let mut rng = rng::stream(seed, Purpose::Synth, index);
                model.generate(measure, ages[i], genders[i], &mut rng).map(Value::Num)
            })
            .collect::<Result<Vec<_>>>()?;
        out = out.with_column(Column::numeric(measure.column_name()), values)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Schema;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn defaults_cover_adult_ages() {
        let m = AnthropometricModel::<f64>::plausible_defaults();
        for age in [17.0, 25.0, 39.9, 90.0, 99.0] {
            for g in [Gender::Male, Gender::Female] {
                assert!(m.height_params(age, g).is_ok());
                assert!(m.weight_params(age, g).is_ok());
            }
        }
        assert!(m.height_params(9.0, Gender::Male).is_err());
        assert!(m.height_params(100.0, Gender::Female).is_err());
        assert_eq!(m.height_params(25.0, Gender::Male).unwrap(), (176.4, 7.5));
    }

    #[test]
    fn gender_parsing() {
        assert_eq!(Gender::parse("Male").unwrap(), Gender::Male);
        assert_eq!(Gender::parse(" f ").unwrap(), Gender::Female);
        assert_eq!(Gender::parse("FEMALE").unwrap(), Gender::Female);
        assert!(Gender::parse("x").is_err());
    }

    #[test]
    fn sample_moments() {
        let m = AnthropometricModel::<f64>::plausible_defaults();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 100_000;
        let h: Vec<f64> = (0..n)
            .map(|_| m.generate_height(30.0, Gender::Female, &mut rng).unwrap())
            .collect();
        let mean = h.iter().sum::<f64>() / n as f64;
        let var = h.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert_relative_eq!(mean, 162.8, max_relative = 0.002);
        assert_relative_eq!(var.sqrt(), 7.0, max_relative = 0.02);

        let mut w: Vec<f64> = (0..n)
            .map(|_| m.generate_weight(30.0, Gender::Male, &mut rng).unwrap())
            .collect();
        w.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_relative_eq!(w[n / 2], 87.0, max_relative = 0.01);
        assert!(w[0] > 0.0);
    }

    #[test]
    fn bad_parameter_files() {
        let bad_band = "age_band,gender,distribution,param1,param2\n10-20,male,normal,170,7\n";
        assert!(AnthropometricModel::<f64>::read(bad_band.as_bytes()).is_err());
        let bad_dist = "age_band,gender,distribution,param1,param2\n10-19,male,gamma,1,1\n";
        assert!(AnthropometricModel::<f64>::read(bad_dist.as_bytes()).is_err());
        let dup = "age_band,gender,distribution,param1,param2\n10-19,m,normal,1,1\n10-19,male,normal,2,1\n";
        assert!(AnthropometricModel::<f64>::read(dup.as_bytes()).is_err());
        let neg = "age_band,gender,distribution,param1,param2\n10-19,m,normal,170,-1\n";
        assert!(AnthropometricModel::<f64>::read(neg.as_bytes()).is_err());
    }

    #[test]
    fn augment_is_order_independent() {
        let schema = Schema::new(vec![Column::numeric("age"), Column::categorical("sex")]).unwrap();
        let rows = (0..20)
            .map(|i| {
                vec![
                    Value::Num(20.0 + i as f64 * 3.0),
                    Value::Text(if i % 2 == 0 { "Male" } else { "Female" }.into()),
                ]
            })
            .collect();
        let ds: Dataset<f64> = Dataset::new(schema, rows).unwrap();
        let m = AnthropometricModel::plausible_defaults();
        let both = [Measure::Height, Measure::Weight];
        let a = augment_dataset(&ds, &m, "age", "sex", &both, 3).unwrap();
        assert_eq!(a.schema().names().collect::<Vec<_>>(), vec!["age", "sex", "height", "weight"]);

        let shuffled = crate::dataset::shuffle_records(&ds, 99);
        let b = augment_dataset(&shuffled, &m, "age", "sex", &both, 3).unwrap();
        let by_source = a.rows_by_source();
        for i in 0..b.n() {
            assert_eq!(b.row(i), a.row(by_source[&b.source_index(i)]));
        }
        assert_ne!(augment_dataset(&ds, &m, "age", "sex", &both, 4).unwrap(), a);
    }
}
