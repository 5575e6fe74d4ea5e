use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{AlgorithmChoice, RunConfig};
use super::report::{AnonymisationReport, PartitionSummary, RecordCounts, RunMeans, RunMetrics};
use crate::dataset::{
    self, AttributeClassification, Column, ColumnKind, Dataset, Schema, Value,
};
use crate::dp::{self, check_eps};
use crate::error::{Error, Result, StageExt};
use crate::hierarchy::Hierarchy;
use crate::kanon::{self, Partition};
use crate::loss;
use crate::risk::{self, LinkResult, RiskReport};
use crate::rng;
use crate::synth;
use crate::Scalar;

/// Input after loading, derivation, synthesis, classification and removal
/// of explicit identifiers. Source indices are input row numbers.
#[derive(Debug, Clone)]
pub struct Prepared<T> {
    pub original: Dataset<T>,
    pub cls: AttributeClassification,
    pub hierarchies: Vec<Hierarchy>,
    /// Value orders for categorical k-quasis (Mondrian).
    pub orders: BTreeMap<String, Vec<String>>,
    pub eps_column: String,
}

impl<T: Scalar> Prepared<T> {
    pub fn n(&self) -> usize {
        self.original.n()
    }

    /// Schema of published data: k-quasis become categorical.
    pub fn published_schema(&self) -> Result<Schema> {
        let ks: Vec<&str> = self.cls.k_quasis(self.original.schema());
        Schema::new(
            self.original
                .schema()
                .columns()
                .iter()
                .map(|c| {
                    if ks.contains(&c.name.as_str()) {
                        Column::categorical(c.name.clone())
                    } else {
                        c.clone()
                    }
                })
                .collect(),
        )
    }

    pub fn level_counts(&self, attributes: &[String]) -> Option<Vec<usize>> {
        attributes
            .iter()
            .map(|a| self.hierarchies.iter().find(|h| h.attribute() == a).map(Hierarchy::levels))
            .collect()
    }
}

pub fn prepare<T: Scalar>(cfg: &RunConfig) -> Result<Prepared<T>> {
    let input = cfg.input_schema().stage("load")?;
    let mut ds: Dataset<T> = dataset::load_csv_projected(cfg.input_path(), &input).stage("load")?;
    prepare_dataset(cfg, &mut ds)
}

/// [`prepare`] on an already loaded input.
pub fn prepare_dataset<T: Scalar>(cfg: &RunConfig, ds: &mut Dataset<T>) -> Result<Prepared<T>> {
    for d in &cfg.derived {
        let from = ds.numeric_column(&d.from).stage("derive")?;
        let (offset, scale) = (T::of(d.offset), T::of(d.scale));
        let values = from.into_iter().map(|v| Value::Num(offset + scale * v)).collect();
        *ds = ds.with_column(Column::numeric(d.name.clone()), values).stage("derive")?;
    }
    if let Some(s) = &cfg.synth {
        let model = cfg.synth_model::<T>().stage("synth")?.expect("synth section present");
        let measures = s.measures().stage("synth")?;
        let seed = s.seed.unwrap_or(cfg.seed);
        *ds = synth::augment_dataset(ds, &model, &s.age_column, &s.gender_column, &measures, seed)
            .stage("synth")?;
    }

    let cls = cfg.classification();
    let names: Vec<&str> = cfg.columns.iter().map(|c| c.name.as_str()).collect();
    let ordered = ds.select(&names).stage("classify")?;
    for c in &cfg.columns {
        let got = ordered.schema().column(&c.name).expect("selected").kind;
        if got != c.kind {
            return Err(Error::SchemaMismatch(format!(
                "column `{}` is {got:?} but configured as {:?}",
                c.name, c.kind
            ))
            .at_stage("classify"));
        }
    }
    cls.validate_for_pipeline(ordered.schema()).stage("classify")?;
    let eps_column = dp::single_eps_quasi(&cls, ordered.schema()).stage("classify")?.to_string();

    let original = dataset::remove_explicit_identifiers(&ordered, &cls);
    let hierarchies = cfg.hierarchies().stage("classify")?;
    let mut orders = cfg.orders();
    for q in cls.k_quasis(original.schema()) {
        let col = original.column_index(q)?;
        if original.schema().columns()[col].kind == ColumnKind::Categorical && !orders.contains_key(q) {
            let distinct: BTreeSet<String> = (0..original.n()).map(|i| original.text(i, col)).collect();
            orders.insert(q.to_string(), distinct.into_iter().collect());
        }
    }
    Ok(Prepared {
        original,
        cls,
        hierarchies,
        orders,
        eps_column,
    })
}

pub fn anonymise_partition<T: Scalar>(
    prep: &Prepared<T>,
    algorithm: AlgorithmChoice,
    k: usize,
    max_suppression: f64,
) -> Result<Partition<T>> {
    match algorithm {
        AlgorithmChoice::Ola => {
            kanon::ola_anonymise(&prep.original, &prep.cls, &prep.hierarchies, k, max_suppression)
        }
        AlgorithmChoice::Mondrian => kanon::mondrian_anonymise(&prep.original, &prep.cls, &prep.orders, k),
    }
    .stage("k_anonymise")
}

/// One repetition evaluated directly on class values. The noise is the same
/// that [`dp::apply_dp`] would add under `seed`.
pub fn evaluate_run<T: Scalar>(
    partition: &Partition<T>,
    class_values: &[Vec<T>],
    eps: T,
    confidence: Option<T>,
    seed: u64,
) -> Result<(RunMetrics, LinkResult, Option<risk::ConfidenceSuppression>)> {
    let (lo, hi) = class_values
        .iter()
        .flatten()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let pairs: Vec<(Vec<T>, Vec<T>)> = class_values
        .iter()
        .enumerate()
        .map(|(ci, v)| Ok((v.clone(), dp::class_noise(v, eps, seed, ci)?.values)))
        .collect::<Result<_>>()
        .stage("perturb")?;
    let (orig, noisy): (Vec<T>, Vec<T>) = pairs
        .iter()
        .flat_map(|(o, p)| o.iter().copied().zip(p.iter().copied()))
        .unzip();
    let empirical = if orig.is_empty() {
        0.0
    } else {
        loss::empirical_relative_error(&orig, &noisy).stage("evaluate")?.to_f64_lossy()
    };
    let out_of_domain = noisy.iter().filter(|&&v| v < lo || v > hi).count();
    let link = risk::linking_risk(&pairs);
    let conf = confidence
        .map(|c| risk::confidence_suppression(&pairs, partition, eps, c))
        .transpose()
        .stage("evaluate")?;
    let metrics = RunMetrics {
        run: 0,
        seed,
        empirical_error: empirical,
        risk: link.risk,
        links: link.links,
        confidence_suppressed: conf.as_ref().map(|c| c.records.len()),
        confidence_suppression: conf.as_ref().map(|c| c.fraction),
        out_of_domain,
    };
    Ok((metrics, link, conf))
}

/// Perturbs, drops confidence-suppressed records and shuffles.
pub fn publish<T: Scalar>(
    prep: &Prepared<T>,
    partition: &Partition<T>,
    eps: T,
    seed: u64,
    confidence_suppressed: &[usize],
) -> Result<Dataset<T>> {
    let noisy = dp::apply_dp(&prep.original, partition, &prep.cls, eps, seed).stage("perturb")?;
    let drop: HashSet<usize> = confidence_suppressed.iter().copied().collect();
    let keep: Vec<usize> = (0..noisy.n()).filter(|&i| !drop.contains(&noisy.source_index(i))).collect();
    let merged = Dataset::from_parts(
        noisy.schema().clone(),
        keep.iter().map(|&i| noisy.row(i).to_vec()).collect(),
        keep.iter().map(|&i| noisy.source_index(i)).collect(),
    );
    Ok(dataset::shuffle_records(&merged, seed))
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Runs the whole workflow. Repetitions use seeds derived from the master
/// seed and run in parallel; the first one is published.
pub fn run_pipeline<T: Scalar>(cfg: &RunConfig) -> Result<(Dataset<T>, AnonymisationReport)> {
    cfg.validate().stage("config")?;
    let mut timings = BTreeMap::new();

    let t = Instant::now();
    let prep = prepare::<T>(cfg)?;
    timings.insert("prepare".to_string(), ms(t));
    run_prepared(cfg, &prep, timings)
}

/// [`run_pipeline`] on a prepared input.
pub fn run_prepared<T: Scalar>(
    cfg: &RunConfig,
    prep: &Prepared<T>,
    mut timings: BTreeMap<String, f64>,
) -> Result<(Dataset<T>, AnonymisationReport)> {
    let eps = T::of(cfg.eps);
    let c = cfg.confidence.map(T::of);

    let t = Instant::now();
    let partition = anonymise_partition(prep, cfg.algorithm, cfg.k, cfg.max_suppression)?;
    timings.insert("k_anonymise".to_string(), ms(t));

    let t = Instant::now();
    let values = loss::class_values(&prep.original, &partition, &prep.eps_column).stage("evaluate")?;
    let mut results = (0..cfg.runs)
        .into_par_iter()
        .map(|r| {
            let seed = rng::run_seed(cfg.seed, r as u64);
            evaluate_run(&partition, &values, eps, c, seed).map(|(mut m, l, s)| {
                m.run = r;
                (m, l, s)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    timings.insert("evaluate".to_string(), ms(t));

    let t = Instant::now();
    let (first, link, conf) = results.swap_remove(0);
    let dropped = conf.as_ref().map(|s| s.records.clone()).unwrap_or_default();
    let published = publish(prep, &partition, eps, first.seed, &dropped)?;
    timings.insert("publish".to_string(), ms(t));

    let mut runs = vec![first.clone()];
    runs.extend(results.into_iter().map(|(m, _, _)| m));
    runs.sort_by_key(|m| m.run);

    let level_counts = prep.level_counts(&partition.attributes);
    let mut loss_report = loss::loss_report(
        &prep.original,
        &partition,
        &prep.eps_column,
        eps,
        level_counts.as_deref(),
        None,
    )
    .stage("evaluate")?;
    loss_report.empirical_error = Some(first.empirical_error);

    let counts = RecordCounts {
        input: prep.n(),
        ola_suppressed: partition.suppressed.len(),
        confidence_suppressed: dropped.len(),
        emitted: published.n(),
    };
    debug_assert!(counts.consistent());
    let report = AnonymisationReport {
        config: cfg.clone(),
        counts,
        partition: PartitionSummary::of(&partition),
        loss: loss_report,
        risk: RiskReport::new(&partition, cfg.eps, cfg.confidence, link, conf.as_ref()),
        means: RunMeans::of(&runs),
        runs,
        timings_ms: timings,
    };
    Ok((published, report))
}

/// One `(k, ε)` cell of a grid, aggregated over runs.
#[derive(Debug, Clone, Serialize)]
pub struct GridRow {
    pub k: usize,
    pub eps: f64,
    pub expected_error: f64,
    pub empirical_error: f64,
    pub risk: f64,
    pub risk_standard_error: f64,
    pub conf_suppression_pct: Option<f64>,
    pub ola_suppression_pct: f64,
}

/// Evaluates every `(k, ε)` pair over `cfg.runs` repetitions. Repetition `r`
/// uses the same seed in every cell, so differences between cells are not
/// blurred by independent noise.
pub fn run_grid<T: Scalar>(cfg: &RunConfig, ks: &[usize], epss: &[f64]) -> Result<Vec<GridRow>> {
    cfg.validate().stage("config")?;
    let prep = prepare::<T>(cfg)?;
    grid_prepared(cfg, &prep, ks, epss)
}

pub fn grid_prepared<T: Scalar>(
    cfg: &RunConfig,
    prep: &Prepared<T>,
    ks: &[usize],
    epss: &[f64],
) -> Result<Vec<GridRow>> {
    if ks.is_empty() || epss.is_empty() {
        return Err(Error::Config("empty k or ε list".into()).at_stage("config"));
    }
    if let Some(&k) = ks.iter().find(|&&k| k < 2) {
        return Err(Error::Config(format!("k must be at least 2, got {k}")).at_stage("config"));
    }
    for &e in epss {
        check_eps(e).stage("config")?;
    }
    let c = cfg.confidence.map(T::of);

    let partitions = ks
        .par_iter()
        .map(|&k| {
            let p = anonymise_partition(prep, cfg.algorithm, k, cfg.max_suppression)?;
            let v = loss::class_values(&prep.original, &p, &prep.eps_column).stage("evaluate")?;
            Ok((p, v))
        })
        .collect::<Result<Vec<_>>>()?;

    let cells: Vec<(usize, usize)> = (0..ks.len())
        .flat_map(|ki| (0..epss.len()).map(move |ei| (ki, ei)))
        .collect();
    cells
        .par_iter()
        .map(|&(ki, ei)| {
            let (partition, values) = &partitions[ki];
            let eps = T::of(epss[ei]);
            let runs = (0..cfg.runs)
                .into_par_iter()
                .map(|r| {
                    let seed = rng::run_seed(cfg.seed, r as u64);
                    evaluate_run(partition, values, eps, c, seed).map(|(m, _, _)| m)
                })
                .collect::<Result<Vec<_>>>()?;
            let means = RunMeans::of(&runs);
            let expected = if partition.retained() == 0 {
                0.0
            } else {
                loss::expected_dataset_error(values, eps).stage("evaluate")?.to_f64_lossy()
            };
            Ok(GridRow {
                k: ks[ki],
                eps: epss[ei],
                expected_error: expected,
                empirical_error: means.empirical_error,
                risk: means.risk,
                risk_standard_error: means.risk_standard_error,
                conf_suppression_pct: means.confidence_suppression.map(|f| 100.0 * f),
                ola_suppression_pct: 100.0 * partition.suppression_fraction(),
            })
        })
        .collect()
}

pub const GRID_HEADER: [&str; 7] = [
    "k",
    "eps",
    "expected_error",
    "empirical_error",
    "risk",
    "conf_suppression_pct",
    "ola_suppression_pct",
];

pub fn write_grid_csv<W: Write>(rows: &[GridRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(GRID_HEADER)?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            r.eps.to_string(),
            r.expected_error.to_string(),
            r.empirical_error.to_string(),
            r.risk.to_string(),
            r.conf_suppression_pct.map(|v| v.to_string()).unwrap_or_default(),
            r.ola_suppression_pct.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `row,source` pairs mapping published rows to input rows.
pub fn write_linkage<T: Scalar, W: Write>(published: &Dataset<T>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["row", "source"])?;
    for i in 0..published.n() {
        w.write_record([i.to_string(), published.source_index(i).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a linkage file written by [`write_linkage`] into per-row sources.
pub fn read_linkage<R: Read>(reader: R, rows: usize) -> Result<Vec<usize>> {
    let mut source = vec![None; rows];
    let mut rdr = csv::Reader::from_reader(reader);
    for (line, rec) in rdr.deserialize::<(usize, usize)>().enumerate() {
        let (row, src) = rec?;
        let slot = source.get_mut(row).ok_or_else(|| Error::Parse {
            row: line + 1,
            column: "row".into(),
            message: format!("row {row} is beyond the published data"),
        })?;
        *slot = Some(src);
    }
    source
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| Error::Parameter(format!("no linkage for published row {i}"))))
        .collect()
}

pub const PUBLISHED_FILE: &str = "anonymised.csv";
pub const REPORT_FILE: &str = "report.json";
pub const LINKAGE_FILE: &str = "linkage.DEBUG-NOT-FOR-RELEASE.csv";

/// Writes the published CSV and report to `dir`; the linkage file only when
/// asked. Returns the paths written.
pub fn write_outputs<T: Scalar>(
    dir: &Path,
    published: &Dataset<T>,
    report: &AnonymisationReport,
    keep_linkage: bool,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let csv_path = dir.join(PUBLISHED_FILE);
    dataset::write_csv(published, &csv_path)?;
    written.push(csv_path);
    let report_path = dir.join(REPORT_FILE);
    std::fs::write(&report_path, report.to_json()? + "\n")?;
    written.push(report_path);
    if keep_linkage {
        let p = dir.join(LINKAGE_FILE);
        write_linkage(published, std::io::BufWriter::new(std::fs::File::create(&p)?))?;
        written.push(p);
    }
    Ok(written)
}

/// Metrics of an existing original/published pair.
#[derive(Debug, Clone, Serialize)]
pub struct EvaluationReport {
    pub records: usize,
    pub classes: usize,
    pub eps: f64,
    pub expected_error: f64,
    pub empirical_error: f64,
    pub risk: RiskReport,
}

/// Recovers classes from the published k-quasi keys and evaluates them
/// against the originals. `published` must carry source indices (from a
/// linkage file, or identity when rows line up).
pub fn evaluate_pair<T: Scalar>(
    prep: &Prepared<T>,
    published: &Dataset<T>,
    k: usize,
    eps: f64,
    confidence: Option<f64>,
) -> Result<EvaluationReport> {
    check_eps(eps).stage("evaluate")?;
    let partition = Partition::from_published(published, &prep.cls, k).stage("evaluate")?;
    let pairs = risk::class_pairs(&prep.original, published, &partition, &prep.eps_column)
        .stage("evaluate")?;
    let originals: Vec<Vec<T>> = pairs.iter().map(|(o, _)| o.clone()).collect();
    let (o, p): (Vec<T>, Vec<T>) = pairs
        .iter()
        .flat_map(|(o, p)| o.iter().copied().zip(p.iter().copied()))
        .unzip();
    let e = T::of(eps);
    let conf = confidence
        .map(|c| risk::confidence_suppression(&pairs, &partition, e, T::of(c)))
        .transpose()
        .stage("evaluate")?;
    let link = risk::linking_risk(&pairs);
    Ok(EvaluationReport {
        records: published.n(),
        classes: partition.classes.len(),
        eps,
        expected_error: loss::expected_dataset_error(&originals, e).stage("evaluate")?.to_f64_lossy(),
        empirical_error: loss::empirical_relative_error(&o, &p).stage("evaluate")?.to_f64_lossy(),
        risk: RiskReport::new(&partition, eps, confidence, link, conf.as_ref()),
    })
}

/// Loads a published CSV against the prepared schema, attaching sources from
/// `linkage` or, without one, assuming row `i` is input record `i`.
pub fn load_published<T: Scalar>(
    prep: &Prepared<T>,
    path: &Path,
    linkage: Option<&Path>,
) -> Result<Dataset<T>> {
    let schema = prep.published_schema()?;
    let ds: Dataset<T> = dataset::load_csv(path, &schema).stage("load")?;
    let source = match linkage {
        Some(l) => read_linkage(std::fs::File::open(l)?, ds.n()).stage("load")?,
        None => {
            if ds.n() > prep.n() {
                return Err(Error::Parameter(
                    "published data has more rows than the original; supply a linkage file".into(),
                )
                .at_stage("load"));
            }
            (0..ds.n()).collect()
        }
    };
    ds.with_source_indices(source).stage("load")
}
