//! `keps`: (k, ε)-anonymisation from the command line.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use keps::dataset::{self, Column, Schema};
use keps::hierarchy;
use keps::pipeline::{self, RunConfig};
use keps::synth::{self, AnthropometricModel, Measure};

const DEFAULT_KS: [usize; 6] = [2, 5, 10, 20, 50, 100];
const DEFAULT_EPS: [f64; 7] = [0.05, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0];

#[derive(Parser)]
#[command(name = "keps", version, about = "(k, ε)-anonymisation of tabular data")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the configuration.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write the row-to-input linkage file (debugging only; never publish it).
    #[arg(long, global = true)]
    keep_linkage: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full workflow and write the anonymised CSV and a JSON report.
    Anonymise {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Evaluate a grid of k and ε values; writes `grid.csv`.
    Grid {
        /// Comma-separated k values.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_KS)]
        ks: Vec<usize>,
        /// Comma-separated ε values.
        #[arg(long = "eps-list", value_delimiter = ',', default_values_t = DEFAULT_EPS)]
        eps_list: Vec<f64>,
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Append synthetic height and/or weight columns to a CSV.
    Synth {
        /// Input CSV; defaults to the configuration's input.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = "age")]
        age_column: String,
        #[arg(long, default_value = "sex")]
        gender_column: String,
        #[arg(long, value_delimiter = ',', default_value = "height")]
        measures: Vec<String>,
        /// `builtin:plausible` or a parameter CSV.
        #[arg(long)]
        params: Option<String>,
    },
    /// Compute error and risk of a published CSV against its original.
    Evaluate {
        /// The anonymised CSV.
        #[arg(long)]
        published: PathBuf,
        /// Linkage file from `anonymise --keep-linkage`; without it row i is
        /// taken to be input record i.
        #[arg(long)]
        linkage: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        confidence: Option<f64>,
    },
    /// List built-in hierarchies, or validate the configured ones against the input.
    Hierarchies {
        /// Hierarchy CSV files to check.
        files: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn load_config(g: &Global) -> Result<RunConfig> {
    let path = g.config.as_ref().ok_or_else(|| anyhow!("--config is required"))?;
    let mut cfg = RunConfig::load(path).with_context(|| format!("config: {}", path.display()))?;
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

/// `--out` is taken relative to the working directory, `output_dir` relative
/// to the configuration file.
fn out_dir(g: &Global, cfg: &RunConfig) -> PathBuf {
    match (&g.out, &cfg.output_dir) {
        (Some(o), _) => o.clone(),
        (None, Some(d)) => cfg.resolve(d),
        (None, None) => PathBuf::from("."),
    }
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    match cli.command {
        Command::Anonymise { k, eps, runs } => {
            let mut cfg = load_config(g)?;
            if let Some(k) = k {
                cfg.k = k;
            }
            if let Some(e) = eps {
                cfg.eps = e;
            }
            if let Some(r) = runs {
                cfg.runs = r;
            }
            let (published, report) = pipeline::run_pipeline::<f64>(&cfg)?;
            let files = pipeline::write_outputs(&out_dir(g, &cfg), &published, &report, g.keep_linkage)?;
            for f in files {
                println!("{}", f.display());
            }
            if g.keep_linkage {
                eprintln!("warning: {} links published rows to input rows; do not release it", pipeline::LINKAGE_FILE);
            }
            eprintln!(
                "k={} eps={} emitted={} ola_suppressed={} confidence_suppressed={} expected_error={:.6} mean_empirical_error={:.6} mean_risk={:.6}",
                cfg.k,
                cfg.eps,
                report.counts.emitted,
                report.counts.ola_suppressed,
                report.counts.confidence_suppressed,
                report.loss.expected_error,
                report.means.empirical_error,
                report.means.risk,
            );
        }
        Command::Grid { ks, eps_list, runs } => {
            let mut cfg = load_config(g)?;
            if let Some(r) = runs {
                cfg.runs = r;
            }
            let rows = pipeline::run_grid::<f64>(&cfg, &ks, &eps_list)?;
            let dir = out_dir(g, &cfg);
            std::fs::create_dir_all(&dir)?;
            let path = dir.join("grid.csv");
            pipeline::write_grid_csv(&rows, std::fs::File::create(&path)?)?;
            println!("{}", path.display());
        }
        Command::Synth {
            input,
            age_column,
            gender_column,
            measures,
            params,
        } => synth_command(g, input, age_column, gender_column, measures, params)?,
        Command::Evaluate {
            published,
            linkage,
            k,
            eps,
            confidence,
        } => {
            let cfg = load_config(g)?;
            cfg.validate().map_err(|e| e.at_stage("config"))?;
            let prep = pipeline::prepare::<f64>(&cfg)?;
            let ds = pipeline::load_published(&prep, &published, linkage.as_deref())?;
            let report = pipeline::evaluate_pair(
                &prep,
                &ds,
                k.unwrap_or(cfg.k),
                eps.unwrap_or(cfg.eps),
                confidence.or(cfg.confidence),
            )?;
            let json = serde_json::to_string_pretty(&report)?;
            match &g.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    let path = dir.join("evaluation.json");
                    std::fs::write(&path, json + "\n")?;
                    println!("{}", path.display());
                }
                None => println!("{json}"),
            }
        }
        Command::Hierarchies { files } => hierarchies_command(g, &files)?,
    }
    Ok(())
}

fn synth_command(
    g: &Global,
    input: Option<PathBuf>,
    age_column: String,
    gender_column: String,
    measures: Vec<String>,
    params: Option<String>,
) -> Result<()> {
    let cfg = g.config.as_ref().map(|_| load_config(g)).transpose()?;
    let cfg_synth = cfg.as_ref().and_then(|c| c.synth.clone());
    let input = match (input, &cfg) {
        (Some(i), _) => i,
        (None, Some(c)) => c.input_path(),
        (None, None) => bail!("--input or --config is required"),
    };
    let (age, gender, measures, params, seed) = match cfg_synth {
        Some(s) => (
            s.age_column.clone(),
            s.gender_column.clone(),
            s.measures.clone(),
            s.params.clone(),
            g.seed.or(s.seed).or(cfg.as_ref().map(|c| c.seed)).unwrap_or(0),
        ),
        None => {
            let p = params.ok_or_else(|| {
                anyhow!("--params is required (`builtin:plausible` uses rough demonstration values)")
            })?;
            (age_column, gender_column, measures, p, g.seed.unwrap_or(0))
        }
    };
    let model: AnthropometricModel<f64> = match params.strip_prefix("builtin:") {
        Some("plausible") => AnthropometricModel::plausible_defaults(),
        Some(other) => bail!("no built-in synth parameters `{other}`"),
        None => AnthropometricModel::load(&params).context("synth")?,
    };
    let measures = measures
        .iter()
        .map(|m| Measure::parse(m))
        .collect::<keps::Result<Vec<_>>>()?;

    let header = dataset::csv_header(&input).map_err(|e| e.at_stage("load"))?;
    let schema = Schema::new(
        header
            .iter()
            .map(|h| if *h == age { Column::numeric(h.as_str()) } else { Column::categorical(h.as_str()) })
            .collect(),
    )?;
    let ds = dataset::load_csv::<f64>(&input, &schema).map_err(|e| e.at_stage("load"))?;
    let out = synth::augment_dataset(&ds, &model, &age, &gender, &measures, seed)
        .map_err(|e| e.at_stage("synth"))?;
    let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("synth.csv");
    dataset::write_csv(&out, &path)?;
    println!("{}", path.display());
    Ok(())
}

fn hierarchies_command(g: &Global, files: &[PathBuf]) -> Result<()> {
    if files.is_empty() && g.config.is_none() {
        for (name, h) in hierarchy::builtin_hierarchies() {
            println!("builtin:{name}\t{} levels\t{}", h.levels(), h.description());
        }
        return Ok(());
    }
    for f in files {
        let h = hierarchy::load_hierarchy(f).with_context(|| format!("hierarchy: {}", f.display()))?;
        println!("{}\t{}\t{} levels\tok", f.display(), h.attribute(), h.levels());
    }
    if g.config.is_some() {
        let cfg = load_config(g)?;
        let prep = pipeline::prepare::<f64>(&cfg)?;
        for h in &prep.hierarchies {
            check_coverage(&prep.original, h)?;
            println!("{}\t{} levels\t{}\tok", h.attribute(), h.levels(), h.description());
        }
    }
    Ok(())
}

fn check_coverage(ds: &keps::DatasetF64, h: &hierarchy::Hierarchy) -> Result<()> {
    let col = ds.column_index(h.attribute())?;
    for i in 0..ds.n() {
        let v = ds.text(i, col);
        for level in 0..h.levels() {
            h.generalise(&v, level)
                .map_err(|e| anyhow!("hierarchy `{}`, record {}: {e}", h.attribute(), i + 1))?;
        }
    }
    Ok(())
}
