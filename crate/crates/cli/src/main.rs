//! `uqlab` command-line driver.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use uqlab::data::{self, CsvFormat, CsvSchema, Dataset, LabelMap, StandardizationStats};
use uqlab::harness::{self, resolve_seed, ExperimentConfig, Profile, SEED_ENV};
use uqlab::metrics::{self, read_records, write_records};
use uqlab::nn::{self, Model};
use uqlab::predictors::{self, LogBase, ModelPool, PredictOptions, PredictorRegistry, ENSEMBLE_MANIFEST};
use uqlab::rng::{streams, RngStream};
use uqlab::{Result, UqError};

const BASE_MODEL_FILE: &str = "model.model.json";
const ENSEMBLE_DIR: &str = "ensemble";
const STATS_FILE: &str = "standardization.json";

#[derive(Parser)]
#[command(name = "uqlab", version, about = "Epistemic uncertainty laboratory: MC dropout, deep ensembles and their evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Desk,
    Paper,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Desk => Profile::Desk,
            ProfileArg::Paper => Profile::Paper,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Auto,
    Hmnist,
    Generic,
}

impl From<FormatArg> for CsvFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Auto => CsvFormat::Auto,
            FormatArg::Hmnist => CsvFormat::Hmnist,
            FormatArg::Generic => CsvFormat::Generic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LogBaseArg {
    Natural,
    Base2,
}

impl From<LogBaseArg> for LogBase {
    fn from(b: LogBaseArg) -> Self {
        match b {
            LogBaseArg::Natural => LogBase::Natural,
            LogBaseArg::Base2 => LogBase::Base2,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TrainWhat {
    Single,
    Ensemble,
    Both,
}

#[derive(clap::Args)]
struct DataArgs {
    /// Feature CSV (HMNIST or generic).
    #[arg(long)]
    data: PathBuf,
    /// JSON object mapping raw label tokens to 0/1; defaults to the HAM10000 mapping.
    #[arg(long)]
    label_map: Option<PathBuf>,
    #[arg(long, default_value = "label")]
    label_column: String,
    #[arg(long, value_enum, default_value = "auto")]
    format: FormatArg,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        let map = match &self.label_map {
            Some(p) => LabelMap::load(p)?,
            None => LabelMap::ham10000_default(),
        };
        let schema = CsvSchema {
            label_column: self.label_column.clone(),
            format: self.format.into(),
        };
        data::load_csv(&self.data, &schema, &map)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic two-class Gaussian dataset as CSV.
    Synth {
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        dims: usize,
        /// Distance between class centres in units of the noise std.
        #[arg(long, default_value_t = 3.0)]
        separation: f64,
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the base network and/or the ensemble on a CSV and persist them.
    Train {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "desk")]
        profile: ProfileArg,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "both")]
        what: TrainWhat,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a CSV with a trained model or ensemble and write a record CSV.
    Predict {
        /// A `.model.json` file, an ensemble directory, or a `train` output directory.
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        method: String,
        #[arg(long, default_value_t = 200)]
        mc_samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "natural")]
        log_base: LogBaseArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute every metric from a record CSV at one threshold.
    Evaluate {
        #[arg(long)]
        records: PathBuf,
        #[arg(long, default_value_t = 0.4)]
        threshold: f64,
        #[arg(long, default_value_t = 10)]
        bins: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Uncertainty metrics over a threshold grid.
    Sweep {
        #[arg(long)]
        records: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        grid_start: f64,
        #[arg(long, default_value_t = 0.9)]
        grid_end: f64,
        #[arg(long, default_value_t = 0.05)]
        grid_step: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full pipeline: repeated base-model runs plus the uncertainty study.
    Study {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "desk")]
        profile: ProfileArg,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated subset of mcd,ensemble,emcd (or all).
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(path: Option<&Path>, profile: Profile, seed_flag: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => ExperimentConfig::load(profile, p)?,
        None => ExperimentConfig::for_profile(profile),
    };
    let env = std::env::var(SEED_ENV).ok();
    cfg.seed = resolve_seed(cfg.seed, env.as_deref(), seed_flag)?;
    cfg.validate()?;
    Ok(cfg)
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| UqError::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| UqError::io(path, e))
}

fn to_json<T: serde::Serialize>(value: &T, what: &str) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| UqError::json(what, e))
}

/// Models plus the standardization that was fitted when they were trained.
struct Loaded {
    single: Option<Model>,
    ensemble: Option<Vec<Model>>,
    stats: Option<StandardizationStats>,
}

fn load_stats(dir: &Path) -> Result<Option<StandardizationStats>> {
    let p = dir.join(STATS_FILE);
    if !p.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&p).map_err(|e| UqError::io(&p, e))?;
    serde_json::from_str(&text).map(Some).map_err(|e| UqError::json("standardization", e))
}

fn load_models(path: &Path) -> Result<Loaded> {
    if path.is_file() {
        let dir = path.parent().unwrap_or(Path::new("."));
        return Ok(Loaded {
            single: Some(nn::load_model(path)?),
            ensemble: None,
            stats: load_stats(dir)?,
        });
    }
    if path.join(ENSEMBLE_MANIFEST).is_file() {
        let stats = match load_stats(path)? {
            Some(s) => Some(s),
            None => path.parent().map(load_stats).transpose()?.flatten(),
        };
        return Ok(Loaded {
            single: None,
            ensemble: Some(predictors::load_ensemble(path)?.1),
            stats,
        });
    }
    let single = path.join(BASE_MODEL_FILE);
    let ens = path.join(ENSEMBLE_DIR);
    if !single.is_file() && !ens.join(ENSEMBLE_MANIFEST).is_file() {
        return Err(UqError::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no model or ensemble found"),
        ));
    }
    Ok(Loaded {
        single: single.is_file().then(|| nn::load_model(&single)).transpose()?,
        ensemble: ens
            .join(ENSEMBLE_MANIFEST)
            .is_file()
            .then(|| predictors::load_ensemble(&ens).map(|(_, m)| m))
            .transpose()?,
        stats: load_stats(path)?,
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth {
            n,
            dims,
            separation,
            noise,
            seed,
            out,
        } => {
            let env = std::env::var(SEED_ENV).ok();
            let seed = resolve_seed(0, env.as_deref(), seed)?;
            let d = data::synthetic_blobs(n, dims, separation, noise, &mut RngStream::new(seed, streams::SYNTH))?;
            let mut buf = Vec::new();
            data::write_csv(&d, &mut buf)?;
            write_file(&out, buf)?;
            eprintln!("wrote {} rows to {}", d.len(), out.display());
        }
        Command::Train {
            config,
            profile,
            data: data_args,
            seed,
            what,
            out,
        } => {
            let cfg = load_config(config.as_deref(), profile.into(), seed)?;
            let raw = data_args.load()?;
            let (train, stats) = if cfg.standardize {
                let (t, _, s) = data::standardize(&raw, &[])?;
                (t, Some(s))
            } else {
                (raw, None)
            };
            fs::create_dir_all(&out).map_err(|e| UqError::io(&out, e))?;
            if let Some(s) = &stats {
                write_file(&out.join(STATS_FILE), to_json(s, "standardization")?)?;
            }
            if matches!(what, TrainWhat::Single | TrainWhat::Both) {
                let model = harness::train_base_model(&cfg, &train, cfg.seed)?;
                nn::save_model(&model, &out.join(BASE_MODEL_FILE))?;
                eprintln!("base model {:?} -> {}", model.arch.hidden_sizes, out.join(BASE_MODEL_FILE).display());
            }
            if matches!(what, TrainWhat::Ensemble | TrainWhat::Both) {
                let models = harness::train_ensemble_models(&cfg, &train)?;
                predictors::save_ensemble(&out.join(ENSEMBLE_DIR), &cfg.ensemble_spec(), &models)?;
                eprintln!("{} ensemble members -> {}", models.len(), out.join(ENSEMBLE_DIR).display());
            }
        }
        Command::Predict {
            model,
            data: data_args,
            method,
            mc_samples,
            seed,
            log_base,
            out,
        } => {
            let registry = PredictorRegistry::default();
            let predictor = registry.get(&method)?;
            let loaded = load_models(&model)?;
            let mut dataset = data_args.load()?;
            if let Some(s) = &loaded.stats {
                dataset = s.apply(&dataset)?;
            }
            let models: Vec<Model> = match predictor.model_pool() {
                ModelPool::Single => loaded
                    .single
                    .map(|m| vec![m])
                    .or_else(|| loaded.ensemble.clone().filter(|e| e.len() == 1))
                    .ok_or_else(|| UqError::config(format!("{method} needs a single model")))?,
                ModelPool::Ensemble => loaded
                    .ensemble
                    .or_else(|| loaded.single.map(|m| vec![m]))
                    .ok_or_else(|| UqError::config(format!("{method} needs an ensemble")))?,
            };
            let env = std::env::var(SEED_ENV).ok();
            let opts = PredictOptions {
                mc_samples,
                seed: harness::prediction_seed(resolve_seed(0, env.as_deref(), seed)?),
                keep_samples: false,
                log_base: log_base.into(),
            };
            let dists = predictor.predict(&models, &dataset.features, &opts)?;
            let records = metrics::records_from(&dists, &dataset.labels)?;
            let mut buf = Vec::new();
            write_records(&records, &mut buf)?;
            write_file(&out, buf)?;
            eprintln!("{} records ({method}) -> {}", records.len(), out.display());
        }
        Command::Evaluate {
            records,
            threshold,
            bins,
            out,
        } => {
            let file = fs::File::open(&records).map_err(|e| UqError::io(&records, e))?;
            let recs = read_records(file)?;
            let eval = metrics::evaluate(&recs, threshold, bins)?;
            write_file(&out, to_json(&eval, "evaluation")?)?;
            let u = eval.uncertainty;
            println!(
                "n={} UAcc={:.4} USen={} USpe={} UPre={} ECE={:.2}%",
                eval.n,
                u.uacc,
                fmt_opt(u.usen),
                fmt_opt(u.uspe),
                fmt_opt(u.upre),
                eval.calibration.ece_percent
            );
        }
        Command::Sweep {
            records,
            grid_start,
            grid_end,
            grid_step,
            out,
        } => {
            let file = fs::File::open(&records).map_err(|e| UqError::io(&records, e))?;
            let recs = read_records(file)?;
            let grid = metrics::threshold_grid(grid_start, grid_end, grid_step)?;
            let rows = metrics::threshold_sweep(&recs, &grid)?;
            let mut csv = String::from("threshold,tc,tu,fu,fc,usen,uspe,upre,uacc\n");
            for r in &rows {
                let (c, u) = (&r.matrix, &r.metrics);
                csv += &format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    r.threshold,
                    c.tc,
                    c.tu,
                    c.fu,
                    c.fc,
                    csv_opt(u.usen),
                    csv_opt(u.uspe),
                    csv_opt(u.upre),
                    u.uacc
                );
            }
            write_file(&out, csv)?;
            eprintln!("{} thresholds -> {}", rows.len(), out.display());
        }
        Command::Study {
            config,
            profile,
            seed,
            methods,
            out,
        } => {
            let mut cfg = load_config(config.as_deref(), profile.into(), seed)?;
            if let Some(m) = methods {
                cfg.methods = m;
                cfg.validate()?;
            }
            let bundle = harness::run_study(&cfg)?;
            let files = harness::emit_reports(&bundle, &out)?;
            for m in &bundle.methods {
                let u = &m.evaluation.uncertainty;
                println!(
                    "{:<9} acc={:.4} UAcc={:.4} USen={} USpe={} UPre={} ECE={:.2}%",
                    m.method,
                    m.evaluation.classical.accuracy,
                    u.uacc,
                    fmt_opt(u.usen),
                    fmt_opt(u.uspe),
                    fmt_opt(u.upre),
                    m.evaluation.calibration.ece_percent
                );
            }
            eprintln!("wrote {} files to {}", files.len(), out.display());
        }
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".into(), |x| format!("{x:.4}"))
}

fn csv_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
