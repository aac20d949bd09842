//! Batch command-line front end: config loading, experiment execution,
//! and report emission. All subcommands are non-interactive; every
//! artifact is reproducible from the resolved config echoed beside it.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis;
use crate::data::{self, Dataset, LabelKind, SyntheticSpec};
use crate::error::{GttnError, Result};
use crate::model::{LinearModel, LossKind, Model};
use crate::regularizers::{NormFamily, RegularizerSpec, WeightMode, WeightState};
use crate::tensor::canonical_subsets;
use crate::trainer::{self, TrainConfig, TrainedRun};

/// Experiment definition. Exactly one data source; training knobs other
/// than `lambda` fall back to defaults, which the resolved-config echo
/// materializes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataSection,
    pub regularizer: RegSection,
    pub train: TrainSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticSpec>,
    /// Path to a dataset manifest written by `gen-data`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegSection {
    pub family: NormFamily,
    /// Defaults per family: learnable softmax for the full combination,
    /// fixed uniform for the baselines.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_mode: Option<WeightMode>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_epochs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<trainer::Optimizer>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adam_beta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adam_beta2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adam_epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lr_base: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_every: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train_proportion: Option<f64>,
}

impl TrainSection {
    pub fn resolve(&self) -> TrainConfig {
        let d = TrainConfig::default();
        TrainConfig {
            lambda: self.lambda,
            batch_size: self.batch_size.unwrap_or(d.batch_size),
            max_epochs: self.max_epochs.unwrap_or(d.max_epochs),
            seed: self.seed.unwrap_or(d.seed),
            optimizer: self.optimizer.unwrap_or(d.optimizer),
            adam_beta1: self.adam_beta1.unwrap_or(d.adam_beta1),
            adam_beta2: self.adam_beta2.unwrap_or(d.adam_beta2),
            adam_epsilon: self.adam_epsilon.unwrap_or(d.adam_epsilon),
            lr_base: self.lr_base.unwrap_or(d.lr_base),
            eval_every: self.eval_every.unwrap_or(d.eval_every),
            train_proportion: self.train_proportion.unwrap_or(d.train_proportion),
        }
    }

    pub fn from_resolved(c: &TrainConfig) -> Self {
        TrainSection {
            lambda: c.lambda,
            batch_size: Some(c.batch_size),
            max_epochs: Some(c.max_epochs),
            seed: Some(c.seed),
            optimizer: Some(c.optimizer),
            adam_beta1: Some(c.adam_beta1),
            adam_beta2: Some(c.adam_beta2),
            adam_epsilon: Some(c.adam_epsilon),
            lr_base: Some(c.lr_base),
            eval_every: Some(c.eval_every),
            train_proportion: Some(c.train_proportion),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

fn default_formats() -> Vec<String> {
    vec!["csv".into()]
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| GttnError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| GttnError::Config(vec![format!("{}: {e}", path.display())]))?;
        config.validate()?;
        Ok(config)
    }

    /// Semantic checks, all collected before reporting.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        match (&self.data.synthetic, &self.data.manifest) {
            (None, None) => problems.push("data: need either synthetic or manifest".into()),
            (Some(_), Some(_)) => {
                problems.push("data: synthetic and manifest are mutually exclusive".into())
            }
            _ => {}
        }
        if self.output.directory.is_empty() {
            problems.push("output.directory must be nonempty".into());
        }
        for f in &self.output.formats {
            if f != "csv" {
                problems.push(format!("output.formats: unsupported format '{f}'"));
            }
        }
        if let Err(GttnError::Config(mut more)) = self.train.resolve().validate() {
            problems.append(&mut more);
        }
        if self.regularizer.family == NormFamily::Laf
            && self.regularizer.weight_mode == Some(WeightMode::LearnableSoftmax)
        {
            problems.push("regularizer: last-axis family has a fixed weight".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(GttnError::Config(problems))
        }
    }

    fn weight_mode(&self) -> WeightMode {
        self.regularizer.weight_mode.unwrap_or(match self.regularizer.family {
            NormFamily::Gttn => WeightMode::LearnableSoftmax,
            _ => WeightMode::FixedUniform,
        })
    }
}

#[derive(Parser)]
#[command(name = "gttn", about = "Tensor trace-norm regularized multi-task training")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the canonical flattenings of a tensor shape.
    FlattenInfo {
        /// Comma-separated dims, e.g. 2,3,4
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
    },
    /// Run one training experiment from a JSON config.
    Train {
        config: PathBuf,
        /// Override the training seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize a finished run directory.
    Report {
        run_dir: PathBuf,
        /// Also evaluate the generalization-bound shape.
        #[arg(long)]
        bound: bool,
        /// Confidence level for the bound.
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        /// Use the tail with the extra per-task sample factor.
        #[arg(long)]
        proof_tail: bool,
    },
    /// Grid of runs over lambda / proportion / seed / family axes.
    Sweep {
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        lambdas: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        proportions: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Families to compare; `unregularized` runs with lambda 0.
        #[arg(long, value_delimiter = ',')]
        families: Option<Vec<String>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Materialize the config's synthetic dataset to disk.
    GenData {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Entry point for the `gttn` binary; returns the process exit code.
pub fn run() -> i32 {
    match dispatch(Cli::parse()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Test-friendly entry point taking explicit arguments.
pub fn run_with_args<I, S>(args: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)
        .map_err(|e| GttnError::InvalidArgument(e.to_string()))?;
    dispatch(cli)
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::FlattenInfo { dims } => cmd_flatten_info(&dims),
        Command::Train { config, seed, out } => {
            cmd_train(&config, seed, out.as_deref()).map(|_| ())
        }
        Command::Report { run_dir, bound, delta, proof_tail } => {
            cmd_report(&run_dir, bound, delta, proof_tail)
        }
        Command::Sweep { config, lambdas, proportions, seeds, families, out } => cmd_sweep(
            &config,
            SweepAxes { lambdas, proportions, seeds, families },
            out.as_deref(),
        ),
        Command::GenData { config, seed, out } => cmd_gen_data(&config, seed, out.as_deref()),
    }
}

pub fn cmd_flatten_info(dims: &[usize]) -> Result<()> {
    let subsets = canonical_subsets(dims.len())?;
    for s in &subsets {
        let (rows, cols) = s.flattening_shape(dims);
        println!("{s}: {rows} x {cols}");
    }
    println!("{} canonical flattenings of a {}-way tensor", subsets.len(), dims.len());
    Ok(())
}

fn loss_kind_for(label_kind: LabelKind) -> LossKind {
    match label_kind {
        LabelKind::Binary => LossKind::Logistic,
        LabelKind::Multiclass { .. } => LossKind::CrossEntropy,
    }
}

fn load_data(config: &RunConfig) -> Result<Dataset> {
    if let Some(spec) = &config.data.synthetic {
        Ok(data::generate_synthetic(spec)?.0)
    } else {
        let path = config.data.manifest.as_ref().expect("validated");
        data::load_dataset(Path::new(path))
    }
}

fn build_run(
    config: &RunConfig,
    dataset: &Dataset,
    train_config: &TrainConfig,
) -> Result<(TrainedRun, RegularizerSpec)> {
    let classes = dataset.label_kind.num_classes();
    let order = dataset.dims.len() + usize::from(classes >= 2) + 1;
    let spec = RegularizerSpec::new(config.regularizer.family, order, config.weight_mode())?;
    let (train_set, test_set) =
        data::split(dataset, train_config.train_proportion, train_config.seed)?;
    let model = Model::Linear(LinearModel::init(
        &dataset.dims,
        classes,
        dataset.num_tasks(),
        train_config.seed,
    )?);
    let weights = match config.weight_mode() {
        WeightMode::LearnableSoftmax => WeightState::uniform(spec.subsets.len()),
        WeightMode::FixedUniform => {
            WeightState::from_beta(vec![0.0; spec.subsets.len()])?
        }
    };
    let run = trainer::train(
        model,
        weights,
        &train_set,
        Some(&test_set),
        &spec,
        loss_kind_for(dataset.label_kind),
        train_config,
    )?;
    Ok((run, spec))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| GttnError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn write_resolved_config(config: &RunConfig, train_config: &TrainConfig, dir: &Path) -> Result<()> {
    let resolved = RunConfig {
        data: config.data.clone(),
        regularizer: RegSection {
            family: config.regularizer.family,
            weight_mode: Some(config.weight_mode()),
        },
        train: TrainSection::from_resolved(train_config),
        output: OutputSection {
            directory: dir.display().to_string(),
            formats: config.output.formats.clone(),
        },
    };
    let text = serde_json::to_string_pretty(&resolved)
        .map_err(|e| GttnError::InvalidArgument(e.to_string()))?;
    write_text(&dir.join("resolved_config.json"), &text)
}

/// Train and persist metrics, weight trace, head checkpoint, and the
/// resolved config. Returns the finished run for programmatic callers.
pub fn cmd_train(config_path: &Path, seed: Option<u64>, out: Option<&Path>) -> Result<TrainedRun> {
    let config = RunConfig::load(config_path)?;
    let mut train_config = config.train.resolve();
    if let Some(s) = seed {
        train_config.seed = s;
    }
    let dir: PathBuf = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(&config.output.directory));
    fs::create_dir_all(&dir).map_err(|e| GttnError::Io {
        path: dir.display().to_string(),
        source: e,
    })?;

    let dataset = load_data(&config)?;
    let (run, spec) = build_run(&config, &dataset, &train_config)?;

    write_resolved_config(&config, &train_config, &dir)?;
    write_text(&dir.join("metrics.csv"), &trainer::metrics_csv(&run.metrics))?;
    write_text(
        &dir.join("alpha_trace.csv"),
        &trainer::alpha_trace_csv(&run.alpha_trace, &spec),
    )?;
    data::save_tensor(run.model.regularized_block(), &dir.join("checkpoint.gtn"))?;
    Ok(run)
}

fn read_artifact(dir: &Path, name: &str) -> Result<String> {
    let path = dir.join(name);
    fs::read_to_string(&path).map_err(|e| GttnError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn parse_alpha_trace(csv: &str) -> Result<Vec<(String, f64)>> {
    // keep only the last epoch's rows
    let mut rows: Vec<(usize, String, f64)> = Vec::new();
    for line in csv.lines().skip(1) {
        if line.is_empty() {
            continue;
        }
        let bad = || GttnError::Format {
            path: "alpha_trace.csv".into(),
            message: format!("bad row '{line}'"),
        };
        let (epoch, rest) = line.split_once(',').ok_or_else(bad)?;
        let (subset, alpha) = rest.rsplit_once(',').ok_or_else(bad)?;
        rows.push((
            epoch.parse().map_err(|_| bad())?,
            subset.trim_matches('"').to_string(),
            alpha.parse().map_err(|_| bad())?,
        ));
    }
    let last = rows.iter().map(|r| r.0).max().ok_or_else(|| GttnError::Format {
        path: "alpha_trace.csv".into(),
        message: "no recorded epochs".into(),
    })?;
    Ok(rows
        .into_iter()
        .filter(|r| r.0 == last)
        .map(|(_, s, a)| (s, a))
        .collect())
}

/// Print the final weight table (max flagged) and optionally evaluate the
/// generalization-bound shape from the run's resolved config.
pub fn cmd_report(run_dir: &Path, bound: bool, delta: f64, proof_tail: bool) -> Result<()> {
    let trace = read_artifact(run_dir, "alpha_trace.csv")?;
    let rows = parse_alpha_trace(&trace)?;
    let max_index = rows
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap().then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    println!("final flattening weights:");
    let mut report_csv = String::from("subset,alpha,is_max\n");
    for (i, (subset, alpha)) in rows.iter().enumerate() {
        let flag = if i == max_index { " *" } else { "" };
        println!("{subset:>12}  {alpha:.6}{flag}");
        report_csv.push_str(&format!("\"{subset}\",{alpha},{}\n", (i == max_index) as u8));
    }
    write_text(&run_dir.join("alpha_report.csv"), &report_csv)?;

    if bound {
        let resolved = read_artifact(run_dir, "resolved_config.json")?;
        let config: RunConfig = serde_json::from_str(&resolved)
            .map_err(|e| GttnError::Config(vec![format!("resolved_config.json: {e}")]))?;
        if config.regularizer.family != NormFamily::Gttn {
            return Err(GttnError::InvalidArgument(
                "bound evaluation needs weights over all canonical flattenings".into(),
            ));
        }
        let dataset = load_data(&config)?;
        let kappa = analysis::estimate_kappa(&dataset)?;
        let metrics = read_artifact(run_dir, "metrics.csv")?;
        let (emp, gamma, n_train) = final_train_stats(&metrics, &dataset, &config)?;
        let classes = dataset.label_kind.num_classes();
        let mut dims = dataset.dims.clone();
        if classes >= 2 {
            dims.push(classes);
        }
        dims.push(dataset.num_tasks());
        let inputs = analysis::BoundInputs {
            rho: 1.0,
            gamma: gamma.max(f64::MIN_POSITIVE),
            kappa,
            delta,
            c: 1.0,
            dims,
            n0: n_train,
            alpha: rows.iter().map(|(_, a)| *a).collect(),
            proof_tail,
        };
        let report = analysis::generalization_bound(&inputs, emp)?;
        println!(
            "bound (up to absolute constant c=1): {} = {} empirical + {} complexity + {} tail",
            report.value, report.empirical_loss, report.complexity, report.tail
        );
        println!("kappa estimate: {kappa}");
        write_text(&run_dir.join("bound_report.csv"), &analysis::bound_report_csv(&report))?;
    }
    Ok(())
}

/// Mean final-epoch train loss, final reg_value, and per-task train count.
fn final_train_stats(
    metrics_csv: &str,
    dataset: &Dataset,
    config: &RunConfig,
) -> Result<(f64, f64, usize)> {
    let mut rows: Vec<(usize, f64, f64)> = Vec::new(); // epoch, loss, reg
    for line in metrics_csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() == 7 && f[2] == "train" {
            let bad = || GttnError::Format {
                path: "metrics.csv".into(),
                message: format!("bad row '{line}'"),
            };
            rows.push((
                f[0].parse().map_err(|_| bad())?,
                f[3].parse().map_err(|_| bad())?,
                f[5].parse().map_err(|_| bad())?,
            ));
        }
    }
    let last = rows.iter().map(|r| r.0).max().ok_or_else(|| GttnError::Format {
        path: "metrics.csv".into(),
        message: "no train rows".into(),
    })?;
    let final_rows: Vec<_> = rows.iter().filter(|r| r.0 == last).collect();
    let emp = final_rows.iter().map(|r| r.1).sum::<f64>() / final_rows.len() as f64;
    let gamma = final_rows[0].2;
    let proportion = config.train.resolve().train_proportion;
    let n0 = dataset.tasks.iter().map(|t| t.inputs.len()).min().unwrap_or(0);
    Ok((emp, gamma, ((proportion * n0 as f64).floor() as usize).max(1)))
}

pub struct SweepAxes {
    pub lambdas: Option<Vec<f64>>,
    pub proportions: Option<Vec<f64>>,
    pub seeds: Option<Vec<u64>>,
    pub families: Option<Vec<String>>,
}

/// One aggregated comparison row.
#[derive(Debug, Clone)]
pub struct SweepCell {
    pub family: String,
    pub lambda: f64,
    pub proportion: f64,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub seeds: usize,
}

/// Run the grid and write `sweep.csv` (mean +/- std of mean test accuracy
/// over seeds, one row per family/lambda/proportion cell).
pub fn cmd_sweep(config_path: &Path, axes: SweepAxes, out: Option<&Path>) -> Result<()> {
    let config = RunConfig::load(config_path)?;
    let cells = run_sweep(&config, axes)?;
    let dir: PathBuf = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(&config.output.directory));
    fs::create_dir_all(&dir).map_err(|e| GttnError::Io {
        path: dir.display().to_string(),
        source: e,
    })?;
    let mut csv = String::from("family,lambda,proportion,mean_accuracy,std_accuracy,seeds\n");
    for c in &cells {
        println!(
            "{} lambda={} proportion={}: {:.4} +/- {:.4} ({} seeds)",
            c.family, c.lambda, c.proportion, c.mean_accuracy, c.std_accuracy, c.seeds
        );
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            c.family, c.lambda, c.proportion, c.mean_accuracy, c.std_accuracy, c.seeds
        ));
    }
    write_text(&dir.join("sweep.csv"), &csv)
}

/// Programmatic sweep over the requested axes; unset axes collapse to the
/// config's single value.
pub fn run_sweep(config: &RunConfig, axes: SweepAxes) -> Result<Vec<SweepCell>> {
    run_sweep_inner(config, &axes)
}

fn run_sweep_inner(config: &RunConfig, axes: &SweepAxes) -> Result<Vec<SweepCell>> {
    if axes.lambdas.is_none()
        && axes.proportions.is_none()
        && axes.seeds.is_none()
        && axes.families.is_none()
    {
        return Err(GttnError::Config(vec!["empty sweep: no axes given".into()]));
    }
    let base = config.train.resolve();
    let lambdas = axes.lambdas.clone().unwrap_or_else(|| vec![base.lambda]);
    let proportions = axes
        .proportions
        .clone()
        .unwrap_or_else(|| vec![base.train_proportion]);
    let seeds = axes.seeds.clone().unwrap_or_else(|| vec![base.seed]);
    let families = axes
        .families
        .clone()
        .unwrap_or_else(|| vec![config.regularizer.family.name().to_string()]);
    if lambdas.is_empty() || proportions.is_empty() || seeds.is_empty() || families.is_empty() {
        return Err(GttnError::Config(vec!["empty sweep axis".into()]));
    }

    let dataset = load_data(config)?;
    let mut cells = Vec::new();
    for family_name in &families {
        let (family, lambda_override) = if family_name == "unregularized" {
            (NormFamily::Gttn, Some(0.0))
        } else {
            (
                family_name
                    .parse::<NormFamily>()
                    .map_err(|_| GttnError::Config(vec![format!("unknown family '{family_name}'")]))?,
                None,
            )
        };
        let family_lambdas = match lambda_override {
            Some(l) => vec![l],
            None => lambdas.clone(),
        };
        for &lambda in &family_lambdas {
            for &proportion in &proportions {
                let mut accs = Vec::with_capacity(seeds.len());
                for &seed in &seeds {
                    let cell_config = RunConfig {
                        data: config.data.clone(),
                        regularizer: RegSection { family, weight_mode: None },
                        train: TrainSection {
                            lambda,
                            seed: Some(seed),
                            train_proportion: Some(proportion),
                            ..config.train.clone()
                        },
                        output: config.output.clone(),
                    };
                    let train_config = cell_config.train.resolve();
                    let (run, _) = build_run(&cell_config, &dataset, &train_config)?;
                    let last = run.metrics.iter().map(|r| r.epoch).max().unwrap_or(0);
                    let test_accs: Vec<f64> = run
                        .metrics
                        .iter()
                        .filter(|r| r.epoch == last && r.split == "test")
                        .map(|r| r.accuracy)
                        .collect();
                    accs.push(test_accs.iter().sum::<f64>() / test_accs.len() as f64);
                }
                let mean = accs.iter().sum::<f64>() / accs.len() as f64;
                let var = accs.iter().map(|a| (a - mean).powi(2)).sum::<f64>()
                    / accs.len() as f64;
                cells.push(SweepCell {
                    family: family_name.clone(),
                    lambda,
                    proportion,
                    mean_accuracy: mean,
                    std_accuracy: var.sqrt(),
                    seeds: seeds.len(),
                });
            }
        }
    }
    Ok(cells)
}

/// Generate the config's synthetic dataset and write it (plus the ground
/// truth tensor) as loadable files.
pub fn cmd_gen_data(config_path: &Path, seed: Option<u64>, out: Option<&Path>) -> Result<()> {
    let config = RunConfig::load(config_path)?;
    let mut spec = config
        .data
        .synthetic
        .clone()
        .ok_or_else(|| GttnError::Config(vec!["gen-data needs a synthetic data section".into()]))?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    let dir: PathBuf = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(&config.output.directory));
    let (dataset, truth) = data::generate_synthetic(&spec)?;
    let manifest = data::save_dataset(&dataset, &dir)?;
    data::save_tensor(&truth, &dir.join("ground_truth.gtn"))?;
    println!("wrote {}", manifest.display());
    Ok(())
}
