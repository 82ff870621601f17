//! Command-line front end. Every failure is reported on stderr as a single
//! line `error:<exit code>: <message>`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::compare::compare;
use crate::embedding::{load_embeddings, LoadedVideo, RelevanceMode};
use crate::error::{Error, Result};
use crate::io;
use crate::oracle::{self, InstanceGenerator, ENUMERATION_LIMIT};
use crate::pool::{build_pool, VideoMeta, DEFAULT_CAP};
use crate::preset::{make_preset, Preset, PresetName, DEFAULT_LAMBDA};
use crate::router::{
    self, fit_routing, route, route_oracle, AccuracyTable, QuestionTypeModel, RoutingTable,
    TrainConfig, DEFAULT_EPOCHS, DEFAULT_LEARNING_RATE, DEFAULT_TYPES,
};
use crate::selector::{Engine, Objective, DEFAULT_BUDGET};

#[derive(Debug, Parser)]
#[command(name = "framesel", version, about = "Relevance + coverage keyframe selection")]
pub struct Cli {
    /// Output file (written atomically); stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Suppress the summary lines printed on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a candidate-pool manifest from video metadata.
    Pool(PoolArgs),
    /// Select K frames and write a selection result.
    Select(SelectArgs),
    /// Compare greedy selection with uniform sampling.
    Compare(SelectArgs),
    /// Check greedy against exhaustive enumeration on random instances.
    Oracle(OracleArgs),
    /// Run the randomized monotonicity / submodularity property checks.
    Props(PropsArgs),
    /// Train the question-type classifier on a TSV file.
    TrainClassifier(TrainArgs),
    /// Fit a type -> preset routing table from a validation accuracy CSV.
    FitRouting(FitArgs),
    /// Route one question to a preset.
    Route(RouteArgs),
}

#[derive(Debug, Args)]
pub struct PoolArgs {
    #[arg(long)]
    pub fps: f64,
    #[arg(long)]
    pub frames: u64,
    #[arg(long, default_value = "video")]
    pub video_id: String,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Debug, Args, Clone)]
pub struct SelectArgs {
    /// Pool manifest with attached embedding paths.
    #[arg(long, required_unless_present = "batch")]
    pub manifest: Option<PathBuf>,
    /// File listing one manifest path per line (select only).
    #[arg(long, conflicts_with = "manifest")]
    pub batch: Option<PathBuf>,
    /// Directory for batch outputs, named `<video_id>.selection.json`.
    #[arg(long, requires = "batch")]
    pub out_dir: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub k: usize,
    /// Preset name, or `auto` to route by question type.
    #[arg(long)]
    pub preset: String,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    pub lambda: f64,
    #[arg(long, default_value = "raw_relu")]
    pub relevance_mode: String,
    /// Divide the coverage term by N.
    #[arg(long)]
    pub normalize_coverage: bool,
    /// Use the lazy (priority-queue) greedy engine.
    #[arg(long)]
    pub lazy: bool,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub routing: Option<PathBuf>,
    #[arg(long)]
    pub question: Option<String>,
    /// Ground-truth question type; bypasses the classifier.
    #[arg(long)]
    pub question_type: Option<String>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Largest ground-set size drawn.
    #[arg(long, default_value_t = 12)]
    pub n: usize,
    /// Largest budget drawn.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct PropsArgs {
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training data, `type<TAB>question` per line.
    #[arg(long)]
    pub data: PathBuf,
    /// Comma-separated type list; defaults to the seven built-in types.
    #[arg(long, value_delimiter = ',')]
    pub types: Option<Vec<String>>,
    #[arg(long, default_value_t = DEFAULT_EPOCHS)]
    pub epochs: usize,
    #[arg(long, default_value_t = DEFAULT_LEARNING_RATE)]
    pub learning_rate: f64,
    #[arg(long)]
    pub shuffle: bool,
    /// Labeled evaluation set; accuracy and confusion matrix go to stderr.
    #[arg(long)]
    pub eval: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with header `type,relevance_only,relevance_oriented,coverage_oriented,coverage_only`.
    #[arg(long)]
    pub accuracies: PathBuf,
    /// Types that must be present.
    #[arg(long, value_delimiter = ',')]
    pub types: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct RouteArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub routing: PathBuf,
    #[arg(long)]
    pub question: Option<String>,
    #[arg(long)]
    pub question_type: Option<String>,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    pub lambda: f64,
}

/// How the preset is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum PresetSpec {
    Named(PresetName),
    Routed {
        routing: PathBuf,
        model: Option<PathBuf>,
        question: Option<String>,
        question_type: Option<String>,
    },
}

/// Validated selection settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub budget: usize,
    pub preset: PresetSpec,
    pub lambda: f64,
    pub relevance_mode: RelevanceMode,
    pub normalize_coverage: bool,
    pub engine: Engine,
}

impl RunConfig {
    pub fn from_args(a: &SelectArgs) -> Result<Self> {
        if a.k < 1 {
            return Err(Error::Budget(a.k));
        }
        if !(a.lambda > 0.0 && a.lambda < 1.0) {
            return Err(Error::Parameter(format!("lambda must lie in (0, 1), got {}", a.lambda)));
        }
        let preset = if a.preset == "auto" {
            let routing = a.routing.clone().ok_or_else(|| {
                Error::Parameter("--preset auto requires --routing".into())
            })?;
            if a.question_type.is_none() && (a.model.is_none() || a.question.is_none()) {
                return Err(Error::Parameter(
                    "--preset auto requires --model and --question (or --question-type)".into(),
                ));
            }
            PresetSpec::Routed {
                routing,
                model: a.model.clone(),
                question: a.question.clone(),
                question_type: a.question_type.clone(),
            }
        } else {
            PresetSpec::Named(a.preset.parse()?)
        };
        Ok(RunConfig {
            budget: a.k,
            preset,
            lambda: a.lambda,
            relevance_mode: a.relevance_mode.parse()?,
            normalize_coverage: a.normalize_coverage,
            engine: if a.lazy { Engine::Lazy } else { Engine::Plain },
        })
    }

    pub fn resolve_preset(&self) -> Result<Preset> {
        match &self.preset {
            PresetSpec::Named(name) => make_preset(*name, self.lambda),
            PresetSpec::Routed {
                routing,
                model,
                question,
                question_type,
            } => {
                let table = RoutingTable::read(routing)?;
                match (question_type, model, question) {
                    (Some(t), _, _) => route_oracle(&table, t, self.lambda),
                    (None, Some(m), Some(q)) => {
                        let model = QuestionTypeModel::read(m)?;
                        Ok(route(&model, &table, q, self.lambda)?.1)
                    }
                    _ => Err(Error::Parameter("routing needs a model and a question".into())),
                }
            }
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run_from<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 0 {
                let _ = e.print();
            } else {
                let first = e.to_string();
                let first = first.lines().next().unwrap_or("invalid arguments");
                eprintln!("error:2: {}", first.trim_start_matches("error: "));
            }
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error:{}: {msg}", e.exit_code());
            e.exit_code()
        }
    }
}

pub fn main() -> ! {
    std::process::exit(run_from(std::env::args_os()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => io::write_atomic(path, text.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn note(cli: &Cli, msg: impl AsRef<str>) {
    if !cli.quiet {
        eprintln!("{}", msg.as_ref());
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Pool(a) => {
            let pool = build_pool(VideoMeta::new(a.video_id.clone(), a.fps, a.frames)?, a.cap)?;
            emit(out, &io::to_json_line(&pool.to_manifest())?)?;
            note(cli, format!("pool: {} candidates", pool.len()));
        }
        Command::Select(a) => {
            let config = RunConfig::from_args(a)?;
            if let Some(list) = &a.batch {
                return select_batch(cli, &config, list, a.out_dir.as_deref());
            }
            let manifest = a.manifest.as_deref().expect("clap requires --manifest");
            let text = select_one(&config, manifest)?;
            emit(out, &text)?;
        }
        Command::Compare(a) => {
            let config = RunConfig::from_args(a)?;
            let manifest = a
                .manifest
                .as_deref()
                .ok_or_else(|| Error::Parameter("compare requires --manifest".into()))?;
            let video: LoadedVideo<f64> = load_embeddings(manifest)?;
            let preset = config.resolve_preset()?;
            let r = video.embeddings.relevance_scores(config.relevance_mode);
            let sim = video.embeddings.similarity_matrix();
            let obj = Objective::new(&r, &sim, preset, config.normalize_coverage)?;
            let cmp = compare(&obj, config.budget, &video.pool)?;
            emit(out, &io::to_json_line(&cmp)?)?;
            note(
                cli,
                format!(
                    "compare: greedy F {:.6} vs uniform F {:.6}",
                    cmp.greedy.objective, cmp.uniform.objective
                ),
            );
        }
        Command::Oracle(a) => {
            if a.n > ENUMERATION_LIMIT {
                return Err(Error::InstanceTooLarge {
                    n: a.n,
                    max: ENUMERATION_LIMIT,
                });
            }
            let mut generator = InstanceGenerator::new(cli.seed, a.n, a.k);
            let reports = oracle::check_bound(&mut generator, a.trials)?;
            let mut text = String::new();
            for r in &reports {
                text.push_str(&io::to_json_line(r)?);
            }
            emit(out, &text)?;
            let worst = reports.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
            note(cli, format!("oracle: {} instances, minimum ratio {worst:.6}", reports.len()));
        }
        Command::Props(a) => {
            let summary = oracle::property_suite(cli.seed, a.trials);
            emit(out, &io::to_json_line(&summary)?)?;
            let passed = summary.trials - summary.failures().min(summary.trials);
            note(cli, format!("props: {passed}/{} trials passed", summary.trials));
            if !summary.all_passed() {
                return Err(Error::Verification(
                    summary
                        .first_counterexample
                        .or(summary.first_matrix_issue)
                        .unwrap_or_default(),
                ));
            }
        }
        Command::TrainClassifier(a) => {
            let examples = router::read_tsv(&a.data)?;
            let types = a
                .types
                .clone()
                .unwrap_or_else(|| DEFAULT_TYPES.iter().map(|s| s.to_string()).collect());
            let config = TrainConfig {
                types,
                epochs: a.epochs,
                learning_rate: a.learning_rate,
                seed: cli.seed,
                shuffle: a.shuffle,
            };
            let trained = router::train_classifier(&examples, &config)?;
            emit(out, &io::to_json_line(&trained.model)?)?;
            let train_eval = router::evaluate(&trained.model, &examples)?;
            note(
                cli,
                format!(
                    "train-classifier: final loss {:.6}, training accuracy {:.4}",
                    trained.epoch_losses.last().copied().unwrap_or(f64::NAN),
                    train_eval.accuracy
                ),
            );
            if let Some(eval) = &a.eval {
                let report = router::evaluate(&trained.model, &router::read_tsv(eval)?)?;
                note(cli, io::to_json_line(&report)?.trim_end());
            }
        }
        Command::FitRouting(a) => {
            let table = fit_routing(&AccuracyTable::read_csv(&a.accuracies)?)?;
            if let Some(types) = &a.types {
                table.check_covers(types)?;
            }
            emit(out, &io::to_json_line(&table)?)?;
        }
        Command::Route(a) => {
            let table = RoutingTable::read(&a.routing)?;
            let routed = match (&a.question_type, &a.model, &a.question) {
                (Some(t), _, _) => RouteOutput {
                    question_type: t.clone(),
                    probabilities: None,
                    preset: route_oracle(&table, t, a.lambda)?,
                },
                (None, Some(m), Some(q)) => {
                    let model = QuestionTypeModel::read(m)?;
                    let (pred, preset) = route(&model, &table, q, a.lambda)?;
                    RouteOutput {
                        question_type: pred.label,
                        probabilities: Some(pred.probabilities),
                        preset,
                    }
                }
                _ => {
                    return Err(Error::Parameter(
                        "route requires --model and --question, or --question-type".into(),
                    ))
                }
            };
            emit(out, &io::to_json_line(&routed)?)?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct RouteOutput {
    question_type: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    probabilities: Option<Vec<f64>>,
    preset: Preset,
}

/// Runs one selection and returns the serialized result.
pub fn select_one(config: &RunConfig, manifest: &Path) -> Result<String> {
    let video: LoadedVideo<f64> = load_embeddings(manifest)?;
    let preset = config.resolve_preset()?;
    let r = video.embeddings.relevance_scores(config.relevance_mode);
    let sim = video.embeddings.similarity_matrix();
    let obj = Objective::new(&r, &sim, preset, config.normalize_coverage)?;
    let result = obj.select_with(config.budget, &video.pool, config.engine)?;
    io::to_json_line(&result)
}

fn select_batch(cli: &Cli, config: &RunConfig, list: &Path, out_dir: Option<&Path>) -> Result<()> {
    let base = list.parent().unwrap_or_else(|| Path::new("."));
    let manifests: Vec<PathBuf> = io::read_to_string(list)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| base.join(l))
        .collect();
    let out_dir = out_dir.unwrap_or_else(|| Path::new("."));
    let outcomes: Vec<Result<()>> = manifests
        .par_iter()
        .map(|m| {
            let text = select_one(config, m)?;
            let video_id = serde_json::from_str::<serde_json::Value>(&text)?["video_id"]
                .as_str()
                .unwrap_or("video")
                .to_string();
            io::write_atomic(&out_dir.join(format!("{video_id}.selection.json")), text.as_bytes())
        })
        .collect();
    let done = outcomes.iter().filter(|r| r.is_ok()).count();
    note(cli, format!("select: {done}/{} videos", manifests.len()));
    outcomes.into_iter().collect()
}
