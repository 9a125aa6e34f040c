//! Command-line surface: train, resolve, eval, gridsearch, ablate, gen.
//!
//! Configuration comes from three layers — a TOML config file, environment
//! variables prefixed `SIEVECOREF_`, and command-line flags — and flags win
//! over the environment, which wins over the file. All randomness flows
//! from the single `--seed` value. Reports are printed as plain text; when
//! an output path is given, a machine-readable JSON sidecar is written next
//! to it.

use crate::ablation::{ablation_run, standard_matrix, AblationConfig, ClassifierKind, SystemMode};
use crate::corpus::{read_corpus, write_corpus, Document};
use crate::embedding::{EmbeddingTable, OovPolicy};
use crate::engine::{
    check_model_compatibility, dump_records, eval_dump, parse_dump, render_ablation_text,
    render_cv_text, render_dump, render_eval_text, render_grid_text, resolve_corpus,
    train_model, SavedModel, TrainOptions,
};
use crate::error::{Error, Result};
use crate::features::ClusterFeatureSource;
use crate::learner::cv::{grid_search, GridSpec};
use crate::learner::forest::GridPoint;
use crate::learner::tree::Criterion;
use crate::lexicon::Lexicons;
use crate::mention::DetectionMode;
use crate::resolver::{EvalPolicy, ResolverConfig};
use crate::sieves::{SieveConfig, SieveName};
use crate::synth::{gen_corpus, synthetic_embeddings, SynthSpec};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Keys a config file may set. Flags and `SIEVECOREF_*` environment
/// variables mirror these names.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub corpus: Option<PathBuf>,
    pub lexicons: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub mode: Option<String>,
    pub cluster_source: Option<String>,
    pub detection: Option<String>,
    pub classifier: Option<String>,
    pub policy: Option<String>,
    pub merge_threshold: Option<f64>,
    pub sentence_window: Option<usize>,
    pub no_rule_sieves: Option<bool>,
    pub reverse_sieves: Option<bool>,
    pub cv_folds: Option<usize>,
    pub n_estimators: Option<usize>,
    /// 0 means "grow until pure".
    pub max_depth: Option<usize>,
    pub criterion: Option<String>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
}

impl EngineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

fn parse_mode(s: &str) -> Result<SystemMode> {
    match s {
        "rule-only" => Ok(SystemMode::RuleOnly),
        "mention-pair" => Ok(SystemMode::MentionPair),
        "hybrid" => Ok(SystemMode::Hybrid),
        other => Err(Error::Config(format!(
            "unknown mode {other:?} (expected rule-only, mention-pair, or hybrid)"
        ))),
    }
}

fn parse_cluster_source(s: &str) -> Result<ClusterFeatureSource> {
    match s {
        "system" => Ok(ClusterFeatureSource::System),
        "gold" => Ok(ClusterFeatureSource::Gold),
        other => Err(Error::Config(format!(
            "unknown cluster source {other:?} (expected system or gold)"
        ))),
    }
}

fn parse_detection(s: &str) -> Result<DetectionMode> {
    match s {
        "from-annotations" => Ok(DetectionMode::FromAnnotations),
        "from-gold" => Ok(DetectionMode::FromGold),
        other => Err(Error::Config(format!(
            "unknown detection mode {other:?} (expected from-annotations or from-gold)"
        ))),
    }
}

fn parse_classifier(s: &str) -> Result<ClassifierKind> {
    match s {
        "forest" => Ok(ClassifierKind::Forest),
        "logistic" => Ok(ClassifierKind::Logistic),
        other => Err(Error::Config(format!(
            "unknown classifier {other:?} (expected forest or logistic)"
        ))),
    }
}

fn parse_policy(s: &str) -> Result<EvalPolicy> {
    match s {
        "all-pronouns" => Ok(EvalPolicy::AllPronouns),
        "gold-anaphoric-only" => Ok(EvalPolicy::GoldAnaphoricOnly),
        other => Err(Error::Config(format!(
            "unknown policy {other:?} (expected all-pronouns or gold-anaphoric-only)"
        ))),
    }
}

fn parse_criterion(s: &str) -> Result<Criterion> {
    match s {
        "gini" => Ok(Criterion::Gini),
        "entropy" => Ok(Criterion::Entropy),
        other => Err(Error::Config(format!(
            "unknown split criterion {other:?} (expected gini or entropy)"
        ))),
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "sievecoref",
    version,
    about = "Entity-centric pronoun resolution: rule sieves plus a learned linking stage"
)]
pub struct Cli {
    /// TOML config file; flags and SIEVECOREF_* env vars override it.
    #[arg(long, global = true, env = "SIEVECOREF_CONFIG")]
    pub config: Option<PathBuf>,
    /// Master seed for every random choice in the run.
    #[arg(long, global = true, env = "SIEVECOREF_SEED")]
    pub seed: Option<u64>,
    /// Worker threads for per-document parallelism (default: all cores).
    #[arg(long, global = true, env = "SIEVECOREF_JOBS")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by commands that read corpora and run the pipeline.
#[derive(Args, Debug, Clone, Default)]
pub struct PipelineArgs {
    /// Input corpus in the 13-column tabular format.
    #[arg(long, env = "SIEVECOREF_CORPUS")]
    pub corpus: Option<PathBuf>,
    /// Lexicon directory (defaults to the built-in miniature English set).
    #[arg(long, env = "SIEVECOREF_LEXICONS")]
    pub lexicons: Option<PathBuf>,
    /// Word-embedding table in text format.
    #[arg(long, env = "SIEVECOREF_EMBEDDINGS")]
    pub embeddings: Option<PathBuf>,
    /// rule-only, mention-pair, or hybrid.
    #[arg(long, env = "SIEVECOREF_MODE")]
    pub mode: Option<String>,
    /// Cluster-feature source: system or gold.
    #[arg(long, env = "SIEVECOREF_CLUSTER_SOURCE")]
    pub cluster_source: Option<String>,
    /// Mention detection: from-annotations or from-gold.
    #[arg(long, env = "SIEVECOREF_DETECTION")]
    pub detection: Option<String>,
    /// Linking threshold on classifier scores.
    #[arg(long, env = "SIEVECOREF_MERGE_THRESHOLD")]
    pub merge_threshold: Option<f64>,
    /// Candidate window in sentences.
    #[arg(long, env = "SIEVECOREF_SENTENCE_WINDOW")]
    pub sentence_window: Option<usize>,
    /// Disable the rule sieves entirely.
    #[arg(long, env = "SIEVECOREF_NO_RULE_SIEVES")]
    pub no_rule_sieves: bool,
    /// Run the rule sieves in reverse order.
    #[arg(long, env = "SIEVECOREF_REVERSE_SIEVES")]
    pub reverse_sieves: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Train the learned linking stage and persist the model.
    Train(TrainArgs),
    /// Resolve pronouns in a corpus and write a prediction dump.
    Resolve(ResolveArgs),
    /// Score a prediction dump against gold chains.
    Eval(EvalArgs),
    /// Cross-validated hyper-parameter search over the forest grid.
    Gridsearch(GridsearchArgs),
    /// Run the standard settings matrix end-to-end.
    Ablate(AblateArgs),
    /// Generate a synthetic corpus.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Where to write the trained model (JSON).
    #[arg(long)]
    pub model_out: PathBuf,
    /// forest or logistic.
    #[arg(long, env = "SIEVECOREF_CLASSIFIER")]
    pub classifier: Option<String>,
    /// Cross-validation folds for the training report (0 = skip).
    #[arg(long, env = "SIEVECOREF_CV_FOLDS")]
    pub cv_folds: Option<usize>,
    /// Trees in the forest.
    #[arg(long, env = "SIEVECOREF_N_ESTIMATORS")]
    pub n_estimators: Option<usize>,
    /// Maximum tree depth; 0 grows until pure.
    #[arg(long, env = "SIEVECOREF_MAX_DEPTH")]
    pub max_depth: Option<usize>,
    /// gini or entropy.
    #[arg(long, env = "SIEVECOREF_CRITERION")]
    pub criterion: Option<String>,
    /// Run the full hyper-parameter grid first and train at the best point.
    #[arg(long)]
    pub grid: bool,
    /// Write the text report here (plus a .json sidecar).
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ResolveArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Trained model; omit to run the rule sieves alone.
    #[arg(long, env = "SIEVECOREF_MODEL")]
    pub model: Option<PathBuf>,
    /// Where to write the prediction dump (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Prediction dump produced by `resolve`.
    #[arg(long)]
    pub predictions: PathBuf,
    /// all-pronouns or gold-anaphoric-only.
    #[arg(long, env = "SIEVECOREF_POLICY")]
    pub policy: Option<String>,
    /// Write the text report here (plus a .json sidecar).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GridsearchArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Cross-validation folds per grid point.
    #[arg(long, env = "SIEVECOREF_CV_FOLDS")]
    pub cv_folds: Option<usize>,
    /// Where to persist the full grid table (plus a .json sidecar).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct AblateArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Held-out corpus; omit to split the training corpus 3:1.
    #[arg(long)]
    pub test_corpus: Option<PathBuf>,
    /// Trees in each row's forest.
    #[arg(long, env = "SIEVECOREF_N_ESTIMATORS")]
    pub n_estimators: Option<usize>,
    /// Write the table here (plus a .json sidecar).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Where to write the generated corpus.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of documents.
    #[arg(long, default_value_t = 10)]
    pub docs: usize,
    #[arg(long)]
    pub entities: Option<usize>,
    #[arg(long)]
    pub mentions_per_entity: Option<usize>,
    #[arg(long)]
    pub pronoun_rate: Option<f64>,
    #[arg(long)]
    pub sentence_len_min: Option<usize>,
    #[arg(long)]
    pub sentence_len_max: Option<usize>,
    #[arg(long)]
    pub distractor_rate: Option<f64>,
    #[arg(long)]
    pub quote_rate: Option<f64>,
    #[arg(long)]
    pub max_chain_gap: Option<usize>,
}

/// `flag || env/file` merge for one optional setting.
fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>) -> Option<T> {
    flag.clone().or_else(|| file.clone())
}

/// Everything a pipeline command needs, resolved from flags + config file.
struct PipelineSetup {
    docs: Vec<Document>,
    lex: Lexicons,
    embeddings: Option<EmbeddingTable>,
    mode: SystemMode,
    cluster_source: ClusterFeatureSource,
    detection: DetectionMode,
    sieves: SieveConfig,
    resolver: ResolverConfig,
}

fn load_pipeline(args: &PipelineArgs, file: &EngineConfig) -> Result<PipelineSetup> {
    let corpus_path = pick(&args.corpus, &file.corpus)
        .ok_or_else(|| Error::Config("no corpus given (--corpus or config `corpus`)".into()))?;
    let docs = read_corpus(&corpus_path)?;
    let lex = match pick(&args.lexicons, &file.lexicons) {
        Some(dir) => Lexicons::load_dir(&dir)?,
        None => Lexicons::miniature_english(),
    };
    let embeddings = match pick(&args.embeddings, &file.embeddings) {
        Some(p) => Some(EmbeddingTable::load(&p, OovPolicy::ZeroVector)?),
        None => None,
    };
    let mode = match pick(&args.mode, &file.mode) {
        Some(s) => parse_mode(&s)?,
        None => SystemMode::Hybrid,
    };
    let cluster_source = match pick(&args.cluster_source, &file.cluster_source) {
        Some(s) => parse_cluster_source(&s)?,
        None => ClusterFeatureSource::System,
    };
    let detection = match pick(&args.detection, &file.detection) {
        Some(s) => parse_detection(&s)?,
        None => DetectionMode::FromAnnotations,
    };
    let no_rule_sieves = args.no_rule_sieves || file.no_rule_sieves.unwrap_or(false);
    let reverse_sieves = args.reverse_sieves || file.reverse_sieves.unwrap_or(false);
    let mut sieves = if no_rule_sieves {
        SieveConfig::none()
    } else {
        SieveConfig::default()
    };
    if reverse_sieves && !no_rule_sieves {
        sieves.order = SieveName::ALL.iter().rev().copied().collect();
    }
    if let Some(w) = pick(&args.sentence_window, &file.sentence_window) {
        sieves.sentence_window = w;
    }
    let mut resolver = ResolverConfig::default();
    if let Some(t) = pick(&args.merge_threshold, &file.merge_threshold) {
        resolver.merge_threshold = t;
    }
    if let Some(w) = pick(&args.sentence_window, &file.sentence_window) {
        resolver.sentence_window = w;
    }
    resolver.validate()?;
    sieves.validate()?;
    Ok(PipelineSetup {
        docs,
        lex,
        embeddings,
        mode,
        cluster_source,
        detection,
        sieves,
        resolver,
    })
}

fn write_with_sidecar<T: Serialize>(path: &Path, text: &str, machine: &T) -> Result<()> {
    std::fs::write(path, text)?;
    let sidecar = path.with_extension(format!(
        "{}json",
        path.extension()
            .map(|e| format!("{}.", e.to_string_lossy()))
            .unwrap_or_default()
    ));
    let json = serde_json::to_string_pretty(machine)
        .map_err(|e| Error::Config(format!("sidecar serialization failed: {e}")))?;
    std::fs::write(sidecar, json)?;
    Ok(())
}

fn forest_point(
    n_estimators: &Option<usize>,
    max_depth: &Option<usize>,
    criterion: &Option<String>,
    file: &EngineConfig,
) -> Result<GridPoint> {
    let mut point = GridPoint::default();
    if let Some(n) = pick(n_estimators, &file.n_estimators) {
        point.n_estimators = n;
    }
    if let Some(d) = pick(max_depth, &file.max_depth) {
        point.max_depth = if d == 0 { None } else { Some(d) };
    }
    if let Some(c) = pick(criterion, &file.criterion) {
        point.criterion = parse_criterion(&c)?;
    }
    Ok(point)
}

fn cmd_train(args: &TrainArgs, file: &EngineConfig, seed: u64) -> Result<()> {
    let setup = load_pipeline(&args.pipeline, file)?;
    if setup.mode == SystemMode::RuleOnly {
        return Err(Error::Config(
            "the rule-only mode has no learned stage to train".into(),
        ));
    }
    let classifier = match pick(&args.classifier, &file.classifier) {
        Some(s) => parse_classifier(&s)?,
        None => ClassifierKind::Forest,
    };
    let mut opts = TrainOptions {
        mode: setup.mode,
        cluster_source: setup.cluster_source,
        detection: setup.detection,
        classifier,
        forest: forest_point(&args.n_estimators, &args.max_depth, &args.criterion, file)?,
        sieves: setup.sieves.clone(),
        merge_threshold: setup.resolver.merge_threshold,
        cv_folds: pick(&args.cv_folds, &file.cv_folds).unwrap_or(10),
        seed,
        ..TrainOptions::default()
    };
    let mut report = String::new();
    if args.grid {
        let (examples, layout, _) = crate::engine::build_examples(
            &setup.docs,
            &setup.lex,
            setup.embeddings.as_ref(),
            &opts,
        )?;
        let grid = grid_search(
            &examples,
            &layout.categorical_slots(),
            &GridSpec::default(),
            opts.cv_folds.max(2),
            seed,
        )?;
        opts.forest = grid.best;
        report.push_str(&render_grid_text(&grid));
        report.push('\n');
        if let Some(out) = &args.report_out {
            let grid_path = out.with_extension("grid.txt");
            write_with_sidecar(&grid_path, &render_grid_text(&grid), &grid)?;
        }
    }
    let outcome = train_model(&setup.docs, &setup.lex, setup.embeddings.as_ref(), &opts)?;
    outcome.model.save(&args.model_out)?;
    report.push_str(&format!(
        "trained on {} documents, {} examples; model written to {}\n",
        outcome.n_documents,
        outcome.n_examples,
        args.model_out.display()
    ));
    if let Some(cv) = &outcome.cv {
        report.push_str(&render_cv_text(cv));
    }
    print!("{report}");
    if let Some(out) = &args.report_out {
        #[derive(Serialize)]
        struct MachineReport<'a> {
            n_documents: usize,
            n_examples: usize,
            forest: &'a GridPoint,
            cv: &'a Option<crate::learner::cv::CvReport>,
        }
        write_with_sidecar(
            out,
            &report,
            &MachineReport {
                n_documents: outcome.n_documents,
                n_examples: outcome.n_examples,
                forest: &opts.forest,
                cv: &outcome.cv,
            },
        )?;
    }
    Ok(())
}

fn cmd_resolve(args: &ResolveArgs, file: &EngineConfig, _seed: u64) -> Result<()> {
    let setup = load_pipeline(&args.pipeline, file)?;
    let model = match pick(&args.model, &file.model) {
        Some(p) => Some(SavedModel::load(&p)?),
        None => None,
    };
    if let Some(m) = &model {
        if setup.mode == SystemMode::RuleOnly {
            return Err(Error::Config(
                "--model conflicts with rule-only mode; drop one of them".into(),
            ));
        }
        check_model_compatibility(m, setup.mode, setup.embeddings.as_ref())?;
    }
    let resolved = resolve_corpus(
        &setup.docs,
        model.as_ref(),
        &setup.lex,
        setup.embeddings.as_ref(),
        &setup.sieves,
        &setup.resolver,
        setup.detection,
    )?;
    let dump = render_dump(&dump_records(&setup.docs, &resolved));
    match &args.out {
        Some(path) => std::fs::write(path, dump)?,
        None => print!("{dump}"),
    }
    Ok(())
}

fn cmd_eval(args: &EvalArgs, file: &EngineConfig) -> Result<()> {
    let setup = load_pipeline(&args.pipeline, file)?;
    let records = parse_dump(&std::fs::read_to_string(&args.predictions)?)?;
    let policy = match pick(&args.policy, &file.policy) {
        Some(s) => parse_policy(&s)?,
        None => EvalPolicy::GoldAnaphoricOnly,
    };
    let report = eval_dump(&records, &setup.docs, policy)?;
    let text = render_eval_text(&report);
    print!("{text}");
    if let Some(out) = &args.out {
        write_with_sidecar(out, &text, &report)?;
    }
    Ok(())
}

fn cmd_gridsearch(args: &GridsearchArgs, file: &EngineConfig, seed: u64) -> Result<()> {
    let setup = load_pipeline(&args.pipeline, file)?;
    let opts = TrainOptions {
        mode: setup.mode,
        cluster_source: setup.cluster_source,
        detection: setup.detection,
        sieves: setup.sieves.clone(),
        seed,
        ..TrainOptions::default()
    };
    let (examples, layout, _) = crate::engine::build_examples(
        &setup.docs,
        &setup.lex,
        setup.embeddings.as_ref(),
        &opts,
    )?;
    let folds = pick(&args.cv_folds, &file.cv_folds).unwrap_or(10);
    let grid = grid_search(
        &examples,
        &layout.categorical_slots(),
        &GridSpec::default(),
        folds,
        seed,
    )?;
    let text = render_grid_text(&grid);
    print!("{text}");
    write_with_sidecar(&args.out, &text, &grid)?;
    Ok(())
}

fn cmd_ablate(args: &AblateArgs, file: &EngineConfig, seed: u64) -> Result<()> {
    let setup = load_pipeline(&args.pipeline, file)?;
    let (train, test): (Vec<Document>, Vec<Document>) = match &args.test_corpus {
        Some(p) => (setup.docs.clone(), read_corpus(p)?),
        None => {
            let cut = (setup.docs.len() * 3) / 4;
            if cut == 0 || cut == setup.docs.len() {
                return Err(Error::Config(format!(
                    "corpus of {} documents cannot be split 3:1; pass --test-corpus",
                    setup.docs.len()
                )));
            }
            let (a, b) = setup.docs.split_at(cut);
            (a.to_vec(), b.to_vec())
        }
    };
    let mut cfg = AblationConfig {
        resolver: setup.resolver.clone(),
        ..AblationConfig::default()
    };
    if let Some(n) = pick(&args.n_estimators, &file.n_estimators) {
        cfg.forest.n_estimators = n;
    }
    // The matrix has rows that need word vectors; without a real table,
    // synthesize a deterministic one covering the corpus vocabulary so the
    // full matrix stays runnable.
    let embeddings = match setup.embeddings {
        Some(t) => t,
        None => {
            log::info!("no embeddings table given; synthesizing one from the corpus");
            let mut all = train.clone();
            all.extend(test.iter().cloned());
            synthetic_embeddings(&all, 16, seed)?
        }
    };
    let rows = ablation_run(
        &standard_matrix(),
        &train,
        &test,
        &setup.lex,
        Some(&embeddings),
        &cfg,
        seed,
    )?;
    let text = render_ablation_text(&rows);
    print!("{text}");
    if let Some(out) = &args.out {
        write_with_sidecar(out, &text, &rows)?;
    }
    Ok(())
}

fn cmd_gen(args: &GenArgs, seed: u64) -> Result<()> {
    let mut spec = SynthSpec::default();
    if let Some(v) = args.entities {
        spec.entities = v;
    }
    if let Some(v) = args.mentions_per_entity {
        spec.mentions_per_entity = v;
    }
    if let Some(v) = args.pronoun_rate {
        spec.pronoun_rate = v;
    }
    if let Some(v) = args.sentence_len_min {
        spec.sentence_len_bounds.0 = v;
    }
    if let Some(v) = args.sentence_len_max {
        spec.sentence_len_bounds.1 = v;
    }
    if let Some(v) = args.distractor_rate {
        spec.distractor_rate = v;
    }
    if let Some(v) = args.quote_rate {
        spec.quote_rate = v;
    }
    if let Some(v) = args.max_chain_gap {
        spec.max_chain_gap = v;
    }
    let (docs, stats) = gen_corpus(&spec, args.docs, seed)?;
    write_corpus(&args.out, &docs)?;
    let text = format!(
        "wrote {} documents ({} sentences, {} tokens, {} pronouns, {} chains, {} gold mentions) to {}\n",
        stats.documents,
        stats.sentences,
        stats.tokens,
        stats.pronouns,
        stats.chains,
        stats.gold_mentions,
        args.out.display()
    );
    print!("{text}");
    write_with_sidecar(&args.out.with_extension("stats.txt"), &text, &stats)?;
    Ok(())
}

/// Runs one parsed invocation. Exposed for integration tests.
pub fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        // Ignore "already initialized": tests may run several commands in
        // one process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let file = match &cli.config {
        Some(p) => EngineConfig::load(p)?,
        None => EngineConfig::default(),
    };
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    match &cli.command {
        Command::Train(a) => cmd_train(a, &file, seed),
        Command::Resolve(a) => cmd_resolve(a, &file, seed),
        Command::Eval(a) => cmd_eval(a, &file),
        Command::Gridsearch(a) => cmd_gridsearch(a, &file, seed),
        Command::Ablate(a) => cmd_ablate(a, &file, seed),
        Command::Gen(a) => cmd_gen(a, seed),
    }
}

/// Process entry point: parse, run, exit nonzero on any error.
pub fn main_entry() -> std::process::ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::FAILURE
        }
    }
}
