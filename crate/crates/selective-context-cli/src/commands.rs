//! The command-line surface and the four subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use selective_context::segmentation::{nfc, tokenize};
use selective_context::{
    bleu, compress, metric_tokens, random_compress, render_retained, rouge_l, rouge_n,
    score_and_merge, AbbreviationList, CompressionConfig, CompressionResult, NgramModel,
    RemoteConfig, RemoteProfile, RemoteScorer, ScorerBackend, ScoringMode, UniformScorer,
    UnitKind,
};

use crate::html::render_html;
use crate::ingest::{ingest, InputDocument, InputFormat};
use crate::report::{round_sig, Report};

/// Environment variable holding the bearer token for remote scorers.
pub const AUTH_TOKEN_VAR: &str = "SELECTIVE_CONTEXT_AUTH_TOKEN";

/// Compress prompts by dropping their most predictable parts.
#[derive(Parser)]
#[command(name = "selective-context", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Train an n-gram scoring model and write it to disk.
    TrainNgram(TrainNgramArgs),
    /// Drop low-information units from documents.
    Compress(CompressArgs),
    /// Score candidate texts against line-paired references.
    Evaluate(EvaluateArgs),
    /// Compress and render side-by-side HTML, whatever --format says.
    Visualize(CompressArgs),
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::TrainNgram(args) => run_train_ngram(&args),
        Command::Compress(args) => run_compress(&args, false),
        Command::Evaluate(args) => run_evaluate(&args),
        Command::Visualize(args) => run_compress(&args, true),
    }
}

#[derive(Args)]
pub struct TrainNgramArgs {
    /// Plain-text training corpus.
    pub corpus: PathBuf,
    /// Where to write the model file.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Context window length in tokens.
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    /// Add-k smoothing constant.
    #[arg(long, default_value_t = 0.1)]
    pub k: f64,
}

#[derive(Args)]
#[command(
    after_help = "Remote scorers send the SELECTIVE_CONTEXT_AUTH_TOKEN environment variable, \
                  when set, as a bearer token."
)]
pub struct CompressArgs {
    /// Input file.
    pub input: PathBuf,
    /// How to read the input file.
    #[arg(long, value_enum, default_value = "txt")]
    pub input_format: InputFormatArg,
    /// Scoring backend: ngram:<path>, remote:<url>, or uniform:<vocab-size>.
    #[arg(long)]
    pub scorer: String,
    /// Fraction of units to remove, 0 to 1.
    #[arg(long, default_value_t = 0.5)]
    pub ratio: f64,
    /// Deletion granularity.
    #[arg(long, value_enum, default_value = "phrase")]
    pub level: LevelArg,
    /// Scoring context: reset per sentence, or carried through the document.
    #[arg(long, value_enum, default_value = "sentence")]
    pub mode: ModeArg,
    /// Output rendering.
    #[arg(long, value_enum, default_value = "text")]
    pub format: FormatArg,
    /// Seed for the random baseline.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Replace informativeness filtering with seeded random deletion.
    #[arg(long, value_enum)]
    pub baseline: Option<BaselineArg>,
    /// Documents processed concurrently.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Extra abbreviations (one per line) protected from sentence splits.
    #[arg(long)]
    pub abbrev: Option<PathBuf>,
    /// Output file (single document) or directory (batch); stdout if absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Wire shape spoken by a remote: scorer.
    #[arg(long, value_enum, default_value = "native")]
    pub remote_profile: ProfileArg,
    /// Model name sent with the openai profile.
    #[arg(long)]
    pub remote_model: Option<String>,
}

#[derive(Args)]
pub struct EvaluateArgs {
    /// Candidate texts, one per line.
    pub candidates: PathBuf,
    /// Reference texts, line-paired with the candidates.
    pub references: PathBuf,
    /// Table rendering: text (TSV) or json.
    #[arg(long, value_enum, default_value = "text")]
    pub format: EvalFormatArg,
    /// Highest n-gram order for the precision score.
    #[arg(long, default_value_t = 4)]
    pub bleu_order: usize,
    /// Add-one smoothing for the higher-order precisions.
    #[arg(long)]
    pub smooth: bool,
    /// Output file; stdout if absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Token,
    Phrase,
    Sentence,
}

impl From<LevelArg> for UnitKind {
    fn from(level: LevelArg) -> UnitKind {
        match level {
            LevelArg::Token => UnitKind::Token,
            LevelArg::Phrase => UnitKind::Phrase,
            LevelArg::Sentence => UnitKind::Sentence,
        }
    }
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Sentence,
    Document,
}

impl From<ModeArg> for ScoringMode {
    fn from(mode: ModeArg) -> ScoringMode {
        match mode {
            ModeArg::Sentence => ScoringMode::PerSentence,
            ModeArg::Document => ScoringMode::WholeDocument,
        }
    }
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Json,
    Html,
}

impl FormatArg {
    fn extension(self) -> &'static str {
        match self {
            FormatArg::Text => "txt",
            FormatArg::Json => "json",
            FormatArg::Html => "html",
        }
    }
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum EvalFormatArg {
    Text,
    Json,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum InputFormatArg {
    Txt,
    Jsonl,
    ConvoJson,
}

impl From<InputFormatArg> for InputFormat {
    fn from(format: InputFormatArg) -> InputFormat {
        match format {
            InputFormatArg::Txt => InputFormat::Txt,
            InputFormatArg::Jsonl => InputFormat::Jsonl,
            InputFormatArg::ConvoJson => InputFormat::ConvoJson,
        }
    }
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Native,
    Openai,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum BaselineArg {
    Random,
}

pub fn run_train_ngram(args: &TrainNgramArgs) -> Result<()> {
    let raw = fs::read_to_string(&args.corpus)
        .with_context(|| format!("reading corpus {}", args.corpus.display()))?;
    let text = nfc(&raw);
    let spans = tokenize(&text);
    let tokens: Vec<&str> = spans.iter().map(|s| s.slice(&text)).collect();
    let model = NgramModel::train(&tokens, args.order, args.k)?;

    let mut bytes = Vec::new();
    model.save_to(&mut bytes)?;
    write_atomic(&args.output, &bytes)?;
    println!(
        "trained order-{} model: {} vocabulary entries from {} corpus tokens -> {}",
        args.order,
        model.vocab_size(),
        tokens.len(),
        args.output.display()
    );
    Ok(())
}

/// Builds the scoring backend named by `--scorer`.
pub fn build_backend(args: &CompressArgs) -> Result<Box<dyn ScorerBackend>> {
    let (kind, value) = args.scorer.split_once(':').ok_or_else(|| {
        anyhow!(
            "scorer {:?} is not of the form ngram:<path>, remote:<url>, or uniform:<vocab-size>",
            args.scorer
        )
    })?;
    match kind {
        "ngram" => {
            let model = NgramModel::load(value)
                .with_context(|| format!("loading n-gram model {value}"))?;
            Ok(Box::new(model))
        }
        "remote" => {
            let mut config = RemoteConfig::new(value);
            config.auth_token = std::env::var(AUTH_TOKEN_VAR)
                .ok()
                .filter(|token| !token.is_empty());
            config.profile = match args.remote_profile {
                ProfileArg::Native => RemoteProfile::Native,
                ProfileArg::Openai => RemoteProfile::OpenAi {
                    model: args.remote_model.clone().ok_or_else(|| {
                        anyhow!("--remote-model is required with --remote-profile openai")
                    })?,
                },
            };
            Ok(Box::new(RemoteScorer::new(config)?))
        }
        "uniform" => {
            let vocab: u64 = value
                .parse()
                .with_context(|| format!("uniform scorer vocabulary size {value:?}"))?;
            Ok(Box::new(UniformScorer::new(vocab)?))
        }
        other => bail!("unknown scorer kind {other:?}; expected ngram, remote, or uniform"),
    }
}

pub fn run_compress(args: &CompressArgs, force_html: bool) -> Result<()> {
    if !(0.0..=1.0).contains(&args.ratio) {
        bail!("--ratio must be within [0, 1], got {}", args.ratio);
    }
    let format = if force_html { FormatArg::Html } else { args.format };
    let abbreviations = match &args.abbrev {
        Some(path) => AbbreviationList::from_file(path)
            .with_context(|| format!("reading abbreviation list {}", path.display()))?,
        None => AbbreviationList::default(),
    };

    let documents = ingest(&args.input, args.input_format.into())?;
    if documents.is_empty() {
        return Ok(());
    }
    let backend = build_backend(args)?;
    let config = CompressionConfig {
        ratio: args.ratio,
        level: args.level.into(),
        mode: args.mode.into(),
        seed: args.seed,
        abbreviations,
    };
    let random_baseline = args.baseline == Some(BaselineArg::Random);

    let outcomes = process_documents(
        &documents,
        backend.as_ref(),
        &config,
        random_baseline,
        format,
        args.jobs,
    );

    let destination = resolve_destination(args.output.as_deref(), documents.len())?;
    let mut failures = 0usize;
    for (document, outcome) in documents.iter().zip(outcomes) {
        match outcome {
            Ok(content) => emit(&destination, document, &content, format)?,
            Err(error) => {
                failures += 1;
                eprintln!("error: {}: {error:#}", document.id);
            }
        }
    }
    if failures > 0 {
        bail!("{failures} of {} documents failed", documents.len());
    }
    Ok(())
}

fn process_documents(
    documents: &[InputDocument],
    backend: &dyn ScorerBackend,
    config: &CompressionConfig,
    random_baseline: bool,
    format: FormatArg,
    jobs: usize,
) -> Vec<Result<String>> {
    let workers = jobs.clamp(1, documents.len());
    if workers == 1 {
        return documents
            .iter()
            .map(|doc| compress_document(doc, backend, config, random_baseline, format))
            .collect();
    }

    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<String>>>> =
        (0..documents.len()).map(|_| Mutex::new(None)).collect();
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= documents.len() {
                    break;
                }
                let outcome =
                    compress_document(&documents[i], backend, config, random_baseline, format);
                *slots[i].lock().unwrap() = Some(outcome);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("every slot filled"))
        .collect()
}

fn compress_document(
    document: &InputDocument,
    backend: &dyn ScorerBackend,
    config: &CompressionConfig,
    random_baseline: bool,
    format: FormatArg,
) -> Result<String> {
    let text = document.compressible();
    let appended = document.appended();

    let result = if tokenize(&nfc(&text)).is_empty() {
        if appended.is_none() {
            bail!("document contains no tokens");
        }
        // A conversation that is all query: nothing to compress, nothing
        // removed.
        CompressionResult {
            retained: Vec::new(),
            removed: Vec::new(),
            threshold: None,
            requested_ratio: config.ratio,
            achieved_unit_ratio: 0.0,
            achieved_token_ratio: 0.0,
        }
    } else if random_baseline {
        let units = score_and_merge(&text, backend, config)?;
        random_compress(units, config.ratio, config.seed)?
    } else {
        compress(&text, backend, config)?
    };

    Ok(match format {
        FormatArg::Text => {
            let mut out = render_retained(&result);
            if let Some(turn) = &appended {
                if !out.is_empty() {
                    out.push('\n');
                }
                out.push_str(turn);
            }
            out
        }
        FormatArg::Json => {
            Report::new(&document.id, &result, config.level, appended.as_deref()).to_json()
        }
        FormatArg::Html => render_html(&document.id, &result, appended.as_deref()),
    })
}

enum Destination {
    Stdout,
    File(PathBuf),
    Directory(PathBuf),
}

fn resolve_destination(output: Option<&Path>, batch_size: usize) -> Result<Destination> {
    match output {
        None => Ok(Destination::Stdout),
        Some(path) if batch_size > 1 || path.is_dir() => {
            fs::create_dir_all(path)
                .with_context(|| format!("creating output directory {}", path.display()))?;
            Ok(Destination::Directory(path.to_path_buf()))
        }
        Some(path) => Ok(Destination::File(path.to_path_buf())),
    }
}

fn emit(
    destination: &Destination,
    document: &InputDocument,
    content: &str,
    format: FormatArg,
) -> Result<()> {
    match destination {
        Destination::Stdout => {
            println!("{content}");
            Ok(())
        }
        Destination::File(path) => write_atomic(path, content.as_bytes()),
        Destination::Directory(dir) => {
            let name = format!("{}.{}", safe_file_name(&document.id), format.extension());
            write_atomic(&dir.join(name), content.as_bytes())
        }
    }
}

fn safe_file_name(id: &str) -> String {
    let mapped: String = id
        .chars()
        .map(|ch| {
            if ch.is_ascii_alphanumeric() || matches!(ch, '.' | '-' | '_') {
                ch
            } else {
                '-'
            }
        })
        .collect();
    let trimmed = mapped.trim_matches('.');
    if trimmed.is_empty() {
        "document".to_string()
    } else {
        trimmed.to_string()
    }
}

static TEMP_COUNTER: AtomicUsize = AtomicUsize::new(0);

/// Writes via a temporary file in the target directory plus a rename, so a
/// crash never leaves a half-written output in place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let parent = match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => parent,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".to_string());
    let tmp = parent.join(format!(
        ".{}.{}.{}.tmp",
        name,
        std::process::id(),
        TEMP_COUNTER.fetch_add(1, Ordering::SeqCst)
    ));
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    if let Err(error) = fs::rename(&tmp, path) {
        let _ = fs::remove_file(&tmp);
        return Err(error).with_context(|| format!("renaming into {}", path.display()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Serialize)]
struct PairScores {
    pair: usize,
    bleu: f64,
    rouge1_f1: f64,
    rouge2_f1: f64,
    rouge_l_f1: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
struct MeanScores {
    bleu: f64,
    rouge1_f1: f64,
    rouge2_f1: f64,
    rouge_l_f1: f64,
}

#[derive(Debug, Clone, Serialize)]
struct Evaluation {
    pairs: Vec<PairScores>,
    mean: MeanScores,
}

fn evaluate_pairs(
    candidates: &[String],
    references: &[String],
    bleu_order: usize,
    smooth: bool,
) -> Result<Evaluation> {
    let mut pairs = Vec::with_capacity(candidates.len());
    for (index, (candidate, reference)) in candidates.iter().zip(references).enumerate() {
        let candidate_tokens = metric_tokens(candidate);
        let reference_tokens = metric_tokens(reference);
        let c: Vec<&str> = candidate_tokens.iter().map(String::as_str).collect();
        let r: Vec<&str> = reference_tokens.iter().map(String::as_str).collect();
        pairs.push(PairScores {
            pair: index + 1,
            bleu: round_sig(bleu(&c, &[&r], bleu_order, smooth)?, 6),
            rouge1_f1: round_sig(rouge_n(&c, &r, 1)?.f1, 6),
            rouge2_f1: round_sig(rouge_n(&c, &r, 2)?.f1, 6),
            rouge_l_f1: round_sig(rouge_l(&c, &r).f1, 6),
        });
    }

    let n = pairs.len() as f64;
    let mean = MeanScores {
        bleu: round_sig(pairs.iter().map(|p| p.bleu).sum::<f64>() / n, 6),
        rouge1_f1: round_sig(pairs.iter().map(|p| p.rouge1_f1).sum::<f64>() / n, 6),
        rouge2_f1: round_sig(pairs.iter().map(|p| p.rouge2_f1).sum::<f64>() / n, 6),
        rouge_l_f1: round_sig(pairs.iter().map(|p| p.rouge_l_f1).sum::<f64>() / n, 6),
    };
    Ok(Evaluation { pairs, mean })
}

fn render_tsv(evaluation: &Evaluation) -> String {
    let mut out = String::from("pair\tbleu\trouge1_f1\trouge2_f1\trouge_l_f1\n");
    for row in &evaluation.pairs {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            row.pair, row.bleu, row.rouge1_f1, row.rouge2_f1, row.rouge_l_f1
        ));
    }
    let mean = &evaluation.mean;
    out.push_str(&format!(
        "mean\t{}\t{}\t{}\t{}\n",
        mean.bleu, mean.rouge1_f1, mean.rouge2_f1, mean.rouge_l_f1
    ));
    out
}

pub fn run_evaluate(args: &EvaluateArgs) -> Result<()> {
    let candidates = read_lines(&args.candidates)?;
    let references = read_lines(&args.references)?;
    if candidates.len() != references.len() {
        bail!(
            "{} has {} lines but {} has {}",
            args.candidates.display(),
            candidates.len(),
            args.references.display(),
            references.len()
        );
    }
    if candidates.is_empty() {
        bail!("no pairs to evaluate in {}", args.candidates.display());
    }

    let evaluation = evaluate_pairs(&candidates, &references, args.bleu_order, args.smooth)?;
    let rendered = match args.format {
        EvalFormatArg::Text => render_tsv(&evaluation),
        EvalFormatArg::Json => {
            let mut json = serde_json::to_string(&evaluation).expect("evaluation serializes");
            json.push('\n');
            json
        }
    };
    match &args.output {
        Some(path) => write_atomic(path, rendered.as_bytes()),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let content =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(content.lines().map(str::to_string).collect())
}
