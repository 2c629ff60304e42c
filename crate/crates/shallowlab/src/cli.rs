//! The `shallowlab` command line.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data or model
//! error. Output files are written atomically; stdout is used when
//! `--output` is omitted.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use shallowlab_core::corpus::{corpus_stats, Corpus, Sentence, TagSet};
use shallowlab_core::crf::{CrfModel, TrainConfig};
use shallowlab_core::eval;
use shallowlab_core::features::{ChunkTemplateConfig, PosTemplateConfig};
use shallowlab_core::pipeline::{self, ShallowParser};
use shallowlab_core::tokenizer::Tokenizer;

use crate::config::{ExperimentConfig, RunConfig};
use crate::{experiment, io, model_file, report, ssf};

#[derive(Debug, Parser)]
#[command(name = "shallowlab", version, about = "CRF-based tokenizer, POS tagger and chunker")]
struct Cli {
    /// POS tagset file, one label per line (default: bundled ILMT list)
    #[arg(long, global = true, value_name = "FILE")]
    pos_tagset: Option<PathBuf>,
    /// Chunk tagset file (default: bundled ILMT list)
    #[arg(long, global = true, value_name = "FILE")]
    chunk_tagset: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Task {
    Pos,
    Chunk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalTask {
    Pos,
    Chunk,
    /// Chunks scored together with the POS tags inside them
    ShallowParse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct TemplateArgs {
    #[arg(long, default_value_t = PosTemplateConfig::default().prefix_max)]
    prefix_max: usize,
    #[arg(long, default_value_t = PosTemplateConfig::default().suffix_max)]
    suffix_max: usize,
    /// Context window for the POS tagger
    #[arg(long, default_value_t = PosTemplateConfig::default().window)]
    window: usize,
    #[arg(long, default_value_t = ChunkTemplateConfig::default().word_window)]
    chunk_word_window: usize,
    #[arg(long, default_value_t = ChunkTemplateConfig::default().pos_window)]
    chunk_pos_window: usize,
}

#[derive(Debug, Args)]
struct TrainerArgs {
    /// Standard deviation of the Gaussian prior
    #[arg(long, default_value_t = TrainConfig::default().l2_sigma)]
    sigma: f64,
    #[arg(long, default_value_t = TrainConfig::default().max_iterations)]
    max_iterations: usize,
    #[arg(long, default_value_t = TrainConfig::default().convergence_tol)]
    tolerance: f64,
    #[arg(long, default_value_t = TrainConfig::default().feature_cutoff)]
    feature_cutoff: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split raw text into sentences and tokens, one sentence per line
    Tokenize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Abbreviation list, one per line
        #[arg(long)]
        abbrev: Option<PathBuf>,
    },
    /// Train a POS or chunk model from an SSF corpus
    Train {
        #[arg(long, value_enum)]
        task: Task,
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        template: TemplateArgs,
        #[command(flatten)]
        trainer: TrainerArgs,
    },
    /// Replace the POS tags of an SSF corpus with predicted ones
    Tag {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Predict chunks for an SSF corpus
    Chunk {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Use the POS column of the input as chunker features
        #[arg(long, conflicts_with = "pos_model", required_unless_present = "pos_model")]
        gold_pos: bool,
        /// Tag with this model first
        #[arg(long)]
        pos_model: Option<PathBuf>,
    },
    /// Tokenize, tag and chunk raw text into SSF
    Parse {
        #[arg(long)]
        pos_model: PathBuf,
        #[arg(long)]
        chunk_model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        abbrev: Option<PathBuf>,
    },
    /// Score predictions against gold annotation
    Eval {
        #[arg(long, value_enum)]
        task: EvalTask,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        report: ReportFormat,
        /// Score chunks per token on BIO labels instead of by span
        #[arg(long)]
        bio_tokens: bool,
        /// Number of POS confusions listed
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        top_k: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fleiss' kappa over a TSV of ratings (items × raters)
    Kappa {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        report: ReportFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sentence, token, chunk and label counts of an SSF corpus
    Stats {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        report: ReportFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the split/train/evaluate protocol from a config file
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

fn data<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

fn in_file<E: std::fmt::Display>(path: &Path) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_output(args, &mut std::io::stdout().lock())
}

/// Like [`run`], with standard output redirected to `stdout`.
pub fn run_with_output<I, T>(args: I, stdout: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return 0;
            }
            let rendered = e.render().to_string();
            eprint!("{rendered}");
            if !rendered.contains("Usage:") {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            return 1;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let msg = match &e {
                CliError::Usage(m) | CliError::Data(m) => m,
            };
            eprintln!("error: {msg}");
            e.exit_code()
        }
    }
}

fn emit(stdout: &mut dyn std::io::Write, output: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match output {
        Some(path) => io::write_atomic(path, bytes).map_err(in_file(path)),
        None => stdout.write_all(bytes).map_err(data),
    }
}

fn load_model(path: &Path) -> Result<CrfModel, CliError> {
    model_file::read_model(path).map_err(in_file(path))
}

fn load_tokenizer(abbrev: Option<&Path>) -> Result<Tokenizer, CliError> {
    Ok(match abbrev {
        Some(path) => Tokenizer::parse_abbreviations(&io::read_text(path).map_err(data)?),
        None => Tokenizer::new(),
    })
}

fn display(path: Option<&Path>) -> String {
    path.map_or_else(|| "bundled".to_string(), |p| p.display().to_string())
}

fn execute(cli: Cli, stdout: &mut dyn std::io::Write) -> Result<(), CliError> {
    let pos_tagset = io::read_tagset(cli.pos_tagset.as_deref(), TagSet::ilmt_pos).map_err(data)?;
    let chunk_tagset = io::read_tagset(cli.chunk_tagset.as_deref(), TagSet::ilmt_chunk).map_err(data)?;
    let read_corpus = |path: &Path| io::read_corpus(path, &pos_tagset, &chunk_tagset).map_err(data);

    match cli.command {
        Command::Tokenize { input, output, abbrev } => {
            let tokenizer = load_tokenizer(abbrev.as_deref())?;
            let bytes = std::fs::read(&input).map_err(in_file(&input))?;
            let sentences = tokenizer.tokenize_bytes(&bytes).map_err(in_file(&input))?;
            let text: String = sentences.iter().map(|s| format!("{}\n", s.join())).collect();
            emit(stdout, output.as_deref(), text.as_bytes())
        }
        Command::Train {
            task,
            train,
            model,
            template,
            trainer,
        } => {
            let corpus = read_corpus(&train)?;
            let pos_template = PosTemplateConfig {
                prefix_max: template.prefix_max,
                suffix_max: template.suffix_max,
                window: template.window,
            };
            let chunk_template = ChunkTemplateConfig {
                word_window: template.chunk_word_window,
                pos_window: template.chunk_pos_window,
            };
            let train_cfg = TrainConfig {
                l2_sigma: trainer.sigma,
                max_iterations: trainer.max_iterations,
                convergence_tol: trainer.tolerance,
                feature_cutoff: trainer.feature_cutoff,
            };
            train_cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            let mut run = RunConfig::new("train");
            run.push("task", if task == Task::Pos { "pos" } else { "chunk" });
            run.push("train", train.display());
            run.push("pos_tagset", display(cli.pos_tagset.as_deref()));
            run.push("chunk_tagset", display(cli.chunk_tagset.as_deref()));
            run.push_templates(&pos_template, &chunk_template);
            run.push_train(&train_cfg);
            let mut trained = match task {
                Task::Pos => pipeline::train_pos_model(&corpus, &pos_template, &train_cfg),
                Task::Chunk => pipeline::train_chunk_model(&corpus, &chunk_template, &train_cfg),
            }
            .map_err(in_file(&train))?;
            trained.metadata.run_config = run.render();
            model_file::write_model(&model, &trained).map_err(in_file(&model))
        }
        Command::Tag { model, input, output } => {
            let model = load_model(&model)?;
            let corpus = read_corpus(&input)?;
            let sentences = corpus
                .sentences()
                .iter()
                .map(|s| {
                    let tags = pipeline::tag_pos(&model, &s.words())?;
                    let refs: Vec<&str> = tags.iter().map(String::as_str).collect();
                    Ok(s.with_pos_tags(&refs))
                })
                .collect::<Result<Vec<Sentence>, pipeline::PipelineError>>()
                .map_err(in_file(&input))?;
            write_corpus(stdout, output.as_deref(), &corpus, sentences)
        }
        Command::Chunk {
            model,
            input,
            output,
            gold_pos,
            pos_model,
        } => {
            let chunk_model = load_model(&model)?;
            let pos_model = pos_model.as_deref().map(load_model).transpose()?;
            let corpus = read_corpus(&input)?;
            let mut sentences = Vec::new();
            for s in corpus.sentences() {
                let tags: Vec<String> = match (&pos_model, gold_pos) {
                    (Some(m), false) => pipeline::tag_pos(m, &s.words()).map_err(in_file(&input))?,
                    _ => s
                        .pos_tags()
                        .ok_or_else(|| {
                            CliError::Data(format!(
                                "{}: sentence {} has untagged tokens; --gold-pos needs a full POS column",
                                input.display(),
                                s.id()
                            ))
                        })?
                        .into_iter()
                        .map(String::from)
                        .collect(),
                };
                let refs: Vec<&str> = tags.iter().map(String::as_str).collect();
                sentences.push(pipeline::chunk_sentence(&chunk_model, s, &refs).map_err(in_file(&input))?);
            }
            write_corpus(stdout, output.as_deref(), &corpus, sentences)
        }
        Command::Parse {
            pos_model,
            chunk_model,
            input,
            output,
            abbrev,
        } => {
            let parser = ShallowParser::new(
                load_tokenizer(abbrev.as_deref())?,
                load_model(&pos_model)?,
                load_model(&chunk_model)?,
                pos_tagset.clone(),
                chunk_tagset.clone(),
            )
            .map_err(data)?;
            let bytes = std::fs::read(&input).map_err(in_file(&input))?;
            let corpus = parser.parse_bytes(&bytes).map_err(in_file(&input))?;
            emit(stdout, output.as_deref(), ssf::serialize_ssf(&corpus).as_bytes())
        }
        Command::Eval {
            task,
            gold,
            pred,
            report: format,
            bio_tokens,
            top_k,
            output,
        } => {
            let gold_corpus = read_corpus(&gold)?;
            let pred_corpus = read_corpus(&pred)?;
            let mismatch = |e: eval::EvalError| CliError::Data(format!("{} vs {}: {e}", gold.display(), pred.display()));
            let mut run = RunConfig::new("eval");
            let task_name = match task {
                EvalTask::Pos => "pos",
                EvalTask::Chunk => "chunk",
                EvalTask::ShallowParse => "shallow-parse",
            };
            run.push("task", task_name);
            run.push("gold", gold.display());
            run.push("pred", pred.display());
            run.push("pos_tagset", display(cli.pos_tagset.as_deref()));
            run.push("chunk_tagset", display(cli.chunk_tagset.as_deref()));
            run.push("bio_tokens", bio_tokens);
            let (result, confusions) = match task {
                EvalTask::Pos => {
                    let (r, cm) = eval::eval_pos(&gold_corpus, &pred_corpus).map_err(mismatch)?;
                    run.push("top_k", top_k);
                    (r, Some(eval::confusion_report(&cm, top_k as usize)))
                }
                EvalTask::Chunk if bio_tokens => (eval::eval_bio_tokens(&gold_corpus, &pred_corpus).map_err(mismatch)?, None),
                EvalTask::Chunk => (eval::eval_chunks(&gold_corpus, &pred_corpus).map_err(mismatch)?, None),
                EvalTask::ShallowParse => (eval::eval_shallow_parse(&gold_corpus, &pred_corpus).map_err(mismatch)?, None),
            };
            let text = match format {
                ReportFormat::Json => {
                    let mut body = report::eval_json(&result);
                    if let (Some(c), serde_json::Value::Object(map)) = (&confusions, &mut body) {
                        map.insert("confusions".into(), report::confusions_json(c));
                    }
                    report::to_json_string(&report::document("eval", &run, body))
                }
                ReportFormat::Text => {
                    let mut text = report::eval_text(task_name, &result);
                    if let Some(c) = &confusions {
                        text.push_str(&report::confusions_text(c));
                    }
                    text
                }
            };
            emit(stdout, output.as_deref(), text.as_bytes())
        }
        Command::Kappa { input, report: format, output } => {
            let text = io::read_text(&input).map_err(data)?;
            let rows = io::parse_ratings(&text)
                .map_err(|(line, msg)| CliError::Data(format!("{}: line {line}: {msg}", input.display())))?;
            let agreement = eval::fleiss_kappa(&rows).map_err(in_file(&input))?;
            let mut run = RunConfig::new("kappa");
            run.push("input", input.display());
            let text = match format {
                ReportFormat::Json => report::to_json_string(&report::document("kappa", &run, report::kappa_json(&agreement))),
                ReportFormat::Text => report::kappa_text(&agreement),
            };
            emit(stdout, output.as_deref(), text.as_bytes())
        }
        Command::Stats { input, report: format, output } => {
            let stats = corpus_stats(&read_corpus(&input)?);
            let mut run = RunConfig::new("stats");
            run.push("input", input.display());
            run.push("pos_tagset", display(cli.pos_tagset.as_deref()));
            run.push("chunk_tagset", display(cli.chunk_tagset.as_deref()));
            let text = match format {
                ReportFormat::Json => report::to_json_string(&report::document("stats", &run, report::stats_json(&stats))),
                ReportFormat::Text => report::stats_text(&stats),
            };
            emit(stdout, output.as_deref(), text.as_bytes())
        }
        Command::Experiment { config } => {
            let text = io::read_text(&config).map_err(|e| CliError::Usage(e.to_string()))?;
            let base = config.parent().unwrap_or(Path::new("."));
            let cfg = ExperimentConfig::parse(&text, base)
                .map_err(|e| CliError::Usage(format!("{}: {e}", config.display())))?;
            let result = experiment::run_experiment(&cfg).map_err(data)?;
            result.write(&cfg.output_dir).map_err(in_file(&cfg.output_dir))?;
            emit(stdout, None, result.report_text().as_bytes())
        }
    }
}

fn write_corpus(
    stdout: &mut dyn std::io::Write,
    output: Option<&Path>,
    template: &Corpus,
    sentences: Vec<Sentence>,
) -> Result<(), CliError> {
    let corpus = template.with_sentences(sentences).map_err(data)?;
    emit(stdout, output, ssf::serialize_ssf(&corpus).as_bytes())
}
