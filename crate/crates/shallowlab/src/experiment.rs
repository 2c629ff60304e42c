//! End-to-end protocol: split, train both models, evaluate three ways.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde_json::json;
use shallowlab_core::corpus::{split_corpus, Corpus, TagSet};
use shallowlab_core::crf::CrfModel;
use shallowlab_core::eval::{self, ConfusionMatrix, EvalReport};
use shallowlab_core::pipeline::{self, ShallowParser};
use shallowlab_core::tokenizer::Tokenizer;

use crate::config::{ExperimentConfig, RunConfig};
use crate::{io, model_file, report};

#[derive(Debug, thiserror::Error)]
#[error("stage `{stage}`: {message}")]
pub struct ExperimentError {
    pub stage: &'static str,
    pub message: String,
}

fn at<E: std::fmt::Display>(stage: &'static str) -> impl Fn(E) -> ExperimentError {
    move |e| ExperimentError {
        stage,
        message: e.to_string(),
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub train_sentences: usize,
    pub test_sentences: usize,
    pub pos_model: CrfModel,
    pub chunk_model: CrfModel,
    pub pos: EvalReport,
    pub confusion: ConfusionMatrix,
    /// Chunker fed gold POS tags.
    pub gold_pos_chunks: EvalReport,
    /// Chunker fed the tagger's output.
    pub pipeline_chunks: EvalReport,
    /// Pipeline chunks that also carry the gold POS tags.
    pub joint: EvalReport,
    pub run: RunConfig,
}

/// Runs the protocol on an already loaded corpus. The test split is
/// evaluated on its gold tokenization.
pub fn run_on_corpus(corpus: &Corpus, cfg: &ExperimentConfig, tokenizer: Tokenizer) -> Result<ExperimentResult, ExperimentError> {
    let (train, test) = split_corpus(corpus, cfg.train_count).map_err(at("split"))?;

    let mut pos_model = pipeline::train_pos_model(&train, &cfg.pos_template, &cfg.train).map_err(at("train-pos"))?;
    let mut chunk_model =
        pipeline::train_chunk_model(&train, &cfg.chunk_template, &cfg.train).map_err(at("train-chunk"))?;
    for (model, task) in [(&mut pos_model, "pos"), (&mut chunk_model, "chunk")] {
        let mut run = cfg.run.clone();
        run.push("task", task);
        model.metadata.run_config = run.render();
    }

    let parser = ShallowParser::new(
        tokenizer,
        pos_model.clone(),
        chunk_model.clone(),
        corpus.pos_tagset().clone(),
        corpus.chunk_tagset().clone(),
    )
    .map_err(at("assemble"))?;

    let gold_pos = parser.annotate_corpus(&test, true).map_err(at("chunk-gold-pos"))?;
    let predicted = parser.annotate_corpus(&test, false).map_err(at("pipeline"))?;
    let (pos, confusion) = eval::eval_pos(&test, &predicted).map_err(at("eval-pos"))?;
    let gold_pos_chunks = eval::eval_chunks(&test, &gold_pos).map_err(at("eval-chunk"))?;
    let pipeline_chunks = eval::eval_chunks(&test, &predicted).map_err(at("eval-pipeline"))?;
    let joint = eval::eval_shallow_parse(&test, &predicted).map_err(at("eval-pipeline"))?;

    Ok(ExperimentResult {
        train_sentences: train.len(),
        test_sentences: test.len(),
        pos_model,
        chunk_model,
        pos,
        confusion,
        gold_pos_chunks,
        pipeline_chunks,
        joint,
        run: cfg.run.clone(),
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    let pos_tagset = io::read_tagset(cfg.pos_tagset.as_deref(), TagSet::ilmt_pos).map_err(at("load"))?;
    let chunk_tagset = io::read_tagset(cfg.chunk_tagset.as_deref(), TagSet::ilmt_chunk).map_err(at("load"))?;
    let tokenizer = match &cfg.abbreviations {
        Some(path) => Tokenizer::parse_abbreviations(&io::read_text(path).map_err(at("load"))?),
        None => Tokenizer::new(),
    };
    let corpus = io::read_corpus(&cfg.corpus, &pos_tagset, &chunk_tagset).map_err(at("load"))?;
    run_on_corpus(&corpus, cfg, tokenizer)
}

const TOP_CONFUSIONS: usize = 10;

impl ExperimentResult {
    pub fn report_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "train sentences\t{}\ntest sentences\t{}\n", self.train_sentences, self.test_sentences).unwrap();
        writeln!(out, "{:<32} {:>7} {:>7} {:>7}", "Model", "P", "R", "F1").unwrap();
        for (name, r) in [
            ("POS Tagging", &self.pos),
            ("Chunking (gold POS)", &self.gold_pos_chunks),
            ("Shallow Parsing (predicted POS)", &self.pipeline_chunks),
        ] {
            writeln!(out, "{name:<32} {:>7.4} {:>7.4} {:>7.4}", r.precision, r.recall, r.f1).unwrap();
        }
        writeln!(out).unwrap();
        writeln!(out, "POS rows are macro-averaged over labels; chunk rows are exact span+label matches, micro-averaged.").unwrap();
        writeln!(out, "POS accuracy\t{:.4}", self.pos.accuracy).unwrap();
        writeln!(
            out,
            "Shallow Parsing, chunk and POS joint\tP={:.4} R={:.4} F1={:.4}\n",
            self.joint.precision, self.joint.recall, self.joint.f1
        )
        .unwrap();
        out.push_str(&report::confusions_text(&eval::confusion_report(&self.confusion, TOP_CONFUSIONS)));
        out.push_str("\nconfig\n");
        out.push_str(&self.run.render());
        out
    }

    pub fn report_json(&self) -> String {
        let body = json!({
            "train_sentences": self.train_sentences,
            "test_sentences": self.test_sentences,
            "pos": report::eval_json(&self.pos),
            "chunk_gold_pos": report::eval_json(&self.gold_pos_chunks),
            "shallow_parse": report::eval_json(&self.pipeline_chunks),
            "shallow_parse_joint": report::eval_json(&self.joint),
            "pos_confusions": report::confusions_json(&eval::confusion_report(&self.confusion, TOP_CONFUSIONS)),
        });
        report::to_json_string(&report::document("experiment", &self.run, body))
    }

    /// Writes `pos.model`, `chunk.model`, `report.txt` and `report.json`
    /// into `dir`; returns the paths written.
    pub fn write(&self, dir: &std::path::Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let files = [
            ("pos.model", model_file::save_model(&self.pos_model)),
            ("chunk.model", model_file::save_model(&self.chunk_model)),
            ("report.txt", self.report_text().into_bytes()),
            ("report.json", self.report_json().into_bytes()),
        ];
        let mut written = Vec::new();
        for (name, bytes) in files {
            let path = dir.join(name);
            io::write_atomic(&path, &bytes)?;
            written.push(path);
        }
        Ok(written)
    }
}
