//! Text and JSON renderings of evaluation results.
//!
//! Every JSON document carries `schema_version` (currently 1), a `kind`
//! and the resolved `config` it was produced with; `docs/report-schema.md`
//! lists the fields.

use std::fmt::Write as _;

use serde_json::{json, Value};
use shallowlab_core::corpus::CorpusStats;
use shallowlab_core::eval::{AgreementReport, EvalReport, Prf};

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

fn prf_json(prf: &Prf) -> Value {
    json!({ "precision": prf.precision, "recall": prf.recall, "f1": prf.f1 })
}

pub fn eval_json(report: &EvalReport) -> Value {
    let per_label: serde_json::Map<String, Value> = report
        .per_label
        .iter()
        .map(|(label, s)| {
            (
                label.clone(),
                json!({
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                    "support": s.support,
                    "predicted": s.predicted,
                    "correct": s.correct,
                    "zero_division": s.zero_division,
                }),
            )
        })
        .collect();
    json!({
        "averaging": report.averaging.as_str(),
        "precision": report.precision,
        "recall": report.recall,
        "f1": report.f1,
        "accuracy": report.accuracy,
        "micro": prf_json(&report.micro),
        "macro": prf_json(&report.macro_avg),
        "total": report.total,
        "per_label": per_label,
    })
}

pub fn document(kind: &str, config: &RunConfig, body: Value) -> Value {
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "config": config.to_json(),
    });
    if let (Value::Object(doc), Value::Object(body)) = (&mut doc, body) {
        doc.extend(body);
    }
    doc
}

pub fn to_json_string(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    text
}

pub fn confusions_json(confusions: &[(String, String, usize)]) -> Value {
    Value::Array(
        confusions
            .iter()
            .map(|(g, p, n)| json!({ "gold": g, "predicted": p, "count": n }))
            .collect(),
    )
}

pub fn eval_text(title: &str, report: &EvalReport) -> String {
    let mut out = String::new();
    writeln!(out, "{title}").unwrap();
    writeln!(
        out,
        "{} P={:.4} R={:.4} F1={:.4}  accuracy={:.4}  micro F1={:.4}  total={}",
        report.averaging.as_str(),
        report.precision,
        report.recall,
        report.f1,
        report.accuracy,
        report.micro.f1,
        report.total
    )
    .unwrap();
    writeln!(out, "{:<12} {:>7} {:>7} {:>7} {:>8} {:>9}", "label", "P", "R", "F1", "support", "predicted").unwrap();
    for (label, s) in &report.per_label {
        let flag = if s.zero_division { " *" } else { "" };
        writeln!(
            out,
            "{:<12} {:>7.4} {:>7.4} {:>7.4} {:>8} {:>9}{flag}",
            label, s.precision, s.recall, s.f1, s.support, s.predicted
        )
        .unwrap();
    }
    if report.per_label.values().any(|s| s.zero_division) {
        out.push_str("* zero denominator, reported as 0\n");
    }
    out
}

pub fn confusions_text(confusions: &[(String, String, usize)]) -> String {
    let mut out = String::from("top confusions (gold -> predicted)\n");
    if confusions.is_empty() {
        out.push_str("  none\n");
    }
    for (g, p, n) in confusions {
        writeln!(out, "  {g} -> {p}\t{n}").unwrap();
    }
    out
}

pub fn kappa_json(report: &AgreementReport) -> Value {
    json!({
        "kappa": report.kappa,
        "observed_agreement": report.observed_agreement,
        "expected_agreement": report.expected_agreement,
        "raters": report.raters,
        "items": report.items,
        "categories": report.categories,
    })
}

pub fn kappa_text(report: &AgreementReport) -> String {
    format!(
        "kappa\t{:.6}\nobserved_agreement\t{:.6}\nexpected_agreement\t{:.6}\nraters\t{}\nitems\t{}\ncategories\t{}\n",
        report.kappa,
        report.observed_agreement,
        report.expected_agreement,
        report.raters,
        report.items,
        report.categories
    )
}

pub fn stats_json(stats: &CorpusStats) -> Value {
    json!({
        "sentences": stats.sentences,
        "tokens": stats.tokens,
        "chunks": stats.chunks,
        "untagged_tokens": stats.untagged_tokens,
        "unchunked_tokens": stats.unchunked_tokens,
        "pos_counts": stats.pos_counts,
        "chunk_counts": stats.chunk_counts,
    })
}

pub fn stats_text(stats: &CorpusStats) -> String {
    let mut out = format!(
        "sentences\t{}\ntokens\t{}\nchunks\t{}\nuntagged_tokens\t{}\nunchunked_tokens\t{}\n",
        stats.sentences, stats.tokens, stats.chunks, stats.untagged_tokens, stats.unchunked_tokens
    );
    for (label, n) in &stats.pos_counts {
        writeln!(out, "pos\t{label}\t{n}").unwrap();
    }
    for (label, n) in &stats.chunk_counts {
        writeln!(out, "chunk\t{label}\t{n}").unwrap();
    }
    out
}
