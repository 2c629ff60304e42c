//! Scoring: token-level POS metrics with a confusion matrix, exact-match
//! chunk scoring, and Fleiss' kappa for annotator agreement.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::bio::chunks_to_bio;
use crate::corpus::{Corpus, Sentence};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("gold has {gold} sentences but prediction has {predicted}")]
    SentenceCountMismatch { gold: usize, predicted: usize },
    #[error("sentence {sentence_id}: token sequences differ")]
    TokenMismatch { sentence_id: u64 },
    #[error("sentence {sentence_id}: token {position} has no POS tag")]
    MissingTag { sentence_id: u64, position: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KappaError {
    #[error("no items to rate")]
    NoItems,
    #[error("need at least 2 raters, found {found}")]
    InsufficientRaters { found: usize },
    #[error("item {item} has {found} ratings, expected {expected}")]
    RaggedRow {
        item: usize,
        expected: usize,
        found: usize,
    },
    #[error("kappa undefined: expected agreement is 1 but raters disagree")]
    DegenerateCase,
}

/// How the headline precision/recall/F1 of a report were averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Averaging {
    Macro,
    Micro,
}

impl Averaging {
    pub fn as_str(&self) -> &'static str {
        match self {
            Averaging::Macro => "macro",
            Averaging::Micro => "micro",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    /// Counts to scores; a zero denominator yields 0.
    pub fn from_counts(correct: usize, predicted: usize, gold: usize) -> Prf {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(correct, predicted);
        let recall = ratio(correct, gold);
        Prf {
            precision,
            recall,
            f1: harmonic(precision, recall),
        }
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold occurrences.
    pub support: usize,
    pub predicted: usize,
    pub correct: usize,
    /// Precision or recall had a zero denominator and was reported as 0.
    pub zero_division: bool,
}

impl LabelScore {
    fn new(correct: usize, predicted: usize, support: usize) -> Self {
        let prf = Prf::from_counts(correct, predicted, support);
        LabelScore {
            precision: prf.precision,
            recall: prf.recall,
            f1: prf.f1,
            support,
            predicted,
            correct,
            zero_division: predicted == 0 || support == 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub averaging: Averaging,
    /// Headline scores, averaged per `averaging`.
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Token accuracy (POS tags, or BIO labels for chunk reports).
    pub accuracy: f64,
    pub micro: Prf,
    pub macro_avg: Prf,
    pub per_label: BTreeMap<String, LabelScore>,
    /// Number of scored units: tokens, or gold chunks for chunk reports.
    pub total: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub counts: BTreeMap<(String, String), usize>,
}

impl ConfusionMatrix {
    pub fn add(&mut self, gold: &str, predicted: &str) {
        *self
            .counts
            .entry((gold.to_string(), predicted.to_string()))
            .or_default() += 1;
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn row_sum(&self, gold: &str) -> usize {
        self.counts
            .iter()
            .filter(|((g, _), _)| g == gold)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn get(&self, gold: &str, predicted: &str) -> usize {
        self.counts
            .get(&(gold.to_string(), predicted.to_string()))
            .copied()
            .unwrap_or(0)
    }
}

fn aligned<'a>(gold: &'a Corpus, predicted: &'a Corpus) -> Result<Vec<(&'a Sentence, &'a Sentence)>, EvalError> {
    if gold.len() != predicted.len() {
        return Err(EvalError::SentenceCountMismatch {
            gold: gold.len(),
            predicted: predicted.len(),
        });
    }
    gold.sentences()
        .iter()
        .zip(predicted.sentences())
        .map(|(g, p)| {
            if g.words() == p.words() {
                Ok((g, p))
            } else {
                Err(EvalError::TokenMismatch { sentence_id: g.id() })
            }
        })
        .collect()
}

fn tags(sentence: &Sentence) -> Result<Vec<&str>, EvalError> {
    sentence
        .tokens()
        .enumerate()
        .map(|(position, token)| {
            token.pos().ok_or(EvalError::MissingTag {
                sentence_id: sentence.id(),
                position,
            })
        })
        .collect()
}

/// Per-token label scoring, macro-averaged over labels that occur in gold
/// or prediction.
pub fn score_token_labels<'a, I>(pairs: I) -> (EvalReport, ConfusionMatrix)
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    let mut cm = ConfusionMatrix::default();
    let mut counts: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();
    let (mut total, mut matches) = (0, 0);
    for (gold, predicted) in pairs {
        cm.add(gold, predicted);
        total += 1;
        counts.entry(gold).or_default().2 += 1;
        counts.entry(predicted).or_default().1 += 1;
        if gold == predicted {
            matches += 1;
            counts.entry(gold).or_default().0 += 1;
        }
    }
    let per_label: BTreeMap<String, LabelScore> = counts
        .into_iter()
        .map(|(label, (correct, predicted, support))| {
            (label.to_string(), LabelScore::new(correct, predicted, support))
        })
        .collect();
    let macro_avg = macro_average(&per_label);
    let accuracy = if total == 0 { 0.0 } else { matches as f64 / total as f64 };
    let report = EvalReport {
        averaging: Averaging::Macro,
        precision: macro_avg.precision,
        recall: macro_avg.recall,
        f1: macro_avg.f1,
        accuracy,
        micro: Prf::from_counts(matches, total, total),
        macro_avg,
        per_label,
        total,
    };
    (report, cm)
}

fn macro_average(per_label: &BTreeMap<String, LabelScore>) -> Prf {
    let n = per_label.len();
    if n == 0 {
        return Prf::default();
    }
    let mean = |f: fn(&LabelScore) -> f64| per_label.values().map(f).sum::<f64>() / n as f64;
    Prf {
        precision: mean(|s| s.precision),
        recall: mean(|s| s.recall),
        f1: mean(|s| s.f1),
    }
}

/// Token-level POS scoring. Headline P/R/F1 are macro averages; `micro`
/// equals accuracy.
pub fn eval_pos(gold: &Corpus, predicted: &Corpus) -> Result<(EvalReport, ConfusionMatrix), EvalError> {
    let pairs = aligned(gold, predicted)?;
    let mut labels = Vec::new();
    for (g, p) in pairs {
        labels.extend(tags(g)?.into_iter().zip(tags(p)?));
    }
    Ok(score_token_labels(labels))
}

/// Per-token BIO label scoring, an alternative to span matching.
pub fn eval_bio_tokens(gold: &Corpus, predicted: &Corpus) -> Result<EvalReport, EvalError> {
    let pairs = aligned(gold, predicted)?;
    let mut labels: Vec<(String, String)> = Vec::new();
    for (g, p) in pairs {
        let (gb, pb) = (chunks_to_bio(g).to_strings(), chunks_to_bio(p).to_strings());
        labels.extend(gb.into_iter().zip(pb));
    }
    Ok(score_token_labels(labels.iter().map(|(g, p)| (g.as_str(), p.as_str()))).0)
}

/// Exact span-and-label chunk matching, micro-averaged over the corpus.
pub fn eval_chunks(gold: &Corpus, predicted: &Corpus) -> Result<EvalReport, EvalError> {
    score_chunks(gold, predicted, false)
}

/// Like [`eval_chunks`], but a chunk also needs every POS tag inside it to
/// match gold.
pub fn eval_shallow_parse(gold: &Corpus, predicted: &Corpus) -> Result<EvalReport, EvalError> {
    score_chunks(gold, predicted, true)
}

fn score_chunks(gold: &Corpus, predicted: &Corpus, require_pos: bool) -> Result<EvalReport, EvalError> {
    let pairs = aligned(gold, predicted)?;
    let mut counts: BTreeMap<String, (usize, usize, usize)> = BTreeMap::new();
    let (mut tokens, mut token_matches) = (0, 0);
    for (g, p) in pairs {
        let gold_spans = g.chunk_spans();
        let pred_spans = p.chunk_spans();
        let tags_match = |start: usize, end: usize| -> Result<bool, EvalError> {
            if !require_pos {
                return Ok(true);
            }
            let (gt, pt) = (tags(g)?, tags(p)?);
            Ok(gt[start..end] == pt[start..end])
        };
        for &(label, _, _) in &gold_spans {
            counts.entry(label.to_string()).or_default().2 += 1;
        }
        for &(label, start, end) in &pred_spans {
            let entry = counts.entry(label.to_string()).or_default();
            entry.1 += 1;
            if gold_spans.contains(&(label, start, end)) && tags_match(start, end)? {
                entry.0 += 1;
            }
        }
        let (gb, pb) = (chunks_to_bio(g), chunks_to_bio(p));
        tokens += gb.len();
        token_matches += gb.labels.iter().zip(&pb.labels).filter(|(a, b)| a == b).count();
    }
    let (correct, predicted_total, gold_total) = counts
        .values()
        .fold((0, 0, 0), |acc, c| (acc.0 + c.0, acc.1 + c.1, acc.2 + c.2));
    let per_label: BTreeMap<String, LabelScore> = counts
        .into_iter()
        .map(|(label, (c, p, s))| (label, LabelScore::new(c, p, s)))
        .collect();
    let micro = Prf::from_counts(correct, predicted_total, gold_total);
    Ok(EvalReport {
        averaging: Averaging::Micro,
        precision: micro.precision,
        recall: micro.recall,
        f1: micro.f1,
        accuracy: if tokens == 0 { 0.0 } else { token_matches as f64 / tokens as f64 },
        micro,
        macro_avg: macro_average(&per_label),
        per_label,
        total: gold_total,
    })
}

/// Off-diagonal confusions, most frequent first, ties in lexicographic
/// `(gold, predicted)` order.
pub fn confusion_report(cm: &ConfusionMatrix, top_k: usize) -> Vec<(String, String, usize)> {
    let mut cells: Vec<(String, String, usize)> = cm
        .counts
        .iter()
        .filter(|((g, p), c)| g != p && **c > 0)
        .map(|((g, p), c)| (g.clone(), p.clone(), *c))
        .collect();
    cells.sort_by(|a, b| b.2.cmp(&a.2).then_with(|| (&a.0, &a.1).cmp(&(&b.0, &b.1))));
    cells.truncate(top_k);
    cells
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgreementReport {
    pub kappa: f64,
    pub observed_agreement: f64,
    pub expected_agreement: f64,
    pub raters: usize,
    pub items: usize,
    pub categories: usize,
}

/// Fleiss' kappa over an `items × raters` label matrix.
pub fn fleiss_kappa<S: AsRef<str>>(annotations: &[Vec<S>]) -> Result<AgreementReport, KappaError> {
    let items = annotations.len();
    if items == 0 {
        return Err(KappaError::NoItems);
    }
    let raters = annotations[0].len();
    if raters < 2 {
        return Err(KappaError::InsufficientRaters { found: raters });
    }
    let mut category_totals: BTreeMap<&str, usize> = BTreeMap::new();
    let mut agreement_sum = 0.0;
    let pairs = (raters * (raters - 1)) as f64;
    for (item, row) in annotations.iter().enumerate() {
        if row.len() != raters {
            return Err(KappaError::RaggedRow {
                item,
                expected: raters,
                found: row.len(),
            });
        }
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for label in row {
            *counts.entry(label.as_ref()).or_default() += 1;
        }
        let agreeing: usize = counts.values().map(|n| n * (n - 1)).sum();
        agreement_sum += agreeing as f64 / pairs;
        for (label, n) in counts {
            *category_totals.entry(label).or_default() += n;
        }
    }
    let observed = agreement_sum / items as f64;
    let ratings = (items * raters) as f64;
    let expected: f64 = category_totals
        .values()
        .map(|&n| {
            let p = n as f64 / ratings;
            p * p
        })
        .sum();
    let kappa = if expected == 1.0 {
        if observed == 1.0 {
            1.0
        } else {
            return Err(KappaError::DegenerateCase);
        }
    } else {
        (observed - expected) / (1.0 - expected)
    };
    Ok(AgreementReport {
        kappa,
        observed_agreement: observed,
        expected_agreement: expected,
        raters,
        items,
        categories: category_totals.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Chunk, Node, TagSet, Token};
    use alloc::vec;

    fn pos_corpus(tags: &[&str]) -> Corpus {
        let tokens = tags
            .iter()
            .enumerate()
            .map(|(i, t)| Token::new(&alloc::format!("w{i}"), Some(t)).unwrap())
            .collect();
        let sentence = Sentence::from_tokens(1, tokens).unwrap();
        let pos = TagSet::new("ab", ["A", "B"]).unwrap();
        Corpus::new(vec![sentence], pos, TagSet::ilmt_chunk()).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn perfect_pos() {
        let gold = pos_corpus(&["A", "B", "A"]);
        let (report, cm) = eval_pos(&gold, &gold).unwrap();
        assert_eq!((report.precision, report.recall, report.f1, report.accuracy), (1.0, 1.0, 1.0, 1.0));
        assert!(confusion_report(&cm, 5).is_empty());
    }

    #[test]
    fn macro_example() {
        let (report, cm) = eval_pos(&pos_corpus(&["A", "A", "B"]), &pos_corpus(&["A", "B", "B"])).unwrap();
        assert!(close(report.accuracy, 2.0 / 3.0));
        let a = &report.per_label["A"];
        let b = &report.per_label["B"];
        assert!(close(a.precision, 1.0) && close(a.recall, 0.5));
        assert!(close(b.precision, 0.5) && close(b.recall, 1.0));
        assert!(close(report.precision, 0.75));
        assert!(close(report.recall, 0.75));
        assert!(close(report.f1, 2.0 / 3.0));
        assert!(close(report.micro.precision, report.accuracy));
        assert_eq!(cm.total(), 3);
        assert_eq!(cm.row_sum("A"), 2);
        assert_eq!(confusion_report(&cm, 3), vec![("A".into(), "B".into(), 1)]);
    }

    #[test]
    fn token_mismatch() {
        let gold = pos_corpus(&["A", "A"]);
        let pred = pos_corpus(&["A", "A", "A"]);
        assert_eq!(eval_pos(&gold, &pred).unwrap_err(), EvalError::TokenMismatch { sentence_id: 1 });
    }

    fn chunked(spans: &[(&str, usize, usize)]) -> Corpus {
        let tokens: Vec<Token> = (1..=3)
            .map(|i| Token::new(&alloc::format!("w{i}"), Some("NN")).unwrap())
            .collect();
        let sentence = Sentence::from_tokens(1, tokens).unwrap().with_chunk_spans(spans);
        Corpus::new(vec![sentence], TagSet::ilmt_pos(), TagSet::ilmt_chunk()).unwrap()
    }

    #[test]
    fn chunk_example() {
        let gold = chunked(&[("NP", 0, 2), ("VGF", 2, 3)]);
        let pred = chunked(&[("NP", 0, 1), ("VGF", 2, 3)]);
        let report = eval_chunks(&gold, &pred).unwrap();
        assert!(close(report.precision, 0.5) && close(report.recall, 0.5) && close(report.f1, 0.5));
        assert_eq!(report.per_label["VGF"].correct, 1);
        let perfect = eval_chunks(&gold, &gold).unwrap();
        assert_eq!((perfect.precision, perfect.recall, perfect.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn no_predicted_chunks() {
        let gold = chunked(&[("NP", 0, 2)]);
        let report = eval_chunks(&gold, &chunked(&[])).unwrap();
        assert_eq!((report.precision, report.recall, report.f1), (0.0, 0.0, 0.0));
        assert!(report.per_label["NP"].zero_division);
    }

    #[test]
    fn shallow_parse_requires_tags() {
        let gold = chunked(&[("NP", 0, 2), ("VGF", 2, 3)]);
        let retagged: Vec<Sentence> = gold
            .sentences()
            .iter()
            .map(|s| s.with_pos_tags(&["NN", "JJ", "NN"]))
            .collect();
        let pred = gold.with_sentences(retagged).unwrap();
        assert!(close(eval_chunks(&gold, &pred).unwrap().f1, 1.0));
        assert!(close(eval_shallow_parse(&gold, &pred).unwrap().f1, 0.5));
    }

    #[test]
    fn bio_token_scoring() {
        let gold = chunked(&[("NP", 0, 2), ("VGF", 2, 3)]);
        let pred = chunked(&[("NP", 0, 1), ("VGF", 2, 3)]);
        let report = eval_bio_tokens(&gold, &pred).unwrap();
        assert!(close(report.accuracy, 2.0 / 3.0));
        assert!(report.per_label.contains_key("I-NP"));
    }

    #[test]
    fn confusion_ranking() {
        let mut cm = ConfusionMatrix::default();
        for _ in 0..5 {
            cm.add("NN", "JJ");
        }
        for _ in 0..3 {
            cm.add("VM", "VAUX");
        }
        for _ in 0..3 {
            cm.add("QF", "WQ");
        }
        cm.add("NN", "NN");
        assert_eq!(
            confusion_report(&cm, 10),
            vec![
                ("NN".into(), "JJ".into(), 5),
                ("QF".into(), "WQ".into(), 3),
                ("VM".into(), "VAUX".into(), 3)
            ]
        );
        assert_eq!(confusion_report(&cm, 1), vec![("NN".into(), "JJ".into(), 5)]);
    }

    #[test]
    fn kappa_perfect_and_opposed() {
        let same = vec![vec!["X", "X", "X"], vec!["Y", "Y", "Y"]];
        assert_eq!(fleiss_kappa(&same).unwrap().kappa, 1.0);
        let constant = vec![vec!["X", "X"], vec!["X", "X"]];
        assert_eq!(fleiss_kappa(&constant).unwrap().kappa, 1.0);
        let opposed = vec![vec!["X", "Y"], vec!["Y", "X"]];
        let report = fleiss_kappa(&opposed).unwrap();
        assert_eq!(report.observed_agreement, 0.0);
        assert_eq!(report.expected_agreement, 0.5);
        assert!(close(report.kappa, -1.0));
    }

    #[test]
    fn kappa_two_agree_two_split() {
        // counts: X appears 6 of 8 times, Y 2 of 8
        let data = vec![vec!["X", "X"], vec!["X", "X"], vec!["X", "Y"], vec!["Y", "X"]];
        let report = fleiss_kappa(&data).unwrap();
        assert!(close(report.observed_agreement, 0.5));
        assert!(close(report.expected_agreement, 0.625));
        assert!(close(report.kappa, -1.0 / 3.0));
    }

    #[test]
    fn kappa_errors() {
        let empty: Vec<Vec<&str>> = vec![];
        assert_eq!(fleiss_kappa(&empty), Err(KappaError::NoItems));
        assert_eq!(
            fleiss_kappa(&[vec!["X"]]),
            Err(KappaError::InsufficientRaters { found: 1 })
        );
        assert_eq!(
            fleiss_kappa(&[vec!["X", "Y"], vec!["X"]]),
            Err(KappaError::RaggedRow {
                item: 1,
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn chunk_order_does_not_matter() {
        // spans are compared as a set, so node order inside a sentence is irrelevant
        let a = chunked(&[("NP", 0, 1), ("VGF", 2, 3)]);
        let t = |s: &str| Token::new(s, Some("NN")).unwrap();
        let nodes = vec![
            Node::Chunk(Chunk::new("NP", vec![t("w1")]).unwrap()),
            Node::Token(t("w2")),
            Node::Chunk(Chunk::new("VGF", vec![t("w3")]).unwrap()),
        ];
        let b = a.with_sentences(vec![Sentence::new(1, nodes).unwrap()]).unwrap();
        assert!(close(eval_chunks(&a, &b).unwrap().f1, 1.0));
    }
}
