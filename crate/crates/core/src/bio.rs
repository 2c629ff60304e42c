//! BIO encoding of chunks: `B-X` opens a chunk labeled `X`, `I-X` continues
//! it, `O` marks a token outside every chunk.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::{Chunk, Sentence, Token};
use crate::features::FeatureError;

pub const OUTSIDE: &str = "O";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BioLabel {
    Begin(String),
    Inside(String),
    Outside,
}

impl BioLabel {
    /// Anything that is not `B-X` or `I-X` with a non-empty `X` reads as `O`.
    pub fn parse(label: &str) -> BioLabel {
        match label.split_once('-') {
            Some(("B", chunk)) if !chunk.is_empty() => BioLabel::Begin(chunk.to_string()),
            Some(("I", chunk)) if !chunk.is_empty() => BioLabel::Inside(chunk.to_string()),
            _ => BioLabel::Outside,
        }
    }

    pub fn chunk_label(&self) -> Option<&str> {
        match self {
            BioLabel::Begin(label) | BioLabel::Inside(label) => Some(label),
            BioLabel::Outside => None,
        }
    }
}

impl fmt::Display for BioLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BioLabel::Begin(label) => write!(f, "B-{label}"),
            BioLabel::Inside(label) => write!(f, "I-{label}"),
            BioLabel::Outside => f.write_str(OUTSIDE),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BioSequence {
    pub labels: Vec<BioLabel>,
}

impl BioSequence {
    pub fn parse<S: AsRef<str>>(labels: &[S]) -> BioSequence {
        BioSequence {
            labels: labels.iter().map(|l| BioLabel::parse(l.as_ref())).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.labels.iter().map(ToString::to_string).collect()
    }

    /// `I-X` only ever follows `B-X` or `I-X`.
    pub fn is_well_formed(&self) -> bool {
        let mut open: Option<&str> = None;
        for label in &self.labels {
            match label {
                BioLabel::Inside(x) if open != Some(x.as_str()) => return false,
                BioLabel::Begin(x) | BioLabel::Inside(x) => open = Some(x),
                BioLabel::Outside => open = None,
            }
        }
        true
    }

    /// Turns every `I-X` that does not continue an `X` chunk into `B-X`.
    pub fn repair(&self) -> BioSequence {
        let mut open: Option<&str> = None;
        let labels = self
            .labels
            .iter()
            .map(|label| {
                let fixed = match label {
                    BioLabel::Inside(x) if open != Some(x.as_str()) => BioLabel::Begin(x.clone()),
                    other => other.clone(),
                };
                open = label.chunk_label();
                fixed
            })
            .collect();
        BioSequence { labels }
    }

    /// Chunk spans `(label, start, end)` of the repaired sequence.
    pub fn spans(&self) -> Vec<(String, usize, usize)> {
        let mut spans: Vec<(String, usize, usize)> = Vec::new();
        for (i, label) in self.repair().labels.into_iter().enumerate() {
            match label {
                BioLabel::Begin(x) => spans.push((x, i, i + 1)),
                BioLabel::Inside(_) => spans.last_mut().expect("repaired").2 = i + 1,
                BioLabel::Outside => {}
            }
        }
        spans
    }
}

pub fn chunks_to_bio(sentence: &Sentence) -> BioSequence {
    let mut labels = Vec::with_capacity(sentence.len());
    for node in sentence.nodes() {
        match node {
            crate::corpus::Node::Chunk(chunk) => {
                labels.push(BioLabel::Begin(chunk.label().to_string()));
                for _ in 1..chunk.tokens().len() {
                    labels.push(BioLabel::Inside(chunk.label().to_string()));
                }
            }
            crate::corpus::Node::Token(_) => labels.push(BioLabel::Outside),
        }
    }
    BioSequence { labels }
}

pub fn bio_to_chunks(tokens: &[Token], bio: &BioSequence) -> Result<Vec<Chunk>, FeatureError> {
    if tokens.len() != bio.len() {
        return Err(FeatureError::LengthMismatch {
            tokens: tokens.len(),
            labels: bio.len(),
        });
    }
    Ok(bio
        .spans()
        .into_iter()
        .map(|(label, start, end)| {
            Chunk::new(&label, tokens[start..end].to_vec()).expect("spans are non-empty")
        })
        .collect())
}

/// Regroups a sentence's tokens according to `bio`.
pub fn apply_bio(sentence: &Sentence, bio: &BioSequence) -> Result<Sentence, FeatureError> {
    if sentence.len() != bio.len() {
        return Err(FeatureError::LengthMismatch {
            tokens: sentence.len(),
            labels: bio.len(),
        });
    }
    let spans = bio.spans();
    let refs: Vec<(&str, usize, usize)> = spans.iter().map(|(l, s, e)| (l.as_str(), *s, *e)).collect();
    Ok(sentence.with_chunk_spans(&refs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Node;
    use alloc::vec;
    use proptest::prelude::*;

    fn tok(text: &str) -> Token {
        Token::new(text, Some("NN")).unwrap()
    }

    fn strings(seq: &BioSequence) -> Vec<String> {
        seq.to_strings()
    }

    #[test]
    fn encode_np_vgf() {
        let sentence = Sentence::new(
            1,
            vec![
                Node::Chunk(Chunk::new("NP", vec![tok("a"), tok("b")]).unwrap()),
                Node::Chunk(Chunk::new("VGF", vec![tok("c")]).unwrap()),
            ],
        )
        .unwrap();
        assert_eq!(strings(&chunks_to_bio(&sentence)), vec!["B-NP", "I-NP", "B-VGF"]);
        assert_eq!(
            strings(&chunks_to_bio(&sentence.unchunked())),
            vec!["O", "O", "O"]
        );
    }

    #[test]
    fn decode_simple() {
        let tokens = vec![tok("a"), tok("b"), tok("c")];
        let chunks = bio_to_chunks(&tokens, &BioSequence::parse(&["B-NP", "I-NP", "B-VGF"])).unwrap();
        assert_eq!(chunks.len(), 2);
        assert_eq!((chunks[0].label(), chunks[0].tokens().len()), ("NP", 2));
        assert_eq!((chunks[1].label(), chunks[1].tokens().len()), ("VGF", 1));
    }

    #[test]
    fn repair_leading_inside() {
        let seq = BioSequence::parse(&["I-NP", "I-NP"]);
        assert!(!seq.is_well_formed());
        assert_eq!(strings(&seq.repair()), vec!["B-NP", "I-NP"]);
        let chunks = bio_to_chunks(&[tok("a"), tok("b")], &seq).unwrap();
        assert_eq!(chunks.len(), 1);
        assert_eq!(chunks[0].tokens().len(), 2);
    }

    #[test]
    fn repair_label_change() {
        let seq = BioSequence::parse(&["B-NP", "I-VGF"]);
        assert_eq!(strings(&seq.repair()), vec!["B-NP", "B-VGF"]);
        assert_eq!(bio_to_chunks(&[tok("a"), tok("b")], &seq).unwrap().len(), 2);
    }

    #[test]
    fn repair_after_outside() {
        let seq = BioSequence::parse(&["B-NP", "O", "I-NP", "I-NP"]);
        assert_eq!(strings(&seq.repair()), vec!["B-NP", "O", "B-NP", "I-NP"]);
    }

    #[test]
    fn decode_length_mismatch() {
        assert_eq!(
            bio_to_chunks(&[tok("a")], &BioSequence::parse(&["O", "O"])),
            Err(FeatureError::LengthMismatch { tokens: 1, labels: 2 })
        );
    }

    #[test]
    fn malformed_strings_read_as_outside() {
        assert_eq!(BioLabel::parse("B-"), BioLabel::Outside);
        assert_eq!(BioLabel::parse("NP"), BioLabel::Outside);
        assert_eq!(BioLabel::parse("B-NP"), BioLabel::Begin("NP".into()));
        // labels may themselves contain hyphens
        assert_eq!(BioLabel::parse("I-X-Y"), BioLabel::Inside("X-Y".into()));
    }

    proptest! {
        #[test]
        fn repair_always_well_formed(labels in prop::collection::vec(
            prop::sample::select(vec!["O", "B-NP", "I-NP", "B-VGF", "I-VGF", "I-JJP", "junk"]),
            0..20,
        )) {
            let seq = BioSequence::parse(&labels);
            let repaired = seq.repair();
            prop_assert!(repaired.is_well_formed());
            prop_assert_eq!(repaired.len(), seq.len());
            if seq.is_well_formed() {
                prop_assert_eq!(&repaired, &seq);
            }
        }

        #[test]
        fn encode_decode_round_trip(groups in prop::collection::vec((0usize..4, 1usize..4), 1..8)) {
            let names = ["NP", "VGF", "JJP"];
            let mut nodes = Vec::new();
            let mut n = 0;
            for (kind, size) in groups {
                let mut tokens = Vec::new();
                for _ in 0..size {
                    n += 1;
                    tokens.push(tok(&alloc::format!("t{n}")));
                }
                if kind == 3 {
                    nodes.extend(tokens.into_iter().map(Node::Token));
                } else {
                    nodes.push(Node::Chunk(Chunk::new(names[kind], tokens).unwrap()));
                }
            }
            let sentence = Sentence::new(1, nodes).unwrap();
            let bio = chunks_to_bio(&sentence);
            prop_assert!(bio.is_well_formed());
            let rebuilt = apply_bio(&sentence.unchunked(), &bio).unwrap();
            prop_assert_eq!(&rebuilt, &sentence);
            let tokens: Vec<Token> = sentence.tokens().cloned().collect();
            let chunks = bio_to_chunks(&tokens, &bio).unwrap();
            let original: Vec<&Chunk> = sentence.chunks().collect();
            prop_assert_eq!(chunks.iter().collect::<Vec<_>>(), original);
        }
    }
}
