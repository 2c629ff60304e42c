//! Shakti Standard Format reading and writing.
//!
//! The accepted profile, one row per line, fields separated by tabs:
//!
//! ```text
//! <Sentence id="1">
//! 1    ((    NP
//! 1.1    ଭଲ    JJ
//! 1.2    ପିଲାକୁ    NN
//!     ))
//! 2    ।    SYM
//! </Sentence>
//! ```
//!
//! Token rows are `index, token, tag`; the tag column may be missing for
//! untagged text and a fourth feature-structure column is ignored. Chunk
//! rows open with `index, ((, label` and close with `))`. Chunks do not
//! nest. Blank lines are skipped. `<Sentence id=1>`
//! without quotes is accepted too.

use std::fmt::Write as _;

use shallowlab_core::corpus::{Chunk, Corpus, LabelKind, Node, Sentence, TagSet, Token};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SsfErrorKind {
    #[error("malformed SSF: {0}")]
    Malformed(String),
    #[error("unknown {kind} label `{label}`")]
    UnknownLabel { label: String, kind: LabelKind },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct SsfError {
    pub line: usize,
    pub column: usize,
    pub kind: SsfErrorKind,
}

impl SsfError {
    pub fn is_unknown_label(&self) -> bool {
        matches!(self.kind, SsfErrorKind::UnknownLabel { .. })
    }
}

struct OpenChunk {
    label: String,
    tokens: Vec<Token>,
    line: usize,
}

struct OpenSentence {
    id: u64,
    nodes: Vec<Node>,
    chunk: Option<OpenChunk>,
    line: usize,
}

fn sentence_id(line: &str) -> Option<u64> {
    let rest = line.strip_prefix("<Sentence")?.strip_suffix('>')?.trim();
    let value = rest.strip_prefix("id")?.trim_start().strip_prefix('=')?.trim();
    let value = value
        .strip_prefix('"')
        .and_then(|v| v.strip_suffix('"'))
        .unwrap_or(value);
    value.parse().ok()
}

/// Character column (1-based) where field `index` starts.
fn field_column(fields: &[&str], index: usize) -> usize {
    1 + fields[..index].iter().map(|f| f.chars().count() + 1).sum::<usize>()
}

pub fn parse_ssf(input: &str, pos_tagset: &TagSet, chunk_tagset: &TagSet) -> Result<Corpus, SsfError> {
    let mut sentences = Vec::new();
    let mut seen_ids = std::collections::BTreeSet::new();
    let mut open: Option<OpenSentence> = None;
    let mut last_line = 0;

    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let err = |column: usize, kind: SsfErrorKind| SsfError {
            line: line_no,
            column,
            kind,
        };
        let malformed = |column: usize, msg: &str| err(column, SsfErrorKind::Malformed(msg.to_string()));

        let Some(sentence) = open.as_mut() else {
            if line.trim().is_empty() {
                continue;
            }
            let trimmed = line.trim();
            if trimmed.starts_with("<Sentence") {
                let id = sentence_id(trimmed)
                    .filter(|&id| id > 0)
                    .ok_or_else(|| malformed(1, "sentence header needs a positive integer id"))?;
                if !seen_ids.insert(id) {
                    return Err(malformed(1, &format!("duplicate sentence id {id}")));
                }
                open = Some(OpenSentence {
                    id,
                    nodes: Vec::new(),
                    chunk: None,
                    line: line_no,
                });
                continue;
            }
            return Err(malformed(1, "expected `<Sentence id=...>`"));
        };

        let trimmed = line.trim();
        if trimmed == "</Sentence>" {
            if let Some(chunk) = &sentence.chunk {
                return Err(SsfError {
                    line: chunk.line,
                    column: 1,
                    kind: SsfErrorKind::Malformed(format!("chunk `{}` is never closed", chunk.label)),
                });
            }
            let sentence = open.take().expect("open sentence");
            let built = Sentence::new(sentence.id, sentence.nodes)
                .map_err(|e| malformed(1, &e.to_string()))?;
            sentences.push(built);
            continue;
        }
        if trimmed.starts_with("<Sentence") {
            return Err(malformed(1, "new sentence before `</Sentence>`"));
        }
        if trimmed.is_empty() {
            continue;
        }

        let fields: Vec<&str> = line.split('\t').collect();
        if trimmed == "))" {
            let Some(chunk) = sentence.chunk.take() else {
                return Err(malformed(1, "`))` without an open chunk"));
            };
            let built = Chunk::new(&chunk.label, chunk.tokens).map_err(|_| SsfError {
                line: chunk.line,
                column: 1,
                kind: SsfErrorKind::Malformed(format!("chunk `{}` has no tokens", chunk.label)),
            })?;
            sentence.nodes.push(Node::Chunk(built));
            continue;
        }
        if fields.len() < 2 || fields[0].is_empty() {
            return Err(malformed(1, "expected `index<TAB>token<TAB>tag`"));
        }
        if fields[1] == "((" {
            if sentence.chunk.is_some() {
                return Err(malformed(field_column(&fields, 1), "chunks cannot nest"));
            }
            let label = fields.get(2).copied().unwrap_or("");
            if label.is_empty() {
                return Err(malformed(field_column(&fields, 1), "chunk row has no label"));
            }
            if !chunk_tagset.contains(label) {
                return Err(err(
                    field_column(&fields, 2),
                    SsfErrorKind::UnknownLabel {
                        label: label.to_string(),
                        kind: LabelKind::Chunk,
                    },
                ));
            }
            sentence.chunk = Some(OpenChunk {
                label: label.to_string(),
                tokens: Vec::new(),
                line: line_no,
            });
            continue;
        }
        let tag = fields.get(2).copied().filter(|t| !t.is_empty());
        if let Some(tag) = tag {
            if !pos_tagset.contains(tag) {
                return Err(err(
                    field_column(&fields, 2),
                    SsfErrorKind::UnknownLabel {
                        label: tag.to_string(),
                        kind: LabelKind::Pos,
                    },
                ));
            }
        }
        let token = Token::new(fields[1], tag).map_err(|e| malformed(field_column(&fields, 1), &e.to_string()))?;
        match sentence.chunk.as_mut() {
            Some(chunk) => chunk.tokens.push(token),
            None => sentence.nodes.push(Node::Token(token)),
        }
    }

    if let Some(sentence) = open {
        return Err(SsfError {
            line: last_line.max(sentence.line),
            column: 1,
            kind: SsfErrorKind::Malformed(format!("sentence {} is never closed", sentence.id)),
        });
    }
    Corpus::new(sentences, pos_tagset.clone(), chunk_tagset.clone()).map_err(|e| SsfError {
        line: 0,
        column: 0,
        kind: SsfErrorKind::Malformed(e.to_string()),
    })
}

/// Deterministic rendering; chunk and token indices are regenerated.
pub fn serialize_ssf(corpus: &Corpus) -> String {
    let mut out = String::new();
    for sentence in corpus.sentences() {
        writeln!(out, "<Sentence id=\"{}\">", sentence.id()).unwrap();
        for (i, node) in sentence.nodes().iter().enumerate() {
            let index = i + 1;
            match node {
                Node::Token(token) => write_token(&mut out, &index.to_string(), token),
                Node::Chunk(chunk) => {
                    writeln!(out, "{index}\t((\t{}", chunk.label()).unwrap();
                    for (j, token) in chunk.tokens().iter().enumerate() {
                        write_token(&mut out, &format!("{index}.{}", j + 1), token);
                    }
                    out.push_str("\t))\n");
                }
            }
        }
        out.push_str("</Sentence>\n");
    }
    out
}

fn write_token(out: &mut String, index: &str, token: &Token) {
    match token.pos() {
        Some(pos) => writeln!(out, "{index}\t{}\t{pos}", token.text()).unwrap(),
        None => writeln!(out, "{index}\t{}", token.text()).unwrap(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tagsets() -> (TagSet, TagSet) {
        (TagSet::ilmt_pos(), TagSet::ilmt_chunk())
    }

    fn parse(text: &str) -> Result<Corpus, SsfError> {
        let (p, c) = tagsets();
        parse_ssf(text, &p, &c)
    }

    const EXAMPLE: &str = "<Sentence id=\"1\">\n1\t((\tNP\n1.1\tଭଲ\tJJ\n1.2\tପିଲାକୁ\tNN\n\t))\n</Sentence>\n";

    #[test]
    fn one_np_chunk() {
        let corpus = parse(EXAMPLE).unwrap();
        assert_eq!(corpus.len(), 1);
        let sentence = &corpus.sentences()[0];
        assert_eq!(sentence.chunks().count(), 1);
        assert_eq!(sentence.words(), vec!["ଭଲ", "ପିଲାକୁ"]);
        assert_eq!(serialize_ssf(&corpus), EXAMPLE);
    }

    #[test]
    fn empty_input_is_empty_corpus() {
        assert!(parse("").unwrap().is_empty());
        assert!(parse("\n\n").unwrap().is_empty());
        assert_eq!(serialize_ssf(&parse("").unwrap()), "");
    }

    #[test]
    fn unknown_pos_label() {
        let text = "<Sentence id=\"1\">\n1\tକ\tXX\n</Sentence>\n";
        let err = parse(text).unwrap_err();
        assert_eq!((err.line, err.column), (2, 5));
        assert_eq!(
            err.kind,
            SsfErrorKind::UnknownLabel {
                label: "XX".into(),
                kind: LabelKind::Pos
            }
        );
    }

    #[test]
    fn unknown_chunk_label() {
        let text = "<Sentence id=1>\n1\t((\tXP\n1.1\tକ\tNN\n\t))\n</Sentence>\n";
        let err = parse(text).unwrap_err();
        assert_eq!((err.line, err.column), (2, 6));
        assert!(err.is_unknown_label());
    }

    #[test]
    fn structural_errors() {
        let cases = [
            ("1\tକ\tNN\n", 1),
            ("<Sentence id=\"1\">\n1\tକ\tNN\n", 2),
            ("<Sentence id=\"1\">\n1\t((\tNP\n2\t((\tNP\n", 3),
            ("<Sentence id=\"1\">\n\t))\n</Sentence>\n", 2),
            ("<Sentence id=\"1\">\n1\t((\tNP\n\t))\n</Sentence>\n", 2),
            ("<Sentence id=\"1\">\n1\t((\tNP\n1.1\tକ\tNN\n</Sentence>\n", 2),
            ("<Sentence id=\"0\">\n1\tକ\tNN\n</Sentence>\n", 1),
            ("<Sentence id=\"1\">\n</Sentence>\n", 2),
            ("<Sentence id=\"1\">\n1\tକ\tNN\n<Sentence id=\"2\">\n", 3),
            ("<Sentence id=\"1\">\n1\tକ\tNN\n</Sentence>\n<Sentence id=\"1\">\n1\tକ\tNN\n</Sentence>\n", 4),
        ];
        for (text, line) in cases {
            let err = parse(text).unwrap_err();
            assert!(matches!(err.kind, SsfErrorKind::Malformed(_)), "{text:?}: {err}");
            assert_eq!(err.line, line, "{text:?}: {err}");
        }
    }

    #[test]
    fn untagged_and_top_level_tokens() {
        let text = "<Sentence id=\"7\">\n1\tକ\n2\t((\tVGF\n2.1\tଦିଅ\tVM\n\t))\n3\t।\tSYM\t<fs af='।,punc'>\n</Sentence>\n";
        let corpus = parse(text).unwrap();
        let sentence = &corpus.sentences()[0];
        assert_eq!(sentence.len(), 3);
        assert_eq!(sentence.tokens().next().unwrap().pos(), None);
        let expected = "<Sentence id=\"7\">\n1\tକ\n2\t((\tVGF\n2.1\tଦିଅ\tVM\n\t))\n3\t।\tSYM\n</Sentence>\n";
        assert_eq!(serialize_ssf(&corpus), expected);
    }

    #[test]
    fn crlf_and_nfc() {
        let text = "<Sentence id=\"1\">\r\n1\t\u{0B15}\u{0B47}\u{0B3E}\tNN\r\n</Sentence>\r\n";
        let corpus = parse(text).unwrap();
        assert_eq!(corpus.sentences()[0].words(), vec!["\u{0B15}\u{0B4B}"]);
    }
}
