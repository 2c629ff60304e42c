//! Shallow-parse document model: tokens, non-recursive chunks, sentences,
//! corpora and the tagsets they are validated against.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use unicode_normalization::UnicodeNormalization;

/// Sentinel emitted by feature templates for positions before the sentence.
pub const BOS: &str = "<BOS>";
/// Sentinel emitted by feature templates for positions after the sentence.
pub const EOS: &str = "<EOS>";

const ILMT_POS: &str = include_str!("../data/ilmt_pos.tags");
const ILMT_CHUNK: &str = include_str!("../data/ilmt_chunk.tags");

/// Which inventory a label was checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelKind {
    Pos,
    Chunk,
}

impl fmt::Display for LabelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelKind::Pos => f.write_str("POS"),
            LabelKind::Chunk => f.write_str("chunk"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TagSetError {
    #[error("tagset `{name}` has no labels")]
    Empty { name: String },
    #[error("line {line}: label `{label}` contains whitespace")]
    Whitespace { label: String, line: usize },
    #[error("line {line}: duplicate label `{label}`")]
    Duplicate { label: String, line: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("invalid token `{text}`: {reason}")]
    InvalidToken { text: String, reason: &'static str },
    #[error("chunk `{label}` has no tokens")]
    EmptyChunk { label: String },
    #[error("sentence ids must be positive")]
    ZeroSentenceId,
    #[error("sentence {id} has no tokens")]
    EmptySentence { id: u64 },
    #[error("sentence {sentence_id}: unknown {kind} label `{label}`")]
    UnknownLabel {
        label: String,
        kind: LabelKind,
        sentence_id: u64,
    },
    #[error("duplicate sentence id {id}")]
    DuplicateSentenceId { id: u64 },
    #[error("train count {requested} exceeds sentence count {available}")]
    OutOfRange { requested: usize, available: usize },
}

/// An ordered, duplicate-free inventory of labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagSet {
    name: String,
    labels: Vec<String>,
    members: BTreeSet<String>,
}

impl TagSet {
    pub fn new<I, S>(name: &str, labels: I) -> Result<Self, TagSetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set = TagSet {
            name: name.to_string(),
            labels: Vec::new(),
            members: BTreeSet::new(),
        };
        for (i, label) in labels.into_iter().enumerate() {
            set.push(label.into(), i + 1)?;
        }
        if set.labels.is_empty() {
            return Err(TagSetError::Empty { name: set.name });
        }
        Ok(set)
    }

    /// Parses the tagset file format: one label per line, `#` starts a
    /// comment, blank lines are ignored.
    pub fn parse(name: &str, text: &str) -> Result<Self, TagSetError> {
        let mut set = TagSet {
            name: name.to_string(),
            labels: Vec::new(),
            members: BTreeSet::new(),
        };
        for (i, line) in text.lines().enumerate() {
            let content = match line.find('#') {
                Some(pos) => &line[..pos],
                None => line,
            };
            let label = content.trim();
            if label.is_empty() {
                continue;
            }
            set.push(label.to_string(), i + 1)?;
        }
        if set.labels.is_empty() {
            return Err(TagSetError::Empty { name: set.name });
        }
        Ok(set)
    }

    fn push(&mut self, label: String, line: usize) -> Result<(), TagSetError> {
        if label.is_empty() || label.chars().any(char::is_whitespace) {
            return Err(TagSetError::Whitespace { label, line });
        }
        if !self.members.insert(label.clone()) {
            return Err(TagSetError::Duplicate { label, line });
        }
        self.labels.push(label);
        Ok(())
    }

    /// The bundled 27-label ILMT POS tagset.
    pub fn ilmt_pos() -> Self {
        Self::parse("ilmt-pos", ILMT_POS).expect("bundled POS tagset is valid")
    }

    /// The bundled 11-label ILMT chunk tagset.
    pub fn ilmt_chunk() -> Self {
        Self::parse("ilmt-chunk", ILMT_CHUNK).expect("bundled chunk tagset is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.members.contains(label)
    }
}

/// A single word. The text is stored NFC-normalized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    text: String,
    pos: Option<String>,
}

impl Token {
    pub fn new(text: &str, pos: Option<&str>) -> Result<Self, CorpusError> {
        let text: String = text.nfc().collect();
        let reason = if text.is_empty() {
            Some("empty")
        } else if text.chars().any(char::is_whitespace) {
            Some("contains whitespace")
        } else if text == BOS || text == EOS {
            Some("reserved sentinel")
        } else {
            None
        };
        if let Some(reason) = reason {
            return Err(CorpusError::InvalidToken { text, reason });
        }
        Ok(Token {
            text,
            pos: pos.map(ToString::to_string),
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn pos(&self) -> Option<&str> {
        self.pos.as_deref()
    }

    pub fn with_pos(&self, pos: Option<&str>) -> Token {
        Token {
            text: self.text.clone(),
            pos: pos.map(ToString::to_string),
        }
    }
}

/// A labeled, non-empty, non-recursive group of tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    label: String,
    tokens: Vec<Token>,
}

impl Chunk {
    pub fn new(label: &str, tokens: Vec<Token>) -> Result<Self, CorpusError> {
        if tokens.is_empty() {
            return Err(CorpusError::EmptyChunk {
                label: label.to_string(),
            });
        }
        Ok(Chunk {
            label: label.to_string(),
            tokens,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }
}

/// Top-level element of a sentence: either a chunk or a bare token that
/// has not been grouped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Chunk(Chunk),
    Token(Token),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    id: u64,
    nodes: Vec<Node>,
}

impl Sentence {
    pub fn new(id: u64, nodes: Vec<Node>) -> Result<Self, CorpusError> {
        if id == 0 {
            return Err(CorpusError::ZeroSentenceId);
        }
        let sentence = Sentence { id, nodes };
        if sentence.tokens().next().is_none() {
            return Err(CorpusError::EmptySentence { id });
        }
        Ok(sentence)
    }

    /// A sentence with no chunk structure.
    pub fn from_tokens(id: u64, tokens: Vec<Token>) -> Result<Self, CorpusError> {
        Self::new(id, tokens.into_iter().map(Node::Token).collect())
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// The flat token sequence in document order.
    pub fn tokens(&self) -> impl Iterator<Item = &Token> + '_ {
        self.nodes.iter().flat_map(|node| match node {
            Node::Chunk(chunk) => chunk.tokens.iter(),
            Node::Token(token) => core::slice::from_ref(token).iter(),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes
            .iter()
            .map(|node| match node {
                Node::Chunk(chunk) => chunk.tokens.len(),
                Node::Token(_) => 1,
            })
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn words(&self) -> Vec<&str> {
        self.tokens().map(Token::text).collect()
    }

    /// POS tags of every token, or `None` if any token is untagged.
    pub fn pos_tags(&self) -> Option<Vec<&str>> {
        self.tokens().map(Token::pos).collect()
    }

    pub fn chunks(&self) -> impl Iterator<Item = &Chunk> + '_ {
        self.nodes.iter().filter_map(|node| match node {
            Node::Chunk(chunk) => Some(chunk),
            Node::Token(_) => None,
        })
    }

    pub fn has_chunks(&self) -> bool {
        self.chunks().next().is_some()
    }

    /// Chunk spans as `(label, start, end)` token offsets, end exclusive.
    pub fn chunk_spans(&self) -> Vec<(&str, usize, usize)> {
        let mut spans = Vec::new();
        let mut offset = 0;
        for node in &self.nodes {
            match node {
                Node::Chunk(chunk) => {
                    spans.push((chunk.label(), offset, offset + chunk.tokens.len()));
                    offset += chunk.tokens.len();
                }
                Node::Token(_) => offset += 1,
            }
        }
        spans
    }

    /// Same structure with the POS column replaced. `tags` must have one
    /// entry per token.
    pub fn with_pos_tags(&self, tags: &[&str]) -> Sentence {
        assert_eq!(tags.len(), self.len(), "one tag per token");
        let mut tags = tags.iter();
        let mut retag = |token: &Token| token.with_pos(tags.next().copied());
        let nodes = self
            .nodes
            .iter()
            .map(|node| match node {
                Node::Chunk(chunk) => Node::Chunk(Chunk {
                    label: chunk.label.clone(),
                    tokens: chunk.tokens.iter().map(&mut retag).collect(),
                }),
                Node::Token(token) => Node::Token(retag(token)),
            })
            .collect();
        Sentence { id: self.id, nodes }
    }

    /// Same tokens regrouped by `(label, start, end)` spans. Spans must be
    /// non-empty, ordered, non-overlapping and within the sentence.
    pub fn with_chunk_spans(&self, spans: &[(&str, usize, usize)]) -> Sentence {
        let tokens: Vec<Token> = self.tokens().cloned().collect();
        let mut nodes = Vec::new();
        let mut rest = tokens.into_iter().enumerate().peekable();
        for &(label, start, end) in spans {
            assert!(start < end && end <= self.len(), "chunk span out of range");
            while let Some((_, token)) = rest.next_if(|(i, _)| *i < start) {
                nodes.push(Node::Token(token));
            }
            let tokens: Vec<Token> = rest.by_ref().take(end - start).map(|(_, t)| t).collect();
            assert_eq!(tokens.len(), end - start, "chunk spans overlap");
            nodes.push(Node::Chunk(Chunk {
                label: label.to_string(),
                tokens,
            }));
        }
        nodes.extend(rest.map(|(_, token)| Node::Token(token)));
        Sentence { id: self.id, nodes }
    }

    /// Same tokens with all chunk structure removed.
    pub fn unchunked(&self) -> Sentence {
        Sentence {
            id: self.id,
            nodes: self.tokens().cloned().map(Node::Token).collect(),
        }
    }
}

/// Sentences plus the tagsets their labels were validated against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    sentences: Vec<Sentence>,
    pos_tagset: TagSet,
    chunk_tagset: TagSet,
}

impl Corpus {
    pub fn new(
        sentences: Vec<Sentence>,
        pos_tagset: TagSet,
        chunk_tagset: TagSet,
    ) -> Result<Self, CorpusError> {
        let mut ids = BTreeSet::new();
        for sentence in &sentences {
            if !ids.insert(sentence.id) {
                return Err(CorpusError::DuplicateSentenceId { id: sentence.id });
            }
            validate_labels(sentence, &pos_tagset, &chunk_tagset)?;
        }
        Ok(Corpus {
            sentences,
            pos_tagset,
            chunk_tagset,
        })
    }

    pub fn empty(pos_tagset: TagSet, chunk_tagset: TagSet) -> Self {
        Corpus {
            sentences: Vec::new(),
            pos_tagset,
            chunk_tagset,
        }
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn pos_tagset(&self) -> &TagSet {
        &self.pos_tagset
    }

    pub fn chunk_tagset(&self) -> &TagSet {
        &self.chunk_tagset
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// A corpus over the same tagsets with different sentences.
    pub fn with_sentences(&self, sentences: Vec<Sentence>) -> Result<Corpus, CorpusError> {
        Corpus::new(
            sentences,
            self.pos_tagset.clone(),
            self.chunk_tagset.clone(),
        )
    }
}

fn validate_labels(
    sentence: &Sentence,
    pos_tagset: &TagSet,
    chunk_tagset: &TagSet,
) -> Result<(), CorpusError> {
    let unknown = |label: &str, kind| CorpusError::UnknownLabel {
        label: label.to_string(),
        kind,
        sentence_id: sentence.id,
    };
    for chunk in sentence.chunks() {
        if !chunk_tagset.contains(&chunk.label) {
            return Err(unknown(&chunk.label, LabelKind::Chunk));
        }
    }
    for token in sentence.tokens() {
        if let Some(pos) = token.pos() {
            if !pos_tagset.contains(pos) {
                return Err(unknown(pos, LabelKind::Pos));
            }
        }
    }
    Ok(())
}

/// Splits in document order: the first `train_count` sentences, then the rest.
pub fn split_corpus(corpus: &Corpus, train_count: usize) -> Result<(Corpus, Corpus), CorpusError> {
    let available = corpus.sentences.len();
    if train_count > available {
        return Err(CorpusError::OutOfRange {
            requested: train_count,
            available,
        });
    }
    let (train, test) = corpus.sentences.split_at(train_count);
    let part = |sentences: &[Sentence]| Corpus {
        sentences: sentences.to_vec(),
        pos_tagset: corpus.pos_tagset.clone(),
        chunk_tagset: corpus.chunk_tagset.clone(),
    };
    Ok((part(train), part(test)))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub sentences: usize,
    pub tokens: usize,
    pub chunks: usize,
    /// Tokens without a POS tag; `pos_counts` plus this sums to `tokens`.
    pub untagged_tokens: usize,
    /// Tokens not inside any chunk.
    pub unchunked_tokens: usize,
    pub pos_counts: BTreeMap<String, usize>,
    pub chunk_counts: BTreeMap<String, usize>,
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let mut stats = CorpusStats {
        sentences: corpus.sentences.len(),
        ..CorpusStats::default()
    };
    for sentence in &corpus.sentences {
        for node in &sentence.nodes {
            match node {
                Node::Chunk(chunk) => {
                    stats.chunks += 1;
                    *stats.chunk_counts.entry(chunk.label.clone()).or_default() += 1;
                }
                Node::Token(_) => stats.unchunked_tokens += 1,
            }
        }
        for token in sentence.tokens() {
            stats.tokens += 1;
            match token.pos() {
                Some(pos) => *stats.pos_counts.entry(pos.to_string()).or_default() += 1,
                None => stats.untagged_tokens += 1,
            }
        }
    }
    stats
}
