//! Rule-based word tokenization and sentence splitting for Odia and other
//! Indic or Latin-script text.
//!
//! Rules, applied to NFC-normalized text:
//!
//! * words are separated by whitespace;
//! * danda (`।`) and double danda (`॥`) are always split off;
//! * leading and trailing punctuation (`, " ' “ ” ‘ ’ ( ) ? ! . ; :`) is
//!   detached one character per token, so `3.5` and `ଘର-ଦ୍ୱାର` stay whole;
//! * a word listed in the abbreviation list (e.g. `Dr.`) is kept whole;
//! * a sentence ends after a run of terminators (`। ॥ . ? !`) unless the
//!   token before the run is an abbreviation.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use unicode_normalization::UnicodeNormalization;

use crate::corpus::{BOS, EOS};

const DANDA: char = '\u{0964}';
const DOUBLE_DANDA: char = '\u{0965}';

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TokenizeError {
    #[error("input is not valid UTF-8 (valid up to byte {valid_up_to})")]
    InvalidEncoding { valid_up_to: usize },
}

fn is_terminator(c: char) -> bool {
    matches!(c, DANDA | DOUBLE_DANDA | '.' | '?' | '!')
}

fn is_edge_punct(c: char) -> bool {
    matches!(
        c,
        DANDA
            | DOUBLE_DANDA
            | ','
            | '"'
            | '\''
            | '\u{201C}'
            | '\u{201D}'
            | '\u{2018}'
            | '\u{2019}'
            | '('
            | ')'
            | '?'
            | '!'
            | '.'
            | ';'
            | ':'
    )
}

/// Raw input text, NFC-normalized on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    text: String,
}

impl RawDocument {
    pub fn new(text: &str) -> Self {
        RawDocument {
            text: text.nfc().collect(),
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, TokenizeError> {
        core::str::from_utf8(bytes)
            .map(Self::new)
            .map_err(|e| TokenizeError::InvalidEncoding {
                valid_up_to: e.valid_up_to(),
            })
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedSentence {
    pub tokens: Vec<String>,
}

/// Half-open range of character (code point) offsets into the normalized
/// document text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug)]
struct RawToken {
    text: String,
    span: Span,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tokenizer {
    abbreviations: BTreeSet<String>,
}

impl Tokenizer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_abbreviations<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Tokenizer {
            abbreviations: abbreviations
                .into_iter()
                .map(|a| a.as_ref().nfc().collect::<String>())
                .filter(|a| !a.is_empty())
                .collect(),
        }
    }

    /// Abbreviation list file: one entry per line, `#` comments.
    pub fn parse_abbreviations(text: &str) -> Self {
        Self::with_abbreviations(text.lines().filter_map(|line| {
            let entry = line.split('#').next().unwrap_or("").trim();
            (!entry.is_empty()).then_some(entry)
        }))
    }

    pub fn abbreviations(&self) -> impl Iterator<Item = &str> {
        self.abbreviations.iter().map(String::as_str)
    }

    fn is_abbreviation(&self, word: &str) -> bool {
        self.abbreviations.contains(word)
    }

    pub fn tokenize(&self, doc: &RawDocument) -> Vec<TokenizedSentence> {
        let tokens = self.raw_tokens(&doc.text);
        self.sentence_ranges(&tokens)
            .into_iter()
            .map(|(first, last)| TokenizedSentence {
                tokens: tokens[first..last].iter().map(|t| t.text.clone()).collect(),
            })
            .collect()
    }

    pub fn tokenize_str(&self, text: &str) -> Vec<TokenizedSentence> {
        self.tokenize(&RawDocument::new(text))
    }

    pub fn tokenize_bytes(&self, bytes: &[u8]) -> Result<Vec<TokenizedSentence>, TokenizeError> {
        RawDocument::from_bytes(bytes).map(|doc| self.tokenize(&doc))
    }

    /// Character spans of each sentence, from its first to its last
    /// non-whitespace character.
    pub fn sentence_boundaries(&self, doc: &RawDocument) -> Vec<Span> {
        let tokens = self.raw_tokens(&doc.text);
        self.sentence_ranges(&tokens)
            .into_iter()
            .map(|(first, last)| Span {
                start: tokens[first].span.start,
                end: tokens[last - 1].span.end,
            })
            .collect()
    }

    fn sentence_ranges(&self, tokens: &[RawToken]) -> Vec<(usize, usize)> {
        let terminal = |t: &RawToken| {
            let mut chars = t.text.chars();
            matches!((chars.next(), chars.next()), (Some(c), None) if is_terminator(c))
        };
        let mut ranges = Vec::new();
        let mut start = 0;
        let mut i = 0;
        while i < tokens.len() {
            if terminal(&tokens[i]) && !(i > 0 && self.is_abbreviation(&tokens[i - 1].text)) {
                while i + 1 < tokens.len() && terminal(&tokens[i + 1]) {
                    i += 1;
                }
                ranges.push((start, i + 1));
                start = i + 1;
            }
            i += 1;
        }
        if start < tokens.len() {
            ranges.push((start, tokens.len()));
        }
        ranges
    }

    fn raw_tokens(&self, text: &str) -> Vec<RawToken> {
        let mut tokens = Vec::new();
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            if chars[i].is_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            while i < chars.len() && !chars[i].is_whitespace() {
                i += 1;
            }
            // dandas never occur inside a word
            let mut seg_start = start;
            for j in start..=i {
                if j == i || matches!(chars[j], DANDA | DOUBLE_DANDA) {
                    self.split_word(&chars, seg_start, j, &mut tokens);
                    if j < i {
                        push(&mut tokens, &chars, j, j + 1);
                    }
                    seg_start = j + 1;
                }
            }
        }
        tokens
    }

    fn split_word(&self, chars: &[char], start: usize, end: usize, out: &mut Vec<RawToken>) {
        let mut lo = start;
        while lo < end && is_edge_punct(chars[lo]) {
            push(out, chars, lo, lo + 1);
            lo += 1;
        }
        if lo == end {
            return;
        }
        let rest: String = chars[lo..end].iter().collect();
        if self.is_abbreviation(&rest) {
            out.push(RawToken {
                text: rest,
                span: Span { start: lo, end },
            });
            return;
        }
        let mut hi = end;
        while hi > lo && is_edge_punct(chars[hi - 1]) {
            hi -= 1;
        }
        let core: String = chars[lo..hi].iter().collect();
        if core == BOS || core == EOS {
            // sentinels are reserved for feature templates
            push(out, chars, lo, lo + 1);
            push(out, chars, lo + 1, hi - 1);
            push(out, chars, hi - 1, hi);
        } else {
            out.push(RawToken {
                text: core,
                span: Span { start: lo, end: hi },
            });
        }
        for k in hi..end {
            push(out, chars, k, k + 1);
        }
    }
}

fn push(out: &mut Vec<RawToken>, chars: &[char], start: usize, end: usize) {
    out.push(RawToken {
        text: chars[start..end].iter().collect(),
        span: Span { start, end },
    });
}

/// Tokenizes with the default (empty) abbreviation list.
pub fn tokenize(doc: &RawDocument) -> Vec<TokenizedSentence> {
    Tokenizer::new().tokenize(doc)
}

pub fn sentence_boundaries(doc: &RawDocument) -> Vec<Span> {
    Tokenizer::new().sentence_boundaries(doc)
}

impl TokenizedSentence {
    pub fn join(&self) -> String {
        self.tokens.join(" ")
    }
}

impl core::fmt::Display for TokenizedSentence {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.join())
    }
}
