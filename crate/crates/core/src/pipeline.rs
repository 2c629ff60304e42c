//! The shallow parser: tokenizer, then POS tagger, then chunker.
//!
//! The chunker is trained with gold POS tags as features and fed predicted
//! tags at inference time.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::bio::{apply_bio, chunks_to_bio, BioLabel, BioSequence};
use crate::corpus::{Chunk, Corpus, CorpusError, Sentence, TagSet, Token};
use crate::crf::{self, CrfError, CrfModel, LabelAlphabet, TaskKind, TrainConfig};
use crate::features::{self, ChunkTemplateConfig, FeatureError, PosTemplateConfig, TemplateConfig};
use crate::tokenizer::{RawDocument, TokenizeError, Tokenizer};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Tokenize(#[from] TokenizeError),
    #[error(transparent)]
    Crf(#[from] CrfError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("no usable training sentences for the {} task", .task.as_str())]
    EmptyTrainingSet { task: TaskKind },
    #[error("expected a {} model, got a {} model", .expected.as_str(), .found.as_str())]
    WrongTask { expected: TaskKind, found: TaskKind },
    #[error("model label `{label}` is not in tagset `{tagset}`")]
    LabelOutsideTagset { label: String, tagset: String },
    #[error("cannot tag an empty sentence")]
    EmptySentence,
}

fn expect_task(model: &CrfModel, expected: TaskKind) -> Result<(), PipelineError> {
    if model.task() == expected {
        Ok(())
    } else {
        Err(PipelineError::WrongTask {
            expected,
            found: model.task(),
        })
    }
}

/// Immutable composition of a tokenizer and two independently trained
/// models.
#[derive(Debug, Clone)]
pub struct ShallowParser {
    tokenizer: Tokenizer,
    pos_model: CrfModel,
    chunk_model: CrfModel,
    pos_tagset: TagSet,
    chunk_tagset: TagSet,
}

impl ShallowParser {
    pub fn new(
        tokenizer: Tokenizer,
        pos_model: CrfModel,
        chunk_model: CrfModel,
        pos_tagset: TagSet,
        chunk_tagset: TagSet,
    ) -> Result<Self, PipelineError> {
        expect_task(&pos_model, TaskKind::Pos)?;
        expect_task(&chunk_model, TaskKind::Chunk)?;
        check_pos_labels(&pos_model, &pos_tagset)?;
        check_chunk_labels(&chunk_model, &chunk_tagset)?;
        Ok(ShallowParser {
            tokenizer,
            pos_model,
            chunk_model,
            pos_tagset,
            chunk_tagset,
        })
    }

    pub fn pos_model(&self) -> &CrfModel {
        &self.pos_model
    }

    pub fn chunk_model(&self) -> &CrfModel {
        &self.chunk_model
    }

    pub fn tokenizer(&self) -> &Tokenizer {
        &self.tokenizer
    }

    pub fn pos_tagset(&self) -> &TagSet {
        &self.pos_tagset
    }

    pub fn chunk_tagset(&self) -> &TagSet {
        &self.chunk_tagset
    }

    pub fn parse(&self, text: &str) -> Result<Corpus, PipelineError> {
        self.parse_document(&RawDocument::new(text))
    }

    pub fn parse_bytes(&self, bytes: &[u8]) -> Result<Corpus, PipelineError> {
        self.parse_document(&RawDocument::from_bytes(bytes)?)
    }

    pub fn parse_document(&self, doc: &RawDocument) -> Result<Corpus, PipelineError> {
        let sentences = self
            .tokenizer
            .tokenize(doc)
            .into_iter()
            .enumerate()
            .map(|(i, sentence)| {
                let tokens = sentence
                    .tokens
                    .iter()
                    .map(|t| Token::new(t, None))
                    .collect::<Result<Vec<_>, _>>()?;
                self.annotate(&Sentence::from_tokens(i as u64 + 1, tokens)?, false)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Corpus::new(
            sentences,
            self.pos_tagset.clone(),
            self.chunk_tagset.clone(),
        )?)
    }

    /// Re-annotates a sentence's tokens: POS tags are predicted unless
    /// `gold_pos` keeps the existing ones, then chunks are predicted.
    pub fn annotate(&self, sentence: &Sentence, gold_pos: bool) -> Result<Sentence, PipelineError> {
        let words = sentence.words();
        let tags: Vec<String> = if gold_pos {
            sentence
                .pos_tags()
                .ok_or(PipelineError::Feature(FeatureError::LengthMismatch {
                    tokens: words.len(),
                    labels: 0,
                }))?
                .into_iter()
                .map(ToString::to_string)
                .collect()
        } else {
            tag_pos(&self.pos_model, &words)?
        };
        let tag_refs: Vec<&str> = tags.iter().map(String::as_str).collect();
        chunk_sentence(&self.chunk_model, sentence, &tag_refs)
    }

    /// Annotates every sentence of `corpus` (keeping its tokens).
    pub fn annotate_corpus(&self, corpus: &Corpus, gold_pos: bool) -> Result<Corpus, PipelineError> {
        let sentences = corpus
            .sentences()
            .iter()
            .map(|s| self.annotate(s, gold_pos))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(corpus.with_sentences(sentences)?)
    }
}

fn check_pos_labels(model: &CrfModel, tagset: &TagSet) -> Result<(), PipelineError> {
    for label in model.labels().labels() {
        if !tagset.contains(label) {
            return Err(PipelineError::LabelOutsideTagset {
                label: label.clone(),
                tagset: tagset.name().to_string(),
            });
        }
    }
    Ok(())
}

fn check_chunk_labels(model: &CrfModel, tagset: &TagSet) -> Result<(), PipelineError> {
    for label in model.labels().labels() {
        let ok = match BioLabel::parse(label) {
            BioLabel::Outside => label == crate::bio::OUTSIDE,
            other => other.chunk_label().is_some_and(|x| tagset.contains(x)),
        };
        if !ok {
            return Err(PipelineError::LabelOutsideTagset {
                label: label.clone(),
                tagset: tagset.name().to_string(),
            });
        }
    }
    Ok(())
}

pub fn tag_pos(pos_model: &CrfModel, tokens: &[&str]) -> Result<Vec<String>, PipelineError> {
    expect_task(pos_model, TaskKind::Pos)?;
    if tokens.is_empty() {
        return Err(PipelineError::EmptySentence);
    }
    Ok(pos_model.decode(tokens, None)?)
}

fn chunk_labels(chunk_model: &CrfModel, tokens: &[&str], pos_tags: &[&str]) -> Result<BioSequence, PipelineError> {
    expect_task(chunk_model, TaskKind::Chunk)?;
    if tokens.len() != pos_tags.len() {
        return Err(FeatureError::LengthMismatch {
            tokens: tokens.len(),
            labels: pos_tags.len(),
        }
        .into());
    }
    if tokens.is_empty() {
        return Ok(BioSequence::default());
    }
    Ok(BioSequence::parse(&chunk_model.decode(tokens, Some(pos_tags))?))
}

/// Decodes chunk labels and groups the tokens (carrying `pos_tags`) into
/// chunks; tokens labeled `O` are left out.
pub fn chunk(chunk_model: &CrfModel, tokens: &[&str], pos_tags: &[&str]) -> Result<Vec<Chunk>, PipelineError> {
    let bio = chunk_labels(chunk_model, tokens, pos_tags)?;
    let tokens = tokens
        .iter()
        .zip(pos_tags)
        .map(|(t, p)| Token::new(t, Some(p)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(crate::bio::bio_to_chunks(&tokens, &bio)?)
}

/// Replaces the sentence's POS tags with `pos_tags` and its chunks with
/// the model's prediction.
pub fn chunk_sentence(chunk_model: &CrfModel, sentence: &Sentence, pos_tags: &[&str]) -> Result<Sentence, PipelineError> {
    let words = sentence.words();
    let bio = chunk_labels(chunk_model, &words, pos_tags)?;
    let tagged = sentence.unchunked().with_pos_tags(pos_tags);
    Ok(apply_bio(&tagged, &bio)?)
}

/// Trains the tagger on every fully POS-tagged sentence.
pub fn train_pos_model(
    corpus: &Corpus,
    template: &PosTemplateConfig,
    cfg: &TrainConfig,
) -> Result<CrfModel, PipelineError> {
    let data: Vec<_> = corpus
        .sentences()
        .iter()
        .filter_map(|s| {
            let tags = s.pos_tags()?;
            let vectors = features::pos_features(&s.words(), template);
            Some((vectors, tags.into_iter().map(ToString::to_string).collect::<Vec<_>>()))
        })
        .collect();
    train_task(data, TemplateConfig::Pos(*template), TaskKind::Pos, cfg)
}

/// Trains the chunker on every chunked, fully POS-tagged sentence, using
/// the gold POS column as features.
pub fn train_chunk_model(
    corpus: &Corpus,
    template: &ChunkTemplateConfig,
    cfg: &TrainConfig,
) -> Result<CrfModel, PipelineError> {
    let mut data = Vec::new();
    for sentence in corpus.sentences().iter().filter(|s| s.has_chunks()) {
        let Some(tags) = sentence.pos_tags() else {
            continue;
        };
        let vectors = features::chunk_features(&sentence.words(), &tags, template)?;
        data.push((vectors, chunks_to_bio(sentence).to_strings()));
    }
    train_task(data, TemplateConfig::Chunk(*template), TaskKind::Chunk, cfg)
}

fn train_task(
    data: Vec<(Vec<features::FeatureVector>, Vec<String>)>,
    template: TemplateConfig,
    task: TaskKind,
    cfg: &TrainConfig,
) -> Result<CrfModel, PipelineError> {
    if data.is_empty() {
        return Err(PipelineError::EmptyTrainingSet { task });
    }
    let labels = LabelAlphabet::from_sequences(data.iter().map(|(_, l)| l.as_slice()))?;
    Ok(crf::train(&data, labels, template, cfg)?)
}

pub fn train_pipeline(
    train: &Corpus,
    tokenizer: Tokenizer,
    pos_template: &PosTemplateConfig,
    chunk_template: &ChunkTemplateConfig,
    cfg: &TrainConfig,
) -> Result<ShallowParser, PipelineError> {
    let pos_model = train_pos_model(train, pos_template, cfg)?;
    let chunk_model = train_chunk_model(train, chunk_template, cfg)?;
    ShallowParser::new(
        tokenizer,
        pos_model,
        chunk_model,
        train.pos_tagset().clone(),
        train.chunk_tagset().clone(),
    )
}
