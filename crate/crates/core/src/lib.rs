//! Shallow parsing core: document model, tokenizer, feature templates, a
//! linear-chain CRF, evaluation and the tokenize → tag → chunk pipeline.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, model
//! persistence and the command line live in the `shallowlab` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bio;
pub mod corpus;
pub mod crf;
pub mod eval;
pub mod features;
pub mod pipeline;
pub mod tokenizer;

pub use corpus::{Chunk, Corpus, Node, Sentence, TagSet, Token};
pub use crf::{CrfModel, TaskKind, TrainConfig};
pub use features::{ChunkTemplateConfig, PosTemplateConfig, TemplateConfig};
pub use pipeline::ShallowParser;
