//! Synthetic corpus: words are stem + tag-specific suffix, so the suffix
//! alone fixes the POS tag, and chunks follow from the POS sequence:
//! `[JJ] NN [PSP]` is an NP, `RB` an RBP, `CC` a CCP, `VM [VAUX]` the
//! final VGF, and the closing `SYM` stays outside any chunk.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shallowlab::core::corpus::{Chunk, Corpus, Node, Sentence, TagSet, Token};

const CONSONANTS: &[&str] = &["କ", "ଖ", "ଗ", "ଚ", "ଜ", "ଟ", "ଡ", "ତ", "ଦ", "ନ", "ପ", "ବ", "ମ", "ର", "ଲ", "ସ", "ହ"];
const VOWEL_SIGNS: &[&str] = &["", "ା", "ି", "ୁ", "େ", "ୋ"];

fn suffixes(tag: &str) -> &'static [&'static str] {
    match tag {
        "NN" => &["ଟି", "ମାନେ"],
        "JJ" => &["ଆଳୁ", "ଇଆ"],
        "VM" => &["ଇଲା", "ଉଛନ୍ତି"],
        "RB" => &["ଭାବେ"],
        _ => unreachable!(),
    }
}

fn closed_class(tag: &str) -> &'static [&'static str] {
    match tag {
        "PSP" => &["ପାଇଁ", "ସହିତ"],
        "CC" => &["ଓ", "ବା"],
        "VAUX" => &["ଅଛି", "ଥିଲା"],
        "SYM" => &["।"],
        _ => unreachable!(),
    }
}

fn stem(rng: &mut ChaCha8Rng) -> String {
    (0..2)
        .map(|_| format!("{}{}", CONSONANTS.choose(rng).unwrap(), VOWEL_SIGNS.choose(rng).unwrap()))
        .collect()
}

fn word(rng: &mut ChaCha8Rng, tag: &str) -> Token {
    let text = match tag {
        "NN" | "JJ" | "VM" | "RB" => format!("{}{}", stem(rng), suffixes(tag).choose(rng).unwrap()),
        _ => closed_class(tag).choose(rng).unwrap().to_string(),
    };
    Token::new(&text, Some(tag)).unwrap()
}

fn chunk(rng: &mut ChaCha8Rng, label: &str, tags: &[&str]) -> Node {
    Node::Chunk(Chunk::new(label, tags.iter().map(|t| word(rng, t)).collect()).unwrap())
}

fn noun_phrase(rng: &mut ChaCha8Rng) -> Node {
    let mut tags = Vec::new();
    if rng.gen_bool(0.4) {
        tags.push("JJ");
    }
    tags.push("NN");
    if rng.gen_bool(0.35) {
        tags.push("PSP");
    }
    chunk(rng, "NP", &tags)
}

pub fn synthetic_sentence(rng: &mut ChaCha8Rng, id: u64) -> Sentence {
    let mut nodes = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        match rng.gen_range(0..10) {
            0..=5 => nodes.push(noun_phrase(rng)),
            6..=7 => nodes.push(chunk(rng, "RBP", &["RB"])),
            _ => {
                nodes.push(noun_phrase(rng));
                nodes.push(chunk(rng, "CCP", &["CC"]));
                nodes.push(noun_phrase(rng));
            }
        }
    }
    let verb: &[&str] = if rng.gen_bool(0.5) { &["VM", "VAUX"] } else { &["VM"] };
    nodes.push(chunk(rng, "VGF", verb));
    nodes.push(Node::Token(word(rng, "SYM")));
    Sentence::new(id, nodes).unwrap()
}

pub fn synthetic_corpus(sentences: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sentences = (1..=sentences as u64).map(|id| synthetic_sentence(&mut rng, id)).collect();
    Corpus::new(sentences, TagSet::ilmt_pos(), TagSet::ilmt_chunk()).unwrap()
}

/// Replaces `rate` of all POS tags with a different tag from the corpus's
/// inventory.
pub fn with_pos_noise(corpus: &Corpus, rate: f64, seed: u64) -> Corpus {
    const TAGS: &[&str] = &["NN", "JJ", "VM", "RB", "PSP", "CC", "VAUX", "SYM"];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: usize = corpus.sentences().iter().map(Sentence::len).sum();
    let mut positions: Vec<usize> = (0..total).collect();
    positions.shuffle(&mut rng);
    let mut flip = vec![false; total];
    for &p in &positions[..(total as f64 * rate).round() as usize] {
        flip[p] = true;
    }
    let mut offset = 0;
    let sentences = corpus
        .sentences()
        .iter()
        .map(|s| {
            let tags: Vec<String> = s
                .pos_tags()
                .unwrap()
                .into_iter()
                .enumerate()
                .map(|(i, tag)| {
                    if !flip[offset + i] {
                        return tag.to_string();
                    }
                    let others: Vec<&str> = TAGS.iter().copied().filter(|t| *t != tag).collect();
                    others.choose(&mut rng).unwrap().to_string()
                })
                .collect();
            offset += s.len();
            let refs: Vec<&str> = tags.iter().map(String::as_str).collect();
            s.with_pos_tags(&refs)
        })
        .collect();
    corpus.with_sentences(sentences).unwrap()
}
