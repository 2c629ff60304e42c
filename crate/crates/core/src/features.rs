//! Feature templates for the POS tagger and the chunker.
//!
//! Every feature is a string `template=value`. Affixes are measured in
//! Unicode code points of the NFC text, so an Odia vowel sign counts as one
//! character and the case marker `କୁ` is a two-character suffix.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{BOS, EOS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FeatureError {
    #[error("length mismatch: {tokens} tokens but {labels} labels")]
    LengthMismatch { tokens: usize, labels: usize },
}

/// POS templates: current word, prefixes up to `prefix_max`, suffixes up to
/// `suffix_max`, word length, and words within `window` positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PosTemplateConfig {
    pub prefix_max: usize,
    pub suffix_max: usize,
    pub window: usize,
}

impl Default for PosTemplateConfig {
    fn default() -> Self {
        PosTemplateConfig {
            prefix_max: 4,
            suffix_max: 7,
            window: 1,
        }
    }
}

/// Chunk templates: current word and POS tag, words within `word_window`
/// and tags within `pos_window` positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChunkTemplateConfig {
    pub word_window: usize,
    pub pos_window: usize,
}

impl Default for ChunkTemplateConfig {
    fn default() -> Self {
        ChunkTemplateConfig {
            word_window: 1,
            pos_window: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateConfig {
    Pos(PosTemplateConfig),
    Chunk(ChunkTemplateConfig),
}

impl TemplateConfig {
    /// Largest distance at which a token can influence another position's
    /// features.
    pub fn radius(&self) -> usize {
        match self {
            TemplateConfig::Pos(cfg) => cfg.window,
            TemplateConfig::Chunk(cfg) => cfg.word_window.max(cfg.pos_window),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector {
    pub position: usize,
    pub features: Vec<String>,
}

fn context<'a>(items: &[&'a str], i: usize, offset: isize) -> &'a str {
    match i.checked_add_signed(offset) {
        Some(j) if j < items.len() => items[j],
        _ if offset < 0 => BOS,
        _ => EOS,
    }
}

fn push_window(features: &mut Vec<String>, name: &str, items: &[&str], i: usize, radius: usize) {
    for d in 1..=radius as isize {
        for offset in [-d, d] {
            features.push(format!("{name}[{offset:+}]={}", context(items, i, offset)));
        }
    }
}

pub fn pos_features(tokens: &[&str], cfg: &PosTemplateConfig) -> Vec<FeatureVector> {
    tokens
        .iter()
        .enumerate()
        .map(|(i, word)| {
            let chars: Vec<char> = word.chars().collect();
            let len = chars.len();
            let mut features = Vec::with_capacity(2 + len.min(cfg.prefix_max) + len.min(cfg.suffix_max) + 2 * cfg.window);
            features.push(format!("w={word}"));
            for k in 1..=cfg.prefix_max.min(len) {
                let prefix: String = chars[..k].iter().collect();
                features.push(format!("pre{k}={prefix}"));
            }
            for k in 1..=cfg.suffix_max.min(len) {
                let suffix: String = chars[len - k..].iter().collect();
                features.push(format!("suf{k}={suffix}"));
            }
            features.push(format!("len={len}"));
            push_window(&mut features, "w", tokens, i, cfg.window);
            FeatureVector {
                position: i,
                features,
            }
        })
        .collect()
}

pub fn chunk_features(
    tokens: &[&str],
    pos_tags: &[&str],
    cfg: &ChunkTemplateConfig,
) -> Result<Vec<FeatureVector>, FeatureError> {
    if tokens.len() != pos_tags.len() {
        return Err(FeatureError::LengthMismatch {
            tokens: tokens.len(),
            labels: pos_tags.len(),
        });
    }
    Ok(tokens
        .iter()
        .zip(pos_tags)
        .enumerate()
        .map(|(i, (word, pos))| {
            let mut features = Vec::with_capacity(2 + 2 * (cfg.word_window + cfg.pos_window));
            features.push(format!("w={word}"));
            features.push(format!("pos={pos}"));
            push_window(&mut features, "w", tokens, i, cfg.word_window);
            push_window(&mut features, "pos", pos_tags, i, cfg.pos_window);
            FeatureVector {
                position: i,
                features,
            }
        })
        .collect())
}

/// Dispatches on the template kind; `pos_tags` is required for chunking.
pub fn extract(
    cfg: &TemplateConfig,
    tokens: &[&str],
    pos_tags: Option<&[&str]>,
) -> Result<Vec<FeatureVector>, FeatureError> {
    match cfg {
        TemplateConfig::Pos(cfg) => Ok(pos_features(tokens, cfg)),
        TemplateConfig::Chunk(cfg) => {
            let tags = pos_tags.ok_or(FeatureError::LengthMismatch {
                tokens: tokens.len(),
                labels: 0,
            })?;
            chunk_features(tokens, tags, cfg)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn with_prefix<'a>(fv: &'a FeatureVector, prefix: &str) -> Vec<&'a str> {
        fv.features
            .iter()
            .filter(|f| f.starts_with(prefix))
            .map(String::as_str)
            .collect()
    }

    #[test]
    fn prefixes_of_good() {
        let fv = &pos_features(&["good"], &PosTemplateConfig::default())[0];
        assert_eq!(
            with_prefix(fv, "pre"),
            vec!["pre1=g", "pre2=go", "pre3=goo", "pre4=good"]
        );
        assert!(fv.features.contains(&"len=4".to_string()));
    }

    #[test]
    fn odia_suffixes_by_code_point() {
        let word = "ଭଲକୁ";
        let points: Vec<char> = word.chars().collect();
        assert_eq!(points, vec!['ଭ', 'ଲ', 'କ', '\u{0B41}']);
        let fv = &pos_features(&[word], &PosTemplateConfig::default())[0];
        assert_eq!(
            with_prefix(fv, "suf"),
            vec!["suf1=\u{0B41}", "suf2=କୁ", "suf3=ଲକୁ", "suf4=ଭଲକୁ"]
        );
    }

    #[test]
    fn single_token_window_is_sentinels() {
        let fv = &pos_features(&["ଦିଅ"], &PosTemplateConfig::default())[0];
        assert_eq!(with_prefix(fv, "w["), vec!["w[-1]=<BOS>", "w[+1]=<EOS>"]);
    }

    #[test]
    fn chunk_features_example() {
        let fvs = chunk_features(&["ଭଲ", "ପିଲାକୁ"], &["JJ", "NN"], &ChunkTemplateConfig::default()).unwrap();
        let got: BTreeSet<&str> = fvs[0].features.iter().map(String::as_str).collect();
        let want: BTreeSet<&str> = [
            "w=ଭଲ",
            "pos=JJ",
            "w[+1]=ପିଲାକୁ",
            "pos[+1]=NN",
            "w[-1]=<BOS>",
            "pos[-1]=<BOS>",
        ]
        .into_iter()
        .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn chunk_zero_windows() {
        let cfg = ChunkTemplateConfig {
            word_window: 0,
            pos_window: 0,
        };
        for fv in chunk_features(&["a", "b", "c"], &["NN", "NN", "VM"], &cfg).unwrap() {
            assert_eq!(fv.features.len(), 2);
        }
    }

    #[test]
    fn chunk_length_mismatch() {
        assert_eq!(
            chunk_features(&["a", "b", "c"], &["NN", "NN"], &ChunkTemplateConfig::default()),
            Err(FeatureError::LengthMismatch { tokens: 3, labels: 2 })
        );
    }

    #[test]
    fn wider_window_uses_sentinels_past_both_ends() {
        let cfg = PosTemplateConfig {
            window: 2,
            ..Default::default()
        };
        let fv = &pos_features(&["a", "b"], &cfg)[0];
        assert_eq!(
            with_prefix(fv, "w["),
            vec!["w[-1]=<BOS>", "w[+1]=b", "w[-2]=<BOS>", "w[+2]=<EOS>"]
        );
    }

    fn word() -> impl Strategy<Value = String> {
        prop::collection::vec(
            prop::sample::select(vec!['କ', 'ଖ', '\u{0B41}', 'a', 'z', '୍', 'ୟ']),
            1..12,
        )
        .prop_map(|v| v.into_iter().collect())
    }

    proptest! {
        #[test]
        fn affix_counts(w in word(), m in 0usize..6, n in 0usize..9) {
            let cfg = PosTemplateConfig { prefix_max: m, suffix_max: n, window: 1 };
            let len = w.chars().count();
            let fv = &pos_features(&[w.as_str()], &cfg)[0];
            prop_assert_eq!(with_prefix(fv, "pre").len(), m.min(len));
            prop_assert_eq!(with_prefix(fv, "suf").len(), n.min(len));
        }

        #[test]
        fn features_unique_per_position(words in prop::collection::vec(word(), 1..8)) {
            let refs: Vec<&str> = words.iter().map(String::as_str).collect();
            let tags: Vec<&str> = refs.iter().map(|_| "NN").collect();
            for fv in pos_features(&refs, &PosTemplateConfig::default())
                .into_iter()
                .chain(chunk_features(&refs, &tags, &ChunkTemplateConfig::default()).unwrap())
            {
                let unique: BTreeSet<&String> = fv.features.iter().collect();
                prop_assert_eq!(unique.len(), fv.features.len());
            }
        }

        #[test]
        fn locality(
            words in prop::collection::vec(word(), 1..10),
            replacement in word(),
            at in 0usize..10,
            s in 0usize..3,
            s1 in 0usize..3,
            s2 in 0usize..3,
        ) {
            let p = at % words.len();
            let mut changed = words.clone();
            changed[p] = replacement;
            let a: Vec<&str> = words.iter().map(String::as_str).collect();
            let b: Vec<&str> = changed.iter().map(String::as_str).collect();
            let tags_a: Vec<&str> = a.iter().map(|w| if w.len() % 2 == 0 { "NN" } else { "VM" }).collect();
            let tags_b: Vec<&str> = b.iter().map(|w| if w.len() % 2 == 0 { "NN" } else { "VM" }).collect();

            let pos_cfg = PosTemplateConfig { window: s, ..Default::default() };
            let (fa, fb) = (pos_features(&a, &pos_cfg), pos_features(&b, &pos_cfg));
            for i in 0..a.len() {
                if i.abs_diff(p) > s {
                    prop_assert_eq!(&fa[i], &fb[i]);
                }
            }
            let chunk_cfg = ChunkTemplateConfig { word_window: s1, pos_window: s2 };
            let ca = chunk_features(&a, &tags_a, &chunk_cfg).unwrap();
            let cb = chunk_features(&b, &tags_b, &chunk_cfg).unwrap();
            for i in 0..a.len() {
                if i.abs_diff(p) > s1.max(s2) {
                    prop_assert_eq!(&ca[i], &cb[i]);
                }
            }
        }
    }
}
