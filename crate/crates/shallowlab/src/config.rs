//! Resolved run configurations and the experiment config file.
//!
//! An experiment config is plain `key = value` text; `#` starts a comment
//! line. Recognised keys:
//!
//! | key | default |
//! |-----|---------|
//! | `corpus` | required, SSF file |
//! | `train_count` | required, sentences in the training split |
//! | `pos_tagset`, `chunk_tagset` | bundled ILMT lists |
//! | `abbreviations` | none |
//! | `prefix_max`, `suffix_max`, `window` | 4, 7, 1 |
//! | `chunk_word_window`, `chunk_pos_window` | 1, 1 |
//! | `sigma`, `max_iterations`, `tolerance`, `feature_cutoff` | 1.0, 200, 1e-5, 0 |
//! | `output_dir` | `experiment-out` |
//!
//! Relative paths are taken relative to the config file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use shallowlab_core::crf::{TrainConfig, MODEL_VERSION};
use shallowlab_core::features::{ChunkTemplateConfig, PosTemplateConfig};

/// A fully explicit list of settings, echoed into models and reports.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunConfig {
    entries: Vec<(String, String)>,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        let mut cfg = RunConfig::default();
        cfg.push("command", command);
        cfg.push("format_version", MODEL_VERSION);
        cfg
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn push_templates(&mut self, pos: &PosTemplateConfig, chunk: &ChunkTemplateConfig) {
        self.push("prefix_max", pos.prefix_max);
        self.push("suffix_max", pos.suffix_max);
        self.push("window", pos.window);
        self.push("chunk_word_window", chunk.word_window);
        self.push("chunk_pos_window", chunk.pos_window);
    }

    pub fn push_train(&mut self, train: &TrainConfig) {
        self.push("sigma", train.l2_sigma);
        self.push("max_iterations", train.max_iterations);
        self.push("tolerance", train.convergence_tol);
        self.push("feature_cutoff", train.feature_cutoff);
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// `key = value` lines in insertion order.
    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .entries
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        serde_json::Value::Object(map)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: invalid value `{value}` for `{key}`")]
    InvalidValue { line: usize, key: String, value: String },
    #[error("missing required key `{key}`")]
    MissingKey { key: &'static str },
}

const KEYS: &[&str] = &[
    "corpus",
    "train_count",
    "pos_tagset",
    "chunk_tagset",
    "abbreviations",
    "prefix_max",
    "suffix_max",
    "window",
    "chunk_word_window",
    "chunk_pos_window",
    "sigma",
    "max_iterations",
    "tolerance",
    "feature_cutoff",
    "output_dir",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub corpus: PathBuf,
    pub train_count: usize,
    pub pos_tagset: Option<PathBuf>,
    pub chunk_tagset: Option<PathBuf>,
    pub abbreviations: Option<PathBuf>,
    pub pos_template: PosTemplateConfig,
    pub chunk_template: ChunkTemplateConfig,
    pub train: TrainConfig,
    pub output_dir: PathBuf,
    /// The settings as written (paths unresolved, defaults filled in).
    pub run: RunConfig,
}

impl ExperimentConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut values: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            let (key, value) = (key.trim(), value.trim());
            let Some(&key) = KEYS.iter().find(|&&k| k == key) else {
                return Err(ConfigError::UnknownKey {
                    line: i + 1,
                    key: key.to_string(),
                });
            };
            if values.insert(key, (i + 1, value)).is_some() {
                return Err(ConfigError::DuplicateKey {
                    line: i + 1,
                    key: key.to_string(),
                });
            }
        }

        fn num<T: FromStr>(values: &BTreeMap<&str, (usize, &str)>, key: &str, default: T) -> Result<T, ConfigError> {
            match values.get(key) {
                None => Ok(default),
                Some(&(line, value)) => value.parse().map_err(|_| ConfigError::InvalidValue {
                    line,
                    key: key.to_string(),
                    value: value.to_string(),
                }),
            }
        }
        let path = |key: &str| values.get(key).map(|&(_, v)| base_dir.join(v));
        let required = |key: &'static str| values.get(key).copied().ok_or(ConfigError::MissingKey { key });

        let corpus_raw = required("corpus")?.1;
        required("train_count")?;
        let train_count: usize = num(&values, "train_count", 0)?;
        let pos_template = PosTemplateConfig {
            prefix_max: num(&values, "prefix_max", PosTemplateConfig::default().prefix_max)?,
            suffix_max: num(&values, "suffix_max", PosTemplateConfig::default().suffix_max)?,
            window: num(&values, "window", PosTemplateConfig::default().window)?,
        };
        let chunk_template = ChunkTemplateConfig {
            word_window: num(&values, "chunk_word_window", ChunkTemplateConfig::default().word_window)?,
            pos_window: num(&values, "chunk_pos_window", ChunkTemplateConfig::default().pos_window)?,
        };
        let defaults = TrainConfig::default();
        let train = TrainConfig {
            l2_sigma: num(&values, "sigma", defaults.l2_sigma)?,
            max_iterations: num(&values, "max_iterations", defaults.max_iterations)?,
            convergence_tol: num(&values, "tolerance", defaults.convergence_tol)?,
            feature_cutoff: num(&values, "feature_cutoff", defaults.feature_cutoff)?,
        };
        if let Err(shallowlab_core::crf::CrfError::InvalidConfig { field }) = train.validate() {
            let key = match field {
                "l2_sigma" => "sigma",
                "max_iterations" => "max_iterations",
                _ => "tolerance",
            };
            let (line, value) = values.get(key).copied().unwrap_or((0, ""));
            return Err(ConfigError::InvalidValue {
                line,
                key: key.to_string(),
                value: value.to_string(),
            });
        }

        let raw = |key: &str| values.get(key).map(|&(_, v)| v.to_string());
        let mut run = RunConfig::new("experiment");
        run.push("corpus", corpus_raw);
        run.push("train_count", train_count);
        run.push("pos_tagset", raw("pos_tagset").unwrap_or_else(|| "bundled".into()));
        run.push("chunk_tagset", raw("chunk_tagset").unwrap_or_else(|| "bundled".into()));
        run.push("abbreviations", raw("abbreviations").unwrap_or_else(|| "none".into()));
        run.push_templates(&pos_template, &chunk_template);
        run.push_train(&train);

        Ok(ExperimentConfig {
            corpus: base_dir.join(corpus_raw),
            train_count,
            pos_tagset: path("pos_tagset"),
            chunk_tagset: path("chunk_tagset"),
            abbreviations: path("abbreviations"),
            pos_template,
            chunk_template,
            train,
            output_dir: path("output_dir").unwrap_or_else(|| base_dir.join("experiment-out")),
            run,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_materialized() {
        let cfg = ExperimentConfig::parse("# demo\ncorpus = data.ssf\ntrain_count = 500\n", Path::new("/tmp/x")).unwrap();
        assert_eq!(cfg.corpus, PathBuf::from("/tmp/x/data.ssf"));
        assert_eq!(cfg.pos_template, PosTemplateConfig::default());
        assert_eq!(cfg.train, TrainConfig::default());
        let rendered = cfg.run.render();
        for key in ["prefix_max = 4", "suffix_max = 7", "window = 1", "sigma = 1", "feature_cutoff = 0"] {
            assert!(rendered.contains(key), "{rendered}");
        }
    }

    #[test]
    fn errors() {
        let base = Path::new(".");
        assert_eq!(
            ExperimentConfig::parse("corpus = a.ssf\n", base),
            Err(ConfigError::MissingKey { key: "train_count" })
        );
        assert!(matches!(
            ExperimentConfig::parse("corpus = a\ntrain_count = 5\nbogus = 1\n", base),
            Err(ConfigError::UnknownKey { line: 3, .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("corpus = a\ntrain_count = five\n", base),
            Err(ConfigError::InvalidValue { line: 2, .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("corpus = a\ntrain_count = 5\nsigma = 0\n", base),
            Err(ConfigError::InvalidValue { line: 3, .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("corpus a\n", base),
            Err(ConfigError::Syntax { line: 1 })
        ));
    }
}
