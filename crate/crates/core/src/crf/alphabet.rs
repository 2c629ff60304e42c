use alloc::string::{String, ToString};
use alloc::vec::Vec;

use hashbrown::HashMap;

use super::CrfError;

/// Bijection between label strings and indices `0..K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelAlphabet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl LabelAlphabet {
    pub fn new<I, S>(labels: I) -> Result<Self, CrfError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut alphabet = LabelAlphabet {
            labels: Vec::new(),
            index: HashMap::new(),
        };
        for label in labels {
            let label = label.into();
            if alphabet.index.contains_key(&label) {
                return Err(CrfError::DuplicateLabel { label });
            }
            alphabet.index.insert(label.clone(), alphabet.labels.len());
            alphabet.labels.push(label);
        }
        if alphabet.labels.is_empty() {
            return Err(CrfError::EmptyLabelAlphabet);
        }
        Ok(alphabet)
    }

    /// Sorted, deduplicated labels observed in `sequences`.
    pub fn from_sequences<'a, I, S>(sequences: I) -> Result<Self, CrfError>
    where
        I: IntoIterator<Item = &'a [S]>,
        S: AsRef<str> + 'a,
    {
        let mut labels: Vec<String> = sequences
            .into_iter()
            .flat_map(|seq| seq.iter().map(|l| l.as_ref().to_string()))
            .collect();
        labels.sort();
        labels.dedup();
        Self::new(labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }
}

/// Feature strings mapped to dense ids, frozen once built.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureAlphabet {
    features: Vec<String>,
    index: HashMap<String, u32>,
}

impl FeatureAlphabet {
    /// Assigns ids in first-occurrence order to features seen at least
    /// `min_count` times.
    pub fn build<'a, I>(features: I, min_count: usize) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut order: Vec<&'a str> = Vec::new();
        let mut counts: HashMap<&'a str, usize> = HashMap::new();
        for feature in features {
            let count = counts.entry(feature).or_insert(0);
            if *count == 0 {
                order.push(feature);
            }
            *count += 1;
        }
        let min_count = min_count.max(1);
        Self::from_features(
            order
                .into_iter()
                .filter(|f| counts[f] >= min_count)
                .map(ToString::to_string),
        )
        .expect("features are unique")
    }

    pub fn from_features<I: IntoIterator<Item = String>>(features: I) -> Result<Self, CrfError> {
        let mut alphabet = FeatureAlphabet::default();
        for feature in features {
            if alphabet.index.contains_key(&feature) {
                return Err(CrfError::DuplicateFeature { feature });
            }
            alphabet
                .index
                .insert(feature.clone(), alphabet.features.len() as u32);
            alphabet.features.push(feature);
        }
        Ok(alphabet)
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn get(&self, feature: &str) -> Option<u32> {
        self.index.get(feature).copied()
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn label_bijection() {
        let labels = LabelAlphabet::new(["B", "A"]).unwrap();
        assert_eq!(labels.get("A"), Some(1));
        assert_eq!(labels.label(0), "B");
        assert_eq!(labels.get("C"), None);
        assert!(matches!(
            LabelAlphabet::new(["A", "A"]),
            Err(CrfError::DuplicateLabel { .. })
        ));
    }

    #[test]
    fn labels_from_sequences_sorted() {
        let seqs: Vec<Vec<&str>> = vec![vec!["NN", "VM"], vec!["JJ", "NN"]];
        let labels = LabelAlphabet::from_sequences(seqs.iter().map(Vec::as_slice)).unwrap();
        assert_eq!(labels.labels(), ["JJ", "NN", "VM"]);
    }

    #[test]
    fn feature_cutoff_and_order() {
        let stream = ["b", "a", "b", "c", "a", "b"];
        let all = FeatureAlphabet::build(stream.iter().copied(), 0);
        assert_eq!(all.features(), ["b", "a", "c"]);
        let frequent = FeatureAlphabet::build(stream.iter().copied(), 2);
        assert_eq!(frequent.features(), ["b", "a"]);
        assert_eq!(frequent.get("c"), None);
    }
}
