use shallowlab::core::corpus::TagSet;
use shallowlab::core::crf::TrainConfig;
use shallowlab::core::features::{ChunkTemplateConfig, PosTemplateConfig};
use shallowlab::core::pipeline::{train_chunk_model, train_pos_model};
use shallowlab::model_file::{load_model, read_model, save_model, write_model, ModelFileError};
use shallowlab::ssf::parse_ssf;

fn fixture() -> shallowlab::core::Corpus {
    parse_ssf(include_str!("data/fixture50.ssf"), &TagSet::ilmt_pos(), &TagSet::ilmt_chunk()).unwrap()
}

fn small_cfg() -> TrainConfig {
    TrainConfig {
        max_iterations: 30,
        ..TrainConfig::default()
    }
}

#[test]
fn trained_models_round_trip_through_files() {
    let corpus = fixture();
    let pos = train_pos_model(&corpus, &PosTemplateConfig::default(), &small_cfg()).unwrap();
    let chunk = train_chunk_model(&corpus, &ChunkTemplateConfig::default(), &small_cfg()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for (name, model) in [("pos.model", &pos), ("chunk.model", &chunk)] {
        let path = dir.path().join(name);
        write_model(&path, model).unwrap();
        let back = read_model(&path).unwrap();
        assert_eq!(&back, model);
        assert!(back.weights().iter().zip(model.weights()).all(|(a, b)| a.to_bits() == b.to_bits()));
        assert_eq!(save_model(&back), std::fs::read(&path).unwrap());
    }
}

#[test]
fn retraining_gives_identical_bytes() {
    let corpus = fixture();
    let a = train_pos_model(&corpus, &PosTemplateConfig::default(), &small_cfg()).unwrap();
    let b = train_pos_model(&corpus, &PosTemplateConfig::default(), &small_cfg()).unwrap();
    assert_eq!(save_model(&a), save_model(&b));
}

#[test]
fn truncated_and_future_files() {
    let model = train_pos_model(&fixture(), &PosTemplateConfig::default(), &small_cfg()).unwrap();
    let bytes = save_model(&model);
    for len in [0, 4, 11, 12, 40, bytes.len() / 2, bytes.len() - 1] {
        assert!(matches!(load_model(&bytes[..len]), Err(ModelFileError::CorruptModel(_))), "{len}");
    }
    let mut future = bytes.clone();
    future[8..12].copy_from_slice(&999u32.to_le_bytes());
    assert!(matches!(
        load_model(&future),
        Err(ModelFileError::VersionMismatch { found: 999, expected: 1 })
    ));
}
