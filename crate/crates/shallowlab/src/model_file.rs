//! Binary model container. The byte layout is described in
//! `docs/model-format.md`.

use std::path::Path;

use shallowlab_core::crf::{CrfModel, FeatureAlphabet, LabelAlphabet, ModelMetadata, TrainConfig, MODEL_VERSION};
use shallowlab_core::features::{ChunkTemplateConfig, PosTemplateConfig, TemplateConfig};

pub const MAGIC: &[u8; 8] = b"SHLPCRF\0";

#[derive(Debug, thiserror::Error)]
pub enum ModelFileError {
    #[error("unsupported model format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("corrupt model: {0}")]
    CorruptModel(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn corrupt(msg: impl Into<String>) -> ModelFileError {
    ModelFileError::CorruptModel(msg.into())
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: usize) {
        let v = u32::try_from(v).expect("value fits in u32");
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: usize) {
        self.0.extend_from_slice(&(v as u64).to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u32(s.len());
        self.0.extend_from_slice(s.as_bytes());
    }
    fn strings(&mut self, items: &[String]) {
        self.u32(items.len());
        for s in items {
            self.str(s);
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ModelFileError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| corrupt("unexpected end of data"))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn u8(&mut self) -> Result<u8, ModelFileError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<usize, ModelFileError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }
    fn u64(&mut self) -> Result<u64, ModelFileError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64, ModelFileError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn str(&mut self) -> Result<String, ModelFileError> {
        let len = self.u32()?;
        let raw = self.take(len)?;
        String::from_utf8(raw.to_vec()).map_err(|_| corrupt("string is not UTF-8"))
    }
    fn strings(&mut self) -> Result<Vec<String>, ModelFileError> {
        let count = self.u32()?;
        // Every string needs at least its 4-byte length prefix.
        if count > (self.bytes.len() - self.pos) / 4 {
            return Err(corrupt("string table longer than the file"));
        }
        (0..count).map(|_| self.str()).collect()
    }
}

pub fn save_model(model: &CrfModel) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.0.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    match model.template() {
        TemplateConfig::Pos(cfg) => {
            w.u8(0);
            w.u32(cfg.prefix_max);
            w.u32(cfg.suffix_max);
            w.u32(cfg.window);
        }
        TemplateConfig::Chunk(cfg) => {
            w.u8(1);
            w.u32(cfg.word_window);
            w.u32(cfg.pos_window);
        }
    }
    let meta = &model.metadata;
    w.f64(meta.train.l2_sigma);
    w.u32(meta.train.max_iterations);
    w.f64(meta.train.convergence_tol);
    w.u32(meta.train.feature_cutoff);
    w.u32(meta.iterations);
    w.f64(meta.objective);
    w.u8(meta.converged as u8);
    w.str(&meta.run_config);
    w.strings(model.labels().labels());
    w.strings(model.features().features());
    w.u64(model.weights().len());
    for &x in model.weights() {
        w.f64(x);
    }
    let crc = crc32fast::hash(&w.0);
    w.0.extend_from_slice(&crc.to_le_bytes());
    w.0
}

pub fn load_model(bytes: &[u8]) -> Result<CrfModel, ModelFileError> {
    if bytes.len() < 12 || &bytes[..8] != MAGIC {
        return Err(corrupt("missing model file signature"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != MODEL_VERSION {
        return Err(ModelFileError::VersionMismatch {
            found: version,
            expected: MODEL_VERSION,
        });
    }
    if bytes.len() < 16 {
        return Err(corrupt("unexpected end of data"));
    }
    let (body, trailer) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(trailer.try_into().unwrap());
    if crc32fast::hash(body) != stored {
        return Err(corrupt("checksum mismatch"));
    }

    let mut r = Reader { bytes: body, pos: 12 };
    let template = match r.u8()? {
        0 => TemplateConfig::Pos(PosTemplateConfig {
            prefix_max: r.u32()?,
            suffix_max: r.u32()?,
            window: r.u32()?,
        }),
        1 => TemplateConfig::Chunk(ChunkTemplateConfig {
            word_window: r.u32()?,
            pos_window: r.u32()?,
        }),
        other => return Err(corrupt(format!("unknown task code {other}"))),
    };
    let train = TrainConfig {
        l2_sigma: r.f64()?,
        max_iterations: r.u32()?,
        convergence_tol: r.f64()?,
        feature_cutoff: r.u32()?,
    };
    let iterations = r.u32()?;
    let objective = r.f64()?;
    let converged = match r.u8()? {
        0 => false,
        1 => true,
        _ => return Err(corrupt("bad converged flag")),
    };
    let run_config = r.str()?;
    let labels = LabelAlphabet::new(r.strings()?).map_err(|e| corrupt(e.to_string()))?;
    let features = FeatureAlphabet::from_features(r.strings()?).map_err(|e| corrupt(e.to_string()))?;
    let count = r.u64()?;
    if count > ((body.len() - r.pos) / 8) as u64 {
        return Err(corrupt("weight array longer than the file"));
    }
    let weights = (0..count).map(|_| r.f64()).collect::<Result<Vec<_>, _>>()?;
    if r.pos != body.len() {
        return Err(corrupt("trailing bytes after weights"));
    }
    let metadata = ModelMetadata {
        train,
        iterations,
        objective,
        converged,
        run_config,
    };
    CrfModel::new(labels, features, template, weights, metadata).map_err(|e| corrupt(e.to_string()))
}

pub fn read_model(path: &Path) -> Result<CrfModel, ModelFileError> {
    load_model(&std::fs::read(path)?)
}

pub fn write_model(path: &Path, model: &CrfModel) -> std::io::Result<()> {
    crate::io::write_atomic(path, &save_model(model))
}
