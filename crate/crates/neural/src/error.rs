use thiserror::Error;

#[derive(Debug, Error)]
pub enum NeuralError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("input has {len} tokens, more than max_len {max}")]
    Length { len: usize, max: usize },
    #[error("question is empty")]
    EmptyQuestion,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("token {token:?} of sample {sample} is neither vocabulary nor schema element")]
    Oov { sample: String, token: String },
    #[error("gold vql of sample {sample} does not resolve: {message}")]
    BadGold { sample: String, message: String },
    #[error("unknown db_id {0}")]
    UnknownDatabase(String),
    #[error("non-finite {what} at step {step}")]
    NonFinite { what: &'static str, step: usize },
    #[error("beam width must be at least 1 and k at most width, got width {width}, k {k}")]
    BeamArgs { width: usize, k: usize },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, NeuralError>;
