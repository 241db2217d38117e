use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VqlError {
    #[error("syntax error at byte {position}: found {found}, expected one of {}", expected.join(" | "))]
    Syntax {
        position: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("semantic error: {0}")]
    Semantic(String),
    #[error("resolution error: {0}")]
    Resolution(String),
}

impl VqlError {
    pub fn semantic(msg: impl Into<String>) -> Self {
        VqlError::Semantic(msg.into())
    }

    pub fn resolution(msg: impl Into<String>) -> Self {
        VqlError::Resolution(msg.into())
    }
}
