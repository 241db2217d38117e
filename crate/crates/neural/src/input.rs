//! Question and schema serialization for the encoder.

use serde::{Deserialize, Serialize};
use t2v_core::dataset::DatabaseSchema;

use crate::config::ModelConfig;
use crate::error::{NeuralError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TokenKind {
    Cls,
    QChar,
    Sep,
    Table,
    Column,
}

impl TokenKind {
    pub const COUNT: usize = 5;

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputToken {
    pub kind: TokenKind,
    pub surface: String,
    pub embedding_id: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointerSlot {
    pub table: String,
    /// `None` for a table slot.
    pub column: Option<String>,
    /// Token position of the element.
    pub position: usize,
}

impl PointerSlot {
    /// Surface form in VQL: `table` or `table.column`.
    pub fn surface(&self) -> String {
        match &self.column {
            Some(c) => format!("{}.{}", self.table, c),
            None => self.table.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerializedInput {
    pub tokens: Vec<InputToken>,
    pub pointer_map: Vec<PointerSlot>,
    /// Number of question characters; they sit at positions `1..=question_len`.
    pub question_len: usize,
}

impl SerializedInput {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn char_position(&self, i: usize) -> usize {
        1 + i
    }
}

/// FNV-1a, stable across platforms and releases.
fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn bucket(kind: TokenKind, surface: &str, buckets: usize) -> usize {
    let tag = match kind {
        TokenKind::Cls | TokenKind::Sep => b'S',
        TokenKind::QChar => b'Q',
        TokenKind::Table | TokenKind::Column => b'I',
    };
    let bytes = std::iter::once(tag).chain(surface.to_lowercase().into_bytes());
    (fnv1a(bytes) % buckets as u64) as usize
}

/// `[CLS] q₁…q_m [SEP] T₁ [SEP] c₁₁ [SEP] c₁₂ … [SEP] T₂ …`: every schema
/// element is preceded by a separator and owns one pointer slot.
pub fn serialize_input(
    question: &str,
    schema: &DatabaseSchema,
    config: &ModelConfig,
) -> Result<SerializedInput> {
    if question.trim().is_empty() {
        return Err(NeuralError::EmptyQuestion);
    }
    let b = config.input_buckets;
    let tok = |kind, surface: &str| InputToken {
        kind,
        surface: surface.to_string(),
        embedding_id: bucket(kind, surface, b),
    };
    let mut tokens = vec![tok(TokenKind::Cls, "[CLS]")];
    let mut question_len = 0;
    for c in question.chars() {
        tokens.push(tok(TokenKind::QChar, c.encode_utf8(&mut [0; 4])));
        question_len += 1;
    }
    let mut pointer_map = Vec::new();
    for t in &schema.tables {
        tokens.push(tok(TokenKind::Sep, "[SEP]"));
        pointer_map.push(PointerSlot { table: t.name.clone(), column: None, position: tokens.len() });
        tokens.push(tok(TokenKind::Table, &t.name));
        for c in &t.columns {
            tokens.push(tok(TokenKind::Sep, "[SEP]"));
            pointer_map.push(PointerSlot {
                table: t.name.clone(),
                column: Some(c.name.clone()),
                position: tokens.len(),
            });
            tokens.push(tok(TokenKind::Column, &c.name));
        }
    }
    if tokens.len() > config.max_len {
        return Err(NeuralError::Length { len: tokens.len(), max: config.max_len });
    }
    Ok(SerializedInput { tokens, pointer_map, question_len })
}
