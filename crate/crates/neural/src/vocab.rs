//! Decoder vocabulary and the mapping between VQL text and decoder targets.

use std::collections::{BTreeSet, HashMap};

use t2v_core::vql::{tokenize, Literal, TokenKind as Lex, VqlError};

use crate::input::PointerSlot;

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";

/// Every keyword and symbol canonical VQL can contain.
pub const KEYWORDS: &[&str] = &[
    "Visualize", "BAR", "PIE", "LINE", "SCATTER", "STACKED", "GROUPED", "SELECT", ",", "(", ")",
    "*", ".", "COUNT", "SUM", "AVG", "MIN", "MAX", "COLOR", "FROM", "JOIN", "ON", "WHERE", "AND",
    "BETWEEN", "IN", "LIKE", "=", "!=", "<", "<=", ">", ">=", "GROUP", "BY", "BIN", "YEAR",
    "MONTH", "WEEKDAY", "DAY", "INTERVAL", "ORDER", "X", "Y", "ASC", "DESC",
];

/// A VQL token as the decoder sees it: a vocabulary word or a reference to
/// a schema element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Piece {
    Word(String),
    Table(String),
    Column(String, String),
}

/// Split VQL text into pieces. `t.c` becomes one column piece and the word
/// after FROM or JOIN a table piece; literals keep their quoted surface.
pub fn vql_pieces(text: &str) -> Result<Vec<Piece>, VqlError> {
    let toks = tokenize(text)?;
    let mut out = Vec::with_capacity(toks.len());
    let mut i = 0;
    while i < toks.len() {
        let piece = match &toks[i].kind {
            Lex::Word(w) => {
                let dotted = matches!(toks.get(i + 1).map(|t| &t.kind), Some(Lex::Dot));
                match (dotted, toks.get(i + 2).map(|t| &t.kind)) {
                    (true, Some(Lex::Word(c))) => {
                        i += 2;
                        Piece::Column(w.clone(), c.clone())
                    }
                    _ => {
                        let after_from = i > 0
                            && matches!(&toks[i - 1].kind, Lex::Word(k) if k.eq_ignore_ascii_case("FROM") || k.eq_ignore_ascii_case("JOIN"));
                        if after_from {
                            Piece::Table(w.clone())
                        } else {
                            Piece::Word(w.clone())
                        }
                    }
                }
            }
            Lex::Number(n) => Piece::Word(Literal::Number(*n).to_string()),
            Lex::Str(s) => Piece::Word(Literal::String(s.clone()).to_string()),
            _ => Piece::Word(toks[i].describe()),
        };
        out.push(piece);
        i += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocab {
    pub fn new(words: Vec<String>) -> Self {
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Vocab { words, index }
    }

    /// Specials, then keywords, then the literal words found in `texts` in
    /// sorted order.
    pub fn build<'a>(texts: impl IntoIterator<Item = &'a str>) -> Result<Self, VqlError> {
        let mut words: Vec<String> = [BOS, EOS].iter().chain(KEYWORDS).map(|s| s.to_string()).collect();
        let known: BTreeSet<String> = words.iter().cloned().collect();
        let mut literals = BTreeSet::new();
        for t in texts {
            for p in vql_pieces(t)? {
                if let Piece::Word(w) = p {
                    if !known.contains(&w) {
                        literals.insert(w);
                    }
                }
            }
        }
        words.extend(literals);
        Ok(Vocab::new(words))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: usize) -> Option<&str> {
        self.words.get(id).map(String::as_str)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn bos(&self) -> usize {
        self.index[BOS]
    }

    pub fn eos(&self) -> usize {
        self.index[EOS]
    }

    /// Target ids for VQL text: vocabulary ids below `len()`, pointer slot
    /// `s` as `len() + s`. Ends with EOS. Returns the offending token on
    /// failure.
    pub fn encode_targets(&self, text: &str, slots: &[PointerSlot]) -> Result<Vec<usize>, String> {
        let pieces = vql_pieces(text).map_err(|e| e.to_string())?;
        let mut out = Vec::with_capacity(pieces.len() + 1);
        for p in pieces {
            let id = match &p {
                Piece::Word(w) => self.id(w).ok_or_else(|| w.clone())?,
                Piece::Table(t) => slots
                    .iter()
                    .position(|s| s.column.is_none() && s.table.eq_ignore_ascii_case(t))
                    .map(|s| self.len() + s)
                    .ok_or_else(|| t.clone())?,
                Piece::Column(t, c) => slots
                    .iter()
                    .position(|s| {
                        s.table.eq_ignore_ascii_case(t)
                            && s.column.as_deref().is_some_and(|sc| sc.eq_ignore_ascii_case(c))
                    })
                    .map(|s| self.len() + s)
                    .ok_or_else(|| format!("{t}.{c}"))?,
            };
            out.push(id);
        }
        out.push(self.eos());
        Ok(out)
    }

    /// Text for a decoded id sequence; a trailing EOS is dropped.
    pub fn decode_targets(&self, ids: &[usize], slots: &[PointerSlot]) -> String {
        let mut parts = Vec::with_capacity(ids.len());
        for &id in ids {
            if id == self.eos() {
                break;
            }
            match self.word(id) {
                Some(w) => parts.push(w.to_string()),
                None => parts.push(slots[id - self.len()].surface()),
            }
        }
        parts.join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pieces_merge_columns_and_tables() {
        let p = vql_pieces("Visualize BAR SELECT t.a , COUNT(*) FROM t WHERE t.b LIKE 'x''y' GROUP BY t.a").unwrap();
        assert_eq!(p[3], Piece::Column("t".into(), "a".into()));
        assert!(p.contains(&Piece::Table("t".into())));
        assert!(p.contains(&Piece::Word("'x''y'".into())));
        assert!(p.contains(&Piece::Word("*".into())));
    }

    #[test]
    fn targets_round_trip() {
        let slots = vec![
            PointerSlot { table: "T".into(), column: None, position: 3 },
            PointerSlot { table: "T".into(), column: Some("A".into()), position: 5 },
        ];
        let text = "Visualize PIE SELECT t.a , COUNT(*) FROM t WHERE t.a > 3 GROUP BY t.a";
        let v = Vocab::build([text]).unwrap();
        assert!(v.id("3").is_some());
        let ids = v.encode_targets(text, &slots).unwrap();
        assert_eq!(*ids.last().unwrap(), v.eos());
        let back = v.decode_targets(&ids, &slots);
        let expected = text.replace("t.a", "T.A").replace("FROM t", "FROM T");
        assert_eq!(t2v_core::vql::parse_vql(&back).unwrap(), t2v_core::vql::parse_vql(&expected).unwrap());
    }
}
