//! Chinese n-gram lexicon and question lattices.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NgramError {
    #[error("max_n must be at least 2, got {0}")]
    MaxN(usize),
    #[error("min_freq must be at least 1")]
    MinFreq,
    #[error("lexicon line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconConfig {
    pub max_n: usize,
    pub min_freq: usize,
    /// Keep only the first `max_entries` ids; `None` keeps all.
    #[serde(default)]
    pub max_entries: Option<usize>,
}

impl Default for LexiconConfig {
    fn default() -> Self {
        LexiconConfig {
            max_n: 4,
            min_freq: 5,
            max_entries: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub ngram: String,
    pub freq: usize,
}

/// N-grams with dense ids; `entries[id]` is the n-gram with that id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Lexicon {
    pub max_n: usize,
    pub min_freq: usize,
    entries: Vec<LexiconEntry>,
    index: HashMap<String, usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NgramMatch {
    pub start: usize,
    pub len: usize,
    pub id: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NgramLattice {
    pub chars: Vec<char>,
    pub matches: Vec<NgramMatch>,
}

fn admissible(chars: &[char]) -> bool {
    chars.iter().all(|c| !c.is_ascii() && !c.is_whitespace())
}

impl Lexicon {
    pub fn from_entries(max_n: usize, min_freq: usize, entries: Vec<LexiconEntry>) -> Self {
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.ngram.clone(), i))
            .collect();
        Lexicon {
            max_n,
            min_freq,
            entries,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn id(&self, ngram: &str) -> Option<usize> {
        self.index.get(ngram).copied()
    }

    pub fn ngram(&self, id: usize) -> Option<&str> {
        self.entries.get(id).map(|e| e.ngram.as_str())
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    /// `ngram<TAB>id<TAB>freq` lines in id order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (id, e) in self.entries.iter().enumerate() {
            writeln!(out, "{}\t{}\t{}", e.ngram, id, e.freq).expect("write to string");
        }
        out
    }

    pub fn from_tsv(text: &str, config: &LexiconConfig) -> Result<Self, NgramError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let bad = |message: &str| NgramError::Format {
                line: i + 1,
                message: message.to_string(),
            };
            let mut parts = line.split('\t');
            let (Some(ngram), Some(id), Some(freq), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(bad("expected three tab-separated fields"));
            };
            let id: usize = id.parse().map_err(|_| bad("bad id"))?;
            let freq: usize = freq.parse().map_err(|_| bad("bad frequency"))?;
            if id != entries.len() {
                return Err(bad("ids must be dense and in order"));
            }
            entries.push(LexiconEntry {
                ngram: ngram.to_string(),
                freq,
            });
        }
        Ok(Self::from_entries(config.max_n, config.min_freq, entries))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), NgramError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_tsv()).map_err(|e| NgramError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>, config: &LexiconConfig) -> Result<Self, NgramError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| NgramError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_tsv(&text, config)
    }
}

pub fn build_lexicon<S: AsRef<str>>(
    questions: &[S],
    config: &LexiconConfig,
) -> Result<Lexicon, NgramError> {
    if config.max_n < 2 {
        return Err(NgramError::MaxN(config.max_n));
    }
    if config.min_freq < 1 {
        return Err(NgramError::MinFreq);
    }
    let mut counts: HashMap<String, usize> = HashMap::new();
    for q in questions {
        let chars: Vec<char> = q.as_ref().chars().collect();
        for start in 0..chars.len() {
            for len in 2..=config.max_n.min(chars.len() - start) {
                let window = &chars[start..start + len];
                if admissible(window) {
                    *counts.entry(window.iter().collect()).or_default() += 1;
                }
            }
        }
    }
    let mut entries: Vec<LexiconEntry> = counts
        .into_iter()
        .filter(|(_, f)| *f >= config.min_freq)
        .map(|(ngram, freq)| LexiconEntry { ngram, freq })
        .collect();
    entries.sort_by(|a, b| b.freq.cmp(&a.freq).then_with(|| a.ngram.cmp(&b.ngram)));
    if let Some(cap) = config.max_entries {
        entries.truncate(cap);
    }
    Ok(Lexicon::from_entries(config.max_n, config.min_freq, entries))
}

/// Every window of the question found in the lexicon, sorted by
/// `(start, len)`.
pub fn match_ngrams(question: &str, lex: &Lexicon) -> NgramLattice {
    let chars: Vec<char> = question.chars().collect();
    let mut matches = Vec::new();
    let longest = lex
        .entries
        .iter()
        .map(|e| e.ngram.chars().count())
        .max()
        .unwrap_or(0);
    let mut buf = String::new();
    for start in 0..chars.len() {
        buf.clear();
        buf.push(chars[start]);
        for len in 2..=longest.min(chars.len() - start) {
            buf.push(chars[start + len - 1]);
            if let Some(id) = lex.id(&buf) {
                matches.push(NgramMatch { start, len, id });
            }
        }
    }
    NgramLattice { chars, matches }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(max_n: usize, min_freq: usize) -> LexiconConfig {
        LexiconConfig {
            max_n,
            min_freq,
            max_entries: None,
        }
    }

    #[test]
    fn repeated_bigram_is_kept() {
        let lex = build_lexicon(&["电影电影", "电影"], &cfg(4, 2)).unwrap();
        assert_eq!(lex.ngram(0), Some("电影"));
        assert_eq!(lex.entries[0].freq, 3);
        assert!(lex.id("影电").is_none());
    }

    #[test]
    fn huge_threshold_is_empty() {
        let lex = build_lexicon(&["电影电影"], &cfg(4, 1_000_000)).unwrap();
        assert!(lex.is_empty());
        let lat = match_ngrams("电影", &lex);
        assert_eq!(lat.chars.len(), 2);
        assert!(lat.matches.is_empty());
    }

    #[test]
    fn ascii_and_space_are_excluded() {
        let lex = build_lexicon(&["a电 影b"], &cfg(4, 1)).unwrap();
        assert!(lex.is_empty());
    }

    #[test]
    fn overlapping_matches_all_kept() {
        let lex = build_lexicon(&["甲乙丙"], &cfg(3, 1)).unwrap();
        let lat = match_ngrams("甲乙丙", &lex);
        let spans: Vec<(usize, usize)> = lat.matches.iter().map(|m| (m.start, m.len)).collect();
        assert_eq!(spans, vec![(0, 2), (0, 3), (1, 2)]);
    }

    #[test]
    fn ids_break_ties_lexicographically() {
        let lex = build_lexicon(&["乙甲", "甲乙"], &cfg(2, 1)).unwrap();
        assert_eq!(lex.ngram(0), Some("乙甲"));
        assert_eq!(lex.ngram(1), Some("甲乙"));
    }

    #[test]
    fn tsv_round_trip_is_exact() {
        let lex = build_lexicon(&["电影评分电影", "评分最高的电影"], &cfg(4, 1)).unwrap();
        let text = lex.to_tsv();
        let back = Lexicon::from_tsv(&text, &cfg(4, 1)).unwrap();
        assert_eq!(back, lex);
        assert_eq!(back.to_tsv(), text);
    }

    #[test]
    fn cap_truncates_by_id() {
        let config = LexiconConfig {
            max_entries: Some(1),
            ..cfg(3, 1)
        };
        let lex = build_lexicon(&["甲乙甲乙"], &config).unwrap();
        assert_eq!(lex.len(), 1);
        assert_eq!(lex.ngram(0), Some("甲乙"));
    }

    #[test]
    fn bad_config_rejected() {
        assert!(build_lexicon(&["甲"], &cfg(1, 1)).is_err());
        assert!(build_lexicon(&["甲"], &cfg(2, 0)).is_err());
    }
}
