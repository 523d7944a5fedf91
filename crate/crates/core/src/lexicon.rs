//! Bilingual translation lexicon with association scores.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Lowercases a word and trims surrounding punctuation for lexicon lookups.
pub fn normalize(word: &str) -> String {
    word.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    // normalized source → (target as written, association), sorted by
    // association descending
    by_source: BTreeMap<String, Vec<(String, f64)>>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an entry. Sources are normalized; targets keep their spelling but
    /// match case-insensitively. Scores must lie in [0, 1].
    pub fn insert(&mut self, source: &str, target: &str, score: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&score) {
            return Err(Error::precondition(format!(
                "lexicon score {score} for {source:?} → {target:?} is outside [0, 1]"
            )));
        }
        let entries = self.by_source.entry(normalize(source)).or_default();
        let key = normalize(target);
        match entries.iter_mut().find(|(t, _)| normalize(t) == key) {
            Some(entry) => entry.1 = entry.1.max(score),
            None => entries.push((target.to_string(), score)),
        }
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Ok(())
    }

    /// Parses `source<TAB>target[<TAB>score]` lines. Blank lines and lines
    /// starting with `#` are skipped; a missing score means 1.
    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut lex = Self::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(src), Some(tgt)) = (fields.next(), fields.next()) else {
                return Err(Error::precondition(format!("lexicon line {}: expected two columns", n + 1)));
            };
            let score = match fields.next() {
                Some(s) => s.trim().parse::<f64>().map_err(|_| {
                    Error::precondition(format!("lexicon line {}: bad score {s:?}", n + 1))
                })?,
                None => 1.0,
            };
            lex.insert(src.trim(), tgt.trim(), score)?;
        }
        Ok(lex)
    }

    pub fn association(&self, source: &str, target: &str) -> f64 {
        let target = normalize(target);
        self.by_source
            .get(&normalize(source))
            .and_then(|e| e.iter().find(|(t, _)| normalize(t) == target))
            .map_or(0.0, |(_, s)| *s)
    }

    /// Highest association between `target` and any word of `source`.
    pub fn best_association<S: AsRef<str>>(&self, source: &[S], target: &str) -> f64 {
        source
            .iter()
            .map(|s| self.association(s.as_ref(), target))
            .fold(0.0, f64::max)
    }

    /// Highest-scoring translation of a source word (ties: alphabetical).
    pub fn best_translation(&self, source: &str) -> Option<&str> {
        self.by_source
            .get(&normalize(source))
            .and_then(|e| e.first())
            .map(|(t, _)| t.as_str())
    }

    pub fn len(&self) -> usize {
        self.by_source.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_source.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.by_source
            .iter()
            .flat_map(|(s, e)| e.iter().map(move |(t, v)| (s.as_str(), t.as_str(), *v)))
    }
}

impl core::fmt::Display for Lexicon {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for (s, t, v) in self.entries() {
            writeln!(f, "{s}\t{t}\t{v}")?;
        }
        Ok(())
    }
}

/// Splits a word into leading punctuation, core and trailing punctuation.
pub fn split_punctuation(word: &str) -> (&str, &str, &str) {
    let start = word.find(|c: char| c.is_alphanumeric()).unwrap_or(word.len());
    let end = word
        .rfind(|c: char| c.is_alphanumeric())
        .map_or(start, |i| i + word[i..].chars().next().map_or(1, char::len_utf8));
    (&word[..start], &word[start..end.max(start)], &word[end.max(start)..])
}

pub(crate) fn capitalize_like(template: &str, word: &str) -> String {
    if template.chars().next().is_some_and(char::is_uppercase) {
        let mut chars = word.chars();
        match chars.next() {
            Some(first) => first.to_uppercase().chain(chars).collect(),
            None => String::new(),
        }
    } else {
        word.to_string()
    }
}
