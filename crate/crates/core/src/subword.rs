//! Sub-word segmentation of word sequences.
//!
//! A [`SubwordMap`] keeps the raw pieces of every word (their concatenation
//! is the word) and renders a flat model-facing token list in which every
//! piece after the first in a word carries the segmenter's continuation
//! marker.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};

pub const DEFAULT_CONTINUATION: &str = "##";

/// Splits single words into sub-word pieces.
pub trait Segmenter {
    fn segment_word(&self, word: &str) -> Result<Vec<String>>;

    fn continuation_marker(&self) -> &str {
        DEFAULT_CONTINUATION
    }
}

impl<T: Segmenter + ?Sized> Segmenter for &T {
    fn segment_word(&self, word: &str) -> Result<Vec<String>> {
        (**self).segment_word(word)
    }

    fn continuation_marker(&self) -> &str {
        (**self).continuation_marker()
    }
}

/// Reference segmenter: consecutive groups of at most `max_chars` characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CharGroupSegmenter {
    max_chars: usize,
}

impl CharGroupSegmenter {
    pub fn new(max_chars: usize) -> Self {
        assert!(max_chars > 0, "pieces need at least one character");
        Self { max_chars }
    }
}

impl Default for CharGroupSegmenter {
    fn default() -> Self {
        Self::new(3)
    }
}

impl Segmenter for CharGroupSegmenter {
    fn segment_word(&self, word: &str) -> Result<Vec<String>> {
        let chars: Vec<char> = word.chars().collect();
        Ok(chars.chunks(self.max_chars).map(|c| c.iter().collect()).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubwordMap {
    pieces: Vec<Vec<String>>,
    offsets: Vec<usize>,
    marker: String,
}

impl SubwordMap {
    /// Builds a map from per-word pieces, validating that every word has at
    /// least one non-empty piece.
    pub fn from_pieces(pieces: Vec<Vec<String>>, marker: impl Into<String>) -> Result<Self> {
        let mut offsets = Vec::with_capacity(pieces.len() + 1);
        let mut total = 0;
        for (n, word) in pieces.iter().enumerate() {
            if word.is_empty() || word.iter().any(String::is_empty) {
                return Err(Error::precondition(format!("word {n} has an empty piece list or empty piece")));
            }
            offsets.push(total);
            total += word.len();
        }
        offsets.push(total);
        Ok(Self { pieces, offsets, marker: marker.into() })
    }

    pub fn word_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn token_count(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn marker(&self) -> &str {
        &self.marker
    }

    pub fn pieces(&self, word: usize) -> &[String] {
        &self.pieces[word]
    }

    pub fn word(&self, word: usize) -> String {
        self.pieces[word].concat()
    }

    pub fn words(&self) -> Vec<String> {
        self.pieces.iter().map(|p| p.concat()).collect()
    }

    /// Flat token span of a word.
    pub fn token_range(&self, word: usize) -> Range<usize> {
        self.offsets[word]..self.offsets[word + 1]
    }

    /// Flat token offset where word `word` starts; `word_count()` maps to the
    /// end of the sequence.
    pub fn token_offset(&self, word: usize) -> usize {
        self.offsets[word]
    }

    /// The word that owns flat token `token`.
    pub fn word_of_token(&self, token: usize) -> usize {
        match self.offsets.binary_search(&token) {
            Ok(mut w) => {
                // skip words that would be empty (not constructible, but keep the lookup total)
                while w + 1 < self.offsets.len() && self.offsets[w + 1] == token {
                    w += 1;
                }
                w.min(self.pieces.len().saturating_sub(1))
            }
            Err(w) => w - 1,
        }
    }

    /// Model-facing tokens with continuation markers.
    pub fn tokens(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.token_count());
        for word in &self.pieces {
            for (n, piece) in word.iter().enumerate() {
                if n == 0 {
                    out.push(piece.clone());
                } else {
                    out.push(format!("{}{}", self.marker, piece));
                }
            }
        }
        out
    }
}

/// Segments every word, checking that the provider's pieces concatenate back
/// to the word.
pub fn subword_segment<S: AsRef<str>>(words: &[S], segmenter: &dyn Segmenter) -> Result<SubwordMap> {
    if words.is_empty() {
        return Err(Error::precondition("cannot segment an empty word list"));
    }
    let mut pieces = Vec::with_capacity(words.len());
    for word in words {
        let word = word.as_ref();
        let split = segmenter.segment_word(word)?;
        if split.concat() != word || split.iter().any(String::is_empty) {
            return Err(Error::provider(
                "segmenter",
                format!("pieces {split:?} do not reassemble word {word:?}"),
            ));
        }
        pieces.push(split);
    }
    SubwordMap::from_pieces(pieces, segmenter.continuation_marker())
}

/// Groups model tokens into words using the continuation marker. A leading
/// continuation token starts a word of its own.
pub fn tokens_to_words<S: AsRef<str>>(tokens: &[S], marker: &str) -> Vec<String> {
    let mut words: Vec<String> = Vec::new();
    for token in tokens {
        let token = token.as_ref();
        match token.strip_prefix(marker).filter(|_| !marker.is_empty()) {
            Some(rest) if !words.is_empty() => {
                if let Some(last) = words.last_mut() {
                    last.push_str(rest)
                }
            }
            Some(rest) => words.push(rest.to_string()),
            None => words.push(token.to_string()),
        }
    }
    words.retain(|w| !w.is_empty());
    words
}

/// Joins model tokens back into whitespace-separated text.
pub fn detokenize<S: AsRef<str>>(tokens: &[S], marker: &str) -> String {
    tokens_to_words(tokens, marker).join(" ")
}
