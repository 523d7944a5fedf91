//! Mask scorer that knows the post-edit of one MT sentence.
//!
//! The scorer recognises which span a masked input corresponds to: the
//! right-hand context is an untouched suffix of the MT tokens (spans are
//! corrected left to right) and the left-hand context is a prefix of the
//! post-edit. If the number of masks equals the gold fill length the gold
//! token gets probability 1; otherwise it gets 0.5 so wrong-length variants
//! rank below. Filler tokens pad the answer to `top_n`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{MaskScorer, TokenProb};
use crate::error::{Error, Result};
use crate::qe::GoldCorrections;
use crate::subword::{subword_segment, Segmenter, SubwordMap};

const FILLER_PROB: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleScorer {
    mt_tokens: Vec<String>,
    mt_offsets: Vec<usize>,
    pe_tokens: Vec<String>,
    // pe token offset where the insertion before MT word j starts
    gap_start: Vec<usize>,
    // pe token offset where the replacement of MT word j starts
    word_start: Vec<usize>,
}

impl OracleScorer {
    pub fn new(mt: &SubwordMap, gold: &GoldCorrections, segmenter: &dyn Segmenter) -> Result<Self> {
        let n = mt.word_count();
        if gold.word_fills.len() != n || gold.gap_fills.len() != n + 1 {
            return Err(Error::precondition("gold corrections do not match the MT sentence"));
        }
        let tokens_of = |words: &[String]| -> Result<Vec<String>> {
            if words.is_empty() {
                Ok(Vec::new())
            } else {
                Ok(subword_segment(words, segmenter)?.tokens())
            }
        };
        let mut pe_tokens = Vec::new();
        let mut gap_start = Vec::with_capacity(n + 1);
        let mut word_start = Vec::with_capacity(n + 1);
        for j in 0..=n {
            gap_start.push(pe_tokens.len());
            pe_tokens.extend(tokens_of(&gold.gap_fills[j])?);
            word_start.push(pe_tokens.len());
            if j < n {
                pe_tokens.extend(tokens_of(&gold.word_fills[j])?);
            }
        }
        Ok(Self {
            mt_tokens: mt.tokens(),
            mt_offsets: (0..=n).map(|j| mt.token_offset(j)).collect(),
            pe_tokens,
            gap_start,
            word_start,
        })
    }

    pub fn post_edit_tokens(&self) -> &[String] {
        &self.pe_tokens
    }

    /// MT word index where the untouched right context starts.
    fn right_context_word(&self, right: &[Option<String>]) -> Option<usize> {
        let from = self.mt_tokens.len().checked_sub(right.len())?;
        let matches = right
            .iter()
            .zip(&self.mt_tokens[from..])
            .all(|(r, m)| r.as_deref() == Some(m.as_str()));
        if !matches {
            return None;
        }
        self.mt_offsets.iter().position(|o| *o == from)
    }
}

impl MaskScorer for OracleScorer {
    fn score(&self, _source: &[String], target: &[Option<String>], q: usize, top_n: usize) -> Result<Vec<TokenProb>> {
        let last_mask = target
            .iter()
            .rposition(Option::is_none)
            .ok_or_else(|| Error::precondition("input has no mask"))?;
        if q > last_mask || target[q].is_some() {
            return Err(Error::precondition("mask index does not point at a mask"));
        }
        let right = &target[last_mask + 1..];
        let fill_end = target.len() - right.len();
        let prefix_ok = q < self.pe_tokens.len()
            && target[..q]
                .iter()
                .zip(&self.pe_tokens)
                .all(|(t, p)| t.as_deref() == Some(p.as_str()));

        let mut out = Vec::with_capacity(top_n.max(1));
        if prefix_ok {
            let exact = self
                .right_context_word(right)
                .is_some_and(|e| fill_end == self.gap_start[e] || fill_end == self.word_start[e]);
            out.push(TokenProb::new(self.pe_tokens[q].clone(), if exact { 1.0 } else { 0.5 }));
        }
        let mut k = 1;
        while out.len() < top_n.max(1) {
            let filler = format!("<oracle-{k}>");
            k += 1;
            if out.iter().any(|t| t.token == filler) {
                continue;
            }
            out.push(TokenProb::new(filler, FILLER_PROB));
        }
        Ok(out)
    }
}
