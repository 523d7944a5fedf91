//! Reference mask scorer: an interpolated target-side trigram model over
//! sub-word tokens, weighted by lexical association with the source words.
//!
//! For a mask at position `q` the unnormalized score of token `t` is
//!
//! ```text
//! P(t | t[q-2], t[q-1]) * P(r | t[q-1], t) * (LEX_FLOOR + assoc(t, source))
//! ```
//!
//! where `r` is the token right of the mask (omitted when it is itself a
//! mask) and `assoc` is the best Dice coefficient between `t` and any source
//! word, counted over sentence pairs of the training corpus.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{MaskScorer, TokenProb};
use crate::error::{Error, Result};
use crate::lexicon::normalize;
use crate::subword::{subword_segment, tokens_to_words, Segmenter};

const BOS: &str = "<s>";
const EOS: &str = "</s>";
const UNKNOWN: &str = "<unk>";
// trigram, bigram, unigram, uniform
const LAMBDAS: [f64; 4] = [0.5, 0.3, 0.15, 0.05];
const LEX_FLOOR: f64 = 0.1;

#[derive(Debug, Clone, Default)]
pub struct NgramScorer {
    vocab: Vec<String>,
    unigrams: BTreeMap<String, usize>,
    unigram_total: usize,
    bigrams: BTreeMap<(String, String), usize>,
    bigram_ctx: BTreeMap<String, usize>,
    trigrams: BTreeMap<(String, String, String), usize>,
    trigram_ctx: BTreeMap<(String, String), usize>,
    dice: BTreeMap<(String, String), f64>,
    marker: String,
}

impl NgramScorer {
    /// Trains on `(source words, target words)` pairs; target words are
    /// segmented with `segmenter`.
    pub fn train(pairs: &[(Vec<String>, Vec<String>)], segmenter: &dyn Segmenter) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::precondition("n-gram scorer needs a non-empty corpus"));
        }
        let mut s = NgramScorer { marker: segmenter.continuation_marker().to_string(), ..Default::default() };
        let mut pair_counts: BTreeMap<(String, String), usize> = BTreeMap::new();
        let mut src_counts: BTreeMap<String, usize> = BTreeMap::new();
        let mut tgt_counts: BTreeMap<String, usize> = BTreeMap::new();
        let mut vocab = BTreeSet::new();

        for (source, target) in pairs {
            if target.is_empty() {
                continue;
            }
            let tokens = subword_segment(target, segmenter)?.tokens();
            let mut seq: Vec<&str> = alloc::vec![BOS, BOS];
            seq.extend(tokens.iter().map(String::as_str));
            seq.push(EOS);
            for i in 2..seq.len() {
                let (a, b, c) = (seq[i - 2], seq[i - 1], seq[i]);
                *s.unigrams.entry(c.to_string()).or_default() += 1;
                s.unigram_total += 1;
                *s.bigrams.entry((b.to_string(), c.to_string())).or_default() += 1;
                *s.bigram_ctx.entry(b.to_string()).or_default() += 1;
                *s.trigrams.entry((a.to_string(), b.to_string(), c.to_string())).or_default() += 1;
                *s.trigram_ctx.entry((a.to_string(), b.to_string())).or_default() += 1;
            }
            vocab.extend(tokens.iter().cloned());

            let src_set: BTreeSet<String> = source.iter().map(|w| normalize(w)).filter(|w| !w.is_empty()).collect();
            let tgt_set: BTreeSet<&String> = tokens.iter().collect();
            for w in &src_set {
                *src_counts.entry(w.clone()).or_default() += 1;
            }
            for t in &tgt_set {
                *tgt_counts.entry((*t).clone()).or_default() += 1;
            }
            for w in &src_set {
                for t in &tgt_set {
                    *pair_counts.entry((w.clone(), (*t).clone())).or_default() += 1;
                }
            }
        }
        if vocab.is_empty() {
            return Err(Error::precondition("n-gram scorer corpus has no target tokens"));
        }
        for ((w, t), c) in pair_counts {
            let denom = (src_counts[&w] + tgt_counts[&t]) as f64;
            s.dice.insert((w, t), 2.0 * c as f64 / denom);
        }
        s.vocab = vocab.into_iter().collect();
        Ok(s)
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocab
    }

    fn lm(&self, a: &str, b: &str, c: &str) -> f64 {
        let ratio = |num: Option<&usize>, den: Option<&usize>| match (num, den) {
            (Some(n), Some(d)) if *d > 0 => *n as f64 / *d as f64,
            _ => 0.0,
        };
        // BTreeMap lookups need owned keys; the corpus is desk-sized
        let tri = ratio(
            self.trigrams.get(&(a.to_string(), b.to_string(), c.to_string())),
            self.trigram_ctx.get(&(a.to_string(), b.to_string())),
        );
        let bi = ratio(self.bigrams.get(&(b.to_string(), c.to_string())), self.bigram_ctx.get(b));
        let uni = ratio(self.unigrams.get(c), Some(&self.unigram_total));
        let uniform = 1.0 / (self.vocab.len() + 1) as f64;
        LAMBDAS[0] * tri + LAMBDAS[1] * bi + LAMBDAS[2] * uni + LAMBDAS[3] * uniform
    }

    fn lexical(&self, source_words: &[String], token: &str) -> f64 {
        source_words
            .iter()
            .filter_map(|w| self.dice.get(&(w.clone(), token.to_string())))
            .fold(0.0, |m, v| m.max(*v))
    }
}

fn context_token(target: &[Option<String>], i: isize) -> &str {
    if i < 0 {
        BOS
    } else {
        target[i as usize].as_deref().unwrap_or(UNKNOWN)
    }
}

impl MaskScorer for NgramScorer {
    fn score(&self, source: &[String], target: &[Option<String>], q: usize, top_n: usize) -> Result<Vec<TokenProb>> {
        if q >= target.len() || target[q].is_some() {
            return Err(Error::precondition("mask index does not point at a mask"));
        }
        let source_words: Vec<String> = tokens_to_words(source, &self.marker)
            .iter()
            .map(|w| normalize(w))
            .collect();
        let left2 = context_token(target, q as isize - 2);
        let left1 = context_token(target, q as isize - 1);
        let right: Option<&str> = match target.get(q + 1) {
            None => Some(EOS),
            Some(Some(t)) => Some(t.as_str()),
            Some(None) => None,
        };

        let mut scored: Vec<(f64, &String)> = self
            .vocab
            .iter()
            .map(|t| {
                let mut p = self.lm(left2, left1, t);
                if let Some(r) = right {
                    p *= self.lm(left1, t, r);
                }
                p *= LEX_FLOOR + self.lexical(&source_words, t);
                (p, t)
            })
            .collect();
        let total: f64 = scored.iter().map(|(p, _)| p).sum();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
        Ok(scored
            .into_iter()
            .take(top_n)
            .map(|(p, t)| TokenProb::new(t.clone(), (p / total).clamp(f64::MIN_POSITIVE, 1.0)))
            .collect())
    }
}
