use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub const BLEU_MAX_ORDER: usize = 4;

/// Numerator used for an n-gram order with no clipped matches.
pub const BLEU_EPSILON: f64 = 1e-9;

/// Sufficient statistics for corpus BLEU.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub matches: [usize; BLEU_MAX_ORDER],
    pub totals: [usize; BLEU_MAX_ORDER],
    pub hyp_len: usize,
    pub ref_len: usize,
}

impl BleuStats {
    pub fn add_sentence<H: AsRef<str>, R: AsRef<str>>(&mut self, hypothesis: &[H], reference: &[R]) {
        self.hyp_len += hypothesis.len();
        self.ref_len += reference.len();
        for n in 1..=BLEU_MAX_ORDER {
            let hyp_counts = ngram_counts(hypothesis, n);
            let ref_counts = ngram_counts(reference, n);
            for (gram, count) in &hyp_counts {
                let clip = ref_counts.get(gram).copied().unwrap_or(0);
                self.matches[n - 1] += (*count).min(clip);
                self.totals[n - 1] += *count;
            }
        }
    }

    /// BLEU in [0, 1]. Orders with no hypothesis n-grams at all are left out
    /// of the geometric mean; orders with zero matches use [`BLEU_EPSILON`].
    pub fn score(&self) -> f64 {
        if self.hyp_len == 0 {
            return 0.0;
        }
        let mut log_sum = 0.0;
        let mut orders = 0;
        for n in 0..BLEU_MAX_ORDER {
            if self.totals[n] == 0 {
                continue;
            }
            let num = if self.matches[n] == 0 { BLEU_EPSILON } else { self.matches[n] as f64 };
            log_sum += libm::log(num / self.totals[n] as f64);
            orders += 1;
        }
        let precision = libm::exp(log_sum / orders as f64);
        let brevity = if self.hyp_len >= self.ref_len {
            1.0
        } else {
            libm::exp(1.0 - self.ref_len as f64 / self.hyp_len as f64)
        };
        (brevity * precision).min(1.0)
    }
}

fn ngram_counts<S: AsRef<str>>(words: &[S], n: usize) -> BTreeMap<Vec<&str>, usize> {
    let mut counts = BTreeMap::new();
    if words.len() >= n {
        for window in words.windows(n) {
            let gram: Vec<&str> = window.iter().map(AsRef::as_ref).collect();
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Corpus-level BLEU over parallel hypothesis/reference lists (one reference
/// per hypothesis).
pub fn bleu<H: AsRef<str>, R: AsRef<str>>(hypotheses: &[Vec<H>], references: &[Vec<R>]) -> Result<f64> {
    if hypotheses.len() != references.len() {
        return Err(Error::precondition("BLEU needs as many references as hypotheses"));
    }
    if references.is_empty() || references.iter().all(Vec::is_empty) {
        return Err(Error::precondition("BLEU needs non-empty references"));
    }
    let mut stats = BleuStats::default();
    for (h, r) in hypotheses.iter().zip(references) {
        stats.add_sentence(h, r);
    }
    Ok(stats.score())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;
    use alloc::vec;

    fn w(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn identical_corpus_scores_one() {
        let refs = vec![w("the cat sat on the mat"), w("a b")];
        assert_eq!(bleu(&refs, &refs).unwrap(), 1.0);
    }

    #[test]
    fn clipped_unigram_precision() {
        let mut stats = BleuStats::default();
        stats.add_sentence(&w("the the the"), &w("the cat sat"));
        assert_eq!(stats.matches[0], 1);
        assert_eq!(stats.totals[0], 3);
        let score = stats.score();
        assert!(score < 0.34, "{score}");
        // by hand: (1/3 * 1e-9/2 * 1e-9/1)^(1/3), brevity 1
        let expected = libm::cbrt((1.0 / 3.0) * (1e-9 / 2.0) * 1e-9);
        assert!((score - expected).abs() < 1e-15);
    }

    #[test]
    fn empty_hypothesis_scores_zero() {
        let hyps: Vec<Vec<String>> = vec![vec![]];
        assert_eq!(bleu(&hyps, &[w("a b c")]).unwrap(), 0.0);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        assert!(bleu(&[w("a")], &[w("a"), w("b")]).is_err());
    }

    #[test]
    fn brevity_penalty_applies() {
        let score = bleu(&[w("a b c d")], &[w("a b c d e f g h")]).unwrap();
        assert!((score - libm::exp(1.0 - 2.0)).abs() < 1e-12);
    }
}
