//! Training-data generation for translation language modeling: masks whole
//! target words, never source tokens.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::MaskedInput;
use crate::error::{Error, Result};
use crate::subword::{subword_segment, Segmenter};

pub const TLM_MASK_PERCENTAGES: [u32; 3] = [15, 20, 25];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TlmMaskConfig {
    percent: u32,
    seed: u64,
}

impl TlmMaskConfig {
    pub fn new(percent: u32, seed: u64) -> Result<Self> {
        if !TLM_MASK_PERCENTAGES.contains(&percent) {
            return Err(Error::precondition("mask percentage must be 15, 20 or 25"));
        }
        Ok(Self { percent, seed })
    }

    pub fn percent(&self) -> u32 {
        self.percent
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TlmExample {
    pub input: MaskedInput,
    /// Unmasked target tokens.
    pub original: Vec<String>,
    /// Target word indices that were masked, ascending.
    pub masked_words: Vec<usize>,
}

/// Masks shuffled whole target words until at least `p%` of the target
/// tokens are covered. One RNG stream is used for the whole corpus.
pub fn generate_tlm_examples(
    pairs: &[(Vec<String>, Vec<String>)],
    segmenter: &dyn Segmenter,
    config: &TlmMaskConfig,
) -> Result<Vec<TlmExample>> {
    if pairs.is_empty() {
        return Err(Error::precondition("TLM generation needs a non-empty corpus"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::with_capacity(pairs.len());
    for (source, target) in pairs {
        if target.is_empty() {
            return Err(Error::precondition("TLM pair has an empty target"));
        }
        let src_tokens = if source.is_empty() {
            Vec::new()
        } else {
            subword_segment(source, segmenter)?.tokens()
        };
        let map = subword_segment(target, segmenter)?;
        let total = map.token_count();
        let need = (config.percent as usize * total).div_ceil(100);

        let mut order: Vec<usize> = (0..map.word_count()).collect();
        order.shuffle(&mut rng);
        let mut covered = 0;
        let mut masked_words = Vec::new();
        for w in order {
            if covered >= need {
                break;
            }
            covered += map.pieces(w).len();
            masked_words.push(w);
        }
        masked_words.sort_unstable();

        let original = map.tokens();
        let mut masked: Vec<Option<String>> = original.iter().cloned().map(Some).collect();
        for &w in &masked_words {
            for t in map.token_range(w) {
                masked[t] = None;
            }
        }
        out.push(TlmExample {
            input: MaskedInput { source: src_tokens, target: masked },
            original,
            masked_words,
        });
    }
    Ok(out)
}
