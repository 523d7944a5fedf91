//! Span suggestions conditioned on both sides of the selection.
//!
//! A selected span (or an empty gap) is replaced by 1..=m mask placeholders,
//! each variant is filled left to right by beam search over a [`MaskScorer`],
//! and all completed fills are pooled, deduplicated by surface text and
//! ranked by joint probability.

mod ngram;
mod oracle;
mod tlm;

pub use ngram::NgramScorer;
pub use oracle::OracleScorer;
pub use tlm::{generate_tlm_examples, TlmExample, TlmMaskConfig, TLM_MASK_PERCENTAGES};

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::subword::{detokenize, SubwordMap};

pub const MASK_TOKEN: &str = "<mask>";
pub const SEPARATOR_TOKEN: &str = "</s>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpanKind {
    Replacement,
    GapInsertion,
}

/// Word span over a target sentence; `end` is exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub kind: SpanKind,
}

impl Span {
    pub fn replacement(start: usize, end: usize) -> Self {
        Self { start, end, kind: SpanKind::Replacement }
    }

    pub fn gap(position: usize) -> Self {
        Self { start: position, end: position, kind: SpanKind::GapInsertion }
    }

    /// Interprets `start == end` as a gap and anything else as a replacement.
    pub fn from_bounds(start: usize, end: usize) -> Self {
        if start == end {
            Self::gap(start)
        } else {
            Self::replacement(start, end)
        }
    }

    pub fn validate(&self, word_count: usize) -> Result<()> {
        let ok = match self.kind {
            SpanKind::Replacement => self.start < self.end && self.end <= word_count,
            SpanKind::GapInsertion => self.start == self.end && self.end <= word_count,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::precondition(format!(
                "span {}..{} ({:?}) is invalid for {word_count} words",
                self.start, self.end, self.kind
            )))
        }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuggestConfig {
    /// Largest number of mask placeholders tried.
    pub max_masks: usize,
    /// Beam size, also the number of suggestions returned.
    pub beam: usize,
    /// Rank by mean log-probability per token instead of joint probability.
    pub length_normalize: bool,
}

impl SuggestConfig {
    pub fn new(max_masks: usize, beam: usize) -> Result<Self> {
        if max_masks == 0 || beam == 0 {
            return Err(Error::precondition("mask count and beam size must be positive"));
        }
        Ok(Self { max_masks, beam, length_normalize: false })
    }
}

impl Default for SuggestConfig {
    fn default() -> Self {
        Self { max_masks: 5, beam: 5, length_normalize: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuggestionCandidate {
    pub text: String,
    pub token_count: usize,
    pub joint_log_prob: f64,
}

impl SuggestionCandidate {
    pub fn probability(&self) -> f64 {
        libm::exp(self.joint_log_prob)
    }

    fn rank_score(&self, normalize: bool) -> f64 {
        if normalize {
            self.joint_log_prob / self.token_count.max(1) as f64
        } else {
            self.joint_log_prob
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TokenProb {
    pub token: String,
    pub prob: f64,
}

impl TokenProb {
    pub fn new(token: impl Into<String>, prob: f64) -> Self {
        Self { token: token.into(), prob }
    }
}

/// Predicts tokens for one mask position. Implementations must be
/// deterministic and return probabilities in (0, 1], sorted descending.
pub trait MaskScorer {
    /// `target` holds `None` for masks; `mask_index` is the leftmost
    /// unresolved mask. Returns up to `top_n` candidates.
    fn score(
        &self,
        source: &[String],
        target: &[Option<String>],
        mask_index: usize,
        top_n: usize,
    ) -> Result<Vec<TokenProb>>;
}

impl<T: MaskScorer + ?Sized> MaskScorer for &T {
    fn score(&self, source: &[String], target: &[Option<String>], mask_index: usize, top_n: usize) -> Result<Vec<TokenProb>> {
        (**self).score(source, target, mask_index, top_n)
    }
}

/// Calls the scorer and checks its answer against the contract.
fn query(scorer: &dyn MaskScorer, source: &[String], target: &[Option<String>], mask_index: usize, top_n: usize) -> Result<Vec<TokenProb>> {
    let out = scorer.score(source, target, mask_index, top_n)?;
    let bad = |msg: String| Err(Error::provider("mask-scorer", msg));
    if out.is_empty() {
        return bad("no candidates returned".to_string());
    }
    for (n, tp) in out.iter().enumerate() {
        if !(tp.prob > 0.0 && tp.prob <= 1.0) {
            return bad(format!("probability {} for {:?} is outside (0, 1]", tp.prob, tp.token));
        }
        if n > 0 && out[n - 1].prob < tp.prob {
            return bad("candidates are not sorted by probability".to_string());
        }
        if out[..n].iter().any(|o| o.token == tp.token) {
            return bad(format!("duplicate candidate {:?}", tp.token));
        }
    }
    Ok(out.into_iter().take(top_n).collect())
}

/// A source/target token pair in which some target tokens are masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedInput {
    pub source: Vec<String>,
    pub target: Vec<Option<String>>,
}

impl MaskedInput {
    pub fn mask_positions(&self) -> Vec<usize> {
        self.target
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.is_none().then_some(i))
            .collect()
    }

    pub fn mask_count(&self) -> usize {
        self.target.iter().filter(|t| t.is_none()).count()
    }

    /// Target side rendered with `<mask>` placeholders.
    pub fn target_text(&self) -> Vec<String> {
        self.target
            .iter()
            .map(|t| t.clone().unwrap_or_else(|| MASK_TOKEN.to_string()))
            .collect()
    }

    /// Source tokens, separator, then the target side.
    pub fn to_sequence(&self) -> Vec<String> {
        let mut seq = self.source.clone();
        seq.push(SEPARATOR_TOKEN.to_string());
        seq.extend(self.target_text());
        seq
    }
}

/// Builds `m` inputs; input `i` (1-based) has the span's sub-words, or the
/// gap, replaced by `i` masks.
pub fn make_masked_variants(source: &SubwordMap, target: &SubwordMap, span: Span, m: usize) -> Result<Vec<MaskedInput>> {
    span.validate(target.word_count())?;
    if m == 0 {
        return Err(Error::precondition("need at least one mask"));
    }
    let tokens = target.tokens();
    let from = target.token_offset(span.start);
    let to = target.token_offset(span.end);
    let src = source.tokens();
    Ok((1..=m)
        .map(|i| {
            let mut t: Vec<Option<String>> = tokens[..from].iter().cloned().map(Some).collect();
            t.extend(core::iter::repeat_n(None, i));
            t.extend(tokens[to..].iter().cloned().map(Some));
            MaskedInput { source: src.clone(), target: t }
        })
        .collect())
}

/// A completed fill of every mask in a variant.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamFill {
    pub tokens: Vec<String>,
    pub log_prob: f64,
}

fn by_score(a: &BeamFill, b: &BeamFill) -> Ordering {
    b.log_prob.total_cmp(&a.log_prob).then_with(|| a.tokens.cmp(&b.tokens))
}

/// Left-to-right beam search over the masks of `variant`; returns at most
/// `k` completed fills, best first (ties: lexicographic token order).
pub fn fill_masks_beam(variant: &MaskedInput, scorer: &dyn MaskScorer, k: usize) -> Result<Vec<BeamFill>> {
    let positions = variant.mask_positions();
    if positions.is_empty() {
        return Err(Error::precondition("variant has no masks"));
    }
    if k == 0 {
        return Err(Error::precondition("beam size must be positive"));
    }
    let mut beams = alloc::vec![BeamFill { tokens: Vec::new(), log_prob: 0.0 }];
    let mut target = variant.target.clone();
    for (step, &pos) in positions.iter().enumerate() {
        let mut expanded = Vec::with_capacity(beams.len() * k);
        for beam in &beams {
            for (filled, &p) in beam.tokens.iter().zip(&positions) {
                target[p] = Some(filled.clone());
            }
            for &p in &positions[step..] {
                target[p] = None;
            }
            for tp in query(scorer, &variant.source, &target, pos, k)? {
                let mut tokens = beam.tokens.clone();
                tokens.push(tp.token);
                expanded.push(BeamFill { tokens, log_prob: beam.log_prob + libm::log(tp.prob) });
            }
        }
        expanded.sort_by(by_score);
        expanded.truncate(k);
        beams = expanded;
    }
    Ok(beams)
}

/// Suggestions for `span`: fills of all 1..=m mask variants, detokenized,
/// deduplicated by text (keeping the better score) and truncated to the beam
/// size. For replacements, a fill equal to the original text is dropped.
pub fn suggest(
    source: &SubwordMap,
    target: &SubwordMap,
    span: Span,
    config: &SuggestConfig,
    scorer: &dyn MaskScorer,
) -> Result<Vec<SuggestionCandidate>> {
    let config = SuggestConfig::new(config.max_masks, config.beam).map(|c| SuggestConfig {
        length_normalize: config.length_normalize,
        ..c
    })?;
    let variants = make_masked_variants(source, target, span, config.max_masks)?;
    let original = (span.kind == SpanKind::Replacement)
        .then(|| target.words()[span.start..span.end].join(" "));

    let mut best: BTreeMap<String, SuggestionCandidate> = BTreeMap::new();
    for variant in &variants {
        for fill in fill_masks_beam(variant, scorer, config.beam)? {
            let text = detokenize(&fill.tokens, target.marker());
            if text.is_empty() || original.as_deref() == Some(text.as_str()) {
                continue;
            }
            let cand = SuggestionCandidate {
                text: text.clone(),
                token_count: fill.tokens.len(),
                joint_log_prob: fill.log_prob,
            };
            match best.get(&text) {
                Some(prev) if prev.rank_score(config.length_normalize) >= cand.rank_score(config.length_normalize) => {}
                _ => {
                    best.insert(text, cand);
                }
            }
        }
    }
    let mut out: Vec<SuggestionCandidate> = best.into_values().collect();
    out.sort_by(|a, b| {
        b.rank_score(config.length_normalize)
            .total_cmp(&a.rank_score(config.length_normalize))
            .then_with(|| a.text.cmp(&b.text))
    });
    out.truncate(config.beam);
    Ok(out)
}
