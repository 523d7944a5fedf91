//! Word alignment and formatting transfer.
//!
//! Sub-word alignment scores come from a provider. They are folded into a
//! word-level [`AlignmentMatrix`], which drives the source heatmap and the
//! transfer of paired and unpaired tags onto a translation.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::doc::{FormattingTag, Item, StyleId, TaggedSegment};
use crate::error::{Error, Result};
use crate::subword::SubwordMap;
use crate::suggest::{Span, SpanKind};

/// Sparse sub-word scores: `(target token, source token, score)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubwordAlignment {
    target_tokens: usize,
    source_tokens: usize,
    links: Vec<(usize, usize, f64)>,
}

impl SubwordAlignment {
    pub fn new(target_tokens: usize, source_tokens: usize, links: Vec<(usize, usize, f64)>) -> Result<Self> {
        for &(t, s, score) in &links {
            if t >= target_tokens || s >= source_tokens {
                return Err(Error::precondition(format!(
                    "link ({t}, {s}) is outside a {target_tokens}x{source_tokens} alignment"
                )));
            }
            if !(0.0..=1.0).contains(&score) {
                return Err(Error::precondition(format!("alignment score {score} is outside [0, 1]")));
            }
        }
        Ok(Self { target_tokens, source_tokens, links })
    }

    pub fn target_tokens(&self) -> usize {
        self.target_tokens
    }

    pub fn source_tokens(&self) -> usize {
        self.source_tokens
    }

    pub fn links(&self) -> &[(usize, usize, f64)] {
        &self.links
    }
}

/// Dense target-word by source-word scores. A pair is linked iff its score
/// is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentMatrix {
    targets: usize,
    sources: usize,
    scores: Vec<f64>,
}

impl AlignmentMatrix {
    pub fn zeros(targets: usize, sources: usize) -> Self {
        Self { targets, sources, scores: vec![0.0; targets * sources] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.scores[i * n + i] = 1.0;
        }
        m
    }

    /// Builds from rows (one per target word); rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>], sources: usize) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), sources);
        for (t, row) in rows.iter().enumerate() {
            if row.len() != sources {
                return Err(Error::precondition("alignment rows differ in length"));
            }
            for (s, &v) in row.iter().enumerate() {
                m.set(t, s, v)?;
            }
        }
        Ok(m)
    }

    pub fn target_len(&self) -> usize {
        self.targets
    }

    pub fn source_len(&self) -> usize {
        self.sources
    }

    pub fn score(&self, t: usize, s: usize) -> f64 {
        assert!(t < self.targets && s < self.sources, "alignment index out of range");
        self.scores[t * self.sources + s]
    }

    pub fn set(&mut self, t: usize, s: usize, score: f64) -> Result<()> {
        if t >= self.targets || s >= self.sources {
            return Err(Error::precondition("alignment index out of range"));
        }
        if !(0.0..=1.0).contains(&score) {
            return Err(Error::precondition(format!("alignment score {score} is outside [0, 1]")));
        }
        self.scores[t * self.sources + s] = score;
        Ok(())
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.scores[t * self.sources..(t + 1) * self.sources]
    }

    pub fn is_linked(&self, t: usize, s: usize) -> bool {
        self.score(t, s) > 0.0
    }

    /// Linked pairs in row-major order.
    pub fn links(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for t in 0..self.targets {
            for s in 0..self.sources {
                let v = self.score(t, s);
                if v > 0.0 {
                    out.push((t, s, v));
                }
            }
        }
        out
    }

    /// Replaces target rows `start..end` with `count` unaligned rows.
    pub fn splice_targets(&mut self, start: usize, end: usize, count: usize) -> Result<()> {
        if start > end || end > self.targets {
            return Err(Error::precondition("target splice is out of range"));
        }
        let s = self.sources;
        self.scores.splice(start * s..end * s, core::iter::repeat_n(0.0, count * s));
        self.targets = self.targets - (end - start) + count;
        Ok(())
    }

    fn best_target(&self, s: usize) -> Option<usize> {
        argmax((0..self.targets).map(|t| self.score(t, s)))
    }
}

fn argmax(values: impl Iterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.enumerate() {
        if v > 0.0 && best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// Folds sub-word scores into word scores: a word pair takes the maximum
/// score over its sub-word pairs.
pub fn to_word_alignment(sub: &SubwordAlignment, source: &SubwordMap, target: &SubwordMap) -> Result<AlignmentMatrix> {
    if sub.target_tokens != target.token_count() || sub.source_tokens != source.token_count() {
        return Err(Error::precondition(format!(
            "alignment is {}x{} but the sentences have {}x{} tokens",
            sub.target_tokens,
            sub.source_tokens,
            target.token_count(),
            source.token_count()
        )));
    }
    let mut m = AlignmentMatrix::zeros(target.word_count(), source.word_count());
    for &(t, s, score) in &sub.links {
        let (tw, sw) = (target.word_of_token(t), source.word_of_token(s));
        let cell = &mut m.scores[tw * m.sources + sw];
        if score > *cell {
            *cell = score;
        }
    }
    Ok(m)
}

/// Highest-scoring source word for target word `t`; ties go to the lowest
/// index, and a row of zeros (or an index out of range) gives `None`.
pub fn best_source_for(t: usize, a: &AlignmentMatrix) -> Option<usize> {
    if t >= a.targets {
        return None;
    }
    argmax(a.row(t).iter().copied())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub weights: Vec<f64>,
    /// Set when the span has no alignment at all and weights are uniform.
    pub low_confidence: bool,
}

/// Source-word weights for a selected target span, normalized to sum to 1.
pub fn heatmap(span: Span, a: &AlignmentMatrix) -> Result<Heatmap> {
    if span.kind == SpanKind::GapInsertion {
        return Err(Error::precondition("heatmap needs a span of words, not a gap"));
    }
    span.validate(a.targets)?;
    if a.sources == 0 {
        return Err(Error::precondition("heatmap needs a non-empty source sentence"));
    }
    let mut weights = vec![0.0; a.sources];
    for t in span.start..span.end {
        for (w, v) in weights.iter_mut().zip(a.row(t)) {
            *w += v;
        }
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        let u = 1.0 / a.sources as f64;
        return Ok(Heatmap { weights: vec![u; a.sources], low_confidence: true });
    }
    for w in &mut weights {
        *w /= total;
    }
    Ok(Heatmap { weights, low_confidence: false })
}

/// An unpaired tag placed before target word `slot` (or at the end when
/// `slot` equals the word count), wrapped in `styles`.
struct Placed {
    slot: usize,
    style: StyleId,
    styles: Vec<StyleId>,
}

fn check_dims<S: AsRef<str>>(source: &TaggedSegment, target_words: &[S], a: &AlignmentMatrix) -> Result<()> {
    if a.targets != target_words.len() || a.sources != source.word_count() {
        return Err(Error::precondition(format!(
            "alignment is {}x{} but the sentences have {}x{} words",
            a.targets,
            a.sources,
            target_words.len(),
            source.word_count()
        )));
    }
    Ok(())
}

fn target_styles(source: &TaggedSegment, n: usize, a: &AlignmentMatrix) -> Vec<Vec<StyleId>> {
    let stacks = source.word_style_stacks();
    (0..n)
        .map(|t| best_source_for(t, a).map(|s| stacks[s].clone()).unwrap_or_default())
        .collect()
}

fn place_unpaired(source: &TaggedSegment, a: &AlignmentMatrix, word_styles: &[Vec<StyleId>]) -> Vec<Placed> {
    let mut placed: Vec<Placed> = source
        .unpaired_anchors()
        .into_iter()
        .map(|anchor| {
            // walk left past source words that align to nothing
            let slot = anchor
                .preceding_word
                .and_then(|w| (0..=w).rev().find_map(|s| a.best_target(s)))
                .map_or(0, |t| t + 1);
            let prev = slot.checked_sub(1).map(|t| &word_styles[t]);
            let next = word_styles.get(slot);
            let fits = |len: usize| {
                let p = &anchor.enclosing[..len];
                prev.is_some_and(|d| d.starts_with(p)) || next.is_some_and(|d| d.starts_with(p))
            };
            let keep = (0..=anchor.enclosing.len()).rev().find(|&l| fits(l)).unwrap_or(0);
            Placed { slot, style: anchor.style, styles: anchor.enclosing[..keep].to_vec() }
        })
        .collect();
    // stable: tags sharing a slot keep source order
    placed.sort_by_key(|p| p.slot);
    placed
}

/// Moves the open-style stack to `want`: closes down to the longest common
/// prefix, then opens the rest.
fn restyle(out: &mut Vec<Item>, stack: &mut Vec<StyleId>, want: &[StyleId]) {
    let common = stack.iter().zip(want).take_while(|(a, b)| a == b).count();
    while stack.len() > common {
        let s = stack.pop().unwrap_or(StyleId(0));
        out.push(Item::Tag(FormattingTag::close(s.0)));
    }
    for s in &want[common..] {
        out.push(Item::Tag(FormattingTag::open(s.0)));
        stack.push(*s);
    }
}

fn render<S: AsRef<str>>(words: &[S], word_styles: &[Vec<StyleId>], unpaired: &[Placed], index: usize) -> Result<TaggedSegment> {
    let mut out = Vec::new();
    let mut stack = Vec::new();
    let mut pending = unpaired.iter().peekable();
    for slot in 0..=words.len() {
        while let Some(p) = pending.next_if(|p| p.slot == slot) {
            restyle(&mut out, &mut stack, &p.styles);
            out.push(Item::Tag(FormattingTag::unpaired(p.style.0)));
        }
        if let Some(w) = words.get(slot) {
            restyle(&mut out, &mut stack, &word_styles[slot]);
            out.push(Item::word(w.as_ref()));
        }
    }
    restyle(&mut out, &mut stack, &[]);
    Ok(TaggedSegment::from_items(out)?.with_index(index))
}

/// Gives every target word the paired styles enclosing its best source
/// word; consecutive words with a common style prefix share one tag pair.
pub fn transfer_paired_tags<S: AsRef<str>>(source: &TaggedSegment, target_words: &[S], a: &AlignmentMatrix) -> Result<TaggedSegment> {
    check_dims(source, target_words, a)?;
    let styles = target_styles(source, target_words.len(), a);
    render(target_words, &styles, &[], source.index())
}

/// Places each unpaired tag after the target word best aligned with the
/// source word before it; tags with no such word go before the first word.
pub fn insert_unpaired_tags<S: AsRef<str>>(source: &TaggedSegment, target_words: &[S], a: &AlignmentMatrix) -> Result<TaggedSegment> {
    check_dims(source, target_words, a)?;
    let plain = vec![Vec::new(); target_words.len()];
    let placed = place_unpaired(source, a, &plain);
    render(target_words, &plain, &placed, source.index())
}

/// Paired and unpaired transfer in one pass.
pub fn transfer_tags<S: AsRef<str>>(source: &TaggedSegment, target_words: &[S], a: &AlignmentMatrix) -> Result<TaggedSegment> {
    check_dims(source, target_words, a)?;
    let styles = target_styles(source, target_words.len(), a);
    let placed = place_unpaired(source, a, &styles);
    render(target_words, &styles, &placed, source.index())
}

/// Produces sub-word alignments for a sentence pair.
pub trait Aligner {
    fn align(&self, source_tokens: &[String], target_tokens: &[String]) -> Result<SubwordAlignment>;
}

impl<T: Aligner + ?Sized> Aligner for &T {
    fn align(&self, source_tokens: &[String], target_tokens: &[String]) -> Result<SubwordAlignment> {
        (**self).align(source_tokens, target_tokens)
    }
}

/// Links target token `j` to source token `floor((j + 0.5) * S / T)` with
/// score 1; a monotone guess used when no aligner is configured.
#[derive(Debug, Clone, Copy, Default)]
pub struct DiagonalAligner;

impl Aligner for DiagonalAligner {
    fn align(&self, source_tokens: &[String], target_tokens: &[String]) -> Result<SubwordAlignment> {
        let (s, t) = (source_tokens.len(), target_tokens.len());
        let links = if s == 0 {
            Vec::new()
        } else {
            (0..t).map(|j| (j, ((2 * j + 1) * s / (2 * t)).min(s - 1), 1.0)).collect()
        };
        SubwordAlignment::new(t, s, links)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc::{parse_tagged_text, tokenize, StyleTable};
    use crate::subword::{subword_segment, CharGroupSegmenter};
    use alloc::string::ToString;

    fn styles() -> StyleTable {
        (1..=4).map(|i| (i, format!("style-{i}"))).collect()
    }

    fn seg(markup: &str) -> TaggedSegment {
        parse_tagged_text(markup, &styles()).unwrap()
    }

    #[test]
    fn identity_subwords_give_identity_words() {
        let words = tokenize("a b c");
        let map = subword_segment(&words, &CharGroupSegmenter::default()).unwrap();
        let sub = SubwordAlignment::new(3, 3, (0..3).map(|i| (i, i, 1.0)).collect()).unwrap();
        assert_eq!(to_word_alignment(&sub, &map, &map).unwrap(), AlignmentMatrix::identity(3));
    }

    #[test]
    fn any_subword_rule() {
        let seg = CharGroupSegmenter::new(2);
        let src = subword_segment(&tokenize("a b c d"), &seg).unwrap();
        let tgt = subword_segment(&tokenize("wxyz"), &seg).unwrap();
        assert_eq!(tgt.token_count(), 2);
        let sub = SubwordAlignment::new(2, 4, vec![(1, 3, 0.7)]).unwrap();
        let m = to_word_alignment(&sub, &src, &tgt).unwrap();
        assert_eq!(m.links(), vec![(0, 3, 0.7)]);
        let wrong = SubwordAlignment::new(3, 4, vec![]).unwrap();
        assert!(to_word_alignment(&wrong, &src, &tgt).is_err());
        assert!(SubwordAlignment::new(2, 4, vec![(2, 0, 0.5)]).is_err());
        assert!(SubwordAlignment::new(2, 4, vec![(0, 0, 1.5)]).is_err());
    }

    #[test]
    fn argmax_and_ties() {
        let m = AlignmentMatrix::from_rows(&[vec![0.1, 0.8, 0.3], vec![0.0; 3], vec![0.5, 0.5, 0.0]], 3).unwrap();
        assert_eq!(best_source_for(0, &m), Some(1));
        assert_eq!(best_source_for(1, &m), None);
        assert_eq!(best_source_for(2, &m), Some(0));
    }

    #[test]
    fn heatmap_cases() {
        let m = AlignmentMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 0.5, 0.0], vec![0.0, 0.0, 0.5]], 3).unwrap();
        assert_eq!(heatmap(Span::replacement(0, 1), &m).unwrap().weights, vec![1.0, 0.0, 0.0]);
        assert_eq!(heatmap(Span::replacement(1, 3), &m).unwrap().weights, vec![0.0, 0.5, 0.5]);
        assert!(heatmap(Span::gap(1), &m).is_err());
        let z = heatmap(Span::replacement(0, 1), &AlignmentMatrix::zeros(1, 4)).unwrap();
        assert!(z.low_confidence);
        assert_eq!(z.weights, vec![0.25; 4]);
    }

    #[test]
    fn paired_identity_and_runs() {
        let src = seg("a <s 1>b</s 1> c");
        let out = transfer_paired_tags(&src, &tokenize("x y z"), &AlignmentMatrix::identity(3)).unwrap();
        assert_eq!(out.to_string(), "x <s 1>y</s 1> z");

        let m = AlignmentMatrix::from_rows(&[vec![0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]], 3).unwrap();
        let out = transfer_paired_tags(&src, &tokenize("x y z"), &m).unwrap();
        assert_eq!(out.to_string(), "<s 1>x y</s 1> z");
    }

    #[test]
    fn paired_follows_permutation() {
        let src = seg("a b <s 1>c</s 1>");
        let m = AlignmentMatrix::from_rows(&[vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]], 3).unwrap();
        let out = transfer_paired_tags(&src, &tokenize("x y z"), &m).unwrap();
        assert_eq!(out.to_string(), "<s 1>x</s 1> y z");
    }

    #[test]
    fn unaligned_target_words_are_plain() {
        let src = seg("<s 1>a b</s 1>");
        let m = AlignmentMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0]], 2).unwrap();
        let out = transfer_paired_tags(&src, &tokenize("x y z"), &m).unwrap();
        assert_eq!(out.to_string(), "<s 1>x</s 1> y <s 1>z</s 1>");
    }

    #[test]
    fn unpaired_placement() {
        let src = seg("a b c <x 2/> d");
        let out = insert_unpaired_tags(&src, &tokenize("w x y z"), &AlignmentMatrix::identity(4)).unwrap();
        assert_eq!(out.to_string(), "w x y <x 2/> z");

        let src = seg("<x 3/> a b");
        let m = AlignmentMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]], 2).unwrap();
        let out = insert_unpaired_tags(&src, &tokenize("y x"), &m).unwrap();
        assert_eq!(out.to_string(), "<x 3/> y x");

        // reordered: source word 0 lands on target word 1
        let src = seg("a <x 3/> b");
        let out = insert_unpaired_tags(&src, &tokenize("y x"), &m).unwrap();
        assert_eq!(out.to_string(), "y x <x 3/>");
    }

    #[test]
    fn unpaired_with_unaligned_anchor_walks_left() {
        let src = seg("a b <x 2/> c");
        let m = AlignmentMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]], 3).unwrap();
        let out = insert_unpaired_tags(&src, &tokenize("p q"), &m).unwrap();
        assert_eq!(out.to_string(), "p <x 2/> q");
    }

    #[test]
    fn combined_identity_reproduces_nested_markup() {
        let markup = "<s 1>a <s 2>b <x 3/></s 2></s 1> c <x 4/>";
        let src = seg(markup);
        let out = transfer_tags(&src, &tokenize("a b c"), &AlignmentMatrix::identity(3)).unwrap();
        assert_eq!(out.items(), src.items());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let src = seg("a b");
        assert!(transfer_tags(&src, &tokenize("x"), &AlignmentMatrix::identity(2)).is_err());
    }

    #[test]
    fn splice_keeps_other_rows() {
        let mut m = AlignmentMatrix::identity(3);
        m.splice_targets(1, 2, 2).unwrap();
        assert_eq!(m.target_len(), 4);
        assert_eq!(m.links(), vec![(0, 0, 1.0), (3, 2, 1.0)]);
    }

    #[test]
    fn diagonal_aligner_spreads_tokens() {
        let toks = |n: usize| (0..n).map(|i| i.to_string()).collect::<Vec<_>>();
        let a = DiagonalAligner.align(&toks(4), &toks(2)).unwrap();
        assert_eq!(a.links(), &[(0, 1, 1.0), (1, 3, 1.0)]);
        let a = DiagonalAligner.align(&toks(3), &toks(3)).unwrap();
        assert_eq!(a.links(), &[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)]);
        assert!(DiagonalAligner.align(&[], &toks(2)).unwrap().links().is_empty());
    }
}
