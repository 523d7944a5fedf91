//! Correction-protocol evaluation: pick BAD spans from QE labels, try the
//! top-k suggestions for each, and measure TER and BLEU against the
//! post-edits.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::doc::tokenize;
use crate::error::{Error, Result};
use crate::metrics::{bleu, ter};
use crate::qe::{derive_gold_labels, gold_corrections, predict, QeLabel, QeProvider};
use crate::subword::{subword_segment, Segmenter};
use crate::suggest::{suggest, MaskScorer, OracleScorer, Span, SpanKind, SuggestConfig};

pub const TOP_K_CHOICES: [usize; 3] = [1, 3, 5];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triplet {
    pub source: Vec<String>,
    pub mt: Vec<String>,
    pub post_edit: Vec<String>,
}

impl Triplet {
    pub fn new(source: Vec<String>, mt: Vec<String>, post_edit: Vec<String>) -> Result<Self> {
        if source.is_empty() || mt.is_empty() || post_edit.is_empty() {
            return Err(Error::precondition("triplet fields must be non-empty"));
        }
        Ok(Self { source, mt, post_edit })
    }

    /// Parses `source \t mt \t post_edit`.
    pub fn from_tsv_line(line: &str) -> Result<Self> {
        let mut cols = line.split('\t');
        let (Some(s), Some(m), Some(p), None) = (cols.next(), cols.next(), cols.next(), cols.next()) else {
            return Err(Error::precondition(format!("expected 3 tab-separated columns in {line:?}")));
        };
        Self::new(tokenize(s), tokenize(m), tokenize(p))
    }
}

/// Reads a triplet file; blank lines and `#` comments are skipped.
pub fn parse_triplets(text: &str) -> Result<Vec<Triplet>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(n, l)| {
            Triplet::from_tsv_line(l).map_err(|e| Error::precondition(format!("line {}: {e}", n + 1)))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Oracle,
    Predicted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarnessConfig {
    pub selection: Selection,
    pub top_k: usize,
    pub suggest: SuggestConfig,
    /// Also correct BAD gaps with insertions.
    pub gaps: bool,
    /// Handed to seeded providers; the harness itself draws no randomness.
    pub seed: u64,
}

impl HarnessConfig {
    pub fn new(selection: Selection, top_k: usize, suggest: SuggestConfig) -> Result<Self> {
        if !TOP_K_CHOICES.contains(&top_k) {
            return Err(Error::precondition("top-k must be 1, 3 or 5"));
        }
        Ok(Self { selection, top_k, suggest, gaps: true, seed: 0 })
    }
}

/// Supplies the mask scorer for each triplet.
pub trait ScorerSource {
    fn scorer_for<'a>(&'a self, triplet: &Triplet) -> Result<Box<dyn MaskScorer + 'a>>;
}

/// The same scorer for every sentence.
pub struct SharedScorer<'s>(pub &'s dyn MaskScorer);

impl ScorerSource for SharedScorer<'_> {
    fn scorer_for<'a>(&'a self, _: &Triplet) -> Result<Box<dyn MaskScorer + 'a>> {
        Ok(Box::new(self.0))
    }
}

/// An [`OracleScorer`] built from each triplet's post-edit.
pub struct OracleScorers<'s>(pub &'s dyn Segmenter);

impl ScorerSource for OracleScorers<'_> {
    fn scorer_for<'a>(&'a self, triplet: &Triplet) -> Result<Box<dyn MaskScorer + 'a>> {
        let gold = gold_corrections(&triplet.mt, &triplet.post_edit)?;
        let mt = subword_segment(&triplet.mt, self.0)?;
        Ok(Box::new(OracleScorer::new(&mt, &gold, self.0)?))
    }
}

/// Replacement spans for runs of BAD words and insertion spans for BAD gaps,
/// ordered left to right. A gap strictly inside a replacement is absorbed by
/// it; an insertion sorts before a replacement starting at the same word.
pub fn correction_spans(words: &[QeLabel], gaps: &[QeLabel], use_gaps: bool) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut i = 0;
    while i < words.len() {
        if words[i] == QeLabel::Bad {
            let start = i;
            while i < words.len() && words[i] == QeLabel::Bad {
                i += 1;
            }
            spans.push(Span::replacement(start, i));
        } else {
            i += 1;
        }
    }
    if use_gaps {
        for (g, label) in gaps.iter().enumerate() {
            let interior = spans
                .iter()
                .any(|s| s.kind == SpanKind::Replacement && s.start < g && g < s.end);
            if *label == QeLabel::Bad && !interior {
                spans.push(Span::gap(g));
            }
        }
    }
    spans.sort_by_key(|s| (s.start, s.kind == SpanKind::Replacement));
    spans
}

fn with_sentence(index: usize, err: Error) -> Error {
    match err {
        Error::Provider { provider, message } => Error::Provider { provider, message: format!("sentence {index}: {message}") },
        Error::Precondition(m) => Error::Precondition(format!("sentence {index}: {m}")),
        other => other,
    }
}

/// Corrects one MT sentence. Spans come from the original labels and are
/// applied in one pass; for each span the keep-original choice and the
/// top-k suggestions compete on sentence TER against the post-edit, ties
/// going to keep-original and then to the better-ranked suggestion.
pub fn correct_sentence(
    triplet: &Triplet,
    config: &HarnessConfig,
    scorer: &dyn MaskScorer,
    qe: &dyn QeProvider,
    segmenter: &dyn Segmenter,
) -> Result<Vec<String>> {
    let labels = match config.selection {
        Selection::Oracle => derive_gold_labels(&triplet.mt, &triplet.post_edit)?,
        Selection::Predicted => predict(&triplet.source, &triplet.mt, qe)?.words,
    };
    let spans = correction_spans(&labels.word_labels(), &labels.gap_labels(), config.gaps);
    let source = subword_segment(&triplet.source, segmenter)?;
    let mut current = triplet.mt.clone();
    let mut shift = 0isize;
    for span in spans {
        let start = (span.start as isize + shift) as usize;
        let end = (span.end as isize + shift) as usize;
        let here = Span { start, end, kind: span.kind };
        let target = subword_segment(&current, segmenter)?;
        let candidates = suggest(&source, &target, here, &config.suggest, scorer)?;

        let mut best_edits = ter(&current, &triplet.post_edit)?.edits;
        let mut best: Option<Vec<String>> = None;
        for cand in candidates.iter().take(config.top_k) {
            let fill = tokenize(&cand.text);
            if fill.is_empty() {
                continue;
            }
            let mut next = Vec::with_capacity(current.len() + fill.len());
            next.extend_from_slice(&current[..start]);
            next.extend(fill.iter().cloned());
            next.extend_from_slice(&current[end..]);
            let edits = ter(&next, &triplet.post_edit)?.edits;
            if edits < best_edits {
                best_edits = edits;
                best = Some(fill);
            }
        }
        if let Some(fill) = best {
            shift += fill.len() as isize - (end - start) as isize;
            current.splice(start..end, fill);
        }
    }
    Ok(current)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    /// Percent.
    pub ter: f64,
    /// Percent.
    pub bleu: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub baseline: Scores,
    pub corrected: Scores,
    pub deltas: Scores,
    pub outputs: Vec<Vec<String>>,
}

/// Corpus TER (total edits over total reference words) and BLEU, in percent.
pub fn corpus_scores(hypotheses: &[Vec<String>], references: &[Vec<String>]) -> Result<Scores> {
    if hypotheses.is_empty() || hypotheses.len() != references.len() {
        return Err(Error::precondition("corpus scoring needs matching non-empty lists"));
    }
    let (mut edits, mut words) = (0usize, 0usize);
    for (h, r) in hypotheses.iter().zip(references) {
        let t = ter(h, r)?;
        edits += t.edits;
        words += t.reference_len;
    }
    let ter = if words == 0 { 0.0 } else { 100.0 * edits as f64 / words as f64 };
    Ok(Scores { ter, bleu: 100.0 * bleu(hypotheses, references)? })
}

pub fn run(
    data: &[Triplet],
    config: &HarnessConfig,
    scorers: &dyn ScorerSource,
    qe: &dyn QeProvider,
    segmenter: &dyn Segmenter,
) -> Result<Report> {
    if data.is_empty() {
        return Err(Error::precondition("the evaluation dataset is empty"));
    }
    let mut outputs = Vec::with_capacity(data.len());
    for (i, t) in data.iter().enumerate() {
        let out = scorers
            .scorer_for(t)
            .and_then(|s| correct_sentence(t, config, s.as_ref(), qe, segmenter))
            .map_err(|e| with_sentence(i, e))?;
        outputs.push(out);
    }
    report(data, outputs)
}

/// Builds the report from already corrected outputs.
pub fn report(data: &[Triplet], outputs: Vec<Vec<String>>) -> Result<Report> {
    let refs: Vec<Vec<String>> = data.iter().map(|t| t.post_edit.clone()).collect();
    let mts: Vec<Vec<String>> = data.iter().map(|t| t.mt.clone()).collect();
    let baseline = corpus_scores(&mts, &refs)?;
    let corrected = corpus_scores(&outputs, &refs)?;
    let deltas = Scores { ter: corrected.ter - baseline.ter, bleu: corrected.bleu - baseline.bleu };
    Ok(Report { baseline, corrected, deltas, outputs })
}

/// Rounds to two decimals with a clean zero, so `-0.001` prints as `0.00`.
fn round2(v: f64) -> f64 {
    let r = libm::round(v * 100.0) / 100.0;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// `25.36 (-6.01)`
pub fn format_cell(value: f64, delta: f64) -> String {
    format!("{:.2} ({:+.2})", round2(value), round2(delta))
}

impl Report {
    pub fn baseline_row(&self) -> String {
        format!("{:.2} & {:.2}", round2(self.baseline.ter), round2(self.baseline.bleu))
    }

    /// TER and BLEU cells with their deltas, `&`-separated.
    pub fn corrected_row(&self) -> String {
        format!(
            "{} & {}",
            format_cell(self.corrected.ter, self.deltas.ter),
            format_cell(self.corrected.bleu, self.deltas.bleu)
        )
    }

    pub fn table(&self, label: &str) -> String {
        let width = label.len().max(8);
        format!(
            "{:<width$}  TER            BLEU\n{:<width$}  {:<13}  {:.2}\n{:<width$}  {:<13}  {}\n",
            "",
            "Baseline",
            format!("{:.2}", round2(self.baseline.ter)),
            round2(self.baseline.bleu),
            label,
            format_cell(self.corrected.ter, self.deltas.ter),
            format_cell(self.corrected.bleu, self.deltas.bleu),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qe::{OracleQe, RawQe};
    use crate::subword::CharGroupSegmenter;
    use crate::suggest::TokenProb;
    use alloc::vec;

    fn t(s: &str, m: &str, p: &str) -> Triplet {
        Triplet::new(tokenize(s), tokenize(m), tokenize(p)).unwrap()
    }

    struct Fixed(Vec<(&'static str, f64)>);
    impl MaskScorer for Fixed {
        fn score(&self, _: &[String], _: &[Option<String>], _: usize, n: usize) -> Result<Vec<TokenProb>> {
            Ok(self.0.iter().take(n).map(|(t, p)| TokenProb::new(*t, *p)).collect())
        }
    }

    fn cfg(sel: Selection, k: usize) -> HarnessConfig {
        HarnessConfig::new(sel, k, SuggestConfig::new(1, 5).unwrap()).unwrap()
    }

    #[test]
    fn spans_merge_runs_and_absorb_interior_gaps() {
        use QeLabel::{Bad as B, Ok as O};
        let spans = correction_spans(&[O, B, B, O], &[B, O, B, O, B], true);
        assert_eq!(spans, vec![Span::gap(0), Span::replacement(1, 3), Span::gap(4)]);
        let spans = correction_spans(&[O, B, O], &[O, B, B, O], true);
        assert_eq!(spans, vec![Span::gap(1), Span::replacement(1, 2), Span::gap(2)]);
        assert_eq!(correction_spans(&[O, B, O], &[O, B, B, O], false), vec![Span::replacement(1, 2)]);
    }

    #[test]
    fn all_ok_leaves_mt_alone() {
        let tr = t("a b", "x y", "x y");
        let seg = CharGroupSegmenter::default();
        let out = correct_sentence(&tr, &cfg(Selection::Oracle, 1), &Fixed(vec![("q", 0.9)]), &OracleQe::new(), &seg).unwrap();
        assert_eq!(out, tr.mt);
    }

    #[test]
    fn rank_two_reference_needs_top_three() {
        let tr = t("a b c", "x y z", "x w z");
        let seg = CharGroupSegmenter::new(8);
        let scorer = Fixed(vec![("v", 0.5), ("w", 0.3), ("u", 0.2)]);
        let one = correct_sentence(&tr, &cfg(Selection::Oracle, 1), &scorer, &OracleQe::new(), &seg).unwrap();
        // "v" does not lower TER, so the original stays
        assert_eq!(one, tr.mt);
        let three = correct_sentence(&tr, &cfg(Selection::Oracle, 3), &scorer, &OracleQe::new(), &seg).unwrap();
        assert_eq!(three, tr.post_edit);
    }

    #[test]
    fn oracle_everything_reaches_zero() {
        let data = vec![t("s", "der Hund bellt laut", "die Katze bellt sehr laut"), t("s", "a b c", "a d c")];
        let seg = CharGroupSegmenter::default();
        let config = HarnessConfig::new(Selection::Oracle, 1, SuggestConfig::default()).unwrap();
        let rep = run(&data, &config, &OracleScorers(&seg), &OracleQe::new(), &seg).unwrap();
        assert_eq!(rep.corrected.ter, 0.0);
        assert_eq!(rep.corrected.bleu, 100.0);
        assert!(rep.deltas.ter < 0.0);
    }

    #[test]
    fn predicted_selection_uses_provider_labels() {
        struct FirstBad;
        impl QeProvider for FirstBad {
            fn estimate(&self, _: &[String], mt: &[String]) -> Result<RawQe> {
                let mut words = vec![0.0; mt.len()];
                words[0] = 0.9;
                Ok(RawQe { hter: 0.3, words, gaps: vec![0.0; mt.len() + 1] })
            }
        }
        let tr = t("a b", "p q", "r s");
        let seg = CharGroupSegmenter::default();
        let out = correct_sentence(&tr, &cfg(Selection::Predicted, 1), &Fixed(vec![("r", 0.9)]), &FirstBad, &seg).unwrap();
        assert_eq!(out, tokenize("r q"));
    }

    #[test]
    fn identity_dataset_and_errors() {
        let data = vec![t("a", "x y", "x y")];
        let seg = CharGroupSegmenter::default();
        let scorer = Fixed(vec![("q", 0.9)]);
        let rep = run(&data, &cfg(Selection::Oracle, 5), &SharedScorer(&scorer), &OracleQe::new(), &seg).unwrap();
        assert_eq!(rep.baseline.ter, 0.0);
        assert_eq!(rep.deltas, Scores { ter: 0.0, bleu: 0.0 });
        assert!(run(&[], &cfg(Selection::Oracle, 5), &SharedScorer(&scorer), &OracleQe::new(), &seg).is_err());
        assert!(HarnessConfig::new(Selection::Oracle, 2, SuggestConfig::default()).is_err());

        let err = run(&data, &cfg(Selection::Predicted, 1), &SharedScorer(&scorer), &OracleQe::new(), &seg).unwrap_err();
        assert!(format!("{err}").contains("sentence 0"), "{err}");
    }

    #[test]
    fn cell_format() {
        assert_eq!(format_cell(25.36, -6.01), "25.36 (-6.01)");
        assert_eq!(format_cell(56.52, 6.15), "56.52 (+6.15)");
        assert_eq!(format_cell(0.0, -0.001), "0.00 (+0.00)");
    }

    #[test]
    fn tsv_parsing() {
        let data = parse_triplets("# c\nsrc a\tmt a\tpe a\n\n").unwrap();
        assert_eq!(data.len(), 1);
        assert!(parse_triplets("a\tb").is_err());
        assert!(parse_triplets("a\t\tc").is_err());
    }
}
