//! Quality-estimation semantics.
//!
//! Sentence quality is shown as `1 - predicted HTER` (clamped to [0, 1]).
//! Word-level QE labels every MT word and every gap between words (including
//! both sentence ends) as OK or BAD, with BAD meaning `p_bad > 0.5`. Display
//! confidence is yellow above 0.5 and red above 0.8.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::metrics::{hter, EditOp};

pub const BAD_THRESHOLD: f64 = 0.5;
pub const RED_THRESHOLD: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QeLabel {
    Ok,
    Bad,
}

impl QeLabel {
    pub fn from_p_bad(p_bad: f64) -> Self {
        if p_bad > BAD_THRESHOLD {
            QeLabel::Bad
        } else {
            QeLabel::Ok
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            QeLabel::Ok => "OK",
            QeLabel::Bad => "BAD",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConfidenceColor {
    None,
    Yellow,
    Red,
}

impl ConfidenceColor {
    pub fn as_str(self) -> &'static str {
        match self {
            ConfidenceColor::None => "none",
            ConfidenceColor::Yellow => "yellow",
            ConfidenceColor::Red => "red",
        }
    }
}

/// Underline/checkmark colour for a BAD probability in [0, 1].
pub fn color_of(p_bad: f64) -> Result<ConfidenceColor> {
    if !(0.0..=1.0).contains(&p_bad) {
        return Err(Error::precondition(format!("p_bad {p_bad} is outside [0, 1]")));
    }
    Ok(if p_bad > RED_THRESHOLD {
        ConfidenceColor::Red
    } else if p_bad > BAD_THRESHOLD {
        ConfidenceColor::Yellow
    } else {
        ConfidenceColor::None
    })
}

/// Displayed sentence quality: `1 - min(hter, 1)`.
pub fn display_quality(predicted_hter: f64) -> Result<f64> {
    if !(predicted_hter >= 0.0) || !predicted_hter.is_finite() {
        return Err(Error::precondition(format!("predicted HTER {predicted_hter} must be a finite value ≥ 0")));
    }
    Ok(1.0 - predicted_hter.min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentenceQe {
    predicted_hter: f64,
    display_quality: f64,
}

impl SentenceQe {
    pub fn new(predicted_hter: f64) -> Result<Self> {
        Ok(Self { predicted_hter, display_quality: display_quality(predicted_hter)? })
    }

    pub fn predicted_hter(&self) -> f64 {
        self.predicted_hter
    }

    pub fn display_quality(&self) -> f64 {
        self.display_quality
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TokenQe {
    pub p_bad: f64,
    pub label: QeLabel,
}

impl TokenQe {
    fn new(p_bad: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_bad) {
            return Err(Error::precondition(format!("p_bad {p_bad} is outside [0, 1]")));
        }
        Ok(Self { p_bad, label: QeLabel::from_p_bad(p_bad) })
    }

    pub fn color(&self) -> ConfidenceColor {
        color_of(self.p_bad).unwrap_or(ConfidenceColor::None)
    }
}

/// Per-word and per-gap BAD probabilities; there is always one more gap than
/// there are words.
#[derive(Debug, Clone, PartialEq)]
pub struct WordQe {
    words: Vec<TokenQe>,
    gaps: Vec<TokenQe>,
}

impl WordQe {
    pub fn new(words: &[f64], gaps: &[f64]) -> Result<Self> {
        if gaps.len() != words.len() + 1 {
            return Err(Error::precondition(format!(
                "{} gaps for {} words; expected {}",
                gaps.len(),
                words.len(),
                words.len() + 1
            )));
        }
        Ok(Self {
            words: words.iter().map(|p| TokenQe::new(*p)).collect::<Result<_>>()?,
            gaps: gaps.iter().map(|p| TokenQe::new(*p)).collect::<Result<_>>()?,
        })
    }

    pub fn words(&self) -> &[TokenQe] {
        &self.words
    }

    pub fn gaps(&self) -> &[TokenQe] {
        &self.gaps
    }

    pub fn word_labels(&self) -> Vec<QeLabel> {
        self.words.iter().map(|t| t.label).collect()
    }

    pub fn gap_labels(&self) -> Vec<QeLabel> {
        self.gaps.iter().map(|t| t.label).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QeAnnotation {
    pub sentence: SentenceQe,
    pub words: WordQe,
}

/// Raw provider output before validation.
#[derive(Debug, Clone, PartialEq)]
pub struct RawQe {
    pub hter: f64,
    pub words: Vec<f64>,
    pub gaps: Vec<f64>,
}

pub trait QeProvider {
    fn estimate(&self, source: &[String], mt: &[String]) -> Result<RawQe>;
}

impl<T: QeProvider + ?Sized> QeProvider for &T {
    fn estimate(&self, source: &[String], mt: &[String]) -> Result<RawQe> {
        (**self).estimate(source, mt)
    }
}

/// Runs a provider and validates its output against the MT sentence.
pub fn predict(source: &[String], mt: &[String], provider: &dyn QeProvider) -> Result<QeAnnotation> {
    let raw = provider.estimate(source, mt)?;
    let invalid = |what: String| Error::provider("qe", what);
    if raw.words.len() != mt.len() {
        return Err(invalid(format!("{} word scores for {} MT words", raw.words.len(), mt.len())));
    }
    if raw.gaps.len() != mt.len() + 1 {
        return Err(invalid(format!("{} gap scores for {} MT words", raw.gaps.len(), mt.len())));
    }
    let sentence = SentenceQe::new(raw.hter).map_err(|e| invalid(format!("{e}")))?;
    let words = WordQe::new(&raw.words, &raw.gaps).map_err(|e| invalid(format!("{e}")))?;
    Ok(QeAnnotation { sentence, words })
}

/// What each MT word and gap must become to turn MT into the post-edit,
/// read off the TER edit script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldCorrections {
    /// Replacement words for each MT word (empty: delete; the word itself: OK).
    pub word_fills: Vec<Vec<String>>,
    /// Words to insert at each gap; `gap_fills[i]` sits before MT word `i`.
    pub gap_fills: Vec<Vec<String>>,
}

impl GoldCorrections {
    /// Applies every correction, yielding the post-edit.
    pub fn reconstruct(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (gap, word) in self.gap_fills.iter().zip(&self.word_fills) {
            out.extend(gap.iter().cloned());
            out.extend(word.iter().cloned());
        }
        if let Some(last) = self.gap_fills.last() {
            out.extend(last.iter().cloned());
        }
        out
    }
}

/// Derives per-word and per-gap corrections from `ter(mt, post_edit)`.
/// Substituted and deleted words, and words moved by a shift, are BAD at
/// their MT position; a moved word's reference counterpart becomes an
/// insertion at the gap where it lands.
pub fn gold_corrections<S: AsRef<str>, R: AsRef<str>>(mt: &[S], post_edit: &[R]) -> Result<GoldCorrections> {
    if mt.is_empty() {
        return Err(Error::precondition("gold labels need a non-empty MT sentence"));
    }
    let result = hter(mt, post_edit)?;
    let script = &result.script;
    let n = mt.len();
    let mut word_fills: Vec<Vec<String>> = vec![Vec::new(); n];
    let mut gap_fills: Vec<Vec<String>> = vec![Vec::new(); n + 1];
    let mut pending: Vec<String> = Vec::new();
    for step in &script.steps {
        match step.op {
            EditOp::Match | EditOp::Substitute => {
                let o = script.origin[step.hyp.unwrap_or(0)];
                let word = String::from(post_edit[step.reference.unwrap_or(0)].as_ref());
                if script.moved[o] {
                    pending.push(word);
                } else {
                    gap_fills[o].append(&mut pending);
                    word_fills[o] = vec![word];
                }
            }
            EditOp::Delete => {
                let o = script.origin[step.hyp.unwrap_or(0)];
                if !script.moved[o] {
                    gap_fills[o].append(&mut pending);
                }
            }
            EditOp::Insert => pending.push(String::from(post_edit[step.reference.unwrap_or(0)].as_ref())),
        }
    }
    gap_fills[n].append(&mut pending);
    Ok(GoldCorrections { word_fills, gap_fills })
}

/// Ground-truth word and gap labels with `p_bad` 1 for BAD and 0 for OK.
pub fn derive_gold_labels<S: AsRef<str>, R: AsRef<str>>(mt: &[S], post_edit: &[R]) -> Result<WordQe> {
    let gold = gold_corrections(mt, post_edit)?;
    Ok(gold_labels_from(mt, &gold))
}

pub(crate) fn gold_labels_from<S: AsRef<str>>(mt: &[S], gold: &GoldCorrections) -> WordQe {
    let words: Vec<f64> = mt
        .iter()
        .zip(&gold.word_fills)
        .map(|(w, fill)| if fill.len() == 1 && fill[0] == w.as_ref() { 0.0 } else { 1.0 })
        .collect();
    let gaps: Vec<f64> = gold.gap_fills.iter().map(|g| if g.is_empty() { 0.0 } else { 1.0 }).collect();
    WordQe {
        words: words.iter().map(|p| TokenQe { p_bad: *p, label: QeLabel::from_p_bad(*p) }).collect(),
        gaps: gaps.iter().map(|p| TokenQe { p_bad: *p, label: QeLabel::from_p_bad(*p) }).collect(),
    }
}

/// Answers with gold HTER and labels for MT sentences whose post-edit it
/// knows.
#[derive(Debug, Clone, Default)]
pub struct OracleQe {
    post_edits: BTreeMap<Vec<String>, Vec<String>>,
}

impl OracleQe {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, mt: Vec<String>, post_edit: Vec<String>) {
        self.post_edits.insert(mt, post_edit);
    }
}

impl QeProvider for OracleQe {
    fn estimate(&self, _source: &[String], mt: &[String]) -> Result<RawQe> {
        let pe = self
            .post_edits
            .get(mt)
            .ok_or_else(|| Error::provider("oracle-qe", "no post-edit known for this MT sentence"))?;
        let hter = hter(mt, pe)?.score();
        let labels = derive_gold_labels(mt, pe)?;
        Ok(RawQe {
            hter,
            words: labels.words.iter().map(|t| t.p_bad).collect(),
            gaps: labels.gaps.iter().map(|t| t.p_bad).collect(),
        })
    }
}

/// Lexicon-coverage estimator: a word's BAD probability is one minus its
/// strongest lexicon association with any source word; sentence HTER is the
/// mean word probability. Gaps carry no evidence and score 0.
#[derive(Debug, Clone)]
pub struct HeuristicQe {
    lexicon: Lexicon,
}

impl HeuristicQe {
    pub fn new(lexicon: Lexicon) -> Self {
        Self { lexicon }
    }
}

impl QeProvider for HeuristicQe {
    fn estimate(&self, source: &[String], mt: &[String]) -> Result<RawQe> {
        let words: Vec<f64> = mt
            .iter()
            .map(|w| 1.0 - self.lexicon.best_association(source, w))
            .collect();
        let hter = if words.is_empty() { 0.0 } else { words.iter().sum::<f64>() / words.len() as f64 };
        Ok(RawQe { hter, words, gaps: vec![0.0; mt.len() + 1] })
    }
}
