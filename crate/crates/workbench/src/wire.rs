//! JSON shapes shared by the REST API, the provider protocols and the
//! document interchange format. Field names are camelCase on the wire.

use std::collections::BTreeMap;

use postedit_core::doc::{Document, DocumentMeta, StyleTable};
use postedit_core::harness::Scores;
use serde::{Deserialize, Serialize};

/// Document interchange: style table, tag-markup segments, metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Interchange {
    pub style_table: BTreeMap<u32, String>,
    pub segments: Vec<String>,
    pub meta: Meta,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Meta {
    #[serde(default)]
    pub source_lang: String,
    #[serde(default)]
    pub target_lang: String,
    #[serde(default)]
    pub title: String,
}

impl Interchange {
    pub fn to_document(&self) -> postedit_core::Result<Document> {
        let styles: StyleTable = self.style_table.iter().map(|(k, v)| (*k, v.clone())).collect();
        let meta = DocumentMeta {
            title: self.meta.title.clone(),
            source_lang: self.meta.source_lang.clone(),
            target_lang: self.meta.target_lang.clone(),
        };
        Document::parse(&self.segments, styles, meta)
    }

    pub fn from_document(doc: &Document) -> Self {
        Self {
            style_table: doc.styles.iter().map(|(id, d)| (id.0, d.to_string())).collect(),
            segments: doc.markup(),
            meta: Meta {
                source_lang: doc.meta.source_lang.clone(),
                target_lang: doc.meta.target_lang.clone(),
                title: doc.meta.title.clone(),
            },
        }
    }
}

// ---- provider protocols ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QeRequest {
    pub source: String,
    pub mt: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PBad {
    pub p_bad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QeResponse {
    pub hter: f64,
    pub words: Vec<PBad>,
    pub gaps: Vec<PBad>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScoreRequest {
    pub source_tokens: Vec<String>,
    /// `null` marks a mask.
    pub target_tokens: Vec<Option<String>>,
    pub mask_index: usize,
    pub top_n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredToken {
    pub token: String,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreResponse {
    pub candidates: Vec<ScoredToken>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AlignRequest {
    pub source_tokens: Vec<String>,
    pub target_tokens: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub t: usize,
    pub s: usize,
    pub score: f64,
}

/// Also the format of alignment files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignResponse {
    pub links: Vec<Link>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslateRequest {
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslateResponse {
    pub translation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentRequest {
    pub word: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentResponse {
    pub pieces: Vec<String>,
}

// ---- REST API ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LabelView {
    pub p_bad: f64,
    pub label: String,
    pub color: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QeView {
    pub hter: f64,
    /// `1 - min(hter, 1)`
    pub quality: f64,
    pub words: Vec<LabelView>,
    pub gaps: Vec<LabelView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagView {
    /// `open`, `close` or `unpaired`.
    pub kind: String,
    pub style: u32,
    /// Index of the word the tag binds to; the word count for trailing tags.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SegmentView {
    pub index: usize,
    pub source: String,
    pub target: String,
    pub target_words: Vec<String>,
    pub revision: u64,
    pub human_edited: bool,
    pub qe: QeView,
    pub tags: Vec<TagView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentView {
    pub id: String,
    pub revision: u64,
    pub segments: Vec<SegmentView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuggestRequest {
    pub start: usize,
    pub end: usize,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub revision: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CandidateView {
    pub text: String,
    pub token_count: usize,
    pub joint_log_prob: f64,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuggestResponse {
    pub revision: u64,
    pub candidates: Vec<CandidateView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EditRequest {
    pub start: usize,
    pub end: usize,
    pub text: String,
    pub revision: u64,
    #[serde(default)]
    pub refresh_qe: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditResponse {
    pub revision: u64,
    pub segment: SegmentView,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HeatmapView {
    pub start: usize,
    pub end: usize,
    pub source_words: Vec<String>,
    pub weights: Vec<f64>,
    pub low_confidence: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

// ---- evaluation report ----

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoresView {
    pub ter: f64,
    pub bleu: f64,
}

impl From<Scores> for ScoresView {
    fn from(s: Scores) -> Self {
        Self { ter: s.ter, bleu: s.bleu }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportView {
    pub baseline: ScoresView,
    pub corrected: ScoresView,
    pub deltas: ScoresView,
}
