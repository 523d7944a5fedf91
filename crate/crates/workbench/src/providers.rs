//! Provider slots (MT, QE, mask scorer, aligner, segmenter): blocking HTTP
//! clients for external providers, the built-in stubs, and a router that
//! serves the stubs over the same wire protocols.

use std::sync::Arc;
use std::time::Duration;

use axum::extract::State;
use axum::http::StatusCode;
use axum::routing::post;
use axum::{Json, Router};
use postedit_core::align::{Aligner, DiagonalAligner, SubwordAlignment};
use postedit_core::doc::tokenize;
use postedit_core::lexicon::Lexicon;
use postedit_core::mt::{DictionaryTranslator, Translator};
use postedit_core::qe::{HeuristicQe, QeProvider, RawQe};
use postedit_core::subword::{CharGroupSegmenter, Segmenter, DEFAULT_CONTINUATION};
use postedit_core::suggest::{MaskScorer, NgramScorer, TokenProb};
use postedit_core::{Error, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::config::Config;
use crate::fixtures;
use crate::wire::*;

pub type SharedTranslator = Arc<dyn Translator + Send + Sync>;
pub type SharedQe = Arc<dyn QeProvider + Send + Sync>;
pub type SharedScorer = Arc<dyn MaskScorer + Send + Sync>;
pub type SharedAligner = Arc<dyn Aligner + Send + Sync>;
pub type SharedSegmenter = Arc<dyn Segmenter + Send + Sync>;

/// One implementation per slot.
#[derive(Clone)]
pub struct Registry {
    pub mt: SharedTranslator,
    pub qe: SharedQe,
    pub scorer: SharedScorer,
    pub aligner: SharedAligner,
    pub segmenter: SharedSegmenter,
    /// `stub` or the endpoint, per slot, in the order above.
    pub names: [String; 5],
}

impl std::fmt::Debug for Registry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Registry").field("names", &self.names).finish()
    }
}

/// Data for the built-in stubs.
#[derive(Debug, Clone)]
pub struct StubData {
    pub lexicon: Lexicon,
    /// (source words, target words)
    pub corpus: Vec<(Vec<String>, Vec<String>)>,
}

impl StubData {
    pub fn bundled() -> Self {
        Self::from_text(fixtures::LEXICON, fixtures::CORPUS).expect("bundled fixtures parse")
    }

    pub fn from_text(lexicon: &str, corpus: &str) -> Result<Self> {
        Ok(Self { lexicon: Lexicon::from_tsv(lexicon)?, corpus: fixtures::parse_corpus(corpus)? })
    }
}

impl Registry {
    /// Every slot served by its stub.
    pub fn stubs(data: &StubData) -> Result<Self> {
        let segmenter = CharGroupSegmenter::default();
        let scorer = NgramScorer::train(&data.corpus, &segmenter)?;
        Ok(Self {
            mt: Arc::new(DictionaryTranslator::new(data.lexicon.clone())),
            qe: Arc::new(HeuristicQe::new(data.lexicon.clone())),
            scorer: Arc::new(scorer),
            aligner: Arc::new(DiagonalAligner),
            segmenter: Arc::new(segmenter),
            names: std::array::from_fn(|_| "stub".to_string()),
        })
    }

    /// Configured endpoints, stubs for the rest.
    pub fn from_config(cfg: &Config) -> std::result::Result<Self, String> {
        let read = |p: &Option<std::path::PathBuf>, bundled: &str| -> std::result::Result<String, String> {
            match p {
                Some(path) => std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display())),
                None => Ok(bundled.to_string()),
            }
        };
        let data = StubData::from_text(
            &read(&cfg.stubs.lexicon, fixtures::LEXICON)?,
            &read(&cfg.stubs.corpus, fixtures::CORPUS)?,
        )
        .map_err(|e| e.to_string())?;
        let mut reg = Self::stubs(&data).map_err(|e| e.to_string())?;
        let timeout = Duration::from_millis(cfg.timeout_ms);
        let p = &cfg.providers;
        if let Some(url) = &p.mt {
            reg.mt = Arc::new(HttpTranslator(HttpClient::new("mt", url, timeout)));
            reg.names[0] = url.clone();
        }
        if let Some(url) = &p.qe {
            reg.qe = Arc::new(HttpQe(HttpClient::new("qe", url, timeout)));
            reg.names[1] = url.clone();
        }
        if let Some(url) = &p.scorer {
            reg.scorer = Arc::new(HttpScorer(HttpClient::new("scorer", url, timeout)));
            reg.names[2] = url.clone();
        }
        if let Some(url) = &p.aligner {
            reg.aligner = Arc::new(HttpAligner(HttpClient::new("aligner", url, timeout)));
            reg.names[3] = url.clone();
        }
        if let Some(url) = &p.segmenter {
            reg.segmenter = Arc::new(HttpSegmenter { client: HttpClient::new("segmenter", url, timeout), marker: DEFAULT_CONTINUATION.into() });
            reg.names[4] = url.clone();
        }
        Ok(reg)
    }
}

/// JSON-over-POST client bound to one provider base URL.
#[derive(Clone)]
pub struct HttpClient {
    name: &'static str,
    base: String,
    agent: ureq::Agent,
}

impl HttpClient {
    pub fn new(name: &'static str, base: &str, timeout: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self { name, base: base.trim_end_matches('/').to_string(), agent }
    }

    fn post<Q: Serialize, R: DeserializeOwned>(&self, path: &str, body: &Q) -> Result<R> {
        let url = format!("{}{path}", self.base);
        let fail = |m: String| Error::provider(self.name, format!("{url}: {m}"));
        let mut resp = self.agent.post(&url).send_json(body).map_err(|e| fail(e.to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            let text = resp.body_mut().read_to_string().unwrap_or_default();
            return Err(fail(format!("HTTP {status}: {}", text.trim())));
        }
        resp.body_mut().read_json::<R>().map_err(|e| fail(format!("malformed response: {e}")))
    }
}

pub struct HttpTranslator(pub HttpClient);

impl Translator for HttpTranslator {
    fn translate(&self, source: &[String]) -> Result<Vec<String>> {
        let r: TranslateResponse = self.0.post("/translate", &TranslateRequest { source: source.join(" ") })?;
        Ok(tokenize(&r.translation))
    }
}

pub struct HttpQe(pub HttpClient);

impl QeProvider for HttpQe {
    // shape and ranges are checked by qe::predict
    fn estimate(&self, source: &[String], mt: &[String]) -> Result<RawQe> {
        let r: QeResponse = self.0.post("/qe", &QeRequest { source: source.join(" "), mt: mt.join(" ") })?;
        Ok(RawQe {
            hter: r.hter,
            words: r.words.iter().map(|p| p.p_bad).collect(),
            gaps: r.gaps.iter().map(|p| p.p_bad).collect(),
        })
    }
}

pub struct HttpScorer(pub HttpClient);

impl MaskScorer for HttpScorer {
    fn score(&self, source: &[String], target: &[Option<String>], mask_index: usize, top_n: usize) -> Result<Vec<TokenProb>> {
        let req = ScoreRequest {
            source_tokens: source.to_vec(),
            target_tokens: target.to_vec(),
            mask_index,
            top_n,
        };
        let r: ScoreResponse = self.0.post("/score", &req)?;
        let out: Vec<TokenProb> = r.candidates.into_iter().map(|c| TokenProb::new(c.token, c.prob)).collect();
        if let Some(bad) = out.iter().find(|c| !(c.prob > 0.0 && c.prob <= 1.0) || c.token.is_empty()) {
            return Err(Error::provider("scorer", format!("invalid candidate {:?} with probability {}", bad.token, bad.prob)));
        }
        if out.windows(2).any(|w| w[0].prob < w[1].prob) {
            return Err(Error::provider("scorer", "candidates are not sorted by probability"));
        }
        Ok(out)
    }
}

pub struct HttpAligner(pub HttpClient);

impl Aligner for HttpAligner {
    fn align(&self, source_tokens: &[String], target_tokens: &[String]) -> Result<SubwordAlignment> {
        let req = AlignRequest { source_tokens: source_tokens.to_vec(), target_tokens: target_tokens.to_vec() };
        let r: AlignResponse = self.0.post("/align", &req)?;
        alignment_from_links(&r, target_tokens.len(), source_tokens.len()).map_err(|e| Error::provider("aligner", e.to_string()))
    }
}

/// Validates links (from a provider or an alignment file).
pub fn alignment_from_links(r: &AlignResponse, target_tokens: usize, source_tokens: usize) -> Result<SubwordAlignment> {
    SubwordAlignment::new(target_tokens, source_tokens, r.links.iter().map(|l| (l.t, l.s, l.score)).collect())
}

pub struct HttpSegmenter {
    pub client: HttpClient,
    pub marker: String,
}

impl Segmenter for HttpSegmenter {
    fn segment_word(&self, word: &str) -> Result<Vec<String>> {
        let r: SegmentResponse = self.client.post("/segment", &SegmentRequest { word: word.to_string() })?;
        Ok(r.pieces)
    }

    fn continuation_marker(&self) -> &str {
        &self.marker
    }
}

// ---- stub providers over HTTP ----

type Rejection = (StatusCode, Json<ErrorBody>);

fn reject(e: Error) -> Rejection {
    (StatusCode::UNPROCESSABLE_ENTITY, Json(ErrorBody { error: e.to_string() }))
}

/// Serves `/translate`, `/qe`, `/score`, `/align` and `/segment` from a
/// registry, normally one built with [`Registry::stubs`].
pub fn provider_router(registry: Registry) -> Router {
    Router::new()
        .route("/translate", post(translate))
        .route("/qe", post(qe))
        .route("/score", post(score))
        .route("/align", post(align))
        .route("/segment", post(segment))
        .with_state(Arc::new(registry))
}

type Reg = State<Arc<Registry>>;

async fn translate(State(r): Reg, Json(req): Json<TranslateRequest>) -> std::result::Result<Json<TranslateResponse>, Rejection> {
    let out = r.mt.translate(&tokenize(&req.source)).map_err(reject)?;
    Ok(Json(TranslateResponse { translation: out.join(" ") }))
}

async fn qe(State(r): Reg, Json(req): Json<QeRequest>) -> std::result::Result<Json<QeResponse>, Rejection> {
    let raw = r.qe.estimate(&tokenize(&req.source), &tokenize(&req.mt)).map_err(reject)?;
    Ok(Json(QeResponse {
        hter: raw.hter,
        words: raw.words.into_iter().map(|p_bad| PBad { p_bad }).collect(),
        gaps: raw.gaps.into_iter().map(|p_bad| PBad { p_bad }).collect(),
    }))
}

async fn score(State(r): Reg, Json(req): Json<ScoreRequest>) -> std::result::Result<Json<ScoreResponse>, Rejection> {
    if req.target_tokens.get(req.mask_index).is_none_or(Option::is_some) {
        return Err(reject(Error::precondition("maskIndex does not point at a mask")));
    }
    let out = r.scorer.score(&req.source_tokens, &req.target_tokens, req.mask_index, req.top_n).map_err(reject)?;
    Ok(Json(ScoreResponse { candidates: out.into_iter().map(|c| ScoredToken { token: c.token, prob: c.prob }).collect() }))
}

async fn align(State(r): Reg, Json(req): Json<AlignRequest>) -> std::result::Result<Json<AlignResponse>, Rejection> {
    let a = r.aligner.align(&req.source_tokens, &req.target_tokens).map_err(reject)?;
    Ok(Json(AlignResponse { links: a.links().iter().map(|&(t, s, score)| Link { t, s, score }).collect() }))
}

async fn segment(State(r): Reg, Json(req): Json<SegmentRequest>) -> std::result::Result<Json<SegmentResponse>, Rejection> {
    let pieces = r.segmenter.segment_word(&req.word).map_err(reject)?;
    Ok(Json(SegmentResponse { pieces }))
}
