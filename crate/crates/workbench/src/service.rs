//! Editing sessions: document creation through the providers, segment
//! views, suggestions, revisioned edits, heatmaps and export.
//!
//! Each document sits behind its own lock. Provider calls never run while a
//! document lock is held: inputs are copied out, the provider is called,
//! and results are written back only if the segment revision is unchanged.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use parking_lot::RwLock;
use postedit_core::align::{heatmap, to_word_alignment, transfer_tags, AlignmentMatrix};
use postedit_core::doc::{serialize_tagged_text, tokenize, Document, TagKind, TaggedSegment};
use postedit_core::qe::{color_of, predict, QeAnnotation, SentenceQe, TokenQe, WordQe};
use postedit_core::subword::subword_segment;
use postedit_core::suggest::{suggest, Span, SuggestConfig};
use postedit_core::Error;

use crate::providers::Registry;
use crate::store::{DocState, Event, Store, TargetState};
use crate::wire::*;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ServiceError {
    #[error("{0}")]
    BadRequest(String),
    #[error("{0} not found")]
    NotFound(String),
    #[error("segment {segment} is at revision {current}, not {requested}")]
    Conflict { segment: usize, current: u64, requested: u64 },
    #[error("{0}")]
    Provider(String),
    #[error("storage: {0}")]
    Storage(String),
}

pub type Result<T> = std::result::Result<T, ServiceError>;

impl From<Error> for ServiceError {
    fn from(e: Error) -> Self {
        match e {
            Error::Provider { .. } => ServiceError::Provider(e.to_string()),
            other => ServiceError::BadRequest(other.to_string()),
        }
    }
}

fn provider_failure(e: Error) -> ServiceError {
    ServiceError::Provider(format!("{e}; slots without a configured endpoint use the built-in stubs"))
}

fn storage(e: std::io::Error) -> ServiceError {
    ServiceError::Storage(e.to_string())
}

#[derive(Debug, Clone)]
struct Target {
    segment: TaggedSegment,
    qe: QeAnnotation,
    alignment: AlignmentMatrix,
    human_edited: bool,
    revision: u64,
}

#[derive(Debug, Clone)]
struct Session {
    id: String,
    source: Document,
    targets: Vec<Target>,
    revision: u64,
}

pub struct Service {
    registry: Registry,
    store: Option<Store>,
    suggest: SuggestConfig,
    seed: u64,
    counter: AtomicU64,
    docs: RwLock<BTreeMap<String, Arc<RwLock<Session>>>>,
}

impl std::fmt::Debug for Service {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Service").field("registry", &self.registry).field("documents", &self.docs.read().len()).finish()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Service {
    /// A service over `registry`; with a store, logged documents are
    /// recovered first.
    pub fn new(registry: Registry, store: Option<Store>, suggest: SuggestConfig, seed: u64) -> Result<Self> {
        let svc = Self {
            registry,
            store,
            suggest,
            seed,
            counter: AtomicU64::new(0),
            docs: RwLock::new(BTreeMap::new()),
        };
        svc.recover()?;
        Ok(svc)
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    fn recover(&self) -> Result<()> {
        let Some(store) = &self.store else { return Ok(()) };
        for (id, rec) in store.load().map_err(storage)? {
            let mut events = rec.events.into_iter();
            let state = match rec.snapshot {
                Some(s) => s,
                None => match events.next() {
                    Some(Event::Created { state }) => state,
                    _ => return Err(ServiceError::Storage(format!("{id}: log does not start with a creation event"))),
                },
            };
            let mut session = Session::from_state(&state)?;
            for event in events {
                match event {
                    Event::Created { .. } => return Err(ServiceError::Storage(format!("{id}: duplicate creation event"))),
                    Event::Edited { segment, start, end, text } => {
                        session.edit(segment, start, end, &tokenize(&text))?;
                    }
                    Event::QeRefreshed { segment, revision, qe } => {
                        let t = session.target_mut(segment)?;
                        if t.revision == revision {
                            t.qe = annotation_from_wire(&qe)?;
                        }
                    }
                }
            }
            self.counter.fetch_add(1, Ordering::SeqCst);
            self.docs.write().insert(id, Arc::new(RwLock::new(session)));
        }
        Ok(())
    }

    fn next_id(&self) -> String {
        loop {
            let n = self.counter.fetch_add(1, Ordering::SeqCst);
            let id = format!("{:016x}", splitmix64(self.seed ^ splitmix64(n)));
            if !self.docs.read().contains_key(&id) {
                return id;
            }
        }
    }

    fn session(&self, id: &str) -> Result<Arc<RwLock<Session>>> {
        self.docs.read().get(id).cloned().ok_or_else(|| ServiceError::NotFound(format!("document {id}")))
    }

    fn log(&self, id: &str, event: &Event) -> Result<()> {
        match &self.store {
            Some(store) => store.append(id, event).map_err(storage),
            None => Ok(()),
        }
    }

    /// Parses the source, then per segment: MT, sub-word alignment, tag
    /// transfer, QE.
    pub fn create_document(&self, doc: &Interchange) -> Result<DocumentView> {
        let source = doc.to_document()?;
        let mut targets = Vec::with_capacity(source.segments.len());
        for seg in &source.segments {
            targets.push(self.build_target(seg).map_err(provider_failure)?);
        }
        let session = Session { id: self.next_id(), source, targets, revision: 0 };
        self.log(&session.id, &Event::Created { state: session.to_state() })?;
        let view = session.view();
        self.docs.write().insert(session.id.clone(), Arc::new(RwLock::new(session)));
        Ok(view)
    }

    fn build_target(&self, source: &TaggedSegment) -> postedit_core::Result<Target> {
        let r = &self.registry;
        let words = source.words();
        let mt = r.mt.translate(&words)?;
        if mt.is_empty() || mt.iter().any(|w| w.contains('<')) {
            return Err(Error::provider("mt", format!("unusable translation {mt:?}")));
        }
        let src_map = subword_segment(&words, &*r.segmenter)?;
        let tgt_map = subword_segment(&mt, &*r.segmenter)?;
        let sub = r.aligner.align(&src_map.tokens(), &tgt_map.tokens())?;
        let alignment = to_word_alignment(&sub, &src_map, &tgt_map).map_err(|e| Error::provider("aligner", e.to_string()))?;
        let segment = transfer_tags(source, &mt, &alignment)?.with_index(source.index());
        let qe = predict(&words, &mt, &*r.qe)?;
        Ok(Target { segment, qe, alignment, human_edited: false, revision: 0 })
    }

    pub fn get_segments(&self, id: &str) -> Result<DocumentView> {
        Ok(self.session(id)?.read().view())
    }

    pub fn request_suggestions(&self, id: &str, n: usize, req: &SuggestRequest) -> Result<SuggestResponse> {
        let mut config = SuggestConfig::new(self.suggest.max_masks, req.k.unwrap_or(self.suggest.beam))?;
        config.length_normalize = self.suggest.length_normalize;
        let (source, target, revision) = {
            let doc = self.session(id)?;
            let s = doc.read();
            let t = s.target(n)?;
            if let Some(requested) = req.revision {
                if requested != t.revision {
                    return Err(ServiceError::Conflict { segment: n, current: t.revision, requested });
                }
            }
            (s.source.segments[n].words(), t.segment.words(), t.revision)
        };
        let span = Span::from_bounds(req.start, req.end);
        span.validate(target.len())?;
        let seg = &*self.registry.segmenter;
        let src_map = subword_segment(&source, seg)?;
        let tgt_map = subword_segment(&target, seg)?;
        let found = suggest(&src_map, &tgt_map, span, &config, &*self.registry.scorer)?;
        Ok(SuggestResponse {
            revision,
            candidates: found
                .into_iter()
                .map(|c| CandidateView { prob: c.probability(), text: c.text, token_count: c.token_count, joint_log_prob: c.joint_log_prob })
                .collect(),
        })
    }

    /// Replaces (or inserts at a gap) the words of one segment. QE is
    /// recomputed only on request, after the lock is released.
    pub fn apply_edit(&self, id: &str, n: usize, req: &EditRequest) -> Result<EditResponse> {
        let words = tokenize(&req.text);
        let doc = self.session(id)?;
        let (source, target, revision) = {
            let mut s = doc.write();
            let current = s.target(n)?.revision;
            if current != req.revision {
                return Err(ServiceError::Conflict { segment: n, current, requested: req.revision });
            }
            s.edit(n, req.start, req.end, &words)?;
            self.log(id, &Event::Edited { segment: n, start: req.start, end: req.end, text: words.join(" ") })?;
            let t = s.target(n)?;
            (s.source.segments[n].words(), t.segment.words(), t.revision)
        };
        if req.refresh_qe {
            let qe = predict(&source, &target, &*self.registry.qe).map_err(|e| {
                ServiceError::Provider(format!("edit applied at revision {revision} but QE refresh failed: {e}"))
            })?;
            let mut s = doc.write();
            let t = s.target_mut(n)?;
            if t.revision == revision {
                self.log(id, &Event::QeRefreshed { segment: n, revision, qe: annotation_to_wire(&qe) })?;
                t.qe = qe;
            }
        }
        let s = doc.read();
        Ok(EditResponse { revision, segment: s.segment_view(n)? })
    }

    pub fn heatmap(&self, id: &str, n: usize, start: usize, end: usize) -> Result<HeatmapView> {
        let doc = self.session(id)?;
        let s = doc.read();
        let t = s.target(n)?;
        let h = heatmap(Span::from_bounds(start, end), &t.alignment)?;
        Ok(HeatmapView {
            start,
            end,
            source_words: s.source.segments[n].words(),
            weights: h.weights,
            low_confidence: h.low_confidence,
        })
    }

    /// The target document in interchange form; also snapshots the session.
    pub fn export_document(&self, id: &str) -> Result<Interchange> {
        let doc = self.session(id)?;
        let s = doc.read();
        if let Some(store) = &self.store {
            store.snapshot(&s.to_state()).map_err(storage)?;
        }
        Ok(s.export())
    }
}

impl Session {
    fn target(&self, n: usize) -> Result<&Target> {
        self.targets.get(n).ok_or_else(|| ServiceError::NotFound(format!("segment {n} of document {}", self.id)))
    }

    fn target_mut(&mut self, n: usize) -> Result<&mut Target> {
        let id = self.id.clone();
        self.targets.get_mut(n).ok_or_else(|| ServiceError::NotFound(format!("segment {n} of document {id}")))
    }

    fn edit(&mut self, n: usize, start: usize, end: usize, words: &[String]) -> Result<()> {
        let t = self.target_mut(n)?;
        let segment = t.segment.replace_words(start, end, words)?;
        let mut alignment = t.alignment.clone();
        alignment.splice_targets(start, end, words.len())?;
        let qe = splice_qe(&t.qe, start, end, words.len())?;
        *t = Target { segment, qe, alignment, human_edited: true, revision: t.revision + 1 };
        self.revision += 1;
        Ok(())
    }

    fn export(&self) -> Interchange {
        let mut out = Interchange::from_document(&self.source);
        out.segments = self.targets.iter().map(|t| serialize_tagged_text(&t.segment)).collect();
        out
    }

    fn segment_view(&self, n: usize) -> Result<SegmentView> {
        let t = self.target(n)?;
        Ok(SegmentView {
            index: n,
            source: serialize_tagged_text(&self.source.segments[n]),
            target: serialize_tagged_text(&t.segment),
            target_words: t.segment.words(),
            revision: t.revision,
            human_edited: t.human_edited,
            qe: qe_view(&t.qe),
            tags: t
                .segment
                .tag_positions()
                .into_iter()
                .map(|(position, tag)| TagView {
                    kind: match tag.kind {
                        TagKind::Open => "open",
                        TagKind::Close => "close",
                        TagKind::Unpaired => "unpaired",
                    }
                    .into(),
                    style: tag.style.0,
                    position,
                })
                .collect(),
        })
    }

    fn view(&self) -> DocumentView {
        DocumentView {
            id: self.id.clone(),
            revision: self.revision,
            segments: (0..self.targets.len()).map(|n| self.segment_view(n).expect("index in range")).collect(),
        }
    }

    fn to_state(&self) -> DocState {
        DocState {
            id: self.id.clone(),
            source: Interchange::from_document(&self.source),
            revision: self.revision,
            targets: self
                .targets
                .iter()
                .map(|t| TargetState {
                    markup: serialize_tagged_text(&t.segment),
                    revision: t.revision,
                    human_edited: t.human_edited,
                    qe: annotation_to_wire(&t.qe),
                    alignment: (0..t.alignment.target_len()).map(|r| t.alignment.row(r).to_vec()).collect(),
                })
                .collect(),
        }
    }

    fn from_state(state: &DocState) -> Result<Self> {
        let corrupt = |e: Error| ServiceError::Storage(format!("{}: {e}", state.id));
        let source = state.source.to_document().map_err(corrupt)?;
        if state.targets.len() != source.segments.len() {
            return Err(ServiceError::Storage(format!("{}: segment count mismatch", state.id)));
        }
        let mut targets = Vec::with_capacity(state.targets.len());
        for (n, t) in state.targets.iter().enumerate() {
            let segment = postedit_core::doc::parse_tagged_text(&t.markup, &source.styles).map_err(corrupt)?.with_index(n);
            let sources = source.segments[n].word_count();
            targets.push(Target {
                segment,
                qe: annotation_from_wire(&t.qe)?,
                alignment: AlignmentMatrix::from_rows(&t.alignment, sources).map_err(corrupt)?,
                human_edited: t.human_edited,
                revision: t.revision,
            });
        }
        Ok(Self { id: state.id.clone(), source, targets, revision: state.revision })
    }
}

/// Keeps QE aligned with the words after an edit. New words and the gaps
/// between them score 0; boundary gaps keep their scores, except that the
/// gap an insertion fills is cleared and a deletion merges two gaps into
/// the worse one.
fn splice_qe(qe: &QeAnnotation, start: usize, end: usize, count: usize) -> Result<QeAnnotation> {
    let words: Vec<f64> = qe.words.words().iter().map(|t| t.p_bad).collect();
    let gaps: Vec<f64> = qe.words.gaps().iter().map(|t| t.p_bad).collect();
    let mut new_words = words[..start].to_vec();
    new_words.extend(std::iter::repeat_n(0.0, count));
    new_words.extend_from_slice(&words[end..]);

    let mut new_gaps = gaps[..start].to_vec();
    if start == end {
        new_gaps.extend(std::iter::repeat_n(0.0, count + 1));
    } else if count == 0 {
        new_gaps.push(gaps[start].max(gaps[end]));
    } else {
        new_gaps.push(gaps[start]);
        new_gaps.extend(std::iter::repeat_n(0.0, count - 1));
        new_gaps.push(gaps[end]);
    }
    new_gaps.extend_from_slice(&gaps[end + 1..]);
    Ok(QeAnnotation { sentence: qe.sentence, words: WordQe::new(&new_words, &new_gaps)? })
}

fn annotation_to_wire(qe: &QeAnnotation) -> QeResponse {
    let p = |ts: &[TokenQe]| ts.iter().map(|t| PBad { p_bad: t.p_bad }).collect();
    QeResponse { hter: qe.sentence.predicted_hter(), words: p(qe.words.words()), gaps: p(qe.words.gaps()) }
}

fn annotation_from_wire(qe: &QeResponse) -> Result<QeAnnotation> {
    let p = |ts: &[PBad]| ts.iter().map(|t| t.p_bad).collect::<Vec<_>>();
    let bad = |e: Error| ServiceError::Storage(format!("stored QE: {e}"));
    Ok(QeAnnotation {
        sentence: SentenceQe::new(qe.hter).map_err(bad)?,
        words: WordQe::new(&p(&qe.words), &p(&qe.gaps)).map_err(bad)?,
    })
}

fn qe_view(qe: &QeAnnotation) -> QeView {
    let labels = |ts: &[TokenQe]| {
        ts.iter()
            .map(|t| LabelView {
                p_bad: t.p_bad,
                label: t.label.as_str().into(),
                color: color_of(t.p_bad).map(|c| c.as_str()).unwrap_or("none").into(),
            })
            .collect()
    };
    QeView {
        hter: qe.sentence.predicted_hter(),
        quality: qe.sentence.display_quality(),
        words: labels(qe.words.words()),
        gaps: labels(qe.words.gaps()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use postedit_core::qe::QeLabel;

    fn qe(words: &[f64], gaps: &[f64]) -> QeAnnotation {
        QeAnnotation { sentence: SentenceQe::new(0.5).unwrap(), words: WordQe::new(words, gaps).unwrap() }
    }

    fn scores(q: &QeAnnotation) -> (Vec<f64>, Vec<f64>) {
        (q.words.words().iter().map(|t| t.p_bad).collect(), q.words.gaps().iter().map(|t| t.p_bad).collect())
    }

    #[test]
    fn splice_keeps_cardinality() {
        let base = qe(&[0.1, 0.9, 0.8], &[0.2, 0.3, 0.4, 0.6]);
        // replace word 1 with two words
        assert_eq!(scores(&splice_qe(&base, 1, 2, 2).unwrap()), (vec![0.1, 0.0, 0.0, 0.8], vec![0.2, 0.3, 0.0, 0.4, 0.6]));
        // insert one word at gap 3
        assert_eq!(scores(&splice_qe(&base, 3, 3, 1).unwrap()), (vec![0.1, 0.9, 0.8, 0.0], vec![0.2, 0.3, 0.4, 0.0, 0.0]));
        // delete words 0..2
        assert_eq!(scores(&splice_qe(&base, 0, 2, 0).unwrap()), (vec![0.8], vec![0.4, 0.6]));
        let labels = splice_qe(&base, 1, 2, 1).unwrap().words.word_labels();
        assert_eq!(labels, vec![QeLabel::Ok, QeLabel::Ok, QeLabel::Bad]);
    }
}
