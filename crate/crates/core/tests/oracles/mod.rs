//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use rand::Rng;

pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut cur = vec![i + 1; b.len() + 1];
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

/// Every reordering reachable by moving one contiguous block, as
/// `(block start, len, insertion point in the remaining words)`.
pub fn block_moves<T: Clone + PartialEq>(words: &[T], only_ref_blocks: Option<&[T]>) -> Vec<Vec<T>> {
    let n = words.len();
    let mut out = Vec::new();
    for start in 0..n {
        for len in 1..=n - start {
            let block = &words[start..start + len];
            if let Some(r) = only_ref_blocks {
                if !r.windows(len).any(|w| w == block) {
                    continue;
                }
            }
            let mut rest: Vec<T> = words[..start].to_vec();
            rest.extend_from_slice(&words[start + len..]);
            for at in 0..=rest.len() {
                if at == start {
                    continue;
                }
                let mut v = rest[..at].to_vec();
                v.extend_from_slice(block);
                v.extend_from_slice(&rest[at..]);
                out.push(v);
            }
        }
    }
    out
}

/// Minimum over all word orders of (block moves needed + edit distance).
/// With `ref_blocks_only`, a moved block must equal some run of reference
/// words, the same restriction the greedy TER search works under.
pub fn exhaustive_ter_edits(hyp: &[String], reference: &[String], ref_blocks_only: bool) -> usize {
    let mut dist: HashMap<Vec<String>, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    dist.insert(hyp.to_vec(), 0);
    queue.push_back(hyp.to_vec());
    let mut best = levenshtein(hyp, reference);
    while let Some(state) = queue.pop_front() {
        let d = dist[&state];
        best = best.min(d + levenshtein(&state, reference));
        if d + 1 >= best {
            continue;
        }
        for next in block_moves(&state, ref_blocks_only.then_some(reference)) {
            if !dist.contains_key(&next) {
                dist.insert(next.clone(), d + 1);
                queue.push_back(next);
            }
        }
    }
    best
}

pub fn random_sentence(rng: &mut impl Rng, min: usize, max: usize, vocab: usize) -> Vec<String> {
    let n = rng.gen_range(min..=max);
    (0..n).map(|_| format!("w{}", rng.gen_range(0..vocab))).collect()
}

use postedit_core::align::AlignmentMatrix;
use postedit_core::doc::{FormattingTag, Item, StyleId, StyleTable, TagKind, TaggedSegment};

pub fn style_table(n: u32) -> StyleTable {
    (1..=n).map(|i| (i, format!("style-{i}"))).collect()
}

/// Random well-nested segment with at least one word. With `canonical`,
/// every paired tag encloses a word and no two sibling pairs of the same
/// style touch; those are the segments a transfer can reproduce exactly.
pub fn random_segment(rng: &mut impl Rng, max_words: usize, styles: u32, canonical: bool) -> TaggedSegment {
    loop {
        let budget = rng.gen_range(1..=max_words);
        let mut items = Vec::new();
        let mut words = 0;
        fill(rng, &mut items, &mut words, budget, styles, canonical, 0);
        if words > 0 {
            return TaggedSegment::from_items(items).expect("generator nests tags");
        }
    }
}

fn fill(rng: &mut impl Rng, out: &mut Vec<Item>, words: &mut usize, budget: usize, styles: u32, canonical: bool, depth: usize) {
    let mut last_pair: Option<u32> = None;
    let nodes = rng.gen_range(1..=3);
    for _ in 0..nodes {
        if *words >= budget {
            break;
        }
        match rng.gen_range(0..10) {
            0..=4 => {
                out.push(Item::word(format!("w{}", *words)));
                *words += 1;
                last_pair = None;
            }
            5 | 6 => {
                out.push(Item::Tag(FormattingTag::unpaired(rng.gen_range(1..=styles))));
                last_pair = None;
            }
            _ if depth < 3 => {
                let mut style = rng.gen_range(1..=styles);
                if canonical && last_pair == Some(style) {
                    style = style % styles + 1;
                }
                if canonical && last_pair == Some(style) {
                    continue;
                }
                let mark = out.len();
                let before = *words;
                out.push(Item::Tag(FormattingTag::open(style)));
                fill(rng, out, words, budget, styles, canonical, depth + 1);
                if canonical && *words == before {
                    if *words >= budget {
                        out.truncate(mark);
                        continue;
                    }
                    out.push(Item::word(format!("w{}", *words)));
                    *words += 1;
                }
                out.push(Item::Tag(FormattingTag::close(style)));
                last_pair = Some(style);
            }
            _ => {
                out.push(Item::word(format!("w{}", *words)));
                *words += 1;
                last_pair = None;
            }
        }
    }
}

/// Random alignment with roughly `density` of cells linked.
pub fn random_alignment(rng: &mut impl Rng, targets: usize, sources: usize, density: f64) -> AlignmentMatrix {
    let mut m = AlignmentMatrix::zeros(targets, sources);
    for t in 0..targets {
        for s in 0..sources {
            if rng.gen_bool(density) {
                m.set(t, s, f64::from(rng.gen_range(1..=4u8)) / 4.0).unwrap();
            }
        }
    }
    m
}

pub fn argmax_source(a: &AlignmentMatrix, t: usize) -> Option<usize> {
    let mut best: Option<usize> = None;
    for s in 0..a.source_len() {
        let v = a.score(t, s);
        if v > 0.0 && best.is_none_or(|b| v > a.score(t, b)) {
            best = Some(s);
        }
    }
    best
}

pub fn argmax_target(a: &AlignmentMatrix, s: usize) -> Option<usize> {
    let mut best: Option<usize> = None;
    for t in 0..a.target_len() {
        let v = a.score(t, s);
        if v > 0.0 && best.is_none_or(|b| v > a.score(b, s)) {
            best = Some(t);
        }
    }
    best
}

/// Where each unpaired tag of `source` should land in the target, as the
/// word index it binds to, in source order.
pub fn expected_unpaired_slots(source: &TaggedSegment, a: &AlignmentMatrix) -> Vec<(usize, StyleId)> {
    let mut out = Vec::new();
    let mut words_seen = 0usize;
    for item in source.items() {
        match item {
            Item::Word(_) => words_seen += 1,
            Item::Tag(t) if t.kind == TagKind::Unpaired => {
                let mut slot = 0;
                let mut w = words_seen;
                while w > 0 {
                    if let Some(t) = argmax_target(a, w - 1) {
                        slot = t + 1;
                        break;
                    }
                    w -= 1;
                }
                out.push((slot, t.style));
            }
            Item::Tag(_) => {}
        }
    }
    out
}

pub fn unpaired_slots(seg: &TaggedSegment) -> Vec<(usize, StyleId)> {
    let mut v: Vec<(usize, StyleId)> = seg
        .tag_positions()
        .into_iter()
        .filter(|(_, t)| t.kind == TagKind::Unpaired)
        .map(|(p, t)| (p, t.style))
        .collect();
    v.sort_by_key(|(p, _)| *p);
    v
}

pub fn tag_multiset(seg: &TaggedSegment, kind: TagKind) -> Vec<StyleId> {
    let mut v: Vec<StyleId> = seg.tags().filter(|t| t.kind == kind).map(|t| t.style).collect();
    v.sort();
    v
}

use postedit_core::suggest::{MaskScorer, MaskedInput, TokenProb};

/// Deterministic context-dependent scorer over a small vocabulary: the
/// distribution at a mask depends on the filled tokens to its left.
pub struct ToyScorer {
    pub vocab: Vec<String>,
    pub salt: u64,
}

fn mix(h: u64, s: &str) -> u64 {
    s.bytes().fold(h ^ 0x9e37_79b9_7f4a_7c15, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3))
}

impl MaskScorer for ToyScorer {
    fn score(&self, _: &[String], target: &[Option<String>], q: usize, top_n: usize) -> postedit_core::Result<Vec<TokenProb>> {
        let mut h = mix(self.salt, &q.to_string());
        for t in &target[..q] {
            h = mix(h, t.as_deref().unwrap_or("?"));
        }
        let weights: Vec<f64> = self.vocab.iter().map(|v| 1.0 + (mix(h, v) % 97) as f64).collect();
        let total: f64 = weights.iter().sum();
        let mut out: Vec<TokenProb> = self.vocab.iter().zip(&weights).map(|(v, w)| TokenProb::new(v.clone(), w / total)).collect();
        out.sort_by(|a, b| b.prob.total_cmp(&a.prob).then_with(|| a.token.cmp(&b.token)));
        out.truncate(top_n);
        Ok(out)
    }
}

/// Every complete fill of the variant's masks with its joint log-probability,
/// best first (ties: token order).
pub fn enumerate_fills(variant: &MaskedInput, scorer: &dyn MaskScorer, vocab: &[String]) -> Vec<(Vec<String>, f64)> {
    let positions = variant.mask_positions();
    let mut all: Vec<(Vec<String>, f64)> = vec![(Vec::new(), 0.0)];
    for step in 0..positions.len() {
        let mut next = Vec::new();
        for (tokens, lp) in &all {
            let mut target = variant.target.clone();
            for (tok, &p) in tokens.iter().zip(&positions) {
                target[p] = Some(tok.clone());
            }
            let dist = scorer.score(&variant.source, &target, positions[step], vocab.len()).unwrap();
            for tp in dist {
                let mut t = tokens.clone();
                t.push(tp.token);
                next.push((t, lp + libm::log(tp.prob)));
            }
        }
        all = next;
    }
    all.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    all
}
