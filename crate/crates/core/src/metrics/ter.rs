//! Translation edit rate with greedy block shifts.
//!
//! The shift search follows the reference TER tool: a candidate block is a
//! run of hypothesis words that equals a run of reference words, at least one
//! word of the block and of the matching reference run is misaligned, and the
//! block is moved next to the hypothesis word aligned with the reference run's
//! neighbourhood. The candidate with the largest edit-distance reduction wins
//! (ties: longer block, then leftmost block, then leftmost destination) and
//! shifting stops once no candidate reduces the distance or after
//! [`MAX_SHIFT_CANDIDATES`] evaluations. Edit distance is exact; sacrebleu
//! bands it to 25 cells around the diagonal, which only matters for long or
//! very unequal sentences.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub const MAX_SHIFT_SIZE: usize = 10;
pub const MAX_SHIFT_DISTANCE: usize = 50;
/// Shift candidates evaluated per sentence before the search gives up, as
/// in sacrebleu.
pub const MAX_SHIFT_CANDIDATES: usize = 1000;

/// Edit operations of the final alignment. `Insert` adds a reference word that
/// the hypothesis lacks; `Delete` drops a hypothesis word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EditOp {
    Match,
    Substitute,
    Insert,
    Delete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlignStep {
    pub op: EditOp,
    /// Index into the shifted hypothesis.
    pub hyp: Option<usize>,
    pub reference: Option<usize>,
}

/// A block move: `len` words starting at `start` go to `target`, in the
/// coordinates of the sequence before the move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shift {
    pub start: usize,
    pub len: usize,
    pub target: usize,
}

impl Shift {
    pub fn apply<T: Clone>(&self, words: &[T]) -> Vec<T> {
        perform_shift(words, self.start, self.len, self.target)
    }
}

fn perform_shift<T: Clone>(words: &[T], start: usize, len: usize, target: usize) -> Vec<T> {
    let n = words.len();
    let mut out = Vec::with_capacity(n);
    if target < start {
        out.extend_from_slice(&words[..target]);
        out.extend_from_slice(&words[start..start + len]);
        out.extend_from_slice(&words[target..start]);
        out.extend_from_slice(&words[start + len..]);
    } else if target > start + len {
        out.extend_from_slice(&words[..start]);
        out.extend_from_slice(&words[start + len..target]);
        out.extend_from_slice(&words[start..start + len]);
        out.extend_from_slice(&words[target..]);
    } else {
        // destination inside the block: slide it right by target - start
        let cut = (len + target).min(n);
        out.extend_from_slice(&words[..start]);
        out.extend_from_slice(&words[start + len..cut]);
        out.extend_from_slice(&words[start..start + len]);
        out.extend_from_slice(&words[cut..]);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditScript {
    pub shifts: Vec<Shift>,
    /// `origin[i]` is the original hypothesis index of shifted word `i`.
    pub origin: Vec<usize>,
    /// Per original hypothesis word: moved by at least one shift.
    pub moved: Vec<bool>,
    /// Levenshtein alignment between the shifted hypothesis and the reference.
    pub steps: Vec<AlignStep>,
}

impl EditScript {
    fn count(&self, op: EditOp) -> usize {
        self.steps.iter().filter(|s| s.op == op).count()
    }

    pub fn matches(&self) -> usize {
        self.count(EditOp::Match)
    }

    pub fn substitutions(&self) -> usize {
        self.count(EditOp::Substitute)
    }

    pub fn insertions(&self) -> usize {
        self.count(EditOp::Insert)
    }

    pub fn deletions(&self) -> usize {
        self.count(EditOp::Delete)
    }

    pub fn shift_count(&self) -> usize {
        self.shifts.len()
    }

    pub fn cost(&self) -> usize {
        self.substitutions() + self.insertions() + self.deletions() + self.shift_count()
    }

    /// Replays the script on `hypothesis`, producing the reference.
    pub fn apply<S: AsRef<str>, R: AsRef<str>>(&self, hypothesis: &[S], reference: &[R]) -> Vec<alloc::string::String> {
        let mut words: Vec<&str> = hypothesis.iter().map(AsRef::as_ref).collect();
        for shift in &self.shifts {
            words = shift.apply(&words);
        }
        let mut out = Vec::new();
        for step in &self.steps {
            match step.op {
                EditOp::Match => out.push(words[step.hyp.unwrap_or(0)].into()),
                EditOp::Substitute | EditOp::Insert => {
                    out.push(reference[step.reference.unwrap_or(0)].as_ref().into())
                }
                EditOp::Delete => {}
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerResult {
    pub edits: usize,
    pub reference_len: usize,
    pub script: EditScript,
}

impl TerResult {
    /// Edits per reference word; may exceed 1.
    pub fn score(&self) -> f64 {
        self.edits as f64 / self.reference_len as f64
    }
}

/// Word-level TER of `hypothesis` against `reference`.
pub fn ter<H: AsRef<str>, R: AsRef<str>>(hypothesis: &[H], reference: &[R]) -> Result<TerResult> {
    if reference.is_empty() {
        return Err(Error::precondition("TER needs a non-empty reference"));
    }
    let reference: Vec<&str> = reference.iter().map(AsRef::as_ref).collect();
    let mut words: Vec<&str> = hypothesis.iter().map(AsRef::as_ref).collect();
    let mut origin: Vec<usize> = (0..words.len()).collect();
    let mut moved = vec![false; words.len()];
    let mut shifts = Vec::new();
    let mut checked = 0usize;

    loop {
        let (dist, steps) = align(&words, &reference);
        if dist == 0 {
            break;
        }
        let found = best_shift(&words, &reference, dist, &steps, &mut checked);
        if checked >= MAX_SHIFT_CANDIDATES {
            break;
        }
        let Some(shift) = found else {
            break;
        };
        for &o in &origin[shift.start..shift.start + shift.len] {
            moved[o] = true;
        }
        words = shift.apply(&words);
        origin = shift.apply(&origin);
        shifts.push(shift);
    }

    let (dist, steps) = align(&words, &reference);
    let script = EditScript { shifts, origin, moved, steps };
    debug_assert_eq!(script.cost(), dist + script.shift_count());
    Ok(TerResult {
        edits: script.cost(),
        reference_len: reference.len(),
        script,
    })
}

/// HTER: TER of machine translation output against its human post-edit.
pub fn hter<H: AsRef<str>, R: AsRef<str>>(mt: &[H], post_edit: &[R]) -> Result<TerResult> {
    ter(mt, post_edit).map_err(|e| match e {
        Error::Precondition(_) => Error::precondition("HTER needs a non-empty post-edit"),
        other => other,
    })
}

/// Unit-cost word-level Levenshtein distance.
pub fn edit_distance<A: AsRef<str>, B: AsRef<str>>(a: &[A], b: &[B]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x.as_ref() != y.as_ref());
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Levenshtein distance with one optimal alignment. On the way back from the
/// end, diagonal moves are preferred over deletions, deletions over insertions.
fn align(hyp: &[&str], reference: &[&str]) -> (usize, Vec<AlignStep>) {
    let (n, m) = (hyp.len(), reference.len());
    let width = m + 1;
    let mut d = vec![0usize; (n + 1) * width];
    for j in 0..=m {
        d[j] = j;
    }
    for i in 1..=n {
        d[i * width] = i;
        for j in 1..=m {
            let sub = d[(i - 1) * width + j - 1] + usize::from(hyp[i - 1] != reference[j - 1]);
            let del = d[(i - 1) * width + j] + 1;
            let ins = d[i * width + j - 1] + 1;
            d[i * width + j] = sub.min(del).min(ins);
        }
    }
    let mut steps = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = d[i * width + j];
        if i > 0 && j > 0 {
            let same = hyp[i - 1] == reference[j - 1];
            if d[(i - 1) * width + j - 1] + usize::from(!same) == here {
                steps.push(AlignStep {
                    op: if same { EditOp::Match } else { EditOp::Substitute },
                    hyp: Some(i - 1),
                    reference: Some(j - 1),
                });
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && d[(i - 1) * width + j] + 1 == here {
            steps.push(AlignStep { op: EditOp::Delete, hyp: Some(i - 1), reference: None });
            i -= 1;
        } else {
            steps.push(AlignStep { op: EditOp::Insert, hyp: None, reference: Some(j - 1) });
            j -= 1;
        }
    }
    steps.reverse();
    (d[n * width + m], steps)
}

fn best_shift(words: &[&str], reference: &[&str], dist: usize, steps: &[AlignStep], checked: &mut usize) -> Option<Shift> {
    let mut hyp_err = vec![false; words.len()];
    let mut ref_err = vec![false; reference.len()];
    // reference position → hypothesis position it sits after (-1: before everything)
    let mut ref_to_hyp = vec![-1isize; reference.len()];
    let mut last_hyp: isize = -1;
    for step in steps {
        match step.op {
            EditOp::Match | EditOp::Substitute => {
                let (h, r) = (step.hyp.unwrap_or(0), step.reference.unwrap_or(0));
                last_hyp = h as isize;
                ref_to_hyp[r] = last_hyp;
                if step.op == EditOp::Substitute {
                    hyp_err[h] = true;
                    ref_err[r] = true;
                }
            }
            EditOp::Delete => {
                let h = step.hyp.unwrap_or(0);
                last_hyp = h as isize;
                hyp_err[h] = true;
            }
            EditOp::Insert => {
                let r = step.reference.unwrap_or(0);
                ref_to_hyp[r] = last_hyp;
                ref_err[r] = true;
            }
        }
    }

    // ranked by gain desc, len desc, start asc, target asc
    let mut best: Option<(usize, Shift)> = None;
    let better = |gain: usize, cand: &Shift, best: &Option<(usize, Shift)>| match best {
        None => true,
        Some((g, b)) => {
            (gain, cand.len, core::cmp::Reverse(cand.start), core::cmp::Reverse(cand.target))
                > (*g, b.len, core::cmp::Reverse(b.start), core::cmp::Reverse(b.target))
        }
    };

    'pairs: for start_h in 0..words.len() {
        for start_r in 0..reference.len() {
            if start_h.abs_diff(start_r) > MAX_SHIFT_DISTANCE {
                continue;
            }
            let mut len = 0;
            while start_h + len < words.len()
                && start_r + len < reference.len()
                && len < MAX_SHIFT_SIZE
                && words[start_h + len] == reference[start_r + len]
            {
                len += 1;
                if !hyp_err[start_h..start_h + len].iter().any(|e| *e) {
                    continue;
                }
                if !ref_err[start_r..start_r + len].iter().any(|e| *e) {
                    continue;
                }
                let anchor = ref_to_hyp[start_r];
                if anchor >= start_h as isize && anchor < (start_h + len) as isize {
                    continue;
                }
                let mut prev_target = None;
                for offset in -1isize..len as isize {
                    let r = start_r as isize + offset;
                    let target = if r < 0 { 0 } else { (ref_to_hyp[r as usize] + 1) as usize };
                    if prev_target == Some(target) {
                        continue;
                    }
                    prev_target = Some(target);
                    let cand = Shift { start: start_h, len, target };
                    let shifted = cand.apply(words);
                    let new_dist = edit_distance(&shifted, reference);
                    *checked += 1;
                    if new_dist >= dist {
                        continue;
                    }
                    let gain = dist - new_dist;
                    if better(gain, &cand, &best) {
                        best = Some((gain, cand));
                    }
                }
                if *checked >= MAX_SHIFT_CANDIDATES {
                    break 'pairs;
                }
            }
        }
    }
    best.map(|(_, s)| s)
}
