//! Translation edit rate and BLEU.

mod bleu;
mod ter;

pub use bleu::{bleu, BleuStats, BLEU_EPSILON, BLEU_MAX_ORDER};
pub use ter::{
    edit_distance, hter, ter, AlignStep, EditOp, EditScript, Shift, TerResult, MAX_SHIFT_DISTANCE,
    MAX_SHIFT_SIZE,
};
