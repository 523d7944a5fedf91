//! Core algorithms for a post-editing workbench.
//!
//! Everything here is pure and allocation-only (`no_std` + `alloc`): the
//! tagged-segment document model, TER and BLEU, quality-estimation label
//! semantics, masked-span suggestion with beam search, sub-word to word
//! alignment with formatting-tag transfer, and the correction protocol used by
//! the evaluation harness. IO, HTTP and file formats live in the workbench
//! crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod align;
pub mod doc;
pub mod error;
pub mod harness;
pub mod lexicon;
pub mod metrics;
pub mod mt;
pub mod qe;
pub mod subword;
pub mod suggest;

pub use error::{Error, Result};
