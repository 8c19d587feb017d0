//! Sentence alignment for comparable documents, framed as cross-language
//! span prediction.
//!
//! Each source sentence is a query against the target document. Scored
//! spans are snapped to sentence boundaries and then resolved into a
//! one-to-one-per-sentence alignment, either by an exact integer program
//! over span pairs from both directions or by averaging and thresholding
//! per sentence pair. A dictionary plus dynamic-programming aligner serves
//! as a baseline, and SQuAD-layout training data can be synthesized from
//! parallel text.

pub mod align;
pub mod baseline;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod fixture;
pub mod optimize;
pub mod predict;
pub mod snap;
pub mod symmetrize;
pub mod synth;

pub use corpus::{Alignment, AlignmentGroup, Document, SentenceRange, Span};
pub use error::{Error, Result};

/// Library version, reported by the command-line tool.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
