//! Unsupervised grammar induction by multiple alignment and minimum length
//! encoding.
//!
//! Sentences (New) are aligned one at a time against a growing store of
//! patterns (Old). Segments, word classes and sentence schemas are derived
//! from the alignments, and a staged search then picks the subset of Old
//! that minimises grammar size plus encoded corpus size.

pub mod alignment;
pub mod cli;
pub mod coding;
pub mod error;
pub mod grammar;
pub mod io;
pub mod learning;
pub mod pattern;
pub mod repository;
pub mod sifting;

pub use alignment::{Alignment, AlignmentParams};
pub use coding::{CodingModel, CostMode};
pub use error::{Error, Result};
pub use grammar::{canonicalize, tidy_grammar, CanonicalForm, Grammar};
pub use pattern::{make_pattern, Origin, Pattern, PatternId, Role, Symbol};
pub use repository::{Corpus, IdAllocator, Repository};
pub use sifting::{sp70_run, MetricsRow, RunOutcome, RunParams, SearchParams};
