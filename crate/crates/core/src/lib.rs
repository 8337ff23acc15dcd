//! Core library for `twinscope`: causal effect estimation on citation corpora
//! using mutually-citing paper pairs as matched counterfactual units.
//!
//! The pipeline runs in stages, each backed by one module:
//!
//! 1. [`ingest`] parses a bibliographic dump into a validated [`Corpus`].
//! 2. [`twin_graph`] detects pairs of papers that cite each other and builds
//!    the coauthorship network used for community diagnostics.
//! 3. [`treatments`] evaluates binary publication decisions (colon in the
//!    title, reference length, venue choice, ...) on papers and pairs.
//! 4. [`outcomes`] maps papers to log2 citation counts.
//! 5. [`estimator`] averages within-pair outcome differences into treatment
//!    effect estimates, with a naive group-mean baseline for contrast.
//! 6. [`diagnostics`] checks the matching assumptions (publication-year gaps,
//!    abstract similarity, collaboration distance).
//! 7. [`synthetic`] generates corpora with known potential outcomes so the
//!    estimator can be validated against ground truth.

pub mod diagnostics;
pub mod error;
pub mod estimator;
pub mod ingest;
pub mod outcomes;
pub mod synthetic;
pub mod treatments;
pub mod twin_graph;

pub use error::{Error, Result};
pub use estimator::{AteResult, PairDataset};
pub use ingest::{AuthorKey, AuthorRef, Corpus, PaperRecord};
pub use outcomes::OutcomeTable;
pub use treatments::{Assignment, TreatmentKind, TreatmentSpec};
pub use twin_graph::{CollabDistance, CollabGraph, TwinPair, TwinSet};
