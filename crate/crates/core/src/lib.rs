//! framescope turns time-windowed document sets into cosine-normalized
//! word-similarity networks, lays them out as 2-D semantic maps, and
//! quantifies how the position of focal words drifts between windows.
//!
//! The pipeline runs in stages, each a module of this crate:
//!
//! 1. [`corpus`] — ingest plain-text files and partition them into
//!    labeled time windows.
//! 2. [`textprep`] — tokenize, plural-stem, stopword-filter, and build
//!    the per-window vocabulary.
//! 3. [`vectorspace`] — word/document count matrices and the
//!    cosine-normalized word-similarity matrix.
//! 4. [`netbuild`] — threshold the similarity matrix into a weighted
//!    word network, size nodes by log frequency, drop isolates.
//! 5. [`layout`] — Kamada-Kawai spring-energy embedding of the network.
//! 6. [`diachrony`] — core/periphery trajectories of focal words and
//!    emerging-term detection between two window snapshots.
//! 7. [`export`] — Pajek, SVG, CSV, and the native snapshot format.
//! 8. [`pipeline`] / [`config`] — end-to-end orchestration used by the
//!    `framescope` binary.
//!
//! With the default `parallel` feature the embarrassingly parallel
//! stages (per-file ingestion, per-document preprocessing, similarity
//! cells) run on rayon. Outputs are bitwise identical to the sequential
//! fallback (`--no-default-features`): every cell is computed by exactly
//! one task with a fixed summation order.

pub mod config;
pub mod corpus;
pub mod diachrony;
pub mod export;
pub mod layout;
pub mod netbuild;
pub mod pipeline;
pub mod textprep;
pub mod vectorspace;

pub use config::RunConfig;
pub use corpus::{Corpus, Document, TimeWindow};
pub use diachrony::{Snapshot, SnapshotDiff};
pub use layout::LayoutResult;
pub use netbuild::SemanticGraph;
pub use textprep::Vocabulary;
pub use vectorspace::{CosineMatrix, WordDocMatrix};
