//! Weighted finite-state machinery for zero-shot activity recognition.
//!
//! Activities are described by *dynamic action signatures*: for every
//! attribute (a person, a vehicle, a needle in the left gripper, ...) a label
//! states whether the attribute is absent, persists, starts or ends over the
//! course of the action. Each pattern compiles to a small logic acceptor,
//! per-frame detection probabilities compile to an observation transducer,
//! and the compatibility of a label with a video is read off the composition
//! of the two with a best-path or total-weight search.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, tracing input and
//! the command-line tool live in the `dynsig` crate.
//!
//! Modules:
//!
//! - [`semiring`]: log and tropical weights.
//! - [`fst`]: transducers, composition, best path, total weight, text dumps.
//! - [`signatures`]: dynamic patterns, signature specs and label sets.
//! - [`observation`]: attribute probability traces and observation machines.
//! - [`classifier`]: zero-shot classification of a whole trace.
//! - [`segmental`]: grammar-constrained joint segmentation and labeling.
//! - [`metrics`]: frame accuracy, edit score, per-class accuracy.
//! - [`synthbench`]: synthetic traces and brute-force reference scorers.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod classifier;
mod error;
pub mod fst;
mod math;
pub mod metrics;
pub mod observation;
pub mod segmental;
pub mod semiring;
pub mod signatures;
pub mod synthbench;

pub use classifier::{classify, classify_static, score_label, Classification, LabelScore, ScoreMode};
pub use error::{Error, Result};
pub use fst::{best_path, compose, total_weight, Edge, Path, Symbol, SymbolTable, Transducer, EPSILON};
pub use observation::{observation_transducer, EpsilonPolicy, ObservationTrace};
pub use segmental::{decode, decode_unconstrained, DurationBounds, Grammar, Segment, SegmentLabeling};
pub use semiring::{LogWeight, Semiring, TropicalWeight};
pub use signatures::{compile_pattern, DynamicPattern, LabelSet, SignatureSpec};
