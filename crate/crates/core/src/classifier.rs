//! Zero-shot classification of a whole trace against a set of signatures.
//!
//! Each attribute's observation machine is composed with the logic acceptor
//! of the label's pattern for that attribute; the label's raw score is the
//! sum of the per-attribute path scores.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::fst::{best_path, compose, total_weight};
use crate::observation::{observation_transducer, EpsilonPolicy, ObservationTrace};
use crate::semiring::{LogWeight, Semiring};
use crate::signatures::{compile_pattern, DynamicPattern, LabelSet, SignatureSpec};

/// How consistent attribute sequences are aggregated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ScoreMode {
    /// Maximum over consistent sequences (Viterbi).
    #[default]
    BestPath,
    /// Log-sum over consistent sequences (forward).
    SumPaths,
}

impl ScoreMode {
    pub fn name(self) -> &'static str {
        match self {
            Self::BestPath => "bestpath",
            Self::SumPaths => "sumpaths",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabelScore {
    pub label: String,
    pub raw_log_score: LogWeight,
    /// `raw / (T * K)`, or `-inf` when the raw score is zero.
    pub normalized_score: f64,
}

/// A label that could not be scored because the trace lacks an attribute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub label: String,
    pub missing_attribute: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub winner: String,
    /// Sorted by normalized score, descending; ties by label.
    pub scores: Vec<LabelScore>,
    /// True when the winner's score is shared by another label.
    pub tie: bool,
    /// Labels sharing the winning score, in order. Empty without a tie.
    pub tied_labels: Vec<String>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Path score of one attribute column against one pattern.
pub fn score_attribute(
    trace: &ObservationTrace,
    attribute: &str,
    pattern: DynamicPattern,
    mode: ScoreMode,
    policy: &EpsilonPolicy,
) -> Result<LogWeight> {
    let observed = observation_transducer(trace, attribute, policy)?;
    let composed = compose(&observed, &compile_pattern(pattern))?;
    match mode {
        ScoreMode::BestPath => Ok(best_path(&composed)?.weight),
        ScoreMode::SumPaths => total_weight(&composed),
    }
}

pub fn score_label(
    trace: &ObservationTrace,
    spec: &SignatureSpec,
    mode: ScoreMode,
    policy: &EpsilonPolicy,
) -> Result<LabelScore> {
    if trace.frame_count() == 0 {
        return Err(Error::EmptyTrace);
    }
    let mut raw = LogWeight::ONE;
    for (attribute, pattern) in spec.attributes() {
        raw = raw.times(score_attribute(trace, attribute, *pattern, mode, policy)?);
    }
    Ok(LabelScore {
        label: spec.label().into(),
        raw_log_score: raw,
        normalized_score: normalize(raw, trace.frame_count(), spec.attributes().len()),
    })
}

fn normalize(raw: LogWeight, frames: usize, attributes: usize) -> f64 {
    if raw.is_finite() {
        raw.value() / (frames * attributes) as f64
    } else {
        f64::NEG_INFINITY
    }
}

const TIE_TOLERANCE: f64 = 1e-12;

fn same_score(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= TIE_TOLERANCE
}

/// Scores every label and returns the argmax.
///
/// Labels naming an attribute the trace lacks score zero and get a
/// [`Diagnostic`]; other errors abort.
pub fn classify(
    trace: &ObservationTrace,
    labels: &LabelSet,
    mode: ScoreMode,
    policy: &EpsilonPolicy,
) -> Result<Classification> {
    if labels.is_empty() {
        return Err(Error::EmptyLabelSet);
    }
    let mut scores = Vec::with_capacity(labels.len());
    let mut diagnostics = Vec::new();
    for spec in labels.specs() {
        match score_label(trace, spec, mode, policy) {
            Ok(s) => scores.push(s),
            Err(Error::UnknownAttribute(missing_attribute)) => {
                diagnostics.push(Diagnostic { label: spec.label().into(), missing_attribute });
                scores.push(LabelScore {
                    label: spec.label().into(),
                    raw_log_score: LogWeight::ZERO,
                    normalized_score: f64::NEG_INFINITY,
                });
            }
            Err(e) => return Err(e),
        }
    }
    scores.sort_by(|a, b| {
        b.normalized_score
            .partial_cmp(&a.normalized_score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.label.cmp(&b.label))
    });
    // near-equal scores may sort out of label order; regroup the leaders
    let best = scores[0].normalized_score;
    let lead = scores.iter().take_while(|s| same_score(s.normalized_score, best)).count();
    scores[..lead].sort_by(|a, b| a.label.cmp(&b.label));
    let tied_labels: Vec<String> =
        if lead > 1 { scores[..lead].iter().map(|s| s.label.clone()).collect() } else { Vec::new() };
    Ok(Classification {
        winner: scores[0].label.clone(),
        tie: lead > 1,
        tied_labels,
        scores,
        diagnostics,
    })
}

/// [`classify`] with every signature mapped to its static counterpart.
pub fn classify_static(
    trace: &ObservationTrace,
    labels: &LabelSet,
    mode: ScoreMode,
    policy: &EpsilonPolicy,
) -> Result<Classification> {
    classify(trace, &labels.staticize(), mode, policy)
}
