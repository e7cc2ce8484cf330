use alloc::string::String;

use crate::fst::Defect;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the algorithms in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("machine is malformed: {0}")]
    Malformed(Defect),

    #[error("symbol tables are incompatible: {0}")]
    AlphabetMismatch(String),

    #[error("machine has a cycle with positive log weight")]
    DivergentWeights,

    #[error("machine is cyclic; no topological order exists")]
    CyclicMachine,

    #[error("attribute `{0}` is not present")]
    UnknownAttribute(String),

    #[error("attribute `{0}` is declared twice")]
    DuplicateAttribute(String),

    #[error("label `{0}` is declared twice")]
    DuplicateLabel(String),

    #[error("label `{0}` is unknown")]
    UnknownLabel(String),

    #[error("signature for `{0}` has no attributes")]
    EmptySignature(String),

    #[error("trace has no frames")]
    EmptyTrace,

    #[error("trace has no attribute columns")]
    NoAttributes,

    #[error("probability {value} for attribute `{attribute}` at frame {frame} is outside [0, 1]")]
    OutOfRangeProbability {
        frame: u64,
        attribute: String,
        value: f64,
    },

    #[error("frame index {frame} does not increase over the previous row")]
    NonMonotonicFrames { frame: u64 },

    #[error("row {row} has {found} values, expected {expected}")]
    RowWidth {
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("epsilon floor {0} must lie strictly between 0 and 0.5")]
    InvalidEpsilon(f64),

    #[error("stride must be at least 1")]
    InvalidStride,

    #[error("invalid duration bounds: {0}")]
    InvalidBounds(String),

    #[error("grammar label `{0}` is not in the label set")]
    UnknownLabelInGrammar(String),

    #[error("grammar edges must carry a label (epsilon found on edge {0})")]
    EpsilonInGrammar(usize),

    #[error("no labeling tiles the trace under the grammar and duration bounds")]
    NoValidParse,

    #[error("label set is empty")]
    EmptyLabelSet,

    #[error("sequences differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("class set is empty")]
    EmptyClassSet,

    #[error("ground-truth label is outside the class set")]
    UnknownClass,

    #[error("infeasible synthesis plan: {0}")]
    InfeasiblePlan(String),

    #[error("invalid synthesis configuration: {0}")]
    InvalidConfig(String),

    #[error("enumeration too large: {0}")]
    EnumerationTooLarge(String),

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}
