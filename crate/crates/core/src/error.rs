use thiserror::Error;

use crate::label::Label;
use crate::rational::Rational;

/// Everything that can go wrong building or analysing channels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QifError {
    #[error("invalid label {0:?}: labels must match [A-Za-z0-9_@-]+")]
    BadLabel(String),

    #[error("duplicate label {label} on the {axis} axis")]
    DuplicateLabel { axis: &'static str, label: Label },

    #[error("malformed rational {0:?}")]
    BadRational(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("{what} must have at least one {axis}")]
    Empty {
        what: &'static str,
        axis: &'static str,
    },

    #[error("{what}: expected {expected} entries, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry {
        row: Label,
        col: Label,
        value: Rational,
    },

    #[error("row {row} sums to {sum}, not 1")]
    NonStochasticRow { row: Label, sum: Rational },

    #[error("{what} sums to {sum}, not 1")]
    NotNormalized { what: &'static str, sum: Rational },

    #[error("label mismatch: {left} has [{left_labels}] but {right} has [{right_labels}]")]
    LabelMismatch {
        left: &'static str,
        left_labels: String,
        right: &'static str,
        right_labels: String,
    },

    #[error("prior vulnerability is zero, so the multiplicative leakage ratio is undefined")]
    DegenerateGain,

    #[error("secret {0} has zero prior mass; a full-support prior is required")]
    ZeroPriorMass(Label),

    #[error("epsilon factor {0} is below 1")]
    InvalidEpsilon(String),

    #[error("invalid instance spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T, E = QifError> = std::result::Result<T, E>;
