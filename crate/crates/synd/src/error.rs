//! One error enum for the whole crate.
//!
//! Errors are diagnoses, not control flow: a returned `Error` always means
//! the caller handed us something outside an operation's stated domain, or
//! an explicitly searched-for object does not exist. Nothing in here is
//! used to signal "the mathematical check failed"; checks report verdicts
//! through their result types.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A point lies outside the window it was used against.
    #[error("point {point:?} is outside window {window}")]
    OutOfWindow { point: [i64; 3], window: String },

    /// Two sets were combined but live on different windows.
    #[error("window mismatch: {left} vs {right}")]
    WindowMismatch { left: String, right: String },

    /// A structuring radius or block size does not fit the window.
    #[error("radius {radius} too large for window {window}")]
    RadiusTooLarge { radius: i64, window: String },

    /// The operation is defined only for the other window convention.
    #[error("operation requires a {required} window, got {actual}")]
    WrongConvention { required: String, actual: String },

    /// Window construction parameters are out of range.
    #[error("invalid window: {reason}")]
    BadWindow { reason: String },

    /// A search completed without finding the requested object.
    #[error("search exhausted: {what}")]
    NotFound { what: String },

    /// A checker's hypothesis does not hold for the given instance.
    #[error("hypothesis violated: {reason}")]
    HypothesisFailed { reason: String },

    /// No subfamily of the given cubes covers the ground set.
    #[error("ground point {point:?} is covered by no cube")]
    NotCoverable { point: [i64; 3] },

    /// A configuration struct fails its own consistency requirements.
    #[error("invalid configuration: {reason}")]
    ConfigInvalid { reason: String },

    /// A construction parameter grows past what the window can hold.
    #[error("growth value {value} at level {level} exceeds window capacity {capacity}")]
    GrowthTooLarge {
        level: String,
        value: String,
        capacity: i64,
    },

    /// Malformed expression text. `column` is a 0-based byte offset.
    #[error("syntax error at line {line}, column {column}: expected {expected}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
    },

    /// An arithmetic parameter evaluated outside the representable range.
    #[error("value {value} does not fit in a machine integer ({context})")]
    EvalOverflow { value: String, context: String },

    /// An unrecognized construction name.
    #[error("unknown family '{name}'")]
    UnknownFamily { name: String },

    /// A family reference used the wrong arity or selector.
    #[error("bad family reference: {reason}")]
    BadFamilyRef { reason: String },

    /// Malformed run-length text.
    #[error("bad serialized set at line {line}: {reason}")]
    BadRle { line: usize, reason: String },
}

impl Error {
    pub(crate) fn mismatch(left: &crate::Window, right: &crate::Window) -> Self {
        Error::WindowMismatch {
            left: left.to_string(),
            right: right.to_string(),
        }
    }
}
