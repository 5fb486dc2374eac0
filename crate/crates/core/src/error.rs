use thiserror::Error;

/// Errors raised by lookups and numeric routines in the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("unknown event id: {0}")]
    UnknownEvent(String),
    #[error("unknown object id: {0}")]
    UnknownObject(String),
    #[error("unknown object type: {0}")]
    UnknownObjectType(String),
    #[error("event {event} is not part of the execution")]
    EventNotInExecution { event: String },
    #[error("object {object} of type {type_name} is missing attribute {attr}")]
    MissingAttribute {
        object: String,
        type_name: String,
        attr: String,
    },
    #[error("split ratios must sum to 1.0, got {0}")]
    BadSplitRatios(f64),
    #[error("not enough executions ({have}) for {need} non-empty splits")]
    TooFewExecutions { have: usize, need: usize },
    #[error("empty training split")]
    EmptyTrainSplit,
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("shape mismatch in {context}: expected {expected}, got {got}")]
    ShapeMismatch {
        context: String,
        expected: String,
        got: String,
    },
}

pub type Result<T> = core::result::Result<T, CoreError>;
