use thiserror::Error;

pub type Result<T> = std::result::Result<T, BmcmError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BmcmError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("slot id {0} appears more than once")]
    DuplicateSlot(usize),

    #[error("slot ids must cover 1..={expected} exactly, found ?{found}")]
    SlotOutOfRange { found: usize, expected: usize },

    #[error("variable `{0}` must differ from the target")]
    VariableIsTarget(String),

    #[error("variable `{0}` is missing from the row")]
    MissingVariable(String),

    #[error("assignment has {got} operators but the template has {expected} slots")]
    AssignmentLength { expected: usize, got: usize },

    #[error("{slots} slots exceed the exhaustive enumeration limit of {limit}")]
    Capacity { slots: usize, limit: usize },

    #[error("model enumeration needs exactly 3 explanatory variables, got {0}")]
    UnsupportedArity(usize),

    #[error("input has no header row")]
    MissingHeader,

    #[error("duplicate column `{0}` in header")]
    DuplicateColumn(String),

    #[error("row {row}, column `{column}`: expected 0 or 1, found {value:?}")]
    NonBinaryCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("outcome column `{0}` is not in the header")]
    UnknownOutcome(String),

    #[error("row {row} has {found} fields, header has {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("dataset has no rows")]
    EmptyDataset,

    #[error("invalid dataset size {n}: {reason}")]
    InvalidSize { n: usize, reason: &'static str },

    #[error("csv: {0}")]
    Csv(String),

    #[error("binomial test is undefined with zero trials")]
    UndefinedTest,

    #[error("2x2 table has a zero margin")]
    DegenerateTable,

    #[error("chi-square argument must be a finite value >= 0, got {0}")]
    Domain(f64),

    #[error("only 1 degree of freedom is supported, got {0}")]
    UnsupportedDof(u32),

    #[error("slot {0} has no faithful trials")]
    UndecidableSlot(usize),

    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("trials per row must be at least 1")]
    InvalidTrials,

    #[error("null-data gate needs at least one all-1 and one all-0 row (all-1: {all_one}, all-0: {all_zero})")]
    GateInapplicable { all_one: u64, all_zero: u64 },

    #[error("null-data gate did not pass (p = {p_value:e}); change the variables or hypothesis")]
    GateNotPassed { p_value: f64 },

    #[error("template target `{found}` does not match outcome `{expected}`")]
    TargetMismatch { expected: String, found: String },

    #[error("no model templates given")]
    NoTemplates,

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for BmcmError {
    fn from(err: std::io::Error) -> Self {
        BmcmError::Io(err.to_string())
    }
}
