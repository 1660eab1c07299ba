//! Crate-wide error type.
//!
//! Verification failures carry enough of a witness (indices, elements,
//! counts) to reproduce the offending check by hand.

/// Errors returned by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("invalid permutation images: {0}")]
    InvalidImages(String),

    #[error("cycle text parse error at byte {pos}: {msg}")]
    CycleParse { pos: usize, msg: String },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("degree must be even for a block permutation, got {0}")]
    OddDegree(usize),

    #[error("not a block permutation: point {point} breaks the block structure")]
    BlockStructure { point: usize },

    #[error("permutation moves a point outside the expected block: {point}")]
    OutsideBlock { point: usize },

    #[error("embedded degree {inner} exceeds target degree {outer}")]
    EmbedDegree { inner: usize, outer: usize },

    #[error("set is not closed under composition: {witness} is missing")]
    NotClosed { witness: String },

    #[error("set does not contain the identity")]
    NoIdentity,

    #[error("group closure exceeded the limit of {limit} elements")]
    ClosureLimit { limit: usize },

    #[error("set is not invariant under the group: {witness} maps outside it")]
    NotInvariant { witness: String },

    #[error("bad group spec '{spec}': {msg}")]
    GroupSpec { spec: String, msg: String },

    #[error("code has fewer than two words")]
    TooFewWords,

    #[error("duplicate word in code: {0}")]
    DuplicateWord(String),

    #[error("minimum distance {found} below required {required} (words {i} and {j})")]
    MinDistance {
        found: usize,
        required: usize,
        i: usize,
        j: usize,
    },

    #[error("distance-n relation is not transitive on words {i}, {j}, {k}")]
    NotTransitive { i: usize, j: usize, k: usize },

    #[error("separability classes have unequal sizes {sizes:?}")]
    UnequalClasses { sizes: Vec<usize> },

    #[error("class size {r} differs from the degree {n}, so classes are not full Latin squares")]
    ClassSizeNotDegree { r: usize, n: usize },

    #[error("not a Latin square: {0}")]
    NotLatin(String),

    #[error("squares {a} and {b} are not orthogonal: pair ({x}, {y}) occurs {count} times")]
    NotOrthogonal {
        a: usize,
        b: usize,
        x: usize,
        y: usize,
        count: usize,
    },

    #[error(
        "difference property fails for rows {i} and {j}: element {element} occurs {count} times, expected {lambda}"
    )]
    DifferenceProperty {
        i: usize,
        j: usize,
        element: String,
        count: usize,
        lambda: usize,
    },

    #[error("operation is defined for lambda = 1 only, got lambda = {0}")]
    LambdaNotOne(usize),

    #[error("difference matrix is not normalized: {0}")]
    NotNormalized(String),

    #[error("matrix shape is invalid: {0}")]
    MatrixShape(String),

    #[error("code is not a union of cosets of the regular representation: {witness}")]
    NotCosetUnion { witness: String },

    #[error("code does not contain the regular representation: {missing} is absent")]
    MissingRegularRep { missing: String },

    #[error("unknown dataset '{0}'")]
    UnknownDataset(String),

    #[error("dataset parse error at line {line}: {msg}")]
    DatasetParse { line: usize, msg: String },

    #[error("dataset '{name}' check '{field}' failed: expected {expected}, got {got}")]
    DatasetMismatch {
        name: String,
        field: String,
        expected: String,
        got: String,
    },

    #[error("search node limit of {0} exceeded")]
    NodeLimit(u64),

    #[error("invalid checkpoint: {0}")]
    Checkpoint(String),

    #[error("invalid search config: {0}")]
    SearchConfig(String),

    #[error("file format error at line {line}: {msg}")]
    FileFormat { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),

    #[error("json error: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
