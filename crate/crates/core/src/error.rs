use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("width error at offset {pos}: variable {var} exceeds declared width {width} of block {block}")]
    Width {
        pos: usize,
        var: String,
        block: usize,
        width: usize,
    },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("index error: block {block} out of range 1..={blocks}")]
    Index { block: usize, blocks: usize },

    #[error("enumeration cap exceeded: {needed} assignments requested, cap is {cap}")]
    CapExceeded { needed: u128, cap: u64 },

    #[error("level mismatch: problem expects {expected} block(s), family has {found}")]
    LevelMismatch { expected: usize, found: usize },

    #[error("value problem needs a non-empty first block")]
    EmptyFirstBlock,

    #[error("unknown rule `{0}`")]
    UnknownRule(String),

    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    #[error("adversary tree exceeds path cap {cap}")]
    PathCapExceeded { cap: usize },

    #[error("incomplete registry: edge {from} -> {to} has no witness")]
    IncompleteRegistry { from: String, to: String },
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}
