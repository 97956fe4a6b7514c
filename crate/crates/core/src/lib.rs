//! Executable promise problems, strong reductions, oracle procedures and the
//! randomized isolation reduction, each checked against exact brute-force
//! semantics on small instances.

pub mod circuit;
pub mod error;
pub mod expr;
pub mod harness;
pub mod mutation;
pub mod oracle;
pub mod reductions;
pub mod semantics;
pub mod vv;

pub use error::{Error, Result};
pub use expr::{Assignment, Expr, Family, VarRef};
pub use mutation::Mutation;
pub use semantics::{PromiseValue, ProblemId, ProblemKind, Quantifier};
