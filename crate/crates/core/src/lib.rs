//! Reachability analysis for weighted pushdown systems whose weights are
//! indexed by stack signatures.

pub mod algebra;
pub mod domains;
pub mod format;
pub mod frontend;
pub mod reglang;
pub mod saturation;
pub mod signatures;
pub mod wpds;
pub mod wqo;
