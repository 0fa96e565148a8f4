//! Shipped weight domains.

pub mod conditional;
pub mod minheight;
pub mod relations;
pub mod trpds;
pub mod wspds;

pub use conditional::{conditional_ws, CondAnalysis, CondPds, CondRule, Conditional};
pub use minheight::{minheight_ws, Height, MinHeight, MinHeightDirect};
pub use relations::{encode_pds_as_relations, RelationAnalysis, Relations};
pub use trpds::{trpds_ws, TrAnalysis, TrPds, TrRule, TransductionFns};
pub use wspds::{wspds_ws, CoverAnalysis, IdealFn, IdealFns, NamedTransfer, WsRule, Wspds};
