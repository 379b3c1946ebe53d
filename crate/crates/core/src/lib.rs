//! Bar-complex invariants of finite groups: mod-`l` group homology, filler
//! norms, homological isoperimetric functions and minimal cycle
//! representatives, plus finite-family experiments around them.

mod census;
pub mod chain;
pub mod error;
pub mod family;
pub mod field;
pub mod group;
pub mod homology;
pub mod isoperimetry;
pub mod limits;
pub mod linalg;
pub mod modp;
pub mod registry;
pub mod search;
pub mod selftest;

pub use chain::{random_chain, Chain, ChainJson, TupleSpace};
pub use error::{Error, Result};
pub use group::{build_group, FiniteGroup, GroupSpec};
pub use limits::Limits;
pub use modp::Modulus;
