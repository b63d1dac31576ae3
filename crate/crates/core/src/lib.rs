//! Exact-arithmetic toolkit for locally indistinguishable orthogonal product
//! states and the entanglement-assisted LOCC protocols that discriminate them.
//!
//! Everything is computed over the rationals. States are stored unnormalized
//! with sparse amplitude maps, measurements are rational projectors, and
//! protocols are explicit measurement trees that the engine simulates
//! branch by branch.
//!
//! Module map:
//! - [`linalg`]: layouts, kets, local operators, exact ranks and nullspaces.
//! - [`families`]: the state-set constructors and their resource states.
//! - [`engine`]: protocol trees, validation, simulation, perfection checks.
//! - [`builders`]: the concrete discrimination protocols.
//! - [`verification`]: Gram, product, witness and cardinality checks.
//! - [`tiles`]: text rendering of bipartite tile diagrams.

pub mod builders;
pub mod engine;
pub mod error;
pub mod families;
pub mod json;
pub mod linalg;
pub mod par;
pub mod scalar;
pub mod tiles;
pub mod verification;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Version tag carried by every JSON document this crate emits.
pub const SCHEMA_VERSION: u32 = 1;
