//! Exact tensor-product linear algebra over labeled multi-register systems.
//!
//! Basis labels are 1-based at every public boundary (`|1⟩ … |d⟩`); the
//! amplitude maps store 0-based digits internally.

mod exact;
mod ket;
mod layout;
mod operator;

pub use exact::{nullspace, rank, DenseMatrix};
pub use ket::{inner, tensor, Ket, Tuple};
pub use layout::{Register, Role, SystemLayout};
pub use operator::{
    apply_local, embed_basis_change, schmidt_rank_across, LocalOperator, SchmidtInfo,
    SparseMatrix, SparseVector,
};
