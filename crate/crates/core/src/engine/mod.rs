//! Protocol trees and their exact simulation.

mod simulate;
mod tree;
mod validate;
mod verify;

pub use simulate::{factor_registers, simulate, simulate_traced, LeafHit, LeafKind, LeafMap};
pub use tree::{
    Complement, Discrepancy, DiscrepancyKind, Leaf, MeasurementNode, Node, Outcome,
    ProtocolTree, ResourceFactor, ResourceSpec, SetRef, COMPLEMENT, FAIL,
};
pub use validate::{validate, validate_against, CompletenessDefect, Diagnostics};
pub use verify::{verify_perfect, verify_perfect_with, DiscriminationReport, SharedLeaf, StateReport};
