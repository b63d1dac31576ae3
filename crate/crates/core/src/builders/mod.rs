//! Constructors for the discrimination protocols of each family.

mod bipartite;
mod compose;
mod core;
mod tripartite;

pub use bipartite::theorem1_protocol;
pub use compose::{compose_even, compose_odd, REMAINDER};
pub use tripartite::{theorem3_protocol, tripartite456_protocol};

use crate::engine::ProtocolTree;
use crate::{Error, Result};

/// Theorem selectors accepted by [`build_protocol`].
pub const THEOREMS: [&str; 6] = ["1", "2", "3", "4", "example1", "example456"];

/// Builds the protocol named by `theorem`. The `example*` selectors ignore
/// `dims` unless given, in which case they must match the example.
pub fn build_protocol(theorem: &str, dims: &[usize]) -> Result<ProtocolTree> {
    let arity = |n: usize| {
        if dims.len() == n {
            Ok(())
        } else {
            Err(Error::InvalidParameters(format!(
                "theorem {theorem} takes {n} dimensions, got {}",
                dims.len()
            )))
        }
    };
    let example = |fixed: &[usize]| {
        if dims.is_empty() || dims == fixed {
            Ok(())
        } else {
            Err(Error::InvalidParameters(format!(
                "{theorem} is fixed at dimensions {fixed:?}"
            )))
        }
    };
    match theorem {
        "1" => arity(2).and_then(|_| theorem1_protocol(dims[0], dims[1])),
        "example1" => example(&[4, 5]).and_then(|_| theorem1_protocol(4, 5)),
        "2" => compose_even(dims),
        "3" => arity(3).and_then(|_| theorem3_protocol(dims[0], dims[1], dims[2])),
        "4" => compose_odd(dims),
        "example456" => example(&[4, 5, 6]).and_then(|_| tripartite456_protocol()),
        other => Err(Error::InvalidParameters(format!(
            "unknown theorem `{other}` (expected one of {})",
            THEOREMS.join(", ")
        ))),
    }
}
