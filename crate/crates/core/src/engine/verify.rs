//! Perfect-discrimination check of a protocol tree against a state set.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::simulate::{factor_registers, simulate_factored, FactoredKet, LeafKind};
use super::tree::ProtocolTree;
use super::validate::{validate_against, Diagnostics};
use crate::families::StateSet;
use crate::par::{self, Exec};
use crate::scalar::{self, Scalar};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafEntry {
    pub declared: String,
    #[serde(with = "scalar::as_fraction")]
    pub probability: Scalar,
    pub in_postselection: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
}

/// Outcome statistics of one input state. All probabilities are absolute;
/// `conditional_success` is `identified / branch_probability`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateReport {
    #[serde(with = "scalar::as_fraction")]
    pub branch_probability: Scalar,
    #[serde(with = "scalar::as_fraction")]
    pub identified: Scalar,
    #[serde(with = "scalar::as_fraction")]
    pub misidentified: Scalar,
    #[serde(with = "scalar::as_fraction")]
    pub failed: Scalar,
    #[serde(with = "scalar::as_fraction")]
    pub conditional_success: Scalar,
    pub leaves: BTreeMap<String, LeafEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedLeaf {
    pub leaf: String,
    pub states: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscriminationReport {
    pub schema: u32,
    pub protocol: String,
    pub family: String,
    pub params: Vec<usize>,
    pub post_selected: bool,
    pub perfect: bool,
    pub states: BTreeMap<String, StateReport>,
    pub shared_leaves: Vec<SharedLeaf>,
    pub failures: Vec<String>,
    pub diagnostics: Diagnostics,
}

pub fn verify_perfect(tree: &ProtocolTree, set: &StateSet, post_selected: bool) -> Result<DiscriminationReport> {
    verify_perfect_with(tree, set, post_selected, Exec::Auto)
}

/// Simulates every state of `set` tensored with the resource. With
/// `post_selected`, each state is scored conditionally on the branch that
/// takes every post-selected outcome; otherwise over the whole tree.
pub fn verify_perfect_with(
    tree: &ProtocolTree,
    set: &StateSet,
    post_selected: bool,
    exec: Exec,
) -> Result<DiscriminationReport> {
    let diagnostics = validate_against(tree, set);
    let resource = tree.resource.kets()?;
    let runs = par::map(exec, set.states(), |s| -> Result<_> {
        let mut parts = factor_registers(&s.ket).unwrap_or_else(|| vec![s.ket.clone()]);
        parts.extend(resource.iter().cloned());
        let hits = simulate_factored(tree, &FactoredKet::new(parts)?, false)?;
        Ok((s.label.clone(), hits))
    });

    let mut states = BTreeMap::new();
    let mut owners: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut failures = Vec::new();
    for run in runs {
        let (label, hits) = run?;
        let mut rep = StateReport {
            branch_probability: Scalar::zero(),
            identified: Scalar::zero(),
            misidentified: Scalar::zero(),
            failed: Scalar::zero(),
            conditional_success: Scalar::zero(),
            leaves: BTreeMap::new(),
        };
        for (path, hit) in hits {
            let in_scope = !post_selected || hit.in_postselection;
            if in_scope {
                rep.branch_probability += &hit.probability;
                match &hit.kind {
                    LeafKind::Declared(l) if *l == label => rep.identified += &hit.probability,
                    LeafKind::Declared(_) => rep.misidentified += &hit.probability,
                    LeafKind::Fail | LeafKind::Uncovered => rep.failed += &hit.probability,
                }
                // Failing leaves are already counted against each state.
                if matches!(hit.kind, LeafKind::Declared(_)) {
                    owners.entry(path.clone()).or_default().push(label.clone());
                }
            }
            rep.leaves.insert(
                path,
                LeafEntry {
                    declared: hit.kind.as_str().to_owned(),
                    probability: hit.probability,
                    in_postselection: hit.in_postselection,
                    tags: hit.tags,
                },
            );
        }
        if rep.branch_probability.is_zero() {
            failures.push(format!("`{label}` never reaches the scored branch"));
        } else {
            rep.conditional_success = &rep.identified / &rep.branch_probability;
            if !rep.conditional_success.is_one() {
                failures.push(format!(
                    "`{label}` identified with conditional probability {}",
                    scalar::to_fraction_string(&rep.conditional_success)
                ));
            }
        }
        states.insert(label, rep);
    }
    let shared_leaves: Vec<SharedLeaf> = owners
        .into_iter()
        .filter(|(_, s)| s.len() > 1)
        .map(|(leaf, states)| SharedLeaf { leaf, states })
        .collect();
    for s in &shared_leaves {
        failures.push(format!("leaf `{}` reached by {}", s.leaf, s.states.join(", ")));
    }
    if !diagnostics.is_clean() {
        failures.push("protocol fails validation".into());
    }
    Ok(DiscriminationReport {
        schema: crate::SCHEMA_VERSION,
        protocol: tree.name.clone(),
        family: set.family.json_name().to_owned(),
        params: set.params.clone(),
        post_selected,
        perfect: failures.is_empty(),
        states,
        shared_leaves,
        failures,
        diagnostics,
    })
}
