//! Bipartite protocol: Bob locks his share onto the resource, then Alice
//! discriminates.

use super::core::{self, Side};
use crate::engine::{Complement, MeasurementNode, Node, Outcome, ProtocolTree, ResourceSpec, SetRef};
use crate::families::{self, Family, ProductTerm};
use crate::linalg::{LocalOperator, Register, SystemLayout};
use crate::Result;

pub(crate) fn resource_pair(n: usize, suffix: &str) -> (Register, Register) {
    (
        Register::ancilla(&format!("a{suffix}"), &format!("Alice{suffix}"), n),
        Register::ancilla(&format!("b{suffix}"), &format!("Bob{suffix}"), n),
    )
}

/// Preparation step and discrimination body of one bipartite block.
/// Leaves carry the block-local labels of `terms`.
pub(crate) fn block(
    layout: &SystemLayout,
    suffix: &str,
    terms: &[ProductTerm],
) -> Result<(String, LocalOperator, Node)> {
    let alice = Side::new(&format!("Alice{suffix}"), &format!("a{suffix}"), &format!("A{suffix}"));
    let bob = Side::new(&format!("Bob{suffix}"), &format!("b{suffix}"), &format!("B{suffix}"));
    let stopper = terms.iter().find(|t| t.is_stopper()).map(|t| t.label.clone()).unwrap_or_default();
    let prep = core::preparation(layout, &bob, "B1")?;

    let states: Vec<_> = terms
        .iter()
        .filter(|t| !t.is_stopper())
        .map(|t| core::pair_of(t, 0, 1))
        .collect();
    let mut k = 0;
    let mut next = || {
        k += 1;
        format!("A{k}")
    };
    let outcomes = core::core_outcomes(layout, &alice, &states, &mut next)?
        .into_iter()
        .map(|c| {
            let child = core::continuation_node(layout, &c.cont, &alice, &bob, &stopper, c.op.label.as_str())?;
            Ok(Outcome::new(c.op, child))
        })
        .collect::<Result<Vec<_>>>()?;
    let body = Node::measure(MeasurementNode::new(
        &alice.party,
        outcomes,
        Complement::Declare(stopper),
    ));
    Ok((bob.party, prep, body))
}

/// Post-selected perfect discrimination of the `(m, n)` bipartite set with
/// one shared `n`-dimensional maximally entangled pair.
pub fn theorem1_protocol(m: usize, n: usize) -> Result<ProtocolTree> {
    let set = families::build_bipartite_eq1(m, n)?;
    let (a, b) = resource_pair(n, "");
    let resource = ResourceSpec::pair(a, b);
    let layout = set.layout().concat(&resource.layout()?)?;
    let terms = families::bipartite_terms(m, n)?;
    let (party, prep, body) = block(&layout, "", &terms)?;
    Ok(ProtocolTree {
        name: format!("theorem1({m},{n})"),
        set: SetRef {
            family: Family::BipartiteEq1,
            params: vec![m, n],
        },
        resource,
        root: core::preparation_chain(vec![(party, prep, None)], body),
        discrepancies: ghz_insertions(&terms, "Alice"),
        notes: vec![
            "Bob's preparation outcome B1 is post-selected; its complement fails.".into(),
            "Alice's complement declares the stopper.".into(),
        ],
    })
}

/// One insertion record per GHZ pair test added after an outcome.
pub(crate) fn ghz_insertions(terms: &[ProductTerm], free_party: &str) -> Vec<crate::engine::Discrepancy> {
    use crate::engine::{Discrepancy, DiscrepancyKind};
    use crate::families::Factor;
    terms
        .iter()
        .filter_map(|t| match (t.factors.first(), t.factors.last()) {
            (Some(Factor::Basis(_)), Some(Factor::Minus(p, q))) if !t.is_stopper() => Some(Discrepancy {
                kind: DiscrepancyKind::Insertion,
                location: format!("{free_party} outcome for {}", t.label),
                printed: format!("{} identified after the partner's ± measurement", t.label),
                used: format!("partner |{p}{p}±{q}{q}>, then {free_party} measures the ancilla in |{p}±{q}>"),
                reason: format!(
                    "{} and the stopper remain as |{p}{p}{p}>∓|{q}{q}{q}> across both parties; the partner's ± outcome alone does not separate them",
                    t.label
                ),
            }),
            _ => None,
        })
        .collect()
}
