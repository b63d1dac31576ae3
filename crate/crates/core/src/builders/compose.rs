//! Composed protocols: every block prepares its resource first, then the
//! blocks are discriminated in order, each block's stopper outcome handing
//! over to the next block.

use super::core;
use super::{bipartite, tripartite};
use crate::engine::{Complement, Discrepancy, Leaf, MeasurementNode, Node, Outcome, ProtocolTree, ResourceSpec, SetRef};
use crate::families::{self, composed_label, BlockSpec, Family};
use crate::linalg::{LocalOperator, SparseMatrix, SystemLayout};
use crate::{Error, Result};

/// Label of the outcome added for a complement that now leads to a subtree.
pub const REMAINDER: &str = "rest";

struct Stage {
    stopper: String,
    body: Node,
}

/// Replaces a labeled complement by an explicit outcome `I − ΣP` so that it
/// can carry a subtree.
fn remainder(layout: &SystemLayout, m: &MeasurementNode) -> Result<LocalOperator> {
    let mut regs: Vec<String> = Vec::new();
    for o in &m.outcomes {
        for r in o.op.registers() {
            if !regs.contains(r) {
                regs.push(r.clone());
            }
        }
    }
    let dims = regs
        .iter()
        .map(|r| core::dim_of(layout, r))
        .collect::<Result<Vec<_>>>()?;
    let d: usize = dims.iter().product();
    let mut rest = SparseMatrix::identity(d);
    for o in &m.outcomes {
        rest = rest.sub(&o.op.embed(&regs, &dims)?);
    }
    LocalOperator::from_parts(&m.party, REMAINDER, regs, dims, rest)
}

fn graft(layout: &SystemLayout, stages: &[Stage], s: usize, node: &Node) -> Result<Node> {
    let stage = &stages[s];
    let last = s + 1 == stages.len();
    let handover = || -> Result<Node> {
        if last {
            Ok(Node::declare("phi"))
        } else {
            graft(layout, stages, s + 1, &stages[s + 1].body)
        }
    };
    match node {
        Node::Leaf(Leaf::Fail) => Ok(Node::fail()),
        Node::Leaf(Leaf::Declare(l)) if *l == stage.stopper => handover(),
        Node::Leaf(Leaf::Declare(l)) => Ok(Node::declare(&composed_label(s + 1, l))),
        Node::Measure(m) => {
            let mut out = MeasurementNode {
                party: m.party.clone(),
                tag: m.tag.clone(),
                outcomes: Vec::with_capacity(m.outcomes.len() + 1),
                complement: m.complement.clone(),
            };
            for o in &m.outcomes {
                out.outcomes.push(Outcome {
                    op: o.op.clone(),
                    postselect: o.postselect,
                    child: graft(layout, stages, s, &o.child)?,
                });
            }
            match &m.complement {
                Complement::Declare(l) if *l == stage.stopper && !last => {
                    out.outcomes.push(Outcome::new(remainder(layout, m)?, handover()?));
                    out.complement = Complement::Forbidden;
                }
                Complement::Declare(l) if *l == stage.stopper => {
                    out.complement = Complement::Declare("phi".into())
                }
                Complement::Declare(l) => out.complement = Complement::Declare(composed_label(s + 1, l)),
                Complement::Forbidden | Complement::Fail => {}
            }
            Ok(Node::measure(out))
        }
    }
}

fn compose(family: Family, dims: &[usize], blocks: &[BlockSpec]) -> Result<ProtocolTree> {
    let set = families::build(family, dims)?;
    let mut resource = ResourceSpec::default();
    for (s, b) in blocks.iter().enumerate() {
        // The resource dimension is the dimension of the locked principal
        // register, which is the last register of the block.
        let d = b.registers.last().map(|r| r.dim).unwrap_or(0);
        let (a, bb) = bipartite::resource_pair(d, &(s + 1).to_string());
        resource.push(a, bb);
    }
    let layout = set.layout().concat(&resource.layout()?)?;

    let mut chain = Vec::new();
    let mut stages = Vec::new();
    for (s, b) in blocks.iter().enumerate() {
        let suffix = (s + 1).to_string();
        let (party, prep, mut body) = match b.registers.len() {
            2 => bipartite::block(&layout, &suffix, &b.terms)?,
            3 => {
                let d = (b.registers[0].dim, b.registers[1].dim, b.registers[2].dim);
                tripartite::block(&layout, &suffix, d, &b.terms)?
            }
            n => return Err(Error::Protocol(format!("unsupported block with {n} registers"))),
        };
        core::tag_all(&mut body, &format!("block{}", s + 1));
        chain.push((party, prep, Some(format!("resource{}", s + 1))));
        stages.push(Stage {
            stopper: b.stopper().label.clone(),
            body,
        });
    }
    let body = graft(&layout, &stages, 0, &stages[0].body)?;
    let mut discrepancies: Vec<Discrepancy> = Vec::new();
    for (s, b) in blocks.iter().enumerate() {
        let party = if b.registers.len() == 2 { "Alice" } else { "Bob" };
        discrepancies.extend(bipartite::ghz_insertions(&b.terms, party).into_iter().map(|mut d| {
            d.location = format!("block {}: {}", s + 1, d.location);
            d
        }));
    }
    Ok(ProtocolTree {
        name: format!("compose{}({})", if family == Family::EvenS { "Even" } else { "Odd" }, join(dims)),
        set: SetRef {
            family,
            params: dims.to_vec(),
        },
        resource,
        root: core::preparation_chain(chain, body),
        discrepancies,
        notes: vec![
            "All preparation outcomes are post-selected and performed before any discrimination.".into(),
            "A block's stopper outcome hands over to the next block; other blocks are then in their fill state."
                .into(),
        ],
    })
}

fn join(dims: &[usize]) -> String {
    dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
}

pub fn compose_even(dims: &[usize]) -> Result<ProtocolTree> {
    compose(Family::EvenS, dims, &families::even_blocks(dims)?)
}

pub fn compose_odd(dims: &[usize]) -> Result<ProtocolTree> {
    compose(Family::OddSprime, dims, &families::odd_blocks(dims)?)
}
