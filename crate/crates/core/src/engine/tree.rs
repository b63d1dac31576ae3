//! Measurement-tree representation of LOCC protocols.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::families::{self, Family, StateSet};
use crate::linalg::{Ket, LocalOperator, Register, SparseMatrix, SystemLayout};
use crate::scalar;
use crate::{Error, Result};

/// Reserved leaf label for a failed identification.
pub const FAIL: &str = "FAIL";
/// Path segment for a complement branch.
pub const COMPLEMENT: &str = "~";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Leaf {
    Declare(String),
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Leaf(Leaf),
    Measure(Box<MeasurementNode>),
}

impl Node {
    pub fn declare(label: &str) -> Node {
        Node::Leaf(Leaf::Declare(label.to_owned()))
    }

    pub fn fail() -> Node {
        Node::Leaf(Leaf::Fail)
    }

    pub fn measure(node: MeasurementNode) -> Node {
        Node::Measure(Box::new(node))
    }

    /// Number of measurement nodes in the subtree.
    pub fn node_count(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Measure(m) => 1 + m.outcomes.iter().map(|o| o.child.node_count()).sum::<usize>(),
        }
    }

    /// Rewrites every leaf (and labeled complement) with `f`.
    pub fn map_leaves(&self, f: &mut dyn FnMut(&Leaf) -> Node) -> Node {
        match self {
            Node::Leaf(l) => f(l),
            Node::Measure(m) => {
                let mut m = (**m).clone();
                for o in &mut m.outcomes {
                    o.child = o.child.map_leaves(f);
                }
                Node::measure(m)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Complement {
    /// The outcomes must be complete; reaching the remainder is an error.
    Forbidden,
    Fail,
    Declare(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub op: LocalOperator,
    /// Marks a resource-preparation outcome whose branch is post-selected.
    pub postselect: bool,
    pub child: Node,
}

impl Outcome {
    pub fn new(op: LocalOperator, child: Node) -> Self {
        Outcome {
            op,
            postselect: false,
            child,
        }
    }

    pub fn label(&self) -> &str {
        &self.op.label
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementNode {
    pub party: String,
    pub tag: Option<String>,
    pub outcomes: Vec<Outcome>,
    pub complement: Complement,
}

impl MeasurementNode {
    pub fn new(party: &str, outcomes: Vec<Outcome>, complement: Complement) -> Self {
        MeasurementNode {
            party: party.to_owned(),
            tag: None,
            outcomes,
            complement,
        }
    }

    pub fn tagged(mut self, tag: &str) -> Self {
        self.tag = Some(tag.to_owned());
        self
    }
}

/// One shared maximally entangled pair `Σ|ii⟩` on two ancilla registers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceFactor {
    pub registers: [Register; 2],
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ResourceSpec {
    pub factors: Vec<ResourceFactor>,
}

impl ResourceSpec {
    pub fn pair(left: Register, right: Register) -> Self {
        let mut r = ResourceSpec::default();
        r.push(left, right);
        r
    }

    pub fn push(&mut self, left: Register, right: Register) {
        let dim = left.dim;
        self.factors.push(ResourceFactor {
            registers: [left, right],
            dim,
        });
    }

    pub fn layout(&self) -> Result<SystemLayout> {
        SystemLayout::new(
            self.factors
                .iter()
                .flat_map(|f| f.registers.iter().cloned())
                .collect(),
        )
    }

    /// Initial resource kets, one per factor.
    pub fn kets(&self) -> Result<Vec<Ket>> {
        self.factors
            .iter()
            .map(|f| {
                if f.registers.iter().any(|r| r.role != crate::linalg::Role::Ancilla) {
                    return Err(Error::Protocol("resource registers must be ancillas".into()));
                }
                if f.registers[0].party == f.registers[1].party {
                    return Err(Error::Protocol(
                        "a resource pair must be shared by two parties".into(),
                    ));
                }
                families::mes(f.dim, f.registers[0].clone(), f.registers[1].clone())
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetRef {
    pub family: Family,
    pub params: Vec<usize>,
}

impl SetRef {
    pub fn build(&self) -> Result<StateSet> {
        families::build(self.family, &self.params)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscrepancyKind {
    /// A printed operator was replaced.
    Substitution,
    /// A printed intermediate state has the opposite relative sign.
    SignCorrection,
    /// A measurement step absent from the printed protocol was added.
    Insertion,
}

/// Deviation of a built tree from the printed protocol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub kind: DiscrepancyKind,
    pub location: String,
    pub printed: String,
    pub used: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolTree {
    pub name: String,
    pub set: SetRef,
    pub resource: ResourceSpec,
    pub root: Node,
    pub discrepancies: Vec<Discrepancy>,
    pub notes: Vec<String>,
}

impl ProtocolTree {
    /// Principal layout of the referenced set followed by the resource
    /// ancillas.
    pub fn full_layout(&self, set: &StateSet) -> Result<SystemLayout> {
        set.layout().concat(&self.resource.layout()?)
    }
}

// ---- JSON ----

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    /// `[row, col, "p/q"]`, 1-based.
    entries: Vec<(usize, usize, String)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutcomeJson {
    label: String,
    registers: Vec<String>,
    dims: Vec<usize>,
    matrix: MatrixJson,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    postselect: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ComplementJson {
    Forbidden,
    Fail,
    Declare(String),
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct NodeJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    declare: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    party: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outcomes: Option<Vec<OutcomeJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    children: Option<BTreeMap<String, NodeJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    complement: Option<ComplementJson>,
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    schema: u32,
    name: String,
    set: SetRef,
    resource: ResourceSpec,
    root: NodeJson,
    discrepancies: Vec<Discrepancy>,
    notes: Vec<String>,
}

fn node_to_json(node: &Node) -> NodeJson {
    match node {
        Node::Leaf(Leaf::Declare(l)) => NodeJson {
            declare: Some(l.clone()),
            ..Default::default()
        },
        Node::Leaf(Leaf::Fail) => NodeJson {
            declare: Some(FAIL.into()),
            ..Default::default()
        },
        Node::Measure(m) => NodeJson {
            party: Some(m.party.clone()),
            tag: m.tag.clone(),
            outcomes: Some(
                m.outcomes
                    .iter()
                    .map(|o| OutcomeJson {
                        label: o.op.label.clone(),
                        registers: o.op.registers().to_vec(),
                        dims: o.op.dims().to_vec(),
                        matrix: MatrixJson {
                            dim: o.op.matrix().dim(),
                            entries: o
                                .op
                                .matrix()
                                .entries()
                                .iter()
                                .map(|(&(r, c), v)| (r + 1, c + 1, scalar::to_fraction_string(v)))
                                .collect(),
                        },
                        postselect: o.postselect,
                    })
                    .collect(),
            ),
            children: Some(
                m.outcomes
                    .iter()
                    .map(|o| (o.op.label.clone(), node_to_json(&o.child)))
                    .collect(),
            ),
            complement: Some(match &m.complement {
                Complement::Forbidden => ComplementJson::Forbidden,
                Complement::Fail => ComplementJson::Fail,
                Complement::Declare(l) => ComplementJson::Declare(l.clone()),
            }),
            ..Default::default()
        },
    }
}

fn node_from_json(mut j: NodeJson, path: &str) -> Result<Node> {
    if let Some(label) = j.declare {
        if j.party.is_some() || j.outcomes.is_some() {
            return Err(Error::schema(path, "a leaf cannot carry measurement fields"));
        }
        return Ok(if label == FAIL {
            Node::fail()
        } else {
            Node::declare(&label)
        });
    }
    let party = j
        .party
        .ok_or_else(|| Error::schema(path, "node needs `declare` or `party`"))?;
    let outcomes_json = j
        .outcomes
        .ok_or_else(|| Error::schema(format!("{path}.outcomes"), "missing"))?;
    let mut children = j.children.take().unwrap_or_default();
    let mut outcomes = Vec::with_capacity(outcomes_json.len());
    for (i, o) in outcomes_json.into_iter().enumerate() {
        let opath = format!("{path}.outcomes[{i}]");
        let mut entries = Vec::with_capacity(o.matrix.entries.len());
        for (k, (r, c, v)) in o.matrix.entries.iter().enumerate() {
            let epath = format!("{opath}.matrix.entries[{k}]");
            if *r == 0 || *c == 0 {
                return Err(Error::schema(epath, "indices are 1-based"));
            }
            let x = scalar::parse_fraction(v).map_err(|e| Error::schema(&epath, e.to_string()))?;
            entries.push(((r - 1, c - 1), x));
        }
        let matrix = SparseMatrix::from_entries(o.matrix.dim, entries)
            .map_err(|e| Error::schema(format!("{opath}.matrix"), e.to_string()))?;
        let op = LocalOperator::from_parts(&party, &o.label, o.registers, o.dims, matrix)
            .map_err(|e| Error::schema(&opath, e.to_string()))?;
        let child = children.remove(&o.label).ok_or_else(|| {
            Error::schema(format!("{path}.children"), format!("no child for `{}`", o.label))
        })?;
        let child = node_from_json(child, &format!("{path}.children.{}", o.label))?;
        outcomes.push(Outcome {
            op,
            postselect: o.postselect,
            child,
        });
    }
    if let Some(extra) = children.keys().next() {
        return Err(Error::schema(
            format!("{path}.children.{extra}"),
            "child without a matching outcome",
        ));
    }
    let complement = match j.complement {
        None | Some(ComplementJson::Forbidden) => Complement::Forbidden,
        Some(ComplementJson::Fail) => Complement::Fail,
        Some(ComplementJson::Declare(l)) if l == FAIL => Complement::Fail,
        Some(ComplementJson::Declare(l)) => Complement::Declare(l),
    };
    Ok(Node::Measure(Box::new(MeasurementNode {
        party,
        tag: j.tag,
        outcomes,
        complement,
    })))
}

impl Serialize for ProtocolTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TreeJson {
            schema: crate::SCHEMA_VERSION,
            name: self.name.clone(),
            set: self.set.clone(),
            resource: self.resource.clone(),
            root: node_to_json(&self.root),
            discrepancies: self.discrepancies.clone(),
            notes: self.notes.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProtocolTree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = TreeJson::deserialize(d)?;
        if raw.schema != crate::SCHEMA_VERSION {
            return Err(serde::de::Error::custom(format!(
                "unsupported schema {}",
                raw.schema
            )));
        }
        let root = node_from_json(raw.root, "root").map_err(serde::de::Error::custom)?;
        Ok(ProtocolTree {
            name: raw.name,
            set: raw.set,
            resource: raw.resource,
            root,
            discrepancies: raw.discrepancies,
            notes: raw.notes,
        })
    }
}
