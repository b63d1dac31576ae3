//! Static checks on protocol trees: locality, orthogonality of outcomes,
//! projector structure and completeness.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::tree::{Complement, Leaf, Node, ProtocolTree, COMPLEMENT};
use crate::families::StateSet;
use crate::linalg::{SparseMatrix, SystemLayout};
use crate::scalar::{self, Scalar};

/// Remainder `I − Σ Pᵢ` of one node, summarized by its trace (the
/// dimension of the uncovered subspace when the outcomes are orthogonal
/// projectors).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletenessDefect {
    pub node: String,
    #[serde(with = "scalar::as_fraction")]
    pub uncovered_dimension: Scalar,
    pub complement: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub locality_violations: Vec<String>,
    pub non_orthogonal_outcomes: Vec<String>,
    pub non_projectors: Vec<String>,
    pub completeness: Vec<CompletenessDefect>,
    pub unknown_labels: Vec<String>,
    pub structural: Vec<String>,
}

impl Diagnostics {
    /// No violations. Completeness defects are fine when the node routes its
    /// complement to a leaf.
    pub fn is_clean(&self) -> bool {
        self.locality_violations.is_empty()
            && self.non_orthogonal_outcomes.is_empty()
            && self.non_projectors.is_empty()
            && self.unknown_labels.is_empty()
            && self.structural.is_empty()
    }
}

/// Validates against the set the tree references.
pub fn validate(tree: &ProtocolTree) -> Diagnostics {
    match tree.set.build() {
        Ok(set) => validate_against(tree, &set),
        Err(e) => Diagnostics {
            structural: vec![format!("referenced set cannot be built: {e}")],
            ..Default::default()
        },
    }
}

pub fn validate_against(tree: &ProtocolTree, set: &StateSet) -> Diagnostics {
    let mut d = Diagnostics::default();
    if set.family != tree.set.family || set.params != tree.set.params {
        d.structural.push(format!(
            "tree references {} {:?} but was given {} {:?}",
            tree.set.family, tree.set.params, set.family, set.params
        ));
    }
    let layout = match tree.full_layout(set) {
        Ok(l) => l,
        Err(e) => {
            d.structural.push(format!("resource layout: {e}"));
            return d;
        }
    };
    if let Err(e) = tree.resource.kets() {
        d.structural.push(e.to_string());
    }
    let labels: BTreeSet<String> = set.labels().into_iter().collect();
    let mut cx = Ctx {
        layout: &layout,
        labels: &labels,
        d: &mut d,
    };
    cx.node(&tree.root, &mut Vec::new());
    d
}

struct Ctx<'a> {
    layout: &'a SystemLayout,
    labels: &'a BTreeSet<String>,
    d: &'a mut Diagnostics,
}

impl Ctx<'_> {
    fn label(&mut self, label: &str, at: &str) {
        if !self.labels.contains(label) {
            self.d
                .unknown_labels
                .push(format!("`{label}` at `{at}` is not in the state set"));
        }
    }

    fn node(&mut self, node: &Node, path: &mut Vec<String>) {
        let here = if path.is_empty() { "<root>".to_string() } else { path.join("/") };
        let m = match node {
            Node::Leaf(Leaf::Declare(l)) => return self.label(l, &here),
            Node::Leaf(Leaf::Fail) => return,
            Node::Measure(m) => m,
        };
        if m.outcomes.is_empty() {
            self.d.structural.push(format!("node `{here}` has no outcomes"));
        }
        let mut seen = BTreeSet::new();
        for o in &m.outcomes {
            if o.label().is_empty() || o.label() == COMPLEMENT || o.label().contains('/') {
                self.d.structural.push(format!("bad outcome label `{}` at `{here}`", o.label()));
            }
            if !seen.insert(o.label().to_owned()) {
                self.d
                    .structural
                    .push(format!("duplicate outcome label `{}` at `{here}`", o.label()));
            }
        }
        // locality
        let mut ok = true;
        for o in &m.outcomes {
            if o.op.party != m.party {
                self.d.locality_violations.push(format!(
                    "`{here}/{}` is labeled for `{}` inside a `{}` node",
                    o.label(),
                    o.op.party,
                    m.party
                ));
            }
            for (id, &dim) in o.op.registers().iter().zip(o.op.dims()) {
                match self.layout.register(id) {
                    None => {
                        ok = false;
                        self.d
                            .structural
                            .push(format!("`{here}/{}` acts on unknown register `{id}`", o.label()));
                    }
                    Some(r) => {
                        if r.party != m.party {
                            self.d.locality_violations.push(format!(
                                "`{here}/{}` acts on `{id}` owned by `{}`, not `{}`",
                                o.label(),
                                r.party,
                                m.party
                            ));
                        }
                        if r.dim != dim {
                            ok = false;
                            self.d.structural.push(format!(
                                "`{here}/{}` expects dimension {dim} on `{id}` (layout has {})",
                                o.label(),
                                r.dim
                            ));
                        }
                    }
                }
            }
        }
        if ok && !m.outcomes.is_empty() {
            self.algebra(m, &here);
        }
        match &m.complement {
            Complement::Declare(l) => self.label(l, &format!("{here}/{COMPLEMENT}")),
            Complement::Fail | Complement::Forbidden => {}
        }
        for o in &m.outcomes {
            path.push(o.label().to_owned());
            self.node(&o.child, path);
            path.pop();
        }
    }

    fn algebra(&mut self, m: &super::tree::MeasurementNode, here: &str) {
        let mut regs: Vec<String> = Vec::new();
        for r in self.layout.registers() {
            if m.outcomes.iter().any(|o| o.op.registers().contains(&r.id)) {
                regs.push(r.id.clone());
            }
        }
        let dims: Vec<usize> = regs.iter().map(|id| self.layout.register(id).unwrap().dim).collect();
        let total: usize = dims.iter().product();
        let mats: Vec<SparseMatrix> = m
            .outcomes
            .iter()
            .map(|o| o.op.embed(&regs, &dims).expect("registers checked"))
            .collect();
        for (o, p) in m.outcomes.iter().zip(&mats) {
            if !p.is_projector() {
                self.d
                    .non_projectors
                    .push(format!("`{here}/{}` is not a symmetric idempotent", o.label()));
            }
        }
        for i in 0..mats.len() {
            for j in i + 1..mats.len() {
                if !mats[i].mul(&mats[j]).is_zero() {
                    self.d.non_orthogonal_outcomes.push(format!(
                        "`{here}`: `{}` and `{}` overlap",
                        m.outcomes[i].label(),
                        m.outcomes[j].label()
                    ));
                }
            }
        }
        let sum = mats.iter().fold(SparseMatrix::zero(total), |acc, p| acc.add(p));
        let defect = SparseMatrix::identity(total).sub(&sum);
        if !defect.is_zero() {
            let complement = match &m.complement {
                Complement::Forbidden => {
                    self.d
                        .structural
                        .push(format!("`{here}`: outcomes are incomplete but the complement is forbidden"));
                    "forbidden".to_string()
                }
                Complement::Fail => super::FAIL.to_string(),
                Complement::Declare(l) => l.clone(),
            };
            let tr = defect.trace();
            if !tr.is_zero() || complement != "forbidden" {
                self.d.completeness.push(CompletenessDefect {
                    node: here.to_owned(),
                    uncovered_dimension: tr,
                    complement,
                });
            }
        }
    }
}
