//! Exact depth-first propagation of a ket through a measurement tree.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::tree::{Complement, Leaf, Node, ProtocolTree, COMPLEMENT};
use crate::linalg::{apply_local, tensor, Ket, LocalOperator, SystemLayout};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// What a reached leaf declares.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum LeafKind {
    Declared(String),
    Fail,
    /// Remainder of a node whose complement is forbidden.
    Uncovered,
}

impl LeafKind {
    pub fn as_str(&self) -> &str {
        match self {
            LeafKind::Declared(l) => l,
            LeafKind::Fail => super::FAIL,
            LeafKind::Uncovered => "UNCOVERED",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafHit {
    pub kind: LeafKind,
    pub probability: Scalar,
    /// Whether the path took every post-selected outcome it met.
    pub in_postselection: bool,
    /// Tags of the measurement nodes on the path, root first.
    pub tags: Vec<String>,
    /// Unnormalized post-measurement state, when tracing.
    pub state: Option<Ket>,
}

/// Leaves reached with nonzero probability, keyed by outcome-label path
/// (`/`-separated, `~` for a complement branch).
pub type LeafMap = BTreeMap<String, LeafHit>;

/// A ket kept as a tensor product of register-disjoint factors. Operators
/// merge only the factors they touch.
#[derive(Clone, Debug)]
pub(crate) struct FactoredKet {
    parts: Vec<Ket>,
}

impl FactoredKet {
    pub(crate) fn new(parts: Vec<Ket>) -> Result<Self> {
        if parts.iter().any(Ket::is_zero) {
            return Err(Error::ZeroKet);
        }
        Ok(FactoredKet { parts })
    }

    fn layout_contains(&self, id: &str) -> bool {
        self.parts.iter().any(|p| p.layout().position(id).is_some())
    }

    /// Returns `(P x, |P x|² / |x|²)`.
    fn apply(&self, op: &LocalOperator) -> Result<(FactoredKet, Scalar)> {
        let touched: Vec<usize> = (0..self.parts.len())
            .filter(|&i| {
                op.registers()
                    .iter()
                    .any(|id| self.parts[i].layout().position(id).is_some())
            })
            .collect();
        if let Some(id) = op.registers().iter().find(|id| !self.layout_contains(id)) {
            return Err(Error::RegisterNotFound(id.clone()));
        }
        let merged = if touched.len() == 1 {
            self.parts[touched[0]].clone()
        } else {
            tensor(&touched.iter().map(|&i| &self.parts[i]).collect::<Vec<_>>())?
        };
        let out = apply_local(op, &merged)?;
        let ratio = out.norm_squared() / merged.norm_squared();
        let mut parts: Vec<Ket> = self
            .parts
            .iter()
            .enumerate()
            .filter(|(i, _)| !touched.contains(i))
            .map(|(_, k)| k.clone())
            .collect();
        parts.insert(touched[0].min(parts.len()), out);
        Ok((FactoredKet { parts }, ratio))
    }

    fn minus(&self, others: &[FactoredKet]) -> Result<Ket> {
        let mut acc = self.joined()?;
        for o in others {
            let k = o.joined()?.reordered(acc.layout())?;
            acc = acc.add(&k.scaled(&-Scalar::one()))?;
        }
        Ok(acc)
    }

    pub(crate) fn joined(&self) -> Result<Ket> {
        let mut parts: Vec<&Ket> = self.parts.iter().collect();
        parts.sort_by_key(|k| k.layout().ids());
        tensor(&parts)
    }
}

struct Walker<'a> {
    trace: bool,
    out: &'a mut LeafMap,
}

struct PathState {
    segments: Vec<String>,
    tags: Vec<String>,
    in_postselection: bool,
}

impl Walker<'_> {
    fn record(&mut self, path: &PathState, kind: LeafKind, probability: Scalar, state: Option<Ket>) {
        if probability.is_zero() {
            return;
        }
        let key = path.segments.join("/");
        self.out.insert(
            key,
            LeafHit {
                kind,
                probability,
                in_postselection: path.in_postselection,
                tags: path.tags.clone(),
                state,
            },
        );
    }

    fn walk(&mut self, node: &Node, x: &FactoredKet, prob: Scalar, path: &mut PathState) -> Result<()> {
        let m = match node {
            Node::Leaf(leaf) => {
                let kind = match leaf {
                    Leaf::Declare(l) => LeafKind::Declared(l.clone()),
                    Leaf::Fail => LeafKind::Fail,
                };
                let state = if self.trace { Some(x.joined()?) } else { None };
                self.record(path, kind, prob, state);
                return Ok(());
            }
            Node::Measure(m) => m,
        };
        if let Some(t) = &m.tag {
            path.tags.push(t.clone());
        }
        let has_postselect = m.outcomes.iter().any(|o| o.postselect);
        let mut used = Scalar::zero();
        let mut branches = Vec::new();
        for o in &m.outcomes {
            let (y, ratio) = x.apply(&o.op)?;
            if ratio.is_zero() {
                continue;
            }
            used += &ratio;
            let saved = path.in_postselection;
            path.in_postselection &= !has_postselect || o.postselect;
            path.segments.push(o.op.label.clone());
            self.walk(&o.child, &y, &prob * &ratio, path)?;
            path.segments.pop();
            path.in_postselection = saved;
            if self.trace {
                branches.push(y);
            }
        }
        let residual = Scalar::one() - used;
        if residual.is_negative() {
            return Err(Error::Protocol(format!(
                "outcome weights exceed 1 at `{}`; outcomes are not orthogonal",
                path.segments.join("/")
            )));
        }
        if !residual.is_zero() {
            let kind = match &m.complement {
                Complement::Forbidden => LeafKind::Uncovered,
                Complement::Fail => LeafKind::Fail,
                Complement::Declare(l) => LeafKind::Declared(l.clone()),
            };
            let saved = path.in_postselection;
            path.in_postselection &= !has_postselect;
            path.segments.push(COMPLEMENT.into());
            let state = if self.trace { Some(x.minus(&branches)?) } else { None };
            self.record(path, kind, &prob * &residual, state);
            path.segments.pop();
            path.in_postselection = saved;
        }
        if m.tag.is_some() {
            path.tags.pop();
        }
        Ok(())
    }
}

pub(crate) fn simulate_factored(tree: &ProtocolTree, input: &FactoredKet, trace: bool) -> Result<LeafMap> {
    let mut out = LeafMap::new();
    let mut path = PathState {
        segments: Vec::new(),
        tags: Vec::new(),
        in_postselection: true,
    };
    Walker { trace, out: &mut out }.walk(&tree.root, input, Scalar::one(), &mut path)?;
    Ok(out)
}

/// Simulates `input` (principal registers followed by resource ancillas, any
/// register order) through the tree. Probabilities are exact and sum to one
/// over the returned leaves.
pub fn simulate(tree: &ProtocolTree, input: &Ket) -> Result<LeafMap> {
    check_input_layout(tree, input.layout())?;
    simulate_factored(tree, &FactoredKet::new(vec![input.clone()])?, false)
}

/// As [`simulate`], also returning the post-measurement state at each leaf.
pub fn simulate_traced(tree: &ProtocolTree, input: &Ket) -> Result<LeafMap> {
    check_input_layout(tree, input.layout())?;
    simulate_factored(tree, &FactoredKet::new(vec![input.clone()])?, true)
}

fn check_input_layout(tree: &ProtocolTree, layout: &SystemLayout) -> Result<()> {
    let set = tree.set.build()?;
    let expected = tree.full_layout(&set)?;
    let mut a = expected.registers().to_vec();
    let mut b = layout.registers().to_vec();
    a.sort_by(|x, y| x.id.cmp(&y.id));
    b.sort_by(|x, y| x.id.cmp(&y.id));
    if a != b {
        return Err(Error::LayoutMismatch(format!(
            "input registers {:?} do not match protocol registers {:?}",
            layout.ids(),
            expected.ids()
        )));
    }
    Ok(())
}

/// Splits a product ket into per-register factors; `None` when the ket is
/// entangled across some register.
pub fn factor_registers(x: &Ket) -> Option<Vec<Ket>> {
    let layout = x.layout();
    let (t0, a0) = x.raw().iter().next()?;
    let mut factors = Vec::with_capacity(layout.len());
    for (i, reg) in layout.registers().iter().enumerate() {
        let l = SystemLayout::new(vec![reg.clone()]).ok()?;
        let mut slice = Ket::zero(l);
        for (t, a) in x.raw() {
            if t.iter().enumerate().all(|(j, d)| j == i || *d == t0[j]) {
                slice.accumulate(vec![t[i]], a.clone());
            }
        }
        factors.push(slice);
    }
    let mut rebuilt = tensor(&factors.iter().collect::<Vec<_>>()).ok()?;
    let k = layout.len();
    if k > 1 {
        let mut c = a0.clone();
        for _ in 2..k {
            c *= a0;
        }
        rebuilt = rebuilt.scaled(&(Scalar::one() / c));
    }
    (rebuilt == *x).then_some(factors)
}
