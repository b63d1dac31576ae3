//! Pieces shared by every builder: product-vector projectors, the resource
//! preparation step, the bipartite discrimination layer and the GHZ pair
//! subtree.

use crate::engine::{Complement, MeasurementNode, Node, Outcome};
use crate::families::{Factor, ProductTerm};
use crate::linalg::{LocalOperator, SystemLayout};
use crate::scalar::{self, Scalar};
use crate::{Error, Result};

pub(crate) type Vector = Vec<(Vec<usize>, Scalar)>;

/// Tensor product of single-register factors, as sparse amplitudes.
pub(crate) fn product_vector(parts: &[(Factor, usize)]) -> Vector {
    let mut out: Vector = vec![(Vec::new(), scalar::one())];
    for (f, dim) in parts {
        let amps = f.amplitudes(*dim);
        out = out
            .iter()
            .flat_map(|(t, a)| {
                amps.iter().map(move |(l, b)| {
                    let mut t = t.clone();
                    t.push(*l);
                    (t, a * b)
                })
            })
            .collect();
    }
    out
}

/// `Σᵢ |i…i⟩` over the given labels on `k` registers.
pub(crate) fn diagonal_vector(labels: &[usize], k: usize, signs: &[i64]) -> Vector {
    labels
        .iter()
        .zip(signs)
        .map(|(&l, &s)| (vec![l; k], scalar::int(s)))
        .collect()
}

pub(crate) fn projector(
    layout: &SystemLayout,
    party: &str,
    registers: &[&str],
    vectors: &[Vector],
    label: &str,
) -> Result<LocalOperator> {
    LocalOperator::projector(layout, party, registers, vectors, label)
}

pub(crate) fn dim_of(layout: &SystemLayout, id: &str) -> Result<usize> {
    Ok(layout.require(id)?.1.dim)
}

/// One party's view of a locked block: its ancilla and principal register.
#[derive(Clone, Debug)]
pub(crate) struct Side {
    pub party: String,
    pub anc: String,
    pub prin: String,
}

impl Side {
    pub fn new(party: &str, anc: &str, prin: &str) -> Self {
        Side {
            party: party.into(),
            anc: anc.into(),
            prin: prin.into(),
        }
    }
}

/// Resource-preparation projector `Σᵢ |ii⟩⟨ii|` on `(anc, prin)`; the
/// resulting state has ancilla, partner ancilla and principal locked to the
/// same label.
pub(crate) fn preparation(layout: &SystemLayout, side: &Side, label: &str) -> Result<LocalOperator> {
    let d = dim_of(layout, &side.anc)?;
    if dim_of(layout, &side.prin)? != d {
        return Err(Error::Protocol(format!(
            "`{}` and `{}` must have equal dimensions",
            side.anc, side.prin
        )));
    }
    let vectors: Vec<Vector> = (1..=d).map(|i| vec![(vec![i, i], scalar::one())]).collect();
    projector(layout, &side.party, &[&side.anc, &side.prin], &vectors, label)
}

/// Chain of single-outcome preparation nodes, each post-selected with a
/// failing complement, ending in `body`.
pub(crate) fn preparation_chain(steps: Vec<(String, LocalOperator, Option<String>)>, body: Node) -> Node {
    steps.into_iter().rev().fold(body, |child, (party, op, tag)| {
        let mut o = Outcome::new(op, child);
        o.postselect = true;
        let mut m = MeasurementNode::new(&party, vec![o], Complement::Fail);
        m.tag = tag;
        Node::measure(m)
    })
}

/// Separates `|x⟩(|ppp⟩ − |qqq⟩)` from `|x⟩(|ppp⟩ + |qqq⟩)` on
/// `(free.anc, locked.anc, locked.prin)`. The locked party measures
/// `|pp⟩ ± |qq⟩` on its two registers (outcomes `{base}1`, `{base}2`); this
/// leaves `|p⟩ ∓ |q⟩` or `|p⟩ ± |q⟩` on the free ancilla, which the free
/// party then measures.
pub(crate) fn ghz_pair(
    layout: &SystemLayout,
    free: &Side,
    locked: &Side,
    (p, q): (usize, usize),
    state: &str,
    stopper: &str,
    base: &str,
) -> Result<Node> {
    let anc = |sign: i64, label: &str| {
        projector(
            layout,
            &free.party,
            &[&free.anc],
            &[vec![(vec![p], scalar::one()), (vec![q], scalar::int(sign))]],
            label,
        )
    };
    let second = |first_plus: bool| -> Result<Node> {
        let (on_plus, on_minus) = if first_plus { (stopper, state) } else { (state, stopper) };
        Ok(Node::measure(MeasurementNode::new(
            &free.party,
            vec![
                Outcome::new(anc(1, &format!("|{p}+{q}>"))?, Node::declare(on_plus)),
                Outcome::new(anc(-1, &format!("|{p}-{q}>"))?, Node::declare(on_minus)),
            ],
            Complement::Fail,
        )))
    };
    let sep = if base.contains(',') { "," } else { "" };
    let pair = |sign: i64, k: usize| {
        projector(
            layout,
            &locked.party,
            &[&locked.anc, &locked.prin],
            &[diagonal_vector(&[p, q], 2, &[1, sign])],
            &format!("{base}{sep}{k}"),
        )
    };
    Ok(Node::measure(MeasurementNode::new(
        &locked.party,
        vec![
            Outcome::new(pair(1, 1)?, second(true)?),
            Outcome::new(pair(-1, 2)?, second(false)?),
        ],
        Complement::Fail,
    )))
}

/// How the discrimination continues after a core outcome.
#[derive(Clone, Debug)]
pub(crate) enum Continuation {
    Leaf(String),
    /// The outcome holds `state = |ℓ⟩(|ppp⟩ − |qqq⟩)` alongside the
    /// stopper's `|ℓ⟩(|ppp⟩ + |qqq⟩)`.
    Ghz { pair: (usize, usize), state: String },
}

/// A core outcome on the free party's `(anc, prin)`: a projector onto
/// `anc ∈ anc_labels` tensored with `prin_factor`.
#[derive(Clone, Debug)]
pub(crate) struct CoreOutcome {
    pub op: LocalOperator,
    pub anc_labels: Vec<usize>,
    pub prin_factor: Factor,
    pub cont: Continuation,
}

impl CoreOutcome {
    /// Whether `|anc⟩ ⊗ prin` lies in the range of the projector.
    pub fn contains(&self, anc: usize, prin: Factor) -> bool {
        self.anc_labels.contains(&anc) && same_ray(self.prin_factor, prin)
    }
}

pub(crate) fn same_ray(x: Factor, y: Factor) -> bool {
    match (x, y) {
        (Factor::Minus(a, b), Factor::Minus(c, d)) => (a, b) == (c, d) || (a, b) == (d, c),
        _ => x == y,
    }
}

/// Outcomes of the free party after the locked party's preparation.
/// `terms` are the non-stopper states as `(label, free factor, locked
/// factor)`. A state `|x⟩_free |p − q⟩_locked` gives the projector
/// `(|p⟩⟨p| + |q⟩⟨q|)_anc ⊗ |x⟩⟨x|` followed by a GHZ pair test; a state
/// `|p − q⟩_free |ℓ⟩_locked` gives `|ℓ⟩⟨ℓ|_anc ⊗ |p−q⟩⟨p−q|` and is final.
pub(crate) fn core_outcomes(
    layout: &SystemLayout,
    free: &Side,
    terms: &[(String, Factor, Factor)],
    labels: &mut dyn FnMut() -> String,
) -> Result<Vec<CoreOutcome>> {
    let prin_dim = dim_of(layout, &free.prin)?;
    let anc_dim = dim_of(layout, &free.anc)?;
    let mut out = Vec::new();
    for (state, f_free, f_locked) in terms {
        let (anc_labels, cont) = match (*f_free, *f_locked) {
            (Factor::Basis(_), Factor::Minus(p, q)) => (
                vec![p.min(q), p.max(q)],
                Continuation::Ghz {
                    pair: (p.min(q), p.max(q)),
                    state: state.clone(),
                },
            ),
            (Factor::Minus(..), Factor::Basis(l)) => (vec![l], Continuation::Leaf(state.clone())),
            other => {
                return Err(Error::Protocol(format!(
                    "state `{state}` has unsupported factor pair {other:?}"
                )))
            }
        };
        let vectors: Vec<Vector> = anc_labels
            .iter()
            .map(|&l| product_vector(&[(Factor::Basis(l), anc_dim), (*f_free, prin_dim)]))
            .collect();
        let op = projector(layout, &free.party, &[&free.anc, &free.prin], &vectors, &labels())?;
        out.push(CoreOutcome {
            op,
            anc_labels,
            prin_factor: *f_free,
            cont,
        });
    }
    Ok(out)
}

pub(crate) fn continuation_node(
    layout: &SystemLayout,
    cont: &Continuation,
    free: &Side,
    locked: &Side,
    stopper: &str,
    outcome: &str,
) -> Result<Node> {
    match cont {
        Continuation::Leaf(l) => Ok(Node::declare(l)),
        Continuation::Ghz { pair, state } => {
            let base = format!("{}{}", initial(&locked.party), outcome.trim_start_matches(char::is_alphabetic));
            ghz_pair(layout, free, locked, *pair, state, stopper, &base)
        }
    }
}

fn initial(party: &str) -> char {
    party.chars().next().unwrap_or('?')
}

/// Splits a two-factor term into `(label, factor 0, factor 1)`.
pub(crate) fn pair_of(t: &ProductTerm, i: usize, j: usize) -> (String, Factor, Factor) {
    (t.label.clone(), t.factors[i], t.factors[j])
}

/// Tags every measurement node of a subtree that has no tag yet.
pub(crate) fn tag_all(node: &mut Node, tag: &str) {
    if let Node::Measure(m) = node {
        if m.tag.is_none() {
            m.tag = Some(tag.to_owned());
        }
        for o in &mut m.outcomes {
            tag_all(&mut o.child, tag);
        }
    }
}
