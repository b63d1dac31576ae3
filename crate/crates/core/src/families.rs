//! Constructors for the orthogonal product-state families and the
//! maximally entangled resource states.
//!
//! States are described first as [`ProductTerm`]s (one single-register
//! [`Factor`] per register) and then materialized into exact [`Ket`]s. The
//! protocol builders reuse the same term lists, so a protocol and the set it
//! discriminates are generated from one description.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::{tensor, Ket, Register, SystemLayout};
use crate::scalar::{self, Scalar};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "Bipartite_Eq1")]
    BipartiteEq1,
    #[serde(rename = "Example_Eq3")]
    ExampleEq3,
    #[serde(rename = "Tripartite_Eq6")]
    TripartiteEq6,
    #[serde(rename = "Tripartite_G")]
    TripartiteG,
    #[serde(rename = "Even_S")]
    EvenS,
    #[serde(rename = "Odd_Sprime")]
    OddSprime,
}

impl Family {
    /// Accepts the CLI spellings as well as the JSON names.
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "bipartite" | "eq1" | "Bipartite_Eq1" => Family::BipartiteEq1,
            "example3" | "eq3" | "Example_Eq3" => Family::ExampleEq3,
            "eq6" | "tripartite456" | "Tripartite_Eq6" => Family::TripartiteEq6,
            "tripartite" | "g" | "Tripartite_G" => Family::TripartiteG,
            "even" | "Even_S" => Family::EvenS,
            "odd" | "Odd_Sprime" => Family::OddSprime,
            other => {
                return Err(Error::InvalidParameters(format!("unknown family `{other}`")))
            }
        })
    }

    pub fn json_name(self) -> &'static str {
        match self {
            Family::BipartiteEq1 => "Bipartite_Eq1",
            Family::ExampleEq3 => "Example_Eq3",
            Family::TripartiteEq6 => "Tripartite_Eq6",
            Family::TripartiteG => "Tripartite_G",
            Family::EvenS => "Even_S",
            Family::OddSprime => "Odd_Sprime",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.json_name())
    }
}

/// Single-register factor with 1-based labels. `Minus(p, q)` is
/// `|p⟩ − |q⟩` and `Uniform` is the all-ones vector of the register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    Basis(usize),
    Minus(usize, usize),
    Uniform,
}

impl Factor {
    pub fn amplitudes(&self, dim: usize) -> Vec<(usize, Scalar)> {
        match *self {
            Factor::Basis(l) => vec![(l, scalar::one())],
            Factor::Minus(p, q) => vec![(p, scalar::one()), (q, scalar::int(-1))],
            Factor::Uniform => (1..=dim).map(|l| (l, scalar::one())).collect(),
        }
    }

    pub fn support(&self, dim: usize) -> Vec<usize> {
        self.amplitudes(dim).into_iter().map(|(l, _)| l).collect()
    }

    fn max_label(&self) -> usize {
        match *self {
            Factor::Basis(l) => l,
            Factor::Minus(p, q) => p.max(q),
            Factor::Uniform => 0,
        }
    }
}

/// Where a term of a tripartite set comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    Stopper,
    /// Bipartite-built member (index into the bipartite term list).
    Core(usize),
    Horizontal(usize),
    Vertical(usize),
    /// Hand-entered fixture state.
    Fixture,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductTerm {
    pub label: String,
    pub factors: Vec<Factor>,
    pub origin: Origin,
}

impl ProductTerm {
    fn new(label: String, factors: Vec<Factor>, origin: Origin) -> Self {
        ProductTerm {
            label,
            factors,
            origin,
        }
    }

    pub fn is_stopper(&self) -> bool {
        self.origin == Origin::Stopper
    }
}

/// Ket for a product term on the given single-register layouts.
pub fn materialize(regs: &[Register], factors: &[Factor]) -> Result<Ket> {
    if regs.len() != factors.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} factors for {} registers",
            factors.len(),
            regs.len()
        )));
    }
    let parts = regs
        .iter()
        .zip(factors)
        .map(|(r, f)| {
            let l = SystemLayout::new(vec![r.clone()])?;
            Ket::from_amplitudes(l, f.amplitudes(r.dim).into_iter().map(|(i, a)| (vec![i], a)))
        })
        .collect::<Result<Vec<_>>>()?;
    tensor(&parts.iter().collect::<Vec<_>>())
}

fn label(i: usize) -> String {
    format!("phi{i}")
}

fn check_dims(what: &str, dims: &[usize]) -> Result<()> {
    if dims.first().is_some_and(|&d| d < 4) || dims.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameters(format!(
            "{what} needs 4 <= n1 <= n2 <= ..., got {dims:?}"
        )));
    }
    if dims.iter().any(|&d| d > crate::linalg::SystemLayout::max_dim()) {
        return Err(Error::InvalidParameters(format!("{what}: dimension too large")));
    }
    Ok(())
}

impl SystemLayout {
    pub(crate) fn max_dim() -> usize {
        u8::MAX as usize
    }
}

/// The `2n − 1` bipartite terms on `[A (dim m), B (dim n)]`, stopper first,
/// labeled `phi1, phi2, …` in generation order.
///
/// States whose B-labels would exceed `n` are not emitted; with that rule
/// the count is `2n − 1` for every `4 <= m <= n`.
pub fn bipartite_terms(m: usize, n: usize) -> Result<Vec<ProductTerm>> {
    check_dims("bipartite set", &[m, n])?;
    use Factor::*;
    let mut raw: Vec<[Factor; 2]> = vec![[Uniform, Uniform]];
    for i in 2..=m {
        raw.push([Basis(i), Minus(1, i)]);
    }
    raw.push([Minus(1, m), Basis(2)]);
    for j in 3..=m {
        raw.push([Minus(1, j - 1), Basis(j)]);
    }
    for l in m + 1..=n {
        raw.push([Minus(1, 2), Basis(l)]);
    }
    raw.push([Basis(m), Minus(3, m + 1)]);
    for k in 1..=(n - m) / 2 {
        let s = m + 2 * k - 1;
        let t = m + 2 * k;
        raw.push([Basis(m - 1), Minus(s, s + 1)]);
        raw.push([Basis(m), Minus(t, t + 1)]);
    }
    let mut seen = BTreeSet::new();
    let mut terms = Vec::new();
    for f in raw {
        if f[1].max_label() > n || f[0].max_label() > m || !seen.insert(f) {
            continue;
        }
        let origin = if terms.is_empty() {
            Origin::Stopper
        } else {
            Origin::Core(terms.len())
        };
        terms.push(ProductTerm::new(label(terms.len() + 1), f.to_vec(), origin));
    }
    if terms.len() != 2 * n - 1 {
        return Err(Error::FamilyConsistency(format!(
            "bipartite ({m},{n}) produced {} states, expected {}",
            terms.len(),
            2 * n - 1
        )));
    }
    Ok(terms)
}

/// The seventeen hand-entered states on `[C (4), B (5), A (6)]`.
pub fn eq6_terms() -> Vec<ProductTerm> {
    use Factor::*;
    let rows: [[Factor; 3]; 17] = [
        [Uniform, Uniform, Uniform],
        [Basis(4), Basis(2), Minus(1, 2)],
        [Basis(4), Basis(3), Minus(1, 3)],
        [Basis(4), Basis(4), Minus(1, 4)],
        [Basis(4), Basis(5), Minus(1, 5)],
        [Basis(4), Minus(1, 5), Basis(2)],
        [Basis(4), Minus(1, 2), Basis(3)],
        [Basis(4), Minus(1, 3), Basis(4)],
        [Basis(4), Minus(1, 4), Basis(5)],
        [Basis(4), Basis(5), Minus(3, 6)],
        [Basis(4), Minus(1, 2), Basis(6)],
        [Basis(3), Minus(1, 2), Basis(6)],
        [Basis(2), Minus(1, 2), Basis(6)],
        [Basis(1), Minus(1, 2), Basis(6)],
        [Minus(1, 2), Basis(4), Basis(6)],
        [Minus(2, 3), Basis(5), Basis(6)],
        [Minus(3, 4), Basis(4), Basis(6)],
    ];
    rows.iter()
        .enumerate()
        .map(|(i, f)| {
            let origin = if i == 0 { Origin::Stopper } else { Origin::Fixture };
            ProductTerm::new(label(i + 1), f.to_vec(), origin)
        })
        .collect()
}

/// Which relabeling of Bob's basis the tripartite construction uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TripartiteCase {
    /// `n2 < n3`, odd gap: identity.
    A,
    /// `n2 < n3`, even gap: `(n2−1)′ = n2`, `n2′ = n2−1`.
    B,
    /// `n2 = n3`: `2′ = n2−1`, `(n2−1)′ = 2`.
    C,
}

impl TripartiteCase {
    pub fn select(n2: usize, n3: usize) -> Self {
        if n2 == n3 {
            TripartiteCase::C
        } else if (n3 - n2) % 2 == 1 {
            TripartiteCase::A
        } else {
            TripartiteCase::B
        }
    }
}

/// Permutation of Bob's labels `{1..n2}` for a tripartite case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelabelMap {
    pub case: TripartiteCase,
    mapping: Vec<usize>,
}

impl RelabelMap {
    pub fn new(case: TripartiteCase, n2: usize) -> Self {
        let mut mapping: Vec<usize> = (0..=n2).collect();
        match case {
            TripartiteCase::A => {}
            TripartiteCase::B => mapping.swap(n2 - 1, n2),
            TripartiteCase::C => mapping.swap(2, n2 - 1),
        }
        RelabelMap { case, mapping }
    }

    /// Image `i′` of label `i` (1-based).
    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i]
    }

    pub fn is_bijection(&self) -> bool {
        let n = self.mapping.len() - 1;
        let image: BTreeSet<usize> = self.mapping[1..].iter().copied().collect();
        image.len() == n && image.iter().all(|&x| (1..=n).contains(&x))
    }
}

/// `1` for even arguments, `0` for odd ones.
pub fn delta(i: usize) -> usize {
    usize::from(i.is_multiple_of(2))
}

/// Bob's label for the vertical state with Charles pair `(i, i+1)`:
/// `n2′` when `n1 − i` is even and `(n2 − 1)′` when it is odd.
pub fn vertical_bob_label(n1: usize, n2: usize, i: usize, map: &RelabelMap) -> usize {
    map.apply(n2 - 1 + delta(n1 - i))
}

/// Terms of the tripartite set on `[C (n1), B (n2), A (n3)]`: stopper,
/// the bipartite-built members, then horizontal and vertical members.
/// The horizontal state that coincides with a bipartite-built member is
/// emitted once.
pub fn tripartite_terms(
    n1: usize,
    n2: usize,
    n3: usize,
    case: Option<TripartiteCase>,
) -> Result<Vec<ProductTerm>> {
    check_dims("tripartite set", &[n1, n2, n3])?;
    let case = case.unwrap_or_else(|| TripartiteCase::select(n2, n3));
    if case != TripartiteCase::select(n2, n3) && (case == TripartiteCase::C) != (n2 == n3) {
        return Err(Error::InvalidParameters(format!(
            "case {case:?} does not apply to n2={n2}, n3={n3}"
        )));
    }
    let map = RelabelMap::new(case, n2);
    use Factor::*;
    let core = bipartite_terms(n2, n3)?;
    let mut factors: Vec<(Vec<Factor>, Origin)> = vec![(vec![Uniform; 3], Origin::Stopper)];
    for (k, t) in core.iter().enumerate().skip(1) {
        let mut f = vec![Basis(n1)];
        f.extend_from_slice(&t.factors);
        factors.push((f, Origin::Core(k)));
    }
    let (p, q) = (map.apply(1), map.apply(2));
    let bob_minus = if p < q { Minus(p, q) } else { Minus(q, p) };
    for i in 1..=n1 {
        factors.push((vec![Basis(i), bob_minus, Basis(n3)], Origin::Horizontal(i)));
    }
    for i in 1..n1 {
        let b = vertical_bob_label(n1, n2, i, &map);
        factors.push((vec![Minus(i, i + 1), Basis(b), Basis(n3)], Origin::Vertical(i)));
    }

    let regs = tripartite_registers(n1, n2, n3, "");
    let mut kets: Vec<Ket> = Vec::new();
    let mut terms = Vec::new();
    for (f, origin) in factors {
        let ket = materialize(&regs, &f)?;
        if kets.iter().any(|k| k.same_ray(&ket)) {
            continue;
        }
        kets.push(ket);
        terms.push(ProductTerm::new(label(terms.len() + 1), f, origin));
    }
    let expected = 2 * (n1 + n3) - 3;
    if terms.len() != expected {
        return Err(Error::FamilyConsistency(format!(
            "tripartite ({n1},{n2},{n3}) produced {} states, expected {expected}",
            terms.len()
        )));
    }
    Ok(terms)
}

pub fn bipartite_registers(m: usize, n: usize, suffix: &str) -> Vec<Register> {
    vec![
        Register::principal(&format!("A{suffix}"), &format!("Alice{suffix}"), m),
        Register::principal(&format!("B{suffix}"), &format!("Bob{suffix}"), n),
    ]
}

pub fn tripartite_registers(n1: usize, n2: usize, n3: usize, suffix: &str) -> Vec<Register> {
    vec![
        Register::principal(&format!("C{suffix}"), &format!("Charles{suffix}"), n1),
        Register::principal(&format!("B{suffix}"), &format!("Bob{suffix}"), n2),
        Register::principal(&format!("A{suffix}"), &format!("Alice{suffix}"), n3),
    ]
}

/// Unnormalized `Σᵢ |ii⟩` on two ancilla registers.
pub fn mes(d: usize, left: Register, right: Register) -> Result<Ket> {
    if d < 2 {
        return Err(Error::InvalidParameters(format!(
            "maximally entangled state needs d >= 2, got {d}"
        )));
    }
    if left.dim != d || right.dim != d {
        return Err(Error::DimensionMismatch(format!(
            "ancilla registers must both have dimension {d}"
        )));
    }
    let layout = SystemLayout::new(vec![left, right])?;
    Ket::from_amplitudes(layout, (1..=d).map(|i| (vec![i, i], scalar::one())))
}

/// `Σᵢ |ii⟩_ab` with Alice holding `a` and Bob holding `b`.
pub fn build_mes(d: usize) -> Result<Ket> {
    mes(
        d,
        Register::ancilla("a", "Alice", d),
        Register::ancilla("b", "Bob", d),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledKet {
    pub label: String,
    pub ket: Ket,
}

/// Labeled product states of one family, all on one principal layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSet {
    pub family: Family,
    pub params: Vec<usize>,
    pub claimed_count: usize,
    pub stopper: String,
    states: Vec<LabeledKet>,
    layout: SystemLayout,
}

impl StateSet {
    pub fn new(
        family: Family,
        params: Vec<usize>,
        claimed_count: usize,
        stopper: &str,
        states: Vec<LabeledKet>,
    ) -> Result<Self> {
        let layout = states
            .first()
            .map(|s| s.ket.layout().clone())
            .ok_or_else(|| Error::FamilyConsistency("empty state set".into()))?;
        let mut labels = BTreeSet::new();
        for s in &states {
            if s.label == crate::engine::FAIL || s.label.is_empty() {
                return Err(Error::FamilyConsistency(format!("reserved label `{}`", s.label)));
            }
            if !labels.insert(s.label.as_str()) {
                return Err(Error::FamilyConsistency(format!("duplicate label `{}`", s.label)));
            }
            if s.ket.layout() != &layout {
                return Err(Error::LayoutMismatch(format!(
                    "state `{}` is on a different layout",
                    s.label
                )));
            }
        }
        if !labels.contains(stopper) {
            return Err(Error::FamilyConsistency(format!("stopper `{stopper}` missing")));
        }
        Ok(StateSet {
            family,
            params,
            claimed_count,
            stopper: stopper.to_owned(),
            states,
            layout,
        })
    }

    pub fn states(&self) -> &[LabeledKet] {
        &self.states
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<&Ket> {
        self.states.iter().find(|s| s.label == label).map(|s| &s.ket)
    }

    pub fn labels(&self) -> Vec<String> {
        self.states.iter().map(|s| s.label.clone()).collect()
    }

    /// Register groups of the composed families, one per block. Bipartite
    /// and tripartite sets are a single block.
    pub fn blocks(&self) -> Vec<Vec<String>> {
        match self.family {
            Family::EvenS | Family::OddSprime => {
                let mut out: Vec<Vec<String>> = Vec::new();
                for r in self.layout.registers() {
                    let block: usize = r.id[1..].parse().unwrap_or(1);
                    if out.len() < block {
                        out.resize(block, Vec::new());
                    }
                    out[block - 1].push(r.id.clone());
                }
                out
            }
            _ => vec![self.layout.ids()],
        }
    }

    /// Principal-party cuts: each party against everyone else.
    pub fn party_cuts(&self) -> Vec<(String, Vec<String>, Vec<String>)> {
        self.layout
            .parties()
            .into_iter()
            .map(|p| {
                let (mine, rest): (Vec<_>, Vec<_>) =
                    self.layout.registers().iter().partition(|r| r.party == p);
                (
                    p,
                    mine.into_iter().map(|r| r.id.clone()).collect(),
                    rest.into_iter().map(|r| r.id.clone()).collect(),
                )
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct StateSetJson {
    schema: u32,
    family: Family,
    params: Vec<usize>,
    claimed_count: usize,
    stopper: String,
    states: Vec<LabeledKet>,
}

impl Serialize for StateSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateSetJson {
            schema: crate::SCHEMA_VERSION,
            family: self.family,
            params: self.params.clone(),
            claimed_count: self.claimed_count,
            stopper: self.stopper.clone(),
            states: self.states.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = StateSetJson::deserialize(d)?;
        if raw.schema != crate::SCHEMA_VERSION {
            return Err(serde::de::Error::custom(format!(
                "unsupported schema {}",
                raw.schema
            )));
        }
        StateSet::new(raw.family, raw.params, raw.claimed_count, &raw.stopper, raw.states)
            .map_err(serde::de::Error::custom)
    }
}

fn set_from_terms(
    family: Family,
    params: Vec<usize>,
    claimed: usize,
    regs: &[Register],
    terms: &[ProductTerm],
) -> Result<StateSet> {
    let states = terms
        .iter()
        .map(|t| {
            Ok(LabeledKet {
                label: t.label.clone(),
                ket: materialize(regs, &t.factors)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let stopper = terms
        .iter()
        .find(|t| t.is_stopper())
        .map(|t| t.label.clone())
        .ok_or_else(|| Error::FamilyConsistency("no stopper".into()))?;
    StateSet::new(family, params, claimed, &stopper, states)
}

pub fn build_bipartite_eq1(m: usize, n: usize) -> Result<StateSet> {
    let terms = bipartite_terms(m, n)?;
    set_from_terms(
        Family::BipartiteEq1,
        vec![m, n],
        2 * n - 1,
        &bipartite_registers(m, n, ""),
        &terms,
    )
}

/// The nine-state `C⁴ ⊗ C⁵` example.
pub fn build_example_eq3() -> Result<StateSet> {
    let mut s = build_bipartite_eq1(4, 5)?;
    s.family = Family::ExampleEq3;
    Ok(s)
}

pub fn build_tripartite_eq6() -> Result<StateSet> {
    set_from_terms(
        Family::TripartiteEq6,
        vec![4, 5, 6],
        17,
        &tripartite_registers(4, 5, 6, ""),
        &eq6_terms(),
    )
}

pub fn build_tripartite_g(n1: usize, n2: usize, n3: usize) -> Result<StateSet> {
    build_tripartite_g_case(n1, n2, n3, None)
}

pub fn build_tripartite_g_case(
    n1: usize,
    n2: usize,
    n3: usize,
    case: Option<TripartiteCase>,
) -> Result<StateSet> {
    let terms = tripartite_terms(n1, n2, n3, case)?;
    set_from_terms(
        Family::TripartiteG,
        vec![n1, n2, n3],
        2 * (n1 + n3) - 3,
        &tripartite_registers(n1, n2, n3, ""),
        &terms,
    )
}

/// One block of a composed family.
#[derive(Clone, Debug)]
pub struct BlockSpec {
    pub registers: Vec<Register>,
    pub terms: Vec<ProductTerm>,
}

impl BlockSpec {
    /// All-ones basis state `|1…1⟩` of the block.
    pub fn fill(&self) -> Vec<Factor> {
        vec![Factor::Basis(1); self.registers.len()]
    }

    pub fn stopper(&self) -> &ProductTerm {
        self.terms.iter().find(|t| t.is_stopper()).expect("block has a stopper")
    }
}

pub fn even_blocks(dims: &[usize]) -> Result<Vec<BlockSpec>> {
    if dims.len() < 4 || !dims.len().is_multiple_of(2) {
        return Err(Error::InvalidParameters(format!(
            "even family needs 2k >= 4 dimensions, got {}",
            dims.len()
        )));
    }
    for d in dims.chunks(2) {
        check_dims("even family block", d)?;
    }
    dims.chunks(2)
        .enumerate()
        .map(|(s, d)| {
            Ok(BlockSpec {
                registers: bipartite_registers(d[0], d[1], &(s + 1).to_string()),
                terms: bipartite_terms(d[0], d[1])?,
            })
        })
        .collect()
}

pub fn odd_blocks(dims: &[usize]) -> Result<Vec<BlockSpec>> {
    if dims.len() < 5 || dims.len().is_multiple_of(2) {
        return Err(Error::InvalidParameters(format!(
            "odd family needs 2k + 1 >= 5 dimensions, got {}",
            dims.len()
        )));
    }
    check_dims("odd family block", &dims[..3])?;
    for d in dims[3..].chunks(2) {
        check_dims("odd family block", d)?;
    }
    let mut out = vec![BlockSpec {
        registers: tripartite_registers(dims[0], dims[1], dims[2], "1"),
        terms: tripartite_terms(dims[0], dims[1], dims[2], None)?,
    }];
    for (s, d) in dims[3..].chunks(2).enumerate() {
        out.push(BlockSpec {
            registers: bipartite_registers(d[0], d[1], &(s + 2).to_string()),
            terms: bipartite_terms(d[0], d[1])?,
        });
    }
    Ok(out)
}

/// Composed set: the global stopper, then for each block its non-stopper
/// states with every other block in its fill state. Labels are
/// `{local}_{s}` for block `s` and `phi` for the stopper.
fn composed_set(family: Family, dims: &[usize], claimed: usize, blocks: &[BlockSpec]) -> Result<StateSet> {
    let regs: Vec<Register> = blocks.iter().flat_map(|b| b.registers.clone()).collect();
    let mut states = Vec::new();
    let stopper: Vec<Factor> = blocks.iter().flat_map(|b| b.stopper().factors.clone()).collect();
    states.push(LabeledKet {
        label: "phi".into(),
        ket: materialize(&regs, &stopper)?,
    });
    for (s, block) in blocks.iter().enumerate() {
        for t in block.terms.iter().filter(|t| !t.is_stopper()) {
            let mut f = Vec::new();
            for (r, other) in blocks.iter().enumerate() {
                if r == s {
                    f.extend_from_slice(&t.factors);
                } else {
                    f.extend(other.fill());
                }
            }
            states.push(LabeledKet {
                label: composed_label(s + 1, &t.label),
                ket: materialize(&regs, &f)?,
            });
        }
    }
    StateSet::new(family, dims.to_vec(), claimed, "phi", states)
}

/// Global label of block-local state `local` in block `block` (1-based).
pub fn composed_label(block: usize, local: &str) -> String {
    format!("{local}_{block}")
}

pub fn build_even_s(dims: &[usize]) -> Result<StateSet> {
    let blocks = even_blocks(dims)?;
    let k = blocks.len();
    let sum: usize = dims.iter().skip(1).step_by(2).sum();
    let claimed = 2 * (sum - k) + 1;
    let set = composed_set(Family::EvenS, dims, claimed, &blocks)?;
    if set.len() != claimed {
        return Err(Error::FamilyConsistency(format!(
            "even family {dims:?} produced {} states, expected {claimed}",
            set.len()
        )));
    }
    Ok(set)
}

/// Odd composed family. `claimed_count` carries the published formula
/// `2(n1 + n3 + … + n_{2k+1} − k) + 1`; the enumerated count is
/// `set.len()` and the two are compared by the count audit.
pub fn build_odd_sprime(dims: &[usize]) -> Result<StateSet> {
    let blocks = odd_blocks(dims)?;
    let k = blocks.len();
    let sum: usize = dims[0] + dims.iter().skip(2).step_by(2).sum::<usize>();
    let claimed = 2 * (sum - k) + 1;
    composed_set(Family::OddSprime, dims, claimed, &blocks)
}

/// Rebuilds a set from its family and parameters.
pub fn build(family: Family, params: &[usize]) -> Result<StateSet> {
    let need = |n: usize| {
        if params.len() == n {
            Ok(())
        } else {
            Err(Error::InvalidParameters(format!(
                "{family} takes {n} dimensions, got {}",
                params.len()
            )))
        }
    };
    match family {
        Family::BipartiteEq1 => {
            need(2)?;
            build_bipartite_eq1(params[0], params[1])
        }
        Family::ExampleEq3 => {
            if !params.is_empty() && params != [4, 5] {
                return Err(Error::InvalidParameters("Example_Eq3 is fixed at (4,5)".into()));
            }
            build_example_eq3()
        }
        Family::TripartiteEq6 => {
            if !params.is_empty() && params != [4, 5, 6] {
                return Err(Error::InvalidParameters("Tripartite_Eq6 is fixed at (4,5,6)".into()));
            }
            build_tripartite_eq6()
        }
        Family::TripartiteG => {
            need(3)?;
            build_tripartite_g(params[0], params[1], params[2])
        }
        Family::EvenS => build_even_s(params),
        Family::OddSprime => build_odd_sprime(params),
    }
}
