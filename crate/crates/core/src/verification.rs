//! Checks on state sets that do not depend on any protocol: orthogonality,
//! product structure, cardinality, and a first-move indistinguishability
//! witness.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::families::{Family, StateSet};
use crate::linalg::{inner, nullspace, schmidt_rank_across, DenseMatrix};
use crate::par::{self, Exec};
use crate::scalar::{self, Scalar};
use crate::{Error, Result};

/// Exact pairwise inner products, in set order.
pub fn gram_matrix(set: &StateSet) -> Result<DenseMatrix> {
    let states = set.states();
    states
        .iter()
        .map(|x| states.iter().map(|y| inner(&x.ket, &y.ket)).collect())
        .collect()
}

/// Label pairs with a nonzero off-diagonal Gram entry.
pub fn gram_defects(set: &StateSet) -> Result<Vec<(String, String)>> {
    let g = gram_matrix(set)?;
    let labels = set.labels();
    let mut out = Vec::new();
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            if !g[i][j].is_zero() {
                out.push((labels[i].clone(), labels[j].clone()));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutRank {
    /// Party groups, e.g. `Alice|Bob,Charles`.
    pub cut: String,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductRow {
    pub state: String,
    pub ranks: Vec<CutRank>,
}

impl ProductRow {
    pub fn is_product(&self) -> bool {
        self.ranks.iter().all(|c| c.rank == 1)
    }
}

/// Every bipartition of the parties, each listed once (the side holding
/// the first party comes first).
fn party_bipartitions(set: &StateSet) -> Vec<(String, Vec<String>, Vec<String>)> {
    let layout = set.layout();
    let parties = layout.parties();
    let n = parties.len();
    let mut out = Vec::new();
    for mask in 0..(1u64 << n.saturating_sub(1)) {
        let in_first = |i: usize| i == 0 || (mask >> (i - 1)) & 1 == 1;
        if (0..n).all(in_first) {
            continue;
        }
        let (mut left, mut right) = (Vec::new(), Vec::new());
        let (mut lp, mut rp) = (Vec::new(), Vec::new());
        for (i, p) in parties.iter().enumerate() {
            let regs = layout.registers_of(p).into_iter().map(|r| r.id.clone());
            if in_first(i) {
                left.extend(regs);
                lp.push(p.clone());
            } else {
                right.extend(regs);
                rp.push(p.clone());
            }
        }
        out.push((format!("{}|{}", lp.join(","), rp.join(",")), left, right));
    }
    out
}

pub fn product_certificate(set: &StateSet) -> Result<Vec<ProductRow>> {
    product_certificate_with(set, Exec::Auto)
}

pub fn product_certificate_with(set: &StateSet, exec: Exec) -> Result<Vec<ProductRow>> {
    let cuts = party_bipartitions(set);
    par::map(exec, set.states(), |s| {
        let ranks = cuts
            .iter()
            .map(|(cut, left, right)| {
                Ok(CutRank {
                    cut: cut.clone(),
                    rank: schmidt_rank_across(&s.ket, left, right)?.rank,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProductRow {
            state: s.label.clone(),
            ranks,
        })
    })
    .into_iter()
    .collect()
}

/// Scope statement attached to every witness report.
pub const WITNESS_SCOPE: &str = "first-move check only: a trivial solution space means no party can begin \
with a nontrivial orthogonality-preserving measurement; it does not prove LOCC indistinguishability";

fn matrices<S: Serializer>(m: &[DenseMatrix], s: S) -> std::result::Result<S::Ok, S::Error> {
    let strings: Vec<Vec<Vec<String>>> = m
        .iter()
        .map(|rows| rows.iter().map(|r| r.iter().map(scalar::to_fraction_string).collect()).collect())
        .collect();
    strings.serialize(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessResult {
    pub party: String,
    pub solution_dimension: usize,
    /// Symmetric matrices on the party's space spanning the solutions.
    #[serde(serialize_with = "matrices")]
    pub basis: Vec<DenseMatrix>,
    pub trivial_only: bool,
}

/// Solves `⟨φᵢ|(E ⊗ I)|φⱼ⟩ = 0` for all `i ≠ j` over real symmetric `E` on
/// the registers of `party`.
pub fn indistinguishability_witness(set: &StateSet, party: &str) -> Result<WitnessResult> {
    let layout = set.layout();
    if layout.has_ancilla() {
        return Err(Error::InvalidParameters(
            "the witness applies to sets without ancilla registers".into(),
        ));
    }
    let positions: Vec<usize> = layout
        .registers()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.party == party)
        .map(|(i, _)| i)
        .collect();
    if positions.is_empty() {
        return Err(Error::InvalidParameters(format!("no party `{party}` in the set")));
    }
    let dims: Vec<usize> = positions.iter().map(|&i| layout.registers()[i].dim).collect();
    let d: usize = dims.iter().product();

    // Each state as party index -> (rest tuple -> amplitude).
    type Split = BTreeMap<usize, BTreeMap<Vec<u8>, Scalar>>;
    let split: Vec<Split> = set
        .states()
        .iter()
        .map(|s| {
            let mut m = Split::new();
            for (t, a) in s.ket.raw() {
                let mut idx = 0;
                for (&p, &dim) in positions.iter().zip(&dims) {
                    idx = idx * dim + t[p] as usize;
                }
                let rest: Vec<u8> = t
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !positions.contains(i))
                    .map(|(_, &x)| x)
                    .collect();
                m.entry(idx).or_default().insert(rest, a.clone());
            }
            m
        })
        .collect();

    // Unknowns: E[r][c] for r <= c, row-major.
    let mut unknown = BTreeMap::new();
    for r in 0..d {
        for c in r..d {
            let k = unknown.len();
            unknown.insert((r, c), k);
        }
    }
    let cols = unknown.len();
    let mut rows: DenseMatrix = Vec::new();
    for i in 0..split.len() {
        for j in i + 1..split.len() {
            let mut row = vec![Scalar::zero(); cols];
            for (&r, xr) in &split[i] {
                for (&c, yc) in &split[j] {
                    let mut m = Scalar::zero();
                    for (rest, a) in xr {
                        if let Some(b) = yc.get(rest) {
                            m += a * b;
                        }
                    }
                    if !m.is_zero() {
                        row[unknown[&(r.min(c), r.max(c))]] += m;
                    }
                }
            }
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
    }
    let basis: Vec<DenseMatrix> = nullspace(&rows, cols)
        .into_iter()
        .map(|v| {
            let mut e = vec![vec![Scalar::zero(); d]; d];
            for (&(r, c), &k) in &unknown {
                e[r][c] = v[k].clone();
                e[c][r] = v[k].clone();
            }
            e
        })
        .collect();
    Ok(WitnessResult {
        party: party.to_owned(),
        solution_dimension: basis.len(),
        trivial_only: basis.len() == 1,
        basis,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountAudit {
    pub family: Family,
    pub params: Vec<usize>,
    pub actual: usize,
    pub claimed: usize,
    pub matches: bool,
}

/// Compares the enumerated cardinality with the family's closed formula.
pub fn count_audit(set: &StateSet) -> CountAudit {
    CountAudit {
        family: set.family,
        params: set.params.clone(),
        actual: set.len(),
        claimed: set.claimed_count,
        matches: set.len() == set.claimed_count,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessSummary {
    pub party: String,
    pub solution_dim: usize,
    pub trivial_only: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetCheck {
    pub schema: u32,
    pub family: Family,
    pub params: Vec<usize>,
    pub gram_ok: bool,
    pub non_orthogonal: Vec<(String, String)>,
    pub product_ok: bool,
    pub entangled: Vec<String>,
    pub count_ok: bool,
    pub count: CountAudit,
    pub witness: Vec<WitnessSummary>,
    pub witness_scope: String,
}

impl SetCheck {
    /// Orthogonality, product structure and cardinality all hold. The
    /// witness is reported, not judged.
    pub fn passed(&self) -> bool {
        self.gram_ok && self.product_ok && self.count_ok
    }
}

pub fn check_set(set: &StateSet) -> Result<SetCheck> {
    check_set_with(set, Exec::Auto)
}

pub fn check_set_with(set: &StateSet, exec: Exec) -> Result<SetCheck> {
    let non_orthogonal = gram_defects(set)?;
    let entangled: Vec<String> = product_certificate_with(set, exec)?
        .into_iter()
        .filter(|r| !r.is_product())
        .map(|r| r.state)
        .collect();
    let count = count_audit(set);
    let witness = if set.layout().has_ancilla() {
        Vec::new()
    } else {
        par::map(exec, &set.layout().parties(), |p| {
            indistinguishability_witness(set, p).map(|w| WitnessSummary {
                party: w.party,
                solution_dim: w.solution_dimension,
                trivial_only: w.trivial_only,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?
    };
    Ok(SetCheck {
        schema: crate::SCHEMA_VERSION,
        family: set.family,
        params: set.params.clone(),
        gram_ok: non_orthogonal.is_empty(),
        non_orthogonal,
        product_ok: entangled.is_empty(),
        entangled,
        count_ok: count.matches,
        count,
        witness,
        witness_scope: WITNESS_SCOPE.into(),
    })
}

/// Whether `e` is a scalar multiple of the identity.
pub fn is_scalar_identity(e: &DenseMatrix) -> bool {
    let c = e.first().and_then(|r| r.first()).cloned().unwrap_or_else(Scalar::one);
    e.iter()
        .enumerate()
        .all(|(i, r)| r.iter().enumerate().all(|(j, x)| if i == j { *x == c } else { x.is_zero() }))
}
