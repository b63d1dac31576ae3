use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::exact::{rank, DenseMatrix};
use super::ket::{Ket, Tuple};
use super::layout::SystemLayout;
use crate::scalar::{self, Scalar};
use crate::{Error, Result};

/// Sparse vector on a local space, keyed by 0-based flat index.
pub type SparseVector = BTreeMap<usize, Scalar>;

/// Sparse square matrix, 0-based `(row, col)` keys, no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseMatrix {
    dim: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl SparseMatrix {
    pub fn zero(dim: usize) -> Self {
        SparseMatrix {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        SparseMatrix {
            dim,
            entries: (0..dim).map(|i| ((i, i), scalar::one())).collect(),
        }
    }

    pub fn from_entries<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize), Scalar)>,
    {
        let mut m = SparseMatrix::zero(dim);
        for ((r, c), v) in entries {
            if r >= dim || c >= dim {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({r},{c}) outside a {dim}x{dim} matrix"
                )));
            }
            m.add_at(r, c, v);
        }
        Ok(m)
    }

    /// `v vᵀ / (vᵀ v)`.
    pub fn rank_one_projector(dim: usize, v: &SparseVector) -> Result<Self> {
        let norm: Scalar = v.values().map(|x| x * x).sum();
        if norm.is_zero() {
            return Err(Error::ZeroKet);
        }
        let entries = v
            .iter()
            .flat_map(|(i, a)| v.iter().map(move |(j, b)| ((*i, *j), a * b)))
            .map(|(k, x)| (k, x / &norm))
            .collect::<Vec<_>>();
        SparseMatrix::from_entries(dim, entries)
    }

    fn add_at(&mut self, r: usize, c: usize, v: Scalar) {
        if v.is_zero() {
            return;
        }
        let e = self.entries.entry((r, c)).or_insert_with(scalar::zero);
        *e += v;
        if e.is_zero() {
            self.entries.remove(&(r, c));
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), Scalar> {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        let mut out = self.clone();
        for (&(r, c), v) in &other.entries {
            out.add_at(r, c, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        let mut out = self.clone();
        for (&(r, c), v) in &other.entries {
            out.add_at(r, c, -v.clone());
        }
        out
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        let mut by_row: BTreeMap<usize, Vec<(usize, &Scalar)>> = BTreeMap::new();
        for (&(r, c), v) in &other.entries {
            by_row.entry(r).or_default().push((c, v));
        }
        let mut out = SparseMatrix::zero(self.dim);
        for (&(r, k), a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(c, b) in row {
                    out.add_at(r, c, a * b);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        SparseMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|(&(r, c), v)| ((c, r), v.clone()))
                .collect(),
        }
    }

    pub fn trace(&self) -> Scalar {
        self.entries
            .iter()
            .filter(|((r, c), _)| r == c)
            .map(|(_, v)| v.clone())
            .sum()
    }

    pub fn is_projector(&self) -> bool {
        self.transpose() == *self && self.mul(self) == *self
    }

    pub fn apply(&self, v: &SparseVector) -> SparseVector {
        let mut out = SparseVector::new();
        for (&(r, c), m) in &self.entries {
            if let Some(x) = v.get(&c) {
                let e = out.entry(r).or_insert_with(scalar::zero);
                *e += m * x;
            }
        }
        out.retain(|_, x| !x.is_zero());
        out
    }
}

/// Operator held by one party, acting on an ordered list of that party's
/// registers. Flat local indices are row-major over `registers`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalOperator {
    pub party: String,
    pub label: String,
    registers: Vec<String>,
    dims: Vec<usize>,
    matrix: SparseMatrix,
}

impl LocalOperator {
    pub fn from_parts(
        party: &str,
        label: &str,
        registers: Vec<String>,
        dims: Vec<usize>,
        matrix: SparseMatrix,
    ) -> Result<Self> {
        if registers.is_empty() || registers.len() != dims.len() {
            return Err(Error::DimensionMismatch(
                "operator needs one dimension per register".into(),
            ));
        }
        let unique: BTreeSet<&String> = registers.iter().collect();
        if unique.len() != registers.len() {
            return Err(Error::DuplicateRegister(format!("{registers:?}")));
        }
        let d: usize = dims.iter().product();
        if matrix.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {0}x{0} but registers {registers:?} span {d}",
                matrix.dim()
            )));
        }
        Ok(LocalOperator {
            party: party.to_owned(),
            label: label.to_owned(),
            registers,
            dims,
            matrix,
        })
    }

    /// Dimensions are read from `layout`; ownership is not checked here
    /// (see the engine's validator).
    pub fn new(
        layout: &SystemLayout,
        party: &str,
        registers: &[&str],
        matrix: SparseMatrix,
        label: &str,
    ) -> Result<Self> {
        let dims = registers
            .iter()
            .map(|id| layout.require(id).map(|(_, r)| r.dim))
            .collect::<Result<Vec<_>>>()?;
        LocalOperator::from_parts(
            party,
            label,
            registers.iter().map(|s| s.to_string()).collect(),
            dims,
            matrix,
        )
    }

    /// Projector onto the span of mutually orthogonal vectors, each given as
    /// `(1-based labels on the operator registers, amplitude)` entries.
    pub fn projector(
        layout: &SystemLayout,
        party: &str,
        registers: &[&str],
        vectors: &[Vec<(Vec<usize>, Scalar)>],
        label: &str,
    ) -> Result<Self> {
        let dims = registers
            .iter()
            .map(|id| layout.require(id).map(|(_, r)| r.dim))
            .collect::<Result<Vec<_>>>()?;
        let d: usize = dims.iter().product();
        let mut m = SparseMatrix::zero(d);
        for v in vectors {
            let mut sv = SparseVector::new();
            for (labels, a) in v {
                let idx = flat_index(&dims, labels)?;
                let e = sv.entry(idx).or_insert_with(scalar::zero);
                *e += a;
            }
            sv.retain(|_, x| !x.is_zero());
            m = m.add(&SparseMatrix::rank_one_projector(d, &sv)?);
        }
        LocalOperator::new(layout, party, registers, m, label)
    }

    pub fn registers(&self) -> &[String] {
        &self.registers
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_owned();
        self
    }

    /// Matrix of `self ⊗ I` on `registers` (a superset, any order) with the
    /// given per-register dimensions.
    pub fn embed(&self, registers: &[String], dims: &[usize]) -> Result<SparseMatrix> {
        let pos = self
            .registers
            .iter()
            .map(|id| {
                registers
                    .iter()
                    .position(|r| r == id)
                    .ok_or_else(|| Error::RegisterNotFound(id.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        for (p, d) in pos.iter().zip(&self.dims) {
            if dims[*p] != *d {
                return Err(Error::DimensionMismatch(format!(
                    "register `{}` has dimension {} here but {d} in the operator",
                    registers[*p], dims[*p]
                )));
            }
        }
        let total: usize = dims.iter().product();
        let rest: Vec<usize> = (0..registers.len()).filter(|i| !pos.contains(i)).collect();
        let rest_dims: Vec<usize> = rest.iter().map(|&i| dims[i]).collect();
        let rest_total: usize = rest_dims.iter().product();
        let mut out = SparseMatrix::zero(total);
        let mut digits = vec![0usize; registers.len()];
        for ((r, c), v) in &self.matrix.entries {
            let rd = unflatten(&self.dims, *r);
            let cd = unflatten(&self.dims, *c);
            for k in 0..rest_total {
                let kd = unflatten(&rest_dims, k);
                for (i, &p) in rest.iter().enumerate() {
                    digits[p] = kd[i];
                }
                for (i, &p) in pos.iter().enumerate() {
                    digits[p] = rd[i];
                }
                let row = flatten(dims, &digits);
                for (i, &p) in pos.iter().enumerate() {
                    digits[p] = cd[i];
                }
                let col = flatten(dims, &digits);
                out.add_at(row, col, v.clone());
            }
        }
        Ok(out)
    }
}

pub(crate) fn flatten(dims: &[usize], digits: &[usize]) -> usize {
    dims.iter().zip(digits).fold(0, |acc, (d, x)| acc * d + x)
}

pub(crate) fn unflatten(dims: &[usize], mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for i in (0..dims.len()).rev() {
        out[i] = idx % dims[i];
        idx /= dims[i];
    }
    out
}

fn flat_index(dims: &[usize], labels: &[usize]) -> Result<usize> {
    if labels.len() != dims.len() || labels.iter().zip(dims).any(|(&l, &d)| l == 0 || l > d) {
        return Err(Error::DimensionMismatch(format!(
            "labels {labels:?} do not fit dimensions {dims:?}"
        )));
    }
    Ok(flatten(
        dims,
        &labels.iter().map(|l| l - 1).collect::<Vec<_>>(),
    ))
}

/// `(op ⊗ I) x`, exact. The result may be the zero ket.
pub fn apply_local(op: &LocalOperator, x: &Ket) -> Result<Ket> {
    let layout = x.layout();
    let mut pos = Vec::with_capacity(op.registers.len());
    for (id, &d) in op.registers.iter().zip(&op.dims) {
        let (p, r) = layout.require(id)?;
        if r.dim != d {
            return Err(Error::DimensionMismatch(format!(
                "register `{id}` has dimension {} but the operator expects {d}",
                r.dim
            )));
        }
        pos.push(p);
    }
    let mut by_col: BTreeMap<usize, Vec<(Vec<usize>, &Scalar)>> = BTreeMap::new();
    for (&(r, c), v) in &op.matrix.entries {
        by_col
            .entry(c)
            .or_default()
            .push((unflatten(&op.dims, r), v));
    }
    let mut out: BTreeMap<Tuple, Scalar> = BTreeMap::new();
    for (t, a) in x.raw() {
        let col = pos
            .iter()
            .zip(&op.dims)
            .fold(0, |acc, (&p, d)| acc * d + t[p] as usize);
        let Some(rows) = by_col.get(&col) else {
            continue;
        };
        for (digits, v) in rows {
            let mut u = t.clone();
            for (&p, &dgt) in pos.iter().zip(digits) {
                u[p] = dgt as u8;
            }
            let e = out.entry(u).or_insert_with(scalar::zero);
            *e += a * *v;
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(Ket::from_raw(layout.clone(), out))
}

/// Exact Schmidt rank across a bipartition, and whether the reshaped
/// amplitude matrix `M` satisfies `M Mᵀ = c·I` on the first group's full
/// space (the maximally-entangled shape).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchmidtInfo {
    pub rank: usize,
    pub balanced: bool,
}

pub fn schmidt_rank_across(x: &Ket, first: &[String], second: &[String]) -> Result<SchmidtInfo> {
    let layout = x.layout();
    let mut covered = BTreeSet::new();
    for id in first.iter().chain(second) {
        layout.require(id)?;
        if !covered.insert(id.as_str()) {
            return Err(Error::BadPartition(format!("register `{id}` listed twice")));
        }
    }
    if covered.len() != layout.len() {
        return Err(Error::BadPartition(format!(
            "{} of {} registers covered",
            covered.len(),
            layout.len()
        )));
    }
    if x.is_zero() {
        return Err(Error::ZeroKet);
    }
    let p1: Vec<usize> = first.iter().map(|id| layout.position(id).unwrap()).collect();
    let p2: Vec<usize> = second.iter().map(|id| layout.position(id).unwrap()).collect();
    let mut rows: BTreeMap<Tuple, usize> = BTreeMap::new();
    let mut cols: BTreeMap<Tuple, usize> = BTreeMap::new();
    for t in x.raw().keys() {
        let r: Tuple = p1.iter().map(|&p| t[p]).collect();
        let c: Tuple = p2.iter().map(|&p| t[p]).collect();
        let n = rows.len();
        rows.entry(r).or_insert(n);
        let n = cols.len();
        cols.entry(c).or_insert(n);
    }
    let mut m: DenseMatrix = vec![vec![scalar::zero(); cols.len()]; rows.len()];
    for (t, a) in x.raw() {
        let r: Tuple = p1.iter().map(|&p| t[p]).collect();
        let c: Tuple = p2.iter().map(|&p| t[p]).collect();
        m[rows[&r]][cols[&c]] = a.clone();
    }
    let rank = rank(&m);
    let full: usize = p1.iter().map(|&p| layout.registers()[p].dim).product();
    let balanced = rows.len() == full && {
        let gram = |i: usize, j: usize| -> Scalar { m[i].iter().zip(&m[j]).map(|(a, b)| a * b).sum() };
        let c = gram(0, 0);
        (0..m.len()).all(|i| {
            gram(i, i) == c && (i + 1..m.len()).all(|j| gram(i, j).is_zero())
        })
    };
    Ok(SchmidtInfo { rank, balanced })
}

/// Rank-one projectors `|α−β⟩⟨α−β|` and `|α+β⟩⟨α+β|` on one register,
/// returned as `(minus, plus)`. Entries are `±1/2`.
pub fn embed_basis_change(
    layout: &SystemLayout,
    register: &str,
    alpha: usize,
    beta: usize,
) -> Result<(LocalOperator, LocalOperator)> {
    let (_, reg) = layout.require(register)?;
    if alpha == 0 || alpha >= beta || beta > reg.dim {
        return Err(Error::InvalidParameters(format!(
            "need 1 <= alpha < beta <= {}, got ({alpha}, {beta})",
            reg.dim
        )));
    }
    let party = reg.party.clone();
    let make = |sign: i64, name: &str| {
        LocalOperator::projector(
            layout,
            &party,
            &[register],
            &[vec![
                (vec![alpha], scalar::one()),
                (vec![beta], scalar::int(sign)),
            ]],
            &format!("|{alpha}{name}{beta}>"),
        )
    };
    Ok((make(-1, "-")?, make(1, "+")?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{tensor, Register};
    use crate::scalar::{frac, int};

    fn layout() -> SystemLayout {
        SystemLayout::new(vec![
            Register::principal("A", "Alice", 5),
            Register::principal("B", "Bob", 5),
        ])
        .unwrap()
    }

    fn one_reg(id: &str, dim: usize) -> SystemLayout {
        SystemLayout::new(vec![Register::principal(id, "P", dim)]).unwrap()
    }

    #[test]
    fn basis_change_entries() {
        let l = one_reg("A", 5);
        let (minus, plus) = embed_basis_change(&l, "A", 1, 2).unwrap();
        assert_eq!(minus.matrix().get(0, 0), frac(1, 2));
        assert_eq!(minus.matrix().get(0, 1), frac(-1, 2));
        assert_eq!(plus.matrix().get(1, 0), frac(1, 2));
        assert_eq!(minus.matrix().entries().len(), 4);
        assert!(embed_basis_change(&l, "A", 2, 2).is_err());
        assert!(embed_basis_change(&l, "A", 1, 6).is_err());

        let one = Ket::basis(l.clone(), &[1]).unwrap();
        let sum = apply_local(&minus, &one)
            .unwrap()
            .add(&apply_local(&plus, &one).unwrap())
            .unwrap();
        assert_eq!(sum, one);
        let p12 = Ket::from_amplitudes(l, vec![(vec![1], int(1)), (vec![2], int(1))]).unwrap();
        assert!(apply_local(&minus, &p12).unwrap().is_zero());
    }

    #[test]
    fn identity_and_orthogonal_projection() {
        let l = layout();
        let id = LocalOperator::new(&l, "Alice", &["A"], SparseMatrix::identity(5), "I").unwrap();
        let x = Ket::from_amplitudes(l.clone(), vec![(vec![1, 5], int(1)), (vec![2, 5], int(-1))])
            .unwrap();
        assert_eq!(apply_local(&id, &x).unwrap(), x);
        let p3 = LocalOperator::projector(&l, "Alice", &["A"], &[vec![(vec![3], int(1))]], "P3")
            .unwrap();
        let y = apply_local(&p3, &x).unwrap();
        assert!(y.is_zero());
        assert_eq!(y.norm_squared(), int(0));
    }

    #[test]
    fn apply_rejects_unknown_registers() {
        let l = layout();
        let other = one_reg("Z", 5);
        let op = LocalOperator::new(&other, "P", &["Z"], SparseMatrix::identity(5), "I").unwrap();
        let x = Ket::basis(l, &[1, 1]).unwrap();
        assert_eq!(
            apply_local(&op, &x).unwrap_err(),
            Error::RegisterNotFound("Z".into())
        );
        let l3 = SystemLayout::new(vec![Register::principal("A", "Alice", 3)]).unwrap();
        let op3 = LocalOperator::new(&l3, "Alice", &["A"], SparseMatrix::identity(3), "I").unwrap();
        let y = Ket::basis(layout(), &[1, 1]).unwrap();
        assert!(matches!(apply_local(&op3, &y), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn embedding_matches_application() {
        let l = layout();
        let (minus, _) = embed_basis_change(&l, "B", 2, 4).unwrap();
        let ids = l.ids();
        let big = minus.embed(&ids, &l.dims()).unwrap();
        assert_eq!(big.dim(), 25);
        assert!(big.is_projector());
        assert_eq!(big.trace(), int(5));
    }

    #[test]
    fn schmidt_ranks() {
        let l = layout();
        let ids = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let ghz = Ket::from_amplitudes(l.clone(), vec![(vec![1, 1], int(1)), (vec![2, 2], int(1))])
            .unwrap();
        let info = schmidt_rank_across(&ghz, &ids(&["A"]), &ids(&["B"])).unwrap();
        assert_eq!(info.rank, 2);
        assert!(!info.balanced);
        let mes = Ket::from_amplitudes(l.clone(), (1..=5).map(|i| (vec![i, i], int(1)))).unwrap();
        let info = schmidt_rank_across(&mes, &ids(&["A"]), &ids(&["B"])).unwrap();
        assert_eq!(info, SchmidtInfo { rank: 5, balanced: true });
        assert!(matches!(
            schmidt_rank_across(&mes, &ids(&["A"]), &[]),
            Err(Error::BadPartition(_))
        ));
        assert_eq!(
            schmidt_rank_across(&Ket::zero(l), &ids(&["A"]), &ids(&["B"])).unwrap_err(),
            Error::ZeroKet
        );
        let a = Ket::from_amplitudes(one_reg("X", 3), vec![(vec![1], int(1)), (vec![3], int(-2))])
            .unwrap();
        let b = Ket::basis(one_reg("Y", 2), &[2]).unwrap();
        let ab = tensor(&[&a, &b]).unwrap();
        assert_eq!(
            schmidt_rank_across(&ab, &ids(&["X"]), &ids(&["Y"])).unwrap().rank,
            1
        );
    }
}
