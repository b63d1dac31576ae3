use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::layout::SystemLayout;
use crate::scalar::{self, Scalar};
use crate::{Error, Result};

/// Internal basis tuple: one 0-based digit per register, in layout order.
pub type Tuple = Vec<u8>;

/// Real rational ket over a layout's product basis, stored sparsely and
/// unnormalized. Absent tuples have amplitude zero; stored amplitudes are
/// never zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ket {
    layout: SystemLayout,
    amps: BTreeMap<Tuple, Scalar>,
}

impl Ket {
    pub fn zero(layout: SystemLayout) -> Self {
        Ket {
            layout,
            amps: BTreeMap::new(),
        }
    }

    /// `|l₁ l₂ …⟩` with 1-based labels.
    pub fn basis(layout: SystemLayout, labels: &[usize]) -> Result<Self> {
        let t = to_tuple(&layout, labels)?;
        let mut amps = BTreeMap::new();
        amps.insert(t, scalar::one());
        Ok(Ket { layout, amps })
    }

    /// Builds from `(1-based labels, amplitude)` pairs; repeated tuples add up.
    pub fn from_amplitudes<I>(layout: SystemLayout, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Scalar)>,
    {
        let mut ket = Ket::zero(layout);
        for (labels, a) in entries {
            let t = to_tuple(&ket.layout, &labels)?;
            ket.accumulate(t, a);
        }
        Ok(ket)
    }

    pub(crate) fn from_raw(layout: SystemLayout, amps: BTreeMap<Tuple, Scalar>) -> Self {
        debug_assert!(amps.values().all(|a| !a.is_zero()));
        Ket { layout, amps }
    }

    pub(crate) fn accumulate(&mut self, t: Tuple, a: Scalar) {
        if a.is_zero() {
            return;
        }
        match self.amps.entry(t) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(a);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += a;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub(crate) fn raw(&self) -> &BTreeMap<Tuple, Scalar> {
        &self.amps
    }

    /// Amplitude at 1-based labels.
    pub fn amplitude(&self, labels: &[usize]) -> Scalar {
        match to_tuple(&self.layout, labels) {
            Ok(t) => self.amps.get(&t).cloned().unwrap_or_else(scalar::zero),
            Err(_) => scalar::zero(),
        }
    }

    /// Nonzero entries as `(1-based labels, amplitude)`, lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, &Scalar)> + '_ {
        self.amps
            .iter()
            .map(|(t, a)| (t.iter().map(|&d| d as usize + 1).collect(), a))
    }

    pub fn support_size(&self) -> usize {
        self.amps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_squared(&self) -> Scalar {
        self.amps.values().map(|a| a * a).sum()
    }

    pub fn scaled(&self, c: &Scalar) -> Ket {
        if c.is_zero() {
            return Ket::zero(self.layout.clone());
        }
        Ket {
            layout: self.layout.clone(),
            amps: self.amps.iter().map(|(t, a)| (t.clone(), a * c)).collect(),
        }
    }

    pub fn add(&self, other: &Ket) -> Result<Ket> {
        same_layout(self, other)?;
        let mut out = self.clone();
        for (t, a) in &other.amps {
            out.accumulate(t.clone(), a.clone());
        }
        Ok(out)
    }

    /// True when both kets are nonzero and one is a scalar multiple of the
    /// other (same ray), or both are zero.
    pub fn same_ray(&self, other: &Ket) -> bool {
        if self.layout != other.layout || self.amps.len() != other.amps.len() {
            return false;
        }
        let Some(((t0, a0), (u0, b0))) = self.amps.iter().next().zip(other.amps.iter().next())
        else {
            return self.is_zero() && other.is_zero();
        };
        if t0 != u0 {
            return false;
        }
        let ratio = b0 / a0;
        self.amps
            .iter()
            .zip(other.amps.iter())
            .all(|((t, a), (u, b))| t == u && &(a * &ratio) == b)
    }

    /// Same ket with its registers permuted into `target` order.
    pub fn reordered(&self, target: &SystemLayout) -> Result<Ket> {
        if target.len() != self.layout.len() {
            return Err(Error::LayoutMismatch(
                "target layout has a different register count".into(),
            ));
        }
        let mut perm = Vec::with_capacity(target.len());
        for r in target.registers() {
            let (pos, mine) = self.layout.require(&r.id)?;
            if mine != r {
                return Err(Error::LayoutMismatch(format!(
                    "register `{}` differs between layouts",
                    r.id
                )));
            }
            perm.push(pos);
        }
        let amps = self
            .amps
            .iter()
            .map(|(t, a)| (perm.iter().map(|&p| t[p]).collect(), a.clone()))
            .collect();
        Ok(Ket {
            layout: target.clone(),
            amps,
        })
    }
}

pub(crate) fn to_tuple(layout: &SystemLayout, labels: &[usize]) -> Result<Tuple> {
    if labels.len() != layout.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {} registers",
            labels.len(),
            layout.len()
        )));
    }
    labels
        .iter()
        .zip(layout.registers())
        .map(|(&l, r)| {
            if l == 0 || l > r.dim {
                Err(Error::DimensionMismatch(format!(
                    "label {l} out of range 1..={} on register `{}`",
                    r.dim, r.id
                )))
            } else {
                Ok((l - 1) as u8)
            }
        })
        .collect()
}

fn same_layout(x: &Ket, y: &Ket) -> Result<()> {
    if x.layout != y.layout {
        return Err(Error::LayoutMismatch(format!(
            "{:?} vs {:?}",
            x.layout.ids(),
            y.layout.ids()
        )));
    }
    Ok(())
}

/// Tensor product over the concatenated layout.
pub fn tensor(factors: &[&Ket]) -> Result<Ket> {
    let mut layout = SystemLayout::empty();
    let mut amps: BTreeMap<Tuple, Scalar> = BTreeMap::new();
    amps.insert(Vec::new(), scalar::one());
    for f in factors {
        layout = layout.concat(&f.layout)?;
        let mut next = BTreeMap::new();
        for (t, a) in &amps {
            for (u, b) in &f.amps {
                let mut tu = t.clone();
                tu.extend_from_slice(u);
                next.insert(tu, a * b);
            }
        }
        amps = next;
    }
    Ok(Ket { layout, amps })
}

/// Exact real inner product; layouts must match.
pub fn inner(x: &Ket, y: &Ket) -> Result<Scalar> {
    same_layout(x, y)?;
    let (small, large) = if x.amps.len() <= y.amps.len() {
        (x, y)
    } else {
        (y, x)
    };
    Ok(small
        .amps
        .iter()
        .filter_map(|(t, a)| large.amps.get(t).map(|b| a * b))
        .sum())
}

#[derive(Serialize, Deserialize)]
struct KetJson {
    layout: SystemLayout,
    amps: Vec<Vec<i64>>,
}

fn big_to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::schema("amps", format!("integer {x} does not fit in 64 bits")))
}

impl Serialize for Ket {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let amps = self
            .amps
            .iter()
            .map(|(t, a)| {
                let mut row: Vec<i64> = t.iter().map(|&d| d as i64 + 1).collect();
                row.push(big_to_i64(a.numer())?);
                row.push(big_to_i64(a.denom())?);
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()
            .map_err(serde::ser::Error::custom)?;
        KetJson {
            layout: self.layout.clone(),
            amps,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ket {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = KetJson::deserialize(d)?;
        let n = raw.layout.len();
        let mut entries = Vec::with_capacity(raw.amps.len());
        for (i, row) in raw.amps.iter().enumerate() {
            if row.len() != n + 2 {
                return Err(serde::de::Error::custom(Error::schema(
                    format!("amps[{i}]"),
                    format!("expected {} integers, found {}", n + 2, row.len()),
                )));
            }
            if row[n + 1] == 0 {
                return Err(serde::de::Error::custom(Error::schema(
                    format!("amps[{i}]"),
                    "zero denominator",
                )));
            }
            let labels = row[..n]
                .iter()
                .map(|&l| usize::try_from(l).unwrap_or(0))
                .collect::<Vec<_>>();
            let a = Scalar::new(BigInt::from(row[n]), BigInt::from(row[n + 1]));
            entries.push((labels, a));
        }
        Ket::from_amplitudes(raw.layout, entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Register;
    use crate::scalar::int;

    fn reg(id: &str, party: &str, dim: usize) -> SystemLayout {
        SystemLayout::new(vec![Register::principal(id, party, dim)]).unwrap()
    }

    fn single(id: &str, dim: usize, entries: &[(usize, i64)]) -> Ket {
        Ket::from_amplitudes(
            reg(id, id, dim),
            entries.iter().map(|&(l, a)| (vec![l], int(a))),
        )
        .unwrap()
    }

    #[test]
    fn tensor_of_basis_states() {
        let x = single("A", 4, &[(1, 1)]);
        let y = single("B", 5, &[(1, 1)]);
        let t = tensor(&[&x, &y]).unwrap();
        assert_eq!(t.amplitude(&[1, 1]), int(1));
        assert_eq!(t.norm_squared(), int(1));
    }

    #[test]
    fn tensor_of_minus_state_with_basis() {
        let x = single("A", 4, &[(1, 1), (2, -1)]);
        let y = single("B", 5, &[(2, 1)]);
        let t = tensor(&[&x, &y]).unwrap();
        assert_eq!(t.amplitude(&[1, 2]), int(1));
        assert_eq!(t.amplitude(&[2, 2]), int(-1));
        assert_eq!(t.support_size(), 2);
        assert_eq!(t.norm_squared(), int(2));
    }

    #[test]
    fn tensor_rejects_collisions() {
        let x = single("A", 4, &[(1, 1)]);
        assert_eq!(
            tensor(&[&x, &x]).unwrap_err(),
            Error::DuplicateRegister("A".into())
        );
    }

    #[test]
    fn inner_products() {
        let m = single("A", 4, &[(1, 1), (2, -1)]);
        let p = single("A", 4, &[(1, 1), (2, 1)]);
        assert_eq!(inner(&m, &p).unwrap(), int(0));
        assert_eq!(inner(&m, &m).unwrap(), m.norm_squared());
        let other = single("B", 4, &[(1, 1)]);
        assert!(matches!(inner(&m, &other), Err(Error::LayoutMismatch(_))));
    }

    #[test]
    fn labels_are_range_checked() {
        assert!(Ket::basis(reg("A", "A", 3), &[0]).is_err());
        assert!(Ket::basis(reg("A", "A", 3), &[4]).is_err());
        assert!(Ket::basis(reg("A", "A", 3), &[3]).is_ok());
    }

    #[test]
    fn cancellation_removes_entries() {
        let x = single("A", 3, &[(1, 1), (1, -1), (2, 3)]);
        assert_eq!(x.support_size(), 1);
        assert!(x.add(&x.scaled(&int(-1))).unwrap().is_zero());
    }

    #[test]
    fn rays_and_reordering() {
        let x = single("A", 4, &[(1, 1), (2, -1)]);
        let y = single("B", 3, &[(3, 2)]);
        let xy = tensor(&[&x, &y]).unwrap();
        let yx = tensor(&[&y, &x]).unwrap();
        assert_eq!(yx.reordered(xy.layout()).unwrap(), xy);
        assert!(xy.same_ray(&xy.scaled(&int(-7))));
        assert!(!xy.same_ray(&tensor(&[&x, &single("B", 3, &[(2, 1)])]).unwrap()));
    }

    #[test]
    fn json_is_sorted_and_lossless() {
        let x = single("A", 4, &[(2, -1), (1, 1)]);
        let json = serde_json::to_string(&x).unwrap();
        assert!(json.contains(r#""amps":[[1,1,1],[2,-1,1]]"#), "{json}");
        let back: Ket = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<Ket>(
            r#"{"layout":[{"id":"A","party":"A","dim":2,"role":"principal"}],"amps":[[3,1,1]]}"#
        )
        .is_err());
    }
}
