use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Principal,
    Ancilla,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Register {
    pub id: String,
    pub party: String,
    pub dim: usize,
    pub role: Role,
}

impl Register {
    pub fn principal(id: &str, party: &str, dim: usize) -> Self {
        Register {
            id: id.to_owned(),
            party: party.to_owned(),
            dim,
            role: Role::Principal,
        }
    }

    pub fn ancilla(id: &str, party: &str, dim: usize) -> Self {
        Register {
            id: id.to_owned(),
            party: party.to_owned(),
            dim,
            role: Role::Ancilla,
        }
    }
}

/// Ordered registers of a composite system. Digits of a basis tuple follow
/// this order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct SystemLayout {
    registers: Vec<Register>,
}

/// Largest register dimension; tuples store one byte per register.
pub const MAX_REGISTER_DIM: usize = u8::MAX as usize;

impl SystemLayout {
    pub fn new(registers: Vec<Register>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for r in &registers {
            if !seen.insert(r.id.as_str()) {
                return Err(Error::DuplicateRegister(r.id.clone()));
            }
            if r.dim == 0 || r.dim > MAX_REGISTER_DIM {
                return Err(Error::InvalidRegister {
                    id: r.id.clone(),
                    reason: format!("dimension {} outside 1..={MAX_REGISTER_DIM}", r.dim),
                });
            }
            if r.party.is_empty() || r.id.is_empty() {
                return Err(Error::InvalidRegister {
                    id: r.id.clone(),
                    reason: "empty register id or party".into(),
                });
            }
        }
        Ok(SystemLayout { registers })
    }

    pub fn empty() -> Self {
        SystemLayout { registers: vec![] }
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn len(&self) -> usize {
        self.registers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registers.is_empty()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.registers.iter().position(|r| r.id == id)
    }

    pub fn register(&self, id: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.id == id)
    }

    pub fn require(&self, id: &str) -> Result<(usize, &Register)> {
        self.registers
            .iter()
            .enumerate()
            .find(|(_, r)| r.id == id)
            .ok_or_else(|| Error::RegisterNotFound(id.to_owned()))
    }

    pub fn total_dim(&self) -> usize {
        self.registers.iter().map(|r| r.dim).product()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.registers.iter().map(|r| r.dim).collect()
    }

    pub fn ids(&self) -> Vec<String> {
        self.registers.iter().map(|r| r.id.clone()).collect()
    }

    /// Parties in order of first appearance.
    pub fn parties(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.registers {
            if !out.contains(&r.party) {
                out.push(r.party.clone());
            }
        }
        out
    }

    pub fn registers_of(&self, party: &str) -> Vec<&Register> {
        self.registers.iter().filter(|r| r.party == party).collect()
    }

    pub fn has_ancilla(&self) -> bool {
        self.registers.iter().any(|r| r.role == Role::Ancilla)
    }

    pub fn concat(&self, other: &SystemLayout) -> Result<Self> {
        let mut regs = self.registers.clone();
        regs.extend(other.registers.iter().cloned());
        SystemLayout::new(regs)
    }

    /// Sub-layout with the given register ids, in the given order.
    pub fn select(&self, ids: &[String]) -> Result<Self> {
        let regs = ids
            .iter()
            .map(|id| self.require(id).map(|(_, r)| r.clone()))
            .collect::<Result<Vec<_>>>()?;
        SystemLayout::new(regs)
    }
}

impl<'de> Deserialize<'de> for SystemLayout {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let regs = Vec::<Register>::deserialize(d)?;
        SystemLayout::new(regs).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_ids_and_zero_dims() {
        let a = Register::principal("A", "Alice", 4);
        assert_eq!(
            SystemLayout::new(vec![a.clone(), a.clone()]),
            Err(Error::DuplicateRegister("A".into()))
        );
        assert!(SystemLayout::new(vec![Register::principal("A", "Alice", 0)]).is_err());
    }

    #[test]
    fn total_dimension_and_parties() {
        let l = SystemLayout::new(vec![
            Register::principal("A", "Alice", 4),
            Register::principal("B", "Bob", 5),
            Register::ancilla("a", "Alice", 5),
        ])
        .unwrap();
        assert_eq!(l.total_dim(), 100);
        assert_eq!(l.parties(), vec!["Alice", "Bob"]);
        assert_eq!(l.registers_of("Alice").len(), 2);
        assert!(SystemLayout::empty().total_dim() == 1);
    }
}
