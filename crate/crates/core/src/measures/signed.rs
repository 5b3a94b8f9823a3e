use super::{DataTable, Tuple};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::simpattr::AttributeList;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

/// A finitely supported signed measure; zero atoms are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedTable {
    list: AttributeList,
    atoms: BTreeMap<Tuple, Rational>,
}

impl SignedTable {
    pub fn list(&self) -> &AttributeList {
        &self.list
    }

    pub fn atoms(&self) -> &BTreeMap<Tuple, Rational> {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn sub(&self, other: &SignedTable) -> Result<SignedTable> {
        if self.list != other.list {
            return Err(Error::ListMismatch(format!("{} vs {}", self.list, other.list)));
        }
        let mut atoms = self.atoms.clone();
        for (x, m) in &other.atoms {
            *atoms.entry(x.clone()).or_insert_with(Rational::zero) -= m;
        }
        atoms.retain(|_, m| !m.is_zero());
        Ok(SignedTable { list: self.list.clone(), atoms })
    }

    pub fn marginalize(&self, i: usize) -> Result<SignedTable> {
        let list = self.list.face(i)?;
        let mut atoms: BTreeMap<Tuple, Rational> = BTreeMap::new();
        for (x, m) in &self.atoms {
            let mut y = x.clone();
            y.remove(i);
            *atoms.entry(y).or_insert_with(Rational::zero) += m;
        }
        atoms.retain(|_, m| !m.is_zero());
        Ok(SignedTable { list, atoms })
    }

    pub fn into_table(self) -> Result<DataTable> {
        if let Some((x, m)) = self.atoms.iter().find(|(_, m)| m.is_negative()) {
            return Err(Error::SolverInvariant(format!("negative mass {m} at {x:?}")));
        }
        Ok(DataTable::from_map(self.list, self.atoms))
    }
}

impl From<&DataTable> for SignedTable {
    fn from(t: &DataTable) -> Self {
        SignedTable { list: t.list.clone(), atoms: t.atoms.clone() }
    }
}
