//! Data tables: finitely supported measures on the product of a list's
//! value spaces.
//!
//! Tuples store point indices into each position's value space; labels
//! only appear at the JSON boundary ([`TableDoc`]).

mod chain;
mod complex;
mod signed;

pub use chain::{boundary_table_chain, TableChain2};
pub use complex::{
    closure_up_to, is_path_connected, is_well_aligned, AlignmentFailure, Connectivity, DataComplexGen,
    WellAligned,
};
pub use signed::SignedTable;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::schema::Schema;
use crate::simpattr::{check_permutation, AttributeInclusion, AttributeList};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type Tuple = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DataTable {
    list: AttributeList,
    atoms: BTreeMap<Tuple, Rational>,
}

impl DataTable {
    /// Accumulates repeated tuples and drops zero atoms. Negative masses and
    /// tuples of the wrong length are rejected.
    pub fn new(list: AttributeList, atoms: impl IntoIterator<Item = (Tuple, Rational)>) -> Result<Self> {
        let mut map: BTreeMap<Tuple, Rational> = BTreeMap::new();
        for (x, m) in atoms {
            if x.len() != list.len() {
                return Err(Error::ListMismatch(format!("tuple {x:?} has wrong length for {list}")));
            }
            if m.is_negative() {
                return Err(Error::Schema(format!("negative mass {m} at {x:?}")));
            }
            *map.entry(x).or_insert_with(Rational::zero) += m;
        }
        map.retain(|_, m| !m.is_zero());
        Ok(DataTable { list, atoms: map })
    }

    pub(crate) fn from_map(list: AttributeList, mut atoms: BTreeMap<Tuple, Rational>) -> Self {
        atoms.retain(|_, m| !m.is_zero());
        debug_assert!(atoms.iter().all(|(x, m)| x.len() == list.len() && m.is_positive()));
        DataTable { list, atoms }
    }

    /// The table on the empty list carrying mass `m`.
    pub fn trivial(m: Rational) -> Self {
        Self::from_map(AttributeList::empty(), BTreeMap::from([(Vec::new(), m)]))
    }

    pub fn empty(list: AttributeList) -> Self {
        DataTable { list, atoms: BTreeMap::new() }
    }

    pub fn list(&self) -> &AttributeList {
        &self.list
    }

    pub fn atoms(&self) -> &BTreeMap<Tuple, Rational> {
        &self.atoms
    }

    pub fn mass_at(&self, x: &[usize]) -> Rational {
        self.atoms.get(x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_mass(&self) -> Rational {
        self.atoms.values().sum()
    }

    /// Checks every tuple entry against the schema's value spaces.
    pub fn check(&self, schema: &Schema) -> Result<()> {
        let spaces = schema.spaces_for(&self.list)?;
        for x in self.atoms.keys() {
            for (i, (&v, s)) in x.iter().zip(&spaces).enumerate() {
                if v >= s.len() {
                    return Err(Error::Schema(format!("position {i} value {v} outside space {}", s.id)));
                }
            }
        }
        Ok(())
    }

    /// Pushes the measure forward along `x ↦ (x[p] for p in positions)`.
    pub fn project(&self, positions: &[usize], list: AttributeList) -> DataTable {
        let mut out: BTreeMap<Tuple, Rational> = BTreeMap::new();
        for (x, m) in &self.atoms {
            let y: Tuple = positions.iter().map(|&p| x[p]).collect();
            *out.entry(y).or_insert_with(Rational::zero) += m;
        }
        Self::from_map(list, out)
    }

    pub fn marginalize(&self, i: usize) -> Result<DataTable> {
        let list = self.list.face(i)?;
        let keep: Vec<usize> = (0..self.list.len()).filter(|&p| p != i).collect();
        Ok(self.project(&keep, list))
    }

    pub fn diagonal(&self, i: usize) -> Result<DataTable> {
        let list = self.list.degeneracy(i)?;
        let atoms = self
            .atoms
            .iter()
            .map(|(x, m)| {
                let mut y = x.clone();
                y.insert(i, x[i]);
                (y, m.clone())
            })
            .collect();
        Ok(Self::from_map(list, atoms))
    }

    pub fn reduce(&self, iota: &AttributeInclusion) -> Result<DataTable> {
        if iota.target != self.list {
            return Err(Error::InvalidInclusion(format!("targets {} but table is on {}", iota.target, self.list)));
        }
        iota.validate()?;
        Ok(self.project(&iota.map, iota.source.clone()))
    }

    /// Entry `i` of every new tuple is entry `perm[i]` of the old one.
    pub fn permute(&self, perm: &[usize]) -> Result<DataTable> {
        check_permutation(perm, self.list.len())?;
        Ok(self.project(perm, self.list.permute(perm)?))
    }

    pub fn scale(&self, k: &Rational) -> DataTable {
        Self::from_map(self.list.clone(), self.atoms.iter().map(|(x, m)| (x.clone(), m * k)).collect())
    }

    pub fn to_doc(&self, schema: &Schema) -> Result<TableDoc> {
        let spaces = schema.spaces_for(&self.list)?;
        let atoms = self
            .atoms
            .iter()
            .map(|(x, m)| AtomDoc {
                tuple: x.iter().zip(&spaces).map(|(&v, s)| s.points[v].clone()).collect(),
                mass: serde_json::Value::String(rational::fmt(m)),
            })
            .collect();
        Ok(TableDoc { list: self.list.clone(), atoms })
    }

    pub fn from_doc(schema: &Schema, doc: &TableDoc) -> Result<DataTable> {
        let spaces = schema.spaces_for(&doc.list)?;
        let mut atoms = Vec::new();
        for (k, a) in doc.atoms.iter().enumerate() {
            if a.tuple.len() != spaces.len() {
                return Err(Error::ListMismatch(format!("atoms[{k}].tuple has {} entries for {}", a.tuple.len(), doc.list)));
            }
            let mut x = Vec::with_capacity(spaces.len());
            for (label, s) in a.tuple.iter().zip(&spaces) {
                x.push(
                    s.label_index(label)
                        .ok_or_else(|| Error::Schema(format!("atoms[{k}]: label {label:?} not in space {}", s.id)))?,
                );
            }
            let m = rational::from_json(&a.mass).map_err(|e| Error::Schema(format!("atoms[{k}].mass: {e}")))?;
            atoms.push((x, m));
        }
        DataTable::new(doc.list.clone(), atoms)
    }
}

pub fn total_mass(t: &DataTable) -> Rational {
    t.total_mass()
}

pub fn marginalize(t: &DataTable, i: usize) -> Result<DataTable> {
    t.marginalize(i)
}

pub fn diagonal(t: &DataTable, i: usize) -> Result<DataTable> {
    t.diagonal(i)
}

pub fn reduce(t: &DataTable, iota: &AttributeInclusion) -> Result<DataTable> {
    t.reduce(iota)
}

pub fn permute(t: &DataTable, perm: &[usize]) -> Result<DataTable> {
    t.permute(perm)
}

/// `(T1 ⊕ T2, τ1 τ2 / M)` for tables of common mass `M > 0`.
pub fn independent_product(t1: &DataTable, t2: &DataTable) -> Result<DataTable> {
    let m = t1.total_mass();
    if m != t2.total_mass() {
        return Err(Error::MassMismatch { left: rational::fmt(&m), right: rational::fmt(&t2.total_mass()) });
    }
    if m.is_zero() {
        return Err(Error::ZeroMass);
    }
    let mut atoms = BTreeMap::new();
    for (x, a) in &t1.atoms {
        for (y, b) in &t2.atoms {
            let mut xy = x.clone();
            xy.extend_from_slice(y);
            atoms.insert(xy, a * b / &m);
        }
    }
    Ok(DataTable::from_map(t1.list.concat(&t2.list), atoms))
}

/// Every tuple of the product space of `list`, in lexicographic order.
pub fn product_tuples(schema: &Schema, list: &AttributeList) -> Result<Vec<Tuple>> {
    let sizes: Vec<usize> = schema.spaces_for(list)?.iter().map(|s| s.len()).collect();
    let mut out = vec![Vec::new()];
    for &k in &sizes {
        out = out
            .into_iter()
            .flat_map(|x: Tuple| {
                (0..k).map(move |v| {
                    let mut y = x.clone();
                    y.push(v);
                    y
                })
            })
            .collect();
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDoc {
    pub list: AttributeList,
    pub atoms: Vec<AtomDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDoc {
    pub tuple: Vec<String>,
    pub mass: serde_json::Value,
}
