//! Approximate-join filtrations and the obstruction to extending a data
//! section one level up.
//!
//! A cell is trivial at slack `t` when the tables the section puts on its
//! faces admit a common table whose faces are each within `t` of them.
//! Coefficients are Z/2, so a cocycle is just the set of nontrivial cells.

mod cocycle;

pub use cocycle::{
    classify_trichotomy, coboundary_value, evaluate_cocycle, is_coboundary, persistence, persistence_t,
    persistence_tprime, CellValue, CoboundaryDoc, CoboundaryResult, CocycleDoc, CocycleReport, PersistenceDoc,
    PersistenceResult, TrichotomyDoc, TrichotomyVerdict, RESTRICTED,
};

use crate::error::{Error, Result};
use crate::lp::Solver;
use crate::measures::{closure_up_to, is_path_connected, DataComplexGen, DataTable, TableDoc};
use crate::rational::{self, Rational};
use crate::schema::Schema;
use crate::simpattr::{all_inclusions, AttributeList};
use crate::transport;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Tables assigned to attribute lists of a single length.
#[derive(Clone, Debug, PartialEq)]
pub struct DataSection {
    /// Length of every cell minus one.
    pub level: usize,
    pub cells: BTreeMap<AttributeList, DataTable>,
}

impl DataSection {
    /// Each table must sit on the list it is assigned to.
    pub fn new(level: usize, cells: BTreeMap<AttributeList, DataTable>) -> Result<Self> {
        for (l, t) in &cells {
            if l.len() != level + 1 {
                return Err(Error::NotNatural(format!("cell {l} is not at level {level}")));
            }
            if t.list() != l {
                return Err(Error::NotNatural(format!("cell {l} carries a table on {}", t.list())));
            }
        }
        Ok(DataSection { level, cells })
    }

    /// The section given by a collection of tables, one per list.
    pub fn from_tables(level: usize, tables: impl IntoIterator<Item = DataTable>) -> Result<Self> {
        let mut cells = BTreeMap::new();
        for t in tables {
            let l = t.list().clone();
            if cells.insert(l.clone(), t).is_some() {
                return Err(Error::NotNatural(format!("two tables on {l}")));
            }
        }
        Self::new(level, cells)
    }

    pub fn get(&self, l: &AttributeList) -> Result<&DataTable> {
        self.cells.get(l).ok_or_else(|| Error::MissingFace(format!("the section has no value on {l}")))
    }

    /// Pairs of cells whose tables disagree on a shared face list.
    pub fn face_conflicts(&self) -> Result<Vec<(AttributeList, AttributeList, AttributeList)>> {
        let mut by_face: BTreeMap<AttributeList, Vec<(&AttributeList, DataTable)>> = BTreeMap::new();
        for (l, t) in &self.cells {
            for j in 0..l.len() {
                by_face.entry(l.face(j)?).or_default().push((l, t.marginalize(j)?));
            }
        }
        let mut out = Vec::new();
        for (f, vals) in by_face {
            for (a, (la, ta)) in vals.iter().enumerate() {
                for (lb, tb) in &vals[a + 1..] {
                    if ta != tb && *la != *lb {
                        out.push((f.clone(), (*la).clone(), (*lb).clone()));
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Every value must be a table of the complex.
    pub fn check_in(&self, c: &DataComplexGen) -> Result<()> {
        let closure = closure_up_to(c, (self.level + 1) as i64)?;
        for (l, t) in &self.cells {
            t.check(&c.schema)?;
            if !closure.contains(t) {
                return Err(Error::NotNatural(format!("the value on {l} is not a table of the complex")));
            }
        }
        Ok(())
    }

    pub fn to_doc(&self, schema: &Schema) -> Result<SectionDoc> {
        Ok(SectionDoc {
            level: self.level,
            cells: self.cells.values().map(|t| t.to_doc(schema)).collect::<Result<_>>()?,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SectionDoc {
    pub level: usize,
    pub cells: Vec<TableDoc>,
}

/// Level-`level` cells without repeated attributes whose faces are all in
/// the section's domain.
pub fn default_cells(sigma: &DataSection) -> Result<Vec<AttributeList>> {
    let attrs: BTreeSet<&String> = sigma.cells.keys().flat_map(|l| l.entries()).collect();
    let mut out = BTreeSet::new();
    for z in sigma.cells.keys() {
        for a in &attrs {
            let y = AttributeList::new(z.entries().iter().cloned().chain([(*a).clone()]));
            if y.has_repeats() {
                continue;
            }
            let mut all = true;
            for j in 0..y.len() {
                all &= sigma.cells.contains_key(&y.face(j)?);
            }
            if all {
                out.insert(y);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// A closure table and the inclusion under which `t` reduces to within the
/// slack of it.
#[derive(Clone, Debug, PartialEq)]
pub struct FiltrationWitness {
    pub table: DataTable,
    pub map: Vec<usize>,
    pub distance: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// Witness for each covered position of `t.list`.
    pub witnesses: BTreeMap<usize, FiltrationWitness>,
}

/// Whether every position of `t` is covered by some sublist on which `t`
/// reduces to within `slack` of a table of the complex.
pub fn in_filtration(solver: &Solver, c: &DataComplexGen, t: &DataTable, slack: &Rational) -> Result<Membership> {
    let closure = closure_up_to(c, t.list().len() as i64)?;
    in_filtration_among(solver, &c.schema, &closure, t, slack)
}

pub(crate) fn in_filtration_among(
    solver: &Solver,
    schema: &Schema,
    closure: &BTreeSet<DataTable>,
    t: &DataTable,
    slack: &Rational,
) -> Result<Membership> {
    if slack < &rational::zero() {
        return Err(Error::InvalidArgument(format!("negative slack {slack}")));
    }
    t.check(schema)?;
    let n = t.list().len();
    let mass = t.total_mass();
    let mut witnesses = BTreeMap::new();
    for s in closure {
        if witnesses.len() == n {
            break;
        }
        // tables of other mass are never within finite distance
        if s.list().is_empty() || s.total_mass() != mass {
            continue;
        }
        for iota in all_inclusions(s.list(), t.list()) {
            if iota.map.iter().all(|p| witnesses.contains_key(p)) {
                continue;
            }
            let (d, _) = transport::optimal_coupling_with(solver, schema, &t.reduce(&iota)?, s)?;
            if &d <= slack {
                for &p in &iota.map {
                    witnesses.entry(p).or_insert_with(|| FiltrationWitness {
                        table: s.clone(),
                        map: iota.map.clone(),
                        distance: d.clone(),
                    });
                }
            }
        }
    }
    Ok(Membership { member: witnesses.len() == n, witnesses })
}

fn require_connected(c: &DataComplexGen) -> Result<()> {
    let conn = is_path_connected(c)?;
    if conn.connected {
        Ok(())
    } else {
        Err(Error::NotPathConnected(conn.components))
    }
}

#[cfg(test)]
mod tests;
