//! Joins of tables along shared attributes, and horn/boundary filling.

mod constructive;
mod fill;
pub(crate) mod program;

pub use constructive::fill_horn_constructive;
pub use fill::{fill_boundary, fill_boundary_min, fill_horn_lp};
pub(crate) use fill::{face_positions, fill_boundary_strict};

use crate::error::{Error, Result};
use crate::measures::{DataTable, TableDoc, Tuple};
use crate::rational::{self, Rational};
use crate::schema::Schema;
use crate::simpattr::{merge_lists, AttributeInclusion, AttributeList};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Two tables and inclusions of a common overlap list into each.
#[derive(Clone, Debug, PartialEq)]
pub struct JoinProblem {
    pub t01: DataTable,
    pub t02: DataTable,
    pub i01: AttributeInclusion,
    pub i02: AttributeInclusion,
}

impl JoinProblem {
    pub fn new(t01: DataTable, t02: DataTable, i01: AttributeInclusion, i02: AttributeInclusion) -> Result<Self> {
        let p = JoinProblem { t01, t02, i01, i02 };
        p.validate()?;
        Ok(p)
    }

    /// Overlap given as index maps; the shared list is read off `t01`.
    pub fn from_maps(t01: DataTable, t02: DataTable, m01: Vec<usize>, m02: Vec<usize>) -> Result<Self> {
        let i01 = AttributeInclusion::from_map(t01.list(), m01)?;
        let i02 = AttributeInclusion::from_map(t02.list(), m02)?;
        Self::new(t01, t02, i01, i02)
    }

    pub fn validate(&self) -> Result<()> {
        self.i01.validate()?;
        self.i02.validate()?;
        if &self.i01.target != self.t01.list() || &self.i02.target != self.t02.list() {
            return Err(Error::InvalidInclusion("overlap inclusions must target the two tables".into()));
        }
        if self.i01.source != self.i02.source {
            return Err(Error::InvalidInclusion(format!(
                "overlap lists differ: {} vs {}",
                self.i01.source, self.i02.source
            )));
        }
        Ok(())
    }
}

pub fn overlap_consistent(p: &JoinProblem) -> Result<bool> {
    p.validate()?;
    Ok(p.t01.reduce(&p.i01)? == p.t02.reduce(&p.i02)?)
}

/// The conditional product on the merged list:
/// `τ01(u0,u1) · τ02(u0,u2) / τ0(u0)`.
pub fn conditional_glue(p: &JoinProblem) -> Result<DataTable> {
    p.validate()?;
    let tau0 = p.t01.reduce(&p.i01)?;
    if tau0 != p.t02.reduce(&p.i02)? {
        return Err(Error::InconsistentOverlap);
    }
    let m = merge_lists(p.t01.list(), p.t02.list(), &p.i01, &p.i02)?;
    fn group<'a>(t: &'a DataTable, map: &[usize]) -> BTreeMap<Tuple, Vec<(&'a Tuple, &'a Rational)>> {
        let mut g: BTreeMap<Tuple, Vec<(&Tuple, &Rational)>> = BTreeMap::new();
        for (x, w) in t.atoms() {
            g.entry(map.iter().map(|&i| x[i]).collect()).or_default().push((x, w));
        }
        g
    }
    let g1 = group(&p.t01, &p.i01.map);
    let g2 = group(&p.t02, &p.i02.map);
    let mut atoms = Vec::new();
    for (u0, m0) in tau0.atoms() {
        for (x1, w1) in &g1[u0] {
            for (x2, w2) in &g2[u0] {
                let mut z = vec![0; m.merged.len()];
                for (p, &v) in x1.iter().enumerate() {
                    z[m.mu01.map[p]] = v;
                }
                for (p, &v) in x2.iter().enumerate() {
                    z[m.mu02.map[p]] = v;
                }
                atoms.push((z, *w1 * *w2 / m0));
            }
        }
    }
    DataTable::new(m.merged, atoms)
}

/// Nonemptiness of the join space, with the conditional product as witness.
pub fn joins_feasible(p: &JoinProblem) -> Result<(bool, Option<DataTable>)> {
    if !overlap_consistent(p)? {
        return Ok((false, None));
    }
    Ok((true, Some(conditional_glue(p)?)))
}

/// Faces of an `n`-cell, keyed by face index; at most one index is absent.
#[derive(Clone, Debug, PartialEq)]
pub struct HornProblem {
    pub full_list: AttributeList,
    pub faces: BTreeMap<usize, DataTable>,
    pub slack: Rational,
}

impl HornProblem {
    pub fn new(full_list: AttributeList, faces: BTreeMap<usize, DataTable>, slack: Rational) -> Result<Self> {
        let h = HornProblem { full_list, faces, slack };
        h.check_lists()?;
        Ok(h)
    }

    /// All faces of a table except `missing` (if any).
    pub fn from_table(t: &DataTable, missing: Option<usize>) -> Result<Self> {
        let mut faces = BTreeMap::new();
        for j in 0..t.list().len() {
            if Some(j) != missing {
                faces.insert(j, t.marginalize(j)?);
            }
        }
        Self::new(t.list().clone(), faces, Rational::from_integer(0.into()))
    }

    pub fn dim(&self) -> usize {
        self.full_list.len().saturating_sub(1)
    }

    /// The absent face index, if exactly one is absent.
    pub fn missing(&self) -> Option<usize> {
        let absent: Vec<usize> = (0..self.full_list.len()).filter(|j| !self.faces.contains_key(j)).collect();
        (absent.len() == 1).then(|| absent[0])
    }

    fn check_lists(&self) -> Result<()> {
        if self.full_list.is_empty() {
            return Err(Error::InvalidArgument("a horn needs a nonempty list".into()));
        }
        for (&j, t) in &self.faces {
            let want = self.full_list.face(j)?;
            if t.list() != &want {
                return Err(Error::ListMismatch(format!("face {j} is on {} but should be on {want}", t.list())));
            }
        }
        let absent = (0..self.full_list.len()).filter(|j| !self.faces.contains_key(j)).count();
        if absent > 1 {
            return Err(Error::MissingFace(format!("{absent} faces absent; at most one may be")));
        }
        Ok(())
    }

    /// `d_i τ_ĵ = d_{j-1} τ_î` for every provided pair `i < j`.
    pub fn check_compatible(&self) -> Result<()> {
        self.check_lists()?;
        for (&i, ti) in &self.faces {
            for (&j, tj) in self.faces.range(i + 1..) {
                if tj.marginalize(i)? != ti.marginalize(j - 1)? {
                    return Err(Error::IncompatibleHorn(format!("faces {i} and {j} disagree on their shared face")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FillStatus {
    Filled,
    Infeasible,
    BudgetExceeded,
    /// The constructive route could not proceed; the table comes from the
    /// LP filler instead.
    Fallback,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FillResult {
    pub status: FillStatus,
    pub table: Option<DataTable>,
    /// Wasserstein distance from each provided face to the filler's face.
    pub achieved_slacks: Vec<(usize, Rational)>,
    pub note: Option<String>,
}

impl FillResult {
    pub fn is_filled(&self) -> bool {
        matches!(self.status, FillStatus::Filled | FillStatus::Fallback) && self.table.is_some()
    }

    pub(crate) fn infeasible() -> Self {
        FillResult { status: FillStatus::Infeasible, table: None, achieved_slacks: Vec::new(), note: None }
    }

    pub(crate) fn over_budget(e: &Error) -> Self {
        FillResult { status: FillStatus::BudgetExceeded, table: None, achieved_slacks: Vec::new(), note: Some(e.to_string()) }
    }

    pub fn to_doc(&self, schema: &Schema) -> Result<FillResultDoc> {
        Ok(FillResultDoc {
            status: self.status,
            table: self.table.as_ref().map(|t| t.to_doc(schema)).transpose()?,
            achieved_slacks: self
                .achieved_slacks
                .iter()
                .map(|(j, d)| FaceSlack { face: *j, distance: rational::fmt(d) })
                .collect(),
            note: self.note.clone(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FaceSlack {
    pub face: usize,
    pub distance: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FillResultDoc {
    pub status: FillStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<TableDoc>,
    pub achieved_slacks: Vec<FaceSlack>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HornFaceDoc {
    pub index: usize,
    pub table: TableDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HornProblemDoc {
    pub list: AttributeList,
    pub faces: Vec<HornFaceDoc>,
    #[serde(default = "zero_slack")]
    pub slack: serde_json::Value,
}

fn zero_slack() -> serde_json::Value {
    serde_json::Value::String("0".into())
}

impl HornProblemDoc {
    pub fn into_problem(self, schema: &Schema) -> Result<HornProblem> {
        let mut faces = BTreeMap::new();
        for f in &self.faces {
            faces.insert(f.index, DataTable::from_doc(schema, &f.table)?);
        }
        let slack = rational::from_json(&self.slack).map_err(Error::InvalidArgument)?;
        HornProblem::new(self.list, faces, slack)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JoinProblemDoc {
    pub t01: TableDoc,
    pub t02: TableDoc,
    pub i01: Vec<usize>,
    pub i02: Vec<usize>,
}

impl JoinProblemDoc {
    pub fn into_problem(self, schema: &Schema) -> Result<JoinProblem> {
        JoinProblem::from_maps(DataTable::from_doc(schema, &self.t01)?, DataTable::from_doc(schema, &self.t02)?, self.i01, self.i02)
    }
}
