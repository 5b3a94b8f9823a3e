//! Cocycle evaluation, coboundary repair, the three-way classification and
//! persistence levels.

use super::{in_filtration_among, require_connected, DataSection, SectionDoc};
use crate::error::{Error, Result};
use crate::joins::program::{self, constrain_close, MeasureExpr, MeasureVars, Slack};
use crate::joins::{face_positions, fill_boundary_min, fill_boundary_strict, FillResult, FillResultDoc, HornProblem};
use crate::lp::{LinearProgram, Solver};
use crate::measures::{closure_up_to, product_tuples, DataComplexGen, DataTable, TableDoc, Tuple};
use crate::rational::{self, Rational};
use crate::schema::Schema;
use crate::simpattr::AttributeList;
use crate::transport;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Tag carried by every coboundary verdict: the repair only searches
/// sections that keep the original tables' faces.
pub const RESTRICTED: &str = "coboundary (restricted search)";

#[derive(Clone, Debug, PartialEq)]
pub struct CellValue {
    pub cell: AttributeList,
    pub trivial: bool,
    pub filler: Option<FillResult>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CocycleReport {
    /// Level of the evaluated cells.
    pub level: usize,
    pub slack: Rational,
    pub values: Vec<CellValue>,
    /// (face, cell, cell) where two section values disagree on a face.
    pub conflicts: Vec<(AttributeList, AttributeList, AttributeList)>,
}

impl CocycleReport {
    pub fn all_trivial(&self) -> bool {
        self.values.iter().all(|v| v.trivial)
    }

    pub fn nontrivial_cells(&self) -> Vec<AttributeList> {
        self.values.iter().filter(|v| !v.trivial).map(|v| v.cell.clone()).collect()
    }

    pub fn to_doc(&self, schema: &Schema) -> Result<CocycleDoc> {
        Ok(CocycleDoc {
            level: self.level,
            slack: rational::fmt(&self.slack),
            cells: self
                .values
                .iter()
                .map(|v| {
                    Ok(CellDoc {
                        cell: v.cell.clone(),
                        value: if v.trivial { "trivial" } else { "nontrivial" },
                        filler: v.filler.as_ref().filter(|f| f.table.is_some()).map(|f| f.to_doc(schema)).transpose()?,
                    })
                })
                .collect::<Result<_>>()?,
            conflicts: self
                .conflicts
                .iter()
                .map(|(f, a, b)| ConflictDoc { face: f.clone(), cells: [a.clone(), b.clone()] })
                .collect(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CellDoc {
    pub cell: AttributeList,
    pub value: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filler: Option<FillResultDoc>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConflictDoc {
    pub face: AttributeList,
    pub cells: [AttributeList; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct CocycleDoc {
    pub level: usize,
    pub slack: String,
    pub cells: Vec<CellDoc>,
    pub conflicts: Vec<ConflictDoc>,
}

fn check_inputs(c: &DataComplexGen, sigma: &DataSection, cells: &[AttributeList], slack: Option<&Rational>) -> Result<()> {
    if let Some(t) = slack {
        if t < &rational::zero() {
            return Err(Error::InvalidArgument(format!("negative slack {t}")));
        }
    }
    require_connected(c)?;
    sigma.check_in(c)?;
    for y in cells {
        if y.len() != sigma.level + 2 {
            return Err(Error::InvalidArgument(format!("cell {y} is not one level above the section")));
        }
        for j in 0..y.len() {
            sigma.get(&y.face(j)?)?;
        }
    }
    Ok(())
}

fn boundary(sigma: &DataSection, y: &AttributeList, slack: &Rational) -> Result<HornProblem> {
    let mut faces = BTreeMap::new();
    for j in 0..y.len() {
        faces.insert(j, sigma.get(&y.face(j)?)?.clone());
    }
    HornProblem::new(y.clone(), faces, slack.clone())
}

/// Decides each cell by filling its boundary at `slack`; fillers are
/// re-checked for membership in the filtration.
pub fn evaluate_cocycle(
    solver: &Solver,
    c: &DataComplexGen,
    sigma: &DataSection,
    cells: &[AttributeList],
    slack: &Rational,
) -> Result<CocycleReport> {
    check_inputs(c, sigma, cells, Some(slack))?;
    let closure = closure_up_to(c, (sigma.level + 2) as i64)?;
    let mut values = Vec::new();
    for y in cells {
        let r = fill_boundary_strict(solver, &c.schema, &boundary(sigma, y, slack)?)?;
        let trivial = r.is_filled();
        if let Some(t) = &r.table {
            if !in_filtration_among(solver, &c.schema, &closure, t, slack)?.member {
                return Err(Error::SolverInvariant(format!("filler of {y} is outside the filtration")));
            }
        }
        values.push(CellValue { cell: y.clone(), trivial, filler: Some(r) });
    }
    Ok(CocycleReport { level: sigma.level + 1, slack: slack.clone(), values, conflicts: sigma.face_conflicts()? })
}

/// Z/2 value of the coboundary of the evaluated cocycle on a cell one level
/// higher; every face of `x` must have been evaluated.
pub fn coboundary_value(report: &CocycleReport, x: &AttributeList) -> Result<bool> {
    let mut odd = false;
    for j in 0..x.len() {
        let f = x.face(j)?;
        let v = report
            .values
            .iter()
            .find(|v| v.cell == f)
            .ok_or_else(|| Error::MissingFace(format!("face {f} of {x} was not evaluated")))?;
        odd ^= !v.trivial;
    }
    Ok(odd)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoboundaryResult {
    pub coboundary: bool,
    /// The modified section (unchanged off the queried cells' faces).
    pub section: Option<DataSection>,
    pub fillers: BTreeMap<AttributeList, DataTable>,
    /// Slack attained by the repair.
    pub slack: Option<Rational>,
}

impl CoboundaryResult {
    fn no() -> Self {
        CoboundaryResult { coboundary: false, section: None, fillers: BTreeMap::new(), slack: None }
    }

    pub fn to_doc(&self, schema: &Schema) -> Result<CoboundaryDoc> {
        Ok(CoboundaryDoc {
            coboundary: self.coboundary,
            search: RESTRICTED,
            slack: self.slack.as_ref().map(rational::fmt),
            modified_section: self.section.as_ref().map(|s| s.to_doc(schema)).transpose()?,
            fillers: self.fillers.values().map(|t| t.to_doc(schema)).collect::<Result<_>>()?,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoboundaryDoc {
    pub coboundary: bool,
    pub search: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modified_section: Option<SectionDoc>,
    pub fillers: Vec<TableDoc>,
}

/// Whether the section can be changed on the queried cells' faces, keeping
/// every table's own faces, so that every queried cell fills at `slack`.
pub fn is_coboundary(
    solver: &Solver,
    c: &DataComplexGen,
    sigma: &DataSection,
    cells: &[AttributeList],
    slack: &Rational,
) -> Result<CoboundaryResult> {
    let report = evaluate_cocycle(solver, c, sigma, cells, slack)?;
    coboundary_after(solver, c, sigma, cells, slack, &report)
}

fn coboundary_after(
    solver: &Solver,
    c: &DataComplexGen,
    sigma: &DataSection,
    cells: &[AttributeList],
    slack: &Rational,
    report: &CocycleReport,
) -> Result<CoboundaryResult> {
    if report.all_trivial() {
        let fillers = report
            .values
            .iter()
            .filter_map(|v| v.filler.as_ref().and_then(|f| f.table.clone()).map(|t| (v.cell.clone(), t)))
            .collect();
        return Ok(CoboundaryResult { coboundary: true, section: Some(sigma.clone()), fillers, slack: Some(slack.clone()) });
    }
    let r = repair(solver, c, sigma, cells, Some(slack))?;
    Ok(r.unwrap_or_else(CoboundaryResult::no))
}

/// One LP over modified face values and per-cell fillers. `slack = None`
/// minimizes the slack.
fn repair(
    solver: &Solver,
    c: &DataComplexGen,
    sigma: &DataSection,
    cells: &[AttributeList],
    slack: Option<&Rational>,
) -> Result<Option<CoboundaryResult>> {
    let schema = &c.schema;
    let n = sigma.level + 1;
    let exact = slack.is_some_and(|t| t.is_zero());
    let mut lp = LinearProgram::new();
    let slack_mode = match slack {
        Some(t) => Slack::fixed(t),
        None => {
            let t = lp.add_var("t");
            lp.set_objective(vec![(t, Rational::one())]);
            Slack::Var(t)
        }
    };

    let needed: BTreeSet<AttributeList> =
        cells.iter().flat_map(|y| (0..y.len()).map(move |j| y.face(j))).collect::<Result<_>>()?;
    let mut modified: BTreeMap<AttributeList, MeasureVars> = BTreeMap::new();
    for (k, z) in needed.iter().enumerate() {
        let orig = sigma.get(z)?;
        let pins: Vec<DataTable> = (0..z.len()).map(|i| orig.marginalize(i)).collect::<Result<_>>()?;
        let tuples = program::supported_tuples(schema, z, &program::supports(pins.iter().enumerate()))?;
        let vars = MeasureVars::new(&mut lp, &format!("s{k}_"), z.clone(), tuples);
        for (i, pin) in pins.iter().enumerate() {
            let metric = schema.product_metric(pin.list())?;
            let lhs = vars.pushforward(&face_positions(z.len(), i));
            constrain_close(&mut lp, &metric, &lhs, &MeasureExpr::constant(pin), &Slack::Exact, "");
        }
        if n == 1 {
            // single attributes have no faces to pin; keep them near the
            // original value instead
            let metric = schema.product_metric(z)?;
            constrain_close(&mut lp, &metric, &vars.whole(), &MeasureExpr::constant(orig), &slack_mode, &format!("m{k}"));
        }
        modified.insert(z.clone(), vars);
    }

    let mut fill_vars = Vec::new();
    for (k, y) in cells.iter().enumerate() {
        let tuples = if exact {
            let sets: Vec<(usize, BTreeSet<Tuple>)> = (0..y.len())
                .map(|j| Ok((j, modified[&y.face(j)?].tuples.iter().cloned().collect())))
                .collect::<Result<_>>()?;
            program::supported_tuples(schema, y, &sets)?
        } else {
            let size = program::product_size(schema, y)?;
            if size > solver.variable_budget {
                return Err(Error::BudgetExceeded { variables: size, constraints: 0, budget: solver.variable_budget });
            }
            product_tuples(schema, y)?
        };
        let tau = MeasureVars::new(&mut lp, &format!("y{k}_"), y.clone(), tuples);
        for j in 0..y.len() {
            let f = y.face(j)?;
            let metric = schema.product_metric(&f)?;
            let lhs = tau.pushforward(&face_positions(y.len(), j));
            constrain_close(&mut lp, &metric, &lhs, &modified[&f].whole(), &slack_mode, &format!("c{k}_{j}"));
        }
        fill_vars.push(tau);
    }

    let res = program::solve(solver, &lp, slack.is_none())?;
    if !res.is_feasible() {
        return Ok(None);
    }
    let bound = match slack {
        Some(t) => t.clone(),
        None => res.optimum.clone().expect("minimize reports its optimum"),
    };
    let mut section = sigma.clone();
    for (z, vars) in &modified {
        section.cells.insert(z.clone(), vars.extract(&res.assignment));
    }
    let fillers: BTreeMap<AttributeList, DataTable> =
        cells.iter().cloned().zip(fill_vars.iter().map(|v| v.extract(&res.assignment))).collect();
    verify_repair(solver, schema, sigma, &section, &modified, &fillers, &bound)?;
    let closure = closure_up_to(c, (n + 1) as i64)?;
    for t in modified.keys().map(|z| &section.cells[z]).chain(fillers.values()) {
        if !in_filtration_among(solver, schema, &closure, t, &bound)?.member {
            return Err(Error::SolverInvariant(format!("repaired table on {} is outside the filtration", t.list())));
        }
    }
    Ok(Some(CoboundaryResult { coboundary: true, section: Some(section), fillers, slack: Some(bound) }))
}

fn verify_repair(
    solver: &Solver,
    schema: &Schema,
    sigma: &DataSection,
    section: &DataSection,
    modified: &BTreeMap<AttributeList, MeasureVars>,
    fillers: &BTreeMap<AttributeList, DataTable>,
    bound: &Rational,
) -> Result<()> {
    let within = |a: &DataTable, b: &DataTable, what: &str| -> Result<()> {
        let d = transport::optimal_coupling_with(solver, schema, a, b)?.0;
        if &d > bound {
            return Err(Error::SolverInvariant(format!("{what} is {} away, above {}", rational::fmt(&d), rational::fmt(bound))));
        }
        Ok(())
    };
    for z in modified.keys() {
        let (old, new) = (&sigma.cells[z], &section.cells[z]);
        for i in 0..z.len() {
            if old.marginalize(i)? != new.marginalize(i)? {
                return Err(Error::SolverInvariant(format!("repair of {z} moved face {i}")));
            }
        }
        if z.len() == 1 {
            within(new, old, &format!("repair of {z}"))?;
        }
    }
    for (y, t) in fillers {
        for j in 0..y.len() {
            within(&t.marginalize(j)?, &section.cells[&y.face(j)?], &format!("face {j} of the filler of {y}"))?;
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrichotomyVerdict {
    /// 1: every cell fills. 2: not 1, but a repaired section fills every
    /// cell. 3: neither.
    pub case: u8,
    pub offending: Vec<AttributeList>,
    pub report: CocycleReport,
    pub repair: Option<CoboundaryResult>,
}

impl TrichotomyVerdict {
    pub fn label(&self) -> &'static str {
        match self.case {
            1 => "cocycle trivial",
            2 => RESTRICTED,
            _ => "not a coboundary (restricted search)",
        }
    }

    pub fn to_doc(&self, schema: &Schema) -> Result<TrichotomyDoc> {
        Ok(TrichotomyDoc {
            case: self.case,
            label: self.label(),
            offending: self.offending.clone(),
            cocycle: self.report.to_doc(schema)?,
            repair: self.repair.as_ref().map(|r| r.to_doc(schema)).transpose()?,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrichotomyDoc {
    pub case: u8,
    pub label: &'static str,
    pub offending: Vec<AttributeList>,
    pub cocycle: CocycleDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repair: Option<CoboundaryDoc>,
}

pub fn classify_trichotomy(
    solver: &Solver,
    c: &DataComplexGen,
    sigma: &DataSection,
    cells: &[AttributeList],
    slack: &Rational,
) -> Result<TrichotomyVerdict> {
    let report = evaluate_cocycle(solver, c, sigma, cells, slack)?;
    let offending = report.nontrivial_cells();
    if offending.is_empty() {
        return Ok(TrichotomyVerdict { case: 1, offending, report, repair: None });
    }
    let repair = coboundary_after(solver, c, sigma, cells, slack, &report)?;
    let case = if repair.coboundary { 2 } else { 3 };
    Ok(TrichotomyVerdict { case, offending, report, repair: Some(repair) })
}

/// Per-cell minimal slack with the filler attaining it.
pub type CellMinimum = (AttributeList, Rational, DataTable);

/// Least slack at which every cell fills, with the per-cell minima.
/// `None` stands for no finite slack.
pub fn persistence_t(
    solver: &Solver,
    c: &DataComplexGen,
    sigma: &DataSection,
    cells: &[AttributeList],
) -> Result<(Option<Rational>, Vec<CellMinimum>)> {
    check_inputs(c, sigma, cells, None)?;
    let mut worst = Rational::zero();
    let mut per_cell = Vec::new();
    for y in cells {
        match fill_boundary_min(solver, &c.schema, &boundary(sigma, y, &Rational::zero())?) {
            Ok((t, filler)) => {
                worst = worst.max(t.clone());
                per_cell.push((y.clone(), t, filler));
            }
            Err(Error::MassMismatch { .. }) => return Ok((None, per_cell)),
            Err(e) => return Err(e),
        }
    }
    Ok((Some(worst), per_cell))
}

/// Least slack at which the restricted repair succeeds.
pub fn persistence_tprime(
    solver: &Solver,
    c: &DataComplexGen,
    sigma: &DataSection,
    cells: &[AttributeList],
) -> Result<(Option<Rational>, Option<CoboundaryResult>)> {
    check_inputs(c, sigma, cells, None)?;
    match repair(solver, c, sigma, cells, None)? {
        Some(r) => Ok((r.slack.clone(), Some(r))),
        None => Ok((None, None)),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PersistenceResult {
    pub t_n: Option<Rational>,
    pub t_prime_n: Option<Rational>,
    pub case_at_0: u8,
    pub per_cell: Vec<CellMinimum>,
    pub repair: Option<CoboundaryResult>,
}

impl PersistenceResult {
    pub fn to_doc(&self, schema: &Schema) -> Result<PersistenceDoc> {
        let inf = |t: &Option<Rational>| t.as_ref().map_or_else(|| "inf".to_string(), rational::fmt);
        Ok(PersistenceDoc {
            t_n: inf(&self.t_n),
            t_prime_n: inf(&self.t_prime_n),
            case_at_0: self.case_at_0,
            search: RESTRICTED,
            cells: self
                .per_cell
                .iter()
                .map(|(y, t, f)| Ok(CellLevelDoc { cell: y.clone(), t: rational::fmt(t), filler: f.to_doc(schema)? }))
                .collect::<Result<_>>()?,
            repair: self.repair.as_ref().map(|r| r.to_doc(schema)).transpose()?,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CellLevelDoc {
    pub cell: AttributeList,
    pub t: String,
    pub filler: TableDoc,
}

#[derive(Clone, Debug, Serialize)]
pub struct PersistenceDoc {
    pub t_n: String,
    pub t_prime_n: String,
    pub case_at_0: u8,
    pub search: &'static str,
    pub cells: Vec<CellLevelDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repair: Option<CoboundaryDoc>,
}

/// Both persistence levels and the classification at slack 0.
pub fn persistence(solver: &Solver, c: &DataComplexGen, sigma: &DataSection, cells: &[AttributeList]) -> Result<PersistenceResult> {
    let (t_n, per_cell) = persistence_t(solver, c, sigma, cells)?;
    let (t_prime_n, repair) = persistence_tprime(solver, c, sigma, cells)?;
    if let (Some(a), Some(b)) = (&t_prime_n, &t_n) {
        if a > b {
            return Err(Error::SolverInvariant("repair level exceeds the cocycle level".into()));
        }
    }
    let case_at_0 = classify_trichotomy(solver, c, sigma, cells, &Rational::zero())?.case;
    Ok(PersistenceResult { t_n, t_prime_n, case_at_0, per_cell, repair })
}
