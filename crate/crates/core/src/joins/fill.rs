//! LP fillers for full boundaries and horns.

use super::program::{self, constrain_close, MeasureExpr, MeasureVars, Slack};
use super::{FillResult, FillStatus, HornProblem};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Solver};
use crate::measures::{product_tuples, DataTable, Tuple};
use crate::rational::{self, Rational};
use crate::schema::Schema;
use crate::simpattr::AttributeList;
use crate::transport;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Positions kept by the `j`-th face of a length-`len` list.
pub(crate) fn face_positions(len: usize, j: usize) -> Vec<usize> {
    (0..len).filter(|&p| p != j).collect()
}

enum Mode {
    Fixed(Rational),
    Minimize,
}

struct Solved {
    table: Option<DataTable>,
    optimum: Option<Rational>,
}

fn common_mass(faces: &BTreeMap<usize, DataTable>) -> Result<Option<Rational>> {
    let mut it = faces.values().map(|t| t.total_mass());
    let Some(m) = it.next() else { return Ok(None) };
    for other in it {
        if other != m {
            return Err(Error::MassMismatch { left: rational::fmt(&m), right: rational::fmt(&other) });
        }
    }
    Ok(Some(m))
}

/// One joint measure on `list`, one coupling per provided face.
fn solve_joint(
    solver: &Solver,
    schema: &Schema,
    list: &AttributeList,
    faces: &BTreeMap<usize, DataTable>,
    mode: Mode,
) -> Result<Solved> {
    schema.check_list(list)?;
    for t in faces.values() {
        t.check(schema)?;
    }
    common_mass(faces)?;
    let exact = matches!(&mode, Mode::Fixed(t) if t.is_zero());
    let tuples: Vec<Tuple> = if exact {
        program::supported_tuples(schema, list, &program::supports(faces.iter().map(|(j, t)| (*j, t))))?
    } else {
        let size = program::product_size(schema, list)?;
        if size > solver.variable_budget {
            return Err(Error::BudgetExceeded { variables: size, constraints: 0, budget: solver.variable_budget });
        }
        product_tuples(schema, list)?
    };
    let mut lp = LinearProgram::new();
    let joint = MeasureVars::new(&mut lp, "x", list.clone(), tuples);
    let slack = match &mode {
        Mode::Fixed(t) => Slack::fixed(t),
        Mode::Minimize => {
            let t = lp.add_var("t");
            lp.set_objective(vec![(t, Rational::one())]);
            Slack::Var(t)
        }
    };
    for (&j, t) in faces {
        let keep = face_positions(list.len(), j);
        let face_list = list.face(j)?;
        let face_metric = schema.product_metric(&face_list)?;
        constrain_close(&mut lp, &face_metric, &joint.pushforward(&keep), &MeasureExpr::constant(t), &slack, &format!("f{j}"));
    }
    let res = program::solve(solver, &lp, matches!(mode, Mode::Minimize))?;
    if !res.is_feasible() {
        return Ok(Solved { table: None, optimum: None });
    }
    Ok(Solved { table: Some(joint.extract(&res.assignment)), optimum: res.optimum })
}

/// Distances from each provided face to the filler's face, checked against
/// `bound`.
fn achieved(
    solver: &Solver,
    schema: &Schema,
    table: &DataTable,
    faces: &BTreeMap<usize, DataTable>,
    bound: &Rational,
) -> Result<Vec<(usize, Rational)>> {
    let mut out = Vec::new();
    for (&j, t) in faces {
        let d = transport::optimal_coupling_with(solver, schema, &table.marginalize(j)?, t)?.0;
        if &d > bound {
            return Err(Error::SolverInvariant(format!(
                "face {j} is {} away from its target, above {}",
                rational::fmt(&d),
                rational::fmt(bound)
            )));
        }
        out.push((j, d));
    }
    Ok(out)
}

fn finish(solver: &Solver, schema: &Schema, h: &HornProblem, bound: &Rational, table: Option<DataTable>) -> Result<FillResult> {
    let Some(table) = table else { return Ok(FillResult::infeasible()) };
    let achieved_slacks = achieved(solver, schema, &table, &h.faces, bound)?;
    Ok(FillResult { status: FillStatus::Filled, table: Some(table), achieved_slacks, note: None })
}

/// Whether some table on the full list has every face within `h.slack` of
/// the given one.
pub fn fill_boundary(solver: &Solver, schema: &Schema, h: &HornProblem) -> Result<FillResult> {
    match fill_boundary_strict(solver, schema, h) {
        Err(e @ Error::BudgetExceeded { .. }) => Ok(FillResult::over_budget(&e)),
        r => r,
    }
}

/// As [`fill_boundary`], with budget overruns as errors.
pub(crate) fn fill_boundary_strict(solver: &Solver, schema: &Schema, h: &HornProblem) -> Result<FillResult> {
    if h.faces.len() != h.full_list.len() {
        return Err(Error::MissingFace("a boundary needs every face".into()));
    }
    let s = solve_joint(solver, schema, &h.full_list, &h.faces, Mode::Fixed(h.slack.clone()))?;
    finish(solver, schema, h, &h.slack, s.table)
}

/// The least slack at which the boundary fills, with a filler attaining it.
pub fn fill_boundary_min(solver: &Solver, schema: &Schema, h: &HornProblem) -> Result<(Rational, DataTable)> {
    if h.faces.len() != h.full_list.len() {
        return Err(Error::MissingFace("a boundary needs every face".into()));
    }
    let s = solve_joint(solver, schema, &h.full_list, &h.faces, Mode::Minimize)?;
    match (s.optimum, s.table) {
        (Some(t), Some(table)) => {
            achieved(solver, schema, &table, &h.faces, &t)?;
            Ok((t, table))
        }
        _ => Err(Error::SolverInvariant("equal-mass boundaries always admit a slack filler".into())),
    }
}

/// Fills a horn with one face absent. At slack 0 the provided faces must
/// be exactly compatible and are reproduced exactly.
pub fn fill_horn_lp(solver: &Solver, schema: &Schema, h: &HornProblem) -> Result<FillResult> {
    if h.missing().is_none() {
        return Err(Error::InvalidArgument("a horn has exactly one absent face".into()));
    }
    if h.dim() == 0 {
        return Err(Error::InvalidArgument("a 0-horn carries no mass to fill with".into()));
    }
    if h.slack.is_zero() {
        h.check_compatible()?;
    }
    match solve_joint(solver, schema, &h.full_list, &h.faces, Mode::Fixed(h.slack.clone())) {
        Ok(s) => {
            let r = finish(solver, schema, h, &h.slack, s.table)?;
            if h.slack.is_zero() && r.status == FillStatus::Infeasible {
                return Err(Error::SolverInvariant("an exactly compatible horn failed to fill".into()));
            }
            Ok(r)
        }
        Err(e @ Error::BudgetExceeded { .. }) => Ok(FillResult::over_budget(&e)),
        Err(e) => Err(e),
    }
}
