//! Horn filling by explicit construction: glue two faces along their common
//! face, then repair the remaining faces one at a time by subtracting a
//! product of a correction weight with the face error.

use super::fill::{face_positions, fill_horn_lp};
use super::{conditional_glue, FillResult, FillStatus, HornProblem, JoinProblem};
use crate::error::{Error, Result};
use crate::lp::Solver;
use crate::measures::{DataTable, Tuple};
use crate::rational::Rational;
use crate::schema::Schema;
use crate::simpattr::{invert_permutation, AttributeInclusion};
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

enum Built {
    Table(DataTable),
    Stuck(String),
}

/// Reindexes a horn along `perm` (new position `i` holds old position
/// `perm[i]`).
fn permute_horn(h: &HornProblem, perm: &[usize]) -> Result<HornProblem> {
    let list = h.full_list.permute(perm)?;
    let mut faces = BTreeMap::new();
    for i in 0..perm.len() {
        let Some(t) = h.faces.get(&perm[i]) else { continue };
        let dropped = perm[i];
        let q: Vec<usize> = face_positions(perm.len(), i)
            .into_iter()
            .map(|r| perm[r] - usize::from(perm[r] > dropped))
            .collect();
        faces.insert(i, t.permute(&q)?);
    }
    HornProblem::new(list, faces, h.slack.clone())
}

/// Builds the filler when face 0 is the absent one.
fn build(h: &HornProblem) -> Result<Built> {
    let n = h.dim();
    let list = &h.full_list;
    if n == 1 {
        let base = &h.faces[&1];
        let atoms = base.atoms().iter().map(|(x, m)| (vec![x[0], 0], m.clone()));
        return Ok(Built::Table(DataTable::new(list.clone(), atoms)?));
    }
    let overlap: Vec<usize> = (0..n - 1).collect();
    let p = JoinProblem::new(
        h.faces[&n].clone(),
        h.faces[&(n - 1)].clone(),
        AttributeInclusion::from_map(h.faces[&n].list(), overlap.clone())?,
        AttributeInclusion::from_map(h.faces[&(n - 1)].list(), overlap)?,
    )?;
    let mut tau = conditional_glue(&p)?;
    debug_assert_eq!(tau.list(), list);

    for m in (2..n).rev() {
        let j = m - 1;
        let target = &h.faces[&j];
        let current = tau.marginalize(j)?;
        let mut eps: BTreeMap<Tuple, Rational> = current.atoms().clone();
        for (y, w) in target.atoms() {
            *eps.entry(y.clone()).or_insert_with(Rational::zero) -= w;
        }
        eps.retain(|_, e| !e.is_zero());
        if eps.is_empty() {
            continue;
        }
        // f(u): the largest weight on value u that keeps τ - f(u)·ε
        // nonnegative at every atom where ε is positive
        let mut f: BTreeMap<usize, Option<Rational>> = BTreeMap::new();
        let values: std::collections::BTreeSet<usize> = tau.atoms().keys().map(|x| x[j]).collect();
        for &u in &values {
            let mut best: Option<Rational> = None;
            for (y, e) in eps.iter().filter(|(_, e)| e.is_positive()) {
                let mut x = y.clone();
                x.insert(j, u);
                let r = tau.mass_at(&x) / e;
                best = Some(match best {
                    Some(b) if b <= r => b,
                    _ => r,
                });
            }
            f.insert(u, best);
        }
        let total: Rational = f.values().flatten().sum();
        if total < Rational::from_integer(1.into()) {
            return Ok(Built::Stuck(format!("correction weights on face {j} sum to {total} < 1")));
        }
        let mut atoms = tau.atoms().clone();
        for (&u, fu) in &f {
            let rho = fu.clone().unwrap_or_default() / &total;
            if rho.is_zero() {
                continue;
            }
            for (y, e) in &eps {
                let mut x = y.clone();
                x.insert(j, u);
                *atoms.entry(x).or_insert_with(Rational::zero) -= &rho * e;
            }
        }
        if atoms.values().any(|w| w.is_negative()) {
            return Err(Error::SolverInvariant("face correction produced negative mass".into()));
        }
        tau = DataTable::new(list.clone(), atoms)?;
    }
    Ok(Built::Table(tau))
}

/// Constructive horn filler. Falls back to the LP filler (status
/// `Fallback`) when a correction step has too little room.
pub fn fill_horn_constructive(solver: &Solver, schema: &Schema, h: &HornProblem) -> Result<FillResult> {
    let Some(k) = h.missing() else {
        return Err(Error::InvalidArgument("a horn has exactly one absent face".into()));
    };
    if h.dim() == 0 {
        return Err(Error::InvalidArgument("a 0-horn carries no mass to fill with".into()));
    }
    if !h.slack.is_zero() {
        return Err(Error::InvalidArgument("the constructive filler is exact only".into()));
    }
    h.check_compatible()?;
    for t in h.faces.values() {
        t.check(schema)?;
    }
    let n = h.dim();
    let perm: Vec<usize> = std::iter::once(k).chain((0..=n).filter(|&i| i != k)).collect();
    let built = build(&permute_horn(h, &perm)?)?;
    let table = match built {
        Built::Table(t) => t.permute(&invert_permutation(&perm))?,
        Built::Stuck(why) => {
            let mut r = fill_horn_lp(solver, schema, h)?;
            if r.status == FillStatus::Filled {
                r.status = FillStatus::Fallback;
            }
            r.note = Some(why);
            return Ok(r);
        }
    };
    let mut achieved_slacks = Vec::new();
    for (&j, t) in &h.faces {
        if &table.marginalize(j)? != t {
            return Err(Error::SolverInvariant(format!("constructed filler misses face {j}")));
        }
        achieved_slacks.push((j, Rational::zero()));
    }
    Ok(FillResult { status: FillStatus::Filled, table: Some(table), achieved_slacks, note: None })
}
