//! LP building blocks shared by filling and obstruction programs: unknown
//! measures, their pushforwards, and "within slack" coupling constraints.

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpResult, LpStatus, Relation, Solver};
use crate::measures::{product_tuples, DataTable, Tuple};
use crate::rational::Rational;
use crate::schema::{ProductMetric, Schema};
use crate::simpattr::AttributeList;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// How closely a pushforward must match its target.
#[derive(Clone, Debug)]
pub(crate) enum Slack {
    /// Equal as measures.
    Exact,
    /// Transport cost at most the given constant.
    Fixed(Rational),
    /// Transport cost at most the given LP variable.
    Var(usize),
}

impl Slack {
    pub fn fixed(t: &Rational) -> Slack {
        if t.is_zero() {
            Slack::Exact
        } else {
            Slack::Fixed(t.clone())
        }
    }
}

/// One nonnegative variable per candidate tuple.
pub(crate) struct MeasureVars {
    pub list: AttributeList,
    pub tuples: Vec<Tuple>,
    pub vars: Vec<usize>,
}

/// A linear measure: each tuple maps to a sum of variables plus a constant.
#[derive(Default)]
pub(crate) struct MeasureExpr {
    pub terms: BTreeMap<Tuple, (Vec<usize>, Rational)>,
}

impl MeasureExpr {
    pub fn constant(t: &DataTable) -> Self {
        MeasureExpr { terms: t.atoms().iter().map(|(x, m)| (x.clone(), (Vec::new(), m.clone()))).collect() }
    }
}

impl MeasureVars {
    pub fn new(lp: &mut LinearProgram, prefix: &str, list: AttributeList, tuples: Vec<Tuple>) -> Self {
        let vars = tuples
            .iter()
            .map(|x| lp.add_var(format!("{prefix}{}", x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("_"))))
            .collect();
        MeasureVars { list, tuples, vars }
    }

    pub fn pushforward(&self, positions: &[usize]) -> MeasureExpr {
        let mut e = MeasureExpr::default();
        for (x, &v) in self.tuples.iter().zip(&self.vars) {
            let y: Tuple = positions.iter().map(|&p| x[p]).collect();
            e.terms.entry(y).or_insert_with(|| (Vec::new(), Rational::zero())).0.push(v);
        }
        e
    }

    pub fn whole(&self) -> MeasureExpr {
        let all: Vec<usize> = (0..self.list.len()).collect();
        self.pushforward(&all)
    }

    pub fn extract(&self, assignment: &[Rational]) -> DataTable {
        let atoms = self.tuples.iter().zip(&self.vars).map(|(x, &v)| (x.clone(), assignment[v].clone()));
        DataTable::new(self.list.clone(), atoms).expect("solver assignments are nonnegative")
    }
}

/// Constrains `lhs` to be within `slack` of `rhs` in transport cost; with
/// `Slack::Exact` the two measures are set equal tuple by tuple.
pub(crate) fn constrain_close(
    lp: &mut LinearProgram,
    metric: &ProductMetric<'_>,
    lhs: &MeasureExpr,
    rhs: &MeasureExpr,
    slack: &Slack,
    tag: &str,
) {
    let one = Rational::one();
    if let Slack::Exact = slack {
        let keys: BTreeSet<&Tuple> = lhs.terms.keys().chain(rhs.terms.keys()).collect();
        for y in keys {
            let mut terms = Vec::new();
            let mut constant = Rational::zero();
            if let Some((vs, c)) = lhs.terms.get(y) {
                terms.extend(vs.iter().map(|&v| (v, one.clone())));
                constant += c;
            }
            if let Some((vs, c)) = rhs.terms.get(y) {
                terms.extend(vs.iter().map(|&v| (v, -one.clone())));
                constant -= c;
            }
            lp.add_constraint(terms, Relation::Eq, -constant);
        }
        return;
    }
    let ys: Vec<&Tuple> = lhs.terms.keys().collect();
    let zs: Vec<&Tuple> = rhs.terms.keys().collect();
    let mut pi = vec![vec![0; zs.len()]; ys.len()];
    let mut cost = Vec::new();
    for (i, y) in ys.iter().enumerate() {
        for (j, z) in zs.iter().enumerate() {
            pi[i][j] = lp.add_var(format!("{tag}pi{i}_{j}"));
            let d = metric.dist(y, z);
            if !d.is_zero() {
                cost.push((pi[i][j], d));
            }
        }
    }
    let side = |expr: &(Vec<usize>, Rational), coupling: Vec<usize>| -> (Vec<(usize, Rational)>, Rational) {
        let mut terms: Vec<(usize, Rational)> = coupling.into_iter().map(|v| (v, one.clone())).collect();
        terms.extend(expr.0.iter().map(|&v| (v, -one.clone())));
        (terms, expr.1.clone())
    };
    for (i, y) in ys.iter().enumerate() {
        let (terms, c) = side(&lhs.terms[*y], pi[i].clone());
        lp.add_constraint(terms, Relation::Eq, c);
    }
    for (j, z) in zs.iter().enumerate() {
        let (terms, c) = side(&rhs.terms[*z], pi.iter().map(|r| r[j]).collect());
        lp.add_constraint(terms, Relation::Eq, c);
    }
    match slack {
        Slack::Fixed(t) => lp.add_constraint(cost, Relation::Le, t.clone()),
        Slack::Var(tv) => {
            cost.push((*tv, -one.clone()));
            lp.add_constraint(cost, Relation::Le, Rational::zero());
        }
        Slack::Exact => unreachable!(),
    }
}

/// Tuples of `list` whose projection onto each given face lies in that
/// face's support set. Every face omits exactly one position; the smallest
/// support seeds the search.
pub(crate) fn supported_tuples(
    schema: &Schema,
    list: &AttributeList,
    faces: &[(usize, BTreeSet<Tuple>)],
) -> Result<Vec<Tuple>> {
    let Some((seed, seed_keys)) = faces.iter().min_by_key(|(_, k)| k.len()) else {
        return product_tuples(schema, list);
    };
    let spaces = schema.spaces_for(list)?;
    let mut out = BTreeSet::new();
    for y in seed_keys {
        for v in 0..spaces[*seed].len() {
            let mut x = y.clone();
            x.insert(*seed, v);
            let ok = faces.iter().all(|(j, keys)| {
                let mut z = x.clone();
                z.remove(*j);
                keys.contains(&z)
            });
            if ok {
                out.insert(x);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Support sets of the given faces, for [`supported_tuples`].
pub(crate) fn supports<'a>(faces: impl IntoIterator<Item = (usize, &'a DataTable)>) -> Vec<(usize, BTreeSet<Tuple>)> {
    faces.into_iter().map(|(j, t)| (j, t.atoms().keys().cloned().collect())).collect()
}

/// Product size of a list's value spaces, saturating.
pub(crate) fn product_size(schema: &Schema, list: &AttributeList) -> Result<usize> {
    Ok(schema.spaces_for(list)?.iter().fold(1usize, |acc, s| acc.saturating_mul(s.len())))
}

pub(crate) fn budget_error(res: &LpResult, solver: &Solver) -> Error {
    Error::BudgetExceeded { variables: res.variables, constraints: res.constraints, budget: solver.variable_budget }
}

/// Unwraps a solve: budget overruns become errors, everything else is
/// returned to the caller.
pub(crate) fn solve(solver: &Solver, lp: &LinearProgram, minimize: bool) -> Result<LpResult> {
    let res = if minimize { solver.minimize(lp)? } else { solver.solve_feasibility(lp)? };
    if res.status == LpStatus::BudgetExceeded {
        return Err(budget_error(&res, solver));
    }
    Ok(res)
}
