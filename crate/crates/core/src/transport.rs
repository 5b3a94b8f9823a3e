//! Wasserstein-1 distance between equal-mass tables on one list, with the
//! L∞ product ground metric, solved exactly as a transportation LP.

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus, Relation, Solver};
use crate::measures::{AtomDoc, DataTable, Tuple};
use crate::rational::{self, Rational};
use crate::schema::Schema;
use crate::simpattr::{concat_sum, AttributeInclusion, AttributeList};
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::str::FromStr;

/// Only the L∞ product metric is supported; anything else is refused.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroundMetric {
    LInf,
}

impl FromStr for GroundMetric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linf" | "l-inf" | "max" => Ok(GroundMetric::LInf),
            other => Err(Error::InvalidArgument(format!("unsupported ground metric {other:?}; only linf is available"))),
        }
    }
}

/// A transport plan on `T ⊕ T`: the first copy occupies positions
/// `first.map`, the second `second.map`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    pub list: AttributeList,
    pub first: AttributeInclusion,
    pub second: AttributeInclusion,
    pub plan: BTreeMap<(Tuple, Tuple), Rational>,
}

impl Coupling {
    fn new(base: &AttributeList, plan: BTreeMap<(Tuple, Tuple), Rational>) -> Self {
        let (list, first, second) = concat_sum(base, base);
        Coupling { list, first, second, plan }
    }

    pub fn as_table(&self) -> DataTable {
        let atoms = self.plan.iter().map(|((x, y), m)| {
            let mut xy = x.clone();
            xy.extend_from_slice(y);
            (xy, m.clone())
        });
        DataTable::new(self.list.clone(), atoms).expect("plan masses are nonnegative")
    }

    pub fn cost(&self, schema: &Schema) -> Result<Rational> {
        let metric = schema.product_metric(&self.first.source)?;
        Ok(self.plan.iter().map(|((x, y), m)| metric.dist(x, y) * m).sum())
    }

    pub fn to_doc(&self, schema: &Schema) -> Result<CouplingDoc> {
        let t = self.as_table().to_doc(schema)?;
        Ok(CouplingDoc { list: self.list.clone(), first: self.first.map.clone(), second: self.second.map.clone(), atoms: t.atoms })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CouplingDoc {
    pub list: AttributeList,
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub atoms: Vec<AtomDoc>,
}

fn check_pair(t1: &DataTable, t2: &DataTable) -> Result<()> {
    if t1.list() != t2.list() {
        return Err(Error::ListMismatch(format!("{} vs {}", t1.list(), t2.list())));
    }
    let (m1, m2) = (t1.total_mass(), t2.total_mass());
    if m1 != m2 {
        return Err(Error::MassMismatch { left: rational::fmt(&m1), right: rational::fmt(&m2) });
    }
    Ok(())
}

pub fn wasserstein(schema: &Schema, t1: &DataTable, t2: &DataTable) -> Result<Rational> {
    optimal_coupling_with(&Solver::default(), schema, t1, t2).map(|(w, _)| w)
}

pub fn optimal_coupling(schema: &Schema, t1: &DataTable, t2: &DataTable) -> Result<Coupling> {
    optimal_coupling_with(&Solver::default(), schema, t1, t2).map(|(_, c)| c)
}

/// Distance and a minimizing plan. Identical tables get the diagonal plan.
pub fn optimal_coupling_with(
    solver: &Solver,
    schema: &Schema,
    t1: &DataTable,
    t2: &DataTable,
) -> Result<(Rational, Coupling)> {
    check_pair(t1, t2)?;
    let metric = schema.product_metric(t1.list())?;
    if t1 == t2 {
        let plan = t1.atoms().iter().map(|(x, m)| ((x.clone(), x.clone()), m.clone())).collect();
        return Ok((Rational::zero(), Coupling::new(t1.list(), plan)));
    }
    let xs: Vec<(&Tuple, &Rational)> = t1.atoms().iter().collect();
    let ys: Vec<(&Tuple, &Rational)> = t2.atoms().iter().collect();
    if xs.len() == 1 || ys.len() == 1 {
        // the only coupling is the product one
        let mut plan = BTreeMap::new();
        let total = t1.total_mass();
        for (x, a) in &xs {
            for (y, b) in &ys {
                plan.insert(((*x).clone(), (*y).clone()), *a * *b / &total);
            }
        }
        let c = Coupling::new(t1.list(), plan);
        return Ok((c.cost(schema)?, c));
    }

    let mut lp = LinearProgram::new();
    let mut var = vec![vec![0; ys.len()]; xs.len()];
    let mut objective = Vec::new();
    for (i, row) in var.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = lp.add_var(format!("p{i}_{j}"));
            let d = metric.dist(xs[i].0, ys[j].0);
            if !d.is_zero() {
                objective.push((*v, d));
            }
        }
    }
    for (i, (_, a)) in xs.iter().enumerate() {
        lp.add_constraint(var[i].iter().map(|&v| (v, Rational::one())).collect(), Relation::Eq, (*a).clone());
    }
    for (j, (_, b)) in ys.iter().enumerate() {
        lp.add_constraint(var.iter().map(|r| (r[j], Rational::one())).collect(), Relation::Eq, (*b).clone());
    }
    lp.set_objective(objective);
    let res = solver.minimize(&lp)?;
    match res.status {
        LpStatus::Optimal => {}
        LpStatus::BudgetExceeded => {
            return Err(Error::BudgetExceeded { variables: res.variables, constraints: res.constraints, budget: solver.variable_budget })
        }
        other => return Err(Error::SolverInvariant(format!("transport LP returned {other:?}"))),
    }
    let mut plan = BTreeMap::new();
    for (i, row) in var.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if !res.assignment[v].is_zero() {
                plan.insert((xs[i].0.clone(), ys[j].0.clone()), res.assignment[v].clone());
            }
        }
    }
    let c = Coupling::new(t1.list(), plan);
    Ok((res.optimum.expect("optimal"), c))
}
