//! Exact rational linear programs.
//!
//! Variables are nonnegative unless declared free. The solver is a dense
//! two-phase tableau simplex with Bland's rule; every assignment it returns
//! has been re-checked against the original constraints, and infeasibility
//! comes with a Farkas certificate that is re-checked the same way.
//!
//! Debug dump format ([`LinearProgram::dump`]), one item per line:
//!
//! ```text
//! vars <name> <name> ...
//! free <name> ...            (only if some variable is free)
//! min <coef> <name> + ...    (only if an objective is set)
//! c<k>: <coef> <name> + ... <= | >= | = <rhs>
//! ```
//!
//! Coefficients are written as `p/q` or integers.

mod simplex;

use crate::rational::{self, Rational};
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::fmt::Write;

pub const DEFAULT_VARIABLE_BUDGET: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    names: Vec<String>,
    free: Vec<bool>,
    constraints: Vec<Constraint>,
    objective: Option<Vec<(usize, Rational)>>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.free.push(false);
        self.names.len() - 1
    }

    pub fn add_free_var(&mut self, name: impl Into<String>) -> usize {
        let v = self.add_var(name);
        self.free[v] = true;
        v
    }

    /// Panics if a term names an undeclared variable.
    pub fn add_constraint(&mut self, terms: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        assert!(terms.iter().all(|(v, _)| *v < self.names.len()), "undeclared variable in constraint");
        self.constraints.push(Constraint { terms, relation, rhs });
    }

    pub fn set_objective(&mut self, terms: Vec<(usize, Rational)>) {
        assert!(terms.iter().all(|(v, _)| *v < self.names.len()), "undeclared variable in objective");
        self.objective = Some(terms);
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> Option<&[(usize, Rational)]> {
        self.objective.as_deref()
    }

    pub fn is_free(&self, v: usize) -> bool {
        self.free[v]
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    /// Exact check of an assignment; returns the first violated item.
    pub fn check(&self, x: &[Rational]) -> Result<(), String> {
        if x.len() != self.names.len() {
            return Err(format!("assignment has {} values for {} variables", x.len(), self.names.len()));
        }
        for (v, val) in x.iter().enumerate() {
            if !self.free[v] && val.is_negative() {
                return Err(format!("variable {} is negative: {val}", self.names[v]));
            }
        }
        for (k, c) in self.constraints.iter().enumerate() {
            let lhs: Rational = c.terms.iter().map(|(v, a)| a * &x[*v]).sum();
            let ok = match c.relation {
                Relation::Le => lhs <= c.rhs,
                Relation::Ge => lhs >= c.rhs,
                Relation::Eq => lhs == c.rhs,
            };
            if !ok {
                return Err(format!("constraint c{k} violated: lhs {lhs}, rhs {}", c.rhs));
            }
        }
        Ok(())
    }

    /// Checks a Farkas certificate: multipliers with the sign of each row
    /// (`<=` rows nonpositive, `>=` rows nonnegative) whose combination has
    /// nonpositive coefficients on nonnegative variables, zero on free ones,
    /// and a strictly positive right-hand side.
    pub fn check_certificate(&self, y: &[Rational]) -> Result<(), String> {
        if y.len() != self.constraints.len() {
            return Err("certificate length differs from constraint count".into());
        }
        let mut combo = vec![Rational::zero(); self.names.len()];
        let mut rhs = Rational::zero();
        for (k, (c, yk)) in self.constraints.iter().zip(y).enumerate() {
            let sign_ok = match c.relation {
                Relation::Le => !yk.is_positive(),
                Relation::Ge => !yk.is_negative(),
                Relation::Eq => true,
            };
            if !sign_ok {
                return Err(format!("multiplier {k} has the wrong sign"));
            }
            for (v, a) in &c.terms {
                combo[*v] += yk * a;
            }
            rhs += yk * &c.rhs;
        }
        for (v, a) in combo.iter().enumerate() {
            let bad = if self.free[v] { !a.is_zero() } else { a.is_positive() };
            if bad {
                return Err(format!("combined coefficient on {} is {a}", self.names[v]));
            }
        }
        if !rhs.is_positive() {
            return Err(format!("combined right-hand side {rhs} is not positive"));
        }
        Ok(())
    }

    pub fn dump(&self) -> String {
        let mut s = String::new();
        let expr = |terms: &[(usize, Rational)]| -> String {
            if terms.is_empty() {
                return "0".into();
            }
            terms
                .iter()
                .map(|(v, a)| format!("{} {}", rational::fmt(a), self.names[*v]))
                .collect::<Vec<_>>()
                .join(" + ")
        };
        let _ = writeln!(s, "vars {}", self.names.join(" "));
        if self.free.iter().any(|&f| f) {
            let free: Vec<&str> =
                self.names.iter().zip(&self.free).filter(|(_, &f)| f).map(|(n, _)| n.as_str()).collect();
            let _ = writeln!(s, "free {}", free.join(" "));
        }
        if let Some(obj) = &self.objective {
            let _ = writeln!(s, "min {}", expr(obj));
        }
        for (k, c) in self.constraints.iter().enumerate() {
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Ge => ">=",
                Relation::Eq => "=",
            };
            let _ = writeln!(s, "c{k}: {} {rel} {}", expr(&c.terms), rational::fmt(&c.rhs));
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Feasible,
    Infeasible,
    Optimal,
    Unbounded,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    pub assignment: Vec<Rational>,
    pub optimum: Option<Rational>,
    pub certificate: Option<Vec<Rational>>,
    pub variables: usize,
    pub constraints: usize,
}

impl LpResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self.status, LpStatus::Feasible | LpStatus::Optimal)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Solver {
    pub variable_budget: usize,
}

impl Default for Solver {
    fn default() -> Self {
        Solver { variable_budget: DEFAULT_VARIABLE_BUDGET }
    }
}

impl Solver {
    pub fn new(variable_budget: usize) -> Self {
        Solver { variable_budget }
    }

    pub fn solve_feasibility(&self, lp: &LinearProgram) -> crate::Result<LpResult> {
        self.run(lp, false)
    }

    pub fn minimize(&self, lp: &LinearProgram) -> crate::Result<LpResult> {
        if lp.objective.is_none() {
            return Err(crate::Error::InvalidArgument("minimize called without an objective".into()));
        }
        self.run(lp, true)
    }

    fn run(&self, lp: &LinearProgram, optimize: bool) -> crate::Result<LpResult> {
        let mut res = LpResult {
            status: LpStatus::BudgetExceeded,
            assignment: Vec::new(),
            optimum: None,
            certificate: None,
            variables: lp.num_vars(),
            constraints: lp.num_constraints(),
        };
        if lp.num_vars() > self.variable_budget {
            return Ok(res);
        }
        let out = simplex::solve(lp, optimize);
        res.status = out.status;
        match out.status {
            LpStatus::Feasible | LpStatus::Optimal => {
                lp.check(&out.assignment).map_err(crate::Error::SolverInvariant)?;
                if optimize {
                    let obj = lp.objective.as_ref().expect("objective present");
                    let value: Rational = obj.iter().map(|(v, a)| a * &out.assignment[*v]).sum();
                    if Some(&value) != out.optimum.as_ref() {
                        return Err(crate::Error::SolverInvariant("tableau objective disagrees with assignment".into()));
                    }
                    res.optimum = Some(value);
                }
                res.assignment = out.assignment;
            }
            LpStatus::Infeasible => {
                let y = out.certificate.expect("infeasible result carries multipliers");
                lp.check_certificate(&y).map_err(crate::Error::SolverInvariant)?;
                res.certificate = Some(y);
            }
            LpStatus::Unbounded | LpStatus::BudgetExceeded => {}
        }
        Ok(res)
    }
}

pub fn solve_feasibility(lp: &LinearProgram) -> crate::Result<LpResult> {
    Solver::default().solve_feasibility(lp)
}

pub fn minimize(lp: &LinearProgram) -> crate::Result<LpResult> {
    Solver::default().minimize(lp)
}

#[cfg(test)]
mod tests;
