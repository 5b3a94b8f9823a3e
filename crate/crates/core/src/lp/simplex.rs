//! Dense two-phase tableau with Bland's rule.

use super::{LinearProgram, LpStatus, Relation};
use crate::rational::Rational;
use num_traits::{One, Signed, Zero};

pub(super) struct Outcome {
    pub status: LpStatus,
    pub assignment: Vec<Rational>,
    pub optimum: Option<Rational>,
    pub certificate: Option<Vec<Rational>>,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    obj: Vec<Rational>,
    basis: Vec<usize>,
    rhs: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, q: usize) {
        let inv = Rational::one() / &self.rows[r][q];
        let nz: Vec<usize> = (0..=self.rhs).filter(|&j| !self.rows[r][j].is_zero()).collect();
        for &j in &nz {
            self.rows[r][j] *= &inv;
        }
        let prow = std::mem::take(&mut self.rows[r]);
        let eliminate = |row: &mut Vec<Rational>| {
            if row[q].is_zero() {
                return;
            }
            let f = row[q].clone();
            for &j in &nz {
                let d = &f * &prow[j];
                row[j] -= d;
            }
        };
        for row in self.rows.iter_mut() {
            if !row.is_empty() {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.rows[r] = prow;
        self.basis[r] = q;
    }

    /// Runs Bland's rule over the allowed columns. Returns false if the
    /// objective is unbounded below.
    fn optimize(&mut self, allowed: &[bool]) -> bool {
        loop {
            let Some(q) = (0..self.rhs).find(|&j| allowed[j] && self.obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[q].is_positive() {
                    continue;
                }
                let ratio = &row[self.rhs] / &row[q];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, q),
                None => return false,
            }
        }
    }

    fn value(&self, col: usize) -> Rational {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map(|i| self.rows[i][self.rhs].clone())
            .unwrap_or_else(Rational::zero)
    }
}

pub(super) fn solve(lp: &LinearProgram, optimize: bool) -> Outcome {
    let m = lp.constraints.len();
    // structural columns: one per variable, plus a negative part for free ones
    let mut pos_col = Vec::with_capacity(lp.num_vars());
    let mut neg_col = Vec::with_capacity(lp.num_vars());
    let mut ncols = 0;
    for v in 0..lp.num_vars() {
        pos_col.push(ncols);
        ncols += 1;
        if lp.free[v] {
            neg_col.push(Some(ncols));
            ncols += 1;
        } else {
            neg_col.push(None);
        }
    }
    let structural = ncols;
    let mut slack_col = vec![None; m];
    for (i, c) in lp.constraints.iter().enumerate() {
        if c.relation != Relation::Eq {
            slack_col[i] = Some(ncols);
            ncols += 1;
        }
    }
    let slack_end = ncols;

    // normalized rows with nonnegative right-hand sides
    let mut sign = vec![Rational::one(); m];
    let mut dense: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut row = vec![Rational::zero(); slack_end];
        for (v, a) in &c.terms {
            row[pos_col[*v]] += a;
            if let Some(nc) = neg_col[*v] {
                row[nc] -= a;
            }
        }
        match c.relation {
            Relation::Le => row[slack_col[i].unwrap()] = Rational::one(),
            Relation::Ge => row[slack_col[i].unwrap()] = -Rational::one(),
            Relation::Eq => {}
        }
        let mut b = c.rhs.clone();
        if b.is_negative() {
            sign[i] = -Rational::one();
            row.iter_mut().for_each(|x| *x = -x.clone());
            b = -b;
        }
        row.push(b);
        dense.push(row);
    }

    // initial basis: a +1 slack where available, otherwise an artificial
    let mut art_col = vec![None; m];
    let mut basis = vec![0; m];
    for i in 0..m {
        match slack_col[i] {
            Some(s) if dense[i][s].is_one() => basis[i] = s,
            _ => {
                art_col[i] = Some(ncols);
                basis[i] = ncols;
                ncols += 1;
            }
        }
    }
    let rhs = ncols;
    let rows: Vec<Vec<Rational>> = dense
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            let b = row.pop().unwrap();
            row.resize(ncols, Rational::zero());
            if let Some(a) = art_col[i] {
                row[a] = Rational::one();
            }
            row.push(b);
            row
        })
        .collect();

    let mut obj = vec![Rational::zero(); ncols + 1];
    for i in 0..m {
        if let Some(a) = art_col[i] {
            obj[a] = Rational::one();
            for j in 0..=ncols {
                if !rows[i][j].is_zero() {
                    obj[j] -= &rows[i][j];
                }
            }
        }
    }
    let mut t = Tableau { rows, obj, basis, rhs };
    let all = vec![true; ncols];
    let bounded = t.optimize(&all);
    debug_assert!(bounded, "phase one is bounded below by zero");

    let phase1 = -t.obj[rhs].clone();
    if phase1.is_positive() {
        // multipliers of the normalized rows, mapped back through the signs
        let y = (0..m)
            .map(|i| {
                let yi = match art_col[i] {
                    Some(a) => Rational::one() - &t.obj[a],
                    None => -t.obj[slack_col[i].unwrap()].clone(),
                };
                yi * &sign[i]
            })
            .collect();
        return Outcome { status: LpStatus::Infeasible, assignment: Vec::new(), optimum: None, certificate: Some(y) };
    }

    // push artificials out of the basis where a real column can replace them
    let is_art = |j: usize| j >= slack_end;
    for r in 0..m {
        if is_art(t.basis[r]) {
            if let Some(q) = (0..slack_end).find(|&j| !t.rows[r][j].is_zero()) {
                t.pivot(r, q);
            }
        }
    }

    let extract = |t: &Tableau| -> Vec<Rational> {
        (0..lp.num_vars())
            .map(|v| {
                let p = t.value(pos_col[v]);
                match neg_col[v] {
                    Some(nc) => p - t.value(nc),
                    None => p,
                }
            })
            .collect()
    };

    if !optimize {
        return Outcome { status: LpStatus::Feasible, assignment: extract(&t), optimum: None, certificate: None };
    }

    let mut cost = vec![Rational::zero(); ncols + 1];
    for (v, a) in lp.objective.as_ref().expect("objective present") {
        cost[pos_col[*v]] += a;
        if let Some(nc) = neg_col[*v] {
            cost[nc] -= a;
        }
    }
    for r in 0..m {
        let cb = cost[t.basis[r]].clone();
        if !cb.is_zero() {
            for j in 0..=rhs {
                if !t.rows[r][j].is_zero() {
                    let d = &cb * &t.rows[r][j];
                    cost[j] -= d;
                }
            }
        }
    }
    t.obj = cost;
    let allowed: Vec<bool> = (0..ncols).map(|j| !is_art(j)).collect();
    debug_assert!(structural <= slack_end);
    if !t.optimize(&allowed) {
        return Outcome { status: LpStatus::Unbounded, assignment: Vec::new(), optimum: None, certificate: None };
    }
    let optimum = -t.obj[rhs].clone();
    Outcome { status: LpStatus::Optimal, assignment: extract(&t), optimum: Some(optimum), certificate: None }
}
