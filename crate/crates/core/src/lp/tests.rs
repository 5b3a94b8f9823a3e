use super::*;
use crate::rational::{frac, int};
use proptest::prelude::*;

fn q(n: i64) -> Rational {
    int(n)
}

#[test]
fn trivial_feasible() {
    let mut lp = LinearProgram::new();
    let x = lp.add_var("x");
    lp.add_constraint(vec![(x, q(1))], Relation::Eq, q(1));
    let r = solve_feasibility(&lp).unwrap();
    assert_eq!(r.status, LpStatus::Feasible);
    assert_eq!(r.assignment, vec![q(1)]);
}

#[test]
fn trivial_infeasible_has_certificate() {
    let mut lp = LinearProgram::new();
    let x = lp.add_var("x");
    lp.add_constraint(vec![(x, q(1))], Relation::Ge, q(1));
    lp.add_constraint(vec![(x, q(1))], Relation::Le, q(0));
    let r = solve_feasibility(&lp).unwrap();
    assert_eq!(r.status, LpStatus::Infeasible);
    lp.check_certificate(r.certificate.as_ref().unwrap()).unwrap();
}

#[test]
fn negative_rhs_infeasible() {
    let mut lp = LinearProgram::new();
    let x = lp.add_var("x");
    let y = lp.add_var("y");
    lp.add_constraint(vec![(x, q(1)), (y, q(1))], Relation::Le, q(-1));
    let r = solve_feasibility(&lp).unwrap();
    assert_eq!(r.status, LpStatus::Infeasible);
}

#[test]
fn simple_minima() {
    let mut lp = LinearProgram::new();
    let t = lp.add_var("t");
    lp.add_constraint(vec![(t, q(1))], Relation::Ge, q(3));
    lp.set_objective(vec![(t, q(1))]);
    assert_eq!(minimize(&lp).unwrap().optimum, Some(q(3)));

    let mut lp = LinearProgram::new();
    let x = lp.add_var("x");
    let y = lp.add_var("y");
    lp.add_constraint(vec![(x, q(1)), (y, q(1))], Relation::Ge, q(2));
    lp.set_objective(vec![(x, q(1)), (y, q(1))]);
    let r = minimize(&lp).unwrap();
    assert_eq!(r.status, LpStatus::Optimal);
    assert_eq!(r.optimum, Some(q(2)));
}

#[test]
fn unbounded_and_free() {
    let mut lp = LinearProgram::new();
    let x = lp.add_var("x");
    lp.set_objective(vec![(x, q(-1))]);
    assert_eq!(minimize(&lp).unwrap().status, LpStatus::Unbounded);

    let mut lp = LinearProgram::new();
    let x = lp.add_free_var("x");
    lp.add_constraint(vec![(x, q(1))], Relation::Ge, q(-5));
    lp.set_objective(vec![(x, q(1))]);
    let r = minimize(&lp).unwrap();
    assert_eq!(r.optimum, Some(q(-5)));
    assert_eq!(r.assignment, vec![q(-5)]);
}

#[test]
fn budget() {
    let mut lp = LinearProgram::new();
    lp.add_var("x");
    lp.add_var("y");
    let r = Solver::new(1).solve_feasibility(&lp).unwrap();
    assert_eq!(r.status, LpStatus::BudgetExceeded);
    assert_eq!((r.variables, r.constraints), (2, 0));
}

#[test]
fn beale_cycles_without_bland() {
    let mut lp = LinearProgram::new();
    let v: Vec<usize> = (4..=7).map(|i| lp.add_var(format!("x{i}"))).collect();
    lp.add_constraint(vec![(v[0], frac(1, 4)), (v[1], q(-8)), (v[2], q(-1)), (v[3], q(9))], Relation::Le, q(0));
    lp.add_constraint(vec![(v[0], frac(1, 2)), (v[1], q(-12)), (v[2], frac(-1, 2)), (v[3], q(3))], Relation::Le, q(0));
    lp.add_constraint(vec![(v[2], q(1))], Relation::Le, q(1));
    lp.set_objective(vec![(v[0], frac(-3, 4)), (v[1], q(20)), (v[2], frac(-1, 2)), (v[3], q(6))]);
    let r = minimize(&lp).unwrap();
    assert_eq!(r.optimum, Some(frac(-5, 4)));
}

#[test]
fn redundant_equalities() {
    let mut lp = LinearProgram::new();
    let x = lp.add_var("x");
    let y = lp.add_var("y");
    lp.add_constraint(vec![(x, q(1)), (y, q(1))], Relation::Eq, q(1));
    lp.add_constraint(vec![(x, q(2)), (y, q(2))], Relation::Eq, q(2));
    lp.set_objective(vec![(x, q(1)), (y, q(3))]);
    let r = minimize(&lp).unwrap();
    assert_eq!(r.optimum, Some(q(1)));
}

#[test]
fn dump_format() {
    let mut lp = LinearProgram::new();
    let x = lp.add_var("x");
    let t = lp.add_free_var("t");
    lp.add_constraint(vec![(x, frac(1, 2)), (t, q(-1))], Relation::Le, q(3));
    lp.set_objective(vec![(t, q(1))]);
    assert_eq!(lp.dump(), "vars x t\nfree t\nmin 1 t\nc0: 1/2 x + -1 t <= 3\n");
}

/// Transportation polytope feasibility, with the north-west corner rule as
/// an independent witness of nonemptiness.
#[test]
fn transportation_feasible_like_northwest_corner() {
    let a = [frac(1, 3), frac(1, 2), frac(1, 6)];
    let b = [frac(1, 4), frac(1, 4), frac(1, 2)];
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (a.clone(), b.clone());
    let mut nw = vec![vec![q(0); 3]; 3];
    while i < 3 && j < 3 {
        let m = ra[i].clone().min(rb[j].clone());
        nw[i][j] = m.clone();
        ra[i] -= &m;
        rb[j] -= &m;
        if ra[i] == q(0) { i += 1 } else { j += 1 }
    }
    let mut lp = LinearProgram::new();
    let vars: Vec<Vec<usize>> = (0..3).map(|i| (0..3).map(|j| lp.add_var(format!("p{i}{j}"))).collect()).collect();
    for i in 0..3 {
        lp.add_constraint((0..3).map(|j| (vars[i][j], q(1))).collect(), Relation::Eq, a[i].clone());
        lp.add_constraint((0..3).map(|j| (vars[j][i], q(1))).collect(), Relation::Eq, b[i].clone());
    }
    let flat: Vec<Rational> = nw.into_iter().flatten().collect();
    lp.check(&flat).unwrap();
    assert_eq!(solve_feasibility(&lp).unwrap().status, LpStatus::Feasible);
}

/// Exact vertex enumeration for `min c·x, A x <= b, x >= 0` in few
/// dimensions: intersect every choice of `n` tight rows.
fn vertex_min(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> Option<Rational> {
    let n = c.len();
    let mut rows: Vec<(Vec<Rational>, Rational)> = a.iter().cloned().zip(b.iter().cloned()).collect();
    for i in 0..n {
        let mut e = vec![q(0); n];
        e[i] = q(-1);
        rows.push((e, q(0)));
    }
    let mut best: Option<Rational> = None;
    let k = rows.len();
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        if let Some(x) = solve_square(&pick.iter().map(|&i| rows[i].clone()).collect::<Vec<_>>()) {
            let feasible = rows.iter().all(|(r, rhs)| r.iter().zip(&x).map(|(u, v)| u * v).sum::<Rational>() <= *rhs);
            if feasible {
                let val: Rational = c.iter().zip(&x).map(|(u, v)| u * v).sum();
                if best.as_ref().is_none_or(|b| val < *b) {
                    best = Some(val);
                }
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < k - n + i {
                pick[i] += 1;
                for j in i + 1..n {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn solve_square(rows: &[(Vec<Rational>, Rational)]) -> Option<Vec<Rational>> {
    let n = rows.len();
    let mut m: Vec<Vec<Rational>> = rows.iter().map(|(r, b)| {
        let mut v = r.clone();
        v.push(b.clone());
        v
    }).collect();
    for col in 0..n {
        let p = (col..n).find(|&r| m[r][col] != q(0))?;
        m.swap(col, p);
        let inv = q(1) / &m[col][col];
        for j in 0..=n {
            m[col][j] = &m[col][j] * &inv;
        }
        for r in 0..n {
            if r != col && m[r][col] != q(0) {
                let f = m[r][col].clone();
                for j in 0..=n {
                    let d = &f * &m[col][j];
                    m[r][j] -= d;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn minimize_matches_vertex_enumeration(
        a in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 3), 1..4),
        b in proptest::collection::vec(0i64..=6, 3),
        c in proptest::collection::vec(-3i64..=3, 3),
    ) {
        let n = 3;
        let mut rows: Vec<Vec<Rational>> = a.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        let mut rhs: Vec<Rational> = b.iter().take(rows.len()).map(|&x| q(x)).collect();
        // box keeps the region bounded
        for i in 0..n {
            let mut e = vec![q(0); n];
            e[i] = q(1);
            rows.push(e);
            rhs.push(q(5));
        }
        let cost: Vec<Rational> = c.iter().map(|&x| q(x)).collect();
        let mut lp = LinearProgram::new();
        let vars: Vec<usize> = (0..n).map(|i| lp.add_var(format!("x{i}"))).collect();
        for (r, h) in rows.iter().zip(&rhs) {
            lp.add_constraint(vars.iter().zip(r).map(|(&v, x)| (v, x.clone())).collect(), Relation::Le, h.clone());
        }
        lp.set_objective(vars.iter().zip(&cost).map(|(&v, x)| (v, x.clone())).collect());
        let r = minimize(&lp).unwrap();
        let oracle = vertex_min(&rows, &rhs, &cost);
        prop_assert_eq!(r.optimum, oracle);
    }

    #[test]
    fn random_systems_self_certify(
        a in proptest::collection::vec(proptest::collection::vec(-2i64..=2, 3), 1..5),
        b in proptest::collection::vec(-3i64..=3, 5),
        rel in proptest::collection::vec(0u8..3, 5),
    ) {
        let mut lp = LinearProgram::new();
        let vars: Vec<usize> = (0..3).map(|i| lp.add_var(format!("x{i}"))).collect();
        for (k, r) in a.iter().enumerate() {
            let relation = [Relation::Le, Relation::Ge, Relation::Eq][rel[k] as usize];
            lp.add_constraint(vars.iter().zip(r).map(|(&v, &x)| (v, q(x))).collect(), relation, q(b[k]));
        }
        // the solver re-checks assignments and certificates itself
        let r = solve_feasibility(&lp).unwrap();
        prop_assert!(matches!(r.status, LpStatus::Feasible | LpStatus::Infeasible));
    }
}
