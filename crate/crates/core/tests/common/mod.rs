//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use datacomplex::measures::DataTable;
use datacomplex::rational::{frac, int};
use datacomplex::schema::{Attribute, Schema, ValueSpace};
use datacomplex::simpattr::AttributeList;
use datacomplex::Rational;
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeMap;

pub fn list(names: &str) -> AttributeList {
    AttributeList::new(names.chars().map(|c| c.to_string()))
}

pub fn tab(names: &str, atoms: &[(&[usize], Rational)]) -> DataTable {
    DataTable::new(list(names), atoms.iter().map(|(x, m)| (x.to_vec(), m.clone()))).unwrap()
}

pub fn anti(names: &str) -> DataTable {
    tab(names, &[(&[0, 1], frac(1, 2)), (&[1, 0], frac(1, 2))])
}

pub fn uniform(names: &str) -> DataTable {
    let q = frac(1, 4);
    tab(names, &[(&[0, 0], q.clone()), (&[0, 1], q.clone()), (&[1, 0], q.clone()), (&[1, 1], q)])
}

/// Attributes `a`..`d` on spaces of 1..=4 points with random integer
/// metrics (shortest paths, so the triangle inequality holds), plus
/// binary `x`, `y`, `z` under the unit metric.
pub fn random_schema<R: Rng>(rng: &mut R) -> Schema {
    let mut spaces = Vec::new();
    let mut attrs = Vec::new();
    for (i, name) in ["a", "b", "c", "d"].iter().enumerate() {
        let k = rng.gen_range(1..=4);
        let mut d = vec![vec![0i64; k]; k];
        for p in 0..k {
            for q in p + 1..k {
                let w = rng.gen_range(1..=3);
                d[p][q] = w;
                d[q][p] = w;
            }
        }
        for m in 0..k {
            for p in 0..k {
                for q in 0..k {
                    d[p][q] = d[p][q].min(d[p][m] + d[m][q]);
                }
            }
        }
        let metric = d.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
        let id = format!("s{i}");
        spaces.push(ValueSpace::new(id.clone(), (0..k).map(|p| p.to_string()).collect(), metric));
        attrs.push(Attribute { name: name.to_string(), space: id });
    }
    spaces.push(ValueSpace::discrete("bit", 2, int(1)));
    for n in ["x", "y", "z"] {
        attrs.push(Attribute { name: n.into(), space: "bit".into() });
    }
    Schema::validated(spaces, attrs).unwrap()
}

pub fn binary_schema() -> Schema {
    let attrs = ["x", "y", "z", "w"].iter().map(|n| Attribute { name: n.to_string(), space: "bit".into() }).collect();
    Schema::validated(vec![ValueSpace::discrete("bit", 2, int(1))], attrs).unwrap()
}

/// A random list of 1..=max_len attributes from `a`..`d`, repeats allowed.
pub fn random_list<R: Rng>(rng: &mut R, max_len: usize) -> AttributeList {
    let n = rng.gen_range(1..=max_len);
    AttributeList::new((0..n).map(|_| ["a", "b", "c", "d"][rng.gen_range(0..4)].to_string()))
}

/// Up to `max_atoms` random atoms with masses in 1/12 steps, scaled to
/// total mass `mass` when given.
pub fn random_table<R: Rng>(rng: &mut R, schema: &Schema, l: &AttributeList, max_atoms: usize, mass: Option<&Rational>) -> DataTable {
    let spaces = schema.spaces_for(l).unwrap();
    let k = rng.gen_range(1..=max_atoms);
    let atoms: Vec<(Vec<usize>, Rational)> = (0..k)
        .map(|_| (spaces.iter().map(|s| rng.gen_range(0..s.len())).collect(), frac(rng.gen_range(1..=12), 12)))
        .collect();
    let t = DataTable::new(l.clone(), atoms).unwrap();
    match mass {
        Some(m) => t.scale(&(m / t.total_mass())),
        None => t,
    }
}

/// Random full-support-ish table on `l`, normalized to mass one.
pub fn random_joint<R: Rng>(rng: &mut R, schema: &Schema, l: &AttributeList) -> DataTable {
    let spaces = schema.spaces_for(l).unwrap();
    let total: usize = spaces.iter().map(|s| s.len()).product();
    random_table(rng, schema, l, total.max(1) * 2, Some(&int(1)))
}

pub fn shuffle<R: Rng, T>(rng: &mut R, v: &mut [T]) {
    v.shuffle(rng);
}

/// Exact solution of a square-or-tall system `a x = b` when it has a unique
/// solution.
fn solve_exact(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>, cols: usize) -> Option<Vec<Rational>> {
    let rows = a.len();
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        let p = (r..rows).find(|&i| !a[i][c].is_zero())?;
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].recip();
        for j in 0..cols {
            a[r][j] = &a[r][j] * &inv;
        }
        b[r] = &b[r] * &inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let v = &f * &a[r][j];
                    a[i][j] -= v;
                }
                let v = &f * &b[r];
                b[i] -= v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if (r..rows).any(|i| !b[i].is_zero()) {
        return None;
    }
    Some(b[..cols].to_vec())
}

/// Minimum transport cost by enumerating every basis of the transportation
/// polytope: `n + m - 1` cells whose marginal system has a unique
/// nonnegative solution.
pub fn transport_by_vertices(mu: &[Rational], nu: &[Rational], cost: &[Vec<Rational>]) -> Rational {
    let (n, m) = (mu.len(), nu.len());
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
    let k = n + m - 1;
    let mut best: Option<Rational> = None;
    let mut pick = Vec::new();
    fn rec(
        start: usize,
        k: usize,
        cells: &[(usize, usize)],
        pick: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if pick.len() == k {
            f(pick);
            return;
        }
        for c in start..cells.len() {
            pick.push(c);
            rec(c + 1, k, cells, pick, f);
            pick.pop();
        }
    }
    let mut visit = |sel: &[usize]| {
        let mut a = vec![vec![Rational::zero(); k]; n + m];
        for (col, &c) in sel.iter().enumerate() {
            let (i, j) = cells[c];
            a[i][col] = int(1);
            a[n + j][col] = int(1);
        }
        let b: Vec<Rational> = mu.iter().chain(nu).cloned().collect();
        if let Some(x) = solve_exact(a, b, k) {
            if x.iter().all(|v| !v.is_negative()) {
                let c: Rational = sel.iter().zip(&x).map(|(&c, v)| &cost[cells[c].0][cells[c].1] * v).sum();
                if best.as_ref().is_none_or(|b| &c < b) {
                    best = Some(c);
                }
            }
        }
    };
    rec(0, k, &cells, &mut pick, &mut visit);
    best.expect("equal masses always admit a vertex")
}

/// Least slack at which some joint on a product of binary spaces has each
/// given face within that slack (unit discrete metric, so L-infinity cost
/// is 1 off the diagonal). Solved in floating point as an independent
/// check; `fixed` pins the slack instead and returns whether it is feasible.
pub fn boundary_slack_f64(len: usize, faces: &BTreeMap<usize, DataTable>, fixed: Option<f64>) -> Option<f64> {
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let t = match fixed {
        None => p.add_var(1.0, (0.0, f64::INFINITY)),
        Some(v) => p.add_var(0.0, (v, v)),
    };
    let tuples: Vec<Vec<usize>> = (0..1usize << len).map(|b| (0..len).map(|i| (b >> i) & 1).collect()).collect();
    let joint: Vec<_> = tuples.iter().map(|_| p.add_var(0.0, (0.0, f64::INFINITY))).collect();
    for (&j, face) in faces {
        let keys: Vec<Vec<usize>> = (0..1usize << (len - 1)).map(|b| (0..len - 1).map(|i| (b >> i) & 1).collect()).collect();
        let pi: Vec<Vec<_>> = keys.iter().map(|_| keys.iter().map(|_| p.add_var(0.0, (0.0, f64::INFINITY))).collect()).collect();
        for (a, ka) in keys.iter().enumerate() {
            let mut row: Vec<_> = pi[a].iter().map(|&v| (v, 1.0)).collect();
            for (x, &v) in tuples.iter().zip(&joint) {
                let mut y = x.clone();
                y.remove(j);
                if &y == ka {
                    row.push((v, -1.0));
                }
            }
            p.add_constraint(row.as_slice(), ComparisonOp::Eq, 0.0);
        }
        for (b, kb) in keys.iter().enumerate() {
            let col: Vec<_> = pi.iter().map(|r| (r[b], 1.0)).collect();
            p.add_constraint(col.as_slice(), ComparisonOp::Eq, datacomplex::rational::to_f64(&face.mass_at(kb)));
        }
        let mut cost: Vec<_> = Vec::new();
        for (a, ka) in keys.iter().enumerate() {
            for (b, kb) in keys.iter().enumerate() {
                if ka != kb {
                    cost.push((pi[a][b], 1.0));
                }
            }
        }
        cost.push((t, -1.0));
        p.add_constraint(cost.as_slice(), ComparisonOp::Le, 0.0);
    }
    match p.solve() {
        Ok(s) => Some(s.objective().max(0.0)),
        Err(_) => None,
    }
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-7
}

/// Prints one line per acceptance criterion.
/// Writes straight to stderr so the line shows even when output is captured.
pub fn report(id: u32, name: &str, pass: bool, detail: &str) {
    use std::io::Write;
    let line = format!("{} criterion {id} ({name}): {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
}
