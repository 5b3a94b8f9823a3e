//! Fixtures shared by unit tests.

use crate::measures::DataTable;
use crate::rational::Rational;
use crate::schema::{Attribute, Schema, ValueSpace};
use crate::simpattr::AttributeList;
use rand::Rng;

/// Attributes `a`..`f` over `k` points with the discrete unit metric.
pub fn discrete_schema(k: usize) -> Schema {
    let space = ValueSpace::discrete("v", k, Rational::from_integer(1.into()));
    let attrs = "abcdefxyz".chars().map(|c| Attribute { name: c.to_string(), space: "v".into() }).collect();
    Schema::validated(vec![space], attrs).unwrap()
}

pub fn list(names: &str) -> AttributeList {
    AttributeList::new(names.chars().map(|c| c.to_string()))
}

pub fn tab(names: &str, atoms: &[(&[usize], Rational)]) -> DataTable {
    DataTable::new(list(names), atoms.iter().map(|(x, m)| (x.to_vec(), m.clone()))).unwrap()
}

/// The pair table `½δ(0,1) + ½δ(1,0)`.
pub fn anti(names: &str) -> DataTable {
    let h = Rational::new(1.into(), 2.into());
    tab(names, &[(&[0, 1], h.clone()), (&[1, 0], h)])
}

/// A random probability table with small integer weights and some zeros.
pub fn random_table<R: Rng>(rng: &mut R, names: &str, k: usize) -> DataTable {
    let l = list(names);
    let mut atoms = Vec::new();
    let mut x = vec![0; l.len()];
    loop {
        let w: i64 = if rng.gen_bool(0.3) { 0 } else { rng.gen_range(1..5) };
        atoms.push((x.clone(), Rational::from_integer(w.into())));
        let mut p = 0;
        while p < x.len() {
            x[p] += 1;
            if x[p] < k {
                break;
            }
            x[p] = 0;
            p += 1;
        }
        if p == x.len() {
            break;
        }
    }
    if atoms.iter().all(|(_, w)| w == &Rational::from_integer(0.into())) {
        atoms[0].1 = Rational::from_integer(1.into());
    }
    let t = DataTable::new(l, atoms).unwrap();
    let m = t.total_mass();
    t.scale(&(Rational::from_integer(1.into()) / m))
}
