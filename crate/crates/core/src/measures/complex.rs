//! Finitely generated data complexes and their structural predicates.

use super::DataTable;
use crate::error::{Error, Result};
use crate::schema::Schema;
use crate::simpattr::{AttributeInclusion, AttributeList};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

#[derive(Clone, Debug)]
pub struct DataComplexGen {
    pub schema: Schema,
    pub generators: Vec<DataTable>,
    pub closed_under_permutation: bool,
}

impl DataComplexGen {
    pub fn new(schema: Schema, generators: Vec<DataTable>) -> Result<Self> {
        for g in &generators {
            g.check(&schema)?;
        }
        Ok(DataComplexGen { schema, generators, closed_under_permutation: false })
    }

    pub fn with_permutations(mut self, flag: bool) -> Self {
        self.closed_under_permutation = flag;
        self
    }
}

/// All tables reachable from the generators by faces, degeneracies and (if
/// flagged) permutations, restricted to lists of length at most `max_len`.
///
/// Faces are followed through longer intermediate tables too, so a long
/// generator still contributes its short marginals.
pub fn closure_up_to(c: &DataComplexGen, max_len: i64) -> Result<BTreeSet<DataTable>> {
    if max_len < 0 {
        return Err(Error::InvalidArgument(format!("max_len {max_len} < 0")));
    }
    let max_len = max_len as usize;
    let mut seen: BTreeSet<DataTable> = BTreeSet::new();
    let mut queue: VecDeque<DataTable> = VecDeque::new();
    for g in &c.generators {
        if seen.insert(g.clone()) {
            queue.push_back(g.clone());
        }
    }
    while let Some(t) = queue.pop_front() {
        let n = t.list().len();
        let mut next = Vec::new();
        for i in 0..n {
            next.push(t.marginalize(i)?);
            if n < max_len {
                next.push(t.diagonal(i)?);
            }
            if c.closed_under_permutation && i + 1 < n {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.swap(i, i + 1);
                next.push(t.permute(&perm)?);
            }
        }
        for u in next {
            if !seen.contains(&u) {
                seen.insert(u.clone());
                queue.push_back(u);
            }
        }
    }
    seen.retain(|t| t.list().len() <= max_len);
    Ok(seen)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlignmentFailure {
    pub left: AttributeInclusion,
    pub right: AttributeInclusion,
    pub left_table: usize,
    pub right_table: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WellAligned {
    pub aligned: bool,
    pub failure: Option<AlignmentFailure>,
    /// The closure tables, in canonical order; failure indices point here.
    #[serde(skip)]
    pub tables: Vec<DataTable>,
}

/// Every pair of closure tables agrees on every common reduction.
///
/// Reductions are grouped by their source list; the complex is aligned iff
/// each group holds a single table.
pub fn is_well_aligned(c: &DataComplexGen, max_len: i64) -> Result<WellAligned> {
    let tables: Vec<DataTable> = closure_up_to(c, max_len)?.into_iter().collect();
    let mut first: BTreeMap<AttributeList, (usize, AttributeInclusion, DataTable)> = BTreeMap::new();
    for (ti, t) in tables.iter().enumerate() {
        let n = t.list().len();
        for mask in 0u64..(1u64 << n) {
            let map: Vec<usize> = (0..n).filter(|&p| mask >> p & 1 == 1).collect();
            let iota = AttributeInclusion::from_map(t.list(), map)?;
            let r = t.reduce(&iota)?;
            match first.get(&iota.source) {
                None => {
                    first.insert(iota.source.clone(), (ti, iota, r));
                }
                Some((tj, other, r0)) if *r0 != r => {
                    let failure = AlignmentFailure {
                        left: other.clone(),
                        right: iota,
                        left_table: *tj,
                        right_table: ti,
                    };
                    return Ok(WellAligned { aligned: false, failure: Some(failure), tables });
                }
                _ => {}
            }
        }
    }
    Ok(WellAligned { aligned: true, failure: None, tables })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Connectivity {
    pub connected: bool,
    /// Generator indices per component, each sorted, components ordered by
    /// their smallest member.
    pub components: Vec<Vec<usize>>,
}

/// Generators are linked when they share an attribute whose single-attribute
/// marginals coincide; any nonempty matching overlap reduces to such a link.
pub fn is_path_connected(c: &DataComplexGen) -> Result<Connectivity> {
    let k = c.generators.len();
    let marginals: Vec<Vec<(String, DataTable)>> = c
        .generators
        .iter()
        .map(|g| {
            (0..g.list().len())
                .map(|p| {
                    let r = g.project(&[p], AttributeList::new([g.list().entries()[p].clone()]));
                    (g.list().entries()[p].clone(), r)
                })
                .collect()
        })
        .collect();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for a in 0..k {
        for b in a + 1..k {
            let linked = marginals[a]
                .iter()
                .any(|(na, ma)| marginals[b].iter().any(|(nb, mb)| na == nb && ma == mb));
            if linked {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for g in 0..k {
        let r = find(&mut parent, g);
        groups.entry(r).or_default().push(g);
    }
    let components: Vec<Vec<usize>> = groups.into_values().collect();
    Ok(Connectivity { connected: components.len() <= 1, components })
}
