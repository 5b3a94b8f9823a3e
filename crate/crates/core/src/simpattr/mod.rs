//! Attribute lists and the maps between them.
//!
//! An [`AttributeList`] is a cell of the attribute simplicial set: faces
//! delete an entry, degeneracies repeat one. Inclusions are order-preserving
//! injective index maps that agree with the entries they select.

mod chain;
mod merge;

pub use chain::{boundary_chain, homology_rank, Chain2};
pub use merge::{merge_lists, MergeResult};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AttributeList(Vec<String>);

impl AttributeList {
    pub fn new<S: Into<String>>(entries: impl IntoIterator<Item = S>) -> Self {
        AttributeList(entries.into_iter().map(Into::into).collect())
    }

    pub fn empty() -> Self {
        AttributeList(Vec::new())
    }

    pub fn entries(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Grading level, `len - 1`; the empty list sits at level -1.
    pub fn level(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn get(&self, i: usize) -> Option<&str> {
        self.0.get(i).map(String::as_str)
    }

    pub fn face(&self, i: usize) -> Result<Self> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange { index: i, len: self.len() });
        }
        let mut v = self.0.clone();
        v.remove(i);
        Ok(AttributeList(v))
    }

    pub fn degeneracy(&self, i: usize) -> Result<Self> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange { index: i, len: self.len() });
        }
        let mut v = self.0.clone();
        v.insert(i, v[i].clone());
        Ok(AttributeList(v))
    }

    /// In the image of some degeneracy: two adjacent entries coincide.
    pub fn is_degenerate(&self) -> bool {
        self.0.windows(2).any(|w| w[0] == w[1])
    }

    /// Some attribute occurs more than once (adjacent or not).
    pub fn has_repeats(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        !self.0.iter().all(|a| seen.insert(a))
    }

    /// `self ∘ perm`: entry `i` of the result is entry `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.len())?;
        Ok(AttributeList(perm.iter().map(|&p| self.0[p].clone()).collect()))
    }

    /// Entries at the given positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> Result<Self> {
        positions
            .iter()
            .map(|&p| {
                self.0
                    .get(p)
                    .cloned()
                    .ok_or(Error::IndexOutOfRange { index: p, len: self.len() })
            })
            .collect::<Result<Vec<_>>>()
            .map(AttributeList)
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        AttributeList(v)
    }
}

impl fmt::Display for AttributeList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.join(","))
    }
}

impl<S: Into<String>, const N: usize> From<[S; N]> for AttributeList {
    fn from(a: [S; N]) -> Self {
        AttributeList::new(a)
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::NotPermutation(perm.to_vec()));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::NotPermutation(perm.to_vec()));
        }
        seen[p] = true;
    }
    Ok(())
}

pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

pub fn face_list(t: &AttributeList, i: usize) -> Result<AttributeList> {
    t.face(i)
}

pub fn degeneracy_list(t: &AttributeList, i: usize) -> Result<AttributeList> {
    t.degeneracy(i)
}

/// An order-preserving, entry-compatible injection `source ↪ target`.
///
/// Construction does not validate; use [`validate_inclusion`] or
/// [`AttributeInclusion::checked`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AttributeInclusion {
    pub source: AttributeList,
    pub target: AttributeList,
    pub map: Vec<usize>,
}

impl AttributeInclusion {
    pub fn new(source: AttributeList, target: AttributeList, map: Vec<usize>) -> Self {
        AttributeInclusion { source, target, map }
    }

    pub fn checked(source: AttributeList, target: AttributeList, map: Vec<usize>) -> Result<Self> {
        let inc = Self::new(source, target, map);
        inc.validate()?;
        Ok(inc)
    }

    /// The inclusion selecting `map` from `target`; the source is read off.
    pub fn from_map(target: &AttributeList, map: Vec<usize>) -> Result<Self> {
        let source = target.select(&map)?;
        Self::checked(source, target.clone(), map)
    }

    pub fn identity(t: &AttributeList) -> Self {
        Self::new(t.clone(), t.clone(), (0..t.len()).collect())
    }

    pub fn empty_into(t: &AttributeList) -> Self {
        Self::new(AttributeList::empty(), t.clone(), Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        if self.map.len() != self.source.len() {
            return Err(Error::InvalidInclusion(format!(
                "map has {} entries for a source of length {}",
                self.map.len(),
                self.source.len()
            )));
        }
        if let Some(w) = self.map.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInclusion(format!("map not strictly increasing at {:?}", w)));
        }
        for (i, &j) in self.map.iter().enumerate() {
            match self.target.get(j) {
                None => {
                    return Err(Error::InvalidInclusion(format!(
                        "map entry {j} outside target of length {}",
                        self.target.len()
                    )))
                }
                Some(a) if a != self.source.0[i] => {
                    return Err(Error::InvalidInclusion(format!(
                        "source entry {i} is {} but target entry {j} is {a}",
                        self.source.0[i]
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Target indices not hit by the map, ascending.
    pub fn complement_map(&self) -> Vec<usize> {
        let mut hit = vec![false; self.target.len()];
        for &j in &self.map {
            if j < hit.len() {
                hit[j] = true;
            }
        }
        (0..self.target.len()).filter(|&j| !hit[j]).collect()
    }

    /// `self ∘ inner`, where `inner.target == self.source`.
    pub fn compose(&self, inner: &AttributeInclusion) -> Result<AttributeInclusion> {
        if inner.target != self.source {
            return Err(Error::InvalidInclusion(format!(
                "cannot compose: {} is not {}",
                inner.target, self.source
            )));
        }
        let map = inner.map.iter().map(|&i| self.map[i]).collect();
        Ok(Self::new(inner.source.clone(), self.target.clone(), map))
    }
}

pub fn validate_inclusion(iota: &AttributeInclusion) -> bool {
    iota.validate().is_ok()
}

/// `T/ι` together with the complementary inclusion `ι^c : T/ι ↪ T`.
pub fn quotient(iota: &AttributeInclusion) -> Result<(AttributeList, AttributeInclusion)> {
    iota.validate()?;
    let cmap = iota.complement_map();
    let q = iota.target.select(&cmap)?;
    Ok((q.clone(), AttributeInclusion::new(q, iota.target.clone(), cmap)))
}

pub fn concat_sum(
    t1: &AttributeList,
    t2: &AttributeList,
) -> (AttributeList, AttributeInclusion, AttributeInclusion) {
    let sum = t1.concat(t2);
    let n1 = t1.len();
    let i1 = AttributeInclusion::new(t1.clone(), sum.clone(), (0..n1).collect());
    let i2 = AttributeInclusion::new(t2.clone(), sum.clone(), (n1..n1 + t2.len()).collect());
    (sum, i1, i2)
}

/// Face indices `j_0 ≤ … ≤ j_k` with `d_{j_0} ⋯ d_{j_k} target = source`.
///
/// The sequence is the ascending complement of the map. The composite is
/// applied right to left (largest index first), which is what
/// [`apply_faces`] does.
pub fn inclusion_to_faces(iota: &AttributeInclusion) -> Result<Vec<usize>> {
    iota.validate()?;
    Ok(iota.complement_map())
}

/// Applies `d_{j_0} ⋯ d_{j_k}` to a list, innermost (`j_k`) first.
pub fn apply_faces(t: &AttributeList, faces: &[usize]) -> Result<AttributeList> {
    faces.iter().rev().try_fold(t.clone(), |acc, &j| acc.face(j))
}

/// Every inclusion of `source` into `target`, in lexicographic map order.
pub fn all_inclusions(source: &AttributeList, target: &AttributeList) -> Vec<AttributeInclusion> {
    fn go(
        s: &[String],
        t: &[String],
        start: usize,
        acc: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if acc.len() == s.len() {
            out.push(acc.clone());
            return;
        }
        let need = s.len() - acc.len();
        for j in start..=t.len().saturating_sub(need) {
            if j < t.len() && t[j] == s[acc.len()] {
                acc.push(j);
                go(s, t, j + 1, acc, out);
                acc.pop();
            }
        }
    }
    let mut maps = Vec::new();
    go(source.entries(), target.entries(), 0, &mut Vec::new(), &mut maps);
    maps.into_iter()
        .map(|m| AttributeInclusion::new(source.clone(), target.clone(), m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> AttributeList {
        AttributeList::new(s.chars().map(|c| c.to_string()))
    }

    #[test]
    fn faces_and_degeneracies() {
        assert_eq!(l("abc").face(1).unwrap(), l("ac"));
        assert_eq!(l("a").face(0).unwrap(), l(""));
        assert_eq!(l("abc").face(2).unwrap().face(0).unwrap(), l("b"));
        assert_eq!(l("abc").face(0).unwrap().face(1).unwrap(), l("b"));
        assert_eq!(l("ab").degeneracy(0).unwrap(), l("aab"));
        assert_eq!(l("a").degeneracy(0).unwrap().face(0).unwrap(), l("a"));
        assert!(l("").face(0).is_err());
        assert!(l("ab").degeneracy(2).is_err());
    }

    #[test]
    fn degeneracy_identity_five_on_ab() {
        // s_i s_j = s_{j+1} s_i for i <= j, with i = j = 0
        let lhs = l("ab").degeneracy(0).unwrap().degeneracy(0).unwrap();
        let rhs = l("ab").degeneracy(0).unwrap().degeneracy(1).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, l("aaab"));
    }

    #[test]
    fn worked_inclusion() {
        let iota = AttributeInclusion::new(l("aaacd"), l("aaaaabccd"), vec![0, 1, 3, 7, 8]);
        assert!(validate_inclusion(&iota));
        let (q, c) = quotient(&iota).unwrap();
        assert_eq!(q, l("aabc"));
        assert_eq!(c.map, vec![2, 4, 5, 6]);
        assert!(validate_inclusion(&c));
        let faces = inclusion_to_faces(&iota).unwrap();
        assert_eq!(faces, vec![2, 4, 5, 6]);
        assert_eq!(apply_faces(&iota.target, &faces).unwrap(), iota.source);
    }

    #[test]
    fn inclusion_edge_cases() {
        let t = l("ab");
        assert!(validate_inclusion(&AttributeInclusion::identity(&t)));
        assert!(!validate_inclusion(&AttributeInclusion::new(l("ba"), t.clone(), vec![1, 0])));
        assert!(!validate_inclusion(&AttributeInclusion::new(l("b"), t.clone(), vec![0])));
        let (q, c) = quotient(&AttributeInclusion::identity(&t)).unwrap();
        assert!(q.is_empty() && c.map.is_empty());
        let (q, c) = quotient(&AttributeInclusion::empty_into(&t)).unwrap();
        assert_eq!(q, t);
        assert_eq!(c.map, vec![0, 1]);
        assert_eq!(inclusion_to_faces(&AttributeInclusion::empty_into(&t)).unwrap(), vec![0, 1]);
        assert!(inclusion_to_faces(&AttributeInclusion::identity(&t)).unwrap().is_empty());
    }

    #[test]
    fn sums() {
        let (s, i1, i2) = concat_sum(&l("aaacd"), &l("aabc"));
        assert_eq!(s, l("aaacdaabc"));
        assert_eq!(i1.map, (0..5).collect::<Vec<_>>());
        assert_eq!(i2.map, (5..9).collect::<Vec<_>>());
        assert_eq!(quotient(&i1).unwrap().1, i2);
        assert_eq!(quotient(&i2).unwrap().1, i1);
        assert_eq!(concat_sum(&l(""), &l("ab")).0, l("ab"));
        assert_eq!(concat_sum(&l("ab"), &l("")).0, l("ab"));
    }

    #[test]
    fn enumerates_inclusions() {
        let inc = all_inclusions(&l("a"), &l("aba"));
        assert_eq!(inc.iter().map(|i| i.map.clone()).collect::<Vec<_>>(), vec![vec![0], vec![2]]);
        assert_eq!(all_inclusions(&l(""), &l("ab")).len(), 1);
        assert_eq!(all_inclusions(&l("aa"), &l("aaa")).len(), 3);
        assert!(all_inclusions(&l("ba"), &l("ab")).is_empty());
    }

    #[test]
    fn degenerate_vs_repeats() {
        assert!(l("aab").is_degenerate());
        assert!(!l("aba").is_degenerate());
        assert!(l("aba").has_repeats());
    }
}
