//! Z/2 chains of attribute lists and their homology.

use super::AttributeList;
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

/// A set of cells of one level; duplicates cancel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain2 {
    level: isize,
    cells: BTreeSet<AttributeList>,
}

impl Chain2 {
    pub fn new(level: isize, cells: impl IntoIterator<Item = AttributeList>) -> Result<Self> {
        let mut c = Chain2 { level, cells: BTreeSet::new() };
        for cell in cells {
            c.toggle(cell)?;
        }
        Ok(c)
    }

    pub fn level(&self) -> isize {
        self.level
    }

    pub fn cells(&self) -> &BTreeSet<AttributeList> {
        &self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Adds a cell mod 2.
    pub fn toggle(&mut self, cell: AttributeList) -> Result<()> {
        if cell.level() != self.level {
            return Err(Error::ListMismatch(format!("{cell} is not at level {}", self.level)));
        }
        if !self.cells.remove(&cell) {
            self.cells.insert(cell);
        }
        Ok(())
    }
}

pub fn boundary_chain(y: &Chain2) -> Result<Chain2> {
    if y.level < 0 {
        return Err(Error::EmptyLevel);
    }
    let mut out = Chain2 { level: y.level - 1, cells: BTreeSet::new() };
    for cell in &y.cells {
        for i in 0..cell.len() {
            out.toggle(cell.face(i)?)?;
        }
    }
    Ok(out)
}

/// Rank of `H_k` over Z/2 of a face-closed set of lists, on normalized
/// chains (cells with adjacent repeats are quotiented out). Unaugmented:
/// `∂_0 = 0`, so the empty list plays no role.
pub fn homology_rank<'a>(complex: impl IntoIterator<Item = &'a AttributeList>, k: usize) -> Result<usize> {
    let cells: BTreeSet<&AttributeList> = complex.into_iter().collect();
    for c in &cells {
        if c.len() >= 2 {
            for i in 0..c.len() {
                let f = c.face(i)?;
                if !cells.contains(&f) {
                    return Err(Error::NotFaceClosed(format!("{f} (face {i} of {c}) is missing")));
                }
            }
        }
    }
    let at = |level: usize| -> Vec<&AttributeList> {
        cells.iter().copied().filter(|c| c.len() == level + 1 && !c.is_degenerate()).collect()
    };
    let ck = at(k);
    let rank_dk = if k == 0 { 0 } else { boundary_rank(&ck, &at(k - 1)) };
    let rank_dk1 = boundary_rank(&at(k + 1), &ck);
    Ok(ck.len() - rank_dk - rank_dk1)
}

fn boundary_rank(cells: &[&AttributeList], faces: &[&AttributeList]) -> usize {
    let index: BTreeMap<&AttributeList, usize> = faces.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let words = faces.len().div_ceil(64).max(1);
    let rows: Vec<Vec<u64>> = cells
        .iter()
        .map(|c| {
            let mut row = vec![0u64; words];
            for i in 0..c.len() {
                let f = c.face(i).expect("index in range");
                if let Some(&j) = index.get(&f) {
                    row[j / 64] ^= 1 << (j % 64);
                }
            }
            row
        })
        .collect();
    gf2_rank(rows)
}

pub(crate) fn gf2_rank(mut rows: Vec<Vec<u64>>) -> usize {
    let mut rank = 0;
    let bits = rows.first().map_or(0, |r| r.len() * 64);
    for col in 0..bits {
        let (w, b) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & b != 0) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] & b != 0 {
                row.iter_mut().zip(&pivot).for_each(|(x, y)| *x ^= y);
            }
        }
        rank += 1;
    }
    rank
}
