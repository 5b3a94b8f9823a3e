//! Merged indexing of two lists along a shared sublist.
//!
//! Between consecutive anchors (images of the shared list) the private
//! segment of `T01` is emitted before the private segment of `T02`; the
//! trailing segments follow the last anchor in the same order.

use super::{quotient, AttributeInclusion, AttributeList};
use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MergeResult {
    pub merged: AttributeList,
    pub mu01: AttributeInclusion,
    pub mu02: AttributeInclusion,
    pub iota0: AttributeInclusion,
    pub iota1: AttributeInclusion,
    pub iota2: AttributeInclusion,
}

pub fn merge_lists(
    t01: &AttributeList,
    t02: &AttributeList,
    i01: &AttributeInclusion,
    i02: &AttributeInclusion,
) -> Result<MergeResult> {
    i01.validate()?;
    i02.validate()?;
    if i01.source != i02.source {
        return Err(Error::InvalidInclusion(format!(
            "overlap sources differ: {} vs {}",
            i01.source, i02.source
        )));
    }
    if &i01.target != t01 || &i02.target != t02 {
        return Err(Error::InvalidInclusion("inclusions do not target the given lists".into()));
    }

    let mut merged = Vec::with_capacity(t01.len() + t02.len() - i01.map.len());
    let mut mu01 = vec![0; t01.len()];
    let mut mu02 = vec![0; t02.len()];
    let (mut iota0, mut iota1, mut iota2) = (Vec::new(), Vec::new(), Vec::new());
    let (mut next01, mut next02) = (0, 0);

    let emit_segment = |lo: usize, hi: usize, list: &AttributeList, mu: &mut Vec<usize>, out: &mut Vec<usize>, merged: &mut Vec<String>| {
        for j in lo..hi {
            mu[j] = merged.len();
            out.push(merged.len());
            merged.push(list.entries()[j].clone());
        }
    };

    for (&a01, &a02) in i01.map.iter().zip(&i02.map) {
        emit_segment(next01, a01, t01, &mut mu01, &mut iota1, &mut merged);
        emit_segment(next02, a02, t02, &mut mu02, &mut iota2, &mut merged);
        mu01[a01] = merged.len();
        mu02[a02] = merged.len();
        iota0.push(merged.len());
        merged.push(t01.entries()[a01].clone());
        next01 = a01 + 1;
        next02 = a02 + 1;
    }
    emit_segment(next01, t01.len(), t01, &mut mu01, &mut iota1, &mut merged);
    emit_segment(next02, t02.len(), t02, &mut mu02, &mut iota2, &mut merged);

    let merged = AttributeList::new(merged);
    let t1 = quotient(i01)?.0;
    let t2 = quotient(i02)?.0;
    Ok(MergeResult {
        mu01: AttributeInclusion::new(t01.clone(), merged.clone(), mu01),
        mu02: AttributeInclusion::new(t02.clone(), merged.clone(), mu02),
        iota0: AttributeInclusion::new(i01.source.clone(), merged.clone(), iota0),
        iota1: AttributeInclusion::new(t1, merged.clone(), iota1),
        iota2: AttributeInclusion::new(t2, merged.clone(), iota2),
        merged,
    })
}
