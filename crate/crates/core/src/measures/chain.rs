use super::DataTable;
use crate::error::{Error, Result};
use crate::simpattr::Chain2;
use std::collections::BTreeSet;

/// A Z/2 chain of tables at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableChain2 {
    level: isize,
    cells: BTreeSet<DataTable>,
}

impl TableChain2 {
    pub fn new(level: isize, cells: impl IntoIterator<Item = DataTable>) -> Result<Self> {
        let mut c = TableChain2 { level, cells: BTreeSet::new() };
        for t in cells {
            c.toggle(t)?;
        }
        Ok(c)
    }

    pub fn level(&self) -> isize {
        self.level
    }

    pub fn cells(&self) -> &BTreeSet<DataTable> {
        &self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn toggle(&mut self, t: DataTable) -> Result<()> {
        if t.list().level() != self.level {
            return Err(Error::ListMismatch(format!("{} is not at level {}", t.list(), self.level)));
        }
        if !self.cells.remove(&t) {
            self.cells.insert(t);
        }
        Ok(())
    }

    /// The attribute shadow `p`: each table replaced by its list, mod 2.
    pub fn shadow(&self) -> Chain2 {
        Chain2::new(self.level, self.cells.iter().map(|t| t.list().clone())).expect("levels agree")
    }
}

pub fn boundary_table_chain(y: &TableChain2) -> Result<TableChain2> {
    if y.level < 0 {
        return Err(Error::EmptyLevel);
    }
    let mut out = TableChain2 { level: y.level - 1, cells: BTreeSet::new() };
    for t in &y.cells {
        for i in 0..t.list().len() {
            out.toggle(t.marginalize(i)?)?;
        }
    }
    Ok(out)
}
