use serde::{Deserialize, Serialize};

use super::model::SomModel;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{squared_distance, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormMapCell {
    pub node: usize,
    pub row: usize,
    pub col: usize,
    /// Record ids assigned to this node: the form family. Empty for a gap.
    pub members: Vec<u64>,
    /// Member nearest to the node weight.
    pub representative: Option<u64>,
}

impl FormMapCell {
    pub fn is_gap(&self) -> bool {
        self.members.is_empty()
    }
}

/// Every record placed on its best matching unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormMapGrid {
    pub width: usize,
    pub height: usize,
    pub cells: Vec<FormMapCell>,
}

impl FormMapGrid {
    pub fn occupied(&self) -> usize {
        self.cells.iter().filter(|c| !c.is_gap()).count()
    }

    pub fn gaps(&self) -> usize {
        self.cells.len() - self.occupied()
    }

    pub fn cell_of(&self, id: u64) -> Option<&FormMapCell> {
        self.cells.iter().find(|c| c.members.contains(&id))
    }

    pub fn member_count(&self) -> usize {
        self.cells.iter().map(|c| c.members.len()).sum()
    }
}

/// Assigns each `(id, feature row)` to its best matching unit. Unmatched
/// nodes become gaps.
pub fn build_form_map<T: Scalar>(
    model: &SomModel<T>,
    ids: &[u64],
    features: &Matrix<T>,
    workers: usize,
) -> Result<FormMapGrid> {
    if ids.len() != features.rows() {
        return Err(Error::Argument(format!("{} ids for {} rows", ids.len(), features.rows())));
    }
    let bmus = model.assign(features, workers)?;
    let mut cells: Vec<FormMapCell> = (0..model.node_count())
        .map(|node| {
            let (row, col) = model.coords(node);
            FormMapCell { node, row, col, members: Vec::new(), representative: None }
        })
        .collect();
    let mut best: Vec<Option<(T, usize)>> = vec![None; model.node_count()];
    for (i, &b) in bmus.iter().enumerate() {
        cells[b].members.push(ids[i]);
        let d = squared_distance(features.row(i), model.weight(b));
        if best[b].map_or(true, |(bd, _)| d < bd) {
            best[b] = Some((d, i));
        }
    }
    for (cell, b) in cells.iter_mut().zip(best) {
        cell.representative = b.map(|(_, i)| ids[i]);
    }
    Ok(FormMapGrid { width: model.width(), height: model.height(), cells })
}
