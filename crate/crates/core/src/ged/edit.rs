//! Elementary edit operations and their extraction from an aligned pair of
//! AA-matrices.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{AaMatrix, Attr, AttributedGraph, GraphError, NULL_ATTR};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EditError {
    #[error("edit {index}: vertex {vertex} out of range for order {order}")]
    OutOfRange {
        index: usize,
        vertex: usize,
        order: usize,
    },
    #[error("edit {index}: attribute must be positive")]
    NullAttribute { index: usize },
    #[error("edit {index}: edge endpoints must differ")]
    SelfLoop { index: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One unit-cost edit. Positions index the extended, aligned vertex space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EditOp {
    AddVertex { position: usize, attr: Attr },
    DeleteVertex { position: usize },
    SubstituteAttr { position: usize, attr: Attr },
    AddEdge { from: usize, to: usize },
    DeleteEdge { from: usize, to: usize },
}

impl EditOp {
    fn check(&self, index: usize, order: usize) -> Result<(), EditError> {
        let range = |vertex: usize| {
            if vertex < order {
                Ok(())
            } else {
                Err(EditError::OutOfRange {
                    index,
                    vertex,
                    order,
                })
            }
        };
        match *self {
            EditOp::AddVertex { position, attr } | EditOp::SubstituteAttr { position, attr } => {
                range(position)?;
                if attr == NULL_ATTR {
                    return Err(EditError::NullAttribute { index });
                }
            }
            EditOp::DeleteVertex { position } => range(position)?,
            EditOp::AddEdge { from, to } | EditOp::DeleteEdge { from, to } => {
                range(from)?;
                range(to)?;
                if from == to {
                    return Err(EditError::SelfLoop { index });
                }
            }
        }
        Ok(())
    }

    /// Writes this edit into the matrix entry it targets.
    pub fn apply_to(&self, m: &mut AaMatrix) {
        match *self {
            EditOp::AddVertex { position, attr } | EditOp::SubstituteAttr { position, attr } => {
                m.set(position, position, attr)
            }
            EditOp::DeleteVertex { position } => m.set(position, position, NULL_ATTR),
            EditOp::AddEdge { from, to } => m.set(from, to, 1),
            EditOp::DeleteEdge { from, to } => m.set(from, to, 0),
        }
    }

    pub fn is_vertex_edit(&self) -> bool {
        matches!(
            self,
            EditOp::AddVertex { .. } | EditOp::DeleteVertex { .. } | EditOp::SubstituteAttr { .. }
        )
    }

    /// Whether `self` must come before `other` in a sequential edit path:
    /// a vertex is added before edges touching it, and a vertex is deleted
    /// only after its edges.
    pub fn must_precede(&self, other: &EditOp) -> bool {
        let touches = |v: usize, from: usize, to: usize| v == from || v == to;
        match (*self, *other) {
            (EditOp::AddVertex { position, .. }, EditOp::AddEdge { from, to }) => {
                touches(position, from, to)
            }
            (EditOp::DeleteEdge { from, to }, EditOp::DeleteVertex { position }) => {
                touches(position, from, to)
            }
            _ => false,
        }
    }
}

/// One edit per differing entry: diagonal entries first in ascending index,
/// then off-diagonal entries in row-major order.
pub fn edits_from_alignment(
    a1: &AaMatrix,
    a2_aligned: &AaMatrix,
) -> Result<Vec<EditOp>, GraphError> {
    if a1.order() != a2_aligned.order() {
        return Err(GraphError::DimensionMismatch {
            left: a1.order(),
            right: a2_aligned.order(),
        });
    }
    let n = a1.order();
    let mut edits = Vec::new();
    for i in 0..n {
        let (from, to) = (a1.get(i, i), a2_aligned.get(i, i));
        if from == to {
            continue;
        }
        edits.push(match (from, to) {
            (NULL_ATTR, attr) => EditOp::AddVertex { position: i, attr },
            (_, NULL_ATTR) => EditOp::DeleteVertex { position: i },
            (_, attr) => EditOp::SubstituteAttr { position: i, attr },
        });
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            match (a1.get(i, j), a2_aligned.get(i, j)) {
                (0, 1) => edits.push(EditOp::AddEdge { from: i, to: j }),
                (1, 0) => edits.push(EditOp::DeleteEdge { from: i, to: j }),
                _ => {}
            }
        }
    }
    Ok(edits)
}

/// Applies `ops` entrywise to the AA-matrix of `g` (which must already be
/// extended to cover every position used). Null vertices are kept, but any
/// edge left touching one is dropped.
pub fn apply_edits(g: &AttributedGraph, ops: &[EditOp]) -> Result<AttributedGraph, EditError> {
    let mut m = g.to_aa_matrix();
    for (index, op) in ops.iter().enumerate() {
        op.check(index, m.order())?;
        op.apply_to(&mut m);
    }
    Ok(AttributedGraph::from_aa_matrix(&m))
}
