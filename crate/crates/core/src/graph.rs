//! Attributed directed graphs and their attributed-adjacency (AA) matrices.
//!
//! A graph is stored as a list of vertex attributes plus a set of ordered
//! edges. Attribute `0` is reserved for the null vertex, which pads a graph to
//! a larger order and never carries edges. The AA-matrix puts attributes on
//! the diagonal and 0/1 edge indicators everywhere else.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vertex attribute. `NULL_ATTR` marks a padding vertex.
pub type Attr = u32;

pub const NULL_ATTR: Attr = 0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edges[{index}]: self-loop on vertex {vertex}")]
    SelfLoop { index: usize, vertex: usize },
    #[error("edges[{index}]: endpoint {vertex} out of range for order {order}")]
    EndpointOutOfRange {
        index: usize,
        vertex: usize,
        order: usize,
    },
    #[error("edges[{index}]: endpoint {vertex} is a null vertex")]
    EdgeOnNullVertex { index: usize, vertex: usize },
    #[error("attrs[{index}]: attribute {value} is negative")]
    NegativeAttribute { index: usize, value: i64 },
    #[error("attrs[{index}]: attribute {value} does not fit in 32 bits")]
    AttributeTooLarge { index: usize, value: i64 },
    #[error("edges[{index}]: endpoint {value} is negative")]
    NegativeEndpoint { index: usize, value: i64 },
    #[error("edges[{index}]: expected a pair [i, j]")]
    MalformedEdge { index: usize },
    #[error("cannot shrink a graph of order {order} to order {requested}")]
    OrderTooSmall { order: usize, requested: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix entry ({row}, {col}) = {value} is not an edge indicator")]
    NonBinaryEdge { row: usize, col: usize, value: Attr },
    #[error("matrix has {len} entries, expected {expected}")]
    BadMatrixLength { len: usize, expected: usize },
    #[error("mapping is not a bijection on 0..{len}")]
    NotAPermutation { len: usize },
    #[error("invalid graph JSON: {0}")]
    Json(String),
}

/// Attributed directed graph with unlabeled edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AttributedGraph {
    attrs: Vec<Attr>,
    edges: BTreeSet<(usize, usize)>,
}

impl AttributedGraph {
    /// Builds a graph, checking self-loops, endpoint range, and that null
    /// vertices are isolated.
    pub fn new(
        attrs: Vec<Attr>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let order = attrs.len();
        let mut set = BTreeSet::new();
        for (index, (i, j)) in edges.into_iter().enumerate() {
            for v in [i, j] {
                if v >= order {
                    return Err(GraphError::EndpointOutOfRange {
                        index,
                        vertex: v,
                        order,
                    });
                }
            }
            if i == j {
                return Err(GraphError::SelfLoop { index, vertex: i });
            }
            for v in [i, j] {
                if attrs[v] == NULL_ATTR {
                    return Err(GraphError::EdgeOnNullVertex { index, vertex: v });
                }
            }
            set.insert((i, j));
        }
        Ok(Self { attrs, edges: set })
    }

    pub fn empty() -> Self {
        Self {
            attrs: Vec::new(),
            edges: BTreeSet::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.attrs.len()
    }

    pub fn attrs(&self) -> &[Attr] {
        &self.attrs
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i, j))
    }

    /// Number of non-null vertices.
    pub fn real_order(&self) -> usize {
        self.attrs.iter().filter(|&&a| a != NULL_ATTR).count()
    }

    pub fn to_aa_matrix(&self) -> AaMatrix {
        let n = self.order();
        let mut entries = vec![0; n * n];
        for (i, &a) in self.attrs.iter().enumerate() {
            entries[i * n + i] = a;
        }
        for &(i, j) in &self.edges {
            entries[i * n + j] = 1;
        }
        AaMatrix { n, entries }
    }

    /// Inverse of [`to_aa_matrix`](Self::to_aa_matrix). Edges touching a null
    /// vertex are dropped, so every matrix produced by the variation
    /// operators maps to a valid graph.
    pub fn from_aa_matrix(m: &AaMatrix) -> Self {
        let n = m.n;
        let attrs: Vec<Attr> = (0..n).map(|i| m.get(i, i)).collect();
        let mut edges = BTreeSet::new();
        for i in 0..n {
            if attrs[i] == NULL_ATTR {
                continue;
            }
            for (j, &aj) in attrs.iter().enumerate() {
                if i != j && aj != NULL_ATTR && m.get(i, j) != 0 {
                    edges.insert((i, j));
                }
            }
        }
        Self { attrs, edges }
    }

    /// Pads the graph with isolated null vertices up to `order`.
    pub fn extend_with_nulls(&self, order: usize) -> Result<Self, GraphError> {
        if order < self.order() {
            return Err(GraphError::OrderTooSmall {
                order: self.order(),
                requested: order,
            });
        }
        let mut attrs = self.attrs.clone();
        attrs.resize(order, NULL_ATTR);
        Ok(Self {
            attrs,
            edges: self.edges.clone(),
        })
    }

    /// Removes every null vertex and reindexes the survivors, keeping their
    /// relative order.
    pub fn strip_nulls(&self) -> Self {
        let mut remap = vec![usize::MAX; self.order()];
        let mut attrs = Vec::with_capacity(self.order());
        for (i, &a) in self.attrs.iter().enumerate() {
            if a != NULL_ATTR {
                remap[i] = attrs.len();
                attrs.push(a);
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(i, j)| remap[i] != usize::MAX && remap[j] != usize::MAX)
            .map(|&(i, j)| (remap[i], remap[j]))
            .collect();
        Self { attrs, edges }
    }

    /// Relabels vertices: vertex `i` moves to position `p(i)`.
    pub fn permute(&self, p: &Permutation) -> Result<Self, GraphError> {
        if p.len() != self.order() {
            return Err(GraphError::DimensionMismatch {
                left: self.order(),
                right: p.len(),
            });
        }
        let mut attrs = vec![NULL_ATTR; self.order()];
        for (i, &a) in self.attrs.iter().enumerate() {
            attrs[p.apply(i)] = a;
        }
        let edges = self
            .edges
            .iter()
            .map(|&(i, j)| (p.apply(i), p.apply(j)))
            .collect();
        Ok(Self { attrs, edges })
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.range((v, 0)..(v + 1, 0)).count()
    }

    pub fn from_json_str(s: &str) -> Result<Self, GraphError> {
        let raw: RawGraph = serde_json::from_str(s).map_err(|e| GraphError::Json(e.to_string()))?;
        raw.try_into()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("graph serialization is infallible")
    }
}

impl fmt::Display for AttributedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json_string())
    }
}

/// Wire form: `{"attrs":[int,...],"edges":[[i,j],...]}`.
#[derive(Serialize, Deserialize)]
struct RawGraph {
    attrs: Vec<i64>,
    #[serde(default)]
    edges: Vec<Vec<i64>>,
}

impl TryFrom<RawGraph> for AttributedGraph {
    type Error = GraphError;

    fn try_from(raw: RawGraph) -> Result<Self, GraphError> {
        let mut attrs = Vec::with_capacity(raw.attrs.len());
        for (index, &value) in raw.attrs.iter().enumerate() {
            if value < 0 {
                return Err(GraphError::NegativeAttribute { index, value });
            }
            let a = Attr::try_from(value)
                .map_err(|_| GraphError::AttributeTooLarge { index, value })?;
            attrs.push(a);
        }
        let mut edges = Vec::with_capacity(raw.edges.len());
        for (index, pair) in raw.edges.iter().enumerate() {
            let [i, j] = pair[..] else {
                return Err(GraphError::MalformedEdge { index });
            };
            let to_index = |value: i64| {
                usize::try_from(value).map_err(|_| GraphError::NegativeEndpoint { index, value })
            };
            edges.push((to_index(i)?, to_index(j)?));
        }
        AttributedGraph::new(attrs, edges)
    }
}

impl Serialize for AttributedGraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawGraph {
            attrs: self.attrs.iter().map(|&a| i64::from(a)).collect(),
            edges: self
                .edges
                .iter()
                .map(|&(i, j)| vec![i as i64, j as i64])
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AttributedGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawGraph::deserialize(deserializer)?;
        raw.try_into().map_err(serde::de::Error::custom)
    }
}

/// Square attributed adjacency matrix, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AaMatrix {
    n: usize,
    entries: Vec<Attr>,
}

impl AaMatrix {
    /// Checks shape and that off-diagonal entries are 0/1. Edges on null
    /// rows are allowed here; [`AttributedGraph::from_aa_matrix`] drops them.
    pub fn from_entries(n: usize, entries: Vec<Attr>) -> Result<Self, GraphError> {
        if entries.len() != n * n {
            return Err(GraphError::BadMatrixLength {
                len: entries.len(),
                expected: n * n,
            });
        }
        for row in 0..n {
            for col in 0..n {
                let value = entries[row * n + col];
                if row != col && value > 1 {
                    return Err(GraphError::NonBinaryEdge { row, col, value });
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn from_rows(rows: &[Vec<Attr>]) -> Result<Self, GraphError> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(GraphError::DimensionMismatch {
                left: n,
                right: bad.len(),
            });
        }
        Self::from_entries(n, rows.concat())
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Attr {
        self.entries[row * self.n + col]
    }

    #[inline]
    pub(crate) fn set(&mut self, row: usize, col: usize, value: Attr) {
        self.entries[row * self.n + col] = value;
    }

    pub fn entries(&self) -> &[Attr] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Attr>> {
        self.entries
            .chunks(self.n.max(1))
            .take(self.n)
            .map(<[Attr]>::to_vec)
            .collect()
    }

    pub fn diagonal(&self) -> Vec<Attr> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Number of off-diagonal ones.
    pub fn edge_ones(&self) -> usize {
        let mut count = 0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && self.get(i, j) != 0 {
                    count += 1;
                }
            }
        }
        count
    }

    /// Conjugation by the permutation matrix of `p`:
    /// `result[p(i)][p(j)] = self[i][j]`.
    pub fn permute(&self, p: &Permutation) -> Result<Self, GraphError> {
        if p.len() != self.n {
            return Err(GraphError::DimensionMismatch {
                left: self.n,
                right: p.len(),
            });
        }
        let n = self.n;
        let mut entries = vec![0; n * n];
        for i in 0..n {
            let pi = p.apply(i);
            for j in 0..n {
                entries[pi * n + p.apply(j)] = self.entries[i * n + j];
            }
        }
        Ok(Self { n, entries })
    }

    /// Entry-difference counts split into diagonal and off-diagonal parts.
    pub fn distances(&self, other: &AaMatrix) -> Result<MatrixDistance, GraphError> {
        if self.n != other.n {
            return Err(GraphError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let n = self.n;
        let mut vertex = 0;
        let mut edge = 0;
        for i in 0..n {
            for j in 0..n {
                if self.entries[i * n + j] != other.entries[i * n + j] {
                    if i == j {
                        vertex += 1;
                    } else {
                        edge += 1;
                    }
                }
            }
        }
        Ok(MatrixDistance {
            total: vertex + edge,
            vertex,
            edge,
        })
    }
}

/// Entry-difference count between two equal-order AA-matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MatrixDistance {
    pub total: u32,
    /// Differing diagonal entries.
    pub vertex: u32,
    /// Differing off-diagonal entries.
    pub edge: u32,
}

/// A bijection on `0..n`, stored as the image of each index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn new(mapping: Vec<usize>) -> Result<Self, GraphError> {
        let len = mapping.len();
        let mut seen = vec![false; len];
        for &t in &mapping {
            if t >= len || std::mem::replace(&mut seen[t], true) {
                return Err(GraphError::NotAPermutation { len });
            }
        }
        Ok(Self(mapping))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &t) in self.0.iter().enumerate() {
            inv[t] = i;
        }
        Self(inv)
    }

    pub fn random<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        use rand::seq::SliceRandom;
        let mut mapping: Vec<usize> = (0..n).collect();
        mapping.shuffle(rng);
        Self(mapping)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(attrs: &[Attr], edges: &[(usize, usize)]) -> AttributedGraph {
        AttributedGraph::new(attrs.to_vec(), edges.iter().copied()).unwrap()
    }

    #[test]
    fn aa_matrix_of_small_graphs() {
        assert_eq!(
            g(&[1, 2], &[(0, 1)]).to_aa_matrix().rows(),
            vec![vec![1, 1], vec![0, 2]]
        );
        assert_eq!(g(&[3], &[]).to_aa_matrix().rows(), vec![vec![3]]);
        let m = g(&[1, 2, 3], &[(0, 1), (1, 2)]).to_aa_matrix();
        assert_eq!(m.edge_ones(), 2);
        assert_eq!(m.diagonal(), vec![1, 2, 3]);
    }

    #[test]
    fn from_matrix_drops_edges_on_nulls() {
        let m = AaMatrix::from_rows(&[vec![1, 1], vec![0, 2]]).unwrap();
        assert_eq!(AttributedGraph::from_aa_matrix(&m), g(&[1, 2], &[(0, 1)]));

        let m = AaMatrix::from_rows(&[vec![0, 1], vec![0, 2]]).unwrap();
        let back = AttributedGraph::from_aa_matrix(&m);
        assert_eq!(back.attrs(), &[0, 2]);
        assert!(back.edges().is_empty());

        let m = AaMatrix::from_rows(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(AttributedGraph::from_aa_matrix(&m), g(&[1, 1, 1], &[]));
    }

    #[test]
    fn rejects_invalid_graphs() {
        assert!(matches!(
            AttributedGraph::new(vec![1, 2], [(0, 0)]),
            Err(GraphError::SelfLoop { .. })
        ));
        assert!(matches!(
            AttributedGraph::new(vec![1, 2], [(0, 2)]),
            Err(GraphError::EndpointOutOfRange { .. })
        ));
        assert!(matches!(
            AttributedGraph::new(vec![1, 0], [(0, 1)]),
            Err(GraphError::EdgeOnNullVertex { .. })
        ));
        assert!(AaMatrix::from_rows(&[vec![1, 2], vec![0, 1]]).is_err());
    }

    #[test]
    fn extend_and_strip() {
        let base = g(&[1, 2], &[(1, 0)]);
        let ext = base.extend_with_nulls(4).unwrap();
        assert_eq!(ext.order(), 4);
        assert_eq!(&ext.attrs()[..2], base.attrs());
        assert_eq!(&ext.attrs()[2..], &[0, 0]);
        assert_eq!(base.extend_with_nulls(2).unwrap(), base);
        assert!(base.extend_with_nulls(1).is_err());
        assert_eq!(ext.strip_nulls(), base);

        let mixed = g(&[0, 3, 0, 4, 0], &[(3, 1)]);
        let stripped = mixed.strip_nulls();
        assert_eq!(stripped, g(&[3, 4], &[(1, 0)]));
        assert_eq!(base.strip_nulls(), base);
    }

    #[test]
    fn permute_by_swap() {
        let m = AaMatrix::from_rows(&[vec![1, 1], vec![0, 2]]).unwrap();
        let swap = Permutation::new(vec![1, 0]).unwrap();
        assert_eq!(
            m.permute(&swap).unwrap().rows(),
            vec![vec![2, 0], vec![1, 1]]
        );
        assert_eq!(m.permute(&Permutation::identity(2)).unwrap(), m);
        assert!(m.permute(&Permutation::identity(3)).is_err());
    }

    #[test]
    fn permute_then_inverse_is_identity() {
        let m = g(&[1, 2, 3, 4], &[(0, 1), (2, 3), (3, 0)]).to_aa_matrix();
        let p = Permutation::new(vec![2, 0, 3, 1]).unwrap();
        let back = m.permute(&p).unwrap().permute(&p.inverse()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn graph_and_matrix_permutations_agree() {
        let graph = g(&[1, 2, 3], &[(0, 1), (1, 2)]);
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        assert_eq!(
            graph.permute(&p).unwrap().to_aa_matrix(),
            graph.to_aa_matrix().permute(&p).unwrap()
        );
    }

    #[test]
    fn matrix_distance_counts() {
        let a = AaMatrix::from_rows(&[vec![1, 1, 0], vec![0, 2, 0], vec![1, 0, 3]]).unwrap();
        assert_eq!(a.distances(&a).unwrap(), MatrixDistance::default());
        let b = AaMatrix::from_rows(&[vec![1, 0, 0], vec![0, 4, 1], vec![1, 0, 3]]).unwrap();
        let d = a.distances(&b).unwrap();
        assert_eq!((d.total, d.vertex, d.edge), (3, 1, 2));
        let c = AaMatrix::from_rows(&[vec![1]]).unwrap();
        assert!(a.distances(&c).is_err());
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        assert_eq!(
            Permutation::new(vec![1, 2, 0])
                .unwrap()
                .inverse()
                .as_slice(),
            &[2, 0, 1]
        );
    }

    #[test]
    fn json_round_trip_and_errors() {
        let graph = g(&[1, 2, 3], &[(0, 1), (1, 2)]);
        let s = graph.to_json_string();
        assert_eq!(s, r#"{"attrs":[1,2,3],"edges":[[0,1],[1,2]]}"#);
        assert_eq!(AttributedGraph::from_json_str(&s).unwrap(), graph);

        let err = AttributedGraph::from_json_str(r#"{"attrs":[1,-2],"edges":[]}"#).unwrap_err();
        assert!(err.to_string().contains("attrs[1]"), "{err}");
        let err =
            AttributedGraph::from_json_str(r#"{"attrs":[1,2],"edges":[[0,1],[1,1]]}"#).unwrap_err();
        assert!(err.to_string().contains("edges[1]"), "{err}");
        let err = AttributedGraph::from_json_str(r#"{"attrs":[1,2],"edges":[[0,5]]}"#).unwrap_err();
        assert!(err.to_string().contains("out of range"), "{err}");
        let err = AttributedGraph::from_json_str(r#"{"attrs":[1,2],"edges":[[0]]}"#).unwrap_err();
        assert!(matches!(err, GraphError::MalformedEdge { index: 0 }));
        assert!(AttributedGraph::from_json_str(r#"{"edges":[]}"#).is_err());
    }
}
