//! Exact graph edit distance.
//!
//! Both graphs are padded with null vertices to a common order `n`, and the
//! distance is the minimum number of differing AA-matrix entries over all
//! `n!` vertex alignments. Small orders are enumerated outright; larger ones
//! go through a branch-and-bound search with an assignment-based bound.
//!
//! Among alignments with the minimum distance, the one with the fewest edge
//! differences is preferred, so the `(d_v, d_e)` split is a function of the
//! two isomorphism classes. Remaining ties go to the lexicographically
//! smallest assignment, or to a uniformly random one when requested.

mod assignment;
mod edit;
mod search;

pub use assignment::min_assignment_cost;
pub use edit::{apply_edits, edits_from_alignment, EditError, EditOp};

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{AaMatrix, AttributedGraph, GraphError, Permutation, NULL_ATTR};

pub const DEFAULT_MAX_ORDER: usize = 16;
/// Orders up to this bound are solved by plain enumeration under
/// [`Strategy::Auto`].
pub const EXHAUSTIVE_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GedError {
    #[error("extended order {order} exceeds the configured maximum {max}")]
    Capacity { order: usize, max: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Enumeration up to [`EXHAUSTIVE_LIMIT`], branch-and-bound above.
    #[default]
    Auto,
    Exhaustive,
    BranchAndBound,
}

/// Solver settings. `Default` gives order cap 16 and the automatic strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GedSolver {
    pub max_order: usize,
    pub strategy: Strategy,
}

impl Default for GedSolver {
    fn default() -> Self {
        Self {
            max_order: DEFAULT_MAX_ORDER,
            strategy: Strategy::Auto,
        }
    }
}

/// Outcome of an exact GED computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GedResult {
    pub distance: u32,
    pub d_v: u32,
    pub d_e: u32,
    /// Permutation applied to the second graph's AA-matrix to align it with
    /// the first.
    pub alignment: Permutation,
    pub edits: Vec<EditOp>,
    /// Extended AA-matrix of the first graph.
    #[serde(skip)]
    pub source: AaMatrix,
    /// Extended AA-matrix of the second graph after alignment.
    #[serde(skip)]
    pub aligned_target: AaMatrix,
}

impl GedResult {
    pub fn order(&self) -> usize {
        self.source.order()
    }
}

impl GedSolver {
    pub fn with_max_order(max_order: usize) -> Self {
        Self {
            max_order,
            ..Self::default()
        }
    }

    pub fn with_strategy(self, strategy: Strategy) -> Self {
        Self { strategy, ..self }
    }

    pub fn solve(&self, g1: &AttributedGraph, g2: &AttributedGraph) -> Result<GedResult, GedError> {
        self.run(g1, g2, None)
    }

    /// Like [`solve`](Self::solve), but co-minimal alignments are chosen
    /// uniformly at random instead of lexicographically.
    pub fn solve_random_ties(
        &self,
        g1: &AttributedGraph,
        g2: &AttributedGraph,
        rng: &mut dyn RngCore,
    ) -> Result<GedResult, GedError> {
        self.run(g1, g2, Some(rng))
    }

    pub fn distance(&self, g1: &AttributedGraph, g2: &AttributedGraph) -> Result<u32, GedError> {
        Ok(self.solve(g1, g2)?.distance)
    }

    /// Whether the two graphs are at distance zero. Vertex attribute
    /// multisets and edge counts are compared before any search.
    pub fn is_zero(&self, g1: &AttributedGraph, g2: &AttributedGraph) -> Result<bool, GedError> {
        let n = g1.order().max(g2.order());
        if n > self.max_order {
            return Err(GedError::Capacity {
                order: n,
                max: self.max_order,
            });
        }
        let real = |g: &AttributedGraph| {
            let mut v: Vec<_> = g
                .attrs()
                .iter()
                .copied()
                .filter(|&a| a != NULL_ATTR)
                .collect();
            v.sort_unstable();
            v
        };
        if g1.edge_count() != g2.edge_count() || real(g1) != real(g2) {
            return Ok(false);
        }
        Ok(self.distance(g1, g2)? == 0)
    }

    fn run(
        &self,
        g1: &AttributedGraph,
        g2: &AttributedGraph,
        ties: Option<&mut dyn RngCore>,
    ) -> Result<GedResult, GedError> {
        let n = g1.order().max(g2.order());
        if n > self.max_order {
            return Err(GedError::Capacity {
                order: n,
                max: self.max_order,
            });
        }
        let source = g1.extend_with_nulls(n)?.to_aa_matrix();
        let target = g2.extend_with_nulls(n)?.to_aa_matrix();
        let pruning = match self.strategy {
            Strategy::Auto => n > EXHAUSTIVE_LIMIT,
            Strategy::Exhaustive => false,
            Strategy::BranchAndBound => true,
        };
        let outcome = search::search(n, source.entries(), target.entries(), pruning, ties);
        let alignment = Permutation::new(outcome.sigma)?.inverse();
        let aligned_target = target.permute(&alignment)?;
        let edits = edits_from_alignment(&source, &aligned_target)?;
        debug_assert_eq!(edits.len() as u32, outcome.total);
        Ok(GedResult {
            distance: outcome.total,
            d_v: outcome.total - outcome.edge,
            d_e: outcome.edge,
            alignment,
            edits,
            source,
            aligned_target,
        })
    }
}

/// Exact GED with default settings.
pub fn ged_exact(g1: &AttributedGraph, g2: &AttributedGraph) -> Result<GedResult, GedError> {
    GedSolver::default().solve(g1, g2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Attr;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(attrs: &[Attr], edges: &[(usize, usize)]) -> AttributedGraph {
        AttributedGraph::new(attrs.to_vec(), edges.iter().copied()).unwrap()
    }

    #[test]
    fn identical_graphs() {
        let a = g(&[1, 2, 3], &[(0, 1), (2, 0)]);
        let r = ged_exact(&a, &a).unwrap();
        assert_eq!(r.distance, 0);
        assert!(r.edits.is_empty());
        assert_eq!(r.alignment, Permutation::identity(3));
    }

    #[test]
    fn isomorphic_graphs() {
        let a = g(&[1, 2, 3], &[(0, 1), (1, 2)]);
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        let b = a.permute(&p).unwrap();
        let r = ged_exact(&a, &b).unwrap();
        assert_eq!(r.distance, 0);
        assert_eq!(r.aligned_target, r.source);
    }

    #[test]
    fn single_added_edge() {
        let a = g(&[1, 2, 3], &[(0, 1)]);
        let b = g(&[1, 2, 3], &[(0, 1), (1, 2)]);
        let r = ged_exact(&a, &b).unwrap();
        assert_eq!((r.distance, r.d_v, r.d_e), (1, 0, 1));
        assert_eq!(r.edits, vec![EditOp::AddEdge { from: 1, to: 2 }]);
    }

    #[test]
    fn different_orders_are_padded() {
        let a = g(&[1], &[]);
        let b = g(&[1, 2], &[(0, 1)]);
        let r = ged_exact(&a, &b).unwrap();
        assert_eq!((r.distance, r.d_v, r.d_e), (2, 1, 1));
        assert_eq!(r.order(), 2);
        let empty = AttributedGraph::empty();
        assert_eq!(ged_exact(&empty, &empty).unwrap().distance, 0);
        assert_eq!(ged_exact(&empty, &b).unwrap().distance, 3);
    }

    #[test]
    fn capacity_error() {
        let big = g(&[1; 5], &[]);
        let err = GedSolver::with_max_order(4).solve(&big, &big).unwrap_err();
        assert_eq!(err, GedError::Capacity { order: 5, max: 4 });
    }

    #[test]
    fn prefers_fewer_edge_differences_on_ties() {
        // Identity costs two edge flips, the swap costs two substitutions.
        let a = g(&[1, 2], &[(0, 1)]);
        let b = g(&[1, 2], &[(1, 0)]);
        for strategy in [Strategy::Exhaustive, Strategy::BranchAndBound] {
            let r = GedSolver::default()
                .with_strategy(strategy)
                .solve(&a, &b)
                .unwrap();
            assert_eq!((r.distance, r.d_v, r.d_e), (2, 2, 0));
            assert_eq!(r.alignment.as_slice(), &[1, 0]);
        }
    }

    #[test]
    fn strategies_agree_including_tie_break() {
        let a = g(&[1, 2, 3, 1, 2], &[(0, 1), (1, 2), (3, 4), (4, 0)]);
        let b = g(&[2, 1, 3, 1], &[(1, 0), (0, 2), (3, 1)]);
        let ex = GedSolver::default()
            .with_strategy(Strategy::Exhaustive)
            .solve(&a, &b)
            .unwrap();
        let bb = GedSolver::default()
            .with_strategy(Strategy::BranchAndBound)
            .solve(&a, &b)
            .unwrap();
        assert_eq!(ex, bb);
    }

    #[test]
    fn random_ties_stay_optimal() {
        let a = g(&[1, 1, 1, 1], &[]);
        let b = g(&[1, 1, 1, 1], &[(0, 1)]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..50 {
            let r = GedSolver::default()
                .solve_random_ties(&a, &b, &mut rng)
                .unwrap();
            assert_eq!(r.distance, 1);
            seen.insert(r.alignment.clone());
        }
        assert!(seen.len() > 1);
    }

    #[test]
    fn zero_check() {
        let solver = GedSolver::default();
        let a = g(&[1, 2, 3], &[(0, 1), (1, 2)]);
        let b = a
            .permute(&Permutation::new(vec![1, 2, 0]).unwrap())
            .unwrap();
        assert!(solver.is_zero(&a, &b).unwrap());
        assert!(solver
            .is_zero(&a, &a.extend_with_nulls(5).unwrap())
            .unwrap());
        assert!(!solver
            .is_zero(&a, &g(&[1, 2, 3], &[(0, 1), (2, 1)]))
            .unwrap());
        assert!(!solver.is_zero(&a, &g(&[1, 2, 3], &[(0, 1)])).unwrap());
    }

    #[test]
    fn larger_order_uses_branch_and_bound() {
        let attrs: Vec<Attr> = (0..10).map(|i| 1 + (i % 3) as Attr).collect();
        let a = g(
            &attrs,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (5, 6), (7, 8), (8, 9)],
        );
        let p = Permutation::new(vec![9, 3, 1, 0, 5, 2, 8, 4, 6, 7]).unwrap();
        let b = a.permute(&p).unwrap();
        assert_eq!(ged_exact(&a, &b).unwrap().distance, 0);
        let c = g(
            &attrs,
            &[(0, 1), (1, 2), (2, 3), (5, 6), (7, 8), (8, 9), (9, 0)],
        );
        assert_eq!(ged_exact(&a, &c).unwrap().distance, 2);
    }
}
