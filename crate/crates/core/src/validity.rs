//! Offspring validity predicates.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::graph::{Attr, AttributedGraph, NULL_ATTR};

/// Constraints of a single-input, single-output cell space.
///
/// A graph is accepted when it is acyclic, has exactly one vertex carrying
/// `source_attr` and exactly one carrying `sink_attr`, every vertex lies on a
/// source-to-sink path, and the edge/vertex caps hold. Null vertices are
/// ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DagIoRules {
    pub source_attr: Attr,
    pub sink_attr: Attr,
    pub max_edges: Option<usize>,
    pub max_vertices: Option<usize>,
}

impl Default for DagIoRules {
    fn default() -> Self {
        Self {
            source_attr: 1,
            sink_attr: 2,
            max_edges: Some(9),
            max_vertices: Some(7),
        }
    }
}

impl DagIoRules {
    pub fn accepts(&self, g: &AttributedGraph) -> bool {
        let g = g.strip_nulls();
        let n = g.order();
        if self.max_vertices.is_some_and(|cap| n > cap)
            || self.max_edges.is_some_and(|cap| g.edge_count() > cap)
        {
            return false;
        }
        let find_unique = |attr: Attr| {
            let mut hits = g.attrs().iter().enumerate().filter(|(_, &a)| a == attr);
            match (hits.next(), hits.next()) {
                (Some((i, _)), None) => Some(i),
                _ => None,
            }
        };
        let (Some(source), Some(sink)) =
            (find_unique(self.source_attr), find_unique(self.sink_attr))
        else {
            return false;
        };
        if source == sink {
            return false;
        }

        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        let mut indegree = vec![0usize; n];
        for &(i, j) in g.edges() {
            succ[i].push(j);
            pred[j].push(i);
            indegree[j] += 1;
        }

        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut visited = 0;
        while let Some(v) = queue.pop_front() {
            visited += 1;
            for &w in &succ[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        if visited != n {
            return false;
        }

        let from_source = reachable(source, &succ);
        let to_sink = reachable(sink, &pred);
        (0..n).all(|v| from_source[v] && to_sink[v])
    }
}

fn reachable(start: usize, adj: &[Vec<usize>]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

pub type Predicate = Arc<dyn Fn(&AttributedGraph) -> bool + Send + Sync>;

#[derive(Clone, Default)]
pub enum Validity {
    #[default]
    Unconstrained,
    DagIo(DagIoRules),
    Custom(Predicate),
}

impl Validity {
    /// Unconstrained still rejects graphs with no real vertex.
    pub fn accepts(&self, g: &AttributedGraph) -> bool {
        match self {
            Validity::Unconstrained => g.attrs().iter().any(|&a| a != NULL_ATTR),
            Validity::DagIo(rules) => rules.accepts(g),
            Validity::Custom(f) => f(g),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Validity::Unconstrained => "unconstrained",
            Validity::DagIo(_) => "dag_io",
            Validity::Custom(_) => "custom",
        }
    }
}

impl fmt::Debug for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Validity::DagIo(rules) => f.debug_tuple("DagIo").field(rules).finish(),
            other => f.write_str(other.name()),
        }
    }
}
