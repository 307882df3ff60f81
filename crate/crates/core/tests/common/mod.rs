#![allow(dead_code)]

use itertools::Itertools;
use proptest::prelude::*;
use rand::Rng;
use sepx_core::{AaMatrix, Attr, AttributedGraph, Permutation};

/// Order in `0..=max_order`, attributes in `1..=alphabet`, each ordered pair
/// an edge with probability `density`.
pub fn random_graph<R: Rng>(
    rng: &mut R,
    max_order: usize,
    alphabet: Attr,
    density: f64,
) -> AttributedGraph {
    let n = rng.random_range(0..=max_order);
    let attrs: Vec<Attr> = (0..n).map(|_| rng.random_range(1..=alphabet)).collect();
    let edges: Vec<(usize, usize)> = (0..n)
        .cartesian_product(0..n)
        .filter(|&(i, j)| i != j && rng.random_bool(density))
        .collect();
    AttributedGraph::new(attrs, edges).unwrap()
}

pub fn graph_strategy(max_order: usize) -> impl Strategy<Value = AttributedGraph> {
    (0..=max_order).prop_flat_map(|n| {
        (
            proptest::collection::vec(1u32..=3, n),
            proptest::collection::vec(proptest::bool::weighted(0.3), n * n),
        )
            .prop_map(move |(attrs, bits)| {
                let edges = (0..n)
                    .cartesian_product(0..n)
                    .filter(|&(i, j)| i != j && bits[i * n + j]);
                AttributedGraph::new(attrs, edges).unwrap()
            })
    })
}

pub fn permutation_strategy(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::new(v).unwrap())
}

/// Brute-force GED: the minimum entry difference over every permutation of
/// the padded second matrix, independent of the solver's search.
pub fn brute_force_ged(g1: &AttributedGraph, g2: &AttributedGraph) -> u32 {
    let n = g1.order().max(g2.order());
    let a = g1.extend_with_nulls(n).unwrap().to_aa_matrix();
    let b = g2.extend_with_nulls(n).unwrap().to_aa_matrix();
    (0..n)
        .permutations(n)
        .map(|p| {
            let pb = permute_entries(&b, &p);
            a.entries().iter().zip(&pb).filter(|(x, y)| x != y).count() as u32
        })
        .min()
        .unwrap_or(0)
}

/// `out[p[i]][p[j]] = m[i][j]`.
fn permute_entries(m: &AaMatrix, p: &[usize]) -> Vec<Attr> {
    let n = m.order();
    let mut out = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[p[i] * n + p[j]] = m.get(i, j);
        }
    }
    out
}

/// Two-sample Kolmogorov-Smirnov statistic on integer samples.
pub fn ks_statistic(a: &[u32], b: &[u32]) -> f64 {
    let max = a.iter().chain(b).copied().max().unwrap_or(0);
    let cdf = |s: &[u32], x: u32| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
    (0..=max)
        .map(|x| (cdf(a, x) - cdf(b, x)).abs())
        .fold(0.0, f64::max)
}

/// Critical KS value at level 0.001 for sample sizes `n` and `m`.
pub fn ks_critical(n: usize, m: usize) -> f64 {
    1.95 * (((n + m) as f64) / ((n * m) as f64)).sqrt()
}
