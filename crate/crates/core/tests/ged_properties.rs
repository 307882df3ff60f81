mod common;

use common::{brute_force_ged, graph_strategy, permutation_strategy};
use proptest::prelude::*;
use sepx_core::ged::{apply_edits, ged_exact, GedSolver, Strategy as Search};
use sepx_core::AttributedGraph;

fn solver(strategy: Search) -> GedSolver {
    GedSolver::default().with_strategy(strategy)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn both_strategies_match_brute_force(g1 in graph_strategy(5), g2 in graph_strategy(5)) {
        let expected = brute_force_ged(&g1, &g2);
        let ex = solver(Search::Exhaustive).solve(&g1, &g2).unwrap();
        let bb = solver(Search::BranchAndBound).solve(&g1, &g2).unwrap();
        prop_assert_eq!(ex.distance, expected);
        prop_assert_eq!(&bb, &ex);
    }

    #[test]
    fn decomposition_and_edit_count(g1 in graph_strategy(5), g2 in graph_strategy(5)) {
        let r = ged_exact(&g1, &g2).unwrap();
        prop_assert_eq!(r.distance, r.d_v + r.d_e);
        prop_assert_eq!(r.edits.len() as u32, r.distance);
        let diff = r.source.distances(&r.aligned_target).unwrap();
        prop_assert_eq!((diff.total, diff.vertex, diff.edge), (r.distance, r.d_v, r.d_e));
    }

    #[test]
    fn edit_round_trip(g1 in graph_strategy(5), g2 in graph_strategy(5)) {
        let r = ged_exact(&g1, &g2).unwrap();
        let extended = g1.extend_with_nulls(r.order()).unwrap();
        let reached = apply_edits(&extended, &r.edits).unwrap();
        prop_assert_eq!(ged_exact(&reached, &g2).unwrap().distance, 0);
    }

    #[test]
    fn symmetry(g1 in graph_strategy(6), g2 in graph_strategy(6)) {
        let ab = ged_exact(&g1, &g2).unwrap();
        let ba = ged_exact(&g2, &g1).unwrap();
        prop_assert_eq!((ab.distance, ab.d_v, ab.d_e), (ba.distance, ba.d_v, ba.d_e));
    }

    #[test]
    fn triangle_inequality(g1 in graph_strategy(5), g2 in graph_strategy(5), g3 in graph_strategy(5)) {
        let d = |a: &AttributedGraph, b: &AttributedGraph| ged_exact(a, b).unwrap().distance;
        prop_assert!(d(&g1, &g3) <= d(&g1, &g2) + d(&g2, &g3));
    }

    #[test]
    fn isomorphism_invariance(
        (g2, p) in graph_strategy(6).prop_flat_map(|g| { let n = g.order(); (Just(g), permutation_strategy(n)) }),
        g1 in graph_strategy(6),
    ) {
        let plain = ged_exact(&g1, &g2).unwrap();
        let permuted = ged_exact(&g1, &g2.permute(&p).unwrap()).unwrap();
        prop_assert_eq!((plain.distance, plain.d_v, plain.d_e), (permuted.distance, permuted.d_v, permuted.d_e));
        prop_assert_eq!(ged_exact(&g2, &g2.permute(&p).unwrap()).unwrap().distance, 0);
    }

    #[test]
    fn graph_round_trips(g in graph_strategy(6)) {
        prop_assert_eq!(AttributedGraph::from_aa_matrix(&g.to_aa_matrix()), g.clone());
        let json = g.to_json_string();
        prop_assert_eq!(AttributedGraph::from_json_str(&json).unwrap(), g.clone());
        prop_assert!(g.extend_with_nulls(g.order() + 2).unwrap().strip_nulls().attrs().iter().all(|&a| a != 0));
    }

    #[test]
    fn permute_preserves_counts(
        (g, p) in graph_strategy(6).prop_flat_map(|g| { let n = g.order(); (Just(g), permutation_strategy(n)) }),
    ) {
        let m = g.to_aa_matrix();
        let pm = m.permute(&p).unwrap();
        let mut d1 = m.diagonal();
        let mut d2 = pm.diagonal();
        d1.sort_unstable();
        d2.sort_unstable();
        prop_assert_eq!(d1, d2);
        prop_assert_eq!(m.edge_ones(), pm.edge_ones());
    }

    #[test]
    fn matrix_distance_metric(a in graph_strategy(4), b in graph_strategy(4), c in graph_strategy(4)) {
        let pad = |g: &AttributedGraph| g.extend_with_nulls(4).unwrap().to_aa_matrix();
        let (a, b, c) = (pad(&a), pad(&b), pad(&c));
        let d = |x: &sepx_core::AaMatrix, y: &sepx_core::AaMatrix| x.distances(y).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        let (ac, ab, bc) = (d(&a, &c), d(&a, &b), d(&b, &c));
        prop_assert!(ac.total <= ab.total + bc.total);
        prop_assert!(ac.vertex <= ab.vertex + bc.vertex);
        prop_assert!(ac.edge <= ab.edge + bc.edge);
    }
}

#[test]
fn order_six_samples_match_brute_force() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(61);
    for _ in 0..30 {
        let g1 = common::random_graph(&mut rng, 6, 3, 0.3);
        let g2 = common::random_graph(&mut rng, 6, 3, 0.3);
        let bb = solver(Search::BranchAndBound).distance(&g1, &g2).unwrap();
        assert_eq!(bb, brute_force_ged(&g1, &g2));
    }
}

#[test]
fn branch_and_bound_at_order_twelve() {
    use rand::SeedableRng;
    use sepx_core::Permutation;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
    for _ in 0..3 {
        let attrs: Vec<u32> = (0..12).map(|i| 1 + (i % 4) as u32).collect();
        let mut edges: Vec<(usize, usize)> = (0..11).map(|i| (i, i + 1)).collect();
        edges.extend([(0, 5), (3, 9), (7, 2)]);
        let g = AttributedGraph::new(attrs, edges.clone()).unwrap();
        let p = Permutation::random(12, &mut rng);
        assert_eq!(ged_exact(&g, &g.permute(&p).unwrap()).unwrap().distance, 0);
        let mut fewer = edges;
        fewer.truncate(12);
        let h = AttributedGraph::new(g.attrs().to_vec(), fewer)
            .unwrap()
            .permute(&p)
            .unwrap();
        assert_eq!(ged_exact(&g, &h).unwrap().distance, 2);
    }
}
