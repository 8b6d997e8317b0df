mod common;

use proptest::prelude::*;
use subnet_core::cliques::{enumerate_r_cliques, temp_graph};
use subnet_core::io::{parse_edge_list, write_edge_list};
use subnet_core::scheduler::schedule;
use subnet_core::selection::{
    aggressive_centralized, check_view_consistency, conservative_select, verify_aggressive,
    verify_conservative,
};
use subnet_core::{ConflictGraph, UserId};

/// Random graph on `2..=max_n` users from an edge mask.
fn graph(max_n: usize) -> impl Strategy<Value = ConflictGraph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
            let edges: Vec<_> = pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e).collect();
            ConflictGraph::from_edges(n, edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjacency_is_symmetric(g in graph(12)) {
        for u in g.users() {
            prop_assert!(!g.is_adjacent(u, u));
            for &v in g.neighbors(u).unwrap() {
                prop_assert!(g.is_adjacent(v, u));
            }
        }
        prop_assert_eq!(g.edges().count(), g.edge_count());
    }

    #[test]
    fn edge_list_round_trip(g in graph(12)) {
        prop_assert_eq!(parse_edge_list(&write_edge_list(&g)).unwrap(), g);
    }

    #[test]
    fn ball_matches_bfs(g in graph(12), c in 0usize..12, tau in 0usize..5) {
        let c = UserId(c % g.n());
        let view = g.ball(c, tau).unwrap();
        let dist = common::bfs(&g, c);
        for u in g.users() {
            prop_assert_eq!(view.contains(u), dist[u.0].is_some_and(|d| d <= tau));
        }
        for a in view.subgraph.users() {
            for b in view.subgraph.users() {
                prop_assert_eq!(
                    view.subgraph.is_adjacent(a, b),
                    g.is_adjacent(view.to_global(a), view.to_global(b))
                );
            }
        }
    }

    #[test]
    fn cliques_match_subset_oracle(g in graph(8), rho in 1usize..=3) {
        prop_assert_eq!(enumerate_r_cliques(&g, rho).unwrap(), common::r_cliques(&g, rho));
    }

    #[test]
    fn temp_graph_edges_follow_interference(g in graph(9), rho in 0usize..=2) {
        let t = temp_graph(&g, rho).unwrap();
        for i in 0..t.len() {
            for j in 0..t.len() {
                let want = i != j && common::interfere(&g, &t.vertex(i).members, &t.vertex(j).members);
                prop_assert_eq!(t.is_adjacent(i, j), want);
            }
        }
    }

    #[test]
    fn selections_keep_their_properties(g in graph(11), rho in 1usize..=2, seed in any::<u64>()) {
        let t = temp_graph(&g, rho).unwrap();
        let agg = aggressive_centralized(&t, &g, rho).unwrap();
        let con = conservative_select(&t, &g, rho).unwrap();
        prop_assert!(verify_aggressive(&agg, &g).is_ok());
        prop_assert!(verify_conservative(&con, &g).is_ok());
        for sel in [&agg, &con] {
            let a = schedule(&sel.consolidated, 64, g.n(), seed).unwrap();
            prop_assert!(a.is_proper(&sel.consolidated));
        }
    }

    #[test]
    fn local_views_agree_with_centralized(g in graph(11), rho in 1usize..=2) {
        let report = check_view_consistency(&g, rho).unwrap();
        prop_assert!(report.passed(), "{:?}", report.divergence);
    }
}
