use std::f64::consts::{PI, TAU};

use circsync::circle::{arc_distance, CircleSwarm};
use circsync::gossip::{
    expected_sync_time, gossip_step, monte_carlo_sync_time, run_until_sync, selection_probabilities, GossipConfig,
    GossipState, SymbolState, Variant,
};
use circsync::graph::{make_standard, GraphSequence, StandardKind, WeightedDigraph};
use proptest::prelude::*;

fn digraph(n: usize) -> impl Strategy<Value = WeightedDigraph> {
    proptest::collection::vec(proptest::option::weighted(0.5, 0.1..2.0f64), n * n).prop_map(move |cells| {
        let edges: Vec<_> = cells
            .into_iter()
            .enumerate()
            .filter_map(|(i, w)| w.map(|w| (i / n, i % n, w)))
            .filter(|&(j, k, _)| j != k)
            .collect();
        WeightedDigraph::from_edges(n, &edges).unwrap()
    })
}

fn occupied(s: &SymbolState) -> Vec<usize> {
    let mut v = s.assignment.clone();
    v.sort_unstable();
    v.dedup();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn selection_probabilities_sum_to_one((g, beta) in (1usize..8).prop_flat_map(|n| (digraph(n), 0.01..5.0f64))) {
        for k in 0..g.n() {
            let (stay, picks) = selection_probabilities(&g, k, beta);
            let total = stay + picks.iter().map(|p| p.1).sum::<f64>();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn occupied_symbols_only_shrink((g, seed) in (2usize..8).prop_flat_map(|n| (digraph(n), any::<u64>()))) {
        let cfg = GossipConfig::jump(1.0, seed, 200);
        let mut rng = cfg.trial_rng(0);
        let mut s = SymbolState::distinct(g.n());
        for _ in 0..200 {
            let next = gossip_step(&s, &g, &cfg, &mut rng).unwrap();
            let (before, after) = (occupied(&s), occupied(&next));
            prop_assert!(after.iter().all(|x| before.contains(x)));
            s = next;
        }
    }

    #[test]
    fn relabeling_symbols_relabels_the_trajectory(
        (g, seed, perm) in (2usize..8).prop_flat_map(|n| (digraph(n), any::<u64>(), Just((0..n).collect::<Vec<_>>()).prop_shuffle()))
    ) {
        let cfg = GossipConfig::jump(0.5, seed, 100);
        let (mut ra, mut rb) = (cfg.trial_rng(3), cfg.trial_rng(3));
        let mut a = SymbolState::distinct(g.n());
        let mut b = a.relabeled(&perm);
        for _ in 0..100 {
            a = gossip_step(&a, &g, &cfg, &mut ra).unwrap();
            b = gossip_step(&b, &g, &cfg, &mut rb).unwrap();
            prop_assert_eq!(a.relabeled(&perm), b.clone());
        }
    }

    #[test]
    fn step_counts_do_not_depend_on_the_manifold(
        (g, seed) in (2usize..7).prop_flat_map(|n| (digraph(n), any::<u64>()))
    ) {
        let n = g.n();
        let sched = GraphSequence::constant(g);
        let cfg = GossipConfig::jump(1.0, seed, 500);
        let angles = CircleSwarm::splay(n, TAU / n as f64, 0.3).unwrap();
        for trial in 0..20 {
            let sym = run_until_sync(&SymbolState::distinct(n), &sched, &cfg, trial).unwrap();
            let circ = run_until_sync(&angles, &sched, &cfg, trial).unwrap();
            prop_assert_eq!(sym.steps, circ.steps);
            prop_assert_eq!(sym.final_state.occupied(), circ.final_state.occupied());
        }
    }

    #[test]
    fn moderate_variant_commutes_with_rotation(
        (g, angles, offset, seed) in (2usize..7).prop_flat_map(|n| (
            digraph(n),
            proptest::collection::vec(-PI..PI, n),
            -PI..PI,
            any::<u64>(),
        ))
    ) {
        let cfg = GossipConfig { variant: Variant::Moderate { alpha: 1.0 }, ..GossipConfig::jump(1.0, seed, 50) };
        let (mut ra, mut rb) = (cfg.trial_rng(0), cfg.trial_rng(0));
        let mut a = CircleSwarm::new(angles).unwrap();
        let mut b = a.rotated(offset);
        for _ in 0..50 {
            a = gossip_step(&a, &g, &cfg, &mut ra).unwrap();
            b = gossip_step(&b, &g, &cfg, &mut rb).unwrap();
            for (x, y) in a.rotated(offset).angles().iter().zip(b.angles()) {
                prop_assert!(arc_distance(*x, *y) < 1e-12);
            }
        }
    }
}

#[test]
fn monte_carlo_agrees_with_the_chain_on_a_weighted_graph() {
    let g = WeightedDigraph::from_edges(4, &[(0, 1, 1.0), (1, 2, 0.5), (2, 3, 2.0), (3, 0, 1.0), (0, 2, 0.7)]).unwrap();
    let cfg = GossipConfig::jump(0.8, 17, 100_000);
    let exact = expected_sync_time(&g, &cfg, 4).unwrap();
    let mc = monte_carlo_sync_time(&SymbolState::distinct(4), &GraphSequence::constant(g), &cfg, 20_000).unwrap();
    assert_eq!(mc.timeouts, 0);
    assert!((mc.mean - exact).abs() < 4.0 * mc.stderr, "exact {exact}, MC {} +- {}", mc.mean, mc.stderr);
}

#[test]
fn complete_graph_of_eight_shows_two_cluster_stalls() {
    let g = GraphSequence::constant(make_standard(StandardKind::Complete, 8).unwrap());
    let cfg = GossipConfig::jump(1.0, 5, 100_000);
    let mc = monte_carlo_sync_time(&SymbolState::distinct(8), &g, &cfg, 2000).unwrap();
    assert_eq!(mc.timeouts, 0);
    assert!(mc.stall_fraction > 0.0);
}

#[test]
fn moderate_variant_synchronizes_on_a_ring() {
    let n = 5;
    let g = GraphSequence::constant(make_standard(StandardKind::RingUndirected, n).unwrap());
    let cfg = GossipConfig { variant: Variant::Moderate { alpha: 1.0 }, ..GossipConfig::jump(1.0, 23, 100_000) };
    let s0 = CircleSwarm::new(vec![0.1, 0.9, -0.4, 0.3, -1.0]).unwrap();
    let mc = monte_carlo_sync_time(&s0, &g, &cfg, 200).unwrap();
    assert_eq!(mc.synchronized, 200);
}
