use std::f64::consts::PI;

use circsync::circle::{ct_rhs, dt_step, v_circ, CircleSwarm, CouplingProfile};
use circsync::equilibria::{
    async_decrement, beta_bound, critical_point_search, enumerate_ring_splay_states, stabilizing_weights,
    SeedOutcome, GRADIENT_TOL,
};
use circsync::graph::{make_standard, ConnectivityClass, StandardKind, WeightedDigraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn undirected(n: usize, weighted: bool) -> impl Strategy<Value = WeightedDigraph> {
    proptest::collection::vec(proptest::option::weighted(0.5, 0.1..2.0f64), n * (n - 1) / 2).prop_map(move |cells| {
        let pairs = (0..n).flat_map(|j| (j + 1..n).map(move |k| (j, k)));
        let edges: Vec<_> = pairs
            .zip(cells)
            .filter_map(|((j, k), w)| w.map(|w| (j, k, if weighted { w } else { 1.0 })))
            .collect();
        WeightedDigraph::from_undirected_edges(n, &edges).unwrap()
    })
}

fn swarm(n: usize) -> impl Strategy<Value = CircleSwarm> {
    proptest::collection::vec(-PI..PI, n).prop_map(|v| CircleSwarm::new(v).unwrap())
}

/// Greedy independent set from a priority order.
fn independent_subset(g: &WeightedDigraph, order: &[usize]) -> Vec<usize> {
    let mut sigma: Vec<usize> = Vec::new();
    for &k in order {
        if sigma.iter().all(|&j| !g.has_edge(j, k) && !g.has_edge(k, j)) {
            sigma.push(k);
        }
    }
    sigma
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn asynchronous_updates_never_increase_v_circ(
        (g, s, beta, order) in (2usize..9).prop_flat_map(|n| (
            undirected(n, true),
            swarm(n),
            0.01..10.0f64,
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
        ))
    ) {
        let sigma = independent_subset(&g, &order);
        let d = async_decrement(&s, &g, beta, &sigma).unwrap();
        prop_assert!(d <= 0.0);
        let direct = v_circ(&dt_step(&s, &g, beta, Some(&sigma)).unwrap(), &g) - v_circ(&s, &g);
        prop_assert!((d - direct).abs() < 1e-9);
    }

    #[test]
    fn synchronous_steps_descend_above_the_bound(
        (g, states, extra) in (2usize..9).prop_flat_map(|n| (
            undirected(n, false),
            proptest::collection::vec(swarm(n), 200),
            0.0..2.0f64,
        ))
    ) {
        prop_assume!(g.edge_count() > 0);
        let beta = beta_bound(&g).unwrap() + extra;
        for s in states {
            let before = v_circ(&s, &g);
            let after = v_circ(&dt_step(&s, &g, beta, None).unwrap(), &g);
            prop_assert!(after <= before + 1e-12 * (1.0 + before), "{before} -> {after}");
        }
    }
}

#[test]
fn splay_states_are_equilibria_for_rings_up_to_twelve() {
    for n in 2..=12 {
        let g = make_standard(StandardKind::RingUndirected, n).unwrap();
        for st in enumerate_ring_splay_states(n).unwrap() {
            let rhs = ct_rhs(&st.state, &g, 1.0, &CouplingProfile::Sine).unwrap();
            assert!(rhs.iter().all(|v| v.abs() < 1e-12), "n={n} a={} rhs={rhs:?}", st.a);
        }
    }
}

#[test]
fn stabilizing_weights_make_spread_states_equilibria() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..200 {
        let n = rng.gen_range(5..=12);
        // Gaps below pi/2 leave every agent a neighbor on both sides.
        let gaps: Vec<f64> = (0..n).map(|_| rng.gen_range(0.9..1.1)).collect();
        let total: f64 = gaps.iter().sum();
        let mut angle = rng.gen_range(-PI..PI);
        let angles: Vec<f64> = gaps
            .iter()
            .map(|g| {
                angle += g * 2.0 * PI / total;
                angle
            })
            .collect();
        let s = CircleSwarm::new(angles).unwrap();
        let out = stabilizing_weights(&s).unwrap();
        assert_eq!(out.graph.classify_connectivity(), ConnectivityClass::StronglyConnected);
        assert!(out.delta > 0.0);
        assert!(out.graph.edges().iter().all(|&(_, _, w)| w >= out.delta));
        let rhs = ct_rhs(&s, &out.graph, 1.0, &CouplingProfile::Sine).unwrap();
        assert!(rhs.iter().all(|v| v.abs() < 1e-10), "{rhs:?}");
    }
}

#[test]
fn search_reports_only_critical_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let g = make_standard(StandardKind::RingUndirected, 6).unwrap();
    let seeds: Vec<CircleSwarm> = (0..40)
        .map(|_| CircleSwarm::new((0..6).map(|_| rng.gen_range(-PI..PI)).collect()).unwrap())
        .collect();
    let outcomes = critical_point_search(&g, &CouplingProfile::Sine, &seeds).unwrap();
    assert_eq!(outcomes.len(), seeds.len());
    let converged: Vec<_> = outcomes
        .iter()
        .filter_map(|o| match o {
            SeedOutcome::Converged { report, .. } => Some(report),
            SeedOutcome::Failed { .. } => None,
        })
        .collect();
    assert!(!converged.is_empty());
    for r in converged {
        assert!(r.gradient_norm < GRADIENT_TOL);
    }
}
