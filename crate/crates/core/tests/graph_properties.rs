use circsync::graph::{ConnectivityClass, LaplacianKind, WeightedDigraph};
use nalgebra::DVector;
use proptest::prelude::*;

fn digraph(n: usize, density: f64) -> impl Strategy<Value = WeightedDigraph> {
    proptest::collection::vec((0.0..1.0f64, 0.1..3.0f64), n * n).prop_map(move |cells| {
        let mut edges = Vec::new();
        for (i, (coin, w)) in cells.into_iter().enumerate() {
            let (j, k) = (i / n, i % n);
            if j != k && coin < density {
                edges.push((j, k, w));
            }
        }
        WeightedDigraph::from_edges(n, &edges).unwrap()
    })
}

fn undirected(n: usize, density: f64) -> impl Strategy<Value = WeightedDigraph> {
    digraph(n, density).prop_map(|g| {
        let n = g.n();
        let edges: Vec<_> = g.edges().into_iter().filter(|&(j, k, _)| j < k).collect();
        WeightedDigraph::from_undirected_edges(n, &edges).unwrap()
    })
}

/// Ring 0 -> 1 -> ... -> n-1 -> 0 plus random chords, so always strongly connected.
fn strongly_connected(n: usize) -> impl Strategy<Value = WeightedDigraph> {
    digraph(n, 0.3).prop_map(|g| {
        let n = g.n();
        let mut edges = g.edges();
        for k in 0..n {
            let next = (k + 1) % n;
            if !g.has_edge(k, next) {
                edges.push((k, next, 1.0));
            }
        }
        WeightedDigraph::from_edges(n, &edges).unwrap()
    })
}

/// Adds the reverse of every edge with the same weight; the result is balanced.
fn balanced(n: usize) -> impl Strategy<Value = WeightedDigraph> {
    (digraph(n, 0.4), 0.1..2.0f64).prop_map(|(g, w)| {
        let n = g.n();
        let mut edges: Vec<_> = g.edges().into_iter().filter(|&(j, k, _)| j < k).flat_map(|(j, k, w)| [(j, k, w), (k, j, w)]).collect();
        // A weighted directed cycle is balanced on its own.
        for k in 0..n {
            edges.push((k, (k + 1) % n, w));
        }
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for (j, k, w) in edges {
            m[(j, k)] += w;
        }
        WeightedDigraph::from_matrix(m).unwrap()
    })
}

fn real_parts(g: &WeightedDigraph) -> Vec<f64> {
    g.laplacian(LaplacianKind::Out).complex_eigenvalues().iter().map(|z| z.re).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn laplacian_rows_and_columns_sum_to_zero(g in (2usize..8).prop_flat_map(|n| digraph(n, 0.4))) {
        let lo = g.laplacian(LaplacianKind::Out);
        let li = g.laplacian(LaplacianKind::In);
        for k in 0..g.n() {
            prop_assert!(lo.row(k).sum().abs() < 1e-12);
            prop_assert!(li.column(k).sum().abs() < 1e-12);
        }
    }

    #[test]
    fn laplacian_spectrum_in_closed_right_half_plane(g in (2usize..8).prop_flat_map(|n| digraph(n, 0.4))) {
        for re in real_parts(&g) {
            prop_assert!(re >= -1e-9, "eigenvalue real part {re}");
        }
    }

    #[test]
    fn strongly_connected_has_simple_zero_eigenvalue(g in (2usize..8).prop_flat_map(strongly_connected)) {
        prop_assert_eq!(g.classify_connectivity(), ConnectivityClass::StronglyConnected);
        let zeros = g.laplacian(LaplacianKind::Out).complex_eigenvalues().iter().filter(|z| z.norm() < 1e-9).count();
        prop_assert_eq!(zeros, 1);
    }

    #[test]
    fn balanced_laplacian_quadratic_form_is_nonnegative(
        (g, xs) in (2usize..8).prop_flat_map(|n| (balanced(n), proptest::collection::vec(proptest::collection::vec(-5.0..5.0f64, n), 20)))
    ) {
        prop_assert!(g.is_balanced());
        let l = g.laplacian(LaplacianKind::Out);
        for x in xs {
            let x = DVector::from_vec(x);
            let q = x.dot(&(&l * &x));
            prop_assert!(q >= -1e-9 * x.norm_squared(), "x'Lx = {q}");
        }
    }

    #[test]
    fn undirected_zero_multiplicity_counts_components(g in (2usize..9).prop_flat_map(|n| undirected(n, 0.25))) {
        let l = g.laplacian(LaplacianKind::Out);
        prop_assert!((&l - l.transpose()).amax() < 1e-12);
        let eig = l.symmetric_eigenvalues();
        let scale = 1.0 + eig.amax();
        prop_assert!(eig.iter().all(|&e| e >= -1e-9 * scale));
        let zeros = eig.iter().filter(|e| e.abs() < 1e-9 * scale).count();
        prop_assert_eq!(zeros, g.weak_component_count());
    }
}

/// Connectivity class from a boolean transitive closure.
fn closure_class(n: usize, adj: &[bool]) -> ConnectivityClass {
    let mut reach = adj.to_vec();
    for k in 0..n {
        reach[k * n + k] = true;
    }
    let mut sym: Vec<bool> = (0..n * n).map(|i| reach[i] || reach[(i % n) * n + i / n]).collect();
    for m in [&mut reach, &mut sym] {
        for via in 0..n {
            for i in 0..n {
                if m[i * n + via] {
                    for j in 0..n {
                        if m[via * n + j] {
                            m[i * n + j] = true;
                        }
                    }
                }
            }
        }
    }
    let roots: Vec<usize> = (0..n).filter(|&r| (0..n).all(|j| reach[r * n + j])).collect();
    if roots.len() == n {
        ConnectivityClass::StronglyConnected
    } else if let Some(&r) = roots.first() {
        ConnectivityClass::RootConnected(r)
    } else if sym.iter().all(|&b| b) {
        ConnectivityClass::WeaklyConnected
    } else {
        ConnectivityClass::Disconnected
    }
}

#[test]
fn connectivity_matches_transitive_closure_on_all_small_digraphs() {
    for n in 1..=5usize {
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..n).filter(move |&k| k != j).map(move |k| (j, k))).collect();
        for mask in 0u32..1 << slots.len() {
            let mut adj = vec![false; n * n];
            let mut edges = Vec::new();
            for (i, &(j, k)) in slots.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    adj[j * n + k] = true;
                    edges.push((j, k, 1.0));
                }
            }
            let g = WeightedDigraph::from_edges(n, &edges).unwrap();
            assert_eq!(g.classify_connectivity(), closure_class(n, &adj), "n={n} mask={mask:#b}");
        }
    }
}
