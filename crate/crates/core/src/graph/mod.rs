//! Weighted directed graphs and the matrices derived from them.
//!
//! Vertices are indexed from `0` in the API. Entry `(j, k)` of the weight
//! matrix is the weight of the edge `j -> k`, i.e. agent `k` listens to
//! agent `j`. JSON literals use 1-indexed vertices (see [`io`]).

pub mod io;
mod sequence;
mod standard;

use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use sequence::{GraphSequence, TimeDomain};
pub use standard::{make_standard, vertex_interconnection, StandardKind};

/// Absolute tolerance for balance and symmetry checks on user-supplied weights.
pub const WEIGHT_TOL: f64 = 1e-12;

/// Which degree matrix a Laplacian is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LaplacianKind {
    In,
    Out,
}

/// Strongest connectivity property of a digraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConnectivityClass {
    StronglyConnected,
    /// Root-connected but not strongly connected; carries the smallest root.
    RootConnected(usize),
    WeaklyConnected,
    Disconnected,
}

impl ConnectivityClass {
    /// True for strongly connected and root-connected graphs.
    pub fn has_root(&self) -> bool {
        matches!(
            self,
            ConnectivityClass::StronglyConnected | ConnectivityClass::RootConnected(_)
        )
    }
}

/// A weighted digraph on `n` vertices without self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    weights: DMatrix<f64>,
    in_lists: Vec<Vec<(usize, f64)>>,
}

impl WeightedDigraph {
    /// The graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a graph needs at least one vertex"));
        }
        Ok(Self::from_checked(DMatrix::zeros(n, n)))
    }

    /// Builds a graph from a full weight matrix, validating the invariants.
    pub fn from_matrix(weights: DMatrix<f64>) -> Result<Self> {
        let n = weights.nrows();
        if n == 0 || weights.ncols() != n {
            return Err(Error::invalid(format!(
                "weight matrix must be square and non-empty, got {}x{}",
                weights.nrows(),
                weights.ncols()
            )));
        }
        for j in 0..n {
            for k in 0..n {
                let w = weights[(j, k)];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::invalid(format!(
                        "weight ({j},{k}) = {w} must be finite and nonnegative"
                    )));
                }
            }
            if weights[(j, j)] != 0.0 {
                return Err(Error::invalid(format!("self-loop on vertex {j}")));
            }
        }
        Ok(Self::from_checked(weights))
    }

    /// Builds a graph from 0-indexed `(j, k, weight)` triples.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a graph needs at least one vertex"));
        }
        let mut m = DMatrix::zeros(n, n);
        for &(j, k, w) in edges {
            if j >= n || k >= n {
                return Err(Error::invalid(format!(
                    "edge ({j},{k}) out of range for {n} vertices"
                )));
            }
            if j == k {
                return Err(Error::invalid(format!("self-loop on vertex {j}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::invalid(format!(
                    "edge ({j},{k}) has non-positive weight {w}"
                )));
            }
            if m[(j, k)] != 0.0 {
                return Err(Error::invalid(format!("duplicate edge ({j},{k})")));
            }
            m[(j, k)] = w;
        }
        Ok(Self::from_checked(m))
    }

    /// Builds an undirected graph: every pair is inserted in both directions.
    pub fn from_undirected_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let both: Vec<_> = edges
            .iter()
            .flat_map(|&(j, k, w)| [(j, k, w), (k, j, w)])
            .collect();
        Self::from_edges(n, &both)
    }

    fn from_checked(weights: DMatrix<f64>) -> Self {
        let n = weights.nrows();
        let in_lists = (0..n)
            .map(|k| {
                (0..n)
                    .filter(|&j| weights[(j, k)] > 0.0)
                    .map(|j| (j, weights[(j, k)]))
                    .collect()
            })
            .collect();
        Self { weights, in_lists }
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    /// Weight `a_jk` of edge `j -> k` (zero when absent).
    #[inline]
    pub fn weight(&self, j: usize, k: usize) -> f64 {
        self.weights[(j, k)]
    }

    /// The adjacency matrix `A`, with `a_jk` in row `j`, column `k`.
    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn has_edge(&self, j: usize, k: usize) -> bool {
        self.weights[(j, k)] > 0.0
    }

    /// In-neighbors `j -> k` of vertex `k` with their weights.
    #[inline]
    pub fn in_neighbors(&self, k: usize) -> &[(usize, f64)] {
        &self.in_lists[k]
    }

    /// All edges `(j, k, a_jk)` in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n();
        let mut out = Vec::new();
        for j in 0..n {
            for k in 0..n {
                if self.weights[(j, k)] > 0.0 {
                    out.push((j, k, self.weights[(j, k)]));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.in_lists.iter().map(Vec::len).sum()
    }

    fn check_vertex(&self, k: usize) -> Result<()> {
        if k >= self.n() {
            return Err(Error::invalid(format!(
                "vertex {k} out of range for {} vertices",
                self.n()
            )));
        }
        Ok(())
    }

    /// In-degree `sum_j a_jk`.
    pub fn in_degree(&self, k: usize) -> Result<f64> {
        self.check_vertex(k)?;
        Ok(self.in_lists[k].iter().map(|&(_, w)| w).sum())
    }

    /// Out-degree `sum_j a_kj`.
    pub fn out_degree(&self, k: usize) -> Result<f64> {
        self.check_vertex(k)?;
        Ok(self.weights.row(k).sum())
    }

    pub fn in_degrees(&self) -> Vec<f64> {
        self.in_lists
            .iter()
            .map(|l| l.iter().map(|&(_, w)| w).sum())
            .collect()
    }

    pub fn max_in_degree(&self) -> f64 {
        self.in_degrees().into_iter().fold(0.0, f64::max)
    }

    /// In-degree equals out-degree at every vertex.
    pub fn is_balanced(&self) -> bool {
        (0..self.n()).all(|k| {
            let din: f64 = self.weights.column(k).sum();
            let dout: f64 = self.weights.row(k).sum();
            (din - dout).abs() <= WEIGHT_TOL
        })
    }

    /// `a_jk == a_kj` for every pair.
    pub fn is_undirected(&self) -> bool {
        let n = self.n();
        (0..n).all(|j| (j + 1..n).all(|k| (self.weight(j, k) - self.weight(k, j)).abs() <= WEIGHT_TOL))
    }

    /// All weights are 0 or 1.
    pub fn is_unweighted(&self) -> bool {
        self.weights.iter().all(|&w| w == 0.0 || w == 1.0)
    }

    /// Smallest positive weight, if the graph has any edge.
    pub fn min_positive_weight(&self) -> Option<f64> {
        self.weights
            .iter()
            .copied()
            .filter(|&w| w > 0.0)
            .reduce(f64::min)
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// `D^(i) - A` or `D^(o) - A`.
    pub fn laplacian(&self, kind: LaplacianKind) -> DMatrix<f64> {
        let n = self.n();
        let mut l = -self.weights.clone();
        for k in 0..n {
            l[(k, k)] = match kind {
                LaplacianKind::In => self.weights.column(k).sum(),
                LaplacianKind::Out => self.weights.row(k).sum(),
            };
        }
        l
    }

    /// Incidence matrix with one column per directed edge, in the order of
    /// [`edges`](Self::edges): `-1` at the tail, `+1` at the head.
    pub fn incidence(&self) -> DMatrix<f64> {
        incidence_from(self.n(), self.edges().iter().map(|&(j, k, _)| (j, k)))
    }

    /// Incidence matrix of an undirected graph with one column per unordered
    /// pair, oriented from the lower to the higher index.
    pub fn incidence_undirected(&self) -> Result<DMatrix<f64>> {
        if !self.is_undirected() {
            return Err(Error::invalid("incidence_undirected needs an undirected graph"));
        }
        let pairs = self.edges().into_iter().filter(|&(j, k, _)| j < k).map(|(j, k, _)| (j, k));
        Ok(incidence_from(self.n(), pairs))
    }

    /// Vertices reachable from `root` along directed paths (including `root`).
    pub fn reachable_from(&self, root: usize) -> Vec<bool> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(j) = queue.pop_front() {
            for k in 0..n {
                if !seen[k] && self.weights[(j, k)] > 0.0 {
                    seen[k] = true;
                    queue.push_back(k);
                }
            }
        }
        seen
    }

    /// Vertices from which every vertex is reachable.
    pub fn roots(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&r| self.reachable_from(r).iter().all(|&b| b))
            .collect()
    }

    /// Number of weakly connected components.
    pub fn weak_component_count(&self) -> usize {
        let n = self.n();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            let mut queue = VecDeque::from([start]);
            while let Some(j) = queue.pop_front() {
                for k in 0..n {
                    let linked = self.weights[(j, k)] > 0.0 || self.weights[(k, j)] > 0.0;
                    if linked && label[k] == usize::MAX {
                        label[k] = count;
                        queue.push_back(k);
                    }
                }
            }
            count += 1;
        }
        count
    }

    /// Strongest applicable connectivity class, by reachability search.
    pub fn classify_connectivity(&self) -> ConnectivityClass {
        let roots = self.roots();
        if roots.len() == self.n() {
            ConnectivityClass::StronglyConnected
        } else if let Some(&r) = roots.first() {
            ConnectivityClass::RootConnected(r)
        } else if self.weak_component_count() == 1 {
            ConnectivityClass::WeaklyConnected
        } else {
            ConnectivityClass::Disconnected
        }
    }

    /// No two vertices of `set` are equal or joined by an edge in either direction.
    pub fn is_independent_set(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(i, &j)| {
            set[i + 1..]
                .iter()
                .all(|&k| j != k && !self.has_edge(j, k) && !self.has_edge(k, j))
        })
    }

    /// Entry-wise sum of two graphs on the same vertex set.
    pub fn add(&self, other: &WeightedDigraph) -> Result<WeightedDigraph> {
        if self.n() != other.n() {
            return Err(Error::invalid("graphs must share their vertex set"));
        }
        Ok(Self::from_checked(&self.weights + &other.weights))
    }

    /// Multiplies every weight by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<WeightedDigraph> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::invalid(format!("scale factor {factor} must be positive")));
        }
        Ok(Self::from_checked(&self.weights * factor))
    }
}

fn incidence_from(n: usize, pairs: impl Iterator<Item = (usize, usize)>) -> DMatrix<f64> {
    let pairs: Vec<_> = pairs.collect();
    let mut b = DMatrix::zeros(n, pairs.len());
    for (m, (j, k)) in pairs.into_iter().enumerate() {
        b[(j, m)] = -1.0;
        b[(k, m)] = 1.0;
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ring(n: usize) -> WeightedDigraph {
        make_standard(StandardKind::RingDirected, n).unwrap()
    }

    #[test]
    fn in_degree_examples() {
        let complete = make_standard(StandardKind::Complete, 4).unwrap();
        for k in 0..4 {
            assert_eq!(complete.in_degree(k).unwrap(), 3.0);
        }
        let r = ring(5);
        for k in 0..5 {
            assert_eq!(r.in_degree(k).unwrap(), 1.0);
        }
        let e = WeightedDigraph::empty(3).unwrap();
        assert_eq!(e.in_degree(2).unwrap(), 0.0);
        assert!(matches!(e.in_degree(3), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn balance_examples() {
        assert!(make_standard(StandardKind::Path, 4).unwrap().is_balanced());
        assert!(ring(5).is_balanced());
        let single = WeightedDigraph::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        assert!(!single.is_balanced());
    }

    #[test]
    fn laplacian_complete_three() {
        let g = make_standard(StandardKind::Complete, 3).unwrap();
        let l = g.laplacian(LaplacianKind::In);
        let expected = DMatrix::from_row_slice(3, 3, &[2., -1., -1., -1., 2., -1., -1., -1., 2.]);
        assert_eq!(l, expected);
        let path = make_standard(StandardKind::Path, 2).unwrap();
        assert_eq!(
            path.laplacian(LaplacianKind::Out),
            DMatrix::from_row_slice(2, 2, &[1., -1., -1., 1.])
        );
    }

    #[test]
    fn laplacian_annihilators_on_directed_graph() {
        let g = WeightedDigraph::from_edges(3, &[(0, 1, 2.0), (1, 2, 0.5), (0, 2, 1.5)]).unwrap();
        let lin = g.laplacian(LaplacianKind::In);
        let lout = g.laplacian(LaplacianKind::Out);
        for c in 0..3 {
            assert_eq!(lin.column(c).sum(), 0.0);
            assert_eq!(lout.row(c).sum(), 0.0);
        }
    }

    #[test]
    fn incidence_examples() {
        let g = WeightedDigraph::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        assert_eq!(g.incidence(), DMatrix::from_column_slice(2, 1, &[-1.0, 1.0]));
        let tri = make_standard(StandardKind::Complete, 3).unwrap();
        let b = tri.incidence_undirected().unwrap();
        assert_eq!(b.ncols(), 3);
        assert_eq!(&b * b.transpose(), tri.laplacian(LaplacianKind::In));
        let empty = WeightedDigraph::empty(3).unwrap();
        assert_eq!(empty.incidence().ncols(), 0);
    }

    #[test]
    fn connectivity_examples() {
        let tree = make_standard(StandardKind::DirectedTree, 5).unwrap();
        assert_eq!(tree.classify_connectivity(), ConnectivityClass::RootConnected(0));
        assert_eq!(ring(4).classify_connectivity(), ConnectivityClass::StronglyConnected);
        let two = WeightedDigraph::from_undirected_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(two.classify_connectivity(), ConnectivityClass::Disconnected);
        let weak = WeightedDigraph::from_edges(3, &[(0, 1, 1.0), (2, 1, 1.0)]).unwrap();
        assert_eq!(weak.classify_connectivity(), ConnectivityClass::WeaklyConnected);
        let single = WeightedDigraph::empty(1).unwrap();
        assert_eq!(single.classify_connectivity(), ConnectivityClass::StronglyConnected);
    }

    #[test]
    fn laplacian_eigenvalues_complete_three() {
        let g = make_standard(StandardKind::Complete, 3).unwrap();
        let mut ev: Vec<f64> = g
            .laplacian(LaplacianKind::In)
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(ev[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[1], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[2], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_constructions() {
        assert!(WeightedDigraph::empty(0).is_err());
        assert!(WeightedDigraph::from_edges(2, &[(0, 0, 1.0)]).is_err());
        assert!(WeightedDigraph::from_edges(2, &[(0, 1, -1.0)]).is_err());
        assert!(WeightedDigraph::from_edges(2, &[(0, 2, 1.0)]).is_err());
        assert!(WeightedDigraph::from_matrix(DMatrix::from_element(2, 2, 1.0)).is_err());
    }

    #[test]
    fn independent_sets() {
        let g = make_standard(StandardKind::RingUndirected, 6).unwrap();
        assert!(g.is_independent_set(&[0, 2, 4]));
        assert!(!g.is_independent_set(&[0, 1]));
        assert!(g.is_independent_set(&[]));
    }
}
