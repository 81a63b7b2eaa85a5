use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::WeightedDigraph;
use crate::{Error, Result};

/// Unit-weight graph families used throughout the scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StandardKind {
    /// Undirected, an edge between every pair.
    Complete,
    /// `0 -> 1 -> ... -> n-1 -> 0`.
    RingDirected,
    /// Undirected cycle. For `n = 2` this is a single undirected edge.
    RingUndirected,
    /// Undirected path `0 - 1 - ... - n-1`.
    Path,
    /// Binary tree rooted at `0`, edges from parent `(k-1)/2` to child `k`.
    DirectedTree,
}

pub fn make_standard(kind: StandardKind, n: usize) -> Result<WeightedDigraph> {
    if n == 0 {
        return Err(Error::invalid("standard graphs need n >= 1"));
    }
    let mut edges = Vec::new();
    match kind {
        StandardKind::Complete => {
            for j in 0..n {
                for k in 0..n {
                    if j != k {
                        edges.push((j, k, 1.0));
                    }
                }
            }
        }
        StandardKind::RingDirected => {
            if n < 2 {
                return Err(Error::invalid("rings need n >= 2"));
            }
            edges.extend((0..n).map(|k| (k, (k + 1) % n, 1.0)));
        }
        StandardKind::RingUndirected => {
            if n < 2 {
                return Err(Error::invalid("rings need n >= 2"));
            }
            if n == 2 {
                edges.extend([(0, 1, 1.0), (1, 0, 1.0)]);
            } else {
                for k in 0..n {
                    let next = (k + 1) % n;
                    edges.extend([(k, next, 1.0), (next, k, 1.0)]);
                }
            }
        }
        StandardKind::Path => {
            for k in 1..n {
                edges.extend([(k - 1, k, 1.0), (k, k - 1, 1.0)]);
            }
        }
        StandardKind::DirectedTree => {
            edges.extend((1..n).map(|k| ((k - 1) / 2, k, 1.0)));
        }
    }
    WeightedDigraph::from_edges(n, &edges)
}

/// Glues `second` onto `first` by identifying vertex `shared_second` of
/// `second` with vertex `shared_first` of `first`.
///
/// Vertices of `first` keep their indices; the remaining vertices of `second`
/// follow in their original order. The result has `n1 + n2 - 1` vertices.
pub fn vertex_interconnection(
    first: &WeightedDigraph,
    shared_first: usize,
    second: &WeightedDigraph,
    shared_second: usize,
) -> Result<WeightedDigraph> {
    let (n1, n2) = (first.n(), second.n());
    if shared_first >= n1 || shared_second >= n2 {
        return Err(Error::invalid(format!(
            "shared vertices ({shared_first}, {shared_second}) out of range for graphs of size ({n1}, {n2})"
        )));
    }
    let n = n1 + n2 - 1;
    let map = |v: usize| -> usize {
        use std::cmp::Ordering::*;
        match v.cmp(&shared_second) {
            Equal => shared_first,
            Less => n1 + v,
            Greater => n1 + v - 1,
        }
    };
    let mut m = DMatrix::zeros(n, n);
    m.view_mut((0, 0), (n1, n1)).copy_from(first.weights());
    for (j, k, w) in second.edges() {
        m[(map(j), map(k))] += w;
    }
    WeightedDigraph::from_matrix(m)
}
