//! JSON graph literals.
//!
//! ```json
//! {"n": 3, "edges": [[1, 2, 1.0], [2, 3, 0.5]]}
//! {"kind": "ring_directed", "params": {"n": 6}}
//! {"kind": "vertex_interconnection",
//!  "params": {"first": {...}, "second": {...}, "shared": [3, 1]}}
//! ```
//!
//! Vertices are 1-indexed in the file and 0-indexed in memory.

use serde::{Deserialize, Serialize};

use super::{make_standard, vertex_interconnection, StandardKind, WeightedDigraph};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiteralKind {
    Complete,
    RingDirected,
    RingUndirected,
    Path,
    DirectedTree,
    VertexInterconnection,
}

impl LiteralKind {
    fn standard(self) -> Option<StandardKind> {
        Some(match self {
            LiteralKind::Complete => StandardKind::Complete,
            LiteralKind::RingDirected => StandardKind::RingDirected,
            LiteralKind::RingUndirected => StandardKind::RingUndirected,
            LiteralKind::Path => StandardKind::Path,
            LiteralKind::DirectedTree => StandardKind::DirectedTree,
            LiteralKind::VertexInterconnection => return None,
        })
    }
}

/// Serialized form of a [`WeightedDigraph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphLiteral {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<LiteralKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<serde_json::Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StandardParams {
    n: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InterconnectionParams {
    first: GraphLiteral,
    second: GraphLiteral,
    shared: (usize, usize),
}

impl GraphLiteral {
    /// Explicit `{n, edges}` literal of a graph.
    pub fn from_graph(g: &WeightedDigraph) -> Self {
        Self {
            n: Some(g.n()),
            edges: g.edges().into_iter().map(|(j, k, w)| (j + 1, k + 1, w)).collect(),
            kind: None,
            params: None,
        }
    }

    /// Shorthand for a standard family literal.
    pub fn standard(kind: LiteralKind, n: usize) -> Self {
        Self {
            n: None,
            edges: Vec::new(),
            kind: Some(kind),
            params: Some(serde_json::json!({ "n": n })),
        }
    }

    pub fn build(&self) -> Result<WeightedDigraph> {
        match self.kind {
            Some(kind) => {
                if !self.edges.is_empty() {
                    return Err(Error::invalid("a graph literal takes either `kind` or `edges`"));
                }
                let params = self
                    .params
                    .clone()
                    .ok_or_else(|| Error::invalid("`kind` requires `params`"))?;
                match kind.standard() {
                    Some(std_kind) => {
                        let p: StandardParams = serde_json::from_value(params)?;
                        if let Some(n) = self.n {
                            if n != p.n {
                                return Err(Error::invalid(format!(
                                    "`n` = {n} disagrees with params.n = {}",
                                    p.n
                                )));
                            }
                        }
                        make_standard(std_kind, p.n)
                    }
                    None => {
                        let p: InterconnectionParams = serde_json::from_value(params)?;
                        let (a, b) = p.shared;
                        if a == 0 || b == 0 {
                            return Err(Error::invalid("shared vertices are 1-indexed"));
                        }
                        vertex_interconnection(&p.first.build()?, a - 1, &p.second.build()?, b - 1)
                    }
                }
            }
            None => {
                let n = self
                    .n
                    .ok_or_else(|| Error::invalid("graph literal needs `n` or `kind`"))?;
                let mut edges = Vec::with_capacity(self.edges.len());
                for &(j, k, w) in &self.edges {
                    if j == 0 || k == 0 {
                        return Err(Error::invalid(format!(
                            "edge ({j},{k}): vertices are 1-indexed"
                        )));
                    }
                    edges.push((j - 1, k - 1, w));
                }
                WeightedDigraph::from_edges(n, &edges)
            }
        }
    }
}

pub fn graph_from_json(text: &str) -> Result<WeightedDigraph> {
    let lit: GraphLiteral = serde_json::from_str(text)?;
    lit.build()
}

pub fn graph_to_json(g: &WeightedDigraph) -> String {
    serde_json::to_string_pretty(&GraphLiteral::from_graph(g)).expect("graph literal serializes")
}
