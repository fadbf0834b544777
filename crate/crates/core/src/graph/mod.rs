//! Multigraphs with self-loops, general matching and edge covers.
//!
//! Edges come in two classes: `Budgeted` edges count against the cardinality
//! bound of [`min_weight_cc_edge_cover`], `Free` edges do not and must be
//! self-loops. A loop at `v` covers `v`.

mod cover;
mod ecc;
mod matching;
mod separation;

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cover::min_edge_cover;
pub use ecc::{min_weight_cc_edge_cover, min_weight_cc_edge_cover_with, solve_lp_ecc, LpEccSolution};
pub use matching::{max_matching, matching_size};
pub use separation::{most_violated_set, SeparationMode, ViolatedSet};

/// Default node cap for exhaustive subset separation.
pub const EXACT_SEPARATION_CAP: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeClass {
    /// Counts against the cardinality budget.
    Budgeted,
    /// Outside the budget; always a self-loop.
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeLabel {
    Supplier(usize),
    Outlier,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub label: EdgeLabel,
    pub weight: f64,
    pub class: EdgeClass,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    pub fn touches(&self, node: usize) -> bool {
        self.u == node || self.v == node
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopGraph {
    num_nodes: usize,
    /// External id of each node (a client index for the solver graphs).
    node_ids: Vec<usize>,
    edges: Vec<Edge>,
}

impl LoopGraph {
    pub fn new(num_nodes: usize) -> Self {
        LoopGraph {
            num_nodes,
            node_ids: (0..num_nodes).collect(),
            edges: Vec::new(),
        }
    }

    pub fn with_node_ids(node_ids: Vec<usize>) -> Self {
        LoopGraph {
            num_nodes: node_ids.len(),
            node_ids,
            edges: Vec::new(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn node_ids(&self) -> &[usize] {
        &self.node_ids
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn add_edge(&mut self, u: usize, v: usize, label: EdgeLabel, weight: f64, class: EdgeClass) -> Result<usize> {
        if u >= self.num_nodes || v >= self.num_nodes {
            return Err(Error::input(format!("edge ({u}, {v}) outside {} nodes", self.num_nodes)));
        }
        if class == EdgeClass::Free && u != v {
            return Err(Error::input("free-class edges must be self-loops"));
        }
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(Error::input(format!("edge weight {weight} must be finite and nonnegative")));
        }
        self.edges.push(Edge { u, v, label, weight, class });
        Ok(self.edges.len() - 1)
    }

    /// Budgeted 2-edge or loop with weight 0.
    pub fn add_budgeted(&mut self, u: usize, v: usize, label: EdgeLabel) -> Result<usize> {
        self.add_edge(u, v, label, 0.0, EdgeClass::Budgeted)
    }

    pub fn incident(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.touches(node))
            .map(|(i, _)| i)
    }

    /// Nodes without any incident edge; their presence makes every cover infeasible.
    pub fn bare_nodes(&self) -> Vec<usize> {
        let mut seen = vec![false; self.num_nodes];
        for e in &self.edges {
            seen[e.u] = true;
            seen[e.v] = true;
        }
        (0..self.num_nodes).filter(|&v| !seen[v]).collect()
    }

    /// DOT text with node ids, edge labels and weights; free loops are dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for v in 0..self.num_nodes {
            let _ = writeln!(out, "  n{v} [label=\"{v} (id {})\"];", self.node_ids[v]);
        }
        for (i, e) in self.edges.iter().enumerate() {
            let label = match e.label {
                EdgeLabel::Supplier(s) => format!("e{i}: s{s}"),
                EdgeLabel::Outlier => format!("e{i}: out"),
            };
            let style = match e.class {
                EdgeClass::Budgeted => "solid",
                EdgeClass::Free => "dashed",
            };
            let _ = writeln!(
                out,
                "  n{} -- n{} [label=\"{label} w={}\", style={style}];",
                e.u, e.v, e.weight
            );
        }
        out.push_str("}\n");
        out
    }
}

/// A set of edge indices, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCover {
    pub edges: Vec<usize>,
}

impl EdgeCover {
    pub fn new(mut edges: Vec<usize>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        EdgeCover { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn covers(&self, g: &LoopGraph) -> bool {
        let mut hit = vec![false; g.num_nodes()];
        for &e in &self.edges {
            let edge = g.edge(e);
            hit[edge.u] = true;
            hit[edge.v] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn weight(&self, g: &LoopGraph) -> f64 {
        self.edges.iter().map(|&e| g.edge(e).weight).sum()
    }

    pub fn budgeted_count(&self, g: &LoopGraph) -> usize {
        self.edges
            .iter()
            .filter(|&&e| g.edge(e).class == EdgeClass::Budgeted)
            .count()
    }

    /// Supplier labels on the chosen edges, sorted and deduplicated.
    pub fn suppliers(&self, g: &LoopGraph) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&e| match g.edge(e).label {
                EdgeLabel::Supplier(s) => Some(s),
                EdgeLabel::Outlier => None,
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[cfg(test)]
pub(crate) mod testing {
    use std::ops::RangeInclusive;

    use rand::Rng;

    use super::*;

    /// Random multigraph: a sampled number of budgeted edges (some loops), plus a free loop
    /// at each node with probability `free_p`. Integer weights in `0..=max_w`.
    pub fn random_graph<R: Rng>(
        rng: &mut R,
        nodes: RangeInclusive<usize>,
        edges: RangeInclusive<usize>,
        free_p: f64,
        max_w: u32,
    ) -> LoopGraph {
        let nodes = rng.gen_range(nodes);
        let edges = rng.gen_range(edges);
        let mut g = LoopGraph::new(nodes);
        for s in 0..edges {
            let u = rng.gen_range(0..nodes);
            let v = if rng.gen_bool(0.2) { u } else { rng.gen_range(0..nodes) };
            let w = rng.gen_range(0..=max_w) as f64;
            g.add_edge(u, v, EdgeLabel::Supplier(s), w, EdgeClass::Budgeted).unwrap();
        }
        for v in 0..nodes {
            if rng.gen_bool(free_p) {
                let w = rng.gen_range(0..=max_w) as f64;
                g.add_edge(v, v, EdgeLabel::Outlier, w, EdgeClass::Free).unwrap();
            }
        }
        g
    }

    /// Exhaustive minimum over edge subsets; `None` when no subset is feasible.
    pub fn brute_cover(g: &LoopGraph, budget: Option<usize>, weighted: bool) -> Option<f64> {
        let m = g.edges().len();
        assert!(m <= 22);
        let mut best: Option<f64> = None;
        for mask in 0u32..(1 << m) {
            let chosen: Vec<usize> = (0..m).filter(|&e| mask >> e & 1 == 1).collect();
            let cover = EdgeCover::new(chosen);
            if !cover.covers(g) {
                continue;
            }
            if let Some(k) = budget {
                if cover.budgeted_count(g) > k {
                    continue;
                }
            }
            let cost = if weighted { cover.weight(g) } else { cover.len() as f64 };
            best = Some(best.map_or(cost, |b| b.min(cost)));
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_edges_must_be_loops() {
        let mut g = LoopGraph::new(2);
        assert!(g.add_edge(0, 1, EdgeLabel::Outlier, 1.0, EdgeClass::Free).is_err());
        assert!(g.add_edge(0, 2, EdgeLabel::Outlier, 1.0, EdgeClass::Budgeted).is_err());
        assert!(g.add_edge(0, 1, EdgeLabel::Supplier(0), -1.0, EdgeClass::Budgeted).is_err());
        assert!(g.add_edge(1, 1, EdgeLabel::Outlier, 1.0, EdgeClass::Free).is_ok());
    }

    #[test]
    fn dot_export_mentions_every_edge() {
        let mut g = LoopGraph::with_node_ids(vec![4, 7]);
        g.add_budgeted(0, 1, EdgeLabel::Supplier(3)).unwrap();
        g.add_edge(1, 1, EdgeLabel::Outlier, 2.0, EdgeClass::Free).unwrap();
        let dot = g.to_dot();
        assert!(dot.starts_with("graph G {"));
        assert!(dot.contains("n0 [label=\"0 (id 4)\"]"));
        assert!(dot.contains("n0 -- n1 [label=\"e0: s3 w=0\", style=solid]"));
        assert!(dot.contains("n1 -- n1 [label=\"e1: out w=2\", style=dashed]"));
    }
}
