//! Minimum-cardinality edge cover with loops.

use super::matching::mates;
use super::{EdgeCover, LoopGraph};

/// Minimum number of edges covering the nodes in `need`, given every other
/// node is already covered: `|need| − ν(G[need])`.
fn completion_cost(g: &LoopGraph, need: &[bool]) -> usize {
    let count = need.iter().filter(|&&b| b).count();
    let matched = mates(g, Some(need)).iter().filter(|m| m.is_some()).count() / 2;
    count - matched
}

/// Minimum-cardinality edge cover, or `None` when some node has no incident edge.
///
/// The size is `|V| − ν(G)`. Among minimum covers, the one whose sorted edge
/// index list is lexicographically smallest is returned: edges are scanned in
/// index order and kept whenever some minimum cover still extends the choice.
pub fn min_edge_cover(g: &LoopGraph) -> Option<EdgeCover> {
    if !g.bare_nodes().is_empty() {
        return None;
    }
    let n = g.num_nodes();
    let target = completion_cost(g, &vec![true; n]);
    let mut covered = vec![false; n];
    let mut chosen = Vec::with_capacity(target);
    for (idx, e) in g.edges().iter().enumerate() {
        if chosen.len() == target {
            break;
        }
        if covered[e.u] && covered[e.v] {
            continue;
        }
        let mut next = covered.clone();
        next[e.u] = true;
        next[e.v] = true;
        let need: Vec<bool> = next.iter().map(|&c| !c).collect();
        if chosen.len() + 1 + completion_cost(g, &need) == target {
            chosen.push(idx);
            covered = next;
        }
    }
    debug_assert!(covered.iter().all(|&c| c));
    Some(EdgeCover::new(chosen))
}
