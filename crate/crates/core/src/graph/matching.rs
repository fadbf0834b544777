//! Edmonds' blossom algorithm for maximum-cardinality matching, O(V³).

use std::collections::VecDeque;

use super::LoopGraph;

const NONE: usize = usize::MAX;

struct Blossom<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
}

impl Blossom<'_> {
    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.mate.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// BFS for an augmenting path from `root`; returns its free endpoint.
    fn find_path(&mut self, root: usize) -> Option<usize> {
        let n = self.mate.len();
        self.used.iter_mut().for_each(|u| *u = false);
        self.parent.iter_mut().for_each(|p| *p = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for idx in 0..self.adj[v].len() {
                let to = self.adj[v][idx];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|b| *b = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    queue.push_back(next);
                }
            }
        }
        None
    }

    fn augment(&mut self, mut v: usize) {
        while v != NONE {
            let pv = self.parent[v];
            let next = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = next;
        }
    }
}

/// Mate of each node in a maximum matching over the non-loop edges of the
/// subgraph induced by `active` (all nodes when `None`).
pub(crate) fn mates(g: &LoopGraph, active: Option<&[bool]>) -> Vec<Option<usize>> {
    let n = g.num_nodes();
    let on = |v: usize| active.is_none_or(|a| a[v]);
    let mut adj = vec![Vec::new(); n];
    for e in g.edges() {
        if !e.is_loop() && on(e.u) && on(e.v) {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }
    let mut b = Blossom {
        adj: &adj,
        mate: vec![NONE; n],
        parent: vec![NONE; n],
        base: (0..n).collect(),
        used: vec![false; n],
        in_blossom: vec![false; n],
    };
    // Greedy warm start, then augment from each remaining free node.
    for v in 0..n {
        if b.mate[v] == NONE {
            if let Some(&to) = adj[v].iter().find(|&&to| b.mate[to] == NONE) {
                b.mate[v] = to;
                b.mate[to] = v;
            }
        }
    }
    for v in 0..n {
        if b.mate[v] == NONE && !adj[v].is_empty() {
            if let Some(end) = b.find_path(v) {
                b.augment(end);
            }
        }
    }
    b.mate.into_iter().map(|m| (m != NONE).then_some(m)).collect()
}

/// Maximum-cardinality matching over 2-edges; loops are ignored. Each matched
/// pair is realized by its lowest-index edge. Returned edge indices ascend.
pub fn max_matching(g: &LoopGraph) -> Vec<usize> {
    let mate = mates(g, None);
    let mut out: Vec<usize> = (0..g.num_nodes())
        .filter_map(|v| {
            let m = mate[v]?;
            (v < m).then(|| {
                g.edges()
                    .iter()
                    .position(|e| (e.u == v && e.v == m) || (e.u == m && e.v == v))
                    .expect("matched pair has an edge")
            })
        })
        .collect();
    out.sort_unstable();
    out
}

/// Size of a maximum matching on the subgraph induced by `active`.
pub fn matching_size(g: &LoopGraph, active: Option<&[bool]>) -> usize {
    mates(g, active).iter().filter(|m| m.is_some()).count() / 2
}
