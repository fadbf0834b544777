//! Separation for the edge-cover rows `x(touching S) ≥ ⌈|S|/2⌉`.

use serde::{Deserialize, Serialize};

use super::LoopGraph;
use crate::error::{Error, Result};

/// Violations at or above this (negative) deficit are treated as satisfied.
pub const VIOLATION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeparationMode {
    /// Branch-and-bound over all subsets; refuses graphs above the node cap.
    #[default]
    Exact,
    /// Greedy growth from low-mass seeds; may miss violations.
    Heuristic,
}

impl std::str::FromStr for SeparationMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(SeparationMode::Exact),
            "heuristic" => Ok(SeparationMode::Heuristic),
            other => Err(format!("unknown separation mode {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolatedSet {
    /// Node positions, ascending.
    pub nodes: Vec<usize>,
    /// Total value on edges touching the set.
    pub mass: f64,
    pub rhs: usize,
}

impl ViolatedSet {
    pub fn deficit(&self) -> f64 {
        self.mass - self.rhs as f64
    }
}

struct Incidence {
    /// Per node: (edge value, other endpoint); loops list the node itself.
    inc: Vec<Vec<(f64, usize)>>,
}

impl Incidence {
    fn new(g: &LoopGraph, values: &[f64]) -> Self {
        let mut inc = vec![Vec::new(); g.num_nodes()];
        for (e, &x) in g.edges().iter().zip(values) {
            inc[e.u].push((x, e.v));
            if !e.is_loop() {
                inc[e.v].push((x, e.u));
            }
        }
        Incidence { inc }
    }

    /// Mass added by putting `v` into `set`.
    fn gain(&self, v: usize, set: &[bool]) -> f64 {
        self.inc[v]
            .iter()
            .filter(|&&(_, w)| w == v || !set[w])
            .map(|&(x, _)| x)
            .sum()
    }
}

fn half_up(n: usize) -> usize {
    n.div_ceil(2)
}

/// Minimizes `x(touching S) − ⌈|S|/2⌉` over nonempty `S` and returns the
/// minimizer when its deficit is below `−VIOLATION_TOL`.
///
/// `values` holds one entry per edge. In exact mode the search is exhaustive
/// with branch-and-bound pruning (`mass − ⌈(|S| + remaining)/2⌉` bounds every
/// extension) and graphs with more than `cap` nodes are refused.
pub fn most_violated_set(g: &LoopGraph, values: &[f64], mode: SeparationMode, cap: usize) -> Result<Option<ViolatedSet>> {
    if values.len() != g.edges().len() {
        return Err(Error::input(format!(
            "{} edge values for {} edges",
            values.len(),
            g.edges().len()
        )));
    }
    match mode {
        SeparationMode::Exact => {
            if g.num_nodes() > cap {
                return Err(Error::capacity(format!(
                    "exact separation over {} nodes exceeds the cap of {cap}; use heuristic mode",
                    g.num_nodes()
                )));
            }
            Ok(exact(g, values))
        }
        SeparationMode::Heuristic => Ok(heuristic(g, values)),
    }
}

struct Search<'a> {
    inc: &'a Incidence,
    n: usize,
    set: Vec<bool>,
    best: f64,
    best_set: Option<Vec<bool>>,
}

impl Search<'_> {
    fn go(&mut self, v: usize, size: usize, mass: f64) {
        if size > 0 {
            let deficit = mass - half_up(size) as f64;
            if deficit < self.best {
                self.best = deficit;
                self.best_set = Some(self.set.clone());
            }
        }
        if v == self.n {
            return;
        }
        // Values are nonnegative, so mass never decreases along a branch.
        if mass - half_up(size + self.n - v) as f64 >= self.best {
            return;
        }
        let gain = self.inc.gain(v, &self.set);
        self.set[v] = true;
        self.go(v + 1, size + 1, mass + gain);
        self.set[v] = false;
        self.go(v + 1, size, mass);
    }
}

fn to_violated(g: &LoopGraph, inc: &Incidence, set: &[bool]) -> ViolatedSet {
    let nodes: Vec<usize> = (0..g.num_nodes()).filter(|&v| set[v]).collect();
    let mut mark = vec![false; g.num_nodes()];
    let mut mass = 0.0;
    for &v in &nodes {
        mass += inc.gain(v, &mark);
        mark[v] = true;
    }
    ViolatedSet {
        rhs: half_up(nodes.len()),
        nodes,
        mass,
    }
}

fn exact(g: &LoopGraph, values: &[f64]) -> Option<ViolatedSet> {
    let inc = Incidence::new(g, values);
    let mut s = Search {
        inc: &inc,
        n: g.num_nodes(),
        set: vec![false; g.num_nodes()],
        best: -VIOLATION_TOL,
        best_set: None,
    };
    s.go(0, 0, 0.0);
    s.best_set.map(|set| to_violated(g, &inc, &set))
}

fn heuristic(g: &LoopGraph, values: &[f64]) -> Option<ViolatedSet> {
    let n = g.num_nodes();
    let inc = Incidence::new(g, values);
    let empty = vec![false; n];
    let mut seeds: Vec<usize> = (0..n).collect();
    seeds.sort_by(|&a, &b| inc.gain(a, &empty).total_cmp(&inc.gain(b, &empty)).then(a.cmp(&b)));
    let mut best = -VIOLATION_TOL;
    let mut best_set: Option<Vec<bool>> = None;
    for &seed in &seeds {
        let mut set = vec![false; n];
        let mut mass = inc.gain(seed, &set);
        set[seed] = true;
        let mut size = 1;
        loop {
            let deficit = mass - half_up(size) as f64;
            if deficit < best {
                best = deficit;
                best_set = Some(set.clone());
            }
            let next = (0..n)
                .filter(|&v| !set[v])
                .map(|v| (inc.gain(v, &set), v))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            match next {
                Some((gain, v)) => {
                    set[v] = true;
                    mass += gain;
                    size += 1;
                }
                None => break,
            }
        }
    }
    best_set.map(|set| to_violated(g, &inc, &set))
}
