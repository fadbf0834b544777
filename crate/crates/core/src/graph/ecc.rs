//! Minimum-weight edge cover under a cardinality bound on the budgeted class.
//!
//! The relaxation has one variable per edge (budgeted first, then free), the
//! budget row `Σ_budgeted x ≤ k`, and a row `x(touching S) ≥ ⌈|S|/2⌉` for
//! each node set `S`. Singletons are added up front, larger sets on demand by
//! [`most_violated_set`]. With free edges restricted to loops its extreme
//! points are integral, so an optimal vertex is an optimal cover.

use std::collections::HashSet;

use super::separation::{most_violated_set, SeparationMode};
use super::{EdgeClass, EdgeCover, LoopGraph};
use crate::error::{Error, Result};
use crate::lp::{self, FractionalPoint, LinearProgram, LpOutcome, Relation};

/// Largest allowed distance from an integer in a returned vertex.
pub const INTEGRALITY_TOL: f64 = 1e-6;

const MAX_ROUNDS: usize = 10_000;

#[derive(Clone, Debug)]
pub struct LpEccSolution {
    /// Vertex of the final relaxation, indexed by variable.
    pub point: FractionalPoint,
    pub value: f64,
    /// Edge index of each variable.
    pub var_edges: Vec<usize>,
    /// Node sets of the rows added by separation, in order.
    pub cuts: Vec<Vec<usize>>,
    pub lp: LinearProgram,
}

impl LpEccSolution {
    /// Value of each edge, indexed by edge.
    pub fn edge_values(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.var_edges.len()];
        for (var, &e) in self.var_edges.iter().enumerate() {
            out[e] = self.point.values[var];
        }
        out
    }
}

fn touching_row(g: &LoopGraph, edge_var: &[usize], nodes: &[usize]) -> Vec<(usize, f64)> {
    let mut inside = vec![false; g.num_nodes()];
    nodes.iter().for_each(|&v| inside[v] = true);
    g.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| inside[e.u] || inside[e.v])
        .map(|(i, _)| (edge_var[i], 1.0))
        .collect()
}

/// Solves the relaxation to an optimal vertex by cutting planes, or `None`
/// when no feasible cover exists.
pub fn solve_lp_ecc(g: &LoopGraph, k: usize, mode: SeparationMode, cap: usize) -> Result<Option<LpEccSolution>> {
    if !g.bare_nodes().is_empty() {
        return Ok(None);
    }
    let mut var_edges: Vec<usize> = (0..g.edges().len())
        .filter(|&e| g.edge(e).class == EdgeClass::Budgeted)
        .collect();
    let split = var_edges.len();
    var_edges.extend((0..g.edges().len()).filter(|&e| g.edge(e).class == EdgeClass::Free));
    let mut edge_var = vec![0; var_edges.len()];
    for (var, &e) in var_edges.iter().enumerate() {
        edge_var[e] = var;
    }

    let mut model = LinearProgram::new(var_edges.len());
    model.set_objective(var_edges.iter().map(|&e| g.edge(e).weight).collect());
    let budget: Vec<(usize, f64)> = (0..split).map(|v| (v, 1.0)).collect();
    model.add_sparse(&budget, Relation::Le, k as f64);
    for v in 0..g.num_nodes() {
        model.add_sparse(&touching_row(g, &edge_var, &[v]), Relation::Ge, 1.0);
    }

    let mut seen: HashSet<Vec<usize>> = (0..g.num_nodes()).map(|v| vec![v]).collect();
    let mut cuts = Vec::new();
    for _ in 0..MAX_ROUNDS {
        let sol = match lp::solve(&model)? {
            LpOutcome::Optimal(s) => s,
            LpOutcome::Infeasible(_) => return Ok(None),
            LpOutcome::Unbounded => return Err(Error::invariant("edge-cover relaxation unbounded")),
        };
        let point = lp::refine_to_extreme_point(&model, &FractionalPoint::new(sol.x, split))?;
        let mut values = vec![0.0; var_edges.len()];
        for (var, &e) in var_edges.iter().enumerate() {
            values[e] = point.values[var];
        }
        let fresh = most_violated_set(g, &values, mode, cap)?.filter(|s| !seen.contains(&s.nodes));
        match fresh {
            Some(set) => {
                let rhs = set.rhs as f64;
                model.add_sparse(&touching_row(g, &edge_var, &set.nodes), Relation::Ge, rhs);
                seen.insert(set.nodes.clone());
                cuts.push(set.nodes);
            }
            None => {
                let value = model.objective_value(&point.values);
                return Ok(Some(LpEccSolution {
                    point,
                    value,
                    var_edges,
                    cuts,
                    lp: model,
                }));
            }
        }
    }
    Err(Error::invariant(format!("edge-cover cutting planes exceeded {MAX_ROUNDS} rounds")))
}

/// [`min_weight_cc_edge_cover_with`] in exact separation mode.
pub fn min_weight_cc_edge_cover(g: &LoopGraph, k: usize) -> Result<Option<EdgeCover>> {
    min_weight_cc_edge_cover_with(g, k, SeparationMode::Exact, super::EXACT_SEPARATION_CAP)
}

/// Minimum-weight cover using at most `k` budgeted edges, or `None` if none
/// exists. Fails with an invariant error when the optimal vertex is not
/// integral or its rounding is not a feasible cover of the same weight.
pub fn min_weight_cc_edge_cover_with(g: &LoopGraph, k: usize, mode: SeparationMode, cap: usize) -> Result<Option<EdgeCover>> {
    if g.edges().iter().any(|e| e.class == EdgeClass::Free && !e.is_loop()) {
        return Err(Error::input("free-class edges must be self-loops"));
    }
    let Some(sol) = solve_lp_ecc(g, k, mode, cap)? else {
        return Ok(None);
    };
    let frac = sol.point.max_fractionality();
    if frac > INTEGRALITY_TOL {
        return Err(Error::invariant(format!(
            "edge-cover vertex is fractional (max distance to an integer {frac:e}): {:?}",
            sol.point.values
        )));
    }
    let values = sol.edge_values();
    // A coordinate of 2 can occur on a zero-weight edge; one copy suffices.
    let cover = EdgeCover::new((0..values.len()).filter(|&e| values[e] > 0.5).collect());
    if !cover.covers(g) {
        return Err(Error::invariant("rounded edge-cover vertex leaves a node uncovered"));
    }
    if cover.budgeted_count(g) > k {
        return Err(Error::invariant(format!(
            "rounded edge-cover vertex uses {} budgeted edges, bound {k}",
            cover.budgeted_count(g)
        )));
    }
    if cover.weight(g) > sol.value + INTEGRALITY_TOL * (1.0 + sol.value.abs()) {
        return Err(Error::invariant("rounded edge cover is heavier than the relaxation"));
    }
    Ok(Some(cover))
}
