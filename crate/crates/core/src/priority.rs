//! (1+√3)-approximation for Euclidean priority k-supplier.
//!
//! At a guessed radius the clients are peeled greedily by priority into
//! representatives, each absorbing the clients within priority-distance √3.
//! Suppliers become edges between the representatives they can serve, and a
//! minimum edge cover of at most `k` edges picks the suppliers. A larger
//! cover proves the optimum exceeds the guess.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{min_edge_cover, EdgeCover, EdgeLabel, LoopGraph};
use crate::instance::{candidate_radii, guess_loop, Guess, Instance, ScaledInstance, Tolerance, APPROX_RATIO, SQRT_3};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentativeSet {
    /// Representative clients in selection order (nonincreasing priority).
    pub reps: Vec<usize>,
    /// `balls[t]` holds the clients absorbed by `reps[t]`, ascending.
    pub balls: Vec<Vec<usize>>,
}

/// Repeatedly takes the remaining client of highest priority (lowest index on
/// ties) and removes every remaining `v` with `p(v)·d(v, rep) ≤ √3`.
pub fn select_representatives(inst: &ScaledInstance<'_>) -> RepresentativeSet {
    let n = inst.num_clients();
    let mut alive = vec![true; n];
    let mut reps = Vec::new();
    let mut balls = Vec::new();
    loop {
        let mut rep: Option<usize> = None;
        for v in (0..n).filter(|&v| alive[v]) {
            if rep.is_none_or(|r| inst.priority(v) > inst.priority(r)) {
                rep = Some(v);
            }
        }
        let Some(rep) = rep else { break };
        let ball: Vec<usize> = (0..n)
            .filter(|&v| alive[v] && inst.tol.le(inst.priority(v) * inst.cc(v, rep), SQRT_3))
            .collect();
        for &v in &ball {
            alive[v] = false;
        }
        reps.push(rep);
        balls.push(ball);
    }
    RepresentativeSet { reps, balls }
}

#[derive(Clone, Debug)]
pub struct SupplierGraph {
    /// Node `t` is `reps.reps[t]`; node ids are client indices.
    pub graph: LoopGraph,
    /// Suppliers within priority-distance 1 of three or more representatives.
    pub crowded_suppliers: usize,
}

/// One edge per supplier that can serve a representative within
/// priority-distance 1: a 2-edge on the first two such representatives, or a
/// loop if there is only one.
pub fn build_supplier_graph(inst: &ScaledInstance<'_>, reps: &RepresentativeSet) -> SupplierGraph {
    let mut graph = LoopGraph::with_node_ids(reps.reps.clone());
    let mut crowded_suppliers = 0;
    for i in 0..inst.num_suppliers() {
        let near: Vec<usize> = reps
            .reps
            .iter()
            .enumerate()
            .filter(|&(_, &v)| inst.tol.le(inst.priority(v) * inst.cs(v, i), 1.0))
            .map(|(t, _)| t)
            .collect();
        if near.len() >= 3 {
            crowded_suppliers += 1;
        }
        let (u, v) = match near.as_slice() {
            [] => continue,
            [only] => (*only, *only),
            [a, b, ..] => (*a, *b),
        };
        graph
            .add_budgeted(u, v, EdgeLabel::Supplier(i))
            .expect("representative positions are valid nodes");
    }
    SupplierGraph {
        graph,
        crowded_suppliers,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrioritySolution {
    /// Chosen suppliers, ascending.
    pub suppliers: Vec<usize>,
    pub reps: RepresentativeSet,
    /// Cover edges; empty when every supplier was selected outright.
    pub cover: EdgeCover,
    pub crowded_suppliers: usize,
}

/// Runs the fixed-radius algorithm; `None` certifies the optimum exceeds the
/// radius. With `k ≥ |I|` all suppliers are returned when they serve every
/// client within priority-distance 1.
pub fn solve_priority(inst: &ScaledInstance<'_>) -> Result<Option<PrioritySolution>> {
    if inst.k() == 0 {
        return Err(Error::input("priority k-supplier needs k >= 1"));
    }
    let reps = select_representatives(inst);
    if inst.k() >= inst.num_suppliers() {
        let all: Vec<usize> = (0..inst.num_suppliers()).collect();
        let served = (0..inst.num_clients()).all(|j| {
            all.iter()
                .any(|&i| inst.tol.le(inst.priority(j) * inst.cs(j, i), 1.0))
        });
        return Ok(served.then(|| PrioritySolution {
            suppliers: all,
            reps,
            cover: EdgeCover::new(Vec::new()),
            crowded_suppliers: 0,
        }));
    }
    let sg = build_supplier_graph(inst, &reps);
    let Some(cover) = min_edge_cover(&sg.graph) else {
        return Ok(None);
    };
    if cover.len() > inst.k() {
        return Ok(None);
    }
    let suppliers = cover.suppliers(&sg.graph);
    for j in 0..inst.num_clients() {
        let d = suppliers
            .iter()
            .map(|&i| inst.priority(j) * inst.cs(j, i))
            .fold(f64::INFINITY, f64::min);
        if !inst.tol.le(d, APPROX_RATIO) {
            return Err(Error::invariant(format!(
                "client {j} at scaled priority-distance {d} from the chosen suppliers"
            )));
        }
    }
    Ok(Some(PrioritySolution {
        suppliers,
        reps,
        cover,
        crowded_suppliers: sg.crowded_suppliers,
    }))
}

/// Searches the priority-weighted candidate radii for the smallest accepted
/// guess. The objective of the result is at most `(1+√3)·OPT`.
pub fn approximate(inst: &Instance, tol: Tolerance) -> Result<Guess<PrioritySolution>> {
    inst.validate()?;
    if inst.k == 0 {
        return Err(Error::input("priority k-supplier needs k >= 1"));
    }
    let radii = candidate_radii(inst, true)?;
    guess_loop(inst, &radii, tol, solve_priority)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::InstanceGenerator;
    use crate::instance::Point;

    fn inst(suppliers: &[[f64; 2]], clients: &[[f64; 2]], p: Option<Vec<f64>>, k: usize) -> Instance {
        Instance::new(
            suppliers.iter().map(|c| Point::from(*c)).collect(),
            clients.iter().map(|c| Point::from(*c)).collect(),
            p,
            k,
            0,
        )
        .unwrap()
    }

    fn at(inst: &Instance, b: f64) -> ScaledInstance<'_> {
        ScaledInstance::new(inst, b, Tolerance::default()).unwrap()
    }

    #[test]
    fn one_representative_when_all_close() {
        let x = inst(&[[0.0, 0.0]], &[[0.0, 0.0], [1.0, 0.0], [0.0, 0.5]], Some(vec![1.0, 3.0, 1.0]), 1);
        let reps = select_representatives(&at(&x, 1.0));
        assert_eq!(reps.reps, vec![1]);
        assert_eq!(reps.balls, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn far_pair_gives_two_representatives() {
        let x = inst(&[[1.0, 0.0]], &[[0.0, 0.0], [2.0, 0.0]], None, 1);
        let s = at(&x, 1.0);
        let reps = select_representatives(&s);
        assert_eq!(reps.reps, vec![0, 1]);
        let sg = build_supplier_graph(&s, &reps);
        assert_eq!(sg.graph.edges().len(), 1);
        assert_eq!((sg.graph.edge(0).u, sg.graph.edge(0).v), (0, 1));
        assert_eq!(solve_priority(&s).unwrap().unwrap().suppliers, vec![0]);
    }

    #[test]
    fn supplier_out_of_reach_adds_no_edge() {
        let x = inst(&[[5.0, 0.0], [0.5, 0.0]], &[[0.0, 0.0]], None, 1);
        let s = at(&x, 1.0);
        let sg = build_supplier_graph(&s, &select_representatives(&s));
        assert_eq!(sg.graph.edges().len(), 1);
        assert_eq!(sg.graph.edge(0).label, EdgeLabel::Supplier(1));
        assert!(sg.graph.edge(0).is_loop());
    }

    #[test]
    fn too_small_budget_fails() {
        let x = inst(
            &[[0.0, 0.0], [10.0, 0.0], [20.0, 0.0]],
            &[[0.0, 0.0], [10.0, 0.0], [20.0, 0.0]],
            None,
            2,
        );
        assert!(solve_priority(&at(&x, 1.0)).unwrap().is_none());
        let x = Instance { k: 1, ..x };
        assert!(solve_priority(&at(&x, 1.0)).unwrap().is_none());
    }

    #[test]
    fn budget_at_least_supplier_count_selects_all() {
        let x = inst(&[[0.0, 0.0], [3.0, 0.0]], &[[0.5, 0.0], [3.0, 0.5]], None, 2);
        let sol = solve_priority(&at(&x, 0.5)).unwrap().unwrap();
        assert_eq!(sol.suppliers, vec![0, 1]);
        assert!(solve_priority(&at(&x, 0.4)).unwrap().is_none());
        let g = approximate(&x, Tolerance::default()).unwrap();
        assert_eq!(g.radius, 0.5);
    }

    #[test]
    fn single_client_single_supplier() {
        let x = inst(&[[1.0, 0.0]], &[[0.0, 0.0]], None, 1);
        let g = approximate(&x, Tolerance::default()).unwrap();
        assert_eq!(g.radius, 1.0);
        assert_eq!(g.solution.suppliers, vec![0]);
    }

    #[test]
    fn zero_budget_rejected() {
        let x = inst(&[[1.0, 0.0]], &[[0.0, 0.0]], None, 1);
        let x = Instance { k: 0, ..x };
        assert!(matches!(approximate(&x, Tolerance::default()), Err(Error::Input(_))));
    }

    /// Plain re-execution: sort by (−p, index), sweep, absorb.
    fn reference_reps(s: &ScaledInstance<'_>) -> Vec<usize> {
        let mut order: Vec<usize> = (0..s.num_clients()).collect();
        order.sort_by(|&a, &b| s.priority(b).total_cmp(&s.priority(a)).then(a.cmp(&b)));
        let mut taken = vec![false; s.num_clients()];
        let mut reps = Vec::new();
        for &v in &order {
            if taken[v] {
                continue;
            }
            reps.push(v);
            for w in 0..s.num_clients() {
                if !taken[w] && s.priority(w) * s.cc(w, v) <= SQRT_3 * (1.0 + 1e-9) {
                    taken[w] = true;
                }
            }
        }
        reps
    }

    #[test]
    fn representatives_partition_and_match_reference() {
        for seed in 0..200 {
            let x = InstanceGenerator::new(4, 8).with_priorities(0.5, 3.0).generate_seeded(seed);
            let s = at(&x, 2.0);
            let r = select_representatives(&s);
            assert_eq!(r.reps, reference_reps(&s), "seed {seed}");
            let mut all: Vec<usize> = r.balls.concat();
            all.sort_unstable();
            assert_eq!(all, (0..8).collect::<Vec<_>>());
            for (t, ball) in r.balls.iter().enumerate() {
                assert!(ball.contains(&r.reps[t]));
                for &v in ball {
                    assert!(s.priority(v) * s.cc(v, r.reps[t]) <= SQRT_3 * (1.0 + 1e-9));
                }
            }
            for w in r.reps.windows(2) {
                assert!(s.priority(w[0]) >= s.priority(w[1]));
            }
        }
    }
}
