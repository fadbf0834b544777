//! Exhaustive ground truth for tiny instances.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeClass, EdgeCover, LoopGraph};
use crate::instance::{Instance, ScaledInstance};
use crate::lp::{self, LinearProgram, LpOutcome, Relation};

/// Enumeration budget shared by the guards below.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;
/// Largest integral solution list accepted by [`integer_hull_membership`].
pub const HULL_LIMIT: usize = 10_000;
/// Largest edge count accepted by [`ilp_cc_edge_cover`].
pub const ILP_EDGE_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptSolution {
    pub value: f64,
    pub suppliers: Vec<usize>,
    pub outliers: Vec<usize>,
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

fn guard(count: u128, what: &str) -> Result<()> {
    if count > ENUMERATION_LIMIT {
        return Err(Error::capacity(format!(
            "{what} needs {count} evaluations, limit {ENUMERATION_LIMIT}"
        )));
    }
    Ok(())
}

/// Exact `min_{|C| ≤ k} max_v p(v)·d(v, C)`. Only subsets of size
/// `min(k, |I|)` are scanned since adding suppliers never hurts.
pub fn opt_priority(inst: &Instance) -> Result<OptSolution> {
    inst.validate()?;
    let size = inst.k.min(inst.num_suppliers());
    guard(binomial(inst.num_suppliers(), size), "opt_priority")?;
    let mut best = OptSolution {
        value: f64::INFINITY,
        suppliers: Vec::new(),
        outliers: Vec::new(),
    };
    for set in (0..inst.num_suppliers()).combinations(size) {
        let v = inst.priority_objective(&set);
        if v < best.value || (best.suppliers.is_empty() && v == best.value) {
            best.value = v;
            best.suppliers = set;
        }
    }
    if inst.num_clients() == 0 {
        best.value = 0.0;
    }
    Ok(best)
}

/// Exact `min_{|C| ≤ k, |O| ≤ ℓ} max_{v ∉ O} d(v, C)`, ignoring priorities.
/// For each supplier set the `ℓ` farthest clients are dropped (lowest index
/// first among equal distances).
pub fn opt_outliers(inst: &Instance) -> Result<OptSolution> {
    inst.validate()?;
    let size = inst.k.min(inst.num_suppliers());
    let cost = binomial(inst.num_suppliers(), size).saturating_mul(binomial(inst.num_clients(), inst.ell));
    guard(cost, "opt_outliers")?;
    let mut best: Option<OptSolution> = None;
    for set in (0..inst.num_suppliers()).combinations(size) {
        let mut order: Vec<(f64, usize)> = (0..inst.num_clients()).map(|j| (inst.dist_to_set(j, &set), j)).collect();
        order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut outliers: Vec<usize> = order.iter().take(inst.ell).map(|&(_, j)| j).collect();
        outliers.sort_unstable();
        let value = order.get(inst.ell).map_or(0.0, |&(d, _)| d);
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(OptSolution {
                value,
                suppliers: set,
                outliers,
            });
        }
    }
    Ok(best.expect("at least the empty combination is scanned"))
}

/// Every feasible `(C, O)` at the scaled radius: `|C| ≤ k`, `|O| ≤ ℓ`, and
/// each client outside `O` served within scaled distance 1.
pub fn integral_outlier_solutions(inst: &ScaledInstance<'_>) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let (ni, nj) = (inst.num_suppliers(), inst.num_clients());
    let supplier_sets: u128 = (0..=inst.k().min(ni)).map(|s| binomial(ni, s)).sum();
    let outlier_sets: u128 = (0..=inst.ell().min(nj)).map(|s| binomial(nj, s)).sum();
    guard(supplier_sets.saturating_mul(outlier_sets), "integral solution enumeration")?;
    let mut out = Vec::new();
    for size in 0..=inst.k().min(ni) {
        for c in (0..ni).combinations(size) {
            let forced: Vec<usize> = (0..nj).filter(|&j| !c.iter().any(|&i| inst.serves(i, j))).collect();
            if forced.len() > inst.ell() {
                continue;
            }
            let free: Vec<usize> = (0..nj).filter(|j| !forced.contains(j)).collect();
            for extra in 0..=(inst.ell() - forced.len()).min(free.len()) {
                for add in free.iter().copied().combinations(extra) {
                    let mut o = forced.clone();
                    o.extend(add);
                    o.sort_unstable();
                    out.push((c.clone(), o));
                }
            }
        }
    }
    Ok(out)
}

/// Exact minimum-weight cover with at most `k` budgeted edges, by subset
/// enumeration; `None` when no such cover exists.
pub fn ilp_cc_edge_cover(g: &LoopGraph, k: usize) -> Result<Option<(f64, EdgeCover)>> {
    let m = g.edges().len();
    if m > ILP_EDGE_LIMIT {
        return Err(Error::capacity(format!("ilp_cc_edge_cover on {m} edges, limit {ILP_EDGE_LIMIT}")));
    }
    let mut best: Option<(f64, EdgeCover)> = None;
    for mask in 0u64..(1u64 << m) {
        let budgeted = (0..m)
            .filter(|&e| mask >> e & 1 == 1 && g.edge(e).class == EdgeClass::Budgeted)
            .count();
        if budgeted > k {
            continue;
        }
        let cover = EdgeCover::new((0..m).filter(|&e| mask >> e & 1 == 1).collect());
        if !cover.covers(g) {
            continue;
        }
        let w = cover.weight(g);
        if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
            best = Some((w, cover));
        }
    }
    Ok(best)
}

/// A cover system given as raw edges, where budgeted edges are limited to
/// `k` in total. Unlike [`LoopGraph`] any edge may be budgeted or not, so
/// systems whose unbudgeted class contains 2-edges can be expressed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverSystem {
    pub num_nodes: usize,
    pub edges: Vec<(usize, usize)>,
    pub budgeted: Vec<bool>,
    pub k: usize,
}

impl CoverSystem {
    pub fn from_graph(g: &LoopGraph, k: usize) -> Self {
        CoverSystem {
            num_nodes: g.num_nodes(),
            edges: g.edges().iter().map(|e| (e.u, e.v)).collect(),
            budgeted: g.edges().iter().map(|e| e.class == EdgeClass::Budgeted).collect(),
            k,
        }
    }

    /// Whether a multiplicity vector is an integral solution.
    pub fn admits(&self, x: &[u32]) -> bool {
        let used: u32 = x.iter().zip(&self.budgeted).filter(|(_, &b)| b).map(|(v, _)| v).sum();
        if used as usize > self.k {
            return false;
        }
        let mut hit = vec![false; self.num_nodes];
        for (&(u, v), &mult) in self.edges.iter().zip(x) {
            if mult > 0 {
                hit[u] = true;
                hit[v] = true;
            }
        }
        hit.into_iter().all(|h| h)
    }

    /// All integral solutions with multiplicities in `0..=max_mult`.
    pub fn enumerate(&self, max_mult: u32) -> Result<Vec<Vec<u32>>> {
        let m = self.edges.len();
        let space = (max_mult as u128 + 1).checked_pow(m as u32).unwrap_or(u128::MAX);
        guard(space, "cover enumeration")?;
        let mut out = Vec::new();
        let mut x = vec![0u32; m];
        loop {
            if self.admits(&x) {
                out.push(x.clone());
                if out.len() > HULL_LIMIT {
                    return Err(Error::capacity(format!("more than {HULL_LIMIT} integral solutions")));
                }
            }
            let mut pos = 0;
            loop {
                if pos == m {
                    return Ok(out);
                }
                if x[pos] < max_mult {
                    x[pos] += 1;
                    break;
                }
                x[pos] = 0;
                pos += 1;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum HullMembership {
    /// Convex weights over the solutions whose combination the point dominates.
    In { weights: Vec<f64> },
    /// `normal·s ≥ offset` for every solution `s`, `normal ≥ 0`, and
    /// `normal·point < offset`.
    Out { normal: Vec<f64>, offset: f64 },
}

/// Decides whether `point ≥ Σ λ_s s` for some convex combination of the given
/// integral solutions, and separates it otherwise.
pub fn integer_hull_membership(point: &[f64], solutions: &[Vec<u32>]) -> Result<HullMembership> {
    if solutions.len() > HULL_LIMIT {
        return Err(Error::capacity(format!("{} solutions, limit {HULL_LIMIT}", solutions.len())));
    }
    if solutions.iter().any(|s| s.len() != point.len()) {
        return Err(Error::input("solution length differs from the point"));
    }
    let n = point.len();
    let r = solutions.len();
    if r > 0 {
        let mut primal = LinearProgram::new(r);
        for coord in 0..n {
            let terms: Vec<(usize, f64)> = (0..r).map(|s| (s, solutions[s][coord] as f64)).collect();
            primal.add_sparse(&terms, Relation::Le, point[coord]);
        }
        let ones: Vec<(usize, f64)> = (0..r).map(|s| (s, 1.0)).collect();
        primal.add_sparse(&ones, Relation::Eq, 1.0);
        if let LpOutcome::Optimal(sol) = lp::solve(&primal)? {
            return Ok(HullMembership::In { weights: sol.x });
        }
    }
    // Separation: min normal·point − offset s.t. normal·s ≥ offset, 0 ≤ normal ≤ 1.
    let mut sep = LinearProgram::new(n + 1);
    let mut obj = point.to_vec();
    obj.push(-1.0);
    sep.set_objective(obj);
    for j in 0..n {
        sep.set_bounds(j, 0.0, 1.0);
    }
    sep.set_bounds(n, 0.0, n as f64 * solutions.iter().flatten().copied().max().unwrap_or(1).max(1) as f64);
    for s in solutions {
        let mut terms: Vec<(usize, f64)> = s.iter().enumerate().map(|(j, &v)| (j, v as f64)).collect();
        terms.push((n, -1.0));
        sep.add_sparse(&terms, Relation::Ge, 0.0);
    }
    if solutions.is_empty() {
        // Nothing to dominate: any positive offset separates.
        return Ok(HullMembership::Out {
            normal: vec![0.0; n],
            offset: 1.0,
        });
    }
    let sol = lp::solve(&sep)?
        .optimal()
        .ok_or_else(|| Error::invariant("hull separation LP has no optimum"))?;
    if sol.value >= -lp::FEAS_TOL {
        return Err(Error::invariant(
            "hull membership LP infeasible but no separating hyperplane found",
        ));
    }
    Ok(HullMembership::Out {
        normal: sol.x[..n].to_vec(),
        offset: sol.x[n],
    })
}

/// The 4-cycle `a, b, c, d` on nodes 0..4 with `a = (0,1)`, `b = (1,2)`,
/// `c = (2,3)`, `d = (3,0)`, budget on `{a, c}` with `k = 1`.
pub fn four_cycle_system() -> CoverSystem {
    CoverSystem {
        num_nodes: 4,
        edges: vec![(0, 1), (1, 2), (2, 3), (3, 0)],
        budgeted: vec![true, false, true, false],
        k: 1,
    }
}

/// The 4-cycle with `b` and `d` each replaced by a self-loop at both of their
/// endpoints. Edge order: `a, c, b@1, b@2, d@3, d@0`.
pub fn four_cycle_looped_system() -> CoverSystem {
    CoverSystem {
        num_nodes: 4,
        edges: vec![(0, 1), (2, 3), (1, 1), (2, 2), (3, 3), (0, 0)],
        budgeted: vec![true, true, false, false, false, false],
        k: 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::InstanceGenerator;
    use crate::graph::EdgeLabel;
    use crate::instance::{candidate_radii, Point, Tolerance};

    fn line(suppliers: &[f64], clients: &[f64], p: Option<Vec<f64>>, k: usize, ell: usize) -> Instance {
        Instance::new(
            suppliers.iter().map(|&x| Point::from([x, 0.0])).collect(),
            clients.iter().map(|&x| Point::from([x, 0.0])).collect(),
            p,
            k,
            ell,
        )
        .unwrap()
    }

    #[test]
    fn priority_examples() {
        assert_eq!(opt_priority(&line(&[0.0], &[2.0], Some(vec![3.0]), 1, 0)).unwrap().value, 6.0);
        let x = InstanceGenerator::new(3, 5).with_priorities(0.5, 3.0).with_k(3).generate_seeded(4);
        let all: Vec<usize> = (0..3).collect();
        assert_eq!(opt_priority(&x).unwrap().value, x.priority_objective(&all));
    }

    #[test]
    fn priority_double_enumeration() {
        for seed in 0..100 {
            let x = InstanceGenerator::new(6, 6)
                .with_priorities(0.5, 3.0)
                .with_k(1 + seed as usize % 3)
                .generate_seeded(seed);
            let mut second = f64::INFINITY;
            for mask in 1u32..(1 << 6) {
                if mask.count_ones() as usize <= x.k {
                    let set: Vec<usize> = (0..6).filter(|&i| mask >> i & 1 == 1).collect();
                    second = second.min(x.priority_objective(&set));
                }
            }
            assert_eq!(opt_priority(&x).unwrap().value, second);
        }
    }

    #[test]
    fn outlier_examples() {
        let x = line(&[0.0], &[1.0, 5.0], None, 1, 2);
        assert_eq!(opt_outliers(&x).unwrap().value, 0.0);
        let x = line(&[0.0, 7.0], &[1.0, 5.0, 9.0], None, 1, 1);
        let o = opt_outliers(&x).unwrap();
        assert_eq!((o.value, o.suppliers.clone(), o.outliers.clone()), (2.0, vec![1], vec![0]));
        let x = line(&[0.0], &[1.0, 5.0], None, 0, 1);
        assert_eq!(opt_outliers(&x).unwrap().value, f64::INFINITY);
    }

    #[test]
    fn outliers_without_drops_equal_unit_priority() {
        for seed in 0..60 {
            let x = InstanceGenerator::new(5, 7)
                .with_priorities(0.5, 3.0)
                .with_k(2)
                .generate_seeded(seed);
            let unit = x.without_priorities();
            assert_eq!(opt_outliers(&x).unwrap().value, opt_priority(&unit).unwrap().value);
        }
    }

    #[test]
    fn outlier_optimum_is_a_candidate_radius() {
        for seed in 0..60 {
            let x = InstanceGenerator::new(5, 8).with_k(2).with_ell(2).generate_seeded(seed);
            let v = opt_outliers(&x).unwrap().value;
            assert!(candidate_radii(&x, false).unwrap().contains(&v));
        }
    }

    #[test]
    fn size_guards() {
        let x = InstanceGenerator::new(40, 3).with_k(20).generate_seeded(1);
        assert!(matches!(opt_priority(&x), Err(Error::Capacity(_))));
        let g = LoopGraph::new(21);
        let mut g2 = g.clone();
        for v in 0..21 {
            g2.add_budgeted(v, v, EdgeLabel::Supplier(v)).unwrap();
        }
        assert!(matches!(ilp_cc_edge_cover(&g2, 3), Err(Error::Capacity(_))));
    }

    #[test]
    fn integral_solutions_are_feasible() {
        let x = InstanceGenerator::new(3, 5).with_k(2).with_ell(2).generate_seeded(8);
        let s = ScaledInstance::new(&x, 3.0, Tolerance::default()).unwrap();
        let sols = integral_outlier_solutions(&s).unwrap();
        for (c, o) in &sols {
            assert!(c.len() <= 2 && o.len() <= 2);
            for j in 0..5 {
                assert!(o.contains(&j) || c.iter().any(|&i| s.serves(i, j)));
            }
        }
        let mut dedup = sols.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), sols.len());
    }

    #[test]
    fn four_cycle_unit_weights() {
        let sols = four_cycle_system().enumerate(1).unwrap();
        let best = sols.iter().map(|x| x.iter().sum::<u32>()).min().unwrap();
        assert_eq!(best, 2);
        let argmin: Vec<&Vec<u32>> = sols.iter().filter(|x| x.iter().sum::<u32>() == best).collect();
        assert_eq!(argmin, vec![&vec![0, 1, 0, 1]]);
        assert!(sols.contains(&vec![1, 1, 0, 1]));
        assert!(!sols.contains(&vec![1, 0, 1, 0]));
    }

    #[test]
    fn loops_only_sum_weights() {
        let mut g = LoopGraph::new(3);
        for (v, w) in [2.0, 3.5, 1.0].into_iter().enumerate() {
            g.add_edge(v, v, EdgeLabel::Outlier, w, EdgeClass::Free).unwrap();
        }
        assert_eq!(ilp_cc_edge_cover(&g, 0).unwrap().unwrap().0, 6.5);
    }

    fn assert_certificate(point: &[f64], sols: &[Vec<u32>], m: &HullMembership) {
        match m {
            HullMembership::In { weights } => {
                assert!((weights.iter().sum::<f64>() - 1.0).abs() < 1e-7);
                for c in 0..point.len() {
                    let v: f64 = weights.iter().zip(sols).map(|(w, s)| w * s[c] as f64).sum();
                    assert!(v <= point[c] + 1e-7);
                }
            }
            HullMembership::Out { normal, offset } => {
                assert!(normal.iter().all(|&w| w >= -1e-12));
                for s in sols {
                    let v: f64 = normal.iter().zip(s).map(|(w, &x)| w * x as f64).sum();
                    assert!(v >= offset - 1e-7);
                }
                let at: f64 = normal.iter().zip(point).map(|(w, x)| w * x).sum();
                assert!(at < offset - 1e-7);
            }
        }
    }

    #[test]
    fn hull_examples() {
        let sys = four_cycle_system();
        let sols = sys.enumerate(2).unwrap();
        let half = [0.5; 4];
        let m = integer_hull_membership(&half, &sols).unwrap();
        assert!(matches!(m, HullMembership::Out { .. }));
        assert_certificate(&half, &sols, &m);

        let exact: Vec<f64> = sols[0].iter().map(|&v| v as f64).collect();
        let m = integer_hull_membership(&exact, &sols).unwrap();
        assert!(matches!(m, HullMembership::In { .. }));
        assert_certificate(&exact, &sols, &m);

        let avg: Vec<f64> = sols[0].iter().zip(&sols[1]).map(|(&a, &b)| (a + b) as f64 / 2.0).collect();
        let m = integer_hull_membership(&avg, &sols).unwrap();
        assert!(matches!(m, HullMembership::In { .. }));
        assert_certificate(&avg, &sols, &m);
    }

    #[test]
    fn looped_four_cycle_contains_the_half_point() {
        let sys = four_cycle_looped_system();
        let sols = sys.enumerate(2).unwrap();
        let half = [0.5; 6];
        let m = integer_hull_membership(&half, &sols).unwrap();
        assert!(matches!(m, HullMembership::In { .. }));
        assert_certificate(&half, &sols, &m);
    }
}
