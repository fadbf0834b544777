//! Classical greedy 3-approximation for (priority) k-supplier.
//!
//! At radius `r`, clients are scanned by decreasing priority; each unmarked
//! client takes its nearest supplier and marks every client within
//! priority-distance 2. More than `k` picks proves `OPT > r`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{candidate_radii, guess_loop, Guess, Instance, ScaledInstance, Tolerance};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineSolution {
    pub suppliers: Vec<usize>,
    /// Clients that triggered a pick, in scan order.
    pub centers: Vec<usize>,
}

pub fn solve_greedy(inst: &ScaledInstance<'_>) -> Result<Option<BaselineSolution>> {
    let n = inst.num_clients();
    if inst.num_suppliers() == 0 {
        return Ok((n == 0).then(|| BaselineSolution {
            suppliers: Vec::new(),
            centers: Vec::new(),
        }));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| inst.priority(b).total_cmp(&inst.priority(a)).then(a.cmp(&b)));
    let mut marked = vec![false; n];
    let mut centers = Vec::new();
    let mut suppliers = Vec::new();
    for &v in &order {
        if marked[v] {
            continue;
        }
        let nearest = (0..inst.num_suppliers())
            .min_by(|&a, &b| inst.cs(v, a).total_cmp(&inst.cs(v, b)))
            .expect("nonempty supplier set");
        if !inst.tol.le(inst.priority(v) * inst.cs(v, nearest), 1.0) || centers.len() == inst.k() {
            return Ok(None);
        }
        for w in 0..n {
            if !marked[w] && inst.tol.le(inst.priority(w) * inst.cc(w, v), 2.0) {
                marked[w] = true;
            }
        }
        centers.push(v);
        suppliers.push(nearest);
    }
    suppliers.sort_unstable();
    suppliers.dedup();
    Ok(Some(BaselineSolution { suppliers, centers }))
}

pub fn approximate(inst: &Instance, tol: Tolerance) -> Result<Guess<BaselineSolution>> {
    inst.validate()?;
    if inst.k == 0 {
        return Err(Error::input("k-supplier needs k >= 1"));
    }
    guess_loop(inst, &candidate_radii(inst, true)?, tol, solve_greedy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::InstanceGenerator;
    use crate::oracle::opt_priority;

    #[test]
    fn three_clusters_two_centers_rejected() {
        let x = Instance::new(
            vec![[0.0, 0.0].into(), [10.0, 0.0].into(), [20.0, 0.0].into()],
            vec![[0.0, 0.0].into(), [10.0, 0.0].into(), [20.0, 0.0].into()],
            None,
            2,
            0,
        )
        .unwrap();
        let s = ScaledInstance::new(&x, 1.0, Tolerance::default()).unwrap();
        assert!(solve_greedy(&s).unwrap().is_none());
        let g = approximate(&x, Tolerance::default()).unwrap();
        assert_eq!(g.radius, 10.0);
    }

    #[test]
    fn within_three_of_optimum() {
        for seed in 0..200 {
            let x = InstanceGenerator::new(5, 6).with_k(2).with_priorities(0.5, 3.0).generate_seeded(seed);
            let opt = opt_priority(&x).unwrap().value;
            let g = approximate(&x, Tolerance::default()).unwrap();
            assert!(g.solution.suppliers.len() <= 2);
            assert!(g.radius <= opt * (1.0 + 1e-9));
            assert!(x.priority_objective(&g.solution.suppliers) <= 3.0 * opt + 1e-6, "seed {seed}");
        }
    }
}
