use proptest::prelude::*;

use ksupplier::generate::InstanceGenerator;
use ksupplier::graph::SeparationMode;
use ksupplier::instance::{candidate_radii, APPROX_RATIO};
use ksupplier::oracle::{opt_outliers, opt_priority};
use ksupplier::outliers::{self, round_or_cut, OutlierOptions};
use ksupplier::{baseline, priority, Error, Instance, ScaledInstance, Tolerance};

fn instance(seed: u64, ni: usize, nj: usize, k: usize, ell: usize, dim: usize, prio: bool) -> Instance {
    let mut g = InstanceGenerator::new(ni, nj).with_k(k.clamp(1, ni)).with_ell(ell.min(nj)).with_dim(dim);
    if prio {
        g = g.with_priorities(0.5, 3.0);
    }
    g.generate_seeded(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn priority_ratio_any_dimension(seed in any::<u64>(), ni in 1usize..=5, nj in 1usize..=6, k in 1usize..=3, dim in 1usize..=4) {
        let x = instance(seed, ni, nj, k, 0, dim, true);
        let opt = opt_priority(&x).unwrap().value;
        let g = priority::approximate(&x, Tolerance::default()).unwrap();
        prop_assert!(g.radius <= opt * (1.0 + 1e-9));
        prop_assert!(x.priority_objective(&g.solution.suppliers) <= APPROX_RATIO * opt + 1e-6);
    }

    #[test]
    fn outliers_ratio_any_dimension(seed in any::<u64>(), ni in 1usize..=4, nj in 1usize..=6, k in 1usize..=3, ell in 0usize..=3, dim in 1usize..=3) {
        let x = instance(seed, ni, nj, k, ell, dim, false);
        let opt = opt_outliers(&x).unwrap().value;
        let r = outliers::approximate(&x, &OutlierOptions::default()).unwrap();
        let sol = r.solution.unwrap();
        prop_assert!(sol.suppliers.len() <= x.k && sol.outliers.len() <= x.ell);
        prop_assert!(x.outlier_objective(&sol.suppliers, &sol.outliers) <= APPROX_RATIO * opt + 1e-6);
    }

    #[test]
    fn round_or_cut_accepts_every_radius_above_optimum(seed in any::<u64>(), ell in 0usize..=2) {
        let x = instance(seed, 4, 6, 2, ell, 2, false);
        let opt = opt_outliers(&x).unwrap().value;
        for &b in candidate_radii(&x, false).unwrap().iter().filter(|&&b| b >= opt) {
            let s = ScaledInstance::new(&x, b, Tolerance::default()).unwrap();
            prop_assert!(round_or_cut(&s, &OutlierOptions::default()).unwrap().solution().is_some());
        }
    }

    #[test]
    fn heuristic_separation_is_validated(seed in any::<u64>(), ell in 0usize..=3) {
        let x = instance(seed, 5, 8, 2, ell, 2, false);
        let opts = OutlierOptions { mode: SeparationMode::Heuristic, ..OutlierOptions::default() };
        match outliers::approximate(&x, &opts) {
            Ok(r) => {
                let sol = r.solution.unwrap();
                let opt = opt_outliers(&x).unwrap().value;
                prop_assert!(x.outlier_objective(&sol.suppliers, &sol.outliers) <= APPROX_RATIO * opt + 1e-6);
            }
            // A missed cut surfaces as a diagnostic, never as a wrong answer.
            Err(Error::Invariant(_)) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn baseline_within_three(seed in any::<u64>(), k in 1usize..=3) {
        let x = instance(seed, 5, 6, k, 0, 2, true);
        let opt = opt_priority(&x).unwrap().value;
        let g = baseline::approximate(&x, Tolerance::default()).unwrap();
        prop_assert!(x.priority_objective(&g.solution.suppliers) <= 3.0 * opt + 1e-6);
    }

    #[test]
    fn instance_json_round_trip(seed in any::<u64>(), prio: bool) {
        let x = instance(seed, 3, 4, 2, 1, 3, prio);
        prop_assert_eq!(Instance::from_json(&x.to_json()).unwrap(), x);
    }
}

#[test]
fn outlier_oracle_without_outliers_matches_unit_priority_oracle() {
    for seed in 0..100 {
        let x = instance(seed, 5, 6, 2, 0, 2, true);
        let plain = x.without_priorities();
        assert_eq!(opt_outliers(&x).unwrap().value, opt_priority(&plain).unwrap().value);
    }
}
