use ksupplier::hardness::{brute_force_optimum, build_gadget, extract_assignment, Formula, Literal};

fn clauses(n: usize) -> Vec<[Literal; 3]> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for signs in 0..8u32 {
                    let l = |v, bit: u32| Literal { var: v, negated: signs >> bit & 1 == 1 };
                    out.push([l(a, 0), l(b, 1), l(c, 2)]);
                }
            }
        }
    }
    out
}

/// Three clauses over three variables (d = 3, 18 suppliers), all multisets.
#[test]
fn three_clause_formulas_exhaustive() {
    let cs = clauses(3);
    let mut counted = 0;
    for i in 0..cs.len() {
        for j in i..cs.len() {
            for k in j..cs.len() {
                let f = Formula::new(3, vec![cs[i], cs[j], cs[k]]).unwrap();
                let g = build_gadget(&f, 1.0).unwrap();
                assert_eq!(g.d, 3);
                let bf = brute_force_optimum(&g).unwrap();
                match f.solve() {
                    Some(_) => assert!((bf.optimum - 1.0).abs() <= 1e-9),
                    None => assert!(bf.optimum > 2.0 && bf.unit_solutions.is_empty()),
                }
                for s in &bf.unit_solutions {
                    assert!(extract_assignment(&g, s).unwrap().valid);
                }
                counted += 1;
            }
        }
    }
    assert_eq!(counted, 120);
}

#[test]
fn small_epsilon_grows_polygons() {
    let f = Formula::new(3, vec![clauses(3)[0]]).unwrap();
    let mut last = 0;
    for eps in [1.5, 1.0, 0.5, 0.2, 0.05] {
        let g = build_gadget(&f, eps).unwrap();
        assert!(g.d as f64 >= (g.c + 1.0) / 4.0 - 1e-9);
        assert!(g.d >= last);
        last = g.d;
        assert_eq!(g.num_suppliers(), 2 * g.d * 3);
    }
    assert!(last > 2);
}
