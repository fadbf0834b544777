//! Reduction from 1-in-3-SAT to Euclidean matroid supplier.
//!
//! Each variable becomes a regular `4d`-gon of unit side whose vertices
//! alternate client, `x_i` supplier, client, `¬x_i` supplier. Every clause
//! owns a part holding one supplier per literal, and the remaining suppliers
//! form a part of capacity `dn − m`. A satisfying assignment gives a
//! solution of value 1; otherwise every independent set has value above
//! `3 − ε`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Point};

/// Largest supplier count [`brute_force_optimum`] enumerates.
pub const BRUTE_FORCE_SUPPLIER_LIMIT: usize = 24;

const UNIT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    /// Zero-based variable index.
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn holds(self, assignment: &[bool]) -> bool {
        assignment[self.var] != self.negated
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Formula {
    pub num_vars: usize,
    pub clauses: Vec<[Literal; 3]>,
}

impl Formula {
    pub fn new(num_vars: usize, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        for (k, c) in clauses.iter().enumerate() {
            if let Some(l) = c.iter().find(|l| l.var >= num_vars) {
                return Err(Error::input(format!("clause {k} uses variable {} of {num_vars}", l.var + 1)));
            }
            if c[0].var == c[1].var || c[0].var == c[2].var || c[1].var == c[2].var {
                return Err(Error::input(format!("clause {k} repeats a variable")));
            }
        }
        Ok(Formula { num_vars, clauses })
    }

    /// Parses `p cnf n m` followed by clauses of three nonzero literals, each
    /// terminated by `0`. Lines starting with `c` are comments.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header = None;
        let mut lits = Vec::new();
        for line in text.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let f: Vec<&str> = rest.split_whitespace().collect();
                let parsed = match f.as_slice() {
                    ["cnf", n, m] => n.parse::<usize>().ok().zip(m.parse::<usize>().ok()),
                    _ => None,
                };
                header = Some(parsed.ok_or_else(|| Error::input(format!("bad header line {line:?}")))?);
                continue;
            }
            for tok in line.split_whitespace() {
                lits.push(tok.parse::<i64>().map_err(|_| Error::input(format!("bad literal {tok:?}")))?);
            }
        }
        let (n, m) = header.ok_or_else(|| Error::input("missing `p cnf` header"))?;
        let mut clauses = Vec::new();
        for chunk in lits.split(|&l| l == 0).filter(|c| !c.is_empty()) {
            let c: Vec<Literal> = chunk
                .iter()
                .map(|&l| Literal {
                    var: l.unsigned_abs() as usize - 1,
                    negated: l < 0,
                })
                .collect();
            let c: [Literal; 3] = c
                .try_into()
                .map_err(|c: Vec<Literal>| Error::input(format!("clause with {} literals, expected 3", c.len())))?;
            clauses.push(c);
        }
        if clauses.len() != m {
            return Err(Error::input(format!("header announces {m} clauses, found {}", clauses.len())));
        }
        Formula::new(n, clauses)
    }

    pub fn is_one_in_three(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().filter(|l| l.holds(assignment)).count() == 1)
    }

    /// A satisfying 1-in-3 assignment by exhaustive search.
    pub fn solve(&self) -> Option<Vec<bool>> {
        (0u64..1 << self.num_vars)
            .map(|bits| (0..self.num_vars).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>())
            .find(|a| self.is_one_in_three(a))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        for c in &self.clauses {
            for l in c {
                let v = l.var as i64 + 1;
                write!(f, "{} ", if l.negated { -v } else { v })?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupplierRole {
    pub cycle: usize,
    /// Polygon position `j` in `1..=4d`.
    pub vertex: usize,
    /// `true` for an `x_i` supplier, `false` for `¬x_i`.
    pub positive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GadgetInstance {
    /// Supplier and client coordinates; `k = dn` is the matroid rank.
    #[serde(flatten)]
    pub instance: Instance,
    /// `parts[0]` is `P₀`, `parts[k]` belongs to clause `k`.
    pub parts: Vec<Vec<usize>>,
    pub capacities: Vec<usize>,
    pub epsilon: f64,
    pub c: f64,
    pub d: usize,
    pub formula: Formula,
    pub supplier_roles: Vec<SupplierRole>,
    /// `(cycle, vertex)` of each client.
    pub client_roles: Vec<(usize, usize)>,
}

/// `c = 2π / arccos(1 − ε/2)`.
pub fn gap_constant(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 2.0) {
        return Err(Error::input(format!("epsilon must lie in (0, 2), got {epsilon}")));
    }
    Ok(2.0 * PI / (1.0 - epsilon / 2.0).acos())
}

/// Smallest integer `d ≥ max((c+1)/4, m, 1)`.
pub fn polygon_parameter(c: f64, m: usize) -> usize {
    let from_c = ((c + 1.0) / 4.0 - 1e-9).ceil().max(1.0) as usize;
    from_c.max(m).max(1)
}

/// Circumradius of the regular `sides`-gon with unit side.
pub fn circumradius(sides: usize) -> f64 {
    1.0 / (2.0 * (PI / sides as f64).sin())
}

/// Smallest client–supplier distance other than 1 within a `4d`-gon:
/// `1 + 2cos(π − (4d−2)π/4d)`.
pub fn non_unit_distance_bound(d: usize) -> f64 {
    let n = 4.0 * d as f64;
    1.0 + 2.0 * (PI - (n - 2.0) * PI / n).cos()
}

pub fn build_gadget(formula: &Formula, epsilon: f64) -> Result<GadgetInstance> {
    let formula = Formula::new(formula.num_vars, formula.clauses.clone())?;
    let c = gap_constant(epsilon)?;
    let m = formula.clauses.len();
    let d = polygon_parameter(c, m);
    let sides = 4 * d;
    let r = circumradius(sides);
    let spacing = 2.0 * r + 4.0;

    let mut suppliers = Vec::new();
    let mut clients = Vec::new();
    let mut supplier_roles = Vec::new();
    let mut client_roles = Vec::new();
    for cycle in 0..formula.num_vars {
        let cx = cycle as f64 * spacing;
        for j in 1..=sides {
            let angle = 2.0 * PI * j as f64 / sides as f64;
            let p = Point::from([cx + r * angle.cos(), r * angle.sin()]);
            match j % 4 {
                0 | 2 => {
                    suppliers.push(p);
                    supplier_roles.push(SupplierRole {
                        cycle,
                        vertex: j,
                        positive: j % 4 == 0,
                    });
                }
                _ => {
                    clients.push(p);
                    client_roles.push((cycle, j));
                }
            }
        }
    }

    let mut used = vec![false; suppliers.len()];
    let mut parts = vec![Vec::new()];
    for clause in &formula.clauses {
        let mut part = Vec::with_capacity(3);
        for lit in clause {
            let id = (0..suppliers.len())
                .find(|&s| {
                    let role = supplier_roles[s];
                    !used[s] && role.cycle == lit.var && role.positive != lit.negated
                })
                .ok_or_else(|| Error::invariant("ran out of suppliers for a clause part"))?;
            used[id] = true;
            part.push(id);
        }
        part.sort_unstable();
        parts.push(part);
    }
    parts[0] = (0..suppliers.len()).filter(|&s| !used[s]).collect();
    let mut capacities = vec![d * formula.num_vars - m];
    capacities.extend(std::iter::repeat_n(1, m));

    let instance = Instance::new(suppliers, clients, None, d * formula.num_vars, 0)?;
    Ok(GadgetInstance {
        instance,
        parts,
        capacities,
        epsilon,
        c,
        d,
        formula,
        supplier_roles,
        client_roles,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// `max_j d(j, chosen)`; `∞` for an empty selection.
    pub objective: f64,
    pub independent: bool,
    /// Chosen suppliers per part.
    pub part_counts: Vec<usize>,
}

impl GadgetInstance {
    pub fn num_suppliers(&self) -> usize {
        self.instance.num_suppliers()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: GadgetInstance =
            serde_json::from_str(text).map_err(|e| Error::input(format!("bad gadget JSON: {e}")))?;
        g.instance.validate()?;
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("gadget serializes")
    }

    fn part_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.num_suppliers()];
        for (p, part) in self.parts.iter().enumerate() {
            part.iter().for_each(|&s| out[s] = p);
        }
        out
    }

    /// Suppliers of one cycle with one label, by polygon position.
    pub fn label_class(&self, cycle: usize, positive: bool) -> Vec<usize> {
        (0..self.num_suppliers())
            .filter(|&s| self.supplier_roles[s].cycle == cycle && self.supplier_roles[s].positive == positive)
            .collect()
    }

    /// The selection `{all x_i suppliers if a_i, else all ¬x_i suppliers}`.
    pub fn yes_solution(&self, assignment: &[bool]) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.formula.num_vars)
            .flat_map(|i| self.label_class(i, assignment[i]))
            .collect();
        out.sort_unstable();
        out
    }
}

fn check_ids(g: &GadgetInstance, chosen: &[usize]) -> Result<Vec<usize>> {
    if let Some(&bad) = chosen.iter().find(|&&s| s >= g.num_suppliers()) {
        return Err(Error::input(format!("supplier {bad} out of range")));
    }
    let mut ids = chosen.to_vec();
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

pub fn eval_solution(g: &GadgetInstance, chosen: &[usize]) -> Result<Evaluation> {
    let ids = check_ids(g, chosen)?;
    let mut part_counts = vec![0; g.parts.len()];
    let part_of = g.part_of();
    ids.iter().for_each(|&s| part_counts[part_of[s]] += 1);
    let independent = part_counts.iter().zip(&g.capacities).all(|(n, cap)| n <= cap);
    let objective = (0..g.instance.num_clients())
        .map(|j| g.instance.dist_to_set(j, &ids))
        .fold(0.0, f64::max);
    Ok(Evaluation {
        objective,
        independent,
        part_counts,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    pub assignment: Vec<bool>,
    /// Every clause has exactly one true literal.
    pub valid: bool,
}

/// Reads the assignment off an independent objective-1 selection. Each
/// cycle must hold all of its `x_i` or all of its `¬x_i` suppliers and each
/// clause part exactly one; a feasible selection breaking this is reported
/// as an invariant error.
pub fn extract_assignment(g: &GadgetInstance, chosen: &[usize]) -> Result<Extraction> {
    let ids = check_ids(g, chosen)?;
    let eval = eval_solution(g, &ids)?;
    if (eval.objective - 1.0).abs() > UNIT_TOL {
        return Err(Error::input(format!("selection has objective {}, expected 1", eval.objective)));
    }
    let failure = |msg: String| {
        if eval.independent {
            Error::invariant(format!("independent objective-1 selection: {msg}"))
        } else {
            Error::input(format!("selection is not independent: {msg}"))
        }
    };
    let mut assignment = Vec::with_capacity(g.formula.num_vars);
    for i in 0..g.formula.num_vars {
        let pos = g.label_class(i, true);
        let neg = g.label_class(i, false);
        let mine: Vec<usize> = ids.iter().copied().filter(|&s| g.supplier_roles[s].cycle == i).collect();
        if mine == pos {
            assignment.push(true);
        } else if mine == neg {
            assignment.push(false);
        } else {
            return Err(failure(format!("cycle {i} is not unanimous")));
        }
    }
    if let Some(k) = (1..g.parts.len()).find(|&k| eval.part_counts[k] != 1) {
        return Err(failure(format!("clause part {k} holds {} suppliers", eval.part_counts[k])));
    }
    if !eval.independent {
        return Err(Error::input("selection is not independent"));
    }
    Ok(Extraction {
        valid: g.formula.is_one_in_three(&assignment),
        assignment,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BruteForce {
    /// Minimum objective over all independent selections.
    pub optimum: f64,
    pub best: Vec<usize>,
    /// Every independent selection with objective 1.
    pub unit_solutions: Vec<Vec<usize>>,
}

/// Exhaustive minimum over all independent supplier sets.
pub fn brute_force_optimum(g: &GadgetInstance) -> Result<BruteForce> {
    let ns = g.num_suppliers();
    if ns > BRUTE_FORCE_SUPPLIER_LIMIT {
        return Err(Error::capacity(format!(
            "{ns} suppliers exceed the brute-force limit {BRUTE_FORCE_SUPPLIER_LIMIT}"
        )));
    }
    let inst = &g.instance;
    let nc = inst.num_clients();
    let part_masks: Vec<u32> = g.parts.iter().map(|p| p.iter().fold(0, |m, &s| m | 1 << s)).collect();
    let unit_masks: Vec<u32> = (0..nc)
        .map(|j| (0..ns).filter(|&s| inst.cs_dist(j, s) <= 1.0 + UNIT_TOL).fold(0, |m, s| m | 1 << s))
        .collect();
    let objective = |mask: u32| {
        (0..nc)
            .map(|j| {
                (0..ns)
                    .filter(|&s| mask >> s & 1 == 1)
                    .map(|s| inst.cs_dist(j, s))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    let mut best = (f64::INFINITY, 0u32);
    let mut unit_solutions = Vec::new();
    for mask in 0u32..(1u32 << ns) {
        let counts: Vec<u32> = part_masks.iter().map(|&pm| (mask & pm).count_ones()).collect();
        if counts.iter().zip(&g.capacities).any(|(&n, &cap)| n as usize > cap) {
            continue;
        }
        let ids = || (0..ns).filter(|&s| mask >> s & 1 == 1).collect::<Vec<usize>>();
        if unit_masks.iter().all(|&um| mask & um != 0) {
            unit_solutions.push(ids());
            best = (objective(mask).min(best.0), if objective(mask) < best.0 { mask } else { best.1 });
            continue;
        }
        // The objective only drops as suppliers are added, so bases suffice.
        let is_base = counts.iter().zip(&g.capacities).all(|(&n, &cap)| n as usize == cap);
        if is_base && best.0 > 1.0 + UNIT_TOL {
            let v = objective(mask);
            if v < best.0 {
                best = (v, mask);
            }
        }
    }
    Ok(BruteForce {
        optimum: best.0,
        best: (0..ns).filter(|&s| best.1 >> s & 1 == 1).collect(),
        unit_solutions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(v: i64) -> Literal {
        Literal {
            var: v.unsigned_abs() as usize - 1,
            negated: v < 0,
        }
    }

    fn figure_clause() -> Formula {
        Formula::new(3, vec![[lit(1), lit(-2), lit(-3)]]).unwrap()
    }

    #[test]
    fn one_clause_gadget_counts() {
        let g = build_gadget(&figure_clause(), 1.0).unwrap();
        assert!((g.c - 6.0).abs() < 1e-9);
        assert_eq!(g.d, 2);
        assert_eq!(g.num_suppliers(), 12);
        assert_eq!(g.instance.num_clients(), 12);
        assert_eq!(g.parts.len(), 2);
        assert_eq!(g.capacities, vec![5, 1]);
        let roles: Vec<(usize, bool)> = g.parts[1].iter().map(|&s| (g.supplier_roles[s].cycle, g.supplier_roles[s].positive)).collect();
        assert_eq!(roles, vec![(0, true), (1, false), (2, false)]);
        // Lowest unused polygon position of the matching label.
        assert_eq!(g.parts[1].iter().map(|&s| g.supplier_roles[s].vertex).collect::<Vec<_>>(), vec![4, 2, 2]);
    }

    #[test]
    fn dimacs_round_trip() {
        let f = Formula::parse_dimacs("c demo\np cnf 4 2\n1 -2 -3 0\n2 3 4 0\n").unwrap();
        assert_eq!(f.clauses[0], [lit(1), lit(-2), lit(-3)]);
        assert_eq!(Formula::parse_dimacs(&f.to_string()).unwrap(), f);
        assert!(Formula::parse_dimacs("p cnf 3 1\n1 2 0\n").is_err());
        assert!(Formula::parse_dimacs("p cnf 3 1\n1 1 2 0\n").is_err());
        assert!(Formula::parse_dimacs("p cnf 3 2\n1 2 3 0\n").is_err());
    }

    #[test]
    fn geometry_invariants() {
        for eps in [1.0, 0.5, 0.1, 0.01] {
            let f = Formula::new(3, vec![[lit(1), lit(2), lit(3)], [lit(-1), lit(2), lit(-3)]]).unwrap();
            let g = build_gadget(&f, eps).unwrap();
            assert!(g.d as f64 >= (g.c + 1.0) / 4.0 - 1e-9 && g.d >= 2);
            let sides = 4 * g.d;
            // Rebuild polygon order per cycle from the roles.
            for cycle in 0..3 {
                let mut verts: Vec<(usize, &Point)> = Vec::new();
                for (s, r) in g.supplier_roles.iter().enumerate() {
                    if r.cycle == cycle {
                        verts.push((r.vertex, &g.instance.suppliers[s]));
                    }
                }
                for (j, &(c, v)) in g.client_roles.iter().enumerate() {
                    if c == cycle {
                        verts.push((v, &g.instance.clients[j]));
                    }
                }
                verts.sort_by_key(|v| v.0);
                assert_eq!(verts.len(), sides);
                for w in 0..sides {
                    let d = crate::instance::dist(verts[w].1, verts[(w + 1) % sides].1).unwrap();
                    assert!((d - 1.0).abs() <= 1e-9);
                }
            }
            let gap = 3.0 - eps;
            for j in 0..g.instance.num_clients() {
                for s in 0..g.num_suppliers() {
                    let d = g.instance.cs_dist(j, s);
                    if g.client_roles[j].0 == g.supplier_roles[s].cycle {
                        assert!((d - 1.0).abs() <= 1e-9 || d > gap, "{d}");
                        assert!((d - 1.0).abs() <= 1e-9 || d >= non_unit_distance_bound(g.d) - 1e-9);
                    } else {
                        assert!(d >= 3.0);
                    }
                }
            }
            let mut all: Vec<usize> = g.parts.concat();
            all.sort_unstable();
            assert_eq!(all, (0..g.num_suppliers()).collect::<Vec<_>>());
            assert_eq!(g.capacities.iter().sum::<usize>(), g.d * 3);
        }
    }

    #[test]
    fn epsilon_out_of_range() {
        assert!(matches!(build_gadget(&figure_clause(), 2.0), Err(Error::Input(_))));
        assert!(matches!(build_gadget(&figure_clause(), 0.0), Err(Error::Input(_))));
    }

    #[test]
    fn yes_case_and_extraction() {
        let f = figure_clause();
        let g = build_gadget(&f, 1.0).unwrap();
        let a = vec![true, true, true];
        assert!(f.is_one_in_three(&a));
        let sol = g.yes_solution(&a);
        let e = eval_solution(&g, &sol).unwrap();
        assert!((e.objective - 1.0).abs() < 1e-9 && e.independent);
        assert_eq!(extract_assignment(&g, &sol).unwrap(), Extraction { assignment: a, valid: true });
        let dropped = &sol[1..];
        let e = eval_solution(&g, dropped).unwrap();
        assert!(e.objective >= non_unit_distance_bound(g.d) - 1e-9);
        assert!(e.objective > 2.0);
        assert_eq!(eval_solution(&g, &[]).unwrap().objective, f64::INFINITY);
    }

    #[test]
    fn non_unanimous_selection_rejected() {
        let g = build_gadget(&figure_clause(), 1.0).unwrap();
        let all: Vec<usize> = (0..g.num_suppliers()).collect();
        assert!(matches!(extract_assignment(&g, &all), Err(Error::Input(_))));
        assert!(matches!(extract_assignment(&g, &[0]), Err(Error::Input(_))));
    }

    #[test]
    fn unit_solutions_of_one_clause_formulas_decode_validly() {
        for signs in 0..8u32 {
            let c = [1, 2, 3].map(|v: i64| lit(if signs >> (v - 1) & 1 == 1 { -v } else { v }));
            let f = Formula::new(3, vec![c]).unwrap();
            let g = build_gadget(&f, 1.0).unwrap();
            let bf = brute_force_optimum(&g).unwrap();
            assert!((bf.optimum - 1.0).abs() < 1e-9);
            // Three variables, one clause: exactly three satisfying assignments.
            assert_eq!(bf.unit_solutions.len(), 3);
            for s in &bf.unit_solutions {
                assert!(extract_assignment(&g, s).unwrap().valid);
            }
        }
    }

    #[test]
    fn unsatisfiable_formula_has_large_optimum() {
        // x1+x2+x3 = 1 and ¬x1+¬x2+¬x3 = 1 would need 1 and 2 true at once.
        let f = Formula::new(3, vec![[lit(1), lit(2), lit(3)], [lit(-1), lit(-2), lit(-3)]]).unwrap();
        assert!(f.solve().is_none());
        let g = build_gadget(&f, 1.0).unwrap();
        let bf = brute_force_optimum(&g).unwrap();
        assert!(bf.unit_solutions.is_empty());
        assert!(bf.optimum >= 2.0);
        assert_eq!(bf.optimum, eval_solution(&g, &bf.best).unwrap().objective);
    }

    #[test]
    fn gadget_json_round_trip() {
        let g = build_gadget(&figure_clause(), 1.0).unwrap();
        let text = g.to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v["suppliers"].is_array() && v["parts"].is_array() && v["capacities"].is_array());
        assert_eq!(GadgetInstance::from_json(&text).unwrap(), g);
    }
}
