//! Two-phase dense tableau simplex.
//!
//! Variables are shifted to `x' = x − lower ≥ 0`; finite upper bounds become
//! `≤` rows. Each row gets an identity column (slack, or artificial for `≥`
//! and `=` rows after making the right-hand side nonnegative), which is also
//! where the row dual is read from at the end of each phase.

use super::{FarkasCertificate, LinearProgram, LpError, LpOutcome, LpSolution, Relation};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
const DEGENERATE_STREAK: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Col {
    Structural,
    Slack,
    Artificial,
}

#[derive(Clone, Copy, Debug)]
enum Origin {
    Row(usize),
    Upper(usize),
}

struct Tableau {
    width: usize,
    /// Row-major, `width + 1` entries per row, the last is the right-hand side.
    a: Vec<Vec<f64>>,
    /// Reduced costs, last entry is minus the objective value.
    cost: Vec<f64>,
    basis: Vec<usize>,
    kinds: Vec<Col>,
    id_col: Vec<usize>,
    sigma: Vec<f64>,
    origin: Vec<Origin>,
    iterations: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
    Stalled,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let mut rows: Vec<(Vec<f64>, Relation, f64, Origin)> = Vec::new();
        for (i, c) in lp.constraints().iter().enumerate() {
            let shift: f64 = c.coeffs.iter().zip(lp.lower()).map(|(a, l)| a * l).sum();
            rows.push((c.coeffs.clone(), c.relation, c.rhs - shift, Origin::Row(i)));
        }
        for j in 0..n {
            if lp.upper()[j].is_finite() {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                rows.push((e, Relation::Le, lp.upper()[j] - lp.lower()[j], Origin::Upper(j)));
            }
        }
        let m = rows.len();
        let mut sigma = vec![1.0; m];
        for (r, row) in rows.iter_mut().enumerate() {
            if row.2 < 0.0 {
                sigma[r] = -1.0;
                row.0.iter_mut().for_each(|a| *a = -*a);
                row.2 = -row.2;
                row.1 = match row.1 {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
        }
        let mut kinds = vec![Col::Structural; n];
        let mut slack_of = vec![None; m];
        for (r, row) in rows.iter().enumerate() {
            if row.1 != Relation::Eq {
                slack_of[r] = Some(kinds.len());
                kinds.push(Col::Slack);
            }
        }
        let mut art_of = vec![None; m];
        for (r, row) in rows.iter().enumerate() {
            if row.1 != Relation::Le {
                art_of[r] = Some(kinds.len());
                kinds.push(Col::Artificial);
            }
        }
        let width = kinds.len();
        let mut a = vec![vec![0.0; width + 1]; m];
        let mut basis = vec![0; m];
        let mut id_col = vec![0; m];
        for (r, row) in rows.iter().enumerate() {
            a[r][..n].copy_from_slice(&row.0);
            a[r][width] = row.2;
            match row.1 {
                Relation::Le => {
                    let s = slack_of[r].unwrap();
                    a[r][s] = 1.0;
                    basis[r] = s;
                    id_col[r] = s;
                }
                Relation::Ge => {
                    a[r][slack_of[r].unwrap()] = -1.0;
                    let t = art_of[r].unwrap();
                    a[r][t] = 1.0;
                    basis[r] = t;
                    id_col[r] = t;
                }
                Relation::Eq => {
                    let t = art_of[r].unwrap();
                    a[r][t] = 1.0;
                    basis[r] = t;
                    id_col[r] = t;
                }
            }
        }
        Tableau {
            width,
            a,
            cost: vec![0.0; width + 1],
            basis,
            kinds,
            id_col,
            sigma,
            origin: rows.into_iter().map(|r| r.3).collect(),
            iterations: 0,
        }
    }

    /// Installs column costs and prices out the current basis.
    fn set_costs(&mut self, c: &[f64]) {
        self.cost = c.to_vec();
        self.cost.push(0.0);
        for r in 0..self.a.len() {
            let cb = self.cost[self.basis[r]];
            if cb != 0.0 {
                for (cj, arj) in self.cost.iter_mut().zip(&self.a[r]) {
                    *cj -= cb * arj;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c];
        for v in self.a[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                    if v.abs() < 1e-13 {
                        *v = 0.0;
                    }
                }
                row[c] = 0.0;
            }
        }
        let f = self.cost[c];
        if f != 0.0 {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
                if v.abs() < 1e-13 {
                    *v = 0.0;
                }
            }
            self.cost[c] = 0.0;
        }
        self.basis[r] = c;
        self.iterations += 1;
    }

    fn run(&mut self, allow_artificial: bool, mut bland: bool, max_iter: usize) -> PhaseEnd {
        let start = self.iterations;
        let mut streak = 0;
        loop {
            if self.iterations - start > max_iter {
                return PhaseEnd::Stalled;
            }
            let eligible = |j: usize| allow_artificial || self.kinds[j] != Col::Artificial;
            let entering = if bland {
                (0..self.width).find(|&j| eligible(j) && self.cost[j] < -COST_TOL)
            } else {
                (0..self.width)
                    .filter(|&j| eligible(j) && self.cost[j] < -COST_TOL)
                    .min_by(|&x, &y| self.cost[x].total_cmp(&self.cost[y]))
            };
            let Some(c) = entering else {
                return PhaseEnd::Optimal;
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.a.len() {
                let arc = self.a[r][c];
                if arc <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.a[r][self.width].max(0.0) / arc;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((lr, lratio)) => {
                        let better = if ratio < lratio - 1e-12 {
                            true
                        } else if ratio <= lratio + 1e-12 {
                            if bland {
                                self.basis[r] < self.basis[lr]
                            } else {
                                arc > self.a[lr][c]
                            }
                        } else {
                            false
                        };
                        if better {
                            Some((r, ratio))
                        } else {
                            Some((lr, lratio))
                        }
                    }
                };
            }
            let Some((r, ratio)) = leave else {
                return PhaseEnd::Unbounded;
            };
            if ratio <= 1e-12 {
                streak += 1;
                if streak > DEGENERATE_STREAK {
                    bland = true;
                }
            } else {
                streak = 0;
            }
            self.pivot(r, c);
        }
    }

    /// `u_r = c_id − d_id` for each row's identity column under the current costs.
    fn row_duals(&self, id_cost: impl Fn(usize) -> f64) -> Vec<f64> {
        (0..self.a.len())
            .map(|r| id_cost(self.id_col[r]) - self.cost[self.id_col[r]])
            .collect()
    }

    fn drop_artificial_basics(&mut self) {
        let mut r = 0;
        while r < self.a.len() {
            if self.kinds[self.basis[r]] == Col::Artificial {
                let col = (0..self.width)
                    .filter(|&j| self.kinds[j] != Col::Artificial && self.a[r][j].abs() > PIVOT_TOL)
                    .max_by(|&x, &y| self.a[r][x].abs().total_cmp(&self.a[r][y].abs()));
                match col {
                    Some(c) => self.pivot(r, c),
                    None => {
                        // Redundant row: no structural or slack support left.
                        self.a.remove(r);
                        self.basis.remove(r);
                        self.id_col.remove(r);
                        self.sigma.remove(r);
                        self.origin.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }
}

pub(super) fn solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    let rows = lp.constraints().len() + lp.upper().iter().filter(|u| u.is_finite()).count();
    let max_iter = 20_000 + 200 * (rows + lp.num_vars());
    match solve_with(lp, false, max_iter)? {
        Some(out) => Ok(out),
        None => solve_with(lp, true, max_iter)?.ok_or(LpError::Stalled { iterations: max_iter }),
    }
}

/// `Ok(None)` signals a stall, so the caller can restart under Bland's rule.
fn solve_with(lp: &LinearProgram, bland: bool, max_iter: usize) -> Result<Option<LpOutcome>, LpError> {
    let n = lp.num_vars();
    let mut t = Tableau::build(lp);

    let phase1: Vec<f64> = t
        .kinds
        .iter()
        .map(|&k| if k == Col::Artificial { 1.0 } else { 0.0 })
        .collect();
    t.set_costs(&phase1);
    if let PhaseEnd::Stalled = t.run(true, bland, max_iter) {
        return Ok(None);
    }
    let infeasibility = -t.cost[t.width];
    let bmax = t.a.iter().map(|r| r[t.width].abs()).fold(1.0, f64::max);
    if infeasibility > 1e-9 * bmax {
        let u = t.row_duals(|j| phase1[j]);
        return Ok(Some(LpOutcome::Infeasible(certificate(lp, &t, &u))));
    }

    t.drop_artificial_basics();
    let mut phase2 = vec![0.0; t.width];
    phase2[..n].copy_from_slice(lp.objective());
    t.set_costs(&phase2);
    match t.run(false, bland, max_iter) {
        PhaseEnd::Stalled => return Ok(None),
        PhaseEnd::Unbounded => return Ok(Some(LpOutcome::Unbounded)),
        PhaseEnd::Optimal => {}
    }

    let mut x = lp.lower().to_vec();
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] += t.a[r][t.width].max(0.0);
        }
    }
    for j in 0..n {
        x[j] = x[j].clamp(lp.lower()[j], lp.upper()[j]);
    }
    let u = t.row_duals(|_| 0.0);
    let mut duals = vec![0.0; lp.constraints().len()];
    for (r, &ur) in u.iter().enumerate() {
        if let Origin::Row(i) = t.origin[r] {
            duals[i] = t.sigma[r] * ur;
        }
    }
    Ok(Some(LpOutcome::Optimal(LpSolution {
        value: lp.objective_value(&x),
        x,
        duals,
    })))
}

fn certificate(lp: &LinearProgram, t: &Tableau, u: &[f64]) -> FarkasCertificate {
    let mut row_multipliers = vec![0.0; lp.constraints().len()];
    let mut upper_multipliers = vec![0.0; lp.num_vars()];
    for (r, &ur) in u.iter().enumerate() {
        let lam = t.sigma[r] * ur;
        match t.origin[r] {
            Origin::Row(i) => row_multipliers[i] = lam,
            Origin::Upper(j) => upper_multipliers[j] = lam,
        }
    }
    FarkasCertificate {
        row_multipliers,
        upper_multipliers,
    }
}
