//! Moving an optimal point to a vertex.
//!
//! While the tight rows at `x` do not span ℝⁿ, pick a direction `d` in their
//! null space, orient it so that `c·d ≤ 0`, and step until another row or
//! bound becomes tight. Every step raises the tight rank by at least one.

use super::{FractionalPoint, LinearProgram, LpError, Relation, FEAS_TOL};

const TIGHT_TOL: f64 = 1e-9;
const RANK_TOL: f64 = 1e-9;

fn tight_rows(lp: &LinearProgram, x: &[f64], tol: f64) -> Vec<Vec<f64>> {
    let n = lp.num_vars();
    let mut rows = Vec::new();
    for c in lp.constraints() {
        let slack = c.activity(x) - c.rhs;
        if slack.abs() <= tol * (1.0 + c.rhs.abs()) {
            rows.push(c.coeffs.clone());
        }
    }
    for j in 0..n {
        let at_lower = (x[j] - lp.lower()[j]).abs() <= tol * (1.0 + lp.lower()[j].abs());
        let at_upper = lp.upper()[j].is_finite() && (x[j] - lp.upper()[j]).abs() <= tol * (1.0 + lp.upper()[j].abs());
        if at_lower || at_upper {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            rows.push(e);
        }
    }
    rows
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(m: &mut [Vec<f64>], n: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == m.len() {
            break;
        }
        let (best, val) = (row..m.len())
            .map(|r| (r, m[r][col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if val <= RANK_TOL {
            continue;
        }
        m.swap(row, best);
        let p = m[row][col];
        m[row].iter_mut().for_each(|v| *v /= p);
        let pr = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r != row && other[col] != 0.0 {
                let f = other[col];
                for (v, pv) in other.iter_mut().zip(&pr) {
                    *v -= f * pv;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Rank of the rows (and bounds) tight at `x`.
pub fn tight_rank(lp: &LinearProgram, x: &[f64], tol: f64) -> usize {
    let mut rows = tight_rows(lp, x, tol);
    rref(&mut rows, lp.num_vars()).len()
}

/// Largest step along `d` that keeps every currently slack row and bound satisfied.
fn max_step(lp: &LinearProgram, x: &[f64], d: &[f64]) -> f64 {
    let mut t = f64::INFINITY;
    for c in lp.constraints() {
        let g = c.activity(d);
        let s = c.activity(x) - c.rhs;
        match c.relation {
            Relation::Ge if g < -1e-12 => t = t.min((s.max(0.0)) / -g),
            Relation::Le if g > 1e-12 => t = t.min((-s).max(0.0) / g),
            _ => {}
        }
    }
    for j in 0..lp.num_vars() {
        if d[j] < -1e-12 {
            t = t.min((x[j] - lp.lower()[j]).max(0.0) / -d[j]);
        } else if d[j] > 1e-12 && lp.upper()[j].is_finite() {
            t = t.min((lp.upper()[j] - x[j]).max(0.0) / d[j]);
        }
    }
    t
}

fn walk(lp: &LinearProgram, start: &[f64], round: usize) -> Option<Vec<f64>> {
    let n = lp.num_vars();
    let c = lp.objective();
    let mut x = start.to_vec();
    for _ in 0..=n {
        let mut rows = tight_rows(lp, &x, TIGHT_TOL);
        let pivots = rref(&mut rows, n);
        if pivots.len() == n {
            return Some(x);
        }
        let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
        let f = free[round % free.len()];
        let mut d = vec![0.0; n];
        d[f] = 1.0;
        for (r, &pc) in pivots.iter().enumerate() {
            d[pc] = -rows[r][f];
        }
        let mut cd: f64 = c.iter().zip(&d).map(|(a, b)| a * b).sum();
        if cd > 1e-12 {
            d.iter_mut().for_each(|v| *v = -*v);
            cd = -cd;
        }
        let mut t = max_step(lp, &x, &d);
        if !t.is_finite() {
            if cd < -1e-12 {
                return None;
            }
            d.iter_mut().for_each(|v| *v = -*v);
            t = max_step(lp, &x, &d);
            if !t.is_finite() {
                return None;
            }
        }
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += t * di;
        }
        for j in 0..n {
            x[j] = x[j].clamp(lp.lower()[j], lp.upper()[j]);
            if (x[j] - lp.lower()[j]).abs() < 1e-12 {
                x[j] = lp.lower()[j];
            }
        }
    }
    (tight_rank(lp, &x, TIGHT_TOL) == n).then_some(x)
}

/// Returns a vertex of the feasible region whose objective is at most that of `p`.
///
/// The walk is deterministic. When a round ends without a full-rank tight
/// set, it is retried with the next free column as the null-space seed, up to
/// `n` rounds.
pub fn refine_to_extreme_point(lp: &LinearProgram, p: &FractionalPoint) -> Result<FractionalPoint, LpError> {
    lp.validate()?;
    let n = lp.num_vars();
    if p.len() != n {
        return Err(LpError::InvalidModel(format!("point has {} coordinates, LP has {n}", p.len())));
    }
    if !lp.is_feasible(&p.values, FEAS_TOL) {
        return Err(LpError::InvalidModel("refinement needs a feasible point".into()));
    }
    let start_value = lp.objective_value(&p.values);
    for round in 0..n.max(1) {
        if let Some(x) = walk(lp, &p.values, round) {
            let ok = lp.is_feasible(&x, FEAS_TOL) && lp.objective_value(&x) <= start_value + FEAS_TOL;
            if ok {
                return Ok(FractionalPoint::new(x, p.split));
            }
        }
    }
    Err(LpError::Degenerate("no vertex reached from the given point".into()))
}
