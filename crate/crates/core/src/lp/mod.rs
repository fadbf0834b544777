//! Dense linear programming.
//!
//! [`solve`] runs a two-phase tableau simplex (Dantzig pricing, Bland's rule
//! after degenerate stalls) and returns either an optimal basic solution with
//! row duals, a Farkas certificate of infeasibility, or `Unbounded`.
//! [`refine_to_extreme_point`] walks an arbitrary optimal point to a vertex of
//! the feasible region without increasing the objective.

mod extreme;
mod mps;
mod simplex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use extreme::{refine_to_extreme_point, tight_rank};
pub use mps::to_mps;

/// Default primal feasibility tolerance for reported solutions.
pub const FEAS_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("invalid LP: {0}")]
    InvalidModel(String),
    #[error("simplex stalled after {iterations} iterations")]
    Stalled { iterations: usize },
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        Constraint { coeffs, relation, rhs }
    }

    #[inline]
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Amount by which `x` violates this row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let act = self.activity(x);
        match self.relation {
            Relation::Le => (act - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - act).max(0.0),
            Relation::Eq => (act - self.rhs).abs(),
        }
    }
}

/// `minimize c·x` subject to rows and `lower ≤ x ≤ upper`.
///
/// Lower bounds must be finite (default 0); upper bounds may be `+∞` (default).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![0.0; num_vars],
            constraints: Vec::new(),
            lower: vec![0.0; num_vars],
            upper: vec![f64::INFINITY; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn set_objective(&mut self, c: Vec<f64>) -> &mut Self {
        assert_eq!(c.len(), self.num_vars, "objective width");
        self.objective = c;
        self
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars, "row width");
        self.constraints.push(Constraint::new(coeffs, relation, rhs));
        self
    }

    /// Adds a row given as `(variable, coefficient)` pairs.
    pub fn add_sparse(&mut self, terms: &[(usize, f64)], relation: Relation, rhs: f64) -> &mut Self {
        let mut coeffs = vec![0.0; self.num_vars];
        for &(j, a) in terms {
            coeffs[j] += a;
        }
        self.add_constraint(coeffs, relation, rhs)
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    pub fn set_all_bounds(&mut self, lower: f64, upper: f64) -> &mut Self {
        self.lower.iter_mut().for_each(|l| *l = lower);
        self.upper.iter_mut().for_each(|u| *u = upper);
        self
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let bad = |msg: String| Err(LpError::InvalidModel(msg));
        if self.objective.len() != self.num_vars || self.objective.iter().any(|c| !c.is_finite()) {
            return bad("objective must be finite with one entry per variable".into());
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coeffs.len() != self.num_vars {
                return bad(format!("row {i} has width {}", row.coeffs.len()));
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|a| !a.is_finite()) {
                return bad(format!("row {i} has non-finite data"));
            }
        }
        for j in 0..self.num_vars {
            if !self.lower[j].is_finite() {
                return bad(format!("variable {j} needs a finite lower bound"));
            }
            if self.upper[j].is_nan() || self.upper[j] < self.lower[j] {
                return bad(format!("variable {j} has empty bounds"));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation over rows and bounds.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.constraints.iter().map(|r| r.violation(x)).fold(0.0, f64::max);
        let bounds = (0..self.num_vars)
            .map(|j| (self.lower[j] - x[j]).max(x[j] - self.upper[j]).max(0.0))
            .fold(0.0, f64::max);
        rows.max(bounds)
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.num_vars && self.max_violation(x) <= tol
    }
}

/// A candidate point. The first `split` coordinates are supplier/edge variables
/// (`y`), the rest outlier/loop variables (`z`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalPoint {
    pub values: Vec<f64>,
    pub split: usize,
}

impl FractionalPoint {
    pub fn new(values: Vec<f64>, split: usize) -> Self {
        assert!(split <= values.len());
        FractionalPoint { values, split }
    }

    /// All variables are `y` variables.
    pub fn plain(values: Vec<f64>) -> Self {
        let split = values.len();
        FractionalPoint { values, split }
    }

    pub fn y(&self) -> &[f64] {
        &self.values[..self.split]
    }

    pub fn z(&self) -> &[f64] {
        &self.values[self.split..]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest distance of any coordinate to the nearest integer.
    pub fn max_fractionality(&self) -> f64 {
        self.values.iter().map(|v| (v - v.round()).abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Row multipliers: `≥ 0` on `Ge` rows, `≤ 0` on `Le` rows, free on `Eq` rows.
    pub duals: Vec<f64>,
}

/// Multipliers proving that no `x` within the bounds satisfies all rows.
///
/// With `g = Σ λ_i a_i + Σ μ_j e_j`, every feasible `x` obeys
/// `g·x ≥ Σ λ_i b_i + Σ μ_j u_j`, while `g ≤ 0` makes `g·x ≤ g·lower` on the
/// box, and the certificate has `g·lower < Σ λ_i b_i + Σ μ_j u_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FarkasCertificate {
    pub row_multipliers: Vec<f64>,
    /// One per variable, `≤ 0`, multiplying `x_j ≤ upper_j`.
    pub upper_multipliers: Vec<f64>,
}

impl FarkasCertificate {
    /// Independently re-checks the certificate against `lp`.
    pub fn verify(&self, lp: &LinearProgram) -> bool {
        let tol = 1e-9;
        let n = lp.num_vars();
        if self.row_multipliers.len() != lp.constraints().len() || self.upper_multipliers.len() != n {
            return false;
        }
        let mut g = vec![0.0; n];
        let mut rhs = 0.0;
        for (row, &lam) in lp.constraints().iter().zip(&self.row_multipliers) {
            let sign_ok = match row.relation {
                Relation::Ge => lam >= -tol,
                Relation::Le => lam <= tol,
                Relation::Eq => true,
            };
            if !sign_ok {
                return false;
            }
            for (gj, a) in g.iter_mut().zip(&row.coeffs) {
                *gj += lam * a;
            }
            rhs += lam * row.rhs;
        }
        for (j, &mu) in self.upper_multipliers.iter().enumerate() {
            if mu == 0.0 {
                continue;
            }
            if mu > tol || !lp.upper()[j].is_finite() {
                return false;
            }
            g[j] += mu;
            rhs += mu * lp.upper()[j];
        }
        if g.iter().any(|&v| v > tol) {
            return false;
        }
        let box_max: f64 = g.iter().zip(lp.lower()).map(|(a, l)| a * l).sum();
        box_max < rhs - tol
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible(FarkasCertificate),
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

/// Solves `lp` to optimality.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    simplex::solve(lp)
}

/// Lagrangian lower bound `λ·b + min_{lower ≤ x ≤ upper} (c − Aᵀλ)·x`.
///
/// Multipliers with the wrong sign are projected to 0, so the result is a
/// valid lower bound on the optimum for any input.
pub fn lagrangian_bound(lp: &LinearProgram, duals: &[f64]) -> f64 {
    let mut reduced = lp.objective().to_vec();
    let mut bound = 0.0;
    for (row, &lam) in lp.constraints().iter().zip(duals) {
        let lam = match row.relation {
            Relation::Ge => lam.max(0.0),
            Relation::Le => lam.min(0.0),
            Relation::Eq => lam,
        };
        bound += lam * row.rhs;
        for (r, a) in reduced.iter_mut().zip(&row.coeffs) {
            *r -= lam * a;
        }
    }
    for (j, &r) in reduced.iter().enumerate() {
        bound += if r >= -1e-12 {
            r * lp.lower()[j]
        } else if lp.upper()[j].is_finite() {
            r * lp.upper()[j]
        } else {
            return f64::NEG_INFINITY;
        };
    }
    bound
}
