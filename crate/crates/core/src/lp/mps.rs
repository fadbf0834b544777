use std::fmt::Write;

use super::{LinearProgram, Relation};

/// Fixed-column MPS text for cross-checking with external solvers.
///
/// Rows are named `R0, R1, …`, columns `X0, X1, …`, the objective row `COST`.
pub fn to_mps(lp: &LinearProgram, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME          {name}");
    out.push_str("ROWS\n N  COST\n");
    for (i, c) in lp.constraints().iter().enumerate() {
        let tag = match c.relation {
            Relation::Le => "L",
            Relation::Ge => "G",
            Relation::Eq => "E",
        };
        let _ = writeln!(out, " {tag}  R{i}");
    }
    out.push_str("COLUMNS\n");
    for j in 0..lp.num_vars() {
        let col = format!("X{j}");
        if lp.objective()[j] != 0.0 {
            let _ = writeln!(out, "    {col:<8}  {:<8}  {:>14}", "COST", fmt_num(lp.objective()[j]));
        }
        for (i, c) in lp.constraints().iter().enumerate() {
            if c.coeffs[j] != 0.0 {
                let _ = writeln!(out, "    {col:<8}  {:<8}  {:>14}", format!("R{i}"), fmt_num(c.coeffs[j]));
            }
        }
    }
    out.push_str("RHS\n");
    for (i, c) in lp.constraints().iter().enumerate() {
        if c.rhs != 0.0 {
            let _ = writeln!(out, "    {:<8}  {:<8}  {:>14}", "RHS", format!("R{i}"), fmt_num(c.rhs));
        }
    }
    out.push_str("BOUNDS\n");
    for j in 0..lp.num_vars() {
        let (lo, hi) = (lp.lower()[j], lp.upper()[j]);
        if lo == hi {
            let _ = writeln!(out, " FX {:<8}  X{j:<7}  {:>14}", "BND", fmt_num(lo));
            continue;
        }
        if lo != 0.0 {
            let _ = writeln!(out, " LO {:<8}  X{j:<7}  {:>14}", "BND", fmt_num(lo));
        }
        if hi.is_finite() {
            let _ = writeln!(out, " UP {:<8}  X{j:<7}  {:>14}", "BND", fmt_num(hi));
        }
    }
    out.push_str("ENDATA\n");
    out
}

fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:e}")
    }
}
