//! CPLEX-style LP text output, for cross-checking with external solvers.

use std::fmt::Write;

use super::{LinearProgram, Sense};

fn fmt_num(v: f64) -> String {
    format!("{v:.17e}")
}

fn linear(names: &[String], coeffs: &[f64]) -> String {
    let mut s = String::new();
    for (j, &a) in coeffs.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let sign = if a < 0.0 { "-" } else { "+" };
        let _ = write!(s, " {sign} {} {}", fmt_num(a.abs()), names[j]);
    }
    if s.is_empty() {
        s.push_str(" 0 ");
        s.push_str(names.first().map(String::as_str).unwrap_or("x0"));
    }
    s
}

/// Renders the program in LP format. The objective constant, which not
/// every reader accepts, is written as a comment.
pub fn to_lp_format(lp: &LinearProgram) -> String {
    let mut out = String::new();
    // `\` starts a comment line in LP format
    let _ = writeln!(out, "\\ objective constant: {}", fmt_num(lp.objective_constant));
    let _ = writeln!(out, "Minimize\n obj:{}", linear(&lp.names, &lp.objective));
    let _ = writeln!(out, "Subject To");
    for (i, c) in lp.constraints.iter().enumerate() {
        let op = match c.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " c{i}:{} {op} {}", linear(&lp.names, &c.coeffs), fmt_num(c.rhs));
    }
    let _ = writeln!(out, "Bounds");
    for j in 0..lp.num_vars {
        let (lo, hi) = (lp.lower[j], lp.upper[j]);
        let name = &lp.names[j];
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => writeln!(out, " {} <= {name} <= {}", fmt_num(lo), fmt_num(hi)),
            (true, false) => writeln!(out, " {name} >= {}", fmt_num(lo)),
            (false, true) => writeln!(out, " -inf <= {name} <= {}", fmt_num(hi)),
            (false, false) => writeln!(out, " {name} free"),
        }
        .ok();
    }
    out.push_str("End\n");
    out
}
