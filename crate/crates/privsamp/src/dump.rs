//! Plain-text dumps of the two programs for cross-checking with external solvers.
//!
//! ```text
//! privsamp-program 1
//! kind lp | qp
//! vars <n>
//! rows <r>
//! hessian-diagonal <h>        (qp only: objective 1/2 h x'x + c'x)
//! linear
//! <c_1> ... <c_n>
//! equalities                  (one row per line: coefficients, then `=`, then rhs)
//! <a_11> ... <a_1n> = <b_1>
//! bounds                      (one variable per line)
//! <lo_1> <hi_1>
//! end
//! ```
//!
//! Numbers are printed in shortest round-trip form.

use std::fmt::Write;

use privsamp_core::kkt::BoxEqualityProgram;
use privsamp_core::lp::LambdaLp;
use privsamp_core::qp::ProximalQp;

fn body<P: BoxEqualityProgram>(out: &mut String, problem: &P, linear: &[f64]) {
    let a = problem.eq_matrix();
    out.push_str("linear\n");
    push_row(out, linear);
    out.push_str("equalities\n");
    for r in 0..a.rows() {
        push_row_no_newline(out, a.row(r));
        let _ = writeln!(out, " = {}", problem.eq_rhs()[r]);
    }
    out.push_str("bounds\n");
    for (lo, hi) in problem.lower().iter().zip(problem.upper()) {
        let _ = writeln!(out, "{lo} {hi}");
    }
    out.push_str("end\n");
}

fn push_row_no_newline(out: &mut String, row: &[f64]) {
    for (i, v) in row.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{v}");
    }
}

fn push_row(out: &mut String, row: &[f64]) {
    push_row_no_newline(out, row);
    out.push('\n');
}

fn header(kind: &str, vars: usize, rows: usize) -> String {
    format!("privsamp-program 1\nkind {kind}\nvars {vars}\nrows {rows}\n")
}

pub fn dump_lp(lp: &LambdaLp) -> String {
    let mut out = header("lp", lp.num_vars(), lp.eq_matrix().rows());
    body(&mut out, lp, lp.objective_vector());
    out
}

/// The objective `h'h - 2 u'h` is written as `1/2 (2) h'h + (-2u)'h`.
pub fn dump_qp(qp: &ProximalQp) -> String {
    let mut out = header("qp", qp.num_vars(), qp.eq_matrix().rows());
    out.push_str("hessian-diagonal 2\n");
    let linear: Vec<f64> = qp.target().iter().map(|u| -2.0 * u).collect();
    body(&mut out, qp, &linear);
    out
}
