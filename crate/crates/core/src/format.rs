//! Text renderings of solve traces.

use std::fmt::Write as _;

use crate::solvers::{SolveTrace, TraceRecord};

pub const CSV_HEADER: &str = "k,alpha,g,f2,branch,side";

/// Significant digits used in Markdown tables.
pub const TABLE_DIGITS: usize = 3;

fn digits_of(trace: &SolveTrace) -> usize {
    trace
        .records
        .first()
        .map_or(17, |r| r.alpha.ctx().significant_digits())
}

fn csv_row(out: &mut String, r: &TraceRecord, digits: usize) {
    let _ = writeln!(
        out,
        "{},{},{},{},{},{}",
        r.k,
        r.alpha.to_scientific(digits),
        r.g.to_scientific(digits),
        r.f2.to_scientific(digits),
        r.branch,
        r.side
    );
}

/// One row per record with every number at full working precision. Interval
/// methods emit the lower row before the upper row for each `k`.
pub fn trace_csv(trace: &SolveTrace) -> String {
    let digits = digits_of(trace);
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    if trace.lower.is_empty() {
        for r in &trace.records {
            csv_row(&mut out, r, digits);
        }
    } else {
        for (lo, hi) in trace.lower.iter().zip(&trace.records) {
            csv_row(&mut out, lo, digits);
            csv_row(&mut out, hi, digits);
        }
    }
    out
}

/// A Markdown table of `g` values at three significant digits, followed by
/// a one-line summary.
pub fn trace_markdown(trace: &SolveTrace) -> String {
    let cell = |r: &TraceRecord| r.g.to_scientific(TABLE_DIGITS);
    let mut out = String::new();
    if trace.lower.is_empty() {
        out.push_str("| k | g(alpha_k) |\n|---:|---:|\n");
        for r in &trace.records {
            let _ = writeln!(out, "| {} | {} |", r.k, cell(r));
        }
    } else {
        out.push_str("| k | g(gamma_k) | g(alpha_k) |\n|---:|---:|---:|\n");
        for (lo, hi) in trace.lower.iter().zip(&trace.records) {
            let _ = writeln!(out, "| {} | {} | {} |", hi.k, cell(lo), cell(hi));
        }
    }
    let _ = writeln!(
        out,
        "\n{} via {}: final alpha {} with g = {}, {} oracle calls",
        trace.status,
        trace.method,
        trace.final_alpha.to_scientific(digits_of(trace).min(20)),
        trace.final_g.to_scientific(TABLE_DIGITS),
        trace.oracle_calls
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{FiniteSetProblem, Problem};
    use crate::scalar::PrecisionContext;
    use crate::solvers::{accelerated_interval_dinkelbach, classical_dinkelbach, SolverConfig};

    fn finite() -> (Problem, PrecisionContext) {
        let ctx = PrecisionContext::native();
        let p = FiniteSetProblem::from_f64(ctx, &[(2.0, 1.0), (3.0, 2.0), (5.0, 4.0)]).unwrap();
        (Problem::Finite(p), ctx)
    }

    #[test]
    fn csv_layout() {
        let (p, ctx) = finite();
        let t = classical_dinkelbach(&p, &ctx.int(2), &SolverConfig::new(ctx)).unwrap();
        let csv = trace_csv(&t);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(
            lines[1],
            "-1,2.0000000000000000e0,3.0000000000000000e0,4.0000000000000000e0,init,+"
        );
        assert_eq!(lines.len(), t.records.len() + 1);
        assert!(lines.last().unwrap().ends_with(",plain_tangent,0"));
    }

    #[test]
    fn csv_interleaves_interval_rows() {
        let (p, ctx) = finite();
        let t =
            accelerated_interval_dinkelbach(&p, &ctx.zero(), &ctx.int(2), &SolverConfig::new(ctx))
                .unwrap();
        let csv = trace_csv(&t);
        let branches: Vec<&str> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(4).unwrap())
            .collect();
        assert_eq!(
            &branches[..4],
            ["init", "init", "secant_lower", "interval_upper"]
        );
    }

    #[test]
    fn markdown_uses_three_digits() {
        let (p, ctx) = finite();
        let t = classical_dinkelbach(&p, &ctx.int(2), &SolverConfig::new(ctx)).unwrap();
        let md = trace_markdown(&t);
        assert!(md.starts_with("| k | g(alpha_k) |"));
        assert!(md.contains("| -1 | 3.00e0 |"));
        assert!(md.contains("converged via classical"));
    }
}
