//! Benchmark fixtures shared by the criterion targets.

use dinkelbach::{builtin, FiniteSetProblem, PrecisionContext, Problem};

/// A builtin problem at `digits` working digits (0 for native).
pub fn builtin_problem(name: &str, digits: u32) -> (Problem, PrecisionContext) {
    let ctx = if digits == 0 {
        PrecisionContext::native()
    } else {
        PrecisionContext::with_digits(digits).expect("valid digit count")
    };
    (
        Problem::Direct(builtin(name, ctx).expect("known builtin")),
        ctx,
    )
}

/// A finite instance from `(f1, f2)` pairs.
pub fn finite_problem(items: &[(f64, f64)]) -> Problem {
    Problem::Finite(
        FiniteSetProblem::from_f64(PrecisionContext::native(), items).expect("positive f2"),
    )
}
