//! Dinkelbach-type solvers for fractional programs
//! `min f1(x) / f2(x)` with `f2 > 0`.
//!
//! The optimal ratio is the unique root of the convex, increasing parametric
//! function `g(α) = max_x { -f1(x) + α f2(x) }`. Four root finders on `g` are
//! provided: the classical tangent iteration, the interval method with a
//! secant lower bound, its accelerated variant, and the accelerated method
//! with screened two-point steps. All arithmetic runs either in native `f64`
//! or at a chosen number of decimal digits.
//!
//! ```
//! use dinkelbach::{accelerated_dinkelbach, builtin, PrecisionContext, Problem, SolverConfig};
//!
//! let ctx = PrecisionContext::with_digits(50)?;
//! let problem = Problem::Direct(builtin("cubic", ctx)?);
//! let trace = accelerated_dinkelbach(&problem, &ctx.int(10), &SolverConfig::new(ctx))?;
//! assert!(trace.is_success());
//! assert!(trace.final_alpha.abs() < ctx.pow10_neg(30));
//! # Ok::<(), dinkelbach::Error>(())
//! ```

pub mod diagnostics;
pub mod error;
pub mod format;
pub mod oracle;
pub mod problems;
pub mod scalar;
pub mod solvers;
pub mod tables;

pub use diagnostics::{
    compute_chi, detect_period, estimate_order, estimate_order_lower, estimate_order_values,
    reference_root, ChiClass, ChiReport, OrderReport, PeriodReport,
};
pub use error::{Error, Result};
pub use format::{trace_csv, trace_markdown};
pub use oracle::{
    divided_difference, finite_min_ratio, sanity_check_direct_g, DirectGProblem, FiniteSetProblem,
    MemoOracle, OracleEvaluation, Problem, SanityReport, SmoothFunction,
};
pub use problems::{
    builtin, load_problem, load_problem_file, ProblemError, ProblemErrorCode, ProblemSpec,
};
pub use scalar::{real_from_decimal, PrecisionContext, Real};
pub use solvers::{
    accel_step, accelerated_dinkelbach, accelerated_interval_dinkelbach,
    accelerated_interval_upper_step, check_invariants, classical_dinkelbach, interval_dinkelbach,
    min_tangent_recovery, screening_condition, secant_lower_step, solve, tangent_step, Branch,
    IntervalState, Method, Side, SolveTrace, SolverConfig, Start, Status, TraceRecord,
};
pub use tables::{reproduce, ReproduceReport, TableId};
