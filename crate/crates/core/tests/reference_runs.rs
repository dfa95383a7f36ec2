//! High-precision runs on the builtin problems against published values.

use dinkelbach::tables::{expected_columns, reproduce, TableId};
use dinkelbach::{
    accelerated_dinkelbach, accelerated_interval_dinkelbach, builtin, check_invariants,
    classical_dinkelbach, interval_dinkelbach, PrecisionContext, Problem, Real, Side, SolveTrace,
    SolverConfig, Status,
};

fn setup(name: &str, digits: u32) -> (Problem, SolverConfig, PrecisionContext) {
    let ctx = PrecisionContext::with_digits(digits).unwrap();
    let config = SolverConfig::new(ctx).with_epsilon(ctx.parse("1e-160").unwrap());
    (Problem::Direct(builtin(name, ctx).unwrap()), config, ctx)
}

fn printed(values: &[Real]) -> Vec<String> {
    values.iter().map(|g| g.to_scientific(3)).collect()
}

fn lower_g(t: &SolveTrace) -> Vec<String> {
    t.lower.iter().map(|r| r.g.to_scientific(3)).collect()
}

#[test]
fn accelerated_interval_matches_published_columns() {
    let (p, config, ctx) = setup("exp_affine_9", 200);
    let t = accelerated_interval_dinkelbach(&p, &ctx.int(-2), &ctx.int(10), &config).unwrap();
    assert_eq!(t.status, Status::Converged);
    assert_eq!(
        lower_g(&t),
        [
            "-1.86e1",
            "-1.30e1",
            "-5.50e-2",
            "-8.05e-9",
            "-2.54e-29",
            "-7.92e-91"
        ]
    );
    assert_eq!(
        printed(&t.g_values()),
        [
            "1.89e2",
            "7.39e-1",
            "2.10e-5",
            "4.52e-19",
            "4.48e-60",
            "4.38e-183"
        ]
    );
    assert!(check_invariants(&t).is_empty());
    // one evaluation per distinct point: no extra subproblems per round
    assert_eq!(t.oracle_calls, t.distinct_alphas());
    assert_eq!(t.oracle_calls, 2 * t.records.len());
}

#[test]
fn original_interval_matches_published_columns() {
    let (p, config, ctx) = setup("exp_affine_9", 200);
    let t = interval_dinkelbach(&p, &ctx.int(-2), &ctx.int(10), &config).unwrap();
    assert_eq!(t.status, Status::Converged);
    assert_eq!(t.records.len(), 11);
    let lower = lower_g(&t);
    let upper = printed(&t.g_values());
    assert_eq!(
        (lower[7].as_str(), upper[7].as_str()),
        ("-1.77e-20", "9.42e-20")
    );
    assert_eq!(
        (lower[10].as_str(), upper[10].as_str()),
        ("-9.31e-169", "4.97e-168")
    );
    assert!(check_invariants(&t).is_empty());
}

#[test]
fn classical_matches_original_upper_column() {
    let (p, config, ctx) = setup("exp_affine_9", 200);
    let t = classical_dinkelbach(&p, &ctx.int(10), &config).unwrap();
    assert_eq!(
        printed(&t.g_values())[..7],
        ["1.89e2", "7.39e1", "2.72e1", "6.32e0", "3.21e-1", "7.26e-4", "3.68e-9"]
    );
    assert!(check_invariants(&t).is_empty());
}

#[test]
fn accelerated_small_rho_trace() {
    let (p, config, ctx) = setup("exp_affine_9", 400);
    let t = accelerated_dinkelbach(&p, &ctx.int(11), &config).unwrap();
    assert_eq!(t.status, Status::Converged);
    assert_eq!(
        printed(&t.g_values()),
        [
            "2.91e2",
            "1.13e2",
            "1.61e1",
            "-1.17e0",
            "9.22e-3",
            "1.43e-8",
            "-2.74e-22",
            "5.25e-46",
            "1.09e-116",
            "-9.08e-282"
        ]
    );
    let negatives: Vec<i64> = t
        .records
        .iter()
        .filter(|r| r.side == Side::Negative)
        .map(|r| r.k)
        .collect();
    assert_eq!(negatives, [2, 5, 8]);
    assert!(check_invariants(&t).is_empty());
}

#[test]
fn rho_one_point_one_gives_the_same_trace() {
    let (p, config, ctx) = setup("exp_affine_9", 400);
    let a = accelerated_dinkelbach(&p, &ctx.int(11), &config).unwrap();
    let b = accelerated_dinkelbach(
        &p,
        &ctx.int(11),
        &config.clone().with_rho(ctx.parse("1.1").unwrap()),
    )
    .unwrap();
    assert_eq!(printed(&a.g_values()), printed(&b.g_values()));
}

#[test]
fn small_rho_trace_at_200_digits_ends_on_exact_zero() {
    // the last iterate's g is below the 200-digit resolution of the point
    let (p, config, ctx) = setup("exp_affine_9", 200);
    let t = accelerated_dinkelbach(&p, &ctx.int(11), &config).unwrap();
    assert_eq!(t.status, Status::Converged);
    assert!(t.final_g.is_zero());
    assert_eq!(t.records.len(), 10);
}

#[test]
fn cubic_accelerated_and_classical() {
    let (p, config, ctx) = setup("cubic", 200);
    let t = accelerated_dinkelbach(&p, &ctx.int(10), &config).unwrap();
    assert_eq!(
        printed(&t.g_values()),
        [
            "1.11e3",
            "3.29e2",
            "5.75e1",
            "1.12e1",
            "2.12e0",
            "3.60e-1",
            "2.56e-2",
            "3.93e-5",
            "9.36e-13",
            "1.35e-33",
            "1.60e-90",
            "4.69e-246"
        ]
    );
    assert_eq!(t.records.last().unwrap().k, 10);
    let c = classical_dinkelbach(&p, &ctx.int(10), &config).unwrap();
    assert_eq!(c.records.len(), 16);
    assert_eq!(c.records.last().unwrap().k, 14);
    assert_eq!(c.final_g.to_scientific(3), "1.35e-210");
}

#[test]
fn arctan_log_leading_rows() {
    let (p, config, ctx) = setup("arctan_log", 200);
    let from5 = accelerated_dinkelbach(&p, &ctx.int(5), &config).unwrap();
    let from7 = accelerated_dinkelbach(&p, &ctx.int(7), &config).unwrap();
    assert_eq!(
        printed(&from5.g_values())[..5],
        ["1.52e1", "1.08e0", "6.70e-2", "7.62e-5", "6.11e-12"]
    );
    assert_eq!(
        printed(&from7.g_values())[..5],
        ["2.20e1", "1.30e0", "9.45e-2", "1.80e-4", "4.82e-11"]
    );
    assert_eq!(from7.records[2].branch, dinkelbach::Branch::Accel);
}

#[test]
fn reproduce_tables_two_and_five() {
    for table in [TableId::Table2, TableId::Table5] {
        let report = reproduce(table).unwrap();
        assert!(report.passed(), "{report}");
    }
}

#[test]
fn reproduce_reports_every_printed_cell() {
    for table in TableId::ALL {
        let report = reproduce(table).unwrap();
        let printed: usize = expected_columns(table).iter().map(|c| c.cells.len()).sum();
        assert_eq!(report.cells.len(), printed, "{table}");
    }
}

#[test]
fn reproduce_table3_small_rho_columns() {
    let report = reproduce(TableId::Table3).unwrap();
    for cell in report
        .cells
        .iter()
        .filter(|c| c.column == "rho = 1.00001" || c.column == "rho = 1.1")
    {
        assert!(cell.matched, "{cell:?}");
    }
}

#[test]
fn reproduce_table4_rows_through_k3() {
    let report = reproduce(TableId::Table4).unwrap();
    for cell in report.cells.iter().filter(|c| c.k <= 3) {
        assert!(cell.matched, "{cell:?}");
    }
}

#[test]
fn reproduce_markdown_marks_mismatches() {
    let report = reproduce(TableId::Table2).unwrap();
    let md = report.markdown();
    assert!(
        md.contains("| 5 | -7.92e-91 | 4.38e-183 | -1.36e-4 | 7.26e-4 |"),
        "{md}"
    );
    assert!(md.contains("PASS: 44 of 44 cells match"));
}
