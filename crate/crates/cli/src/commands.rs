use std::fmt::Write as _;
use std::path::Path;

use dinkelbach::problems::BUILTIN_NAMES;
use dinkelbach::{
    compute_chi, detect_period, estimate_order, estimate_order_lower, load_problem_file,
    reproduce as reproduce_table, solve, trace_csv, trace_markdown, Error, OrderReport,
    PrecisionContext, Problem, ProblemSpec, Result, SolveTrace, SolverConfig, Start, Status,
    TableId,
};

use crate::{Format, RunArgs};

pub const EXIT_CONVERGED: u8 = 0;
pub const EXIT_MAX_ITERS: u8 = 2;
pub const EXIT_STAGNATED: u8 = 3;
pub const EXIT_MISMATCH: u8 = 4;

fn context(digits: u32) -> Result<PrecisionContext> {
    if digits == 0 {
        Ok(PrecisionContext::native())
    } else {
        PrecisionContext::with_digits(digits)
    }
}

fn load(reference: &str, ctx: PrecisionContext) -> Result<Problem> {
    let spec = if BUILTIN_NAMES.contains(&reference) {
        ProblemSpec::builtin(reference)?
    } else if Path::new(reference).exists() {
        load_problem_file(reference)?
    } else {
        return Err(Error::InvalidProblem(format!(
            "{reference:?} is neither a builtin ({}) nor an existing file",
            BUILTIN_NAMES.join(", ")
        )));
    };
    spec.instantiate(ctx)
}

fn start(args: &RunArgs, ctx: PrecisionContext) -> Result<Start> {
    let parse = |flag: &str, v: &Option<String>| -> Result<Option<_>> {
        v.as_deref()
            .map(|s| {
                ctx.parse(s)
                    .map_err(|e| Error::InvalidConfig(format!("--{flag}: {e}")))
            })
            .transpose()
    };
    let alpha_init = parse("alpha-init", &args.alpha_init)?;
    let gamma0 = parse("gamma0", &args.gamma0)?;
    let alpha0 = parse("alpha0", &args.alpha0)?;
    let method = args.method;
    if method.is_interval() {
        if alpha_init.is_some() {
            return Err(Error::InvalidConfig(format!(
                "{method} starts from --gamma0 and --alpha0, not --alpha-init"
            )));
        }
        match (gamma0, alpha0) {
            (Some(gamma), Some(alpha)) => Ok(Start::Bracket { gamma, alpha }),
            _ => Err(Error::InvalidConfig(format!(
                "{method} needs both --gamma0 and --alpha0"
            ))),
        }
    } else {
        if gamma0.is_some() || alpha0.is_some() {
            return Err(Error::InvalidConfig(format!(
                "{method} starts from --alpha-init, not a bracket"
            )));
        }
        alpha_init
            .map(Start::Point)
            .ok_or_else(|| Error::InvalidConfig(format!("{method} needs --alpha-init")))
    }
}

fn execute(args: &RunArgs) -> Result<(Problem, SolveTrace)> {
    let ctx = context(args.digits)?;
    let problem = load(&args.problem, ctx)?;
    let mut config = SolverConfig::new(ctx).with_max_iters(args.max_iters);
    if let Some(rho) = &args.rho {
        config = config.with_rho(ctx.parse(rho)?);
    }
    if let Some(eps) = &args.eps {
        config = config.with_epsilon(ctx.parse(eps)?);
    }
    config.validate()?;
    let start = start(args, ctx)?;
    let trace = solve(&problem, args.method, &start, &config)?;
    Ok((problem, trace))
}

fn exit_code(trace: &SolveTrace) -> u8 {
    match trace.status {
        Status::Converged => EXIT_CONVERGED,
        Status::MaxItersReached => EXIT_MAX_ITERS,
        Status::Stagnated if trace.is_success() => EXIT_CONVERGED,
        Status::Stagnated => EXIT_STAGNATED,
    }
}

fn summary(trace: &SolveTrace) -> String {
    format!(
        "{} via {}: final alpha {} with g = {}, {} oracle calls",
        trace.status,
        trace.method,
        trace
            .final_alpha
            .to_scientific(trace.final_alpha.ctx().significant_digits().min(20)),
        trace.final_g.to_scientific(3),
        trace.oracle_calls
    )
}

pub fn run(args: &RunArgs, format: Format) -> Result<u8> {
    let (_, trace) = execute(args)?;
    match format {
        Format::Csv => {
            print!("{}", trace_csv(&trace));
            eprintln!("{}", summary(&trace));
        }
        Format::Markdown => print!("{}", trace_markdown(&trace)),
    }
    Ok(exit_code(&trace))
}

/// One diagnostic quantity: a value, or the reason it is unavailable.
type Section = std::result::Result<Vec<(&'static str, String)>, String>;

fn order_section(report: Result<OrderReport>) -> Section {
    let list = |v: &[dinkelbach::Real]| {
        v.iter()
            .map(|q| q.to_scientific(4))
            .collect::<Vec<_>>()
            .join(" ")
    };
    report
        .map(|o| {
            vec![
                ("usable", o.usable.to_string()),
                ("estimates", list(&o.estimates)),
                ("exponent_ratios", list(&o.exponent_ratios)),
                ("tail_order", o.window_average.to_scientific(4)),
            ]
        })
        .map_err(|e| format!("unavailable ({e})"))
}

fn sections(problem: &Problem, trace: &SolveTrace, window: usize) -> Vec<(&'static str, Section)> {
    let mut out = Vec::new();
    if trace.method.is_interval() {
        out.push(("order (upper)", order_section(estimate_order(trace))));
        out.push(("order (lower)", order_section(estimate_order_lower(trace))));
    } else {
        out.push(("order", order_section(estimate_order(trace))));
    }
    let period = detect_period(trace, window)
        .map(|p| {
            vec![
                (
                    "detected_period",
                    p.detected_period.map_or("none".into(), |q| q.to_string()),
                ),
                ("window", p.window.to_string()),
                ("signs", p.pattern_string()),
            ]
        })
        .map_err(|e| format!("unavailable ({e})"));
    out.push(("period", period));
    let chi = if problem.as_direct().is_none() {
        Err("unsupported (nonsmooth g)".to_string())
    } else {
        compute_chi(problem, &trace.final_alpha)
            .map(|c| {
                vec![
                    ("alpha_star", c.alpha_star.to_scientific(20)),
                    ("chi", c.chi.to_scientific(6)),
                    ("predicted", c.predicted_behavior.to_string()),
                ]
            })
            .map_err(|e| format!("unavailable ({e})"))
    };
    out.push(("chi", chi));
    out
}

pub fn diagnose(args: &RunArgs, format: Format, window: usize) -> Result<u8> {
    let (problem, trace) = execute(args)?;
    let mut out = String::new();
    match format {
        Format::Markdown => {
            let _ = writeln!(out, "# {} via {}\n", problem.name(), trace.method);
            for (title, section) in sections(&problem, &trace, window) {
                let _ = writeln!(out, "## {title}\n");
                match section {
                    Ok(rows) => {
                        for (key, value) in rows {
                            let _ = writeln!(out, "- {key}: {value}");
                        }
                    }
                    Err(reason) => {
                        let _ = writeln!(out, "{reason}");
                    }
                }
                out.push('\n');
            }
            let _ = writeln!(out, "{}", summary(&trace));
        }
        Format::Csv => {
            out.push_str("section,key,value\n");
            for (title, section) in sections(&problem, &trace, window) {
                match section {
                    Ok(rows) => {
                        for (key, value) in rows {
                            let _ = writeln!(out, "{title},{key},{value}");
                        }
                    }
                    Err(reason) => {
                        let _ = writeln!(out, "{title},status,{reason}");
                    }
                }
            }
            eprintln!("{}", summary(&trace));
        }
    }
    print!("{out}");
    Ok(exit_code(&trace))
}

pub fn reproduce(table: &str, format: Format) -> Result<u8> {
    let tables = if table == "all" {
        TableId::ALL.to_vec()
    } else {
        vec![table.parse()?]
    };
    let mut all_passed = true;
    for (i, id) in tables.into_iter().enumerate() {
        let report = reproduce_table(id)?;
        all_passed &= report.passed();
        match format {
            Format::Markdown => {
                if i > 0 {
                    println!();
                }
                print!("{}", report.markdown());
            }
            Format::Csv => {
                if i == 0 {
                    println!("table,column,k,expected,produced,matched");
                }
                for c in &report.cells {
                    println!(
                        "{id},{},{},{},{},{}",
                        c.column,
                        c.k,
                        c.expected.unwrap_or("-"),
                        c.produced.as_deref().unwrap_or("-"),
                        c.matched
                    );
                }
            }
        }
    }
    Ok(if all_passed {
        EXIT_CONVERGED
    } else {
        EXIT_MISMATCH
    })
}
