//! Step primitives and the four iterative methods.
//!
//! Every solve returns a [`SolveTrace`] that records each evaluated point, the
//! rule that produced it and the sign of `g` there, so that runs can be
//! audited and replayed.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::oracle::{MemoOracle, OracleEvaluation, Problem};
use crate::scalar::{PrecisionContext, Real};

pub const DEFAULT_RHO: &str = "1.00001";
pub const DEFAULT_MAX_ITERS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Classical,
    Interval,
    AccelInterval,
    Accel,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Classical,
        Method::Interval,
        Method::AccelInterval,
        Method::Accel,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Classical => "classical",
            Method::Interval => "interval",
            Method::AccelInterval => "accel_interval",
            Method::Accel => "accel",
        }
    }

    /// Interval methods start from a bracket `[γ0, α0]`, the others from a
    /// single point.
    pub fn is_interval(&self) -> bool {
        matches!(self, Method::Interval | Method::AccelInterval)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown method {s:?}; expected classical, interval, accel_interval or accel"
                ))
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub rho: Real,
    pub epsilon: Real,
    pub max_iters: usize,
    pub ctx: PrecisionContext,
}

impl SolverConfig {
    /// Defaults: `ρ = 1.00001`, the context's default `ε`, 100 iterations.
    pub fn new(ctx: PrecisionContext) -> Self {
        SolverConfig {
            rho: ctx.parse(DEFAULT_RHO).expect("default rho is well formed"),
            epsilon: ctx.default_epsilon(),
            max_iters: DEFAULT_MAX_ITERS,
            ctx,
        }
    }

    pub fn with_rho(mut self, rho: Real) -> Self {
        self.rho = rho;
        self
    }

    pub fn with_epsilon(mut self, epsilon: Real) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.rho.partial_cmp(&self.ctx.one()) != Some(Ordering::Greater) {
            return Err(Error::InvalidConfig(format!(
                "rho must exceed 1, got {}",
                self.rho
            )));
        }
        if self.epsilon.is_negative() || !self.epsilon.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be finite and non-negative, got {}",
                self.epsilon
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// The rule that produced a record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Init,
    PlainTangent,
    Accel,
    MinTangent,
    SecantLower,
    IntervalUpper,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Init => "init",
            Branch::PlainTangent => "plain_tangent",
            Branch::Accel => "accel",
            Branch::MinTangent => "min_tangent",
            Branch::SecantLower => "secant_lower",
            Branch::IntervalUpper => "interval_upper",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sign of `g`: which side of the root a point lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Negative,
    Zero,
    Positive,
}

impl Side {
    pub fn of(g: &Real) -> Side {
        if g.is_negative() {
            Side::Negative
        } else if g.is_positive() {
            Side::Positive
        } else {
            Side::Zero
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Side::Negative => "-",
            Side::Zero => "0",
            Side::Positive => "+",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub k: i64,
    pub alpha: Real,
    pub g: Real,
    pub f2: Real,
    pub branch: Branch,
    pub side: Side,
    /// Set when the accelerated step broke down numerically and a plain
    /// tangent step was taken instead.
    pub flagged: bool,
}

impl TraceRecord {
    fn new(k: i64, e: &OracleEvaluation, branch: Branch) -> Self {
        TraceRecord {
            k,
            alpha: e.alpha.clone(),
            g: e.g.clone(),
            f2: e.f2.clone(),
            branch,
            side: Side::of(&e.g),
            flagged: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Converged,
    MaxItersReached,
    Stagnated,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxItersReached => "max_iters_reached",
            Status::Stagnated => "stagnated",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Full transcript of a solve.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveTrace {
    pub method: Method,
    /// Main records; the upper `α` sequence for interval methods.
    pub records: Vec<TraceRecord>,
    /// Lower `γ` sequence for interval methods, empty otherwise.
    pub lower: Vec<TraceRecord>,
    pub status: Status,
    pub final_alpha: Real,
    pub final_g: Real,
    pub final_witness: Option<usize>,
    /// Inner maximizations performed.
    pub oracle_calls: usize,
    pub epsilon: Real,
}

impl SolveTrace {
    /// Converged, or stagnated within ten times the tolerance.
    pub fn is_success(&self) -> bool {
        match self.status {
            Status::Converged => true,
            Status::Stagnated => self.final_g.abs() <= &self.epsilon * &self.epsilon.ctx().int(10),
            Status::MaxItersReached => false,
        }
    }

    /// `g` values of the main records, in order.
    pub fn g_values(&self) -> Vec<Real> {
        self.records.iter().map(|r| r.g.clone()).collect()
    }

    /// Number of distinct `α` values across all records.
    pub fn distinct_alphas(&self) -> usize {
        let mut seen: Vec<&Real> = Vec::new();
        for r in self.records.iter().chain(&self.lower) {
            if !seen.iter().any(|a| **a == r.alpha) {
                seen.push(&r.alpha);
            }
        }
        seen.len()
    }
}

/// Current bracket of an interval method.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalState {
    pub gamma: Real,
    pub alpha: Real,
    pub g_gamma: Real,
    pub g_alpha: Real,
}

impl IntervalState {
    /// Requires `g(γ) <= 0 <= g(α)` and `γ <= α`.
    pub fn new(lower: &OracleEvaluation, upper: &OracleEvaluation) -> Result<Self> {
        Self::with_tolerance(lower, upper, &lower.g.ctx().zero())
    }

    /// As [`IntervalState::new`], but an endpoint with `|g| <= tol` counts as
    /// lying on either side of the root. A feasible ratio computed in
    /// floating point can land a rounding error below the root.
    pub fn with_tolerance(
        lower: &OracleEvaluation,
        upper: &OracleEvaluation,
        tol: &Real,
    ) -> Result<Self> {
        let state = IntervalState {
            gamma: lower.alpha.clone(),
            alpha: upper.alpha.clone(),
            g_gamma: lower.g.clone(),
            g_alpha: upper.g.clone(),
        };
        let off = |g: &Real| !within(g, tol);
        if (state.g_gamma.is_positive() && off(&state.g_gamma))
            || (state.g_alpha.is_negative() && off(&state.g_alpha))
            || state.gamma > state.alpha
        {
            return Err(Error::InvalidBracket {
                gamma: state.gamma.to_string(),
                alpha: state.alpha.to_string(),
                g_gamma: state.g_gamma.to_string(),
                g_alpha: state.g_alpha.to_string(),
            });
        }
        Ok(state)
    }
}

/// Zero of the tangent line at `e`: `α - g / f2`.
pub fn tangent_step(e: &OracleEvaluation) -> Real {
    &e.alpha - &(&e.g / &e.f2)
}

/// Zero of the secant through the lower and upper evaluations.
pub fn secant_lower_step(e_gamma: &OracleEvaluation, e_alpha: &OracleEvaluation) -> Result<Real> {
    if e_gamma.g.is_zero() {
        return Ok(e_gamma.alpha.clone());
    }
    let rise = &e_alpha.g - &e_gamma.g;
    if rise.is_zero() {
        return Err(Error::DegenerateSecant {
            gamma: e_gamma.alpha.to_string(),
            alpha: e_alpha.alpha.to_string(),
        });
    }
    let run = &e_alpha.alpha - &e_gamma.alpha;
    Ok(&e_gamma.alpha - &(&e_gamma.g * &run / rise))
}

/// The smaller of the two tangent zeros at the previous upper point and the
/// new lower point.
pub fn accelerated_interval_upper_step(
    e_alpha_prev: &OracleEvaluation,
    e_gamma_new: &OracleEvaluation,
) -> Real {
    Real::min_of(&tangent_step(e_alpha_prev), &tangent_step(e_gamma_new))
}

/// The smaller of the two tangent zeros after an undershoot.
pub fn min_tangent_recovery(e_neg: &OracleEvaluation, e_pos: &OracleEvaluation) -> Real {
    Real::min_of(&tangent_step(e_neg), &tangent_step(e_pos))
}

/// The screening inequality
/// `g_prev f2_cur (α_cur - α_prev) <= ρ g_cur (g_cur - g_prev)`,
/// evaluated left to right exactly as written.
pub fn screening_condition(prev: &OracleEvaluation, cur: &OracleEvaluation, rho: &Real) -> bool {
    let lhs = &prev.g * &cur.f2 * (&cur.alpha - &prev.alpha);
    let rhs = rho * &cur.g * (&cur.g - &prev.g);
    lhs <= rhs
}

/// Two-point accelerated step
/// `α_cur - g_cur (g_cur - g_prev)(α_cur - α_prev) / [g_cur (g_cur - g_prev) - g_prev f2_cur (α_cur - α_prev)]`.
pub fn accel_step(prev: &OracleEvaluation, cur: &OracleEvaluation) -> Result<Real> {
    if prev.alpha == cur.alpha {
        return Err(Error::DegeneratePair(cur.alpha.to_string()));
    }
    let dg = &cur.g * &(&cur.g - &prev.g);
    let da = &cur.alpha - &prev.alpha;
    let numerator = &dg * &da;
    let denominator = &dg - &(&prev.g * &cur.f2 * &da);
    if !denominator.is_positive() {
        return Err(Error::NumericBreakdown {
            denominator: denominator.to_string(),
            prev_alpha: prev.alpha.to_string(),
            cur_alpha: cur.alpha.to_string(),
        });
    }
    Ok(&cur.alpha - &(numerator / denominator))
}

fn within(g: &Real, epsilon: &Real) -> bool {
    g.abs() <= *epsilon
}

fn invalid_start(e: &OracleEvaluation) -> Error {
    Error::InvalidStart {
        alpha: e.alpha.to_string(),
        g: e.g.to_string(),
    }
}

fn finish(
    method: Method,
    records: Vec<TraceRecord>,
    lower: Vec<TraceRecord>,
    status: Status,
    last: &OracleEvaluation,
    oracle: &MemoOracle<'_>,
    config: &SolverConfig,
) -> SolveTrace {
    SolveTrace {
        method,
        records,
        lower,
        status,
        final_alpha: last.alpha.clone(),
        final_g: last.g.clone(),
        final_witness: last.witness,
        oracle_calls: oracle.calls(),
        epsilon: config.epsilon.clone(),
    }
}

/// Tangent iteration from a point with `g >= 0`.
pub fn classical_dinkelbach(
    problem: &Problem,
    alpha_init: &Real,
    config: &SolverConfig,
) -> Result<SolveTrace> {
    config.validate()?;
    let mut oracle = MemoOracle::new(problem);
    let mut cur = oracle.evaluate(alpha_init)?;
    if !within(&cur.g, &config.epsilon) && cur.g.is_negative() {
        return Err(invalid_start(&cur));
    }
    let mut records = vec![TraceRecord::new(-1, &cur, Branch::Init)];
    let mut k = -1i64;
    let status = loop {
        if within(&cur.g, &config.epsilon) {
            break Status::Converged;
        }
        if (k + 1) as usize >= config.max_iters {
            break Status::MaxItersReached;
        }
        let next = tangent_step(&cur);
        if next == cur.alpha {
            break Status::Stagnated;
        }
        cur = oracle.evaluate(&next)?;
        k += 1;
        records.push(TraceRecord::new(k, &cur, Branch::PlainTangent));
    };
    Ok(finish(
        Method::Classical,
        records,
        Vec::new(),
        status,
        &cur,
        &oracle,
        config,
    ))
}

/// Interval method with secant lower and tangent upper updates.
pub fn interval_dinkelbach(
    problem: &Problem,
    gamma0: &Real,
    alpha0: &Real,
    config: &SolverConfig,
) -> Result<SolveTrace> {
    interval_method(problem, gamma0, alpha0, config, false)
}

/// Interval method whose upper update takes the smaller tangent zero of the
/// previous upper point and the fresh lower point, reusing the lower
/// evaluation.
pub fn accelerated_interval_dinkelbach(
    problem: &Problem,
    gamma0: &Real,
    alpha0: &Real,
    config: &SolverConfig,
) -> Result<SolveTrace> {
    interval_method(problem, gamma0, alpha0, config, true)
}

fn interval_method(
    problem: &Problem,
    gamma0: &Real,
    alpha0: &Real,
    config: &SolverConfig,
    accelerated: bool,
) -> Result<SolveTrace> {
    config.validate()?;
    let method = if accelerated {
        Method::AccelInterval
    } else {
        Method::Interval
    };
    let mut oracle = MemoOracle::new(problem);
    let mut lo = oracle.evaluate(gamma0)?;
    let mut hi = oracle.evaluate(alpha0)?;
    IntervalState::with_tolerance(&lo, &hi, &config.epsilon)?;
    let mut lower = vec![TraceRecord::new(0, &lo, Branch::Init)];
    let mut upper = vec![TraceRecord::new(0, &hi, Branch::Init)];
    let mut k = 0i64;
    let status = loop {
        if within(&lo.g, &config.epsilon) || within(&hi.g, &config.epsilon) {
            break Status::Converged;
        }
        if k as usize >= config.max_iters {
            break Status::MaxItersReached;
        }
        let gamma = secant_lower_step(&lo, &hi)?;
        let (new_lo, alpha) = if accelerated {
            let e = oracle.evaluate(&gamma)?;
            let alpha = accelerated_interval_upper_step(&hi, &e);
            (e, alpha)
        } else {
            let alpha = tangent_step(&hi);
            (oracle.evaluate(&gamma)?, alpha)
        };
        if new_lo.alpha == lo.alpha && alpha == hi.alpha {
            break Status::Stagnated;
        }
        let new_hi = oracle.evaluate(&alpha)?;
        k += 1;
        lower.push(TraceRecord::new(k, &new_lo, Branch::SecantLower));
        upper.push(TraceRecord::new(k, &new_hi, Branch::IntervalUpper));
        lo = new_lo;
        hi = new_hi;
    };
    // report whichever end is closer to the root in g, the upper one on ties
    let best = if lo.g.abs() < hi.g.abs() { &lo } else { &hi };
    Ok(finish(method, upper, lower, status, best, &oracle, config))
}

/// Accelerated method: screened two-point steps with min-tangent recovery
/// after an undershoot and plain tangent steps otherwise.
pub fn accelerated_dinkelbach(
    problem: &Problem,
    alpha_minus1: &Real,
    config: &SolverConfig,
) -> Result<SolveTrace> {
    config.validate()?;
    let mut oracle = MemoOracle::new(problem);
    let init = oracle.evaluate(alpha_minus1)?;
    let mut records = vec![TraceRecord::new(-1, &init, Branch::Init)];
    if within(&init.g, &config.epsilon) {
        return Ok(finish(
            Method::Accel,
            records,
            Vec::new(),
            Status::Converged,
            &init,
            &oracle,
            config,
        ));
    }
    if init.g.is_negative() {
        return Err(invalid_start(&init));
    }
    let first = tangent_step(&init);
    if first == init.alpha {
        return Ok(finish(
            Method::Accel,
            records,
            Vec::new(),
            Status::Stagnated,
            &init,
            &oracle,
            config,
        ));
    }
    let mut prev = init;
    let mut cur = oracle.evaluate(&first)?;
    records.push(TraceRecord::new(0, &cur, Branch::PlainTangent));
    let mut k = 0i64;

    let status = loop {
        if within(&cur.g, &config.epsilon) {
            break Status::Converged;
        }
        if k as usize >= config.max_iters {
            break Status::MaxItersReached;
        }
        let mut flagged = false;
        if screening_condition(&prev, &cur, &config.rho) {
            match accel_step(&prev, &cur) {
                Ok(next) => {
                    if next == cur.alpha {
                        break Status::Stagnated;
                    }
                    let e = oracle.evaluate(&next)?;
                    k += 1;
                    records.push(TraceRecord::new(k, &e, Branch::Accel));
                    if within(&e.g, &config.epsilon) || !e.g.is_negative() {
                        prev = std::mem::replace(&mut cur, e);
                        continue;
                    }
                    // undershoot: recover from the negative point
                    if k as usize >= config.max_iters {
                        cur = e;
                        break Status::MaxItersReached;
                    }
                    let recovered = min_tangent_recovery(&e, &cur);
                    if recovered == e.alpha {
                        cur = e;
                        break Status::Stagnated;
                    }
                    let r = oracle.evaluate(&recovered)?;
                    k += 1;
                    records.push(TraceRecord::new(k, &r, Branch::MinTangent));
                    prev = e;
                    cur = r;
                    continue;
                }
                Err(Error::NumericBreakdown { .. }) => flagged = true,
                Err(other) => return Err(other),
            }
        }
        let next = tangent_step(&cur);
        if next == cur.alpha {
            break Status::Stagnated;
        }
        let e = oracle.evaluate(&next)?;
        k += 1;
        let mut record = TraceRecord::new(k, &e, Branch::PlainTangent);
        record.flagged = flagged;
        records.push(record);
        prev = std::mem::replace(&mut cur, e);
    };
    Ok(finish(
        Method::Accel,
        records,
        Vec::new(),
        status,
        &cur,
        &oracle,
        config,
    ))
}

/// Starting data for a solve.
#[derive(Clone, Debug, PartialEq)]
pub enum Start {
    Point(Real),
    Bracket { gamma: Real, alpha: Real },
}

/// Dispatch on `method`.
pub fn solve(
    problem: &Problem,
    method: Method,
    start: &Start,
    config: &SolverConfig,
) -> Result<SolveTrace> {
    match (method, start) {
        (Method::Classical, Start::Point(a)) => classical_dinkelbach(problem, a, config),
        (Method::Accel, Start::Point(a)) => accelerated_dinkelbach(problem, a, config),
        (Method::Interval, Start::Bracket { gamma, alpha }) => {
            interval_dinkelbach(problem, gamma, alpha, config)
        }
        (Method::AccelInterval, Start::Bracket { gamma, alpha }) => {
            accelerated_interval_dinkelbach(problem, gamma, alpha, config)
        }
        (m, _) if m.is_interval() => Err(Error::InvalidConfig(format!(
            "{m} needs a bracket [gamma0, alpha0]"
        ))),
        (m, _) => Err(Error::InvalidConfig(format!(
            "{m} needs a single starting point"
        ))),
    }
}

/// Structural properties every trace must satisfy. Returns a description of
/// each violation; empty means the trace is sound.
///
/// Records with `|g| <= ε` end a run, so sign and ordering checks skip them:
/// rounding may leave such a point a hair on the wrong side of the root.
pub fn check_invariants(trace: &SolveTrace) -> Vec<String> {
    let eps = &trace.epsilon;
    let settled = |r: &TraceRecord| within(&r.g, eps);
    let mut violations = Vec::new();
    match trace.method {
        Method::Interval | Method::AccelInterval => {
            for (lo, hi) in trace.lower.iter().zip(&trace.records) {
                if !settled(lo) && lo.g.is_positive() {
                    violations.push(format!("k={}: g(gamma) = {} > 0", lo.k, lo.g));
                }
                if !settled(hi) && hi.g.is_negative() {
                    violations.push(format!("k={}: g(alpha) = {} < 0", hi.k, hi.g));
                }
                if !settled(lo) && !settled(hi) && lo.alpha > hi.alpha {
                    violations.push(format!(
                        "k={}: gamma = {} above alpha = {}",
                        lo.k, lo.alpha, hi.alpha
                    ));
                }
            }
            for pair in trace.lower.windows(2) {
                if !settled(&pair[1]) && pair[1].alpha < pair[0].alpha {
                    violations.push(format!("k={}: lower bound decreased", pair[1].k));
                }
            }
            for pair in trace.records.windows(2) {
                if !settled(&pair[1]) && pair[1].alpha > pair[0].alpha {
                    violations.push(format!("k={}: upper bound increased", pair[1].k));
                }
            }
        }
        Method::Classical => {
            for pair in trace.records.windows(2) {
                if !settled(&pair[1])
                    && pair[1].alpha.partial_cmp(&pair[0].alpha) != Some(Ordering::Less)
                {
                    violations.push(format!("k={}: alpha did not decrease", pair[1].k));
                }
            }
        }
        Method::Accel => {
            for pair in trace.records.windows(2) {
                if pair[0].side == Side::Negative
                    && pair[1].side == Side::Negative
                    && !settled(&pair[1])
                {
                    violations.push(format!(
                        "k={}: two consecutive negative iterates",
                        pair[1].k
                    ));
                }
                if pair[1].branch == Branch::MinTangent && pair[0].side != Side::Negative {
                    violations.push(format!(
                        "k={}: recovery step not preceded by an undershoot",
                        pair[1].k
                    ));
                }
            }
            let mut last_nonneg: Option<&TraceRecord> = None;
            for r in trace.records.iter().filter(|r| r.side != Side::Negative) {
                if let Some(p) = last_nonneg {
                    if !settled(r) && r.alpha.partial_cmp(&p.alpha) != Some(Ordering::Less) {
                        violations.push(format!(
                            "k={}: nonnegative iterates stopped decreasing",
                            r.k
                        ));
                    }
                }
                last_nonneg = Some(r);
            }
        }
    }
    violations
}
