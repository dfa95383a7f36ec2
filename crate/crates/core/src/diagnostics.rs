//! Post-hoc analysis of solve traces.
//!
//! `|g(α_k)|` serves as the error proxy throughout: it is within constant
//! factors of `|α_k - α*|`, so the root itself is never needed.

use std::fmt;

use crate::error::{Error, Result};
use crate::oracle::Problem;
use crate::scalar::Real;
use crate::solvers::{Side, SolveTrace, SolverConfig, TraceRecord};

/// Number of trailing estimates averaged by [`estimate_order`].
pub const ORDER_WINDOW: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct OrderReport {
    /// `ln|g_{k+1} / g_k| / ln|g_k / g_{k-1}|` for each run of three
    /// consecutive usable magnitudes.
    pub estimates: Vec<Real>,
    /// `ln|g_{k+1}| / ln|g_k|` for each usable adjacent pair.
    pub exponent_ratios: Vec<Real>,
    /// Mean of the last `min(4, n)` estimates.
    pub window_average: Real,
    /// Count of magnitudes with `0 < |g| < 1`.
    pub usable: usize,
}

impl fmt::Display for OrderReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[Real]| {
            v.iter()
                .map(|q| q.to_scientific(4))
                .collect::<Vec<_>>()
                .join(", ")
        };
        writeln!(f, "usable steps: {}", self.usable)?;
        writeln!(f, "order estimates: {}", list(&self.estimates))?;
        writeln!(f, "exponent ratios: {}", list(&self.exponent_ratios))?;
        write!(
            f,
            "tail order (average of last {}): {}",
            self.estimates.len().min(ORDER_WINDOW),
            self.window_average.to_scientific(4)
        )
    }
}

/// Empirical convergence order from a sequence of `g` values.
///
/// Only magnitudes with `0 < |g| < 1` are used; estimates need three
/// consecutive such values, exponent ratios need two.
pub fn estimate_order_values(values: &[Real]) -> Result<OrderReport> {
    let logs: Vec<Option<Real>> = values
        .iter()
        .map(|g| {
            let m = g.abs();
            (m.is_positive() && m < m.ctx().one()).then(|| m.ln().expect("positive magnitude"))
        })
        .collect();
    let usable = logs.iter().flatten().count();
    let mut exponent_ratios = Vec::new();
    for pair in logs.windows(2) {
        if let [Some(a), Some(b)] = pair {
            exponent_ratios.push(b / a);
        }
    }
    let mut estimates = Vec::new();
    for triple in logs.windows(3) {
        if let [Some(a), Some(b), Some(c)] = triple {
            let earlier = b - a;
            if !earlier.is_zero() {
                estimates.push((c - b) / earlier);
            }
        }
    }
    if estimates.is_empty() {
        return Err(Error::NotEnoughData(format!(
            "order estimation needs three consecutive values with 0 < |g| < 1, found {usable} usable"
        )));
    }
    let tail = &estimates[estimates.len() - estimates.len().min(ORDER_WINDOW)..];
    let ctx = tail[0].ctx();
    let sum = tail.iter().fold(ctx.zero(), |acc, q| acc + q);
    let window_average = sum / ctx.int(tail.len() as i64);
    Ok(OrderReport {
        estimates,
        exponent_ratios,
        window_average,
        usable,
    })
}

/// Order estimate over the main records of a trace (the upper sequence for
/// interval methods).
pub fn estimate_order(trace: &SolveTrace) -> Result<OrderReport> {
    estimate_order_values(&trace.g_values())
}

/// Order estimate over the lower sequence of an interval method.
pub fn estimate_order_lower(trace: &SolveTrace) -> Result<OrderReport> {
    let values: Vec<Real> = trace.lower.iter().map(|r| r.g.clone()).collect();
    estimate_order_values(&values)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodReport {
    /// Smallest `p` in `{1, 2, 3}` whose repetition reproduces the window.
    pub detected_period: Option<usize>,
    /// Sides of the trailing window, oldest first.
    pub sign_pattern: Vec<Side>,
    pub window: usize,
}

impl PeriodReport {
    pub fn pattern_string(&self) -> String {
        self.sign_pattern.iter().map(Side::symbol).collect()
    }
}

impl fmt::Display for PeriodReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.detected_period {
            Some(p) => write!(f, "period {p}")?,
            None => f.write_str("no period <= 3")?,
        }
        write!(
            f,
            " (trailing {} sides: {})",
            self.window,
            self.pattern_string()
        )
    }
}

pub const MIN_PERIOD_WINDOW: usize = 6;

/// Smallest period of the sign pattern over the trailing `window` records.
///
/// Records up to index 0 are initialization and are skipped; a record with
/// `g = 0` ends the usable sequence since it has no side.
pub fn detect_period(trace: &SolveTrace, window: usize) -> Result<PeriodReport> {
    if window < MIN_PERIOD_WINDOW {
        return Err(Error::InvalidConfig(format!(
            "period window must be at least {MIN_PERIOD_WINDOW}, got {window}"
        )));
    }
    let sides: Vec<Side> = trace
        .records
        .iter()
        .filter(|r| r.k >= 1)
        .map(|r: &TraceRecord| r.side)
        .take_while(|s| *s != Side::Zero)
        .collect();
    if sides.len() < window {
        return Err(Error::NotEnoughData(format!(
            "period detection over {window} records needs that many iterates after initialization, found {}",
            sides.len()
        )));
    }
    let pattern = sides[sides.len() - window..].to_vec();
    let detected_period =
        (1..=3).find(|&p| (p..pattern.len()).all(|i| pattern[i] == pattern[i - p]));
    Ok(PeriodReport {
        detected_period,
        sign_pattern: pattern,
        window,
    })
}

/// Asymptotic behavior predicted by the sign of `χ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChiClass {
    /// `χ > 0`: the sign pattern settles to period 1 or 2.
    Period1Or2,
    /// `χ < 0`: period 3.
    Period3,
    /// `χ = 0`.
    Degenerate,
}

impl ChiClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChiClass::Period1Or2 => "period 1 or 2",
            ChiClass::Period3 => "period 3",
            ChiClass::Degenerate => "degenerate",
        }
    }

    /// Whether an observed period agrees with the prediction.
    pub fn admits(&self, period: usize) -> bool {
        match self {
            ChiClass::Period1Or2 => period == 1 || period == 2,
            ChiClass::Period3 => period == 3,
            ChiClass::Degenerate => period == 1,
        }
    }
}

impl fmt::Display for ChiClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChiReport {
    pub alpha_star: Real,
    pub chi: Real,
    pub predicted_behavior: ChiClass,
}

impl fmt::Display for ChiReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "chi = {} at alpha* = {}: {}",
            self.chi.to_scientific(6),
            self.alpha_star.to_scientific(6),
            self.predicted_behavior
        )
    }
}

/// `χ = 3 g''(α*)² - 2 g'(α*) g'''(α*)` and its classification.
///
/// `α*` is normally a solver's final iterate rather than the exact root, so
/// `χ` counts as zero when it is below `10^(-digits/2)` (`1e-8` natively)
/// relative to the size of its two terms.
pub fn compute_chi(problem: &Problem, alpha_star: &Real) -> Result<ChiReport> {
    let direct = problem
        .as_direct()
        .ok_or_else(|| Error::Unsupported("nonsmooth g".into()))?;
    let f = direct.function();
    let missing = || Error::Unsupported(format!("{} does not provide g'' and g'''", direct.name()));
    let d1 = f.d1(alpha_star);
    let d2 = f.d2(alpha_star).ok_or_else(missing)?;
    let d3 = f.d3(alpha_star).ok_or_else(missing)?;
    let ctx = alpha_star.ctx();
    let curvature = ctx.int(3) * d2.square();
    let skew = ctx.int(2) * &d1 * &d3;
    let chi = &curvature - &skew;
    let tolerance = match ctx.digits() {
        None => ctx.from_f64(1e-8),
        Some(d) => ctx.pow10_neg(d / 2),
    };
    let scale = curvature.abs() + skew.abs();
    let predicted_behavior = if chi.abs() <= tolerance * scale {
        ChiClass::Degenerate
    } else if chi.is_positive() {
        ChiClass::Period1Or2
    } else {
        ChiClass::Period3
    };
    Ok(ChiReport {
        alpha_star: alpha_star.clone(),
        chi,
        predicted_behavior,
    })
}

/// Bisection for the root of `g` on `[lo, hi]`, independent of the solvers.
///
/// Stops when the bracket is narrower than `10^-(digits-10)` (big floats) or
/// stops shrinking (native), or when `g` vanishes at a midpoint.
pub fn reference_root(
    problem: &Problem,
    lo: &Real,
    hi: &Real,
    config: &SolverConfig,
) -> Result<Real> {
    let ctx = config.ctx;
    let (mut lo, mut hi) = (lo.with_ctx(ctx), hi.with_ctx(ctx));
    let g_lo = problem.evaluate(&lo)?.g;
    let g_hi = problem.evaluate(&hi)?.g;
    if g_lo.is_positive() || g_hi.is_negative() || lo > hi {
        return Err(Error::InvalidBracket {
            gamma: lo.to_string(),
            alpha: hi.to_string(),
            g_gamma: g_lo.to_string(),
            g_alpha: g_hi.to_string(),
        });
    }
    let width = ctx.digits().map(|d| ctx.pow10_neg(d.saturating_sub(10)));
    let two = ctx.int(2);
    loop {
        let mid = (&lo + &hi) / &two;
        if let Some(w) = &width {
            if &hi - &lo <= *w {
                return Ok(mid);
            }
        }
        if mid == lo || mid == hi {
            return Ok(mid);
        }
        let g = problem.evaluate(&mid)?.g;
        if g.is_zero() {
            return Ok(mid);
        }
        if g.is_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}
