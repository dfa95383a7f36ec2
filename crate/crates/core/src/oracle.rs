//! The parametric function `g(α) = max_x { -f1(x) + α f2(x) }` and its
//! maximizer data.
//!
//! Two kinds of problems are supported: a finite feasible set given as a list
//! of `(f1, f2)` pairs, and an analytic `g` supplied together with its
//! derivatives. For the latter, `f2 = g'(α)` and `f1 = α g'(α) - g(α)`, which
//! is the only choice consistent with `g = -f1 + α f2`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{PrecisionContext, Real};

/// One inner maximization: `g(α)` together with `f1`, `f2` of the maximizer.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleEvaluation {
    pub alpha: Real,
    pub g: Real,
    pub f1: Real,
    pub f2: Real,
    /// Index of the maximizing item for finite problems.
    pub witness: Option<usize>,
}

/// Ratio problem over an explicit finite feasible set.
#[derive(Clone, Debug)]
pub struct FiniteSetProblem {
    items: Vec<(Real, Real)>,
}

impl FiniteSetProblem {
    /// Requires at least one item and `f2 > 0` everywhere.
    pub fn new(items: Vec<(Real, Real)>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidProblem("finite feasible set is empty".into()));
        }
        for (i, (f1, f2)) in items.iter().enumerate() {
            if !f1.is_finite() || !f2.is_finite() {
                return Err(Error::InvalidProblem(format!("item {i} is not finite")));
            }
            if !f2.is_positive() {
                return Err(Error::InvalidProblem(format!(
                    "item {i} has f2 = {f2}, must be positive"
                )));
            }
        }
        Ok(FiniteSetProblem { items })
    }

    /// Convenience constructor for tests and examples.
    pub fn from_f64(ctx: PrecisionContext, items: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            items
                .iter()
                .map(|&(a, b)| (ctx.from_f64(a), ctx.from_f64(b)))
                .collect(),
        )
    }

    pub fn items(&self) -> &[(Real, Real)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn evaluate(&self, alpha: &Real) -> Result<OracleEvaluation> {
        let mut best: Option<(usize, Real)> = None;
        for (i, (f1, f2)) in self.items.iter().enumerate() {
            let value = alpha * f2 - f1;
            // strict comparison keeps the smallest index on ties
            if best.as_ref().is_none_or(|(_, b)| value > *b) {
                best = Some((i, value));
            }
        }
        let (index, g) = best.expect("constructor guarantees at least one item");
        if !g.is_finite() {
            return Err(Error::NonFinite(alpha.to_string()));
        }
        let (f1, f2) = self.items[index].clone();
        Ok(OracleEvaluation {
            alpha: alpha.clone(),
            g,
            f1,
            f2,
            witness: Some(index),
        })
    }
}

/// A smooth, convex, strictly increasing `g` with closed-form derivatives.
pub trait SmoothFunction: Send + Sync + fmt::Debug {
    fn value(&self, alpha: &Real) -> Real;
    fn d1(&self, alpha: &Real) -> Real;
    fn d2(&self, _alpha: &Real) -> Option<Real> {
        None
    }
    fn d3(&self, _alpha: &Real) -> Option<Real> {
        None
    }
}

/// An analytically specified `g` restricted to a domain interval.
#[derive(Clone, Debug)]
pub struct DirectGProblem {
    name: String,
    function: Arc<dyn SmoothFunction>,
    lo: Real,
    hi: Real,
}

impl DirectGProblem {
    pub fn new(
        name: impl Into<String>,
        function: Arc<dyn SmoothFunction>,
        lo: Real,
        hi: Real,
    ) -> Result<Self> {
        if lo.partial_cmp(&hi) != Some(Ordering::Less) {
            return Err(Error::InvalidProblem(format!("empty domain [{lo}, {hi}]")));
        }
        Ok(DirectGProblem {
            name: name.into(),
            function,
            lo,
            hi,
        })
    }

    /// Same function on another domain.
    pub fn with_domain(&self, lo: Real, hi: Real) -> Result<Self> {
        DirectGProblem::new(self.name.clone(), Arc::clone(&self.function), lo, hi)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> (&Real, &Real) {
        (&self.lo, &self.hi)
    }

    pub fn function(&self) -> &dyn SmoothFunction {
        self.function.as_ref()
    }

    pub fn contains(&self, alpha: &Real) -> bool {
        self.lo <= *alpha && *alpha <= self.hi
    }

    pub fn evaluate(&self, alpha: &Real) -> Result<OracleEvaluation> {
        if !self.contains(alpha) {
            return Err(Error::Domain(format!(
                "alpha = {alpha} outside the domain [{}, {}] of {}",
                self.lo, self.hi, self.name
            )));
        }
        let g = self.function.value(alpha);
        let f2 = self.function.d1(alpha);
        if !g.is_finite() || !f2.is_finite() {
            return Err(Error::NonFinite(alpha.to_string()));
        }
        if !f2.is_positive() {
            return Err(Error::InvalidProblem(format!(
                "g'({alpha}) = {f2} is not positive for {}",
                self.name
            )));
        }
        let f1 = alpha * &f2 - &g;
        Ok(OracleEvaluation {
            alpha: alpha.clone(),
            g,
            f1,
            f2,
            witness: None,
        })
    }
}

/// Anything the solvers can run on.
#[derive(Clone, Debug)]
pub enum Problem {
    Finite(FiniteSetProblem),
    Direct(DirectGProblem),
}

impl Problem {
    pub fn evaluate(&self, alpha: &Real) -> Result<OracleEvaluation> {
        match self {
            Problem::Finite(p) => p.evaluate(alpha),
            Problem::Direct(p) => p.evaluate(alpha),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Problem::Finite(_) => "finite",
            Problem::Direct(p) => p.name(),
        }
    }

    pub fn as_direct(&self) -> Option<&DirectGProblem> {
        match self {
            Problem::Direct(p) => Some(p),
            Problem::Finite(_) => None,
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteSetProblem> {
        match self {
            Problem::Finite(p) => Some(p),
            Problem::Direct(_) => None,
        }
    }
}

impl From<FiniteSetProblem> for Problem {
    fn from(p: FiniteSetProblem) -> Self {
        Problem::Finite(p)
    }
}

impl From<DirectGProblem> for Problem {
    fn from(p: DirectGProblem) -> Self {
        Problem::Direct(p)
    }
}

/// `(g(A) - g(B)) / (A - B)`.
pub fn divided_difference(a: &OracleEvaluation, b: &OracleEvaluation) -> Result<Real> {
    if a.alpha == b.alpha {
        return Err(Error::DegeneratePair(a.alpha.to_string()));
    }
    Ok((&a.g - &b.g) / (&a.alpha - &b.alpha))
}

/// Brute-force optimum `min_i f1_i / f2_i`, smallest index on ties.
pub fn finite_min_ratio(problem: &FiniteSetProblem) -> (Real, usize) {
    let mut best: Option<(usize, Real)> = None;
    for (i, (f1, f2)) in problem.items().iter().enumerate() {
        let ratio = f1 / f2;
        if best.as_ref().is_none_or(|(_, b)| ratio < *b) {
            best = Some((i, ratio));
        }
    }
    let (index, ratio) = best.expect("constructor guarantees at least one item");
    (ratio, index)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SanityViolationKind {
    /// `g'` is not strictly positive.
    NonIncreasing,
    /// `g'` decreased between consecutive samples.
    NonConvex,
}

#[derive(Clone, Debug)]
pub struct SanityViolation {
    pub alpha: Real,
    pub slope: Real,
    pub kind: SanityViolationKind,
}

#[derive(Clone, Debug)]
pub struct SanityReport {
    pub samples: usize,
    pub violations: Vec<SanityViolation>,
}

impl SanityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for SanityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "passed at {} samples", self.samples);
        }
        write!(
            f,
            "{} violation(s) at {} samples",
            self.violations.len(),
            self.samples
        )?;
        for v in &self.violations {
            let what = match v.kind {
                SanityViolationKind::NonIncreasing => "g' <= 0",
                SanityViolationKind::NonConvex => "g' decreasing",
            };
            write!(
                f,
                "; {what} at alpha = {} (g' = {})",
                v.alpha.to_scientific(6),
                v.slope.to_scientific(6)
            )?;
        }
        Ok(())
    }
}

/// Samples `g'` at equispaced points of the domain and reports points where
/// it is not positive or where it decreased. Passing does not prove validity.
pub fn sanity_check_direct_g(problem: &DirectGProblem, samples: usize) -> Result<SanityReport> {
    if samples < 2 {
        return Err(Error::InvalidConfig(format!(
            "sanity check needs at least 2 samples, got {samples}"
        )));
    }
    let (lo, hi) = problem.domain();
    let ctx = lo.ctx();
    let span = hi - lo;
    let last = ctx.int(samples as i64 - 1);
    let mut violations = Vec::new();
    let mut previous: Option<Real> = None;
    for i in 0..samples {
        let alpha = if i + 1 == samples {
            hi.clone()
        } else {
            lo + &(&span * &ctx.int(i as i64) / &last)
        };
        let slope = problem.function().d1(&alpha);
        if !slope.is_positive() {
            violations.push(SanityViolation {
                alpha: alpha.clone(),
                slope: slope.clone(),
                kind: SanityViolationKind::NonIncreasing,
            });
        }
        if previous.as_ref().is_some_and(|p| slope < *p) {
            violations.push(SanityViolation {
                alpha: alpha.clone(),
                slope: slope.clone(),
                kind: SanityViolationKind::NonConvex,
            });
        }
        previous = Some(slope);
    }
    Ok(SanityReport {
        samples,
        violations,
    })
}

/// Per-solve evaluation cache keyed by exact `α`, so every distinct `α`
/// costs one inner maximization.
#[derive(Debug)]
pub struct MemoOracle<'p> {
    problem: &'p Problem,
    cache: Vec<OracleEvaluation>,
    calls: usize,
}

impl<'p> MemoOracle<'p> {
    pub fn new(problem: &'p Problem) -> Self {
        MemoOracle {
            problem,
            cache: Vec::new(),
            calls: 0,
        }
    }

    pub fn evaluate(&mut self, alpha: &Real) -> Result<OracleEvaluation> {
        if let Some(hit) = self.cache.iter().find(|e| e.alpha == *alpha) {
            return Ok(hit.clone());
        }
        self.calls += 1;
        let e = self.problem.evaluate(alpha)?;
        self.cache.push(e.clone());
        Ok(e)
    }

    /// Number of inner maximizations actually performed.
    pub fn calls(&self) -> usize {
        self.calls
    }

    pub fn problem(&self) -> &'p Problem {
        self.problem
    }
}
