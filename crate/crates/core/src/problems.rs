//! Builtin benchmark functions and problem documents.
//!
//! A problem document is a JSON object with a `kind` field:
//!
//! ```json
//! {"kind": "finite", "items": [[2, 1], [3, 2]]}
//! {"kind": "builtin", "name": "cubic"}
//! {"kind": "exp_affine", "a": 1, "b": "0.5", "c": 5, "d": -9, "domain": [-2, 11]}
//! {"kind": "poly", "coeffs": [0, 1, 1, 1], "domain": ["-0.3", 10]}
//! ```
//!
//! `exp_affine` is `a e^(b α) + c α + d`; `poly` lists coefficients from the
//! constant term up. Numbers may be written as strings so that they survive
//! high-precision parsing untouched. A builtin may carry an optional `domain`
//! override; the analytic families require one.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::oracle::{
    sanity_check_direct_g, DirectGProblem, FiniteSetProblem, Problem, SmoothFunction,
};
use crate::scalar::{real_from_decimal, PrecisionContext, Real};

pub const BUILTIN_NAMES: [&str; 3] = ["exp_affine_9", "arctan_log", "cubic"];

/// Sample count used when validating analytic problem documents.
pub const SANITY_SAMPLES: usize = 64;

/// `a e^(b α) + c α + d`.
#[derive(Clone, Debug)]
pub struct ExpAffine {
    a: Real,
    b: Real,
    c: Real,
    d: Real,
}

impl ExpAffine {
    pub fn new(a: Real, b: Real, c: Real, d: Real) -> Self {
        ExpAffine { a, b, c, d }
    }

    fn scaled_exp(&self, alpha: &Real, power: u32) -> Real {
        let mut coef = self.a.clone();
        for _ in 0..power {
            coef = &coef * &self.b;
        }
        coef * (&self.b * alpha).exp()
    }
}

impl SmoothFunction for ExpAffine {
    fn value(&self, alpha: &Real) -> Real {
        self.scaled_exp(alpha, 0) + &self.c * alpha + &self.d
    }

    fn d1(&self, alpha: &Real) -> Real {
        self.scaled_exp(alpha, 1) + &self.c
    }

    fn d2(&self, alpha: &Real) -> Option<Real> {
        Some(self.scaled_exp(alpha, 2))
    }

    fn d3(&self, alpha: &Real) -> Option<Real> {
        Some(self.scaled_exp(alpha, 3))
    }
}

/// `α atan(α) + 2α - ln(1 + α²) / 2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ArctanLog;

impl SmoothFunction for ArctanLog {
    fn value(&self, alpha: &Real) -> Real {
        let ctx = alpha.ctx();
        let log_term = (ctx.one() + alpha.square())
            .ln()
            .expect("1 + a^2 is positive");
        alpha * &alpha.atan() + &ctx.int(2) * alpha - log_term / ctx.int(2)
    }

    fn d1(&self, alpha: &Real) -> Real {
        alpha.atan() + alpha.ctx().int(2)
    }

    fn d2(&self, alpha: &Real) -> Option<Real> {
        let ctx = alpha.ctx();
        Some(ctx.one() / (ctx.one() + alpha.square()))
    }

    fn d3(&self, alpha: &Real) -> Option<Real> {
        let ctx = alpha.ctx();
        let denom = (ctx.one() + alpha.square()).square();
        Some(-(ctx.int(2) * alpha) / denom)
    }
}

/// Polynomial with coefficients listed from the constant term up.
#[derive(Clone, Debug)]
pub struct Poly {
    coeffs: [Vec<Real>; 4],
}

impl Poly {
    pub fn new(coeffs: Vec<Real>) -> Self {
        let d1 = derivative(&coeffs);
        let d2 = derivative(&d1);
        let d3 = derivative(&d2);
        Poly {
            coeffs: [coeffs, d1, d2, d3],
        }
    }

    fn horner(&self, order: usize, alpha: &Real) -> Real {
        let mut terms = self.coeffs[order].iter().rev();
        let Some(lead) = terms.next() else {
            return alpha.ctx().zero();
        };
        terms.fold(lead.clone(), |acc, c| acc * alpha + c)
    }
}

fn derivative(coeffs: &[Real]) -> Vec<Real> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * &c.ctx().int(i as i64))
        .collect()
}

impl SmoothFunction for Poly {
    fn value(&self, alpha: &Real) -> Real {
        self.horner(0, alpha)
    }

    fn d1(&self, alpha: &Real) -> Real {
        self.horner(1, alpha)
    }

    fn d2(&self, alpha: &Real) -> Option<Real> {
        Some(self.horner(2, alpha))
    }

    fn d3(&self, alpha: &Real) -> Option<Real> {
        Some(self.horner(3, alpha))
    }
}

/// One of the catalog functions at the given precision, on its documented
/// domain.
pub fn builtin(name: &str, ctx: PrecisionContext) -> Result<DirectGProblem> {
    let int = |v: i64| ctx.int(v);
    let (function, lo, hi): (Arc<dyn SmoothFunction>, Real, Real) = match name {
        "exp_affine_9" => {
            let half = int(1) / int(2);
            (
                Arc::new(ExpAffine::new(int(1), half, int(5), int(-9))),
                int(-2),
                int(11),
            )
        }
        "arctan_log" => (Arc::new(ArctanLog), int(-5), int(7)),
        "cubic" => (
            Arc::new(Poly::new(vec![int(0), int(1), int(1), int(1)])),
            int(-1) / int(3),
            int(10),
        ),
        _ => {
            return Err(ProblemError::new(
                ProblemErrorCode::UnknownBuiltin,
                "name",
                format!(
                    "unknown builtin {name:?}; expected one of {}",
                    BUILTIN_NAMES.join(", ")
                ),
            )
            .into())
        }
    };
    DirectGProblem::new(name, function, lo, hi)
}

pub fn exp_affine(
    ctx: PrecisionContext,
    [a, b, c, d]: [&str; 4],
    (lo, hi): (&str, &str),
) -> Result<DirectGProblem> {
    let f = ExpAffine::new(ctx.parse(a)?, ctx.parse(b)?, ctx.parse(c)?, ctx.parse(d)?);
    DirectGProblem::new("exp_affine", Arc::new(f), ctx.parse(lo)?, ctx.parse(hi)?)
}

pub fn poly(
    ctx: PrecisionContext,
    coeffs: &[&str],
    (lo, hi): (&str, &str),
) -> Result<DirectGProblem> {
    let coeffs = coeffs
        .iter()
        .map(|c| ctx.parse(c))
        .collect::<Result<Vec<_>>>()?;
    DirectGProblem::new(
        "poly",
        Arc::new(Poly::new(coeffs)),
        ctx.parse(lo)?,
        ctx.parse(hi)?,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemErrorCode {
    Io,
    Schema,
    NonPositiveF2,
    SanityCheckFailed,
    UnknownBuiltin,
}

impl ProblemErrorCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemErrorCode::Io => "io",
            ProblemErrorCode::Schema => "schema",
            ProblemErrorCode::NonPositiveF2 => "nonpositive_f2",
            ProblemErrorCode::SanityCheckFailed => "sanity_check_failed",
            ProblemErrorCode::UnknownBuiltin => "unknown_builtin",
        }
    }
}

impl fmt::Display for ProblemErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A rejected problem document: what went wrong and where.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{code} at `{field}`: {message}")]
pub struct ProblemError {
    pub code: ProblemErrorCode,
    pub field: String,
    pub message: String,
}

impl ProblemError {
    pub fn new(
        code: ProblemErrorCode,
        field: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        ProblemError {
            code,
            field: field.into(),
            message: message.into(),
        }
    }

    fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::new(ProblemErrorCode::Schema, field, message)
    }
}

/// Closed interval given as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub lo: String,
    pub hi: String,
}

/// A validated problem description. Numbers stay as decimal text until
/// [`ProblemSpec::instantiate`] fixes a precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProblemSpec {
    Finite {
        items: Vec<(String, String)>,
    },
    Builtin {
        name: String,
        domain: Option<Domain>,
    },
    ExpAffine {
        coeffs: [String; 4],
        domain: Domain,
    },
    Poly {
        coeffs: Vec<String>,
        domain: Domain,
    },
}

impl ProblemSpec {
    pub fn builtin(name: &str) -> Result<Self, ProblemError> {
        let spec = ProblemSpec::Builtin {
            name: name.to_string(),
            domain: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        match self {
            ProblemSpec::Finite { items } => format!("finite ({} items)", items.len()),
            ProblemSpec::Builtin { name, .. } => name.clone(),
            ProblemSpec::ExpAffine { .. } => "exp_affine".to_string(),
            ProblemSpec::Poly { .. } => "poly".to_string(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ProblemSpec::Finite { .. })
    }

    /// Build the problem with every constant rounded at `ctx`.
    pub fn instantiate(&self, ctx: PrecisionContext) -> Result<Problem> {
        let direct = match self {
            ProblemSpec::Finite { items } => {
                let items = items
                    .iter()
                    .map(|(f1, f2)| Ok((ctx.parse(f1)?, ctx.parse(f2)?)))
                    .collect::<Result<Vec<_>>>()?;
                return Ok(Problem::Finite(FiniteSetProblem::new(items)?));
            }
            ProblemSpec::Builtin { name, domain } => {
                let p = builtin(name, ctx)?;
                match domain {
                    None => p,
                    Some(d) => p.with_domain(ctx.parse(&d.lo)?, ctx.parse(&d.hi)?)?,
                }
            }
            ProblemSpec::ExpAffine { coeffs, domain } => {
                let [a, b, c, d] = coeffs.each_ref().map(String::as_str);
                exp_affine(ctx, [a, b, c, d], (&domain.lo, &domain.hi))?
            }
            ProblemSpec::Poly { coeffs, domain } => {
                let coeffs: Vec<&str> = coeffs.iter().map(String::as_str).collect();
                poly(ctx, &coeffs, (&domain.lo, &domain.hi))?
            }
        };
        Ok(Problem::Direct(direct))
    }

    /// Enforce the document invariants: positive `f2` for finite sets, a
    /// known builtin, and a passing sanity check for analytic kinds.
    fn validate(&self) -> Result<(), ProblemError> {
        let probe = PrecisionContext::with_digits(30).expect("30 digits is a valid precision");
        if let ProblemSpec::Finite { items } = self {
            for (i, (_, f2)) in items.iter().enumerate() {
                let value = probe
                    .parse(f2)
                    .map_err(|e| ProblemError::schema(format!("items[{i}][1]"), e.to_string()))?;
                if !value.is_positive() {
                    return Err(ProblemError::new(
                        ProblemErrorCode::NonPositiveF2,
                        format!("items[{i}][1]"),
                        format!("f2 must be positive, got {f2}"),
                    ));
                }
            }
        }
        let problem = self
            .instantiate(PrecisionContext::native())
            .map_err(|e| match e {
                Error::Problem(pe) => pe,
                other => ProblemError::schema(self.domain_field(), other.to_string()),
            })?;
        if let Problem::Direct(direct) = &problem {
            let report = sanity_check_direct_g(direct, SANITY_SAMPLES)
                .map_err(|e| ProblemError::schema("domain", e.to_string()))?;
            if !report.passed() {
                return Err(ProblemError::new(
                    ProblemErrorCode::SanityCheckFailed,
                    self.domain_field(),
                    format!("g must be increasing and convex on the domain: {report}"),
                ));
            }
        }
        Ok(())
    }

    fn domain_field(&self) -> &'static str {
        match self {
            ProblemSpec::Finite { .. } => "items",
            ProblemSpec::Builtin { domain: None, .. } => "name",
            _ => "domain",
        }
    }
}

/// Parse and validate a problem document.
pub fn load_problem(text: &str) -> Result<ProblemSpec, ProblemError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| ProblemError::schema("document", format!("invalid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| ProblemError::schema("document", "expected a JSON object"))?;
    let kind = obj
        .get("kind")
        .ok_or_else(|| ProblemError::schema("kind", "missing"))?
        .as_str()
        .ok_or_else(|| ProblemError::schema("kind", "expected a string"))?;
    let spec = match kind {
        "finite" => {
            allow_keys(obj, &["kind", "items"])?;
            let items = required(obj, "items")?.as_array().ok_or_else(|| {
                ProblemError::schema("items", "expected an array of [f1, f2] pairs")
            })?;
            if items.is_empty() {
                return Err(ProblemError::schema(
                    "items",
                    "at least one item is required",
                ));
            }
            let items = items
                .iter()
                .enumerate()
                .map(|(i, item)| match item.as_array().map(Vec::as_slice) {
                    Some([f1, f2]) => Ok((
                        number(f1, &format!("items[{i}][0]"))?,
                        number(f2, &format!("items[{i}][1]"))?,
                    )),
                    _ => Err(ProblemError::schema(
                        format!("items[{i}]"),
                        "expected a pair [f1, f2]",
                    )),
                })
                .collect::<Result<Vec<_>, _>>()?;
            ProblemSpec::Finite { items }
        }
        "builtin" => {
            allow_keys(obj, &["kind", "name", "domain"])?;
            let name = required(obj, "name")?
                .as_str()
                .ok_or_else(|| ProblemError::schema("name", "expected a string"))?;
            if !BUILTIN_NAMES.contains(&name) {
                return Err(ProblemError::new(
                    ProblemErrorCode::UnknownBuiltin,
                    "name",
                    format!(
                        "unknown builtin {name:?}; expected one of {}",
                        BUILTIN_NAMES.join(", ")
                    ),
                ));
            }
            let domain = obj.get("domain").map(domain).transpose()?;
            ProblemSpec::Builtin {
                name: name.to_string(),
                domain,
            }
        }
        "exp_affine" => {
            allow_keys(obj, &["kind", "a", "b", "c", "d", "domain"])?;
            let coeff = |key: &str| number(required(obj, key)?, key);
            ProblemSpec::ExpAffine {
                coeffs: [coeff("a")?, coeff("b")?, coeff("c")?, coeff("d")?],
                domain: domain(required(obj, "domain")?)?,
            }
        }
        "poly" => {
            allow_keys(obj, &["kind", "coeffs", "domain"])?;
            let coeffs = required(obj, "coeffs")?
                .as_array()
                .ok_or_else(|| ProblemError::schema("coeffs", "expected an array of numbers"))?;
            if coeffs.is_empty() {
                return Err(ProblemError::schema(
                    "coeffs",
                    "at least one coefficient is required",
                ));
            }
            let coeffs = coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| number(c, &format!("coeffs[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            ProblemSpec::Poly {
                coeffs,
                domain: domain(required(obj, "domain")?)?,
            }
        }
        other => {
            return Err(ProblemError::schema(
                "kind",
                format!("unknown kind {other:?}; expected finite, builtin, exp_affine or poly"),
            ))
        }
    };
    spec.validate()?;
    Ok(spec)
}

pub fn load_problem_file(path: impl AsRef<Path>) -> Result<ProblemSpec, ProblemError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| {
        ProblemError::new(
            ProblemErrorCode::Io,
            path.display().to_string(),
            e.to_string(),
        )
    })?;
    load_problem(&text)
}

fn allow_keys(obj: &Map<String, Value>, allowed: &[&str]) -> Result<(), ProblemError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(extra) => Err(ProblemError::schema(extra.clone(), "unexpected field")),
        None => Ok(()),
    }
}

fn required<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value, ProblemError> {
    obj.get(key)
        .ok_or_else(|| ProblemError::schema(key, "missing"))
}

/// A JSON number or a decimal string, returned as its exact text.
fn number(value: &Value, field: &str) -> Result<String, ProblemError> {
    let text = match value {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.trim().to_string(),
        _ => {
            return Err(ProblemError::schema(
                field,
                "expected a number or decimal string",
            ))
        }
    };
    real_from_decimal(&text, PrecisionContext::native())
        .map_err(|_| ProblemError::schema(field, format!("malformed decimal {text:?}")))?;
    Ok(text)
}

fn domain(value: &Value) -> Result<Domain, ProblemError> {
    match value.as_array().map(Vec::as_slice) {
        Some([lo, hi]) => {
            let lo = number(lo, "domain[0]")?;
            let hi = number(hi, "domain[1]")?;
            let probe = PrecisionContext::with_digits(30).expect("30 digits is a valid precision");
            let (l, h) = (probe.parse(&lo), probe.parse(&hi));
            if !matches!((l, h), (Ok(l), Ok(h)) if l < h) {
                return Err(ProblemError::schema(
                    "domain",
                    format!("need lo < hi, got [{lo}, {hi}]"),
                ));
            }
            Ok(Domain { lo, hi })
        }
        _ => Err(ProblemError::schema(
            "domain",
            "expected a two-element array [lo, hi]",
        )),
    }
}
