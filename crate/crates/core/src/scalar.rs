//! Precision-parameterized real arithmetic.
//!
//! A [`Real`] is either a native `f64` or an MPFR float carrying a working
//! precision expressed in decimal digits. Every constructor takes a
//! [`PrecisionContext`] explicitly; there is no global precision setting, so
//! solves at different precisions can run side by side.
//!
//! Mixed operations promote: native operands are widened (exactly) to the big
//! operand's precision, and two big operands compute at the larger precision.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Round;
use rug::Float;

use crate::error::{Error, Result};

/// Smallest digit count accepted for the big-float backend.
pub const MIN_BIG_DIGITS: u32 = 15;

/// Working precision for a computation.
///
/// `digits == 0` is reserved for native 64-bit binary floating point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    digits: u32,
}

impl PrecisionContext {
    pub const NATIVE_DIGITS: u32 = 0;

    pub const fn native() -> Self {
        PrecisionContext { digits: 0 }
    }

    /// `0` selects native precision; anything else must be at least
    /// [`MIN_BIG_DIGITS`].
    pub fn with_digits(digits: u32) -> Result<Self> {
        if digits != Self::NATIVE_DIGITS && digits < MIN_BIG_DIGITS {
            return Err(Error::Precision(format!(
                "big-float precision needs at least {MIN_BIG_DIGITS} digits, got {digits}"
            )));
        }
        Ok(PrecisionContext { digits })
    }

    pub fn is_native(&self) -> bool {
        self.digits == Self::NATIVE_DIGITS
    }

    /// Decimal digits of a big-float context, `None` when native.
    pub fn digits(&self) -> Option<u32> {
        (!self.is_native()).then_some(self.digits)
    }

    /// Significant digits needed to print a value without losing information:
    /// 17 for native doubles, the context digits otherwise.
    pub fn significant_digits(&self) -> usize {
        if self.is_native() {
            17
        } else {
            self.digits as usize
        }
    }

    /// Binary precision of the mantissa.
    pub fn bits(&self) -> u32 {
        if self.is_native() {
            f64::MANTISSA_DIGITS
        } else {
            bits_for_digits(self.digits)
        }
    }

    pub fn zero(&self) -> Real {
        self.int(0)
    }

    pub fn one(&self) -> Real {
        self.int(1)
    }

    pub fn int(&self, value: i64) -> Real {
        if self.is_native() {
            Real::native(value as f64)
        } else {
            Real::big(Float::with_val(self.bits(), value), self.digits)
        }
    }

    /// Exact conversion of an `f64` (rounded only if the context is coarser
    /// than 53 bits, which never happens for valid contexts).
    pub fn from_f64(&self, value: f64) -> Real {
        if self.is_native() {
            Real::native(value)
        } else {
            Real::big(Float::with_val(self.bits(), value), self.digits)
        }
    }

    pub fn parse(&self, text: &str) -> Result<Real> {
        real_from_decimal(text, *self)
    }

    /// `10^-exp` at this precision.
    pub fn pow10_neg(&self, exp: u32) -> Real {
        self.parse(&format!("1e-{exp}"))
            .expect("generated literal is well formed")
    }

    /// Default termination threshold on |g|: 1e-12 natively, otherwise
    /// `10^-(4/5 digits)` (1e-160 at 200 digits).
    pub fn default_epsilon(&self) -> Real {
        match self.digits() {
            None => Real::native(1e-12),
            Some(d) => self.pow10_neg(d * 4 / 5),
        }
    }
}

impl fmt::Display for PrecisionContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.digits() {
            None => f.write_str("native"),
            Some(d) => write!(f, "{d} digits"),
        }
    }
}

fn bits_for_digits(digits: u32) -> u32 {
    // ceil(digits * log2(10))
    let scaled = u64::from(digits) * 3_321_928_095;
    scaled.div_ceil(1_000_000_000) as u32
}

/// A real number at some working precision.
#[derive(Clone)]
pub struct Real {
    repr: Repr,
}

#[derive(Clone)]
enum Repr {
    Native(f64),
    Big { value: Float, digits: u32 },
}

impl Real {
    fn native(value: f64) -> Self {
        Real {
            repr: Repr::Native(value),
        }
    }

    fn big(value: Float, digits: u32) -> Self {
        Real {
            repr: Repr::Big { value, digits },
        }
    }

    pub fn ctx(&self) -> PrecisionContext {
        match &self.repr {
            Repr::Native(_) => PrecisionContext::native(),
            Repr::Big { digits, .. } => PrecisionContext { digits: *digits },
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.repr {
            Repr::Native(x) => *x,
            Repr::Big { value, .. } => value.to_f64(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Native(x) => *x == 0.0,
            Repr::Big { value, .. } => value.is_zero(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match &self.repr {
            Repr::Native(x) => x.is_finite(),
            Repr::Big { value, .. } => value.is_finite(),
        }
    }

    /// Strictly below zero.
    pub fn is_negative(&self) -> bool {
        match &self.repr {
            Repr::Native(x) => *x < 0.0,
            Repr::Big { value, .. } => *value < 0,
        }
    }

    /// Strictly above zero.
    pub fn is_positive(&self) -> bool {
        match &self.repr {
            Repr::Native(x) => *x > 0.0,
            Repr::Big { value, .. } => *value > 0,
        }
    }

    pub fn abs(&self) -> Real {
        self.map(f64::abs, |v, p| Float::with_val(p, v.abs_ref()))
    }

    pub fn exp(&self) -> Real {
        self.map(f64::exp, |v, p| Float::with_val(p, v.exp_ref()))
    }

    pub fn atan(&self) -> Real {
        self.map(f64::atan, |v, p| Float::with_val(p, v.atan_ref()))
    }

    pub fn ln(&self) -> Result<Real> {
        if !self.is_positive() {
            return Err(Error::Domain(format!("ln of non-positive value {self}")));
        }
        Ok(self.map(f64::ln, |v, p| Float::with_val(p, v.ln_ref())))
    }

    pub fn square(&self) -> Real {
        self * self
    }

    /// The smaller of two values; `a` wins ties.
    pub fn min_of(a: &Real, b: &Real) -> Real {
        if b < a {
            b.clone()
        } else {
            a.clone()
        }
    }

    /// The larger of two values; `a` wins ties.
    pub fn max_of(a: &Real, b: &Real) -> Real {
        if b > a {
            b.clone()
        } else {
            a.clone()
        }
    }

    /// Re-round to another precision.
    pub fn with_ctx(&self, ctx: PrecisionContext) -> Real {
        match (&self.repr, ctx.digits()) {
            (Repr::Native(x), None) => Real::native(*x),
            (Repr::Big { value, .. }, None) => Real::native(value.to_f64()),
            (Repr::Native(x), Some(d)) => Real::big(Float::with_val(ctx.bits(), *x), d),
            (Repr::Big { value, .. }, Some(d)) => Real::big(Float::with_val(ctx.bits(), value), d),
        }
    }

    /// Scientific notation `m.mm…e±E` with `sig_digits` significant digits,
    /// rounding half to even.
    ///
    /// The value's canonical decimal form is rounded: the shortest round-trip
    /// digits for native doubles, and the context's digit count for big
    /// floats. Re-parsing a printed string at the same precision and printing
    /// again reproduces it.
    pub fn to_scientific(&self, sig_digits: usize) -> String {
        let sig = sig_digits.max(1);
        let (negative, digits, exp10) = match &self.repr {
            Repr::Native(x) => {
                if !x.is_finite() {
                    return non_finite_label(x.is_nan(), *x < 0.0);
                }
                if *x == 0.0 {
                    return zero_scientific(sig);
                }
                let text = format!("{:e}", x.abs());
                let (mantissa, exp) = text.split_once('e').expect("`{:e}` always has an exponent");
                let digits: Vec<u8> = mantissa.bytes().filter(|b| b.is_ascii_digit()).collect();
                (
                    *x < 0.0,
                    digits,
                    exp.parse::<i64>().expect("integer exponent"),
                )
            }
            Repr::Big { value, digits } => {
                if !value.is_finite() {
                    return non_finite_label(value.is_nan(), value.is_sign_negative());
                }
                if value.is_zero() {
                    return zero_scientific(sig);
                }
                let (negative, text, exp) =
                    value.to_sign_string_exp_round(10, Some(*digits as usize), Round::Nearest);
                let exp = exp.expect("finite nonzero values have an exponent");
                (negative, text.into_bytes(), i64::from(exp) - 1)
            }
        };
        let (kept, carry) = round_half_even(&digits, sig);
        let exp10 = exp10 + i64::from(carry);
        let mut out = String::with_capacity(sig + 8);
        if negative {
            out.push('-');
        }
        out.push(kept[0] as char);
        if sig > 1 {
            out.push('.');
            out.extend(kept[1..].iter().map(|&b| b as char));
        }
        out.push('e');
        out.push_str(&exp10.to_string());
        out
    }

    fn map(&self, native: impl FnOnce(f64) -> f64, big: impl FnOnce(&Float, u32) -> Float) -> Real {
        match &self.repr {
            Repr::Native(x) => Real::native(native(*x)),
            Repr::Big { value, digits } => Real::big(big(value, bits_for_digits(*digits)), *digits),
        }
    }

    fn big_digits(&self) -> u32 {
        match &self.repr {
            Repr::Native(_) => 0,
            Repr::Big { digits, .. } => *digits,
        }
    }

    fn as_float(&self, prec: u32) -> Cow<'_, Float> {
        match &self.repr {
            Repr::Native(x) => Cow::Owned(Float::with_val(prec, *x)),
            Repr::Big { value, .. } => Cow::Borrowed(value),
        }
    }

    fn zip(
        &self,
        other: &Real,
        native: impl FnOnce(f64, f64) -> f64,
        big: impl FnOnce(&Float, &Float, u32) -> Float,
    ) -> Real {
        if let (Repr::Native(x), Repr::Native(y)) = (&self.repr, &other.repr) {
            return Real::native(native(*x, *y));
        }
        let digits = self.big_digits().max(other.big_digits());
        let prec = bits_for_digits(digits);
        let x = self.as_float(prec);
        let y = other.as_float(prec);
        Real::big(big(&x, &y, prec), digits)
    }
}

fn zero_scientific(sig: usize) -> String {
    if sig == 1 {
        "0e0".to_string()
    } else {
        format!("0.{}e0", "0".repeat(sig - 1))
    }
}

fn non_finite_label(nan: bool, negative: bool) -> String {
    match (nan, negative) {
        (true, _) => "nan".to_string(),
        (false, true) => "-inf".to_string(),
        (false, false) => "inf".to_string(),
    }
}

/// Round an ASCII digit string to `sig` digits, half to even. Returns the
/// kept digits and whether rounding carried into a new leading digit.
fn round_half_even(digits: &[u8], sig: usize) -> (Vec<u8>, bool) {
    if digits.len() <= sig {
        let mut kept = digits.to_vec();
        kept.resize(sig, b'0');
        return (kept, false);
    }
    let mut kept = digits[..sig].to_vec();
    let first_dropped = digits[sig];
    let rest_nonzero = digits[sig + 1..].iter().any(|&d| d != b'0');
    let last_odd = (kept[sig - 1] - b'0') % 2 == 1;
    let round_up = first_dropped > b'5' || (first_dropped == b'5' && (rest_nonzero || last_odd));
    if !round_up {
        return (kept, false);
    }
    for d in kept.iter_mut().rev() {
        if *d == b'9' {
            *d = b'0';
        } else {
            *d += 1;
            return (kept, false);
        }
    }
    // all nines rolled over
    kept.insert(0, b'1');
    kept.truncate(sig);
    (kept, true)
}

/// Accepts `[+-]digits[.digits][(e|E)[+-]digits]`, with at least one mantissa
/// digit on either side of the point.
fn is_valid_decimal(text: &str) -> bool {
    let bytes = text.as_bytes();
    let mut i = 0;
    if matches!(bytes.first(), Some(b'+' | b'-')) {
        i += 1;
    }
    let int_start = i;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    let mut mantissa_digits = i - int_start;
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        mantissa_digits += i - frac_start;
    }
    if mantissa_digits == 0 {
        return false;
    }
    if i < bytes.len() && matches!(bytes[i], b'e' | b'E') {
        i += 1;
        if matches!(bytes.get(i), Some(b'+' | b'-')) {
            i += 1;
        }
        let exp_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return false;
        }
    }
    i == bytes.len()
}

/// Parse a signed decimal (optionally with exponent) to the nearest value
/// representable at `ctx`.
pub fn real_from_decimal(text: &str, ctx: PrecisionContext) -> Result<Real> {
    let text = text.trim();
    if !is_valid_decimal(text) {
        return Err(Error::Parse(text.to_string()));
    }
    match ctx.digits() {
        None => text
            .parse::<f64>()
            .map(Real::native)
            .map_err(|_| Error::Parse(text.to_string())),
        Some(d) => {
            let parsed = Float::parse(text).map_err(|_| Error::Parse(text.to_string()))?;
            Ok(Real::big(Float::with_val(ctx.bits(), parsed), d))
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f
            .precision()
            .unwrap_or_else(|| self.ctx().significant_digits());
        f.write_str(&self.to_scientific(sig))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Real({}, {})",
            self.to_scientific(self.ctx().significant_digits()),
            self.ctx()
        )
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (&self.repr, &other.repr) {
            (Repr::Native(x), Repr::Native(y)) => x.partial_cmp(y),
            (Repr::Big { value, .. }, Repr::Native(y)) => value.partial_cmp(y),
            (Repr::Native(x), Repr::Big { value, .. }) => {
                value.partial_cmp(x).map(Ordering::reverse)
            }
            (Repr::Big { value: a, .. }, Repr::Big { value: b, .. }) => a.partial_cmp(b),
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        self.map(|x| -x, |v, p| Float::with_val(p, -v))
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                self.zip(rhs, |x, y| x $op y, |x, y, p| Float::with_val(p, x $op y))
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                &self $op &rhs
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                &self $op rhs
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self $op &rhs
            }
        }
    };
}

binary_op!(Add, add, +);
binary_op!(Sub, sub, -);
binary_op!(Mul, mul, *);
binary_op!(Div, div, /);

#[cfg(test)]
mod tests {
    use super::*;

    fn big(digits: u32) -> PrecisionContext {
        PrecisionContext::with_digits(digits).unwrap()
    }

    #[test]
    fn context_rejects_too_few_digits() {
        assert!(PrecisionContext::with_digits(14).is_err());
        assert!(PrecisionContext::with_digits(15).is_ok());
        assert!(PrecisionContext::with_digits(0).unwrap().is_native());
    }

    #[test]
    fn bits_cover_requested_digits() {
        assert_eq!(bits_for_digits(200), 665);
        assert_eq!(bits_for_digits(15), 50);
    }

    #[test]
    fn parse_examples() {
        for ctx in [PrecisionContext::native(), big(50)] {
            assert!(ctx.parse("0").unwrap().is_zero());
            assert_eq!(ctx.parse("1.00001").unwrap().to_scientific(6), "1.00001e0");
            assert_eq!(
                ctx.parse("-2.19e-28").unwrap().to_scientific(3),
                "-2.19e-28"
            );
            assert_eq!(ctx.parse("+.5").unwrap().to_scientific(2), "5.0e-1");
        }
    }

    #[test]
    fn parse_rejects_malformed() {
        for bad in [
            "", "-", ".", "1e", "1.2.3", "abc", "1e+", "0x10", "1 2", "inf", "NaN",
        ] {
            assert!(
                matches!(
                    real_from_decimal(bad, PrecisionContext::native()),
                    Err(Error::Parse(_))
                ),
                "{bad:?} accepted"
            );
            assert!(
                real_from_decimal(bad, big(30)).is_err(),
                "{bad:?} accepted at 30 digits"
            );
        }
    }

    #[test]
    fn scientific_examples() {
        let n = PrecisionContext::native();
        assert_eq!(n.parse("189.413").unwrap().to_scientific(3), "1.89e2");
        assert_eq!(n.zero().to_scientific(3), "0.00e0");
        assert_eq!(n.parse("-12.997").unwrap().to_scientific(3), "-1.30e1");
        assert_eq!(n.parse("9.995").unwrap().to_scientific(3), "1.00e1");
        assert_eq!(n.parse("0.125").unwrap().to_scientific(2), "1.2e-1");
        assert_eq!(n.parse("0.135").unwrap().to_scientific(2), "1.4e-1");
        assert_eq!(n.parse("7").unwrap().to_scientific(1), "7e0");
        assert_eq!(n.zero().to_scientific(1), "0e0");
        assert_eq!((-n.zero()).to_scientific(2), "0.0e0");
        let b = big(40);
        assert_eq!(b.parse("-12.997").unwrap().to_scientific(3), "-1.30e1");
        assert_eq!(b.parse("2.675").unwrap().to_scientific(3), "2.68e0");
        assert_eq!(b.parse("2.665").unwrap().to_scientific(3), "2.66e0");
        assert_eq!(b.parse("5e-400").unwrap().to_scientific(2), "5.0e-400");
    }

    #[test]
    fn non_finite_values_print_labels() {
        let n = PrecisionContext::native();
        assert_eq!((n.one() / n.zero()).to_scientific(3), "inf");
        assert_eq!((n.zero() / n.zero()).to_scientific(3), "nan");
        let b = big(20);
        assert_eq!((-(b.one() / b.zero())).to_scientific(3), "-inf");
    }

    #[test]
    fn elementary_functions() {
        for ctx in [PrecisionContext::native(), big(60)] {
            assert_eq!(ctx.zero().exp(), ctx.one());
            assert!(ctx.zero().atan().is_zero());
            assert!(ctx.one().ln().unwrap().is_zero());
            assert_eq!(ctx.int(5).exp().to_scientific(6), "1.48413e2");
            assert!(matches!(ctx.zero().ln(), Err(Error::Domain(_))));
            assert!(matches!((-ctx.one()).ln(), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn elementary_functions_agree_across_precisions() {
        // 60-digit results rounded to 50 digits must match the 100-digit ones.
        let lo = big(60);
        let hi = big(100);
        for s in ["0.3", "2.5", "-7.25", "13"] {
            let a = lo.parse(s).unwrap();
            let b = hi.parse(s).unwrap();
            assert_eq!(a.exp().to_scientific(50), b.exp().to_scientific(50));
            assert_eq!(a.atan().to_scientific(50), b.atan().to_scientific(50));
            let (aa, ba) = (a.abs(), b.abs());
            assert_eq!(
                aa.ln().unwrap().to_scientific(50),
                ba.ln().unwrap().to_scientific(50)
            );
        }
    }

    #[test]
    fn mixed_precision_promotes() {
        let n = PrecisionContext::native();
        let b = big(30);
        let third = b.one() / b.int(3);
        let sum = &third + &n.from_f64(0.5);
        assert_eq!(sum.ctx(), b);
        assert_eq!(sum.to_scientific(25), "8.333333333333333333333333e-1");
        let wider = &third * &big(50).one();
        assert_eq!(wider.ctx(), big(50));
        assert!(n.one() < b.int(2));
        assert!(b.int(2) > n.one());
    }

    #[test]
    fn default_epsilon_matches_precision() {
        assert_eq!(PrecisionContext::native().default_epsilon().to_f64(), 1e-12);
        assert_eq!(big(200).default_epsilon().to_scientific(3), "1.00e-160");
    }

    #[test]
    fn round_half_even_carries() {
        assert_eq!(round_half_even(b"9996", 3), (b"100".to_vec(), true));
        assert_eq!(round_half_even(b"1250", 2), (b"12".to_vec(), false));
        assert_eq!(round_half_even(b"1350", 2), (b"14".to_vec(), false));
        assert_eq!(round_half_even(b"12501", 2), (b"13".to_vec(), false));
        assert_eq!(round_half_even(b"7", 3), (b"700".to_vec(), false));
    }
}
