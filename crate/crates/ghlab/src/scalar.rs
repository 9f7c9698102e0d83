//! Numeric backends: exact rationals and tolerant 64-bit floats.

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use malachite_base::num::conversion::traits::RoundingFrom;
use malachite_base::rounding_modes::RoundingMode;
use malachite_q::Rational;
use serde_json::Value;

/// Arithmetic and comparison interface shared by both backends.
///
/// Comparisons that decide set membership go through [`Scalar::leq`] and
/// [`Scalar::less`], which apply the backend tolerance (zero for rationals).
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;
    const NAME: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn ratio(num: i64, den: i64) -> Self;
    /// Exact for rationals (every finite float is a dyadic rational).
    fn from_f64(x: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
    /// Comparison slack: 0 for exact backends.
    fn tol() -> Self;
    fn parse(s: &str) -> Option<Self>;
    fn to_json(&self) -> Value;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn is_zero(&self) -> bool {
        self.abs() <= Self::tol()
    }
    fn leq(&self, other: &Self) -> bool {
        *self <= other.clone() + Self::tol()
    }
    fn less(&self, other: &Self) -> bool {
        self.clone() + Self::tol() < *other
    }
    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).abs() <= Self::tol()
    }
    fn half(&self) -> Self {
        self.clone() / Self::from_i64(2)
    }
    fn cmp_total(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

/// Exact rational number.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Q(pub Rational);

impl Q {
    pub fn new(num: i64, den: i64) -> Q {
        Q(Rational::from_signeds(num, den))
    }
}

impl Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! q_binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for Q {
            type Output = Q;
            fn $m(self, o: Q) -> Q {
                Q(self.0 $op o.0)
            }
        }
        impl<'a> $tr<&'a Q> for &'a Q {
            type Output = Q;
            fn $m(self, o: &'a Q) -> Q {
                Q(&self.0 $op &o.0)
            }
        }
    };
}
q_binop!(Add, add, +);
q_binop!(Sub, sub, -);
q_binop!(Mul, mul, *);
q_binop!(Div, div, /);

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        Q(-self.0)
    }
}

impl FromStr for Q {
    type Err = String;
    fn from_str(s: &str) -> Result<Q, String> {
        <Q as Scalar>::parse(s).ok_or_else(|| format!("not a rational: {s:?}"))
    }
}

fn parse_decimal(s: &str) -> Option<Rational> {
    // "p/q", "12", "-0.125", "1e-3"
    let s = s.trim();
    if let Ok(q) = Rational::from_str(s) {
        return Some(q);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(i) => (&digits[..i], &digits[i + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all = format!("{}{}", if int_part.is_empty() { "0" } else { int_part }, frac_part);
    let mut q = Rational::from_str(&all).ok()?;
    let shift = exp - frac_part.len() as i64;
    let ten = Rational::from(10u32);
    for _ in 0..shift.unsigned_abs() {
        if shift > 0 {
            q *= &ten;
        } else {
            q /= &ten;
        }
    }
    Some(if neg { -q } else { q })
}

impl Scalar for Q {
    const EXACT: bool = true;
    const NAME: &'static str = "rational";

    fn zero() -> Q {
        Q(Rational::from(0))
    }
    fn one() -> Q {
        Q(Rational::from(1))
    }
    fn from_i64(n: i64) -> Q {
        Q(Rational::from(n))
    }
    fn ratio(num: i64, den: i64) -> Q {
        Q::new(num, den)
    }
    fn from_f64(x: f64) -> Option<Q> {
        Rational::try_from(x).ok().map(Q)
    }
    fn to_f64(&self) -> f64 {
        f64::rounding_from(&self.0, RoundingMode::Nearest).0
    }
    fn tol() -> Q {
        Q::zero()
    }
    fn parse(s: &str) -> Option<Q> {
        parse_decimal(s).map(Q)
    }
    fn to_json(&self) -> Value {
        Value::String(self.0.to_string())
    }
    fn leq(&self, other: &Q) -> bool {
        self <= other
    }
    fn less(&self, other: &Q) -> bool {
        self < other
    }
    fn approx_eq(&self, other: &Q) -> bool {
        self == other
    }
    fn is_zero(&self) -> bool {
        self.0 == 0u32
    }
}

// f64 bits of the float tolerance; 1e-9 by default.
static FLOAT_TOL: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695);

/// Sets the comparison tolerance of the float backend (process-wide).
pub fn set_float_tolerance(tol: f64) {
    FLOAT_TOL.store(tol.to_bits(), AtomicOrdering::Relaxed);
}

pub fn float_tolerance() -> f64 {
    f64::from_bits(FLOAT_TOL.load(AtomicOrdering::Relaxed))
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const NAME: &'static str = "float";

    fn zero() -> f64 {
        0.0
    }
    fn one() -> f64 {
        1.0
    }
    fn from_i64(n: i64) -> f64 {
        n as f64
    }
    fn ratio(num: i64, den: i64) -> f64 {
        num as f64 / den as f64
    }
    fn from_f64(x: f64) -> Option<f64> {
        x.is_finite().then_some(x)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn tol() -> f64 {
        float_tolerance()
    }
    fn parse(s: &str) -> Option<f64> {
        parse_decimal(s).map(|q| Q(q).to_f64())
    }
    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self).map(Value::Number).unwrap_or(Value::Null)
    }
    fn abs(&self) -> f64 {
        f64::abs(*self)
    }
}

/// A scalar extended by a top element, used for distances to empty sets.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub enum Ext<S> {
    Fin(S),
    Inf,
}

impl<S: Scalar> Ext<S> {
    pub fn is_inf(&self) -> bool {
        matches!(self, Ext::Inf)
    }
    pub fn finite(&self) -> Option<&S> {
        match self {
            Ext::Fin(s) => Some(s),
            Ext::Inf => None,
        }
    }
    pub fn unwrap_fin(self) -> S {
        match self {
            Ext::Fin(s) => s,
            Ext::Inf => panic!("unexpected infinite value"),
        }
    }
    /// Tolerant `self ≤ other` with `∞ ≤ ∞`.
    pub fn leq(&self, other: &Ext<S>) -> bool {
        match (self, other) {
            (_, Ext::Inf) => true,
            (Ext::Inf, Ext::Fin(_)) => false,
            (Ext::Fin(a), Ext::Fin(b)) => a.leq(b),
        }
    }
    pub fn leq_fin(&self, other: &S) -> bool {
        match self {
            Ext::Inf => false,
            Ext::Fin(a) => a.leq(other),
        }
    }
    pub fn min_of(self, other: Ext<S>) -> Ext<S> {
        match (self, other) {
            (Ext::Inf, o) => o,
            (s, Ext::Inf) => s,
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a.min_of(b)),
        }
    }
    pub fn max_of(self, other: Ext<S>) -> Ext<S> {
        match (self, other) {
            (Ext::Inf, _) | (_, Ext::Inf) => Ext::Inf,
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a.max_of(b)),
        }
    }
    pub fn to_f64(&self) -> f64 {
        match self {
            Ext::Fin(s) => s.to_f64(),
            Ext::Inf => f64::INFINITY,
        }
    }
    pub fn to_json(&self) -> Value {
        match self {
            Ext::Fin(s) => s.to_json(),
            Ext::Inf => Value::String("inf".into()),
        }
    }
}

impl<S: Display> Display for Ext<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Fin(s) => write!(f, "{s}"),
            Ext::Inf => write!(f, "inf"),
        }
    }
}

/// Sorts and removes (tolerantly) duplicate values.
pub fn sort_dedup<S: Scalar>(v: &mut Vec<S>) {
    v.sort_by(|a, b| a.cmp_total(b));
    v.dedup_by(|a, b| a.approx_eq(b));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(Q::parse("7/3"), Some(Q::new(7, 3)));
        assert_eq!(Q::parse("-0.125"), Some(Q::new(-1, 8)));
        assert_eq!(Q::parse("2.5e1"), Some(Q::from_i64(25)));
        assert_eq!(Q::parse("abc"), None);
        assert_eq!(f64::parse("1/4"), Some(0.25));
    }

    #[test]
    fn float_tolerance_default() {
        assert_eq!(float_tolerance(), 1e-9);
        assert!(1.0f64.leq(&(1.0 - 1e-12)));
        assert!(!1.0f64.less(&(1.0 + 1e-12)));
    }

    #[test]
    fn ext_order() {
        let a: Ext<Q> = Ext::Fin(Q::one());
        assert!(a < Ext::Inf);
        assert!(Ext::<Q>::Inf.leq(&Ext::Inf));
        assert!(!Ext::<Q>::Inf.leq(&a));
        assert_eq!(a.clone().min_of(Ext::Inf), a);
    }

    #[test]
    fn exact_float_roundtrip() {
        assert_eq!(Q::from_f64(0.1).unwrap().to_f64(), 0.1);
        assert_eq!(Q::from_f64(0.5), Some(Q::new(1, 2)));
    }
}
