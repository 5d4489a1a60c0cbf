//! Dual-mode scalars: arbitrary-precision rationals or complex doubles.
//!
//! Every quantity in the toolkit is a [`Scalar`] carrying its [`Mode`].
//! Exact scalars are reduced fractions with positive denominator (the
//! invariant is maintained by `num-rational`); float scalars are complex
//! `f64`. Arithmetic never silently crosses modes: mixing an exact and a
//! float scalar in one operation is a programming error and panics. Fallible
//! entry points ([`Scalar::checked_div`], [`Scalar::checked_inv`], the kernel
//! evaluation functions) return proper errors instead.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Collision threshold for float-mode pole detection: two float points closer
/// than this are treated as coincident (a pole), and float root admissibility
/// uses the same scale.
pub const COLLISION_DELTA: f64 = 1e-8;

/// Arithmetic mode of a scalar or of a whole computation.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Arbitrary-precision rational arithmetic; identities hold exactly.
    Exact,
    /// Complex double-precision arithmetic; identities hold to tolerance.
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::Float => write!(f, "float"),
        }
    }
}

/// A number in one of the two arithmetic modes.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Float(Complex64),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    /// Exact integer scalar.
    pub fn from_integer(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact `p/q`. Fails on `q = 0`.
    pub fn rational(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::DivisionByZero(format!("rational literal {p}/0")));
        }
        Ok(Scalar::Exact(BigRational::new(BigInt::from(p), BigInt::from(q))))
    }

    /// Float scalar with zero imaginary part.
    pub fn real(x: f64) -> Self {
        Scalar::Float(Complex64::new(x, 0.0))
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Scalar::Float(Complex64::new(re, im))
    }

    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::zero()),
            Mode::Float => Scalar::Float(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn one(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::one()),
            Mode::Float => Scalar::Float(Complex64::new(1.0, 0.0)),
        }
    }

    /// The integer `n` in the given mode.
    pub fn integer_in(n: i64, mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::from_integer(n),
            Mode::Float => Scalar::real(n as f64),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_one(),
            Scalar::Float(z) => z.re == 1.0 && z.im == 0.0,
        }
    }

    /// Magnitude as an `f64` (modulus in float mode, |p/q| approximated in
    /// exact mode). Used for reporting and float-mode thresholds only; exact
    /// pass/fail decisions never go through this.
    pub fn abs_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().map(f64::abs).unwrap_or(f64::INFINITY),
            Scalar::Float(z) => z.norm(),
        }
    }

    /// Best-effort conversion to a complex double (lossless for floats).
    pub fn to_complex64(&self) -> Complex64 {
        match self {
            Scalar::Exact(r) => Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0),
            Scalar::Float(z) => *z,
        }
    }

    /// The same value demoted to float mode (identity on float scalars).
    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_complex64())
    }

    /// Underlying rational, if exact.
    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    /// Complex conjugate (identity in exact mode: exact scalars are real).
    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.clone()),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    /// `|a - b|` as an `f64`, for float-mode collision tests.
    pub fn distance_f64(&self, other: &Scalar) -> f64 {
        (self - other).abs_f64()
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero(format!("{self} / {rhs}")));
        }
        Ok(self / rhs)
    }

    pub fn checked_inv(&self) -> Result<Scalar> {
        Scalar::one(self.mode()).checked_div(self)
    }

    /// Integer power; negative exponents require a nonzero base.
    pub fn powi(&self, exp: i32) -> Result<Scalar> {
        if exp < 0 && self.is_zero() {
            return Err(Error::DivisionByZero(format!("{self}^{exp}")));
        }
        let mut out = Scalar::one(self.mode());
        let base = if exp < 0 { self.checked_inv()? } else { self.clone() };
        for _ in 0..exp.unsigned_abs() {
            out = &out * &base;
        }
        Ok(out)
    }
}

fn mode_panic(op: &str) -> ! {
    panic!("scalar mode mismatch: {op} combines exact and float operands");
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a $op b),
                    _ => mode_panic(stringify!($method)),
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    /// Panics on a zero divisor; use [`Scalar::checked_div`] where a zero is
    /// possible.
    fn div(self, rhs: &Scalar) -> Scalar {
        if rhs.is_zero() {
            panic!("scalar division by zero: {self} / {rhs}");
        }
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a / b),
            _ => mode_panic("div"),
        }
    }
}

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Structural equality within one mode; scalars of different modes are never
/// equal.
impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Float(z) => {
                if z.im == 0.0 {
                    write!(f, "{}", z.re)
                } else if z.im.is_sign_negative() {
                    write!(f, "{}-{}i", z.re, -z.im)
                } else {
                    write!(f, "{}+{}i", z.re, z.im)
                }
            }
        }
    }
}

/// Parses exact literals: an optional sign, `p` or `p/q`.
impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        let bad = |what: &str| Error::InvalidArgument(format!("bad rational literal {trimmed:?}: {what}"));
        if trimmed.is_empty() {
            return Err(bad("empty"));
        }
        let (num_str, den_str) = match trimmed.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (trimmed, None),
        };
        let numer: BigInt = num_str.parse().map_err(|_| bad("numerator is not an integer"))?;
        let denom: BigInt = match den_str {
            Some(d) => d.parse().map_err(|_| bad("denominator is not an integer"))?,
            None => BigInt::one(),
        };
        if denom.is_zero() {
            return Err(bad("zero denominator"));
        }
        Ok(Scalar::Exact(BigRational::new(numer, denom)))
    }
}

/// Serialization follows the report/config format: exact scalars as `"p/q"`
/// strings (plain `"p"` for integers), float scalars as `[re, im]` pairs.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(_) => serializer.serialize_str(&self.to_string()),
            Scalar::Float(z) => {
                let mut seq = serializer.serialize_seq(Some(2))?;
                seq.serialize_element(&z.re)?;
                seq.serialize_element(&z.im)?;
                seq.end()
            }
        }
    }
}

struct ScalarVisitor;

impl<'de> Visitor<'de> for ScalarVisitor {
    type Value = Scalar;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a \"p/q\" string (exact), a number (float), or an [re, im] pair (float)")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Scalar, E> {
        v.parse().map_err(|e| E::custom(format!("{e}")))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Scalar, E> {
        Ok(Scalar::real(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Scalar, E> {
        Ok(Scalar::real(v as f64))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Scalar, E> {
        Ok(Scalar::real(v))
    }

    fn visit_seq<A: de::SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Scalar, A::Error> {
        let re: f64 = seq
            .next_element()?
            .ok_or_else(|| de::Error::custom("expected [re, im], got []"))?;
        let im: f64 = seq
            .next_element()?
            .ok_or_else(|| de::Error::custom("expected [re, im], got [re]"))?;
        if seq.next_element::<f64>()?.is_some() {
            return Err(de::Error::custom("expected exactly two entries in [re, im]"));
        }
        Ok(Scalar::complex(re, im))
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        deserializer.deserialize_any(ScalarVisitor)
    }
}

/// Checks that two scalars share a mode, returning it.
pub fn common_mode(a: &Scalar, b: &Scalar, context: &str) -> Result<Mode> {
    if a.mode() == b.mode() {
        Ok(a.mode())
    } else {
        Err(Error::ModeMismatch(format!("{context}: {a} is {}, {b} is {}", a.mode(), b.mode())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::rational(p, d).unwrap()
    }

    #[test]
    fn exact_arithmetic_reduces() {
        let x = q(2, 4);
        assert_eq!(x.to_string(), "1/2");
        let y = &x + &q(1, 6);
        assert_eq!(y.to_string(), "2/3");
        let z = &y * &q(-3, 2);
        assert_eq!(z.to_string(), "-1");
        assert!((&z + &Scalar::from_integer(1)).is_zero());
    }

    #[test]
    fn denominator_stays_positive() {
        let x = q(1, -2);
        assert_eq!(x.to_string(), "-1/2");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["3/4", "-3/4", "17", "0", "-2/5"] {
            let v: Scalar = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("a/b".parse::<Scalar>().is_err());
        assert!("".parse::<Scalar>().is_err());
    }

    #[test]
    fn float_arithmetic() {
        let a = Scalar::complex(1.0, 2.0);
        let b = Scalar::complex(0.5, -1.0);
        let c = &a * &b;
        assert!((c.to_complex64() - Complex64::new(2.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    #[should_panic(expected = "mode mismatch")]
    fn mixed_mode_panics() {
        let _ = &Scalar::from_integer(1) + &Scalar::real(1.0);
    }

    #[test]
    fn checked_div_catches_zero() {
        assert!(Scalar::from_integer(1).checked_div(&Scalar::from_integer(0)).is_err());
        assert!(Scalar::real(1.0).checked_div(&Scalar::zero(Mode::Float)).is_err());
        let r = q(3, 4).checked_div(&q(3, 2)).unwrap();
        assert_eq!(r, q(1, 2));
    }

    #[test]
    fn powers() {
        assert_eq!(q(2, 3).powi(3).unwrap(), q(8, 27));
        assert_eq!(q(2, 3).powi(-2).unwrap(), q(9, 4));
        assert!(Scalar::zero(Mode::Exact).powi(-1).is_err());
        assert!(Scalar::zero(Mode::Exact).powi(0).unwrap().is_one());
    }

    #[test]
    fn serde_formats() {
        let exact = q(-2, 5);
        assert_eq!(serde_json::to_string(&exact).unwrap(), "\"-2/5\"");
        let f = Scalar::complex(1.5, -0.25);
        assert_eq!(serde_json::to_string(&f).unwrap(), "[1.5,-0.25]");

        let back: Scalar = serde_json::from_str("\"-2/5\"").unwrap();
        assert_eq!(back, exact);
        let back: Scalar = serde_json::from_str("[1.5,-0.25]").unwrap();
        assert_eq!(back, f);
        // Bare numbers deserialize as float-mode scalars.
        let back: Scalar = serde_json::from_str("3").unwrap();
        assert_eq!(back.mode(), Mode::Float);
        assert_eq!(back, Scalar::real(3.0));
    }

    #[test]
    fn mixed_modes_never_compare_equal() {
        assert_ne!(Scalar::from_integer(1), Scalar::real(1.0));
    }
}
