//! Exact rational numbers with canonical `p/q` text form.
//!
//! Thin wrapper over [`num_rational::BigRational`]: values are always kept in
//! lowest terms with a positive denominator, and division by zero is reported
//! as an error instead of panicking.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational as Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BigRational(Ratio);

impl BigRational {
    /// Builds `numer / denom` in lowest terms.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self(Ratio::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self(Ratio::from_integer(n.into()))
    }

    /// `1 / n` for a nonzero integer.
    pub fn recip_of(n: u64) -> Self {
        assert!(n != 0, "recip_of(0)");
        Self(Ratio::new(BigInt::one(), BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Self(Ratio::zero())
    }

    pub fn one() -> Self {
        Self(Ratio::one())
    }

    /// The exact value of a finite double.
    pub fn from_f64(x: f64) -> Result<Self> {
        Ratio::from_float(x).map(Self).ok_or(Error::Domain {
            name: "x",
            value: x,
            domain: "finite",
        })
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self(&self.0 / &rhs.0))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::one().checked_div(self)
    }

    /// Division by a nonzero machine integer.
    pub fn div_int(&self, d: u64) -> Self {
        assert!(d != 0, "div_int by zero");
        Self(&self.0 / Ratio::from_integer(BigInt::from(d)))
    }

    pub fn mul_int(&self, k: u64) -> Self {
        Self(&self.0 * Ratio::from_integer(BigInt::from(k)))
    }

    pub fn pow(&self, exp: u32) -> Self {
        Self(num_traits::pow(self.0.clone(), exp as usize))
    }

    /// Nearest double (correctly rounded by `num-rational`).
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering with `digits` significant digits, round-half-even.
    ///
    /// The result is positional (never scientific), e.g. `1/24` at 4 digits
    /// gives `0.04167` and `1/2` gives `0.5000`.
    pub fn to_decimal(&self, digits: usize) -> String {
        assert!(digits >= 1, "at least one significant digit");
        if self.is_zero() {
            return format!("0.{}", "0".repeat(digits.saturating_sub(1)));
        }
        let negative = self.0.is_negative();
        let num = self.0.numer().magnitude().clone();
        let den = self.0.denom().magnitude().clone();

        // exponent e with 10^e <= |r| < 10^(e+1)
        let mut exp = num.to_string().len() as i64 - den.to_string().len() as i64;
        if cmp_scaled(&num, &den, exp) == Ordering::Less {
            exp -= 1;
        }
        // shift = digits - 1 - e; scaled = |r| * 10^shift has `digits` integer digits
        let mut shift = digits as i64 - 1 - exp;
        let mut mantissa = round_half_even_scaled(&num, &den, shift);
        if mantissa.to_string().len() > digits {
            // rounding carried into a new digit (e.g. 9.99 -> 10.0)
            shift -= 1;
            mantissa = round_half_even_scaled(&num, &den, shift);
        }
        let mut text = mantissa.to_string();
        let out = if shift <= 0 {
            text.push_str(&"0".repeat((-shift) as usize));
            text
        } else {
            let shift = shift as usize;
            if text.len() <= shift {
                text = format!("{}{}", "0".repeat(shift - text.len() + 1), text);
            }
            let split = text.len() - shift;
            format!("{}.{}", &text[..split], &text[split..])
        };
        if negative {
            format!("-{out}")
        } else {
            out
        }
    }

    /// Parses `p/q`, an integer, or a plain decimal literal (`0.25`, `-3`, `1e-3`)
    /// into its exact value.
    pub fn parse_exact(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.contains('/') {
            return text.parse();
        }
        parse_decimal(text)
    }
}

fn pow10(k: u64) -> BigUint {
    num_traits::pow(BigUint::from(10u32), k as usize)
}

/// Compares num/den against 10^exp.
fn cmp_scaled(num: &BigUint, den: &BigUint, exp: i64) -> Ordering {
    if exp >= 0 {
        num.cmp(&(den * pow10(exp as u64)))
    } else {
        (num * pow10((-exp) as u64)).cmp(den)
    }
}

/// round_half_even(num/den * 10^shift)
fn round_half_even_scaled(num: &BigUint, den: &BigUint, shift: i64) -> BigUint {
    let (n, d) = if shift >= 0 {
        (num * pow10(shift as u64), den.clone())
    } else {
        (num.clone(), den * pow10((-shift) as u64))
    };
    let (q, r) = n.div_rem(&d);
    let twice = &r << 1usize;
    match twice.cmp(&d) {
        Ordering::Less => q,
        Ordering::Greater => q + 1u32,
        Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1u32
            }
        }
    }
}

fn parse_decimal(text: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a decimal number: {text:?}"));
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (
            &text[..i],
            text[i + 1..].parse::<i64>().map_err(|_| bad())?,
        ),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigUint = format!("{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i64;
    let magnitude = if scale >= 0 {
        Ratio::from_integer(BigInt::from(all * pow10(scale as u64)))
    } else {
        Ratio::new(BigInt::from(all), BigInt::from(pow10((-scale) as u64)))
    };
    Ok(BigRational(if negative { -magnitude } else { magnitude }))
}

impl fmt::Display for BigRational {
    /// Canonical reduced form `p/q`; the denominator is always written.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for BigRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for BigRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational p/q: {s:?}"));
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let p: BigInt = p.parse().map_err(|_| bad())?;
        let q: BigInt = q.parse().map_err(|_| bad())?;
        if q.sign() == Sign::Minus {
            return Err(bad());
        }
        BigRational::new(p, q)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&BigRational> for &BigRational {
            type Output = BigRational;
            fn $method(self, rhs: &BigRational) -> BigRational {
                BigRational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait for BigRational {
            type Output = BigRational;
            fn $method(self, rhs: BigRational) -> BigRational {
                BigRational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&BigRational> for BigRational {
            type Output = BigRational;
            fn $method(self, rhs: &BigRational) -> BigRational {
                BigRational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for BigRational {
    type Output = BigRational;
    fn neg(self) -> BigRational {
        BigRational(-self.0)
    }
}

impl Neg for &BigRational {
    type Output = BigRational;
    fn neg(self) -> BigRational {
        BigRational(-&self.0)
    }
}

impl std::iter::Sum for BigRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(BigRational::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a BigRational> for BigRational {
    fn sum<I: Iterator<Item = &'a Self>>(iter: I) -> Self {
        iter.fold(BigRational::zero(), |acc, x| acc + x)
    }
}

impl From<i64> for BigRational {
    fn from(n: i64) -> Self {
        BigRational::from_integer(n)
    }
}

impl serde::Serialize for BigRational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for BigRational {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
