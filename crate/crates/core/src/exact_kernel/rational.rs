use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};

/// Exact rational number in lowest terms with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(domain("zero denominator"));
        }
        Ok(Self(BigRational::new(num.into(), den)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    /// Caller guarantees `gcd(num, den) = 1` and `den > 0`.
    pub(crate) fn from_reduced(num: BigInt, den: BigInt) -> Self {
        debug_assert!(den.is_positive());
        Self(BigRational::new_raw(num, den))
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

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(domain("reciprocal of zero"));
        }
        Ok(Self(self.0.recip()))
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn fract(&self) -> Self {
        Self(self.0.fract())
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    /// Nearest `f64`, accurate to a couple of ulps for any magnitude.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let sign = if self.numer().is_negative() { -1.0 } else { 1.0 };
        let (q, shift) = scaled_quotient(self.numer().magnitude(), self.denom().magnitude());
        sign * ldexp(q.to_f64().unwrap_or(f64::INFINITY), -shift)
    }

    /// Natural logarithm split as `twos * ln 2 + rest` with `|rest| < ln 2`.
    ///
    /// Powers of two come out with `rest == 0.0` exactly.
    pub fn ln_parts(&self) -> Result<(i64, f64)> {
        if !self.is_positive() {
            return Err(domain("logarithm of a non-positive rational"));
        }
        let (q, shift) = scaled_quotient(self.numer().magnitude(), self.denom().magnitude());
        let e = q.bits() as i64 - 1;
        let mant = ldexp(q.to_f64().unwrap_or(f64::INFINITY), -e);
        Ok((e - shift, mant.ln()))
    }

    pub fn ln(&self) -> Result<f64> {
        let (twos, rest) = self.ln_parts()?;
        Ok(twos as f64 * std::f64::consts::LN_2 + rest)
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64(x: f64) -> Result<Self> {
        BigRational::from_float(x)
            .map(Self)
            .ok_or_else(|| domain(format!("{x} is not finite")))
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        if e < 0 && self.is_zero() {
            return Err(domain("negative power of zero"));
        }
        Ok(Self(num_traits::Pow::pow(&self.0, e)))
    }
}

/// Returns `(q, k)` with `a / b ≈ q * 2^-k` and `q` holding 65 or 66 bits.
fn scaled_quotient(a: &BigUint, b: &BigUint) -> (BigUint, i64) {
    let k = 65 + b.bits() as i64 - a.bits() as i64;
    let q = if k >= 0 {
        (a << (k as u64)) / b
    } else {
        a / (b << ((-k) as u64))
    };
    (q, k)
}

pub(crate) fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            BigInt::from_str(t.trim()).map_err(|_| domain(format!("cannot parse rational {s:?}")))
        };
        match s.split_once('/') {
            Some((p, q)) => Rational::new(parse(p)?, parse(q)?),
            None => Ok(Rational::from_integer(parse(s)?)),
        }
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Self(r)
    }
}

impl From<Rational> for BigRational {
    fn from(r: Rational) -> Self {
        r.0
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl serde::Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational((self.0).$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$m(&rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                Rational((self.0).$m(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

/// Division panics on a zero divisor, like the integer types; use
/// [`Rational::recip`] for a checked variant.
impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        Rational(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

/// Small non-negative fraction with machine-word parts; the endpoint type
/// of Stern–Brocot intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub const ZERO: Fraction = Fraction { num: 0, den: 1 };
    pub const ONE: Fraction = Fraction { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(domain("zero denominator"));
        }
        let g = num.gcd(&den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn mediant(self, other: Fraction) -> Result<Fraction> {
        Ok(Fraction {
            num: self.num.checked_add(other.num).ok_or(Error::Overflow)?,
            den: self.den.checked_add(other.den).ok_or(Error::Overflow)?,
        })
    }

    pub fn to_rational(self) -> Rational {
        Rational::from_reduced(BigInt::from(self.num), BigInt::from(self.den))
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Cross determinant `other.num * self.den - self.num * other.den`.
    pub fn cross(self, other: Fraction) -> i128 {
        other.num as i128 * self.den as i128 - self.num as i128 * other.den as i128
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl From<Fraction> for Rational {
    fn from(f: Fraction) -> Self {
        f.to_rational()
    }
}

impl TryFrom<&Rational> for Fraction {
    type Error = Error;

    fn try_from(r: &Rational) -> Result<Self> {
        if r.numer().sign() == Sign::Minus {
            return Err(domain("negative value has no Fraction form"));
        }
        Ok(Fraction {
            num: r.numer().to_u64().ok_or(Error::Overflow)?,
            den: r.denom().to_u64().ok_or(Error::Overflow)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic_is_exact_and_reduced() {
        let sum = r("1/2") + r("1/3") + r("3/10") + r("39/140");
        assert_eq!(sum.to_string(), "593/420");
        assert_eq!((r("2/4") * r("2")).to_string(), "1/1");
        assert!(r("1/3") < r("2/5"));
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["0/1", "-7/3", "39/140", "123456789012345678901234567891/2"] {
            assert_eq!(r(s).to_string(), s);
        }
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn to_f64_handles_huge_parts() {
        let big = BigInt::from(3u8).pow(2000);
        let x = Rational::new(big.clone(), big * 7).unwrap();
        assert_eq!(x.to_f64(), 1.0 / 7.0);
        assert_eq!(r("39/140").to_f64(), 39.0 / 140.0);
        assert_eq!(r("-1/3").to_f64(), -1.0 / 3.0);
    }

    #[test]
    fn ln_parts_are_exact_on_powers_of_two() {
        assert_eq!(r("1").ln_parts().unwrap(), (0, 0.0));
        assert_eq!(r("32").ln_parts().unwrap(), (5, 0.0));
        assert_eq!(r("1/1024").ln_parts().unwrap(), (-10, 0.0));
        let v = r("3/10").ln().unwrap();
        assert!((v - 0.3f64.ln()).abs() < 1e-15);
        assert!(r("0").ln_parts().is_err());
    }

    #[test]
    fn fraction_order_and_cross() {
        let a = Fraction::new(1, 3).unwrap();
        let b = Fraction::new(1, 2).unwrap();
        assert!(a < b);
        assert_eq!(a.cross(b), 1);
        assert_eq!(Fraction::new(2, 4).unwrap(), b);
    }
}
