//! Exact Gaussian-rational scalars and rational-complex exponents.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// An element of ℚ(i), always kept in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    pub re: BigRational,
    pub im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Scalar { re, im: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn gaussian(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Scalar::new(
            BigRational::new(re_num.into(), re_den.into()),
            BigRational::new(im_num.into(), im_den.into()),
        )
    }

    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn i() -> Self {
        Scalar::new(BigRational::zero(), BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.im.is_zero() && self.re.is_one()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar::new(self.re.clone(), -self.im.clone())
    }

    /// |z|², exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.is_real() {
            return Some(Scalar::real(self.re.recip()));
        }
        let n = self.norm_sqr();
        Some(Scalar::new(&self.re / &n, -&self.im / &n))
    }

    pub fn checked_div(&self, other: &Scalar) -> Option<Self> {
        other.inv().map(|inv| self * &inv)
    }

    pub fn powi(&self, exp: i64) -> Option<Self> {
        if exp < 0 {
            return self.inv().map(|inv| inv.powi(-exp).expect("nonnegative power"));
        }
        let mut result = Scalar::one();
        let mut base = self.clone();
        let mut e = exp as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Some(result)
    }

    /// Approximate value of the real part, for display and convergence demos only.
    pub fn re_f64(&self) -> f64 {
        self.re.to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(vec![
            int_to_json(self.re.numer()),
            int_to_json(self.re.denom()),
            int_to_json(self.im.numer()),
            int_to_json(self.im.denom()),
        ])
    }

    /// Accepts the canonical quadruple, a bare integer, or a string such as `"3/2"`.
    pub fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Array(parts) if parts.len() == 4 => {
                let ints: Result<Vec<BigInt>> = parts.iter().map(json_to_int).collect();
                let ints = ints?;
                if ints[1].is_zero() || ints[3].is_zero() {
                    return Err(Error::Schema("zero denominator in scalar".into()));
                }
                Ok(Scalar::new(
                    BigRational::new(ints[0].clone(), ints[1].clone()),
                    BigRational::new(ints[2].clone(), ints[3].clone()),
                ))
            }
            Value::Array(parts) if parts.len() == 2 => {
                let n = json_to_int(&parts[0])?;
                let d = json_to_int(&parts[1])?;
                if d.is_zero() {
                    return Err(Error::Schema("zero denominator in scalar".into()));
                }
                Ok(Scalar::real(BigRational::new(n, d)))
            }
            Value::Number(_) => Ok(Scalar::real(BigRational::from_integer(json_to_int(v)?))),
            Value::String(s) => s.parse(),
            _ => Err(Error::Schema(format!("cannot read scalar from {v}"))),
        }
    }
}

pub(crate) fn int_to_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(small) => Value::from(small),
        None => Value::String(n.to_string()),
    }
}

pub(crate) fn json_to_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Schema(format!("expected integer, got {n}"))),
        Value::String(s) => s
            .trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Schema(format!("expected integer, got {s:?}"))),
        _ => Err(Error::Schema(format!("expected integer, got {v}"))),
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Parses `a`, `a/b`, `a/b i`, `a+b/c i` style literals (no spaces inside numbers).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Schema(format!("cannot parse scalar {s:?}"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(bad());
        }
        if !t.ends_with('i') {
            return parse_rational(&t).map(Scalar::real).ok_or_else(bad);
        }
        let body = &t[..t.len() - 1];
        // split at the last sign that is not the leading one
        let split = body
            .char_indices()
            .skip(1)
            .filter(|(_, c)| *c == '+' || *c == '-')
            .map(|(i, _)| i)
            .last();
        let (re_part, im_part) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im_part {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            other => parse_rational(other.trim_start_matches('+')).ok_or_else(bad)?,
        };
        let re = parse_rational(re_part).ok_or_else(bad)?;
        Ok(Scalar::new(re, im))
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rational(&self.re));
        }
        let im_abs = self.im.abs();
        let im_txt = if im_abs.is_one() {
            "i".to_string()
        } else {
            format!("{}i", fmt_rational(&im_abs))
        };
        if self.re.is_zero() {
            if self.im.is_negative() {
                write!(f, "-{im_txt}")
            } else {
                write!(f, "{im_txt}")
            }
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(f, "{}{}{}", fmt_rational(&self.re), sign, im_txt)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::real(r)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Scalar::real(&self.re * &rhs.re);
        }
        Scalar::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero scalar")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re, -self.im)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re.clone(), -self.im.clone())
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        if !rhs.im.is_zero() {
            self.im += &rhs.im;
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        if !rhs.im.is_zero() {
            self.im -= &rhs.im;
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        let mut acc = Scalar::zero();
        for x in iter {
            acc += &x;
        }
        acc
    }
}

impl Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        let mut acc = Scalar::one();
        for x in iter {
            acc *= &x;
        }
        acc
    }
}

/// Generalized binomial coefficient C(λ, n) = λ(λ−1)…(λ−n+1)/n!.
pub fn binomial(lambda: &Scalar, n: u64) -> Scalar {
    let mut acc = Scalar::one();
    for i in 0..n {
        let factor = lambda - &Scalar::from_int(i as i64);
        acc = &acc * &factor;
        acc = &acc / &Scalar::from_int(i as i64 + 1);
    }
    acc
}

/// Integer binomial C(n, k) for any integer n and k ≥ 0.
pub fn binomial_int(n: i64, k: u64) -> Scalar {
    if n >= 0 && k > n as u64 {
        return Scalar::zero();
    }
    // C(n, k) = (−1)^k C(k − n − 1, k) for n < 0
    let (top, negate) = if n < 0 { (k as i128 - n as i128 - 1, k % 2 == 1) } else { (n as i128, false) };
    let mut acc: i128 = 1;
    let mut big: Option<BigInt> = None;
    for i in 0..k as i128 {
        match &mut big {
            None => match acc.checked_mul(top - i) {
                Some(x) => acc = x / (i + 1),
                None => {
                    big = Some(BigInt::from(acc) * BigInt::from(top - i) / BigInt::from(i + 1));
                }
            },
            Some(b) => *b = &*b * BigInt::from(top - i) / BigInt::from(i + 1),
        }
    }
    let v = big.unwrap_or_else(|| BigInt::from(acc));
    let s = Scalar::real(BigRational::from_integer(v));
    if negate {
        -s
    } else {
        s
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Exponent of a formal variable: a rational-complex number. Ordering compares
/// the real part first, then the imaginary part.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponent {
    pub re: Rational64,
    pub im: Rational64,
}

impl Exponent {
    pub const ZERO: Exponent = Exponent {
        re: Rational64::new_raw(0, 1),
        im: Rational64::new_raw(0, 1),
    };

    pub fn int(n: i64) -> Self {
        Exponent { re: Rational64::from_integer(n), im: Rational64::zero() }
    }

    pub fn frac(num: i64, den: i64) -> Self {
        Exponent { re: Rational64::new(num, den), im: Rational64::zero() }
    }

    pub fn new(re: Rational64, im: Rational64) -> Self {
        Exponent { re, im }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.im.is_zero() && self.re.is_integer()
    }

    pub fn as_integer(&self) -> Option<i64> {
        if self.is_integer() {
            Some(self.re.to_integer())
        } else {
            None
        }
    }

    /// True when `self − other` is an integer (same class in ℂ/ℤ).
    pub fn congruent(&self, other: &Exponent) -> bool {
        (*self - *other).is_integer()
    }

    /// Canonical representative of the class of `self` modulo ℤ, with real part in [0, 1).
    pub fn mod_integers(&self) -> Exponent {
        let fl = self.re.floor();
        Exponent { re: self.re - fl, im: self.im }
    }

    pub fn to_scalar(&self) -> Scalar {
        Scalar::new(
            BigRational::new((*self.re.numer()).into(), (*self.re.denom()).into()),
            BigRational::new((*self.im.numer()).into(), (*self.im.denom()).into()),
        )
    }

    pub fn from_scalar(s: &Scalar) -> Result<Self> {
        let conv = |r: &BigRational| -> Result<Rational64> {
            match (r.numer().to_i64(), r.denom().to_i64()) {
                (Some(n), Some(d)) => Ok(Rational64::new(n, d)),
                _ => Err(Error::Schema(format!("exponent {r} out of range"))),
            }
        };
        Ok(Exponent { re: conv(&s.re)?, im: conv(&s.im)? })
    }

    pub fn to_json(&self) -> Value {
        self.to_scalar().to_json()
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        Exponent::from_scalar(&Scalar::from_json(v)?)
    }

    /// Compares real parts only (window semantics).
    pub fn cmp_re(&self, other: &Exponent) -> Ordering {
        self.re.cmp(&other.re)
    }
}

impl Default for Exponent {
    fn default() -> Self {
        Exponent::ZERO
    }
}

impl Add for Exponent {
    type Output = Exponent;
    fn add(self, rhs: Exponent) -> Exponent {
        Exponent { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for Exponent {
    type Output = Exponent;
    fn sub(self, rhs: Exponent) -> Exponent {
        Exponent { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Neg for Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        Exponent { re: -self.re, im: -self.im }
    }
}

impl From<i64> for Exponent {
    fn from(n: i64) -> Self {
        Exponent::int(n)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_scalar())
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub(crate) fn rational_floor(r: &Rational64) -> i64 {
    r.floor().to_integer()
}

pub(crate) fn rational_ceil(r: &Rational64) -> i64 {
    r.ceil().to_integer()
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_exact() {
        let a = Scalar::from_frac(1, 3);
        let b = Scalar::from_frac(1, 6);
        assert_eq!(&a + &b, Scalar::from_frac(1, 2));
        let z = Scalar::gaussian(1, 1, 1, 1);
        assert_eq!(&z * &z.conj(), Scalar::from_int(2));
        assert_eq!(&z / &z, Scalar::one());
        assert_eq!(z.powi(-2).unwrap(), (&z * &z).inv().unwrap());
    }

    #[test]
    fn binomial_of_half() {
        // C(1/2, 2) = (1/2)(-1/2)/2 = -1/8
        assert_eq!(binomial(&Scalar::from_frac(1, 2), 2), Scalar::from_frac(-1, 8));
        for n in 0..6 {
            let expected = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(binomial_int(-1, n), Scalar::from_int(expected));
        }
        assert_eq!(binomial_int(5, 7), Scalar::zero());
    }

    #[test]
    fn parse_and_display() {
        for text in ["3", "-2/3", "i", "-i", "1+2i", "1/2-3/4i", "-5/2i"] {
            let s: Scalar = text.parse().unwrap();
            assert_eq!(s.to_string(), text);
        }
        let s: Scalar = "2/4".parse().unwrap();
        assert_eq!(s, Scalar::from_frac(1, 2));
    }

    #[test]
    fn json_round_trip() {
        let s = Scalar::gaussian(-7, 3, 5, 2);
        assert_eq!(Scalar::from_json(&s.to_json()).unwrap(), s);
        let e = Exponent::frac(-3, 2);
        assert_eq!(Exponent::from_json(&e.to_json()).unwrap(), e);
    }

    #[test]
    fn exponent_classes() {
        let a = Exponent::frac(5, 2);
        assert_eq!(a.mod_integers(), Exponent::frac(1, 2));
        assert!(a.congruent(&Exponent::frac(-1, 2)));
        assert!(!a.congruent(&Exponent::int(1)));
        assert_eq!(Exponent::frac(-1, 2).mod_integers(), Exponent::frac(1, 2));
    }
}
