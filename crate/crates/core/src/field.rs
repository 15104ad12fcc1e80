//! Exact arithmetic in ℚ(√2) and ℚ(√2, i).
//!
//! Every coefficient produced by 50/50 beam splitters with an `i` phase on
//! reflection lives in ℚ(√2, i), so amplitudes are stored as four exact
//! rationals and compared bit-for-bit. Probabilities are the real subfield
//! ℚ(√2).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("malformed rational {0:?}: expected \"p/q\"")]
    MalformedRational(String),
}

/// Builds the rational `numer / denom`. Panics on a zero denominator.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Renders a rational as `"p/q"`, always with an explicit denominator.
pub fn rational_to_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_rational(s: &str) -> Result<BigRational, FieldError> {
    let bad = || FieldError::MalformedRational(s.to_string());
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    // BigRational is kept reduced, so a square root exists iff both parts are squares.
    let p = r.numer().sqrt();
    let q = r.denom().sqrt();
    if &(&p * &p) == r.numer() && &(&q * &q) == r.denom() {
        Some(BigRational::new(p, q))
    } else {
        None
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A real number `rational + irrational·√2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Real {
    rational: BigRational,
    irrational: BigRational,
}

impl Real {
    pub fn new(rational: BigRational, irrational: BigRational) -> Self {
        Self {
            rational,
            irrational,
        }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self::new(r, BigRational::zero())
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::from_rational(ratio(numer, denom))
    }

    pub fn sqrt2() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    /// `1/√2 = (1/2)·√2`
    pub fn frac_1_sqrt2() -> Self {
        Self::new(BigRational::zero(), ratio(1, 2))
    }

    /// Rational part.
    pub fn rational(&self) -> &BigRational {
        &self.rational
    }

    /// Coefficient of √2.
    pub fn irrational(&self) -> &BigRational {
        &self.irrational
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.irrational.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.rational.is_one() && self.irrational.is_zero()
    }

    /// Exact sign, decided without floating point.
    pub fn signum(&self) -> Ordering {
        let a = &self.rational;
        let b = &self.irrational;
        let sa = a.cmp(&BigRational::zero());
        let sb = b.cmp(&BigRational::zero());
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (s, t) if s == t => s,
            // opposite signs: compare a² with 2b²
            (s, _) => {
                let a2 = a * a;
                let b2 = b * b * ratio(2, 1);
                match a2.cmp(&b2) {
                    Ordering::Greater => s,
                    Ordering::Less => s.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    /// Galois conjugate `a − b√2`.
    fn galois(&self) -> Self {
        Self::new(self.rational.clone(), -self.irrational.clone())
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        // (a + b√2)(a − b√2) = a² − 2b², nonzero because √2 is irrational
        let norm =
            &self.rational * &self.rational - &self.irrational * &self.irrational * ratio(2, 1);
        let g = self.galois();
        Ok(Self::new(g.rational / &norm, g.irrational / &norm))
    }

    pub fn checked_div(&self, rhs: &Real) -> Result<Self, FieldError> {
        Ok(self * &rhs.inv()?)
    }

    /// Non-negative square root, if it lies in ℚ(√2).
    pub fn sqrt(&self) -> Option<Self> {
        if self.signum() == Ordering::Less {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let x = &self.rational;
        let y = &self.irrational;
        let candidate = if y.is_zero() {
            if let Some(s) = rational_sqrt(x) {
                Some(Self::from_rational(s))
            } else {
                rational_sqrt(&(x / ratio(2, 1))).map(|t| Self::new(BigRational::zero(), t))
            }
        } else {
            // (s + t√2)² = x + y√2  ⇔  s² + 2t² = x, 2st = y
            let disc = rational_sqrt(&(x * x - y * y * ratio(2, 1)))?;
            [(x + &disc) / ratio(2, 1), (x - &disc) / ratio(2, 1)]
                .iter()
                .filter(|s2| s2.is_positive())
                .find_map(rational_sqrt)
                .map(|s| {
                    let t = y / (&s * ratio(2, 1));
                    Self::new(s, t)
                })
        }?;
        let root = if candidate.signum() == Ordering::Less {
            -candidate
        } else {
            candidate
        };
        (&root * &root == *self).then_some(root)
    }

    pub fn to_f64(&self) -> f64 {
        self.rational.to_f64().unwrap_or(f64::NAN)
            + self.irrational.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }

    fn parts(&self) -> Vec<(BigRational, &'static str)> {
        let mut parts = Vec::new();
        if !self.rational.is_zero() {
            parts.push((self.rational.clone(), ""));
        }
        if !self.irrational.is_zero() {
            parts.push((self.irrational.clone(), "√2"));
        }
        parts
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

/// Joins signed `(coefficient, unit)` parts into `"1/2 - 1/4·√2·i"` style text.
fn write_parts(f: &mut fmt::Formatter<'_>, parts: &[(BigRational, String)]) -> fmt::Result {
    if parts.is_empty() {
        return write!(f, "0");
    }
    for (k, (coeff, unit)) in parts.iter().enumerate() {
        let mag = coeff.abs();
        if k == 0 {
            if coeff.is_negative() {
                write!(f, "-")?;
            }
        } else if coeff.is_negative() {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        if unit.is_empty() {
            write!(f, "{}", fmt_rational(&mag))?;
        } else if mag.is_one() {
            write!(f, "{unit}")?;
        } else {
            write!(f, "{}·{unit}", fmt_rational(&mag))?;
        }
    }
    Ok(())
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self
            .parts()
            .into_iter()
            .map(|(c, u)| (c, u.to_string()))
            .collect();
        write_parts(f, &parts)
    }
}

/// An element `(a + b√2) + (c + d√2)·i` of ℚ(√2, i).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Amplitude {
    re: Real,
    im: Real,
}

impl Amplitude {
    pub fn new(re: Real, im: Real) -> Self {
        Self { re, im }
    }

    /// From the four rational coordinates `a + b√2 + (c + d√2)i`.
    pub fn from_coords(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        Self::new(Real::new(a, b), Real::new(c, d))
    }

    pub fn zero() -> Self {
        Self::from_real(Real::zero())
    }

    pub fn one() -> Self {
        Self::from_real(Real::one())
    }

    pub fn i() -> Self {
        Self::new(Real::zero(), Real::one())
    }

    pub fn from_real(re: Real) -> Self {
        Self::new(re, Real::zero())
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::from_real(Real::from_ratio(numer, denom))
    }

    /// `1/√2`
    pub fn frac_1_sqrt2() -> Self {
        Self::from_real(Real::frac_1_sqrt2())
    }

    pub fn re(&self) -> &Real {
        &self.re
    }

    pub fn im(&self) -> &Real {
        &self.im
    }

    pub fn a(&self) -> &BigRational {
        self.re.rational()
    }

    pub fn b(&self) -> &BigRational {
        self.re.irrational()
    }

    pub fn c(&self) -> &BigRational {
        self.im.rational()
    }

    pub fn d(&self) -> &BigRational {
        self.im.irrational()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    /// `|z|²`, exact and real.
    pub fn norm_sqr(&self) -> Real {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, k: &Real) -> Self {
        Self::new(&self.re * k, &self.im * k)
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        let n = self.norm_sqr().inv()?;
        Ok(self.conj().scale(&n))
    }

    pub fn checked_div(&self, rhs: &Amplitude) -> Result<Self, FieldError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for Amplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(BigRational, String)> = self
            .re
            .parts()
            .into_iter()
            .map(|(c, u)| (c, u.to_string()))
            .collect();
        for (c, u) in self.im.parts() {
            let unit = if u.is_empty() {
                "i".to_string()
            } else {
                format!("{u}·i")
            };
            parts.push((c, unit));
        }
        write_parts(f, &parts)
    }
}

macro_rules! forward_binop {
    ($t:ty, $tr:ident, $m:ident) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, rhs: &$t) -> $t {
                (&self).$m(rhs)
            }
        }
        impl $tr<$t> for &$t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                self.$m(&rhs)
            }
        }
    };
}

impl Add<&Real> for &Real {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        Real::new(
            &self.rational + &rhs.rational,
            &self.irrational + &rhs.irrational,
        )
    }
}

impl Sub<&Real> for &Real {
    type Output = Real;
    fn sub(self, rhs: &Real) -> Real {
        Real::new(
            &self.rational - &rhs.rational,
            &self.irrational - &rhs.irrational,
        )
    }
}

impl Mul<&Real> for &Real {
    type Output = Real;
    fn mul(self, rhs: &Real) -> Real {
        let (a, b) = (&self.rational, &self.irrational);
        let (c, d) = (&rhs.rational, &rhs.irrational);
        Real::new(a * c + b * d * ratio(2, 1), a * d + b * c)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::new(-self.rational.clone(), -self.irrational.clone())
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

forward_binop!(Real, Add, add);
forward_binop!(Real, Sub, sub);
forward_binop!(Real, Mul, mul);

impl Add<&Amplitude> for &Amplitude {
    type Output = Amplitude;
    fn add(self, rhs: &Amplitude) -> Amplitude {
        Amplitude::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&Amplitude> for &Amplitude {
    type Output = Amplitude;
    fn sub(self, rhs: &Amplitude) -> Amplitude {
        Amplitude::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&Amplitude> for &Amplitude {
    type Output = Amplitude;
    fn mul(self, rhs: &Amplitude) -> Amplitude {
        Amplitude::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &Amplitude {
    type Output = Amplitude;
    fn neg(self) -> Amplitude {
        Amplitude::new(-&self.re, -&self.im)
    }
}

impl Neg for Amplitude {
    type Output = Amplitude;
    fn neg(self) -> Amplitude {
        -&self
    }
}

forward_binop!(Amplitude, Add, add);
forward_binop!(Amplitude, Sub, sub);
forward_binop!(Amplitude, Mul, mul);
