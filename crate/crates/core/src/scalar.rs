//! Scalar backends shared by the series, measure and oracle code.
//!
//! Three backends implement [`Scalar`]:
//!
//! * `f64` for large truncation orders,
//! * [`BigRational`] for exact arithmetic with rational weights,
//! * [`Surd`], exact arithmetic in the field generated by square roots of
//!   integers. Weights such as `m^{-1/2}` live here, which keeps the oracle
//!   comparisons exact for half-integer polylog exponents.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Which arithmetic a scalar type performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalarKind {
    Exact,
    Double,
}

pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const KIND: ScalarKind;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// `None` when `rhs` is zero.
    fn checked_div(&self, rhs: &Self) -> Option<Self>;
    fn to_f64(&self) -> f64;
    /// Conversion from an exact value; `None` if the backend cannot hold it.
    fn from_exact(x: &Surd) -> Option<Self>;
    /// Conversion from a floating value; `None` for exact backends.
    fn from_approx(x: f64) -> Option<Self>;

    fn from_int(k: i64) -> Self {
        Self::from_ratio(k, 1)
    }

    fn div_int(&self, k: i64) -> Self {
        self.clone() * Self::from_ratio(1, k)
    }
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Double;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        (*rhs != 0.0).then(|| self / rhs)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_exact(x: &Surd) -> Option<Self> {
        Some(x.to_f64())
    }
    fn from_approx(x: f64) -> Option<Self> {
        Some(x)
    }
    fn div_int(&self, k: i64) -> Self {
        self / k as f64
    }
}

impl Scalar for BigRational {
    const KIND: ScalarKind = ScalarKind::Exact;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        (!Zero::is_zero(rhs)).then(|| self / rhs)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_exact(x: &Surd) -> Option<Self> {
        x.as_rational()
    }
    fn from_approx(_: f64) -> Option<Self> {
        None
    }
    fn div_int(&self, k: i64) -> Self {
        self / BigInt::from(k)
    }
}

/// A finite sum `Σ q_s √s` with rational `q_s` and distinct squarefree `s`.
///
/// Canonical form: no zero coefficients, so derived equality is field
/// equality.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Surd {
    terms: BTreeMap<u64, BigRational>,
}

impl Surd {
    pub fn rational(q: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !Zero::is_zero(&q) {
            terms.insert(1, q);
        }
        Surd { terms }
    }

    /// Exact `√n`.
    pub fn sqrt_int(n: u64) -> Self {
        if n == 0 {
            return Surd::default();
        }
        let (outer, radicand) = split_square(n);
        let mut terms = BTreeMap::new();
        terms.insert(radicand, BigRational::from_integer(BigInt::from(outer)));
        Surd { terms }
    }

    /// Exact `m^(p/2)` for integer `p`; `m` must be positive.
    pub fn pow_half(m: u64, p: i64) -> Self {
        assert!(m > 0, "pow_half needs a positive base");
        let whole = BigRational::from_integer(BigInt::from(m)).pow((p.div_euclid(2)) as i32);
        let base = Surd::rational(whole);
        if p.rem_euclid(2) == 1 {
            base * Surd::sqrt_int(m)
        } else {
            base
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(Zero::zero()),
            1 => self.terms.get(&1).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    fn insert_add(&mut self, key: u64, q: BigRational) {
        if Zero::is_zero(&q) {
            return;
        }
        let remove = match self.terms.get_mut(&key) {
            Some(c) => {
                *c += q;
                Zero::is_zero(c)
            }
            None => {
                self.terms.insert(key, q);
                false
            }
        };
        if remove {
            self.terms.remove(&key);
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if Zero::is_zero(q) {
            return Surd::default();
        }
        Surd {
            terms: self.terms.iter().map(|(k, v)| (*k, v * q)).collect(),
        }
    }

    /// Multiplicative inverse by successive conjugation over the largest
    /// prime appearing in any radicand.
    pub fn recip(&self) -> Option<Self> {
        if self.terms.is_empty() {
            return None;
        }
        if let Some(q) = self.as_rational() {
            return Some(Surd::rational(q.recip()));
        }
        let p = self
            .terms
            .keys()
            .map(|&k| largest_prime_factor(k))
            .max()
            .unwrap_or(1);
        // x = a + b√p, conj = a − b√p, x·conj = a² − p·b² has no √p.
        let mut conj = Surd::default();
        for (&k, v) in &self.terms {
            if k % p == 0 {
                conj.insert_add(k, -v.clone());
            } else {
                conj.insert_add(k, v.clone());
            }
        }
        let norm = self.clone() * conj.clone();
        debug_assert!(norm.terms.keys().all(|k| k % p != 0));
        norm.recip().map(|inv| conj * inv)
    }
}

/// `n = outer² · radicand` with squarefree radicand.
fn split_square(mut n: u64) -> (u64, u64) {
    let mut outer = 1;
    let mut radicand = 1;
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        outer *= d.pow(e / 2);
        if e % 2 == 1 {
            radicand *= d;
        }
        d += 1;
    }
    radicand *= n;
    (outer, radicand)
}

fn largest_prime_factor(mut n: u64) -> u64 {
    let mut largest = 1;
    let mut d = 2;
    while d * d <= n {
        while n.is_multiple_of(d) {
            largest = d;
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        largest = n;
    }
    largest
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, v)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *k == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}*sqrt({k})")?;
            }
        }
        Ok(())
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(mut self, rhs: Surd) -> Surd {
        for (k, v) in rhs.terms {
            self.insert_add(k, v);
        }
        self
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, rhs: Surd) -> Surd {
        self + (-rhs)
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            terms: self.terms.into_iter().map(|(k, v)| (k, -v)).collect(),
        }
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        if let Some(q) = rhs.as_rational() {
            return self.scale(&q);
        }
        if let Some(q) = self.as_rational() {
            return rhs.scale(&q);
        }
        let mut out = Surd::default();
        for (&a, x) in &self.terms {
            for (&b, y) in &rhs.terms {
                // √a·√b = g·√((a/g)(b/g)) with g = gcd(a, b)
                let g = a.gcd(&b);
                let key = (a / g) * (b / g);
                out.insert_add(key, x * y * BigInt::from(g));
            }
        }
        out
    }
}

impl Scalar for Surd {
    const KIND: ScalarKind = ScalarKind::Exact;

    fn zero() -> Self {
        Surd::default()
    }
    fn one() -> Self {
        Surd::rational(One::one())
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Surd::rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        rhs.recip().map(|inv| self.clone() * inv)
    }
    fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(k, v)| ToPrimitive::to_f64(v).unwrap_or(f64::NAN) * (*k as f64).sqrt())
            .sum()
    }
    fn from_exact(x: &Surd) -> Option<Self> {
        Some(x.clone())
    }
    fn from_approx(_: f64) -> Option<Self> {
        None
    }
    fn div_int(&self, k: i64) -> Self {
        self.scale(&BigRational::new(One::one(), BigInt::from(k)))
    }
}

impl Surd {
    /// Sign test; irrational values are decided from their float estimate.
    pub fn is_nonnegative(&self) -> bool {
        if let Some(q) = self.as_rational() {
            return !q.is_negative();
        }
        self.to_f64() >= 0.0
    }
}

/// Exact rational from a decimal or fraction literal such as `"0.25"`,
/// `"-3"`, `"1/2"` or `"1e-3"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() || s.len() > 64 {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if Zero::is_zero(&den) {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    if exponent.abs() > 400 {
        return None;
    }
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(all.parse::<BigInt>().ok()?);
    let shift = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    value *= ten.pow(shift);
    Some(if negative { -value } else { value })
}
