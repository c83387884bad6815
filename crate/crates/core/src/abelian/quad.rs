//! Exact arithmetic in `Q(√2)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// `a + b√2` with rational `a`, `b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct QuadField {
    a: BigRational,
    b: BigRational,
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

impl QuadField {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QuadField { a, b }
    }

    pub fn zero() -> Self {
        QuadField::default()
    }

    pub fn one() -> Self {
        QuadField::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        QuadField { a: BigRational::from_integer(n.into()), b: BigRational::zero() }
    }

    pub fn from_rational(a: BigRational) -> Self {
        QuadField { a, b: BigRational::zero() }
    }

    pub fn sqrt2() -> Self {
        QuadField { a: BigRational::zero(), b: BigRational::one() }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        QuadField { a: &self.a * r, b: &self.b * r }
    }

    /// Exact sign of `a + b√2`, comparing `a^2` with `2 b^2` when the two
    /// parts have opposite signs.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        match (sa, sb) {
            (s, Ordering::Equal) => s,
            (Ordering::Equal, s) => s,
            (x, y) if x == y => x,
            (sa, _) => {
                let a2 = &self.a * &self.a;
                let b2 = &self.b * &self.b * BigRational::from_integer(2.into());
                match a2.cmp(&b2) {
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    /// `1 / (a + b√2) = (a - b√2) / (a^2 - 2b^2)`.
    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Degenerate("division by zero in Q(√2)".into()));
        }
        let n = &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(2.into());
        Ok(QuadField { a: &self.a / &n, b: -&self.b / &n })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.recip()?)
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        let est = self.to_f64();
        let mut n = if est.is_finite() {
            BigInt::from(est.floor() as i128)
        } else {
            self.a.floor().to_integer()
        };
        while QuadField::from_rational(BigRational::from_integer(n.clone())) > *self {
            n -= 1;
        }
        while QuadField::from_rational(BigRational::from_integer(&n + 1)) <= *self {
            n += 1;
        }
        n
    }
}

impl Ord for QuadField {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl PartialOrd for QuadField {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a QuadField> for &'a QuadField {
    type Output = QuadField;
    fn add(self, o: &QuadField) -> QuadField {
        QuadField { a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl<'a> Sub<&'a QuadField> for &'a QuadField {
    type Output = QuadField;
    fn sub(self, o: &QuadField) -> QuadField {
        QuadField { a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl<'a> Mul<&'a QuadField> for &'a QuadField {
    type Output = QuadField;
    fn mul(self, o: &QuadField) -> QuadField {
        let two = BigRational::from_integer(2.into());
        QuadField { a: &self.a * &o.a + &self.b * &o.b * two, b: &self.a * &o.b + &self.b * &o.a }
    }
}

impl Neg for &QuadField {
    type Output = QuadField;
    fn neg(self) -> QuadField {
        QuadField { a: -&self.a, b: -&self.b }
    }
}

impl Add for QuadField {
    type Output = QuadField;
    fn add(self, o: QuadField) -> QuadField {
        &self + &o
    }
}

impl Sub for QuadField {
    type Output = QuadField;
    fn sub(self, o: QuadField) -> QuadField {
        &self - &o
    }
}

impl Mul for QuadField {
    type Output = QuadField;
    fn mul(self, o: QuadField) -> QuadField {
        &self * &o
    }
}

impl Neg for QuadField {
    type Output = QuadField;
    fn neg(self) -> QuadField {
        -&self
    }
}

/// `v · x` for an integer vector `x`.
pub fn dot(v: &[QuadField], x: &[i64]) -> QuadField {
    let mut a = BigRational::zero();
    let mut b = BigRational::zero();
    for (c, &n) in v.iter().zip(x) {
        if n != 0 {
            let n = BigRational::from_integer(n.into());
            a += &c.a * &n;
            b += &c.b * &n;
        }
    }
    QuadField { a, b }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let irr = |b: &BigRational| {
            if b.is_one() {
                "r2".to_string()
            } else {
                format!("{}*r2", fmt_rational(b))
            }
        };
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.a)),
            (true, false) if self.b.is_negative() => write!(f, "-{}", irr(&-&self.b)),
            (true, false) => write!(f, "{}", irr(&self.b)),
            (false, false) if self.b.is_negative() => write!(f, "{}-{}", fmt_rational(&self.a), irr(&-&self.b)),
            (false, false) => write!(f, "{}+{}", fmt_rational(&self.a), irr(&self.b)),
        }
    }
}

fn parse_rational(s: &str, pos: usize) -> Result<BigRational> {
    let bad = || Error::parse(pos, format!("bad rational `{}`", s));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let p: BigInt = p.trim().parse().map_err(|_| bad())?;
    let q: BigInt = q.trim().parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(Error::parse(pos, "zero denominator"));
    }
    Ok(BigRational::new(p, q))
}

/// Parses sums of terms `p/q`, `p/q*r2` and `r2`, e.g. `1-3/2*r2`.
impl FromStr for QuadField {
    type Err = Error;

    fn from_str(s: &str) -> Result<QuadField> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::parse(0, "empty number"));
        }
        let mut out = QuadField::zero();
        let bytes = s.as_bytes();
        let mut start = 0;
        let mut i = 1;
        let mut terms = Vec::new();
        while i <= bytes.len() {
            // a sign starts a new term unless it follows '/' or '*'
            if i == bytes.len() || ((bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'/' | b'*')) {
                terms.push((start, &s[start..i]));
                start = i;
            }
            i += 1;
        }
        for (pos, term) in terms {
            let t = term.trim();
            let (neg, body) = match t.as_bytes().first() {
                Some(b'-') => (true, t[1..].trim()),
                Some(b'+') => (false, t[1..].trim()),
                _ => (false, t),
            };
            let (coef, irr) = if body == "r2" {
                (BigRational::one(), true)
            } else if let Some(c) = body.strip_suffix("*r2") {
                (parse_rational(c, pos)?, true)
            } else {
                (parse_rational(body, pos)?, false)
            };
            let coef = if neg { -coef } else { coef };
            if irr {
                out.b += coef;
            } else {
                out.a += coef;
            }
        }
        Ok(out)
    }
}

impl Serialize for QuadField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QuadField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Convergents `p/q` of the continued fraction of `√2`: 1, 3/2, 7/5, ...
pub fn sqrt2_convergent(depth: usize) -> BigRational {
    let (mut p, mut q) = (BigInt::one(), BigInt::one());
    for _ in 0..depth {
        let np = &p + &q * 2;
        let nq = &p + &q;
        p = np;
        q = nq;
    }
    BigRational::new(p, q)
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a, I: IntoIterator<Item = &'a BigRational>>(items: I) -> BigInt {
    items.into_iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}
