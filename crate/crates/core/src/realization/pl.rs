//! Exact piecewise-linear homeomorphisms of the line.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// An increasing PL bijection of `R`: linear between consecutive
/// breakpoints, affine with the given slopes beyond the outer ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLHomeo {
    points: Vec<(BigRational, BigRational)>,
    left_slope: BigRational,
    right_slope: BigRational,
}

pub(crate) fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl PLHomeo {
    pub fn identity() -> PLHomeo {
        PLHomeo { points: vec![(q(0), q(0))], left_slope: q(1), right_slope: q(1) }
    }

    pub fn translation(by: BigRational) -> PLHomeo {
        PLHomeo { points: vec![(q(0), by)], left_slope: q(1), right_slope: q(1) }
    }

    /// Interpolates the given points; they are sorted by `x` first.
    pub fn new(
        mut points: Vec<(BigRational, BigRational)>,
        left_slope: BigRational,
        right_slope: BigRational,
    ) -> Result<PLHomeo> {
        if points.is_empty() {
            return Err(Error::Degenerate("a PL map needs at least one breakpoint".into()));
        }
        if !left_slope.is_positive() || !right_slope.is_positive() {
            return Err(Error::Degenerate("tail slopes must be positive".into()));
        }
        points.sort_by(|a, b| a.0.cmp(&b.0));
        for w in points.windows(2) {
            if w[0].0 == w[1].0 || w[0].1 >= w[1].1 {
                return Err(Error::Degenerate(format!(
                    "breakpoints ({}, {}) and ({}, {}) do not define an increasing map",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        Ok(PLHomeo { points, left_slope, right_slope }.normalized())
    }

    /// Integer breakpoints with slope 1 tails.
    pub fn from_integer_points(points: &[(i64, i64)]) -> Result<PLHomeo> {
        PLHomeo::new(points.iter().map(|&(x, y)| (q(x), q(y))).collect(), q(1), q(1))
    }

    pub fn breakpoints(&self) -> &[(BigRational, BigRational)] {
        &self.points
    }

    pub fn left_slope(&self) -> &BigRational {
        &self.left_slope
    }

    pub fn right_slope(&self) -> &BigRational {
        &self.right_slope
    }

    pub fn is_identity(&self) -> bool {
        *self == PLHomeo::identity()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let pts = &self.points;
        let first = &pts[0];
        if *x <= first.0 {
            return &first.1 + &self.left_slope * (x - &first.0);
        }
        let last = &pts[pts.len() - 1];
        if *x >= last.0 {
            return &last.1 + &self.right_slope * (x - &last.0);
        }
        // pts[i].0 < x <= pts[i + 1].0
        let i = pts.partition_point(|p| p.0 < *x) - 1;
        let (x0, y0) = &pts[i];
        let (x1, y1) = &pts[i + 1];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn eval_int(&self, x: i64) -> BigRational {
        self.eval(&q(x))
    }

    pub fn inverse(&self) -> PLHomeo {
        PLHomeo {
            points: self.points.iter().map(|(x, y)| (y.clone(), x.clone())).collect(),
            left_slope: self.left_slope.recip(),
            right_slope: self.right_slope.recip(),
        }
        .normalized()
    }

    pub fn inverse_eval(&self, y: &BigRational) -> BigRational {
        self.inverse().eval(y)
    }

    /// `self ∘ inner`, i.e. `x ↦ self(inner(x))`.
    pub fn compose(&self, inner: &PLHomeo) -> PLHomeo {
        let inv = inner.inverse();
        let mut xs: Vec<BigRational> = inner.points.iter().map(|p| p.0.clone()).collect();
        xs.extend(self.points.iter().map(|p| inv.eval(&p.0)));
        xs.sort();
        xs.dedup();
        let points = xs
            .into_iter()
            .map(|x| {
                let y = self.eval(&inner.eval(&x));
                (x, y)
            })
            .collect();
        PLHomeo {
            points,
            left_slope: &self.left_slope * &inner.left_slope,
            right_slope: &self.right_slope * &inner.right_slope,
        }
        .normalized()
    }

    fn slope(a: &(BigRational, BigRational), b: &(BigRational, BigRational)) -> BigRational {
        (&b.1 - &a.1) / (&b.0 - &a.0)
    }

    /// Drops breakpoints where the slope does not change. A map without
    /// any genuine breakpoint is stored through its value at 0.
    fn normalized(self) -> PLHomeo {
        let PLHomeo { points, left_slope, right_slope } = self;
        let n = points.len();
        let mut keep = Vec::with_capacity(n);
        for i in 0..n {
            let before = if i == 0 { left_slope.clone() } else { PLHomeo::slope(&points[i - 1], &points[i]) };
            let after = if i + 1 == n { right_slope.clone() } else { PLHomeo::slope(&points[i], &points[i + 1]) };
            if before != after {
                keep.push(points[i].clone());
            }
        }
        if keep.is_empty() {
            // a single affine map
            let (x0, y0) = &points[0];
            let y = y0 - &left_slope * x0;
            keep.push((q(0), y));
        }
        PLHomeo { points: keep, left_slope, right_slope }
    }

    /// The open intervals where the map moves points, with the sign of
    /// `f(x) - x` on each. `None` bounds are infinite.
    pub fn support(&self) -> Vec<SupportInterval> {
        // special points: breakpoints and fixed points of each affine piece
        let mut pts: Vec<BigRational> = self.points.iter().map(|p| p.0.clone()).collect();
        let n = self.points.len();
        let disp = |x: &BigRational| self.eval(x) - x;
        let push_root = |x0: &BigRational, slope: &BigRational, lo: Option<&BigRational>, hi: Option<&BigRational>, pts: &mut Vec<BigRational>| {
            let d = disp(x0);
            let s = slope - q(1);
            if s.is_zero() {
                return;
            }
            let root = x0 - d / s;
            if lo.map_or(true, |l| root > *l) && hi.map_or(true, |h| root < *h) {
                pts.push(root);
            }
        };
        push_root(&self.points[0].0, &self.left_slope, None, Some(&self.points[0].0), &mut pts);
        for i in 0..n.saturating_sub(1) {
            let s = PLHomeo::slope(&self.points[i], &self.points[i + 1]);
            push_root(&self.points[i].0, &s, Some(&self.points[i].0), Some(&self.points[i + 1].0), &mut pts);
        }
        push_root(&self.points[n - 1].0, &self.right_slope, Some(&self.points[n - 1].0), None, &mut pts);
        pts.sort();
        pts.dedup();

        // sign on each open segment between special points
        let m = pts.len();
        let mut segments: Vec<(Option<BigRational>, Option<BigRational>, i8)> = Vec::with_capacity(m + 1);
        let sign_at = |x: &BigRational| {
            let d = disp(x);
            if d.is_positive() {
                1
            } else if d.is_negative() {
                -1
            } else {
                0
            }
        };
        segments.push((None, Some(pts[0].clone()), sign_at(&(&pts[0] - q(1)))));
        for i in 0..m.saturating_sub(1) {
            let mid = (&pts[i] + &pts[i + 1]) / q(2);
            segments.push((Some(pts[i].clone()), Some(pts[i + 1].clone()), sign_at(&mid)));
        }
        segments.push((Some(pts[m - 1].clone()), None, sign_at(&(&pts[m - 1] + q(1)))));

        // merge across special points that are not fixed
        let mut out: Vec<SupportInterval> = Vec::new();
        let mut open: Option<SupportInterval> = None;
        for (lo, hi, s) in segments {
            if s == 0 {
                if let Some(iv) = open.take() {
                    out.push(iv);
                }
                continue;
            }
            match open.as_mut() {
                Some(iv) if iv.sign == s && lo.as_ref().map_or(false, |l| sign_at(l) != 0) => iv.hi = hi,
                _ => {
                    if let Some(iv) = open.take() {
                        out.push(iv);
                    }
                    open = Some(SupportInterval { lo, hi, sign: s });
                }
            }
        }
        if let Some(iv) = open {
            out.push(iv);
        }
        out
    }
}

/// A component of `{x : f(x) != x}`; `sign` is the sign of `f(x) - x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportInterval {
    pub lo: Option<BigRational>,
    pub hi: Option<BigRational>,
    pub sign: i8,
}

impl SupportInterval {
    pub fn contains(&self, x: &BigRational) -> bool {
        self.lo.as_ref().map_or(true, |l| x > l) && self.hi.as_ref().map_or(true, |h| x < h)
    }
}

impl fmt::Display for PLHomeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "slope {} |", self.left_slope)?;
        for (x, y) in &self.points {
            write!(f, " ({}, {})", x, y)?;
        }
        write!(f, " | slope {}", self.right_slope)
    }
}
