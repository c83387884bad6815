//! Sublattices of `Z^k` in row-style Hermite normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::quad::{common_denominator, QuadField};
use crate::error::{Error, Result};

/// A sublattice of `Z^dim`. The rows of `basis` generate it and are in
/// Hermite normal form: pivots strictly move right, pivots are positive,
/// and entries above a pivot are reduced modulo it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    dim: usize,
    basis: Vec<Vec<i64>>,
}

type Mat = Vec<Vec<BigInt>>;

fn to_big(rows: &[Vec<i64>]) -> Mat {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn to_small(rows: &Mat) -> Result<Vec<Vec<i64>>> {
    rows.iter()
        .map(|r| r.iter().map(|x| x.to_i64().ok_or(Error::Overflow("lattice entry"))).collect())
        .collect()
}

fn sub_mul(target: &mut [BigInt], src: &[BigInt], q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for (t, s) in target.iter_mut().zip(src) {
        *t -= q * s;
    }
}

/// Row-style Hermite normal form of the span of `rows` restricted to the
/// first `cols` columns as pivots; zero rows are dropped. Returns the
/// transformed rows (all columns are carried along).
fn echelon(mut m: Mat, cols: usize, reduce_above: bool) -> Mat {
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        loop {
            // smallest nonzero entry in column c at or below row r
            let best = (r..m.len())
                .filter(|&i| !m[i][c].is_zero())
                .min_by(|&i, &j| m[i][c].abs().cmp(&m[j][c].abs()));
            let Some(b) = best else { break };
            m.swap(r, b);
            let mut done = true;
            for i in r + 1..m.len() {
                if !m[i][c].is_zero() {
                    let q = m[i][c].div_floor(&m[r][c]);
                    let pivot = m[r].clone();
                    sub_mul(&mut m[i], &pivot, &q);
                    if !m[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < m.len() && !m[r][c].is_zero() {
            if m[r][c].is_negative() {
                for x in m[r].iter_mut() {
                    *x = -&*x;
                }
            }
            if reduce_above {
                let pivot = m[r].clone();
                for i in 0..r {
                    let q = m[i][c].div_floor(&pivot[c]);
                    sub_mul(&mut m[i], &pivot, &q);
                }
            }
            r += 1;
        }
    }
    m
}

fn hnf(rows: Mat, dim: usize) -> Mat {
    let mut m = echelon(rows, dim, true);
    m.retain(|r| r.iter().any(|x| !x.is_zero()));
    m
}

/// `{x ∈ Z^dim : m x = 0}` for an integer matrix `m` with rows of length
/// `dim`, via unimodular row reduction of `[m^T | I]`.
fn kernel_big(m: &Mat, dim: usize) -> Mat {
    let k = m.len();
    let aug: Mat = (0..dim)
        .map(|i| {
            let mut row: Vec<BigInt> = m.iter().map(|r| r[i].clone()).collect();
            row.extend((0..dim).map(|j| BigInt::from((i == j) as i64)));
            row
        })
        .collect();
    let red = echelon(aug, k, false);
    let kernel: Mat = red
        .into_iter()
        .filter(|r| r[..k].iter().all(Zero::is_zero))
        .map(|r| r[k..].to_vec())
        .collect();
    hnf(kernel, dim)
}

/// Integer kernel of the functionals given as rows.
pub fn integer_kernel(rows: &[Vec<i64>], dim: usize) -> Result<Lattice> {
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: rows.iter().map(Vec::len).find(|&l| l != dim).unwrap() });
    }
    Ok(Lattice { dim, basis: to_small(&kernel_big(&to_big(rows), dim))? })
}

impl Lattice {
    pub fn from_rows(dim: usize, rows: Vec<Vec<i64>>) -> Result<Lattice> {
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: r.len() });
        }
        Ok(Lattice { dim, basis: to_small(&hnf(to_big(&rows), dim))? })
    }

    pub fn full(dim: usize) -> Lattice {
        Lattice { dim, basis: (0..dim).map(|i| (0..dim).map(|j| (i == j) as i64).collect()).collect() }
    }

    pub fn zero(dim: usize) -> Lattice {
        Lattice { dim, basis: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        if v.len() != self.dim {
            return false;
        }
        let mut x: Vec<BigInt> = v.iter().map(|&a| BigInt::from(a)).collect();
        for row in &self.basis {
            let c = row.iter().position(|&a| a != 0).expect("basis rows are nonzero");
            let p = BigInt::from(row[c]);
            let (q, rem) = x[c].div_rem(&p);
            if !rem.is_zero() {
                return false;
            }
            for (t, &s) in x.iter_mut().zip(row) {
                *t -= &q * s;
            }
        }
        x.iter().all(Zero::is_zero)
    }

    pub fn is_subset_of(&self, other: &Lattice) -> bool {
        self.basis.iter().all(|r| other.contains(r))
    }

    /// Integer functionals whose common kernel is the saturation.
    pub fn annihilator(&self) -> Result<Lattice> {
        integer_kernel(&self.basis, self.dim)
    }

    /// The isolator `{x : n x ∈ L for some n ≠ 0}`, as the kernel of the
    /// annihilator.
    pub fn saturate(&self) -> Result<Lattice> {
        let ann = self.annihilator()?;
        if ann.rank() == 0 {
            return Ok(Lattice::full(self.dim));
        }
        integer_kernel(&ann.basis, self.dim)
    }

    /// `L ∩ ker(v)` for a functional with entries in `Q(√2)`. An integer
    /// point is killed iff both the rational and the irrational part vanish.
    pub fn meet_kernel(&self, v: &[QuadField]) -> Result<Lattice> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        if self.rank() == 0 {
            return Ok(self.clone());
        }
        let parts = integer_parts(v);
        // coordinates y with (y B) · u = 0, i.e. (B u) · y = 0
        let b = to_big(&self.basis);
        let m: Mat = parts
            .iter()
            .map(|u| b.iter().map(|row| row.iter().zip(u).map(|(x, y)| x * y).sum()).collect())
            .collect();
        let ker = kernel_big(&m, self.rank());
        let rows: Mat = ker
            .iter()
            .map(|y| (0..self.dim).map(|j| y.iter().zip(&b).map(|(c, row)| c * &row[j]).sum()).collect())
            .collect();
        Ok(Lattice { dim: self.dim, basis: to_small(&hnf(rows, self.dim))? })
    }

    /// Whether `v` vanishes on the whole lattice.
    pub fn kills(&self, v: &[QuadField]) -> bool {
        self.basis.iter().all(|r| super::quad::dot(v, r).is_zero())
    }

    /// Whether `v` takes only rational values on the lattice.
    pub fn rational_on(&self, v: &[QuadField]) -> bool {
        self.basis.iter().all(|r| super::quad::dot(v, r).is_rational())
    }
}

/// Integer rows proportional to the rational and irrational parts of `v`.
fn integer_parts(v: &[QuadField]) -> Vec<Vec<BigInt>> {
    let den_a = common_denominator(v.iter().map(|c| c.rational_part()));
    let den_b = common_denominator(v.iter().map(|c| c.irrational_part()));
    let a: Vec<BigInt> = v.iter().map(|c| (c.rational_part() * &den_a).to_integer()).collect();
    let b: Vec<BigInt> = v.iter().map(|c| (c.irrational_part() * &den_b).to_integer()).collect();
    vec![a, b]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Smith normal form diagonal via determinantal divisors, for tiny
    /// matrices: d_i = gcd of i x i minors.
    fn minors_gcd(rows: &[Vec<i64>], size: usize) -> i64 {
        fn det(m: &[Vec<i64>]) -> i64 {
            match m.len() {
                1 => m[0][0],
                2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
                _ => (0..m.len())
                    .map(|j| {
                        let sub: Vec<Vec<i64>> =
                            m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
                        let s = if j % 2 == 0 { 1 } else { -1 };
                        s * m[0][j] * det(&sub)
                    })
                    .sum(),
            }
        }
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = subsets(n - 1, k);
            for mut s in subsets(n - 1, k - 1) {
                s.push(n - 1);
                out.push(s);
            }
            out
        }
        let mut g = 0i64;
        for rs in subsets(rows.len(), size) {
            for cs in subsets(rows[0].len(), size) {
                let m: Vec<Vec<i64>> = rs.iter().map(|&r| cs.iter().map(|&c| rows[r][c]).collect()).collect();
                g = g.gcd(&det(&m));
            }
        }
        g.abs()
    }

    #[test]
    fn hnf_shape() {
        let l = Lattice::from_rows(2, vec![vec![2, 2], vec![0, 4], vec![4, 8]]).unwrap();
        assert_eq!(l.rank(), 2);
        for r in [[2, 2], [0, 4], [4, 8]] {
            assert!(l.contains(&r));
        }
        assert!(!l.contains(&[1, 1]));
        assert_eq!(Lattice::from_rows(2, vec![vec![0, -3]]).unwrap().basis(), &[vec![0, 3]]);
    }

    #[test]
    fn saturation_examples() {
        let l = Lattice::from_rows(2, vec![vec![2, 0]]).unwrap();
        assert_eq!(l.saturate().unwrap(), Lattice::from_rows(2, vec![vec![1, 0]]).unwrap());
        let l = Lattice::from_rows(2, vec![vec![1, 1], vec![0, 2]]).unwrap();
        assert_eq!(l.saturate().unwrap(), Lattice::full(2));
        let s = Lattice::from_rows(3, vec![vec![1, -1, 0]]).unwrap();
        assert_eq!(s.saturate().unwrap(), s);
    }

    #[test]
    fn saturation_index_matches_smith_form() {
        // [sat(L) : L] is the product of the invariant factors of L
        let cases = vec![
            vec![vec![2, 4, 6], vec![0, 3, 9]],
            vec![vec![4, 0], vec![0, 6]],
            vec![vec![1, 2, 3]],
            vec![vec![6, 10, 0], vec![0, 0, 5]],
        ];
        for rows in cases {
            let l = Lattice::from_rows(rows[0].len(), rows.clone()).unwrap();
            let s = l.saturate().unwrap();
            assert_eq!(s.rank(), l.rank());
            assert!(l.is_subset_of(&s));
            let r = l.rank();
            // a lattice is saturated iff its maximal minors are coprime, and
            // then [sat(L) : L] is the gcd of the maximal minors of L
            assert_eq!(minors_gcd(s.basis(), r), 1);
            let index = minors_gcd(l.basis(), r);
            for x in s.basis() {
                let scaled: Vec<i64> = x.iter().map(|c| c * index).collect();
                assert!(l.contains(&scaled));
            }
            assert_eq!(s.saturate().unwrap(), s);
        }
    }

    #[test]
    fn kernels() {
        let k = integer_kernel(&[vec![1, 1, 0], vec![0, 0, 1]], 3).unwrap();
        assert_eq!(k, Lattice::from_rows(3, vec![vec![1, -1, 0]]).unwrap());
        let k = integer_kernel(&[vec![2, 3]], 2).unwrap();
        assert_eq!(k, Lattice::from_rows(2, vec![vec![3, -2]]).unwrap());
        assert_eq!(integer_kernel(&[], 2).unwrap(), Lattice::full(2));
    }

    #[test]
    fn irrational_kernel() {
        let v: Vec<QuadField> = vec!["1".parse().unwrap(), "r2".parse().unwrap(), "0".parse().unwrap()];
        let k = Lattice::full(3).meet_kernel(&v).unwrap();
        assert_eq!(k, Lattice::from_rows(3, vec![vec![0, 0, 1]]).unwrap());
        let v: Vec<QuadField> = vec!["1".parse().unwrap(), "1".parse().unwrap(), "0".parse().unwrap()];
        let sub = Lattice::from_rows(3, vec![vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        assert_eq!(sub.meet_kernel(&v).unwrap(), Lattice::from_rows(3, vec![vec![1, -1, 0]]).unwrap());
    }
}
