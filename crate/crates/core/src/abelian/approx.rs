//! Approximating an ordering of `Z^k` on finitely many prescribed positive
//! elements by a discrete one, a dense one, or one with cyclic bottom.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::flag::{is_discrete, min_convex_subgroup, rational_functional, substitute_sqrt2, unit_functional, FlagOrder};
use super::lattice::Lattice;
use super::quad::{dot, sqrt2_convergent, QuadField};
use crate::cones::Sign;
use crate::error::{Error, Result};

/// A rational functional near a `Q(√2)` one, with an integer point on its
/// hyperplane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperplaneApprox {
    pub w: Vec<BigRational>,
    pub y: Vec<BigInt>,
    pub j: usize,
    pub x: Vec<i64>,
}

fn rational_dot(w: &[BigRational], x: &[i64]) -> BigRational {
    w.iter().zip(x).map(|(a, &b)| a * BigRational::from_integer(b.into())).sum()
}

/// `m_1 = Σ_{i<=j} y_i w_i`, `m_2 = Σ_{i>j} y_i w_i` and
/// `x = (m_2 y_1, ..., m_2 y_j, -m_1 y_{j+1}, ..., -m_1 y_k)`, so `w · x = 0`.
pub fn hyperplane_point(w: &[BigRational]) -> Result<HyperplaneApprox> {
    let k = w.len();
    if k < 2 {
        return Err(Error::Degenerate("a hyperplane in one dimension has no nonzero lattice points".into()));
    }
    let y: Vec<BigInt> = w.iter().map(|c| c.denom().clone()).collect();
    let terms: Vec<BigInt> = w.iter().zip(&y).map(|(c, yi)| (c * BigRational::from_integer(yi.clone())).to_integer()).collect();
    let split = |j: usize| -> (BigInt, BigInt) {
        let m1: BigInt = terms[..j].iter().sum();
        let m2: BigInt = terms[j..].iter().sum();
        (m1, m2)
    };
    let j = (1..k)
        .find(|&j| {
            let (m1, m2) = split(j);
            !m1.is_zero() && !m2.is_zero()
        })
        .or_else(|| {
            (1..k).find(|&j| {
                let (m1, m2) = split(j);
                !(m1.is_zero() && m2.is_zero())
            })
        })
        .ok_or_else(|| Error::Degenerate("m1 and m2 vanish for every split".into()))?;
    let (m1, m2) = split(j);
    let x = y
        .iter()
        .enumerate()
        .map(|(i, yi)| {
            let v = if i < j { &m2 * yi } else { -(&m1 * yi) };
            v.to_i64().ok_or(Error::Overflow("hyperplane point"))
        })
        .collect::<Result<Vec<i64>>>()?;
    Ok(HyperplaneApprox { w: w.to_vec(), y, j, x })
}

/// The first `√2`-convergent substitution `w = a + c b` with
/// `‖v - w‖ < eps`, together with its lattice point from
/// [`hyperplane_point`].
pub fn rational_hyperplane_approx(v: &[QuadField], eps: &BigRational) -> Result<HyperplaneApprox> {
    if v.iter().all(QuadField::is_zero) {
        return Err(Error::Precondition("zero normal vector".into()));
    }
    if !eps.is_positive() {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    let norm_b: BigRational = v.iter().map(|c| c.irrational_part() * c.irrational_part()).sum();
    let eps2 = QuadField::from_rational(eps * eps);
    for depth in 0..4096 {
        let c = sqrt2_convergent(depth);
        // ‖v - w‖^2 = (√2 - c)^2 Σ b_i^2
        let diff = &QuadField::sqrt2() - &QuadField::from_rational(c.clone());
        let err = (&diff * &diff).scale(&norm_b);
        if err < eps2 {
            let w = substitute_sqrt2(v, &c);
            if w.iter().all(Zero::is_zero) {
                continue;
            }
            return hyperplane_point(&w);
        }
    }
    Err(Error::BudgetExceeded { what: "convergent depth".into(), limit: 4096 })
}

fn check_positive(f: &FlagOrder, gs: &[Vec<i64>]) -> Result<()> {
    for g in gs {
        if f.classify(g)? != Sign::Positive {
            return Err(Error::Precondition(format!("{:?} is not positive for the input order", g)));
        }
    }
    Ok(())
}

/// Drops elements that are positive multiples of earlier ones.
fn dedup_rays(gs: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    for g in gs {
        let parallel = out.iter().any(|h| {
            let cross_zero = (0..g.len())
                .all(|i| (0..g.len()).all(|j| (g[i] as i128) * (h[j] as i128) == (g[j] as i128) * (h[i] as i128)));
            let same_dir = g.iter().zip(h).map(|(a, b)| (*a as i128) * (*b as i128)).sum::<i128>() > 0;
            cross_zero && same_dir
        });
        if !parallel {
            out.push(g.clone());
        }
    }
    out
}

fn units(dim: usize) -> Vec<Vec<QuadField>> {
    (0..dim).map(|i| unit_functional(dim, i)).collect()
}

/// A rational functional positive on every `g`, from increasingly fine
/// hyperplane approximations of `v`.
fn rationalize(v: &[QuadField], gs: &[Vec<i64>]) -> Result<Vec<BigRational>> {
    let mut eps = BigRational::new(BigInt::one(), BigInt::from(2));
    for _ in 0..512 {
        let approx = rational_hyperplane_approx(v, &eps)?;
        debug_assert!(rational_dot(&approx.w, &approx.x).is_zero());
        if gs.iter().all(|g| rational_dot(&approx.w, g).is_positive()) {
            return Ok(approx.w);
        }
        eps /= BigInt::from(2);
    }
    Err(Error::BudgetExceeded { what: "hyperplane refinement".into(), limit: 512 })
}

/// Functionals ordering the lattice `l` discretely, every `g ∈ gs` positive.
/// `f` must be total on `l` and positive on `gs`.
fn discrete_on(l: &Lattice, f: &[Vec<QuadField>], gs: &[Vec<i64>]) -> Result<Vec<Vec<QuadField>>> {
    if l.rank() == 0 {
        return Ok(Vec::new());
    }
    let start = f.iter().position(|v| !l.kills(v)).ok_or_else(|| Error::InvalidFlag("not total on a sublattice".into()))?;
    let f = &f[start..];
    let v = &f[0];
    if l.rank() == 1 {
        return Ok(vec![v.clone()]);
    }
    let below = l.meet_kernel(v)?;
    let g0: Vec<Vec<i64>> = gs.iter().filter(|g| dot(v, g).is_zero()).cloned().collect();
    if below.rank() + 1 == l.rank() || !g0.is_empty() {
        // a discrete jump already, or some g_i lies on the hyperplane: keep it
        let mut out = vec![v.clone()];
        out.extend(discrete_on(&below, &f[1..], &g0)?);
        return Ok(out);
    }
    // no g_i on the irrational hyperplane: tilt it to a rational one
    if gs.is_empty() {
        return Ok(units(l.dim()));
    }
    let w = rationalize(v, gs)?;
    let mut out = vec![rational_functional(&w)];
    out.extend(units(l.dim()));
    Ok(out)
}

/// A discrete ordering of `Z^k` in which every `g` stays positive.
pub fn discrete_approximation(f: &FlagOrder, gs: &[Vec<i64>]) -> Result<FlagOrder> {
    check_positive(f, gs)?;
    if gs.is_empty() {
        return Ok(FlagOrder::lex(f.dim()));
    }
    if is_discrete(f).is_some() {
        return Ok(f.clone());
    }
    let gs = dedup_rays(gs);
    let out = FlagOrder::new(discrete_on(&Lattice::full(f.dim()), f.functionals(), &gs)?)?.normalized();
    if is_discrete(&out).is_none() {
        return Err(Error::Degenerate(format!("discrete approximation produced a dense order {}", out)));
    }
    check_positive(&out, &gs).map_err(|_| Error::Degenerate("discrete approximation lost a required element".into()))?;
    Ok(out)
}

fn independent_of(c: &[i64], basis: &[Vec<i64>]) -> Option<Vec<i64>> {
    basis
        .iter()
        .find(|d| {
            (0..c.len()).any(|i| (0..c.len()).any(|j| (c[i] as i128) * (d[j] as i128) != (c[j] as i128) * (d[i] as i128)))
        })
        .cloned()
}

fn int_dot(a: &[i64], b: &[i64]) -> BigRational {
    BigRational::from_integer(a.iter().zip(b).map(|(x, y)| BigInt::from(*x) * BigInt::from(*y)).sum())
}

/// A dense ordering of `Z^k`, `k >= 2`, in which every `g` stays positive.
/// The discrete bottom jump `M ⊃ <c>` is collapsed by tilting the
/// functional above it by a small irrational multiple of a functional
/// dual to `c`.
pub fn dense_approximation(f: &FlagOrder, gs: &[Vec<i64>]) -> Result<FlagOrder> {
    if f.dim() < 2 {
        return Err(Error::Precondition("Z has no dense ordering".into()));
    }
    check_positive(f, gs)?;
    if is_discrete(f).is_none() {
        return Ok(f.clone());
    }
    let n = f.normalized();
    let fs = n.functionals();
    let chain = n.kernel_chain()?;
    let m = fs.len();
    let bottom = &chain[m - 1];
    let c = bottom.basis()[0].clone();
    let upper = &chain[m - 2];
    let vs = &fs[m - 2];
    let sign_c = if dot(&fs[m - 1], &c).is_positive() { 1 } else { -1 };
    let in_upper: Vec<Vec<i64>> = gs.iter().filter(|g| upper.contains(g)).cloned().collect();
    let mut prefix: Vec<Vec<QuadField>> = fs[..m - 2].to_vec();
    let plane = if upper.rank() == 2 {
        upper.clone()
    } else {
        // rank 3: first cut down by a rational functional killing c
        let mut found = None;
        for depth in 0..4096 {
            let w = substitute_sqrt2(vs, &sqrt2_convergent(depth));
            if in_upper.iter().all(|g| !rational_dot(&w, g).is_negative()) && !upper.kills(&rational_functional(&w)) {
                found = Some(w);
                break;
            }
        }
        let w = rational_functional(&found.ok_or(Error::BudgetExceeded { what: "convergent depth".into(), limit: 4096 })?);
        let plane = upper.meet_kernel(&w)?;
        prefix.push(w);
        plane
    };
    let d = independent_of(&c, plane.basis()).ok_or_else(|| Error::Degenerate("no second direction".into()))?;
    // u = αc + βd with u·c = 1, u·d = 0
    let (cc, cd, dd) = (int_dot(&c, &c), int_dot(&c, &d), int_dot(&d, &d));
    let det = &cc * &dd - &cd * &cd;
    let alpha = &dd / &det;
    let beta = -&cd / &det;
    let t = if dot(vs, &d).is_rational() { QuadField::sqrt2() } else { QuadField::one() };
    let t = t.scale(&BigRational::from_integer(sign_c.into()));
    let u: Vec<QuadField> = c
        .iter()
        .zip(&d)
        .map(|(ci, di)| {
            let r = &alpha * BigRational::from_integer((*ci).into()) + &beta * BigRational::from_integer((*di).into());
            t.scale(&r)
        })
        .collect();
    let on_plane: Vec<&Vec<i64>> = in_upper.iter().filter(|g| plane.contains(g)).collect();
    let mut delta = BigRational::one();
    for _ in 0..512 {
        delta /= BigInt::from(2);
        let phi: Vec<QuadField> = vs.iter().zip(&u).map(|(a, b)| a + &b.scale(&delta)).collect();
        if on_plane.iter().all(|g| dot(&phi, g).is_positive()) {
            prefix.push(phi);
            let out = FlagOrder::new(prefix)?;
            if is_discrete(&out).is_some() {
                return Err(Error::Degenerate(format!("dense approximation produced a discrete order {}", out)));
            }
            check_positive(&out, gs).map_err(|_| Error::Degenerate("dense approximation lost a required element".into()))?;
            return Ok(out);
        }
    }
    Err(Error::BudgetExceeded { what: "tilt refinement".into(), limit: 512 })
}

/// An ordering whose smallest nontrivial convex subgroup is cyclic, with
/// every `g` positive: the quotient by the isolator of `<gs>` is ordered
/// lexicographically by its annihilator, the isolator discretely.
pub fn rank_one_convex_construction(f: &FlagOrder, gs: &[Vec<i64>]) -> Result<FlagOrder> {
    if gs.is_empty() {
        return Err(Error::Precondition("the construction needs at least one element".into()));
    }
    check_positive(f, gs)?;
    let h = Lattice::from_rows(f.dim(), gs.to_vec())?;
    let iso = h.saturate()?;
    let mut fs: Vec<Vec<QuadField>> = iso
        .annihilator()?
        .basis()
        .iter()
        .map(|r| r.iter().map(|&x| QuadField::from_int(x)).collect())
        .collect();
    fs.extend(discrete_on(&iso, f.functionals(), &dedup_rays(gs))?);
    let out = FlagOrder::new(fs)?.normalized();
    if min_convex_subgroup(&out).rank() != 1 {
        return Err(Error::Degenerate(format!("bottom of {} is not cyclic", out)));
    }
    check_positive(&out, gs).map_err(|_| Error::Degenerate("construction lost a required element".into()))?;
    Ok(out)
}
