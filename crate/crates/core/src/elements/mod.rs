//! Group families, their elements in normal form, and ball enumeration.
//!
//! Four families are supported: free groups (finite or countable rank),
//! free abelian groups `Z^k`, the tower groups `T_n` (with `T_2` the Klein
//! bottle group) and the braid groups `B_n`. Free, abelian and tower
//! elements are stored in a unique normal form, so structural equality is
//! group equality. Braid words are only freely reduced; use
//! [`Family::equal`] (handle reduction) to compare braids.

mod ball;
mod text;

pub use ball::{default_budget, set_default_budget, Ball, DEFAULT_BUDGET};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Rank of a free group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FreeRank {
    Finite(u32),
    Countable,
}

impl FreeRank {
    pub fn admits(&self, index: u32) -> bool {
        match *self {
            FreeRank::Finite(n) => index >= 1 && index <= n,
            FreeRank::Countable => index >= 1,
        }
    }
}

/// A group family together with its size parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Family {
    Free(FreeRank),
    Abelian(usize),
    Tower(usize),
    Braid(usize),
}

/// A freely reduced word; letter `i` is `x_i`, letter `-i` is `x_i^-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FreeWord {
    letters: Vec<i32>,
}

/// A vector in `Z^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianVector {
    pub coords: Vec<i64>,
}

/// Normal form `x_1^a_1 ... x_n^a_n` in the tower group `T_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TowerElement {
    pub exponents: Vec<i64>,
}

/// A freely reduced word in the Artin generators of `B_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Free(FreeWord),
    Abelian(AbelianVector),
    Tower(TowerElement),
    Braid(BraidWord),
}

/// Cancel adjacent inverse letters.
pub(crate) fn free_reduce<I: IntoIterator<Item = i32>>(letters: I) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::new();
    for l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn inverse_letters(letters: &[i32]) -> Vec<i32> {
    letters.iter().rev().map(|l| -l).collect()
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord { letters: Vec::new() }
    }

    /// Builds a word from signed generator indices, reducing freely.
    pub fn new<I: IntoIterator<Item = i32>>(letters: I) -> Self {
        FreeWord { letters: free_reduce(letters) }
    }

    pub fn generator(index: u32) -> Self {
        FreeWord { letters: vec![index as i32] }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn max_index(&self) -> u32 {
        self.letters.iter().map(|l| l.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        FreeWord::new(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord { letters: inverse_letters(&self.letters) }
    }

    /// Applies the homomorphism sending `x_i` to `image(i)`.
    pub fn substitute(&self, mut image: impl FnMut(u32) -> FreeWord) -> FreeWord {
        let mut out = Vec::new();
        for &l in &self.letters {
            let w = image(l.unsigned_abs());
            if l > 0 {
                out.extend_from_slice(&w.letters);
            } else {
                out.extend(inverse_letters(&w.letters));
            }
        }
        FreeWord::new(out)
    }
}

impl AbelianVector {
    pub fn new(coords: Vec<i64>) -> Self {
        AbelianVector { coords }
    }

    pub fn zero(dim: usize) -> Self {
        AbelianVector { coords: vec![0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

impl TowerElement {
    pub fn new(exponents: Vec<i64>) -> Self {
        TowerElement { exponents }
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    /// `x_{j+1}` inverts `x_j` and commutes with every lower generator, so
    /// moving `x_j^{b_j}` to the left only picks up the parity of `a_{j+1}`.
    pub fn mul(&self, other: &TowerElement) -> TowerElement {
        let a = &self.exponents;
        let b = &other.exponents;
        let n = a.len();
        let exponents = (0..n)
            .map(|j| {
                let twist = if j + 1 < n && a[j + 1] % 2 != 0 { -1 } else { 1 };
                a[j] + twist * b[j]
            })
            .collect();
        TowerElement { exponents }
    }

    pub fn inverse(&self) -> TowerElement {
        let a = &self.exponents;
        let n = a.len();
        let exponents = (0..n)
            .map(|j| {
                let twist = if j + 1 < n && a[j + 1] % 2 != 0 { -1 } else { 1 };
                -twist * a[j]
            })
            .collect();
        TowerElement { exponents }
    }
}

impl BraidWord {
    /// Builds a braid word, reducing freely. Indices must lie in `1..strands`.
    pub fn new<I: IntoIterator<Item = i32>>(strands: usize, letters: I) -> Self {
        BraidWord { strands, letters: free_reduce(letters) }
    }

    pub fn identity(strands: usize) -> Self {
        BraidWord { strands, letters: Vec::new() }
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn mul(&self, other: &BraidWord) -> BraidWord {
        BraidWord::new(self.strands, self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord { strands: self.strands, letters: inverse_letters(&self.letters) }
    }

    pub fn exponent_sum(&self) -> i64 {
        self.letters.iter().map(|&l| l.signum() as i64).sum()
    }

    /// Image in the symmetric group, as the position of each strand.
    pub fn permutation(&self) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.strands).collect();
        for &l in &self.letters {
            let i = l.unsigned_abs() as usize;
            perm.swap(i - 1, i);
        }
        perm
    }

    pub fn min_index(&self) -> Option<u32> {
        self.letters.iter().map(|l| l.unsigned_abs()).min()
    }

    /// Adds `offset` to every generator index, landing in `B_strands`.
    pub fn shifted(&self, strands: usize, offset: i32) -> BraidWord {
        BraidWord {
            strands,
            letters: self.letters.iter().map(|&l| l.signum() * (l.abs() + offset)).collect(),
        }
    }
}

impl Element {
    pub fn family_tag(&self) -> &'static str {
        match self {
            Element::Free(_) => "free",
            Element::Abelian(_) => "abelian",
            Element::Tower(_) => "tower",
            Element::Braid(_) => "braid",
        }
    }

    pub fn free(letters: &[i32]) -> Element {
        Element::Free(FreeWord::new(letters.iter().copied()))
    }

    pub fn vector(coords: &[i64]) -> Element {
        Element::Abelian(AbelianVector::new(coords.to_vec()))
    }

    pub fn tower(exponents: &[i64]) -> Element {
        Element::Tower(TowerElement::new(exponents.to_vec()))
    }

    pub fn braid(strands: usize, letters: &[i32]) -> Element {
        Element::Braid(BraidWord::new(strands, letters.iter().copied()))
    }

    pub fn as_free(&self) -> Option<&FreeWord> {
        match self {
            Element::Free(w) => Some(w),
            _ => None,
        }
    }

    pub fn as_vector(&self) -> Option<&AbelianVector> {
        match self {
            Element::Abelian(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_tower(&self) -> Option<&TowerElement> {
        match self {
            Element::Tower(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_braid(&self) -> Option<&BraidWord> {
        match self {
            Element::Braid(b) => Some(b),
            _ => None,
        }
    }

    /// Word length for words; l1 norm for vectors and tower exponents.
    pub fn length(&self) -> usize {
        match self {
            Element::Free(w) => w.len(),
            Element::Braid(b) => b.len(),
            Element::Abelian(v) => v.coords.iter().map(|c| c.unsigned_abs() as usize).sum(),
            Element::Tower(t) => t.exponents.iter().map(|c| c.unsigned_abs() as usize).sum(),
        }
    }

    /// True for the empty word / zero vector. For braids this is a syntactic
    /// test; see [`Family::is_identity`].
    pub fn is_trivial_form(&self) -> bool {
        match self {
            Element::Free(w) => w.is_empty(),
            Element::Braid(b) => b.is_empty(),
            Element::Abelian(v) => v.is_zero(),
            Element::Tower(t) => t.exponents.iter().all(|&e| e == 0),
        }
    }
}

impl Family {
    pub fn free(n: u32) -> Family {
        Family::Free(FreeRank::Finite(n))
    }

    pub fn free_countable() -> Family {
        Family::Free(FreeRank::Countable)
    }

    pub fn identity(&self) -> Element {
        match *self {
            Family::Free(_) => Element::Free(FreeWord::identity()),
            Family::Abelian(k) => Element::Abelian(AbelianVector::zero(k)),
            Family::Tower(n) => Element::Tower(TowerElement::new(vec![0; n])),
            Family::Braid(n) => Element::Braid(BraidWord::identity(n)),
        }
    }

    /// Checks that `g` is a well-formed element of this family.
    pub fn check(&self, g: &Element) -> Result<()> {
        let bad = || Error::mismatch(self, g.family_tag());
        match (self, g) {
            (Family::Free(rank), Element::Free(w)) => {
                if w.letters.iter().all(|l| rank.admits(l.unsigned_abs())) {
                    Ok(())
                } else {
                    Err(Error::mismatch(self, format!("word {}", g)))
                }
            }
            (Family::Abelian(k), Element::Abelian(v)) => {
                if v.dim() == *k {
                    Ok(())
                } else {
                    Err(Error::DimensionMismatch { expected: *k, found: v.dim() })
                }
            }
            (Family::Tower(n), Element::Tower(t)) => {
                if t.rank() == *n {
                    Ok(())
                } else {
                    Err(Error::DimensionMismatch { expected: *n, found: t.rank() })
                }
            }
            (Family::Braid(n), Element::Braid(b)) => {
                let ok = b.strands == *n
                    && b.letters.iter().all(|l| l.unsigned_abs() >= 1 && (l.unsigned_abs() as usize) < *n);
                if ok {
                    Ok(())
                } else {
                    Err(Error::mismatch(self, format!("braid {} on {} strands", g, b.strands)))
                }
            }
            _ => Err(bad()),
        }
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (a, b) {
            (Element::Free(x), Element::Free(y)) => Element::Free(x.mul(y)),
            (Element::Abelian(x), Element::Abelian(y)) => Element::Abelian(AbelianVector::new(
                x.coords.iter().zip(&y.coords).map(|(p, q)| p + q).collect(),
            )),
            (Element::Tower(x), Element::Tower(y)) => Element::Tower(x.mul(y)),
            (Element::Braid(x), Element::Braid(y)) => Element::Braid(x.mul(y)),
            _ => unreachable!("checked above"),
        })
    }

    /// Multiplies a sequence of elements left to right.
    pub fn product<'a, I: IntoIterator<Item = &'a Element>>(&self, items: I) -> Result<Element> {
        let mut acc = self.identity();
        for g in items {
            acc = self.multiply(&acc, g)?;
        }
        Ok(acc)
    }

    pub fn invert(&self, a: &Element) -> Result<Element> {
        self.check(a)?;
        Ok(invert_unchecked(a))
    }

    /// `a^-1 b^-1 a b`.
    pub fn commutator(&self, a: &Element, b: &Element) -> Result<Element> {
        let ai = self.invert(a)?;
        let bi = self.invert(b)?;
        self.product([&ai, &bi, a, b])
    }

    pub fn power(&self, a: &Element, e: i64) -> Result<Element> {
        let base = if e < 0 { self.invert(a)? } else { a.clone() };
        let mut acc = self.identity();
        for _ in 0..e.unsigned_abs() {
            acc = self.multiply(&acc, &base)?;
        }
        Ok(acc)
    }

    /// Group equality. Normal forms decide it except for braids, where the
    /// handle reduction of `a b^-1` is consulted.
    pub fn equal(&self, a: &Element, b: &Element) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        match (a, b) {
            (Element::Braid(x), Element::Braid(y)) => crate::braid::braid_equal(x, y),
            _ => Ok(a == b),
        }
    }

    pub fn is_identity(&self, a: &Element) -> Result<bool> {
        self.equal(a, &self.identity())
    }

    /// The standard generators. Countable free groups have no finite list;
    /// use [`Family::generators_window`].
    pub fn generators(&self) -> Result<Vec<Element>> {
        match *self {
            Family::Free(FreeRank::Finite(n)) => Ok(self.generators_window(n)),
            Family::Free(FreeRank::Countable) => Err(Error::Precondition(
                "the countable free group needs an explicit generator window".into(),
            )),
            Family::Abelian(k) => Ok((0..k)
                .map(|i| {
                    let mut c = vec![0; k];
                    c[i] = 1;
                    Element::Abelian(AbelianVector::new(c))
                })
                .collect()),
            Family::Tower(n) => Ok((0..n)
                .map(|i| {
                    let mut c = vec![0; n];
                    c[i] = 1;
                    Element::Tower(TowerElement::new(c))
                })
                .collect()),
            Family::Braid(n) => Ok((1..n as i32).map(|i| Element::braid(n, &[i])).collect()),
        }
    }

    /// The first `count` free generators (only meaningful for free groups).
    pub fn generators_window(&self, count: u32) -> Vec<Element> {
        (1..=count as i32).map(|i| Element::free(&[i])).collect()
    }

    pub fn parse_element(&self, s: &str) -> Result<Element> {
        text::parse_element(self, s)
    }
}

pub(crate) fn invert_unchecked(a: &Element) -> Element {
    match a {
        Element::Free(x) => Element::Free(x.inverse()),
        Element::Abelian(x) => Element::Abelian(AbelianVector::new(x.coords.iter().map(|c| -c).collect())),
        Element::Tower(x) => Element::Tower(x.inverse()),
        Element::Braid(x) => Element::Braid(x.inverse()),
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Free(FreeRank::Finite(n)) => write!(f, "f:{}", n),
            Family::Free(FreeRank::Countable) => write!(f, "f:inf"),
            Family::Abelian(k) => write!(f, "z:{}", k),
            Family::Tower(n) => write!(f, "t:{}", n),
            Family::Braid(n) => write!(f, "b:{}", n),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        let s = s.trim();
        let (tag, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::parse(0, format!("expected <kind>:<size> in family `{}`", s)))?;
        let pos = tag.len() + 1;
        let size = |min: usize| -> Result<usize> {
            let n: usize = rest
                .parse()
                .map_err(|_| Error::parse(pos, format!("bad family size `{}`", rest)))?;
            if n < min {
                return Err(Error::parse(pos, format!("family size must be at least {}", min)));
            }
            Ok(n)
        };
        match tag {
            "f" | "free" => {
                if rest == "inf" || rest == "oo" {
                    Ok(Family::Free(FreeRank::Countable))
                } else {
                    Ok(Family::Free(FreeRank::Finite(size(1)? as u32)))
                }
            }
            "z" | "abelian" => Ok(Family::Abelian(size(1)?)),
            "t" | "tower" => Ok(Family::Tower(size(1)?)),
            "b" | "braid" => Ok(Family::Braid(size(2)?)),
            _ => Err(Error::parse(0, format!("unknown family kind `{}`", tag))),
        }
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        text::fmt_element(self, f)
    }
}
