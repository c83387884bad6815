//! Text forms: free words `x1.x2^-1`, braids `s1.s2^-1`, vectors and tower
//! elements as integer tuples `(1,-2)`. The identity word prints as `1`.

use std::fmt;

use super::{AbelianVector, BraidWord, Element, Family, FreeWord, TowerElement};
use crate::error::{Error, Result};

pub(super) fn fmt_element(g: &Element, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match g {
        Element::Free(w) => fmt_word(w.letters(), 'x', f),
        Element::Braid(b) => fmt_word(b.letters(), 's', f),
        Element::Abelian(AbelianVector { coords }) | Element::Tower(TowerElement { exponents: coords }) => {
            write!(f, "(")?;
            for (i, c) in coords.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", c)?;
            }
            write!(f, ")")
        }
    }
}

fn fmt_word(letters: &[i32], symbol: char, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if letters.is_empty() {
        return write!(f, "1");
    }
    // group runs of equal letters into powers
    let mut i = 0;
    let mut first = true;
    while i < letters.len() {
        let l = letters[i];
        let mut j = i;
        while j < letters.len() && letters[j] == l {
            j += 1;
        }
        let exp = (j - i) as i64 * l.signum() as i64;
        if !first {
            write!(f, ".")?;
        }
        first = false;
        if exp == 1 {
            write!(f, "{}{}", symbol, l.abs())?;
        } else {
            write!(f, "{}{}^{}", symbol, l.abs(), exp)?;
        }
        i = j;
    }
    Ok(())
}

pub(super) fn parse_element(family: &Family, s: &str) -> Result<Element> {
    let g = match family {
        Family::Free(_) => Element::Free(FreeWord::new(parse_word(s, 'x')?)),
        Family::Braid(n) => Element::Braid(BraidWord::new(*n, parse_word(s, 's')?)),
        Family::Abelian(_) => Element::Abelian(AbelianVector::new(parse_tuple(s)?)),
        Family::Tower(_) => Element::Tower(TowerElement::new(parse_tuple(s)?)),
    };
    family.check(&g)?;
    Ok(g)
}

fn parse_word(s: &str, symbol: char) -> Result<Vec<i32>> {
    let trimmed = s.trim();
    let offset = s.len() - s.trim_start().len();
    if trimmed.is_empty() || trimmed == "1" || trimmed == "e" {
        return Ok(Vec::new());
    }
    let mut letters = Vec::new();
    let mut pos = offset;
    for token in trimmed.split('.') {
        let tok = token.trim();
        let tpos = pos + (token.len() - token.trim_start().len());
        let rest = tok
            .strip_prefix(symbol)
            .ok_or_else(|| Error::parse(tpos, format!("expected `{}<index>`, found `{}`", symbol, tok)))?;
        let (idx, exp) = match rest.split_once('^') {
            Some((i, e)) => (i, Some(e)),
            None => (rest, None),
        };
        let index: i32 = idx
            .parse()
            .ok()
            .filter(|&i: &i32| i >= 1)
            .ok_or_else(|| Error::parse(tpos + 1, format!("bad generator index `{}`", idx)))?;
        let exp: i64 = match exp {
            Some(e) => e
                .parse()
                .map_err(|_| Error::parse(tpos + 2 + idx.len(), format!("bad exponent `{}`", e)))?,
            None => 1,
        };
        for _ in 0..exp.unsigned_abs() {
            letters.push(if exp < 0 { -index } else { index });
        }
        pos += token.len() + 1;
    }
    Ok(letters)
}

fn parse_tuple(s: &str) -> Result<Vec<i64>> {
    let offset = s.len() - s.trim_start().len();
    let t = s.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::parse(offset, format!("expected a tuple like (1,-2), found `{}`", t)))?;
    let mut pos = offset + 1;
    let mut out = Vec::new();
    for part in inner.split(',') {
        let v: i64 = part
            .trim()
            .parse()
            .map_err(|_| Error::parse(pos, format!("bad integer `{}`", part.trim())))?;
        out.push(v);
        pos += part.len() + 1;
    }
    Ok(out)
}
