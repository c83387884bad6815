//! Compact cone terms for the command line and element lists.
//!
//! ```text
//! magnus | magnus:<n> | magnus:inf
//! lex | lex:<k> | flag:[(1,r2),(0,1)]
//! dehornoy | dehornoy:<n>
//! tower:<signs>            e.g. tower:+-+
//! braid-surgery:<n>        Dehornoy on B_n with the B_3 lex/Magnus cone on the top strands
//! @<file>                  a JSON cone document
//! {...}                    an inline JSON cone document
//! ```

use std::str::FromStr;

use ordspace::abelian::{flag_cone, FlagOrder, QuadField};
use ordspace::cones::ConeDocument;
use ordspace::realization::{magnus_cone_on, DEFAULT_MAGNUS_DEGREE};
use ordspace::{Cone, Element, Error, Family, FreeRank, Result};

/// Parses a cone term; `group` fixes or checks the family.
pub fn parse_cone(term: &str, group: Option<&Family>) -> Result<Cone> {
    let term = term.trim();
    if let Some(path) = term.strip_prefix('@') {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Precondition(format!("cannot read {}: {}", path, e)))?;
        return document(&text, group);
    }
    if term.starts_with('{') {
        return document(term, group);
    }
    let (head, arg) = match term.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (term, None),
    };
    let arg_pos = head.len() + 1;
    let size = |what: &str| -> Result<Option<usize>> {
        arg.map(|a| a.parse::<usize>().map_err(|_| Error::parse(arg_pos, format!("bad {} `{}`", what, a))))
            .transpose()
    };
    let cone = match head {
        "magnus" => {
            let family = match (arg, group) {
                (Some("inf"), _) => Family::Free(FreeRank::Countable),
                (Some(_), _) => Family::free(size("rank")?.unwrap() as u32),
                (None, Some(g)) => g.clone(),
                (None, None) => Family::free(2),
            };
            magnus_cone_on(family, DEFAULT_MAGNUS_DEGREE)?
        }
        "lex" => {
            let k = match (size("dimension")?, group) {
                (Some(k), _) => k,
                (None, Some(Family::Abelian(k))) => *k,
                (None, _) => 2,
            };
            flag_cone(FlagOrder::lex(k))
        }
        "flag" => flag_cone(parse_flag(arg.unwrap_or(""), arg_pos)?),
        "dehornoy" => {
            let n = match (size("strand count")?, group) {
                (Some(n), _) => n,
                (None, Some(Family::Braid(n))) => *n,
                (None, _) => 3,
            };
            ordspace::braid::dehornoy_cone(n)?
        }
        "tower" => {
            let signs = ordspace::tower::SignVector::parse(arg.unwrap_or(""))
                .map_err(|e| shift(e, arg_pos))?;
            ordspace::tower::tower_cone(&signs)?
        }
        "braid-surgery" => {
            let n = size("strand count")?.unwrap_or(5);
            ordspace::braid::example_braid_surgery(n, ordspace::braid::b3_lex_magnus_cone()?)?
        }
        other => return Err(Error::parse(0, format!("unknown cone `{}`", other))),
    };
    if let Some(g) = group {
        if cone.family() != g {
            return Err(Error::mismatch(g, cone.family()));
        }
    }
    Ok(cone)
}

fn document(text: &str, group: Option<&Family>) -> Result<Cone> {
    let doc = ConeDocument::from_json(text)?;
    if let Some(g) = group {
        if doc.family != *g {
            return Err(Error::mismatch(g, &doc.family));
        }
    }
    doc.build()
}

fn shift(e: Error, by: usize) -> Error {
    match e {
        Error::Parse { pos, msg } => Error::Parse { pos: pos + by, msg },
        other => other,
    }
}

/// `[(a,b,...),(c,d,...)]` with entries in `Q(√2)`.
pub fn parse_flag(s: &str, offset: usize) -> Result<FlagOrder> {
    let t = s.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::parse(offset, "flag must look like [(1,r2),(0,1)]"))?;
    let mut rows = Vec::new();
    for (start, item) in split_top_level(inner) {
        let pos = offset + 1 + start;
        let body = item
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::parse(pos, format!("expected a tuple, found `{}`", item.trim())))?;
        let body_pos = pos + item.find('(').unwrap_or(0) + 1;
        let mut row = Vec::new();
        let mut at = 0;
        for x in body.split(',') {
            let lead = x.len() - x.trim_start().len();
            row.push(QuadField::from_str(x.trim()).map_err(|e| shift(e, body_pos + at + lead))?);
            at += x.len() + 1;
        }
        rows.push(row);
    }
    FlagOrder::new(rows)
}

/// Splits at commas and semicolons outside parentheses, returning byte
/// offsets with the pieces.
fn split_top_level(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' | ';' if depth == 0 => {
                out.push((start, &s[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    if !s[start..].trim().is_empty() {
        out.push((start, &s[start..]));
    }
    out
}

/// `x1,x1.x2` or `(1,1);(2,1)`.
pub fn parse_elements(family: &Family, s: &str) -> Result<Vec<Element>> {
    split_top_level(s)
        .into_iter()
        .map(|(start, item)| family.parse_element(item.trim()).map_err(|e| shift(e, start)))
        .collect()
}

/// Family text, or the family of a cone term when it fixes one.
pub fn parse_family(s: &str) -> Result<Family> {
    Family::from_str(s)
}
