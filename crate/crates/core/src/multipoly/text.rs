//! Canonical polynomial text format.
//!
//! ```text
//! # diffcomp poly v1
//! <nvars> <m>
//! <coeff> * a_{i,j}^e * ...
//! ```
//!
//! One term per line in graded-lex order, coefficients in the cyclotomic text format
//! embedded into the header order `m`. Lines starting with `#` are comments.

use super::vars::split_name;
use super::{Layout, Monomial, MultiPoly, VarTable};
use crate::cyclotomic::CycloRational;
use crate::error::{Error, Result};

/// Symbol, indices and exponent of one `name^e` factor.
type Factor = (char, Vec<usize>, u32);

pub const POLY_FORMAT_HEADER: &str = "# diffcomp poly v1";

pub fn write_poly(p: &MultiPoly, table: &VarTable) -> String {
    let m = p.coefficient_order();
    let mut out = String::new();
    out.push_str(POLY_FORMAT_HEADER);
    out.push('\n');
    out.push_str(&format!("{} {}\n", p.nvars(), m));
    for (mono, c) in p.terms() {
        out.push_str(&c.embed(m).to_string());
        for &(v, e) in mono.powers() {
            out.push_str(" * ");
            out.push_str(&table.name(v));
            if e > 1 {
                out.push_str(&format!("^{e}"));
            }
        }
        out.push('\n');
    }
    out
}

fn isqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r.saturating_sub(1)..=r + 1).find(|&k| k * k == n)
}

/// Parse the canonical format, inferring the variable layout from the names used.
pub fn parse_poly(text: &str) -> Result<(MultiPoly, VarTable)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `nvars m` header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (nvars, order) = match fields.as_slice() {
        [n, m] => (
            n.parse::<usize>()
                .map_err(|_| Error::parse(hline, "bad nvars"))?,
            m.parse::<u64>()
                .ok()
                .filter(|&m| m >= 1)
                .ok_or_else(|| Error::parse(hline, "bad order"))?,
        ),
        _ => return Err(Error::parse(hline, "header must be `nvars m`")),
    };

    let mut raw: Vec<(usize, CycloRational, Vec<Factor>)> = Vec::new();
    for (lineno, line) in lines {
        let mut parts = line.split(" * ").map(str::trim);
        let coeff: CycloRational = parts
            .next()
            .unwrap_or_default()
            .parse()
            .map_err(|e| Error::parse(lineno, format!("{e}")))?;
        if order % coeff.order() != 0 {
            return Err(Error::parse(
                lineno,
                "coefficient order does not divide header order",
            ));
        }
        let mut factors = Vec::new();
        for tok in parts {
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => (
                    n,
                    e.parse::<u32>()
                        .ok()
                        .filter(|&e| e >= 1)
                        .ok_or_else(|| Error::parse(lineno, format!("bad exponent in `{tok}`")))?,
                ),
                None => (tok, 1),
            };
            let (sym, idx) = split_name(name)
                .ok_or_else(|| Error::parse(lineno, format!("bad variable `{name}`")))?;
            factors.push((sym, idx, exp));
        }
        raw.push((lineno, coeff, factors));
    }

    let all = raw.iter().flat_map(|(_, _, f)| f.iter());
    let mut symbol = None;
    let mut arity = None;
    for (sym, idx, _) in all {
        if *symbol.get_or_insert(*sym) != *sym {
            return Err(Error::parse(hline, "mixed variable symbols"));
        }
        if *arity.get_or_insert(idx.len()) != idx.len() {
            return Err(Error::parse(
                hline,
                "mixed vector and matrix variable names",
            ));
        }
    }
    let symbol = symbol.unwrap_or('a');
    let table = match arity {
        Some(2) => {
            let n = isqrt(nvars)
                .ok_or_else(|| Error::parse(hline, "matrix variables need a square nvars"))?;
            VarTable::matrix(symbol, n)
        }
        _ => VarTable::vector(symbol, nvars),
    };

    let mut terms = Vec::with_capacity(raw.len());
    for (lineno, coeff, factors) in raw {
        let mut powers = Vec::with_capacity(factors.len());
        for (sym, idx, e) in factors {
            let v = match (table.layout(), idx.as_slice()) {
                (Layout::Vector(n), &[i]) if i < n => i,
                (Layout::Matrix(n), &[i, j]) if i < n && j < n => n * i + j,
                _ => {
                    return Err(Error::parse(
                        lineno,
                        format!("variable {sym}{idx:?} outside the declared universe"),
                    ))
                }
            };
            powers.push((v, e));
        }
        terms.push((Monomial::from_powers(powers), coeff));
    }
    Ok((MultiPoly::from_terms(nvars, terms), table))
}
