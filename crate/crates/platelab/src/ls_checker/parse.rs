//! Declarative text format for boundary pairs.
//!
//! ```text
//! # comment
//! name = my_pair
//! b1.order = 0
//! b1.coef0 = const 1
//! b2.order = 3
//! b2.coef1 = metric 2 0 2
//! b2.coef3 = const 0 1
//! ```
//!
//! `bK.coefM` is the tangential coefficient of `ξ_d^M` (normal derivatives
//! written as `∂_n ↦ -iξ_d`). Terms are joined by ` + ` and read
//! `const RE [IM]`, `metric P RE [IM]` for `|ξ'|^P`, or
//! `linear P RE IM V1,V2,...` for `(v·ξ')^P`.

use std::collections::BTreeMap;

use super::catalog::BoundaryPair;
use super::symbol::{BoundaryOperatorSymbol, TangentialPoly, TangentialTerm};
use crate::error::{Error, Result};
use crate::C64;

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

fn num(line: usize, s: &str) -> Result<f64> {
    s.parse::<f64>().or_else(|_| perr(line, format!("not a number: `{s}`")))
}

fn parse_term(line: usize, s: &str) -> Result<TangentialTerm> {
    let tok: Vec<&str> = s.split_whitespace().collect();
    let complex = |re: &str, im: Option<&&str>| -> Result<C64> {
        Ok(C64::new(num(line, re)?, im.map(|v| num(line, v)).transpose()?.unwrap_or(0.0)))
    };
    match tok.as_slice() {
        ["const", re, rest @ ..] if rest.len() <= 1 => Ok(TangentialTerm::Const { coef: complex(re, rest.first())? }),
        ["metric", p, re, rest @ ..] if rest.len() <= 1 => {
            let power = p.parse().or_else(|_| perr(line, format!("bad power `{p}`")))?;
            Ok(TangentialTerm::MetricPower { power, coef: complex(re, rest.first())? })
        }
        ["linear", p, re, im, v] => {
            let power = p.parse().or_else(|_| perr(line, format!("bad power `{p}`")))?;
            let dir = v.split(',').map(|c| num(line, c)).collect::<Result<Vec<_>>>()?;
            Ok(TangentialTerm::Linear { power, coef: complex(re, Some(im))?, dir })
        }
        _ => perr(line, format!("cannot read term `{s}`")),
    }
}

#[derive(Default)]
struct Partial {
    order: Option<(usize, u32)>,
    coeffs: BTreeMap<usize, (usize, TangentialPoly)>,
}

impl Partial {
    fn finish(self, which: &str) -> Result<BoundaryOperatorSymbol> {
        let (_, order) = self.order.ok_or_else(|| Error::Parse { line: 0, msg: format!("{which}.order missing") })?;
        let len = self.coeffs.keys().next_back().map_or(0, |m| m + 1);
        let mut coeffs = vec![TangentialPoly::default(); len];
        let mut lines = vec![0; len];
        for (m, (line, c)) in self.coeffs {
            coeffs[m] = c;
            lines[m] = line;
        }
        let sym = BoundaryOperatorSymbol { order, coeffs };
        sym.validate().map_err(|e| Error::Parse {
            line: lines.iter().copied().max().unwrap_or(0),
            msg: format!("{which}: {e}"),
        })?;
        Ok(sym)
    }
}

pub fn parse_boundary_pair(text: &str) -> Result<BoundaryPair> {
    let mut name = None;
    let mut parts = [Partial::default(), Partial::default()];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return perr(line, "expected `key = value`");
        };
        let (key, value) = (key.trim(), value.trim());
        if key == "name" {
            name = Some(value.to_string());
            continue;
        }
        let Some((op, field)) = key.split_once('.') else {
            return perr(line, format!("unknown key `{key}`"));
        };
        let slot = match op {
            "b1" => &mut parts[0],
            "b2" => &mut parts[1],
            _ => return perr(line, format!("unknown operator `{op}`")),
        };
        if field == "order" {
            let k = value.parse().or_else(|_| perr(line, format!("bad order `{value}`")))?;
            slot.order = Some((line, k));
        } else if let Some(m) = field.strip_prefix("coef") {
            let m: usize = m.parse().or_else(|_| perr(line, format!("bad coefficient index in `{key}`")))?;
            if m > 3 {
                return perr(line, "normal order above 3");
            }
            let terms = value.split(" + ").map(|t| parse_term(line, t.trim())).collect::<Result<Vec<_>>>()?;
            slot.coeffs.insert(m, (line, TangentialPoly(terms)));
        } else {
            return perr(line, format!("unknown field `{field}`"));
        }
    }
    let [p1, p2] = parts;
    Ok(BoundaryPair {
        name: name.unwrap_or_else(|| "custom".into()),
        b1: p1.finish("b1")?,
        b2: p2.finish("b2")?,
    })
}

fn write_term(t: &TangentialTerm) -> String {
    match t {
        TangentialTerm::Const { coef } => format!("const {:?} {:?}", coef.re, coef.im),
        TangentialTerm::MetricPower { power, coef } => format!("metric {power} {:?} {:?}", coef.re, coef.im),
        TangentialTerm::Linear { power, coef, dir } => {
            let v: Vec<String> = dir.iter().map(|d| format!("{d:?}")).collect();
            format!("linear {power} {:?} {:?} {}", coef.re, coef.im, v.join(","))
        }
    }
}

/// Inverse of [`parse_boundary_pair`].
pub fn write_boundary_pair(pair: &BoundaryPair) -> String {
    let mut out = format!("name = {}\n", pair.name);
    for (tag, b) in [("b1", &pair.b1), ("b2", &pair.b2)] {
        out.push_str(&format!("{tag}.order = {}\n", b.order));
        for (m, c) in b.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let terms: Vec<String> = c.0.iter().map(write_term).collect();
            out.push_str(&format!("{tag}.coef{m} = {}\n", terms.join(" + ")));
        }
    }
    out
}
