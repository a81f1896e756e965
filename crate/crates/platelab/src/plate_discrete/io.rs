//! Columnar text export and sampled-profile import.

use std::fmt::Write as _;
use std::path::Path;

use super::spectral::SpectralScale;
use super::{DiscretePlateOperator, Profile};
use crate::error::{Error, Result};
use crate::fmt_f64;

/// Three whitespace-separated tables, each introduced by a `# table` line:
/// `nodes` (unknown index, coordinates, trapezoid weight), `triplets`
/// (row, column, value of the stored matrix, nonzeros only) and, when a
/// spectrum is given, `eigenvalues` (index, value).
pub fn write_columnar(op: &DiscretePlateOperator, scale: Option<&SpectralScale>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# platelab operator bc={} param={} dim={} size={}", op.bc, fmt_f64(op.param), op.grid.dim(), op.size());
    let axes = if op.grid.dim() == 1 { "x" } else { "x y" };
    let _ = writeln!(s, "# table nodes: k {axes} weight");
    for (k, (node, w)) in op.unknowns.iter().zip(&op.weights).enumerate() {
        let x: Vec<String> = op.grid.coords(*node).into_iter().map(fmt_f64).collect();
        let _ = writeln!(s, "{k} {} {}", x.join(" "), fmt_f64(*w));
    }
    let _ = writeln!(s, "# table triplets: i j value");
    for j in 0..op.size() {
        for i in 0..op.size() {
            let v = op.matrix[(i, j)];
            if v != 0.0 {
                let _ = writeln!(s, "{i} {j} {}", fmt_f64(v));
            }
        }
    }
    if let Some(sc) = scale {
        let _ = writeln!(s, "# table eigenvalues: k mu");
        for (k, mu) in sc.values.iter().enumerate() {
            let _ = writeln!(s, "{k} {}", fmt_f64(*mu));
        }
    }
    s
}

/// Two columns `x value`, strictly increasing `x`; `#` starts a comment.
pub fn parse_profile_file(text: &str) -> Result<Profile> {
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: ln + 1, msg };
        let cols: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|c| !c.is_empty()).collect();
        if cols.len() != 2 {
            return Err(err(format!("expected `x value`, found {} columns", cols.len())));
        }
        let x: f64 = cols[0].parse().map_err(|_| err(format!("bad number `{}`", cols[0])))?;
        let v: f64 = cols[1].parse().map_err(|_| err(format!("bad number `{}`", cols[1])))?;
        if !x.is_finite() || !v.is_finite() {
            return Err(err("non-finite sample".into()));
        }
        if xs.last().is_some_and(|p| x <= *p) {
            return Err(err("x must be strictly increasing".into()));
        }
        xs.push(x);
        vs.push(v);
    }
    if xs.is_empty() {
        return Err(Error::Parse { line: 0, msg: "no samples".into() });
    }
    Ok(Profile::Sampled { x: xs, values: vs })
}

pub fn read_profile_file(path: &Path) -> Result<Profile> {
    parse_profile_file(&std::fs::read_to_string(path)?)
}
