//! Text formats.
//!
//! Solution file:
//!
//! ```text
//! n=3
//! 0 1 2
//! 0 1 2
//! 0 1 2
//! # label 0 alpha
//! ```
//!
//! Row `x` lists `σ_x(0) ... σ_x(n-1)`. Label lines are optional.
//!
//! Params file:
//!
//! ```text
//! A = Z/2
//! B = Z/2 x Z/2
//! I = 2
//! phi1: 0 -> 0,0
//! phi1: 1 -> 1,1
//! phi2 = [[1,0]]
//! ```
//!
//! `phi1` lines give the table of the even map `A -> B`, one element per
//! line with comma-separated coordinates. `phi2` is the integer matrix of
//! `B -> A`, one row per factor of `A`. `#` starts a comment; an optional
//! `name = ...` line labels the parameter set.
//!
//! A grid file is a sequence of params blocks separated by `---` lines.

use std::fmt::Write as _;

use thiserror::Error;

use crate::abgroup::{AbElement, AbError, AbHom, EvenMap, FiniteAbelianGroup};
use crate::family::{FamilyError, FamilyParams};
use crate::permgroup::Letter;
use crate::solution::{FiniteSolution, SigmaTable, SolutionError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Group { line: usize, source: AbError },
    #[error("missing `{0}`")]
    Missing(&'static str),
    #[error("{0}")]
    Family(#[from] FamilyError),
    #[error("{0}")]
    Solution(#[from] SolutionError),
    #[error("{0}")]
    Map(AbError),
    #[error("bad word token `{0}`: expected x<index> or x<index>^-1")]
    WordToken(String),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Parses a solution file into an unchecked table.
pub fn parse_solution(text: &str) -> Result<SigmaTable, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, first) = lines.next().ok_or(FormatError::Missing("n=<int>"))?;
    let n: usize = first
        .strip_prefix("n=")
        .or_else(|| first.strip_prefix("n ="))
        .ok_or_else(|| syntax(ln, "expected `n=<int>`"))?
        .trim()
        .parse()
        .map_err(|_| syntax(ln, "expected `n=<int>`"))?;
    if n == 0 {
        return Err(syntax(ln, "n must be positive"));
    }
    let mut rows = Vec::with_capacity(n);
    let mut labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    for (ln, line) in lines {
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(lab) = rest.strip_prefix("label") {
                let lab = lab.trim();
                let (idx, name) = lab
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| syntax(ln, "expected `# label <i> <string>`"))?;
                let idx: usize = idx
                    .parse()
                    .map_err(|_| syntax(ln, "label index is not an integer"))?;
                if idx >= n {
                    return Err(syntax(ln, format!("label index {idx} out of range")));
                }
                labels[idx] = name.trim().to_string();
            }
            continue;
        }
        if rows.len() == n {
            return Err(syntax(ln, format!("more than {n} rows")));
        }
        let row: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| syntax(ln, "row entries must be non-negative integers"))?;
        if row.len() != n {
            return Err(syntax(ln, format!("row has {} entries, expected {n}", row.len())));
        }
        if let Some(&v) = row.iter().find(|&&v| v >= n) {
            return Err(syntax(ln, format!("entry {v} out of range")));
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(syntax(text.lines().count(), format!("expected {n} rows, found {}", rows.len())));
    }
    Ok(SigmaTable::with_labels(labels, rows))
}

/// Writes a solution file. Labels equal to the index are omitted.
pub fn write_solution(s: &FiniteSolution) -> String {
    let n = s.len();
    let mut out = format!("n={n}\n");
    for x in 0..n {
        let row: Vec<String> = s.sigma(x).images().iter().map(u32::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    for x in 0..n {
        if s.label(x) != x.to_string() {
            let _ = writeln!(out, "# label {x} {}", s.label(x));
        }
    }
    out
}

/// A parsed params block, with its optional name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedParams {
    pub name: Option<String>,
    pub params: FamilyParams,
}

fn parse_coords(g: &FiniteAbelianGroup, s: &str, line: usize) -> Result<AbElement, FormatError> {
    let coords: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| syntax(line, format!("bad element `{s}`")))?;
    g.element_exact(&coords)
        .map_err(|source| FormatError::Group { line, source })
}

fn parse_matrix(s: &str, line: usize) -> Result<Vec<Vec<i64>>, FormatError> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = compact
        .strip_prefix("[[")
        .and_then(|t| t.strip_suffix("]]"))
        .ok_or_else(|| syntax(line, "matrix must look like [[1,0],[0,1]]"))?;
    inner
        .split("],[")
        .map(|row| {
            row.split(',')
                .map(|t| t.parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| syntax(line, format!("bad matrix row `{row}`")))
        })
        .collect()
}

/// Parses one params block. `first_line` is the file line number of its first line.
pub fn parse_params_at(text: &str, first_line: usize) -> Result<NamedParams, FormatError> {
    let mut name = None;
    let mut a: Option<FiniteAbelianGroup> = None;
    let mut b: Option<FiniteAbelianGroup> = None;
    let mut i_count: Option<usize> = None;
    let mut phi1_lines: Vec<(usize, String, String)> = Vec::new();
    let mut phi2: Option<(usize, Vec<Vec<i64>>)> = None;

    for (k, raw) in text.lines().enumerate() {
        let ln = first_line + k;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("phi1") {
            let rest = rest.trim_start();
            let entry = rest
                .strip_prefix(':')
                .ok_or_else(|| syntax(ln, "expected `phi1: <a> -> <b>`"))?;
            let (l, r) = entry
                .split_once("->")
                .ok_or_else(|| syntax(ln, "expected `phi1: <a> -> <b>`"))?;
            phi1_lines.push((ln, l.trim().to_string(), r.trim().to_string()));
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| syntax(ln, format!("expected `key = value`, got `{line}`")))?;
        let value = value.trim();
        let group = |v: &str| {
            v.parse::<FiniteAbelianGroup>()
                .map_err(|source| FormatError::Group { line: ln, source })
        };
        match key.trim() {
            "A" => a = Some(group(value)?),
            "B" => b = Some(group(value)?),
            "I" => {
                i_count = Some(
                    value
                        .parse()
                        .map_err(|_| syntax(ln, "I must be a positive integer"))?,
                )
            }
            "phi2" => phi2 = Some((ln, parse_matrix(value, ln)?)),
            "name" => name = Some(value.to_string()),
            other => return Err(syntax(ln, format!("unknown key `{other}`"))),
        }
    }
    let a = a.ok_or(FormatError::Missing("A = ..."))?;
    let b = b.ok_or(FormatError::Missing("B = ..."))?;
    let i_count = i_count.ok_or(FormatError::Missing("I = ..."))?;
    let (phi2_line, matrix) = phi2.ok_or(FormatError::Missing("phi2 = [[...]]"))?;
    if phi1_lines.is_empty() {
        return Err(FormatError::Missing("phi1: <a> -> <b>"));
    }
    let mut table = Vec::with_capacity(phi1_lines.len());
    for (ln, l, r) in &phi1_lines {
        table.push((parse_coords(&a, l, *ln)?, parse_coords(&b, r, *ln)?));
    }
    let phi1 = EvenMap::new(a.clone(), b.clone(), table)
        .validate()
        .map_err(FormatError::Map)?;
    let phi2 = AbHom::new(b.clone(), a.clone(), matrix)
        .validate()
        .map_err(|source| FormatError::Group {
            line: phi2_line,
            source,
        })?;
    Ok(NamedParams {
        name,
        params: FamilyParams::new(a, b, i_count, phi1, phi2)?,
    })
}

pub fn parse_params(text: &str) -> Result<NamedParams, FormatError> {
    parse_params_at(text, 1)
}

/// Splits a grid file on `---` lines and parses every block.
pub fn parse_grid(text: &str) -> Result<Vec<NamedParams>, FormatError> {
    let mut out = Vec::new();
    let mut block = String::new();
    let mut block_start = 1;
    for (k, line) in text.lines().enumerate() {
        if line.trim() == "---" {
            if !block.trim().is_empty() {
                out.push(parse_params_at(&block, block_start)?);
            }
            block.clear();
            block_start = k + 2;
        } else {
            block.push_str(line);
            block.push('\n');
        }
    }
    if !block.trim().is_empty() {
        out.push(parse_params_at(&block, block_start)?);
    }
    Ok(out)
}

fn coords_csv(x: &AbElement) -> String {
    x.coords()
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

pub fn write_params(p: &FamilyParams, name: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(n) = name {
        let _ = writeln!(out, "name = {n}");
    }
    let _ = writeln!(out, "A = {}", p.a());
    let _ = writeln!(out, "B = {}", p.b());
    let _ = writeln!(out, "I = {}", p.i_count());
    for (x, y) in p.phi1().table() {
        let _ = writeln!(out, "phi1: {} -> {}", coords_csv(&x), coords_csv(&y));
    }
    let rows: Vec<String> = p
        .phi2()
        .matrix()
        .iter()
        .map(|r| {
            format!(
                "[{}]",
                r.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
            )
        })
        .collect();
    let _ = writeln!(out, "phi2 = [{}]", rows.join(","));
    out
}

/// Parses `x3 x5^-1 x0` into letters.
pub fn parse_word(text: &str) -> Result<Vec<Letter>, FormatError> {
    text.split_whitespace()
        .map(|tok| {
            let bad = || FormatError::WordToken(tok.to_string());
            let body = tok.strip_prefix('x').ok_or_else(bad)?;
            let (idx, inverse) = match body.split_once('^') {
                Some((i, "-1")) => (i, true),
                Some((i, "1")) => (i, false),
                Some(_) => return Err(bad()),
                None => (body, false),
            };
            let idx: usize = idx.parse().map_err(|_| bad())?;
            Ok(Letter::new(idx, inverse))
        })
        .collect()
}

pub fn write_word(word: &[Letter]) -> String {
    word.iter()
        .map(|l| {
            if l.inverse {
                format!("x{}^-1", l.generator)
            } else {
                format!("x{}", l.generator)
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}
