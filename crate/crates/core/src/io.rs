//! File formats.
//!
//! Polynomials use a line-oriented text format:
//!
//! ```text
//! # optional comments
//! degree 2
//! 2 0 1        # i j re [im]  ->  coefficient of x^i y^j
//! 0 2 1
//! 0 0 -1
//! ```
//!
//! The `degree` header is optional; without it the degree is the largest
//! `i + j` present. Representations, normalisation records, quality reports
//! and root sets are JSON, with complex numbers written as `[re, im]`.

use std::fmt::Write as _;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{CMatrix, C64};
use crate::mep::{Root, RootSet};
use crate::minrep::PencilRep;
use crate::poly::BivariatePoly;
use crate::transform::NormalizationRecord;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Shape(String),
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

pub fn parse_poly(text: &str) -> Result<BivariatePoly, FormatError> {
    let mut declared = None;
    let mut terms: Vec<(usize, usize, C64)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields[0].eq_ignore_ascii_case("degree") {
            if declared.is_some() || !terms.is_empty() {
                return Err(parse_err(line, "degree header must come first and only once"));
            }
            let [_, n] = fields[..] else {
                return Err(parse_err(line, "expected `degree <n>`"));
            };
            declared = Some(n.parse::<usize>().map_err(|e| parse_err(line, format!("bad degree: {e}")))?);
            continue;
        }
        if !(3..=4).contains(&fields.len()) {
            return Err(parse_err(line, "expected `i j re [im]`"));
        }
        let index = |s: &str| s.parse::<usize>().map_err(|e| parse_err(line, format!("bad exponent `{s}`: {e}")));
        let real = |s: &str| match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(_) => Err(parse_err(line, format!("non-finite coefficient `{s}`"))),
            Err(e) => Err(parse_err(line, format!("bad coefficient `{s}`: {e}"))),
        };
        let (i, j) = (index(fields[0])?, index(fields[1])?);
        let re = real(fields[2])?;
        let im = fields.get(3).map(|s| real(s)).transpose()?.unwrap_or(0.0);
        if let Some(n) = declared {
            if i + j > n {
                return Err(parse_err(line, format!("term x^{i} y^{j} exceeds degree {n}")));
            }
        }
        terms.push((i, j, C64::new(re, im)));
    }
    let n = declared.unwrap_or_else(|| terms.iter().map(|&(i, j, _)| i + j).max().unwrap_or(0));
    let mut p = BivariatePoly::zero(n);
    for (i, j, v) in terms {
        let sum = p.coeff(i, j) + v;
        p.set_coeff(i, j, sum).expect("checked against degree");
    }
    Ok(p)
}

pub fn format_poly(p: &BivariatePoly) -> String {
    let mut out = format!("degree {}\n", p.degree_bound());
    for (i, j, v) in p.terms().filter(|t| t.2.norm() != 0.0) {
        if v.im == 0.0 {
            writeln!(out, "{i} {j} {}", v.re).unwrap();
        } else {
            writeln!(out, "{i} {j} {} {}", v.re, v.im).unwrap();
        }
    }
    out
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

fn flatten(m: &CMatrix) -> Vec<[f64; 2]> {
    m.row_iter().flat_map(|row| row.iter().map(|&z| pair(z)).collect::<Vec<_>>()).collect()
}

#[derive(Serialize, Deserialize)]
struct RepJson {
    m: usize,
    #[serde(rename = "A")]
    a: Vec<[f64; 2]>,
    #[serde(rename = "B")]
    b: Vec<[f64; 2]>,
    #[serde(rename = "C")]
    c: Vec<[f64; 2]>,
}

/// `{"m": n, "A": [[re, im], ...], "B": ..., "C": ...}`, row-major.
pub fn rep_to_json(rep: &PencilRep) -> String {
    let json = RepJson { m: rep.order(), a: flatten(&rep.a), b: flatten(&rep.b), c: flatten(&rep.c) };
    serde_json::to_string(&json).expect("plain data")
}

pub fn rep_from_json(text: &str) -> Result<PencilRep, FormatError> {
    let json: RepJson = serde_json::from_str(text)?;
    let m = json.m;
    let build = |name: &str, data: &[[f64; 2]]| {
        if data.len() != m * m {
            return Err(FormatError::Shape(format!("{name} has {} entries, expected {}", data.len(), m * m)));
        }
        Ok(CMatrix::from_row_iterator(m, m, data.iter().map(|&p| unpair(p))))
    };
    let (a, b, c) = (build("A", &json.a)?, build("B", &json.b)?, build("C", &json.c)?);
    PencilRep::new(a, b, c).map_err(|e| FormatError::Shape(e.to_string()))
}

#[derive(Serialize)]
struct NormalizationJson {
    #[serde(rename = "T")]
    matrix: Vec<[f64; 2]>,
    s: [f64; 2],
    t: [f64; 2],
    normalized: String,
}

/// Transform row-major, shift parameters and the normalised polynomial in
/// the text format.
pub fn normalization_to_json(record: &NormalizationRecord) -> String {
    let m: &Matrix3<C64> = record.transform.matrix();
    let matrix = (0..3).flat_map(|i| (0..3).map(move |j| pair(m[(i, j)]))).collect();
    let json = NormalizationJson {
        matrix,
        s: pair(record.shift_s),
        t: pair(record.shift_t),
        normalized: format_poly(&record.normalized),
    };
    serde_json::to_string(&json).expect("plain data")
}

#[derive(Serialize)]
struct RootJson {
    x: [f64; 2],
    y: [f64; 2],
    residual_p: f64,
    residual_q: f64,
}

#[derive(Serialize)]
struct RootSetJson {
    count: usize,
    roots: Vec<RootJson>,
}

pub fn roots_to_json(set: &RootSet) -> String {
    let roots = set
        .roots
        .iter()
        .map(|r: &Root| RootJson { x: pair(r.x), y: pair(r.y), residual_p: r.residual_p, residual_q: r.residual_q })
        .collect();
    serde_json::to_string(&RootSetJson { count: set.count, roots }).expect("plain data")
}

pub fn roots_to_csv(set: &RootSet) -> String {
    let mut out = String::from("x_re,x_im,y_re,y_im,res_p,res_q\n");
    for r in &set.roots {
        writeln!(out, "{},{},{},{},{:e},{:e}", r.x.re, r.x.im, r.y.re, r.y.im, r.residual_p, r.residual_q).unwrap();
    }
    out
}

/// Accepts `a`, `a,b`, `a+bi`, `a-bi`, `bi`.
pub fn parse_complex(s: &str) -> Option<C64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Some(C64::new(v, 0.0));
    }
    if let Some((re, im)) = s.split_once(',') {
        return Some(C64::new(re.trim().parse().ok()?, im.trim().parse().ok()?));
    }
    let body = s.strip_suffix('i')?;
    // Split at the last sign that is not a leading sign or an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| {
        (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E')
    });
    let unit = |t: &str| match t {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => t.parse().ok(),
    };
    match split {
        Some(k) => Some(C64::new(body[..k].parse().ok()?, unit(&body[k..])?)),
        None => Some(C64::new(0.0, unit(body)?)),
    }
}

pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}
