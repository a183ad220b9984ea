//! Plain-text instance files.
//!
//! - `.mtns`: first line `m n`, then `i1 ... im value` for each nonzero entry
//!   (1-based indices, whitespace-separated); missing entries are zero.
//! - `.vec`: first line `n`, then one value per line.
//! - `.hdr`: `key=value` lines with `omega`, `m`, `n` and `b_class`.
//!
//! An instance is stored scaled (`Â`, `b̂`) together with `omega`, so the
//! original data is `omega * Â`, `omega * b̂`. Values are written in the
//! shortest form that parses back to the same `f64`.

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{MteqError, Result};
use crate::model::{BClass, MTensorEquation};
use crate::tensor::{advance, DenseTensor};

fn parse_err(line: usize, message: impl Into<String>) -> MteqError {
    MteqError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} {tok:?}")))
}

/// Non-empty lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn tensor_to_string(t: &DenseTensor) -> String {
    let mut out = format!("{} {}\n", t.order(), t.dim());
    let mut idx = vec![0usize; t.order()];
    for &v in t.entries() {
        if v != 0.0 {
            for i in &idx {
                out.push_str(&format!("{} ", i + 1));
            }
            out.push_str(&format!("{v:e}\n"));
        }
        advance(&mut idx, t.dim());
    }
    out
}

pub fn parse_tensor(text: &str) -> Result<DenseTensor> {
    let mut lines = content_lines(text);
    let (ln, first) = lines.next().ok_or_else(|| parse_err(1, "empty tensor file"))?;
    let head: Vec<&str> = first.split_whitespace().collect();
    let [m, n] = head[..] else {
        return Err(parse_err(ln, "expected `m n`"));
    };
    let m: usize = parse_num(m, ln, "order")?;
    let n: usize = parse_num(n, ln, "dimension")?;
    let mut t = DenseTensor::zeros(m, n)?;
    let mut idx = vec![0usize; m];
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != m + 1 {
            return Err(parse_err(ln, format!("expected {} fields, found {}", m + 1, toks.len())));
        }
        for (slot, tok) in idx.iter_mut().zip(&toks) {
            let i: usize = parse_num(tok, ln, "index")?;
            if i < 1 || i > n {
                return Err(parse_err(ln, format!("index {i} outside 1..={n}")));
            }
            *slot = i - 1;
        }
        let v: f64 = parse_num(toks[m], ln, "value")?;
        if !v.is_finite() {
            return Err(parse_err(ln, format!("non-finite value {v}")));
        }
        t.set(&idx, v);
    }
    Ok(t)
}

pub fn vector_to_string(v: &[f64]) -> String {
    let mut out = format!("{}\n", v.len());
    for x in v {
        out.push_str(&format!("{x:e}\n"));
    }
    out
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut lines = content_lines(text);
    let (ln, first) = lines.next().ok_or_else(|| parse_err(1, "empty vector file"))?;
    let n: usize = parse_num(first, ln, "length")?;
    let v = lines
        .map(|(ln, l)| {
            let x: f64 = parse_num(l, ln, "value")?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(parse_err(ln, format!("non-finite value {x}")))
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    if v.len() != n {
        return Err(MteqError::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    Ok(v)
}

/// Instance metadata stored next to the tensor and vector files.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceHeader {
    pub omega: f64,
    pub order: usize,
    pub dim: usize,
    pub b_class: BClass,
}

impl InstanceHeader {
    pub fn of(eq: &MTensorEquation) -> Self {
        Self {
            omega: eq.omega(),
            order: eq.order(),
            dim: eq.dim(),
            b_class: eq.b_class(),
        }
    }

    pub fn to_text(&self) -> String {
        format!(
            "omega={:e}\nm={}\nn={}\nb_class={}\n",
            self.omega,
            self.order,
            self.dim,
            self.b_class.as_str()
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map = HashMap::new();
        for (ln, line) in content_lines(text) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| parse_err(ln, "expected key=value"))?;
            map.insert(k.trim(), (ln, v.trim()));
        }
        let get = |key: &str| {
            map.get(key)
                .copied()
                .ok_or_else(|| parse_err(0, format!("missing key {key}")))
        };
        let (ln, v) = get("omega")?;
        let omega = parse_num(v, ln, "omega")?;
        let (ln, v) = get("m")?;
        let order = parse_num(v, ln, "order")?;
        let (ln, v) = get("n")?;
        let dim = parse_num(v, ln, "dimension")?;
        let (ln, v) = get("b_class")?;
        let b_class = v.parse().map_err(|_| parse_err(ln, format!("unknown b_class {v:?}")))?;
        Ok(Self {
            omega,
            order,
            dim,
            b_class,
        })
    }
}

/// Paths `<base>.mtns`, `<base>.vec`, `<base>.hdr`.
pub fn instance_paths(base: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let with = |ext: &str| {
        let mut s = base.as_os_str().to_owned();
        s.push(".");
        s.push(ext);
        PathBuf::from(s)
    };
    (with("mtns"), with("vec"), with("hdr"))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

pub fn write_tensor(t: &DenseTensor, path: &Path) -> Result<()> {
    write_text(path, &tensor_to_string(t))
}

pub fn read_tensor(path: &Path) -> Result<DenseTensor> {
    parse_tensor(&fs::read_to_string(path)?)
}

pub fn write_vector(v: &[f64], path: &Path) -> Result<()> {
    write_text(path, &vector_to_string(v))
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    parse_vector(&fs::read_to_string(path)?)
}

/// Writes the scaled instance to `<base>.mtns`, `<base>.vec` and `<base>.hdr`.
pub fn save_instance(eq: &MTensorEquation, base: &Path) -> Result<()> {
    let (t, v, h) = instance_paths(base);
    write_tensor(eq.tensor(), &t)?;
    write_vector(eq.rhs(), &v)?;
    write_text(&h, &InstanceHeader::of(eq).to_text())
}

/// Loads an instance written by [`save_instance`].
///
/// Without a `.hdr` file the pair is taken as unscaled data `A`, `b`: the
/// tensor is semi-symmetrized and scaled as usual.
pub fn load_instance(base: &Path) -> Result<MTensorEquation> {
    let (t, v, h) = instance_paths(base);
    let tensor = read_tensor(&t)?;
    let rhs = read_vector(&v)?;
    if !h.exists() {
        return MTensorEquation::new(tensor, rhs, true);
    }
    let header = InstanceHeader::parse(&fs::read_to_string(&h)?)?;
    if header.order != tensor.order() || header.dim != tensor.dim() {
        return Err(MteqError::Config(format!(
            "header says m={} n={}, tensor file has m={} n={}",
            header.order,
            header.dim,
            tensor.order(),
            tensor.dim()
        )));
    }
    let eq = MTensorEquation::from_scaled(tensor, rhs, header.omega)?;
    if eq.b_class() != header.b_class {
        return Err(MteqError::Config(format!(
            "header b_class {} does not match the vector ({})",
            header.b_class.as_str(),
            eq.b_class().as_str()
        )));
    }
    Ok(eq)
}
