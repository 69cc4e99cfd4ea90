//! Plain-text code files.
//!
//! ```text
//! # optional comments
//! field 5^1
//! n 4
//! k 2
//! 1 2 0 0
//! 0 0 1 2
//! ```
//!
//! Entries are the integer encodings of field elements. The body may list
//! any generating set, but its rank must equal the declared `k`. The writer
//! always emits the RREF generator.

use crate::code::LinearCode;
use crate::error::{Error, Result};
use crate::gf::{make_field, parse_field_spec};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    key: &str,
    last: usize,
) -> Result<(usize, &'a str)> {
    let (no, line) = lines
        .next()
        .ok_or_else(|| parse_err(last, format!("missing '{key}' header")))?;
    match line.split_once(char::is_whitespace) {
        Some((k, v)) if k == key => Ok((no, v.trim())),
        _ => Err(parse_err(no, format!("expected '{key} <value>', found '{line}'"))),
    }
}

fn parse_count(no: usize, key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| parse_err(no, format!("'{key}' must be a non-negative integer, found '{v}'")))
}

pub fn parse_code_file(text: &str) -> Result<LinearCode> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let total = text.lines().count().max(1);

    let (no, spec) = header(&mut lines, "field", total)?;
    let (p, m) = parse_field_spec(spec).map_err(|e| parse_err(no, e.to_string()))?;
    let f = make_field(p, m).map_err(|e| parse_err(no, e.to_string()))?;
    let (no, v) = header(&mut lines, "n", total)?;
    let n = parse_count(no, "n", v)?;
    if n == 0 {
        return Err(parse_err(no, "n must be positive"));
    }
    let (no, v) = header(&mut lines, "k", total)?;
    let k = parse_count(no, "k", v)?;
    if k > n {
        return Err(parse_err(no, format!("k = {k} exceeds n = {n}")));
    }

    let mut rows = Vec::new();
    for (no, line) in lines {
        let row = line
            .split_whitespace()
            .map(|tok| {
                let x: u64 = tok
                    .parse()
                    .map_err(|_| parse_err(no, format!("'{tok}' is not an integer")))?;
                if x >= f.order() as u64 {
                    return Err(parse_err(
                        no,
                        format!("entry {x} is outside GF({}) (q = {})", f.name(), f.order()),
                    ));
                }
                Ok(x as u32)
            })
            .collect::<Result<Vec<u32>>>()?;
        if row.len() != n {
            return Err(parse_err(no, format!("row has {} entries, expected {n}", row.len())));
        }
        rows.push(row);
    }
    let code = LinearCode::from_values(&f, n, &rows)?;
    if code.k() != k {
        return Err(parse_err(
            total,
            format!("body has rank {}, but the header declares k = {k}", code.k()),
        ));
    }
    Ok(code)
}

pub fn write_code_file(c: &LinearCode) -> String {
    let mut out = format!("field {}\nn {}\nk {}\n", c.ctx().name(), c.n(), c.k());
    for row in c.generator().values() {
        let row: Vec<String> = row.iter().map(u32::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
