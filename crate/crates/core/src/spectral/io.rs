//! `TORUSFIELD v1` field files.
//!
//! A file is one ASCII header line
//!
//! ```text
//! TORUSFIELD v1; n=<n>; sizes=<N_1,...,N_n>
//! ```
//!
//! terminated by `\n`, followed by the `Π N_i` values in row-major order
//! (last axis fastest) in one of two encodings:
//!
//! * [`Encoding::Csv`]: one line per run of the last axis, `N_n` values separated by
//!   commas, each line terminated by `\n`. Values use Rust's shortest
//!   round-trip exponent notation, so text files also reproduce the field exactly.
//! * [`Encoding::Binary`]: the values as consecutive little-endian IEEE-754
//!   doubles, nothing after them.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

use super::field::ScalarField;
use super::grid::TorusGrid;

pub const MAGIC: &str = "TORUSFIELD v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    Csv,
    Binary,
}

impl std::str::FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Encoding::Csv),
            "binary" => Ok(Encoding::Binary),
            other => Err(Error::InvalidArgument(format!(
                "unknown encoding `{other}`"
            ))),
        }
    }
}

pub fn header(grid: &TorusGrid) -> String {
    let sizes: Vec<String> = grid.sizes().iter().map(|s| s.to_string()).collect();
    format!("{MAGIC}; n={}; sizes={}", grid.dim(), sizes.join(","))
}

pub fn encode(field: &ScalarField, encoding: Encoding) -> Vec<u8> {
    let mut out = header(field.grid()).into_bytes();
    out.push(b'\n');
    match encoding {
        Encoding::Binary => {
            out.reserve(8 * field.len());
            for v in field.values() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Encoding::Csv => {
            let row = *field.grid().sizes().last().expect("dimension >= 2");
            let mut text = String::with_capacity(field.len() * 24);
            for line in field.values().chunks(row) {
                for (i, v) in line.iter().enumerate() {
                    if i > 0 {
                        text.push(',');
                    }
                    write!(text, "{v:e}").expect("write to string");
                }
                text.push('\n');
            }
            out.extend_from_slice(text.as_bytes());
        }
    }
    out
}

/// Parses the header line; returns the grid sizes and the byte offset of the body.
pub fn parse_header(bytes: &[u8]) -> Result<(Vec<usize>, usize)> {
    let end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::parse(1, 1, "missing header line terminator"))?;
    let line = std::str::from_utf8(&bytes[..end])
        .map_err(|e| Error::parse(1, e.valid_up_to() + 1, "header is not valid UTF-8"))?;
    let line = line.strip_suffix('\r').unwrap_or(line);

    let mut parts = line.split(';');
    let mut column = 1;
    let magic = parts.next().unwrap_or_default();
    if magic.trim() != MAGIC {
        return Err(Error::parse(1, 1, format!("expected `{MAGIC}`")));
    }
    column += magic.len() + 1;

    let mut dim = None;
    let mut sizes = None;
    for part in parts {
        let trimmed = part.trim_start();
        let col = column + (part.len() - trimmed.len());
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| Error::parse(1, col, "expected key=value"))?;
        let value_col = col + key.len() + 1;
        match key.trim() {
            "n" => {
                let n: usize = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(1, value_col, "invalid dimension"))?;
                dim = Some(n);
            }
            "sizes" => {
                let mut list = Vec::new();
                let mut offset = value_col;
                for item in value.split(',') {
                    let size: usize = item
                        .trim()
                        .parse()
                        .map_err(|_| Error::parse(1, offset, "invalid axis size"))?;
                    list.push(size);
                    offset += item.len() + 1;
                }
                sizes = Some(list);
            }
            other => {
                return Err(Error::parse(
                    1,
                    col,
                    format!("unknown header key `{other}`"),
                ));
            }
        }
        column += part.len() + 1;
    }
    let dim = dim.ok_or_else(|| Error::parse(1, column, "header is missing n="))?;
    let sizes = sizes.ok_or_else(|| Error::parse(1, column, "header is missing sizes="))?;
    if sizes.len() != dim {
        return Err(Error::parse(
            1,
            1,
            format!("n={dim} but {} sizes were given", sizes.len()),
        ));
    }
    Ok((sizes, end + 1))
}

/// Guesses the body encoding: binary when the body is exactly `8 * len` bytes
/// and is not a well-formed CSV body.
pub fn detect_encoding(bytes: &[u8]) -> Result<Encoding> {
    let (sizes, offset) = parse_header(bytes)?;
    let len: usize = sizes
        .iter()
        .try_fold(1usize, |a, &s| a.checked_mul(s))
        .unwrap_or(0);
    let body = &bytes[offset..];
    let looks_binary = len.checked_mul(8) == Some(body.len());
    let looks_text = body
        .iter()
        .all(|b| b.is_ascii_digit() || b"+-.,eEinfNa\n\r ".contains(b));
    Ok(if looks_binary && !(looks_text && body.ends_with(b"\n")) {
        Encoding::Binary
    } else {
        Encoding::Csv
    })
}

pub fn decode(bytes: &[u8], encoding: Encoding) -> Result<ScalarField> {
    let (sizes, offset) = parse_header(bytes)?;
    let grid = TorusGrid::new(&sizes)
        .map_err(|e| Error::parse(1, 1, format!("header describes an invalid grid: {e}")))?;
    let body = &bytes[offset..];
    let values = match encoding {
        Encoding::Binary => {
            if body.len() != 8 * grid.len() {
                return Err(Error::parse(
                    2,
                    1,
                    format!(
                        "expected {} bytes of data, found {}",
                        8 * grid.len(),
                        body.len()
                    ),
                ));
            }
            body.chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
                .collect()
        }
        Encoding::Csv => decode_csv(body, &grid)?,
    };
    ScalarField::from_values(&grid, values).map_err(|e| match e {
        Error::NonFinite { point } => Error::parse(
            2 + point / grid.sizes()[grid.dim() - 1],
            1,
            format!("non-finite value at point {point}"),
        ),
        other => other,
    })
}

fn decode_csv(body: &[u8], grid: &TorusGrid) -> Result<Vec<f64>> {
    let text = std::str::from_utf8(body)
        .map_err(|e| Error::parse(2, e.valid_up_to() + 1, "body is not valid UTF-8"))?;
    let row = grid.sizes()[grid.dim() - 1];
    let rows = grid.len() / row;
    // Every value takes at least two bytes, so a lying header cannot force a huge reservation.
    let mut values = Vec::with_capacity(grid.len().min(body.len() / 2 + 1));
    let mut lines = text.split('\n');
    for r in 0..rows {
        let line_no = r + 2;
        let line = lines
            .next()
            .ok_or_else(|| Error::parse(line_no, 1, "unexpected end of data"))?;
        let line = line.strip_suffix('\r').unwrap_or(line);
        let mut column = 1;
        let mut count = 0;
        for item in line.split(',') {
            let v: f64 = item
                .trim()
                .parse()
                .map_err(|_| Error::parse(line_no, column, format!("invalid number `{item}`")))?;
            values.push(v);
            count += 1;
            column += item.len() + 1;
        }
        if count != row {
            return Err(Error::parse(
                line_no,
                1,
                format!("expected {row} values, found {count}"),
            ));
        }
    }
    let rest: Vec<&str> = lines.collect();
    if rest.iter().any(|l| !l.trim().is_empty()) {
        return Err(Error::parse(
            rows + 2,
            1,
            "trailing data after the last row",
        ));
    }
    Ok(values)
}

pub fn write_field(path: &Path, field: &ScalarField, encoding: Encoding) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(&encode(field, encoding))?;
    Ok(())
}

/// Reads a field file, detecting the encoding.
pub fn read_field(path: &Path) -> Result<ScalarField> {
    let bytes = std::fs::read(path)?;
    let encoding = detect_encoding(&bytes)?;
    decode(&bytes, encoding)
}
