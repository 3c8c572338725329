//! Line-oriented `key = value` equation files.
//!
//! ```text
//! # Kodaira–Thurston on a 32³ grid
//! preset = kodaira_thurston
//! sizes  = 32
//! ```
//!
//! Keys: `n`, `sizes` (one value or one per axis), `I` (1-based, comma
//! separated), `preset`, `X` and `Y` (comma-separated expressions, one per
//! component). `#` starts a comment.

use std::path::Path;

use crate::equation::{EquationSpec, Preset, VectorFieldSpec};
use crate::error::{Error, Result};
use crate::expr::{parse_at, Expr};
use crate::spectral::{TorusGrid, MAX_POINTS};

#[derive(Clone, Debug, PartialEq)]
struct Entry {
    value: String,
    line: usize,
    /// 1-based column of the first value character.
    column: usize,
}

/// A parsed but not yet discretized equation file.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecConfig {
    pub n: usize,
    pub sizes: Vec<usize>,
    /// 0-based.
    pub i_set: Vec<usize>,
    pub preset: Preset,
    pub x: Vec<Expr>,
    pub y: Vec<Expr>,
}

/// Largest `n` for which some grid fits: every axis needs at least 4 points.
pub const MAX_DIM: usize = (MAX_POINTS.ilog2() / 2) as usize;

const KEYS: [&str; 6] = ["n", "sizes", "I", "preset", "X", "Y"];

fn split_entries(text: &str) -> Result<Vec<(String, Entry)>> {
    let mut entries: Vec<(String, Entry)> = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            let col = content.len() - content.trim_start().len() + 1;
            return Err(Error::parse(line, col, "expected `key = value`"));
        };
        let key = content[..eq].trim();
        let key_col = content.len() - content.trim_start().len() + 1;
        if key.is_empty() {
            return Err(Error::parse(line, key_col, "missing key before `=`"));
        }
        if !KEYS.contains(&key) {
            return Err(Error::parse(line, key_col, format!("unknown key `{key}`")));
        }
        if entries.iter().any(|(k, _)| k == key) {
            return Err(Error::parse(
                line,
                key_col,
                format!("duplicate key `{key}`"),
            ));
        }
        let after = &content[eq + 1..];
        let value = after.trim();
        let column = eq + 2 + (after.len() - after.trim_start().len());
        if value.is_empty() {
            return Err(Error::parse(
                line,
                eq + 2,
                format!("empty value for `{key}`"),
            ));
        }
        entries.push((
            key.to_string(),
            Entry {
                value: value.to_string(),
                line,
                column,
            },
        ));
    }
    Ok(entries)
}

/// Comma-separated pieces with their starting columns.
fn pieces(entry: &Entry) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for part in entry.value.split(',') {
        let lead = part.len() - part.trim_start().len();
        out.push((part.trim(), entry.column + start + lead));
        start += part.len() + 1;
    }
    out
}

fn integers(entry: &Entry, what: &str) -> Result<Vec<usize>> {
    pieces(entry)
        .into_iter()
        .map(|(p, col)| {
            p.parse::<usize>().map_err(|_| {
                Error::parse(
                    entry.line,
                    col,
                    format!("{what}: `{p}` is not a non-negative integer"),
                )
            })
        })
        .collect()
}

impl SpecConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let entries = split_entries(text)?;
        let get = |key: &str| entries.iter().find(|(k, _)| k == key).map(|(_, e)| e);

        let preset = match get("preset") {
            Some(e) => e.value.parse::<Preset>().map_err(|_| {
                Error::parse(e.line, e.column, format!("unknown preset `{}`", e.value))
            })?,
            None => Preset::Custom,
        };
        let preset_n = match preset {
            Preset::KodairaThurston => Some(3),
            Preset::Hkt => Some(5),
            Preset::Custom => None,
        };
        let n = match (get("n"), preset_n) {
            (Some(e), fixed) => {
                let n = integers(e, "n")?;
                if n.len() != 1 {
                    return Err(Error::parse(e.line, e.column, "n takes a single value"));
                }
                if let Some(p) = fixed {
                    if n[0] != p {
                        return Err(Error::parse(
                            e.line,
                            e.column,
                            format!("preset {preset} requires n = {p}"),
                        ));
                    }
                }
                n[0]
            }
            (None, Some(p)) => p,
            (None, None) => {
                return Err(Error::parse(
                    1,
                    1,
                    "missing key `n` (or a preset that fixes it)",
                ));
            }
        };
        if n < 2 {
            return Err(Error::parse(
                get("n").map_or(1, |e| e.line),
                1,
                "n must be at least 2",
            ));
        }
        if n > MAX_DIM {
            return Err(Error::parse(
                get("n").map_or(1, |e| e.line),
                1,
                format!("n must be at most {MAX_DIM}"),
            ));
        }

        let sizes = match get("sizes") {
            Some(e) => {
                let s = integers(e, "sizes")?;
                match s.len() {
                    1 => vec![s[0]; n],
                    len if len == n => s,
                    len => {
                        return Err(Error::parse(
                            e.line,
                            e.column,
                            format!("sizes lists {len} values for n = {n}"),
                        ))
                    }
                }
            }
            None => return Err(Error::parse(1, 1, "missing key `sizes`")),
        };

        if preset != Preset::Custom {
            for key in ["I", "X", "Y"] {
                if let Some(e) = get(key) {
                    return Err(Error::parse(
                        e.line,
                        e.column,
                        format!("`{key}` is fixed by preset {preset}"),
                    ));
                }
            }
        }

        let i_set = match get("I") {
            Some(e) => {
                let raw = integers(e, "I")?;
                let mut out = Vec::with_capacity(raw.len());
                for ((value, col), _) in raw.iter().zip(pieces(e)).map(|(v, (_, c))| ((v, c), ())) {
                    if *value == 0 || *value > n {
                        return Err(Error::parse(
                            e.line,
                            col,
                            format!("index {value} outside 1..={n}"),
                        ));
                    }
                    out.push(value - 1);
                }
                out
            }
            None => match preset {
                Preset::KodairaThurston => vec![0],
                _ => vec![n - 1],
            },
        };

        let field = |key: &str, default: Vec<Expr>| -> Result<Vec<Expr>> {
            match get(key) {
                None => Ok(default),
                Some(e) => {
                    let parts = pieces(e);
                    if parts.len() != n {
                        return Err(Error::parse(
                            e.line,
                            e.column,
                            format!("{key} needs {n} components, got {}", parts.len()),
                        ));
                    }
                    parts
                        .into_iter()
                        .map(|(p, col)| parse_at(p, n, e.line, col))
                        .collect()
                }
            }
        };
        let zero = || vec![Expr::Const(0.0); n];
        let x_default = match preset {
            Preset::KodairaThurston => vec![Expr::Const(0.0), Expr::Const(0.0), Expr::Const(1.0)],
            _ => zero(),
        };
        let x = field("X", x_default)?;
        let y = field("Y", zero())?;

        Ok(SpecConfig {
            n,
            sizes,
            i_set,
            preset,
            x,
            y,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::with_dim(self.n, &self.sizes)
    }

    /// The equation on the configured grid.
    pub fn build(&self) -> Result<EquationSpec> {
        self.build_on(&self.grid()?)
    }

    /// The equation on another grid of the same dimension.
    pub fn build_on(&self, grid: &TorusGrid) -> Result<EquationSpec> {
        match self.preset {
            Preset::Custom => EquationSpec::new(
                grid,
                &self.i_set,
                VectorFieldSpec::new(self.x.clone())?,
                VectorFieldSpec::new(self.y.clone())?,
            ),
            preset => EquationSpec::from_preset(grid, preset),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_err(text: &str) -> (usize, usize, String) {
        match SpecConfig::parse(text) {
            Err(Error::Parse {
                line,
                column,
                message,
            }) => (line, column, message),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn preset_file() {
        let cfg = SpecConfig::parse("# kt\npreset = kodaira_thurston\nsizes = 16\n").unwrap();
        assert_eq!(cfg.n, 3);
        assert_eq!(cfg.sizes, vec![16; 3]);
        assert_eq!(cfg.i_set, vec![0]);
        let spec = cfg.build().unwrap();
        assert_eq!(spec.preset(), Preset::KodairaThurston);
        assert_eq!(spec.x().eval(&[0.0; 3]), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn custom_file() {
        let text = "n = 4\nsizes = 8, 8, 12, 8\nI = 3,4\nX = 0.5, -0.25*1, 0, 0   # constant\nY = 0,0,0,1\n";
        let cfg = SpecConfig::parse(text).unwrap();
        assert_eq!(cfg.i_set, vec![2, 3]);
        let spec = cfg.build().unwrap();
        assert_eq!(spec.grid().sizes(), &[8, 8, 12, 8]);
        assert_eq!(spec.j_set(), &[0, 1]);
        assert_eq!(spec.y().eval(&[0.0; 4])[3], 1.0);
        let standard = SpecConfig::parse("n = 3\nsizes = 8").unwrap();
        assert_eq!(standard.i_set, vec![2]);
    }

    #[test]
    fn diagnostics_carry_positions() {
        assert_eq!(parse_err("n = 3\nsizes = 8\nfoo = 1").0, 3);
        let (line, col, msg) = parse_err("n = 3\nsizes = 8\nX = 0, sin(x1), tan(x2)");
        assert_eq!((line, col), (3, 17), "{msg}");
        let (line, col, _) = parse_err("n = 3\nsizes = 8, 8");
        assert_eq!((line, col), (2, 9));
        let (line, col, _) = parse_err("n = 3\nsizes = 8\nI = 1, 7");
        assert_eq!((line, col), (3, 8));
        let (line, _, msg) = parse_err("preset = hkt\nsizes = 8\nX = 0,0,0,0,0");
        assert_eq!(line, 3);
        assert!(msg.contains("fixed by preset"));
        assert_eq!(parse_err("n = 3\nn = 4\nsizes = 8").0, 2);
        assert_eq!(parse_err("n 3").0, 1);
        assert!(parse_err("sizes = 8").2.contains("missing key `n`"));
        assert!(parse_err("n = 36666661\nsizes = 8")
            .2
            .contains("at most 13"));
        assert!(parse_err("preset = torus\nsizes = 8")
            .2
            .contains("unknown preset"));
    }

    #[test]
    fn grid_errors_surface_on_build() {
        let cfg = SpecConfig::parse("n = 3\nsizes = 7").unwrap();
        assert!(matches!(cfg.build(), Err(Error::InvalidGrid(_))));
    }
}
