//! Plain-text set files: an `N=<cap>` header, then one integer per line.
//! `#` starts a comment. Order is irrelevant and duplicates are tolerated.

use std::fmt::Write as _;
use std::path::Path;

use super::IntegerSet;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct ParsedSet {
    pub set: IntegerSet,
    /// Number of repeated lines that were dropped.
    pub duplicates: usize,
}

impl ParsedSet {
    pub fn has_duplicates(&self) -> bool {
        self.duplicates > 0
    }
}

pub fn parse_set(text: &str) -> Result<ParsedSet> {
    let mut cap: Option<u64> = None;
    let mut raw = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        match cap {
            None => {
                let value = body
                    .strip_prefix("N=")
                    .ok_or_else(|| Error::Parse {
                        line: line_no,
                        msg: format!("expected header N=<cap>, got {body:?}"),
                    })?
                    .trim();
                let c: u64 = value.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad cap {value:?}"),
                })?;
                if c == 0 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "cap must be >= 1".into(),
                    });
                }
                cap = Some(c);
            }
            Some(c) => {
                let e: u64 = body.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("expected a positive integer, got {body:?}"),
                })?;
                if e == 0 || e > c {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("element {e} outside [1, {c}]"),
                    });
                }
                raw.push(e);
            }
        }
    }
    let cap = cap.ok_or(Error::Parse {
        line: 0,
        msg: "missing N=<cap> header".into(),
    })?;
    let total = raw.len();
    raw.sort_unstable();
    raw.dedup();
    let duplicates = total - raw.len();
    Ok(ParsedSet {
        set: IntegerSet::from_sorted(cap, raw)?,
        duplicates,
    })
}

pub fn read_set(path: &Path) -> Result<ParsedSet> {
    parse_set(&std::fs::read_to_string(path)?)
}

/// Canonical text: header, then elements ascending.
pub fn format_set(set: &IntegerSet) -> String {
    let mut out = String::with_capacity(8 * set.len() + 16);
    let _ = writeln!(out, "N={}", set.cap());
    for e in set.iter() {
        let _ = writeln!(out, "{e}");
    }
    out
}

pub fn write_set(set: &IntegerSet, path: &Path) -> Result<()> {
    std::fs::write(path, format_set(set))?;
    Ok(())
}
