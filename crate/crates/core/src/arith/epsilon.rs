use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EpsilonMode {
    Constant(Rational),
    Table {
        values: BTreeMap<u64, Rational>,
        default: Rational,
    },
}

/// The slack `ε(p) >= 0` in the occupancy hypothesis `|A_p| <= p/2 + ε(p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonSpec {
    mode: EpsilonMode,
    bound: Rational,
}

impl EpsilonSpec {
    pub fn constant(c: Rational) -> Result<Self> {
        if c < Rational::zero() {
            return Err(Error::Precondition(format!("epsilon {c} is negative")));
        }
        Ok(EpsilonSpec {
            mode: EpsilonMode::Constant(c),
            bound: c,
        })
    }

    pub fn zero() -> Self {
        Self::constant(Rational::zero()).unwrap()
    }

    /// ε ≡ 1/2, the slack under which the squares satisfy the hypothesis.
    pub fn half() -> Self {
        Self::constant(Rational::new(1, 2)).unwrap()
    }

    pub fn one() -> Self {
        Self::constant(Rational::from_integer(1)).unwrap()
    }

    pub fn table(values: BTreeMap<u64, Rational>, default: Rational) -> Result<Self> {
        let zero = Rational::zero();
        if default < zero {
            return Err(Error::Precondition("default epsilon is negative".into()));
        }
        if let Some((p, v)) = values.iter().find(|(_, v)| **v < zero) {
            return Err(Error::Precondition(format!(
                "epsilon({p}) = {v} is negative"
            )));
        }
        let bound = values.values().copied().fold(default, Rational::max);
        Ok(EpsilonSpec {
            mode: EpsilonMode::Table { values, default },
            bound,
        })
    }

    /// Named preset (`0`, `1/2`, `half`, `1`) or any single rational/decimal constant.
    pub fn preset(name: &str) -> Result<Self> {
        match name.trim() {
            "half" => Ok(Self::half()),
            "zero" => Ok(Self::zero()),
            "one" => Ok(Self::one()),
            other => {
                Self::constant(parse_rational(other).map_err(|msg| Error::Parse { line: 0, msg })?)
            }
        }
    }

    /// Parses the `p=value` / `default=value` config format.
    pub fn parse_config(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        let mut default = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("expected key=value, got {line:?}"),
            })?;
            let value =
                parse_rational(value.trim()).map_err(|msg| Error::Parse { line: line_no, msg })?;
            let key = key.trim();
            if key == "default" {
                default = Some(value);
            } else {
                let p: u64 = key.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad prime key {key:?}"),
                })?;
                values.insert(p, value);
            }
        }
        let default = default.ok_or(Error::Parse {
            line: 0,
            msg: "missing default=value line".into(),
        })?;
        Self::table(values, default).map_err(|e| Error::Parse {
            line: 0,
            msg: e.to_string(),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse_config(&std::fs::read_to_string(path)?)
    }

    pub fn mode(&self) -> &EpsilonMode {
        &self.mode
    }

    /// `sup_p ε(p)`.
    pub fn bound(&self) -> Rational {
        self.bound
    }

    pub fn at(&self, p: u64) -> Rational {
        match &self.mode {
            EpsilonMode::Constant(c) => *c,
            EpsilonMode::Table { values, default } => values.get(&p).copied().unwrap_or(*default),
        }
    }

    pub fn at_f64(&self, p: u64) -> f64 {
        self.at(p).to_f64().unwrap_or(f64::NAN)
    }

    /// `⌊p/2 + ε(p)⌋`, the number of classes mod `p` a set may occupy.
    pub fn allowed_classes(&self, p: u64) -> u64 {
        let e = self.at(p);
        let twice = Rational::from_integer(p as i64) + e * 2;
        (twice / 2).floor().to_integer().max(0) as u64
    }
}

impl fmt::Display for EpsilonSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.mode {
            EpsilonMode::Constant(c) => write!(f, "{c}"),
            EpsilonMode::Table { values, default } => {
                write!(f, "table({} entries, default {default})", values.len())
            }
        }
    }
}

impl FromStr for EpsilonSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::preset(s)
    }
}

/// Parses `a/b`, an integer, or a finite decimal into an exact rational.
pub fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in {s:?}"))?;
        let den: i64 = den
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in {s:?}"))?;
        if den == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rational::new(num, den));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("empty number {s:?}"));
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(format!("not a rational number: {s:?}"));
    }
    if frac_part.len() > 15 {
        return Err(format!("too many decimal places in {s:?}"));
    }
    let digits = format!("{int_part}{frac_part}");
    let num: i64 = if digits.is_empty() {
        0
    } else {
        digits
            .parse()
            .map_err(|_| format!("number too large: {s:?}"))?
    };
    let den = 10i64.pow(frac_part.len() as u32);
    let r = Rational::new(num, den);
    Ok(if neg { -r } else { r })
}
