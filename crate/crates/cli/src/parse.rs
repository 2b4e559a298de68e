//! Value lists and the flat `key = value` config format.

use std::collections::BTreeMap;

use thiserror::Error;

/// Upper bound on the number of values a single list may expand to.
pub const MAX_LIST_LEN: usize = 100_000;

/// Keys accepted in a config file; identical to the long flag names.
pub const CONFIG_KEYS: [&str; 10] = [
    "n",
    "alpha",
    "representation",
    "normalize",
    "epsilon",
    "out",
    "format",
    "grid-points",
    "kmax",
    "tol",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("empty list")]
    Empty,
    #[error("invalid number {0:?}")]
    Number(String),
    #[error("invalid range {0:?}: expected start:stop:step with start ≤ stop and step > 0")]
    Range(String),
    #[error("list expands to more than {MAX_LIST_LEN} values")]
    TooLong,
    #[error("{0} is not a non-negative integer")]
    NotIndex(f64),
    #[error("line {line}: {reason}")]
    Config { line: usize, reason: String },
}

fn number(s: &str) -> Result<f64, ParseError> {
    let s = s.trim();
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ParseError::Number(s.to_string())),
    }
}

/// Values snap to a 1e−12 lattice so that ranges hit their endpoints.
fn snap(v: f64) -> f64 {
    let r = (v * 1e12).round() / 1e12;
    if !r.is_finite() {
        v
    } else if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Comma-separated numbers and inclusive ranges `start:stop:step`,
/// e.g. `0.5, 1:2:0.25`. Order is preserved.
pub fn parse_list(input: &str) -> Result<Vec<f64>, ParseError> {
    let mut out = Vec::new();
    for item in input.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(ParseError::Empty);
        }
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(snap(number(v)?)),
            [a, b, step] => {
                let (a, b, step) = (number(a)?, number(b)?, number(step)?);
                if !(a <= b && step > 0.0) {
                    return Err(ParseError::Range(item.to_string()));
                }
                let span = (b - a) / step;
                if !(span < MAX_LIST_LEN as f64) {
                    return Err(ParseError::TooLong);
                }
                let count = (span + 1e-9).floor() as usize + 1;
                out.extend((0..count).map(|i| snap(a + i as f64 * step)));
            }
            _ => return Err(ParseError::Range(item.to_string())),
        }
        if out.len() > MAX_LIST_LEN {
            return Err(ParseError::TooLong);
        }
    }
    Ok(out)
}

/// [`parse_list`] restricted to non-negative integers.
pub fn parse_index_list(input: &str) -> Result<Vec<u32>, ParseError> {
    parse_list(input)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as u32)
            } else {
                Err(ParseError::NotIndex(v))
            }
        })
        .collect()
}

/// Flat config: one `key = value` per line, `#` starts a comment, blank
/// lines ignored. Keys must be known and may appear once.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, ParseError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |reason: String| ParseError::Config { line: line_no, reason };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(format!("expected key = value, got {line:?}")));
        };
        let (key, value) = (key.trim(), value.trim());
        if !CONFIG_KEYS.contains(&key) {
            return Err(err(format!("unknown key {key:?}")));
        }
        if value.is_empty() {
            return Err(err(format!("empty value for {key:?}")));
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(err(format!("duplicate key {key:?}")));
        }
    }
    Ok(map)
}
