//! Grid specifications: `start:stop:count` (linear, inclusive endpoints) or
//! `log:start:stop:count` (geometric).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.trim().split(':').collect();
    let (log, fields) = match parts.as_slice() {
        ["log", rest @ ..] => (true, rest),
        rest => (false, rest),
    };
    let [start, stop, count] = fields else {
        return Err(Error::Config(format!(
            "range `{spec}` must be start:stop:count or log:start:stop:count"
        )));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("range `{spec}`: `{s}` is not a number")))
    };
    let (start, stop) = (num(start)?, num(stop)?);
    let count: usize = count
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("range `{spec}`: `{count}` is not a count")))?;
    if count == 0 {
        return Err(Error::Config(format!("range `{spec}` has zero points")));
    }
    if log && !(start > 0.0 && stop > 0.0) {
        return Err(Error::Config(format!("log range `{spec}` needs positive endpoints")));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let values = (0..count)
        .map(|k| {
            if k == count - 1 {
                return stop;
            }
            let frac = k as f64 / (count - 1) as f64;
            if log {
                (start.ln() + frac * (stop.ln() - start.ln())).exp()
            } else {
                start + frac * (stop - start)
            }
        })
        .collect();
    Ok(values)
}

/// A grid given either explicitly or as a range string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Values(Vec<f64>),
    Range(String),
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            GridSpec::Values(v) => v.clone(),
            GridSpec::Range(s) => parse_range(s)?,
        };
        check_increasing(&v)?;
        Ok(v)
    }
}

pub fn check_increasing(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Config("grid must not be empty".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("grid values must be finite".into()));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Insert the midpoint between consecutive points (geometric midpoint when
/// both are positive), doubling the density.
pub fn refine(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len() * 2);
    for w in values.windows(2) {
        out.push(w[0]);
        out.push(if w[0] > 0.0 { (w[0] * w[1]).sqrt() } else { 0.5 * (w[0] + w[1]) });
    }
    if let Some(&last) = values.last() {
        out.push(last);
    }
    out
}
