//! Least-squares power-law fits on log-log axes.

use serde::{Deserialize, Serialize};

use crate::dynamics::LeakageCurve;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    pub points: usize,
}

/// Ordinary least squares `y = slope·x + intercept`. Needs 3 or more points.
pub fn ols(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::InsufficientData(format!("{} x values vs {} y values", n, y.len())));
    }
    if n < 3 {
        return Err(Error::InsufficientData(format!("{n} points; at least 3 are needed")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let s2 = ssr / (nf - 2.0);
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr: (s2 / sxx).sqrt(),
        intercept_stderr: (s2 * (1.0 / nf + mx * mx / sxx)).sqrt(),
        points: n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontFit {
    pub threshold: f64,
    pub fit: LinearFit,
    /// `(r, t*(r))` pairs that entered the fit.
    pub crossings: Vec<(f64, f64)>,
    /// Radii whose curve never reached the threshold.
    pub excluded: Vec<f64>,
}

/// Earliest time at which the curve reaches `threshold`, interpolating
/// between the bracketing samples (log-log when both are positive).
fn first_crossing(samples: &[(f64, f64)], threshold: f64) -> Option<f64> {
    let k = samples.iter().position(|&(_, v)| v >= threshold)?;
    if k == 0 {
        return Some(samples[0].0);
    }
    let (t0, v0) = samples[k - 1];
    let (t1, v1) = samples[k];
    if t0 > 0.0 && v0 > 0.0 {
        let frac = (threshold.ln() - v0.ln()) / (v1.ln() - v0.ln());
        Some((t0.ln() + frac * (t1.ln() - t0.ln())).exp())
    } else {
        Some(t0 + (threshold - v0) / (v1 - v0) * (t1 - t0))
    }
}

/// Fit `log t*(r)` against `log r`, where `t*(r)` is the first time the
/// leakage at radius `r` reaches `threshold`. Radii with `r ≤ 0` are skipped.
pub fn fit_front(curve: &LeakageCurve, threshold: f64) -> Result<FrontFit> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::domain("theta", threshold, "(0, 1)"));
    }
    let mut crossings = Vec::new();
    let mut excluded = Vec::new();
    for r in curve.radii().into_iter().filter(|&r| r > 0.0) {
        let samples: Vec<(f64, f64)> = curve.at_radius(r).iter().map(|p| (p.t, p.leakage)).collect();
        match first_crossing(&samples, threshold) {
            Some(t) if t > 0.0 => crossings.push((r, t)),
            _ => excluded.push(r),
        }
    }
    if crossings.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} radii cross threshold {threshold}; at least 3 are needed",
            crossings.len()
        )));
    }
    let x: Vec<f64> = crossings.iter().map(|c| c.0.ln()).collect();
    let y: Vec<f64> = crossings.iter().map(|c| c.1.ln()).collect();
    Ok(FrontFit {
        threshold,
        fit: ols(&x, &y)?,
        crossings,
        excluded,
    })
}

/// Slope of `log leakage` against `log r` at the sampled time closest to `t`.
pub fn fit_tail(curve: &LeakageCurve, t: f64) -> Result<LinearFit> {
    let nearest = curve
        .times()
        .into_iter()
        .min_by(|a, b| (a - t).abs().total_cmp(&(b - t).abs()))
        .ok_or_else(|| Error::InsufficientData("empty curve".into()))?;
    let (x, y): (Vec<f64>, Vec<f64>) = curve
        .points
        .iter()
        .filter(|p| p.t == nearest && p.r > 0.0 && p.leakage > 0.0)
        .map(|p| (p.r.ln(), p.leakage.ln()))
        .unzip();
    if x.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} radii with nonzero leakage at t = {nearest}",
            x.len()
        )));
    }
    ols(&x, &y)
}
