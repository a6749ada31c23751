//! Plot-ready CSV output with a fixed header.

use std::fmt::Write;

pub const HEADER: &str = "center,r,t,value,norm_kind,seed,alpha,ensemble";

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub center: usize,
    pub r: f64,
    pub t: f64,
    pub value: f64,
    pub norm_kind: &'static str,
    pub seed: u64,
    pub alpha: f64,
    pub ensemble: &'static str,
}

/// Floats use 17 significant digits so values round-trip exactly.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn render(rows: &[Row]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.center,
            format_float(row.r),
            format_float(row.t),
            format_float(row.value),
            row.norm_kind,
            row.seed,
            format_float(row.alpha),
            row.ensemble
        )
        .expect("writing to a String cannot fail");
    }
    out
}
