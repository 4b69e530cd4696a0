use std::io::Write;

use super::config::OutputFormat;
use super::run::SweepRow;
use crate::error::{Error, Result};

pub const SWEEP_HEADER: &str =
    "param_name,theta,p,q,eta,c_cd,neg_bd_plus,neg_bd_minus,neg_cb_plus,neg_cb_minus,neg_cd_plus,neg_cd_minus,class";

/// Rounds to 9 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

/// Shortest text for `x` rounded to 9 significant digits; scientific notation
/// outside `[1e-4, 1e9)`.
pub fn format_sig(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        return "0".into();
    }
    if (1e-4..1e9).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

pub fn write_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> Result<()> {
    let io = |e: std::io::Error| Error::Parse(e.to_string());
    writeln!(out, "{SWEEP_HEADER}").map_err(io)?;
    for row in rows {
        let v = &row.report.values;
        let nums = [
            row.point.theta,
            row.point.p,
            row.point.q,
            row.point.eta,
            v.c_cd,
            v.neg_bd.plus,
            v.neg_bd.minus,
            v.neg_cb.plus,
            v.neg_cb.minus,
            v.neg_cd.plus,
            v.neg_cd.minus,
        ];
        let fields: Vec<String> = nums.iter().map(|&x| format_sig(x)).collect();
        writeln!(
            out,
            "{},{},{}",
            row.param_name,
            fields.join(","),
            row.report.class
        )
        .map_err(io)?;
    }
    out.flush().map_err(io)
}

fn round_json(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(x) = n.as_f64().filter(|_| n.is_f64()) {
                if let Some(r) = serde_json::Number::from_f64(round_sig(x)) {
                    *n = r;
                }
            }
        }
        serde_json::Value::Array(a) => a.iter_mut().for_each(round_json),
        serde_json::Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

pub fn write_json<W: Write>(mut out: W, rows: &[SweepRow]) -> Result<()> {
    let mut value = serde_json::to_value(rows.iter().map(SweepRow::to_json).collect::<Vec<_>>())
        .map_err(|e| Error::Parse(e.to_string()))?;
    round_json(&mut value);
    serde_json::to_writer_pretty(&mut out, &value).map_err(|e| Error::Parse(e.to_string()))?;
    writeln!(out).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_rows<W: Write>(out: W, rows: &[SweepRow], format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(out, rows),
        OutputFormat::Json => write_json(out, rows),
    }
}
