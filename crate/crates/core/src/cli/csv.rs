//! Trace export: one row per grid point.

use std::io::{self, Write};

use crate::geometry::{CurvatureSample, LogValue};

/// `t,logV1..logVn,kappa_1..kappa_{n-1},tau`.
pub fn header(n: usize) -> String {
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=n).map(|k| format!("logV{k}")));
    cols.extend((1..n).map(|i| format!("kappa_{i}")));
    cols.push("tau".into());
    cols.join(",")
}

fn cell(x: Option<f64>) -> String {
    x.filter(|v| v.is_finite()).map(|v| format!("{v:.16e}")).unwrap_or_default()
}

fn row(n: usize, t: f64, p: Option<&CurvatureSample>) -> String {
    let mut cells = vec![cell(Some(t))];
    for k in 1..=n {
        let v = p.and_then(|p| p.log_v.get(k)).filter(|v| !v.is_zero);
        cells.push(cell(v.map(|v| v.log_value)));
    }
    for i in 1..n {
        cells.push(cell(p.and_then(|p| p.kappa(i).linear())));
    }
    cells.push(cell(p.and_then(|p| match p.log_tau {
        LogValue::Undefined => None,
        v => v.linear(),
    })));
    cells.join(",")
}

pub fn write_trace<W: Write>(out: &mut W, n: usize, rows: &[(f64, Option<CurvatureSample>)]) -> io::Result<()> {
    writeln!(out, "{}", header(n))?;
    for (t, p) in rows {
        writeln!(out, "{}", row(n, *t, p.as_ref()))?;
    }
    Ok(())
}
