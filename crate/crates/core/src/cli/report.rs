//! Human and machine renderings of a reconciliation report.

use std::fmt::Write;

use serde::Serialize;

use crate::discriminance::{ReconciliationReport, SamplingPlan, StabilityVerdict};

#[derive(Serialize)]
pub struct AnalysisDocument<'a> {
    pub label: Option<&'a str>,
    pub n: usize,
    pub plan: &'a SamplingPlan,
    pub report: &'a ReconciliationReport,
}

fn verdict_line(out: &mut String, name: &str, v: &StabilityVerdict) {
    let _ = writeln!(out, "  {name}: {:?} ({:?})", v.verdict, v.provenance);
    for note in &v.notes {
        let _ = writeln!(out, "    note: {note}");
    }
}

/// Plain-text report, numbers rounded to 6 digits.
pub fn render_text(label: Option<&str>, n: usize, plan: &SamplingPlan, r: &ReconciliationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "matrix: {} (n = {n})", label.unwrap_or("unnamed"));

    let s = &r.summary;
    let _ = writeln!(out, "spectrum");
    for e in &s.eigs {
        let _ = writeln!(out, "  eigenvalue {:.6}  multiplicity {}", e.value, e.multiplicity);
    }
    let _ = writeln!(out, "  spectral abscissa {:.6}", s.m);
    if let Some(nr) = s.n_reduced {
        let _ = writeln!(out, "  next real part {nr:.6}");
    }
    let _ = writeln!(out, "  det A {:.6e}  invertible {}", s.determinant, s.invertible);
    let _ = writeln!(out, "  imaginary-axis eigenvalues semisimple {}", s.semisimple_critical);

    let _ = writeln!(out, "jordan structure");
    match &r.jordan {
        Some(j) => {
            for b in &j.real_blocks {
                let _ = writeln!(out, "  {:.6}: blocks {:?}", b.lambda, b.sizes);
            }
            for b in &j.complex_blocks {
                let _ = writeln!(out, "  {:.6} ± {:.6}i: blocks {:?}", b.a, b.b, b.sizes);
            }
        }
        None => {
            let _ = writeln!(out, "  unavailable (ill-conditioned spectrum)");
        }
    }

    let _ = writeln!(
        out,
        "quantities ({} samples, seed {}, t in [{}, {}], {} points)",
        plan.samples, plan.seed, plan.trace.t_start, plan.trace.t_end, plan.trace.num_points
    );
    for q in &r.quantities {
        let hist: Vec<String> = q.histogram.iter().map(|(l, c)| format!("{l} {c}")).collect();
        let _ = writeln!(out, "  {}: {}", q.quantity, hist.join(", "));
        for (why, c) in &q.failures {
            let _ = writeln!(out, "    unlabelled {c}: {why}");
        }
        if let Some(p) = &q.prediction {
            let value = p.value.map(|v| format!(" = {v:.6}")).unwrap_or_default();
            let _ = writeln!(out, "    predicted {:?}{value} ({})", p.class, p.reason);
        }
        let a = q.agreement;
        if a.agree + a.disagree > 0 {
            let _ = writeln!(
                out,
                "    agreement {} agree, {} disagree, {} inconclusive",
                a.agree, a.disagree, a.inconclusive
            );
        }
        let _ = writeln!(out, "    verdict {:?}", q.verdict.verdict);
    }

    let _ = writeln!(out, "verdicts");
    verdict_line(&mut out, "geometric", &r.geometric);
    verdict_line(&mut out, "oracle", &r.oracle);
    let _ = writeln!(out, "  consistent: {}", r.consistent);
    if !r.notes.is_empty() {
        let _ = writeln!(out, "notes");
        for n in &r.notes {
            let _ = writeln!(out, "  {n}");
        }
    }
    out
}
