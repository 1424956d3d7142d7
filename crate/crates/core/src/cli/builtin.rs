//! Built-in reference systems with their expected behaviour.

use clap::ValueEnum;
use serde::Serialize;

use crate::asymptotics::{classify_limit, sample_trace, LimitLabel, Quantity};
use crate::catalog;
use crate::discriminance::{reconcile, ReconciliationReport, SamplingPlan, Verdict, NOTE_SINGULAR};
use crate::geometry::curvature_profile;
use crate::linalg::{derivative_stack, RealMatrix, Trajectory};
use crate::spectral::{predict_tau_limit, summarize};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleName {
    Paper1,
    Paper2,
    Remark1,
    Remark2,
    Lemma46,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub what: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExampleRun {
    pub name: ExampleName,
    pub description: &'static str,
    pub matrix: Vec<Vec<f64>>,
    pub r0: Vec<f64>,
    pub checks: Vec<Check>,
    pub report: Option<ReconciliationReport>,
}

impl ExampleRun {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn check(what: &str, expected: impl ToString, observed: impl ToString, pass: bool) -> Check {
    Check {
        what: what.into(),
        expected: expected.to_string(),
        observed: observed.to_string(),
        pass,
    }
}

fn label_of(a: &RealMatrix, r0: &[f64], q: Quantity, plan: &SamplingPlan) -> String {
    match sample_trace(a, r0, q, &plan.trace).and_then(|t| classify_limit(&t, &plan.trace)) {
        Ok(c) => c.label.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

fn tau_at(a: &RealMatrix, r0: &[f64], t: f64) -> Result<Option<f64>> {
    Ok(curvature_profile(&derivative_stack(a, r0, t, 3)?)?.log_tau.linear())
}

fn label_check(a: &RealMatrix, r0: &[f64], q: Quantity, want: LimitLabel, plan: &SamplingPlan) -> Check {
    let got = label_of(a, r0, q, plan);
    let pass = got == want.to_string();
    check(&format!("{q} label"), want, got, pass)
}

fn verdict_checks(r: &ReconciliationReport, geometric: Verdict, oracle: Verdict, singular_note: bool) -> Vec<Check> {
    let has_note = r.geometric.notes.iter().any(|n| n == NOTE_SINGULAR);
    let mut out = vec![
        check("geometric verdict", format!("{geometric:?}"), format!("{:?}", r.geometric.verdict), r.geometric.verdict == geometric),
        check("oracle verdict", format!("{oracle:?}"), format!("{:?}", r.oracle.verdict), r.oracle.verdict == oracle),
    ];
    if singular_note {
        out.push(check("det-zero note", "present", if has_note { "present" } else { "absent" }, has_note));
    } else {
        out.push(check("consistent", true, r.consistent, r.consistent));
    }
    out
}

/// `τ²(t)` of the coupled oscillator from `(1, 2, 1, 2)`.
pub fn oscillator_tau_squared(t: f64) -> f64 {
    let w = 2.0 * 5f64.sqrt() * t;
    let s = 5f64.sqrt() * w.sin() + 2.0 * w.cos();
    (s + 17.0) / (2.0 * (s - 11.0).powi(2))
}

pub fn run_example(name: ExampleName, plan: &SamplingPlan) -> Result<ExampleRun> {
    let (a, r0, description): (RealMatrix, Vec<f64>, &'static str) = match name {
        ExampleName::Paper1 => (catalog::four_mode_decay(), vec![1.0; 4], "four decaying modes, det A = 1320"),
        ExampleName::Paper2 => (catalog::coupled_oscillator(), vec![1.0, 2.0, 1.0, 2.0], "two coupled unit masses"),
        ExampleName::Remark1 => (catalog::nilpotent_with_decay(), vec![1.0; 4], "J_2(0) + C_1(-1, 1): singular, unstable"),
        ExampleName::Remark2 => (catalog::triple_decay_with_zero(), vec![1.0; 4], "J_3(-1) + J_1(0): singular, stable"),
        ExampleName::Lemma46 => (catalog::two_frequency_rotation(), vec![1.0, 0.0, 1.0, 0.0], "C_1(0, 1) + C_1(0, 2)"),
    };
    let mut checks = Vec::new();
    match name {
        ExampleName::Paper1 => {
            let det = a.determinant();
            checks.push(check("det A", 1320, format!("{det:.9}"), (det - 1320.0).abs() <= 1e-6 * 1320.0));
            checks.push(label_check(&a, &r0, Quantity::Kappa(1), LimitLabel::TendsToZero, plan));
            checks.push(label_check(&a, &r0, Quantity::Tau, LimitLabel::TendsToZero, plan));
            checks.push(label_check(&a, &r0, Quantity::Kappa(3), LimitLabel::TendsToInfinity, plan));
        }
        ExampleName::Paper2 => {
            let traj = Trajectory::new(&a, &r0)?;
            let mut worst: f64 = 0.0;
            let mut at_zero = f64::NAN;
            for j in 0..=100 {
                let t = j as f64 / 10.0;
                let tau = curvature_profile(&traj.stack(t, 3)?)?.log_tau.linear().unwrap_or(f64::NAN);
                if j == 0 {
                    at_zero = tau * tau;
                }
                let want = oscillator_tau_squared(t);
                worst = worst.max((tau * tau - want).abs() / want);
            }
            let want = 19.0 / 162.0;
            checks.push(check("tau^2(0)", format!("{want:.12}"), format!("{at_zero:.12}"), (at_zero - want).abs() <= 1e-8));
            checks.push(check("tau^2 on [0, 10], max rel err", "<= 1e-8", format!("{worst:.2e}"), worst <= 1e-8));
            checks.push(label_check(&a, &r0, Quantity::Tau, LimitLabel::NoLimitBounded, plan));
        }
        ExampleName::Remark1 => {
            let tau = tau_at(&a, &r0, 50.0)?.unwrap_or(f64::NAN);
            checks.push(check("tau(50)", "1 / |r_2(0)| = 1", format!("{tau:.9}"), (tau - 1.0).abs() <= 1e-6));
        }
        ExampleName::Remark2 => {
            checks.push(label_check(&a, &r0, Quantity::Tau, LimitLabel::TendsToInfinity, plan));
        }
        ExampleName::Lemma46 => {
            let want = (36.0f64 / 425.0).sqrt();
            let tau = tau_at(&a, &r0, 1000.0)?.unwrap_or(f64::NAN);
            let rel = (tau - want).abs() / want;
            checks.push(check("tau(1000)", format!("{want:.9}"), format!("{tau:.9}"), rel <= 1e-4));
            let predicted = predict_tau_limit(&summarize(&a)?, &a, &r0)?.value.unwrap_or(f64::NAN);
            checks.push(check("predicted limit", format!("{want:.9}"), format!("{predicted:.9}"), (predicted - want).abs() <= 1e-9));
        }
    }
    let report = reconcile(&a, plan)?;
    checks.extend(match name {
        ExampleName::Paper1 => verdict_checks(&report, Verdict::AsymptoticallyStable, Verdict::AsymptoticallyStable, false),
        ExampleName::Paper2 | ExampleName::Lemma46 => verdict_checks(&report, Verdict::Stable, Verdict::Stable, false),
        ExampleName::Remark1 => verdict_checks(&report, Verdict::Inconclusive, Verdict::Unstable, true),
        ExampleName::Remark2 => verdict_checks(&report, Verdict::Inconclusive, Verdict::Stable, true),
    });
    Ok(ExampleRun {
        name,
        description,
        matrix: a.rows(),
        r0,
        checks,
        report: Some(report),
    })
}

pub fn render_example(run: &ExampleRun) -> String {
    let name = format!("{:?}", run.name).to_lowercase();
    let mut out = format!("{name}: {}\n  r0 = {:?}\n", run.description, run.r0);
    for c in &run.checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!("  {status} {}: expected {}, observed {}\n", c.what, c.expected, c.observed));
    }
    out
}
