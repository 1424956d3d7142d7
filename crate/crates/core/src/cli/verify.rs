//! Seeded batch checks of predictors against numerics.

use clap::ValueEnum;

use crate::asymptotics::{
    classify_limit, classify_samples, sample_initial_condition, sample_trace, LimitLabel, Quantity, TraceConfig,
};
use crate::catalog;
use crate::discriminance::prediction_matches;
use crate::geometry::{curvature_profile, log_volume, volume_minor_sum, LogValue};
use crate::linalg::{derivative_stack, mat_exp, DerivativeStack, RealMatrix};
use crate::spectral::{predict_kappa_limit_diagonal, predict_tau_limit, summarize, PredictedLimit};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Trichotomy,
    Lemmas,
    Properties,
    All,
}

#[derive(Debug, Clone)]
pub struct Case {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteOutcome {
    pub cases: Vec<Case>,
    /// Labels that could not be decided; they do not fail a case.
    pub inconclusive: usize,
}

impl SuiteOutcome {
    fn push(&mut self, name: String, pass: bool, detail: String) {
        self.cases.push(Case { name, pass, detail });
    }

    pub fn failed(&self) -> usize {
        self.cases.iter().filter(|c| !c.pass).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            let status = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status} {}: {}\n", c.name, c.detail));
        }
        out.push_str(&format!(
            "{} cases, {} passed, {} failed, {} inconclusive labels\n",
            self.cases.len(),
            self.cases.len() - self.failed(),
            self.failed(),
            self.inconclusive
        ));
        out
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::default();
    if matches!(suite, Suite::Trichotomy | Suite::All) {
        trichotomy(seed, &mut out)?;
    }
    if matches!(suite, Suite::Lemmas | Suite::All) {
        limit_predictions(seed, &mut out)?;
    }
    if matches!(suite, Suite::Properties | Suite::All) {
        properties(seed, &mut out)?;
    }
    Ok(out)
}

fn trichotomy(seed: u64, out: &mut SuiteOutcome) -> Result<()> {
    let cfg = TraceConfig::default();
    for (idx, eigs) in catalog::diagonal_suite(seed, 200).iter().enumerate() {
        let a = RealMatrix::diagonal(eigs)?;
        let n = eigs.len();
        let s = summarize(&a)?;
        let quantities: Vec<Quantity> = (1..n).map(Quantity::Kappa).collect();
        let sample = classify_samples(&a, &quantities, &cfg, 1, seed + idx as u64)?.remove(0);
        let mut pass = true;
        let mut parts = Vec::new();
        for (qi, &q) in quantities.iter().enumerate() {
            let Quantity::Kappa(i) = q else { unreachable!() };
            let predicted = predict_kappa_limit_diagonal(&s, i).class;
            let got = sample.classes[qi].as_ref().map_or(LimitLabel::Inconclusive, |c| c.label);
            if got == LimitLabel::Inconclusive {
                out.inconclusive += 1;
            } else if !prediction_matches(predicted, got) {
                pass = false;
            }
            parts.push(format!("{q} {predicted:?}/{got}"));
        }
        out.push(format!("trichotomy #{idx} {eigs:.3?}"), pass, parts.join(", "));
    }
    Ok(())
}

fn tau_label(a: &RealMatrix, r0: &[f64], cfg: &TraceConfig) -> LimitLabel {
    sample_trace(a, r0, Quantity::Tau, cfg)
        .and_then(|t| classify_limit(&t, cfg))
        .map_or(LimitLabel::Inconclusive, |c| c.label)
}

fn limit_predictions(seed: u64, out: &mut SuiteOutcome) -> Result<()> {
    let cfg = TraceConfig::default();
    let families = [
        ("positive abscissa", catalog::unstable_canonical_suite(seed, 50)),
        ("critical chain", catalog::critical_chain_suite(seed, 20)),
    ];
    for (family, suite) in families {
        for (idx, a) in suite.iter().enumerate() {
            let r0 = sample_initial_condition(seed, idx as u64, a.dim());
            let predicted = predict_tau_limit(&summarize(a)?, a, &r0)?.class;
            let got = tau_label(a, &r0, &cfg);
            if got == LimitLabel::Inconclusive {
                out.inconclusive += 1;
            }
            let pass = predicted == PredictedLimit::TendsToZero
                && (got == LimitLabel::Inconclusive || prediction_matches(predicted, got));
            out.push(format!("{family} #{idx}"), pass, format!("tau predicted {predicted:?}, observed {got}"));
        }
    }
    for (idx, a) in catalog::simple_rotation_suite(seed, 20).iter().enumerate() {
        let r0 = sample_initial_condition(seed, idx as u64, a.dim());
        let p = predict_tau_limit(&summarize(a)?, a, &r0)?;
        let tau = curvature_profile(&derivative_stack(a, &r0, 1000.0, 3)?)?.log_tau.linear();
        let (pass, detail) = match (p.value, tau) {
            (Some(want), Some(tau)) => {
                let rel = (tau - want).abs() / want;
                (rel <= 1e-4, format!("tau(1000) = {tau:.9}, predicted {want:.9}, rel err {rel:.1e}"))
            }
            _ => (false, format!("prediction {:?}, tau(1000) {tau:?}", p.class)),
        };
        out.push(format!("rotation sum #{idx}"), pass, detail);
    }
    Ok(())
}

fn random_stack(seed: u64, n: usize, k: usize) -> Result<DerivativeStack> {
    let vectors = (0..k as u64)
        .map(|j| sample_initial_condition(seed, (1 << 20) + 16 * j + n as u64, n))
        .collect();
    DerivativeStack::from_vectors(0.0, vectors)
}

fn properties(seed: u64, out: &mut SuiteOutcome) -> Result<()> {
    for case in 0..40u64 {
        let n = 3 + (case % 6) as usize;
        let k = 1 + (case % 3) as usize;
        let s = random_stack(seed.wrapping_add(case), n, k)?;
        let (qr, cb) = (log_volume(&s, k).log_value, volume_minor_sum(&s, k)?.log_value);
        let d = (qr - cb).abs();
        out.push(format!("cauchy-binet n={n} k={k}"), d <= 1e-9, format!("|log difference| {d:.1e}"));
    }

    let systems = [
        catalog::four_mode_decay(),
        catalog::coupled_oscillator(),
        catalog::unstable_canonical_suite(seed, 1).remove(0),
        RealMatrix::diagonal(&[-0.5, 1.2, -2.0, 0.7])?,
    ];
    for (idx, a) in systems.iter().enumerate() {
        let n = a.dim();
        let r0 = sample_initial_condition(seed, idx as u64, n);
        let order = n.min(3) + 1;

        let (t, s) = (0.7, 1.3);
        let rt = mat_exp(a, t)?.apply(&r0);
        let whole = derivative_stack(a, &r0, t + s, order)?;
        let split = derivative_stack(a, &rt, s, order)?;
        let worst = (1..=order.min(n))
            .map(|k| (log_volume(&whole, k).log_value - log_volume(&split, k).log_value).abs())
            .fold(0.0, f64::max);
        out.push(format!("semigroup system {idx}"), worst <= 1e-9, format!("max log difference {worst:.1e}"));

        let base = curvature_profile(&derivative_stack(a, &r0, 2.0, order)?)?;
        let mut worst: f64 = 0.0;
        for c in [0.1, 10.0] {
            let scaled: Vec<f64> = r0.iter().map(|x| c * x).collect();
            let p = curvature_profile(&derivative_stack(a, &scaled, 2.0, order)?)?;
            let q = curvature_profile(&derivative_stack(&a.scaled(c), &r0, 2.0 / c, order)?)?;
            for k in 1..=order.min(n) {
                let b = base.log_v[k].log_value;
                worst = worst.max((p.log_v[k].log_value - b - k as f64 * c.ln()).abs());
                worst = worst.max((q.log_v[k].log_value - b - (k * (k + 1) / 2) as f64 * c.ln()).abs());
            }
            for i in 1..=base.log_kappa.len() {
                for (other, shift) in [(&p, -c.ln()), (&q, 0.0)] {
                    if let (LogValue::Log(x), LogValue::Log(y)) = (base.kappa(i), other.kappa(i)) {
                        worst = worst.max((y - x - shift).abs());
                    }
                }
            }
        }
        out.push(format!("scaling system {idx}"), worst <= 1e-10, format!("max log deviation {worst:.1e}"));
    }

    let cfg = TraceConfig::default();
    for (idx, eigs) in catalog::diagonal_suite(seed, 20).iter().enumerate() {
        let n = eigs.len();
        let d = RealMatrix::diagonal(eigs)?;
        let p = catalog::well_conditioned(seed, idx as u64, n);
        let inv = p.try_inverse().expect("well-conditioned");
        let a = &(&p * &d) * &inv;
        let r0 = sample_initial_condition(seed, idx as u64, n);
        let pr0 = p.apply(&r0);
        let mut pass = true;
        let mut compared = 0;
        for i in 1..n {
            let q = Quantity::Kappa(i);
            let label = |m: &RealMatrix, r: &[f64]| {
                sample_trace(m, r, q, &cfg)
                    .and_then(|t| classify_limit(&t, &cfg))
                    .map_or(LimitLabel::Inconclusive, |c| c.label)
            };
            let before = label(&d, &r0);
            if matches!(before, LimitLabel::TendsToZero | LimitLabel::TendsToInfinity) {
                compared += 1;
                pass &= label(&a, &pr0) == before;
            }
        }
        out.push(format!("similarity #{idx}"), pass, format!("{compared} labels compared"));
    }
    Ok(())
}
