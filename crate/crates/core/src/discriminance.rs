//! Stability verdicts from curvature limits, and their reconciliation with
//! the eigenvalue criterion.
//!
//! The curvature criteria are sufficient conditions only. A geometric verdict
//! is therefore Stable, AsymptoticallyStable or Inconclusive, never Unstable.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::asymptotics::{classify_samples, LimitLabel, Quantity, TraceConfig};
use crate::error::{Error, Result};
use crate::linalg::RealMatrix;
use crate::spectral::{
    classify_eigen_stability, jordan_structure, predict_kappa_limit_diagonal, predict_tau_limit,
    summarize, JordanStructure, LimitPrediction, PredictedLimit, SpectralSummary,
};

/// Share of sampled initial conditions that must agree on a label.
pub const CONSENSUS: f64 = 0.8;

pub const NOTE_SINGULAR: &str = "det A = 0: the torsion criterion requires an invertible matrix";
pub const NOTE_NOT_DIAGONALIZABLE: &str =
    "A is not diagonalizable over the reals: the curvature criterion does not apply";
pub const NOTE_ZERO_LIMIT: &str =
    "limits tend to zero: the criterion is sufficient only and gives no conclusion";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Verdict {
    AsymptoticallyStable,
    Stable,
    Unstable,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    TorsionTheorem,
    CurvatureTheorem,
    EigenvalueOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub verdict: Verdict,
    pub provenance: Provenance,
    pub notes: Vec<String>,
}

impl StabilityVerdict {
    pub fn new(verdict: Verdict, provenance: Provenance) -> Self {
        Self {
            verdict,
            provenance,
            notes: Vec::new(),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Strength of the stability claim: 2 asymptotic, 1 plain, 0 none.
    fn strength(&self) -> u8 {
        match self.verdict {
            Verdict::AsymptoticallyStable => 2,
            Verdict::Stable => 1,
            _ => 0,
        }
    }
}

fn share(labels: &[LimitLabel], accept: impl Fn(LimitLabel) -> bool) -> f64 {
    labels.iter().filter(|&&l| accept(l)).count() as f64 / labels.len() as f64
}

fn require_labels(labels: &[LimitLabel]) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::Precondition("verdict needs at least one label".into()));
    }
    Ok(())
}

/// Verdict from `τ` labels. Needs invertible `A`. A consensus on `τ → ∞`
/// gives asymptotic stability; a consensus on any nonzero or non-existent
/// limit gives stability.
pub fn torsion_verdict(labels: &[LimitLabel], s: &SpectralSummary) -> Result<StabilityVerdict> {
    require_labels(labels)?;
    let v = |verdict| StabilityVerdict::new(verdict, Provenance::TorsionTheorem);
    if !s.invertible {
        return Ok(v(Verdict::Inconclusive).with_note(NOTE_SINGULAR));
    }
    Ok(if share(labels, |l| l == LimitLabel::TendsToInfinity) >= CONSENSUS {
        v(Verdict::AsymptoticallyStable)
    } else if share(labels, nonzero_limit) >= CONSENSUS {
        v(Verdict::Stable)
    } else if share(labels, |l| l == LimitLabel::TendsToZero) >= CONSENSUS {
        v(Verdict::Inconclusive).with_note(NOTE_ZERO_LIMIT)
    } else {
        v(Verdict::Inconclusive)
    })
}

fn nonzero_limit(l: LimitLabel) -> bool {
    matches!(
        l,
        LimitLabel::TendsToPositiveConst | LimitLabel::NoLimitBounded | LimitLabel::TendsToInfinity
    )
}

/// Verdict from `κ_i` labels for real diagonalizable `A`. A consensus on any
/// nonzero or non-existent limit gives stability, asymptotic when `A` is
/// invertible.
pub fn curvature_verdict(
    labels: &[LimitLabel],
    s: &SpectralSummary,
    diagonalizable_real: bool,
) -> Result<StabilityVerdict> {
    require_labels(labels)?;
    let v = |verdict| StabilityVerdict::new(verdict, Provenance::CurvatureTheorem);
    if !diagonalizable_real {
        return Ok(v(Verdict::Inconclusive).with_note(NOTE_NOT_DIAGONALIZABLE));
    }
    Ok(if share(labels, nonzero_limit) >= CONSENSUS {
        if s.invertible {
            v(Verdict::AsymptoticallyStable)
        } else {
            v(Verdict::Stable)
        }
    } else if share(labels, |l| l == LimitLabel::TendsToZero) >= CONSENSUS {
        v(Verdict::Inconclusive).with_note(NOTE_ZERO_LIMIT)
    } else {
        v(Verdict::Inconclusive)
    })
}

/// A geometric verdict contradicts the oracle when it claims more stability
/// than the spectrum allows.
pub fn contradicts(geometric: Verdict, oracle: Verdict) -> bool {
    match geometric {
        Verdict::AsymptoticallyStable => oracle != Verdict::AsymptoticallyStable,
        Verdict::Stable => oracle == Verdict::Unstable,
        _ => false,
    }
}

/// Per-sample agreement between an analytic prediction and numeric labels.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Agreement {
    pub agree: usize,
    /// Numeric label was Inconclusive.
    pub inconclusive: usize,
    /// Numeric label was a different definite class.
    pub disagree: usize,
}

impl Agreement {
    pub fn record(&mut self, predicted: PredictedLimit, label: LimitLabel) {
        match (predicted, label) {
            (PredictedLimit::NotPredicted, _) => {}
            (_, LimitLabel::Inconclusive) => self.inconclusive += 1,
            (p, l) if prediction_matches(p, l) => self.agree += 1,
            _ => self.disagree += 1,
        }
    }
}

pub fn prediction_matches(p: PredictedLimit, l: LimitLabel) -> bool {
    matches!(
        (p, l),
        (PredictedLimit::TendsToZero, LimitLabel::TendsToZero)
            | (PredictedLimit::TendsToInfinity, LimitLabel::TendsToInfinity)
            | (PredictedLimit::TendsToPositiveConst, LimitLabel::TendsToPositiveConst)
            | (PredictedLimit::NoLimitBounded, LimitLabel::NoLimitBounded)
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantityReport {
    pub quantity: Quantity,
    /// Label per sample; `None` where the sample failed.
    pub labels: Vec<Option<LimitLabel>>,
    pub histogram: BTreeMap<LimitLabel, usize>,
    pub failures: BTreeMap<String, usize>,
    pub verdict: StabilityVerdict,
    /// Prediction for the first sample (class does not depend on the sample).
    pub prediction: Option<LimitPrediction>,
    pub agreement: Agreement,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconciliationReport {
    pub geometric: StabilityVerdict,
    pub oracle: StabilityVerdict,
    pub consistent: bool,
    pub summary: SpectralSummary,
    pub jordan: Option<JordanStructure>,
    pub quantities: Vec<QuantityReport>,
    pub notes: Vec<String>,
}

/// Sampling settings for [`reconcile`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingPlan {
    pub trace: TraceConfig,
    pub samples: usize,
    pub seed: u64,
    /// Empty means every quantity defined in the dimension.
    pub quantities: Vec<Quantity>,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            trace: TraceConfig::default(),
            samples: 32,
            seed: 42,
            quantities: Vec::new(),
        }
    }
}

fn strongest(verdicts: &[&StabilityVerdict]) -> Option<StabilityVerdict> {
    let best = verdicts.iter().copied().max_by_key(|v| v.strength())?;
    if best.strength() > 0 {
        return Some(best.clone());
    }
    let mut notes: Vec<String> = Vec::new();
    for v in verdicts {
        for n in &v.notes {
            if !notes.contains(n) {
                notes.push(n.clone());
            }
        }
    }
    Some(StabilityVerdict {
        notes,
        ..best.clone()
    })
}

/// Every geometric and analytic check on one matrix.
pub fn reconcile(a: &RealMatrix, plan: &SamplingPlan) -> Result<ReconciliationReport> {
    let summary = summarize(a)?;
    let mut notes = summary.notes.clone();
    let jordan = match jordan_structure(a, &summary) {
        Ok(j) => Some(j),
        Err(e) => {
            notes.push(format!("Jordan structure unavailable: {e}"));
            None
        }
    };
    let diagonalizable_real = jordan
        .as_ref()
        .map_or(summary.diagonalizable_real, JordanStructure::diagonalizable_real);
    let oracle = classify_eigen_stability(&summary);

    let quantities = if plan.quantities.is_empty() {
        Quantity::all_for(a.dim())
    } else {
        for q in &plan.quantities {
            q.check(a.dim())?;
            if *q == Quantity::Tau && a.dim() < 3 {
                return Err(Error::Precondition("tau needs n >= 3".into()));
            }
        }
        plan.quantities.clone()
    };
    let outcomes = if quantities.is_empty() {
        notes.push("n = 1: no curvature is defined".into());
        Vec::new()
    } else {
        classify_samples(a, &quantities, &plan.trace, plan.samples, plan.seed)?
    };

    let mut reports = Vec::new();
    for (qi, &quantity) in quantities.iter().enumerate() {
        let mut labels = Vec::new();
        let mut histogram = BTreeMap::new();
        let mut failures = BTreeMap::new();
        let mut agreement = Agreement::default();
        let mut prediction = None;
        for o in &outcomes {
            let predicted = match quantity {
                Quantity::Tau => predict_tau_limit(&summary, a, &o.r0)
                    .unwrap_or_else(|e| LimitPrediction {
                        class: PredictedLimit::NotPredicted,
                        value: None,
                        applicable: false,
                        reason: e.to_string(),
                    }),
                Quantity::Kappa(i) => predict_kappa_limit_diagonal(&summary, i),
            };
            match &o.classes[qi] {
                Ok(c) => {
                    labels.push(Some(c.label));
                    *histogram.entry(c.label).or_insert(0) += 1;
                    agreement.record(predicted.class, c.label);
                }
                Err(e) => {
                    labels.push(None);
                    *failures.entry(e.to_string()).or_insert(0) += 1;
                }
            }
            prediction.get_or_insert(predicted);
        }
        let ok: Vec<LimitLabel> = labels.iter().flatten().copied().collect();
        let provenance = match quantity {
            Quantity::Tau => Provenance::TorsionTheorem,
            Quantity::Kappa(_) => Provenance::CurvatureTheorem,
        };
        let verdict = if ok.is_empty() {
            StabilityVerdict::new(Verdict::Inconclusive, provenance)
                .with_note("no sample produced a label")
        } else {
            match quantity {
                Quantity::Tau => torsion_verdict(&ok, &summary)?,
                Quantity::Kappa(_) => curvature_verdict(&ok, &summary, diagonalizable_real)?,
            }
        };
        reports.push(QuantityReport {
            quantity,
            labels,
            histogram,
            failures,
            verdict,
            prediction,
            agreement,
        });
    }

    let verdicts: Vec<&StabilityVerdict> = reports.iter().map(|r| &r.verdict).collect();
    let geometric = strongest(&verdicts).unwrap_or_else(|| {
        StabilityVerdict::new(Verdict::Inconclusive, Provenance::CurvatureTheorem)
            .with_note("no curvature is defined")
    });
    let consistent = !contradicts(geometric.verdict, oracle.verdict);
    Ok(ReconciliationReport {
        geometric,
        oracle,
        consistent,
        summary,
        jordan,
        quantities: reports,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn summary(a: &RealMatrix) -> SpectralSummary {
        summarize(a).unwrap()
    }

    fn small_plan() -> SamplingPlan {
        SamplingPlan {
            samples: 8,
            ..SamplingPlan::default()
        }
    }

    #[test]
    fn torsion_rules() {
        let osc = summary(&catalog::coupled_oscillator());
        let v = torsion_verdict(&[LimitLabel::NoLimitBounded; 5], &osc).unwrap();
        assert_eq!(v.verdict, Verdict::Stable);
        assert_eq!(v.provenance, Provenance::TorsionTheorem);

        let d = summary(&RealMatrix::diagonal(&[-1.0, -2.0, -2.5]).unwrap());
        let v = torsion_verdict(&[LimitLabel::TendsToInfinity; 5], &d).unwrap();
        assert_eq!(v.verdict, Verdict::AsymptoticallyStable);

        let r = summary(&catalog::nilpotent_with_decay());
        let v = torsion_verdict(&[LimitLabel::TendsToPositiveConst; 5], &r).unwrap();
        assert_eq!(v.verdict, Verdict::Inconclusive);
        assert_eq!(v.notes, vec![NOTE_SINGULAR.to_string()]);

        let v = torsion_verdict(&[LimitLabel::TendsToZero; 5], &d).unwrap();
        assert_eq!(v.verdict, Verdict::Inconclusive);
        assert!(torsion_verdict(&[], &d).is_err());
    }

    #[test]
    fn curvature_rules() {
        let ex = summary(&catalog::four_mode_decay());
        let v = curvature_verdict(&[LimitLabel::TendsToInfinity; 4], &ex, true).unwrap();
        assert_eq!(v.verdict, Verdict::AsymptoticallyStable);

        let d = summary(&RealMatrix::diagonal(&[-1.0, -2.0, -3.0]).unwrap());
        let v = curvature_verdict(&[LimitLabel::TendsToPositiveConst; 4], &d, true).unwrap();
        assert_eq!(v.verdict, Verdict::AsymptoticallyStable);

        let rot = summary(&catalog::rotation_block(0.0, 1.0, 1));
        let v = curvature_verdict(&[LimitLabel::TendsToPositiveConst; 4], &rot, false).unwrap();
        assert_eq!(v.verdict, Verdict::Inconclusive);
        assert_eq!(v.notes, vec![NOTE_NOT_DIAGONALIZABLE.to_string()]);
    }

    #[test]
    fn consensus_threshold() {
        let d = summary(&RealMatrix::diagonal(&[-1.0, -2.0, -2.5]).unwrap());
        let mut labels = vec![LimitLabel::TendsToInfinity; 8];
        labels.extend([LimitLabel::Inconclusive; 2]);
        assert_eq!(torsion_verdict(&labels, &d).unwrap().verdict, Verdict::AsymptoticallyStable);
        labels.push(LimitLabel::Inconclusive);
        assert_eq!(torsion_verdict(&labels, &d).unwrap().verdict, Verdict::Inconclusive);
    }

    #[test]
    fn contradiction_table() {
        use Verdict::*;
        assert!(contradicts(Stable, Unstable));
        assert!(contradicts(AsymptoticallyStable, Stable));
        assert!(!contradicts(Stable, AsymptoticallyStable));
        assert!(!contradicts(Inconclusive, Unstable));
    }

    #[test]
    fn reconcile_diagonal() {
        let r = reconcile(&RealMatrix::diagonal(&[-1.0, -2.0, -2.5]).unwrap(), &small_plan()).unwrap();
        assert!(r.consistent);
        assert_eq!(r.geometric.verdict, Verdict::AsymptoticallyStable);
        assert_eq!(r.oracle.verdict, Verdict::AsymptoticallyStable);
        let k2 = r.quantities.iter().find(|q| q.quantity == Quantity::Kappa(2)).unwrap();
        assert_eq!(k2.agreement.agree, 8);
    }

    #[test]
    fn reconcile_singular_stable() {
        let r = reconcile(&catalog::triple_decay_with_zero(), &small_plan()).unwrap();
        assert_eq!(r.oracle.verdict, Verdict::Stable);
        assert_eq!(r.geometric.verdict, Verdict::Inconclusive);
        assert!(r.geometric.notes.iter().any(|n| n == NOTE_SINGULAR));
        assert!(r.consistent);
        let tau = &r.quantities[0];
        assert_eq!(tau.histogram.get(&LimitLabel::TendsToInfinity), Some(&8));
    }

    #[test]
    fn reconcile_unstable_pair() {
        let a = RealMatrix::diagonal(&[1.0, -1.0]).unwrap();
        let r = reconcile(&a, &small_plan()).unwrap();
        assert_eq!(r.oracle.verdict, Verdict::Unstable);
        assert_eq!(r.geometric.verdict, Verdict::Inconclusive);
        assert!(r.consistent);
    }

    #[test]
    fn reconcile_scalar_system() {
        let r = reconcile(&RealMatrix::diagonal(&[-1.0]).unwrap(), &small_plan()).unwrap();
        assert!(r.quantities.is_empty());
        assert_eq!(r.oracle.verdict, Verdict::AsymptoticallyStable);
        assert_eq!(r.geometric.verdict, Verdict::Inconclusive);
        assert!(r.consistent);
    }
}
