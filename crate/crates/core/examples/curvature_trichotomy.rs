//! Limits of k_i for diagonal systems: predicted from the spectrum, then observed.

use torsionstab::asymptotics::{classify_limit, sample_initial_condition, sample_trace, Quantity, TraceConfig};
use torsionstab::catalog;
use torsionstab::linalg::RealMatrix;
use torsionstab::spectral::{kappa_log_slope, predict_kappa_limit_diagonal, summarize};

fn main() -> torsionstab::Result<()> {
    let cfg = TraceConfig::default();
    for (idx, eigs) in catalog::diagonal_suite(42, 5).iter().enumerate() {
        let a = RealMatrix::diagonal(eigs)?;
        let s = summarize(&a)?;
        let r0 = sample_initial_condition(42, idx as u64, eigs.len());
        println!("eigenvalues {eigs:.3?}");
        for i in 1..eigs.len() {
            let q = Quantity::Kappa(i);
            let predicted = predict_kappa_limit_diagonal(&s, i);
            let observed = classify_limit(&sample_trace(&a, &r0, q, &cfg)?, &cfg)?;
            let slope = kappa_log_slope(&s, i).unwrap_or(f64::NAN);
            println!(
                "  {q}: predicted {:?} (rate {slope:+.3}), observed {} (slope {:+.3})",
                predicted.class, observed.label, observed.evidence.slope
            );
        }
    }
    Ok(())
}
