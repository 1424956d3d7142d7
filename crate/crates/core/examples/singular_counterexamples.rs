//! Singular systems where the torsion limit points the wrong way.

use torsionstab::asymptotics::{classify_limit, sample_trace, Quantity, TraceConfig};
use torsionstab::catalog;
use torsionstab::discriminance::{reconcile, SamplingPlan};

fn main() -> torsionstab::Result<()> {
    let cfg = TraceConfig::default();
    let plan = SamplingPlan::default();
    for (name, a) in [
        ("J_2(0) + C_1(-1, 1)", catalog::nilpotent_with_decay()),
        ("J_3(-1) + J_1(0)", catalog::triple_decay_with_zero()),
    ] {
        let tau = classify_limit(&sample_trace(&a, &[1.0; 4], Quantity::Tau, &cfg)?, &cfg)?;
        let r = reconcile(&a, &plan)?;
        println!("{name}");
        println!("  tau: {} {:?}", tau.label, tau.value);
        println!("  geometric {:?} {:?}", r.geometric.verdict, r.geometric.notes);
        println!("  oracle    {:?}", r.oracle.verdict);
    }
    Ok(())
}
