//! Geometric and eigenvalue verdicts for a dense decaying system.

use torsionstab::catalog;
use torsionstab::discriminance::{reconcile, SamplingPlan};

fn main() -> torsionstab::Result<()> {
    let a = catalog::four_mode_decay();
    let r = reconcile(&a, &SamplingPlan::default())?;
    for q in &r.quantities {
        println!("{:>8}  {:?}  -> {:?}", q.quantity.to_string(), q.histogram, q.verdict.verdict);
    }
    println!("geometric {:?} via {:?}", r.geometric.verdict, r.geometric.provenance);
    println!("oracle    {:?}", r.oracle.verdict);
    println!("consistent {}", r.consistent);
    Ok(())
}
