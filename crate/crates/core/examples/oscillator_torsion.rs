//! Periodic torsion of two coupled masses, against its closed form.

use torsionstab::asymptotics::{classify_limit, sample_trace, Quantity, TraceConfig};
use torsionstab::catalog;
use torsionstab::geometry::curvature_profile;
use torsionstab::linalg::Trajectory;

fn closed_form(t: f64) -> f64 {
    let w = 2.0 * 5f64.sqrt() * t;
    let s = 5f64.sqrt() * w.sin() + 2.0 * w.cos();
    (s + 17.0) / (2.0 * (s - 11.0).powi(2))
}

fn main() -> torsionstab::Result<()> {
    let a = catalog::coupled_oscillator();
    let r0 = [1.0, 2.0, 1.0, 2.0];
    let traj = Trajectory::new(&a, &r0)?;
    println!("{:>5} {:>14} {:>14}", "t", "tau^2", "closed form");
    for j in 0..=10 {
        let t = 0.25 * j as f64;
        let tau = curvature_profile(&traj.stack(t, 3)?)?.log_tau.linear().unwrap_or(f64::NAN);
        println!("{t:>5.2} {:>14.10} {:>14.10}", tau * tau, closed_form(t));
    }
    let cfg = TraceConfig::default();
    let class = classify_limit(&sample_trace(&a, &r0, Quantity::Tau, &cfg)?, &cfg)?;
    println!("tau as t -> inf: {} (spread {:.3})", class.label, class.evidence.oscillation);
    Ok(())
}
