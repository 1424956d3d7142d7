//! Constant torsion of a sum of undamped rotations, predicted and measured.

use torsionstab::asymptotics::sample_initial_condition;
use torsionstab::catalog;
use torsionstab::geometry::curvature_profile;
use torsionstab::linalg::derivative_stack;
use torsionstab::spectral::{predict_tau_limit, summarize};

fn main() -> torsionstab::Result<()> {
    let mut systems = vec![(catalog::two_frequency_rotation(), vec![1.0, 0.0, 1.0, 0.0])];
    for a in catalog::simple_rotation_suite(42, 3) {
        let r0 = sample_initial_condition(42, 0, a.dim());
        systems.push((a, r0));
    }
    for (a, r0) in systems {
        let p = predict_tau_limit(&summarize(&a)?, &a, &r0)?;
        let tau = curvature_profile(&derivative_stack(&a, &r0, 1000.0, 3)?)?.log_tau.linear();
        println!("n = {}: predicted {:?} {:?}, tau(1000) = {:?}", a.dim(), p.class, p.value, tau);
    }
    Ok(())
}
