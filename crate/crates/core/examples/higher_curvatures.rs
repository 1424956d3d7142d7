//! All curvatures of a decaying trajectory; the last one grows like e^t.

use torsionstab::catalog;
use torsionstab::geometry::{curvature_profile, LogValue};
use torsionstab::linalg::Trajectory;

fn main() -> torsionstab::Result<()> {
    let traj = Trajectory::new(&catalog::four_mode_decay(), &[1.0; 4])?;
    println!("{:>5} {:>12} {:>12} {:>12} {:>12}", "t", "ln k1", "ln k2", "ln k3", "ln tau");
    for t in [1.0, 5.0, 10.0, 20.0, 40.0, 60.0] {
        let p = curvature_profile(&traj.stack(t, 4)?)?;
        let show = |v: LogValue| match v {
            LogValue::Log(x) => format!("{x:>12.4}"),
            other => format!("{:>12}", format!("{other:?}")),
        };
        println!("{t:>5} {} {} {} {}", show(p.kappa(1)), show(p.kappa(2)), show(p.kappa(3)), show(p.log_tau));
    }
    Ok(())
}
