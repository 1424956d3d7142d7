//! Writes a curvature trace as CSV to stdout.

use torsionstab::asymptotics::{profile_grid, Grid, TraceConfig};
use torsionstab::catalog;
use torsionstab::cli::csv::write_trace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = catalog::coupled_oscillator();
    let cfg = TraceConfig {
        t_start: 0.0,
        t_end: 5.0,
        num_points: 51,
        grid: Grid::Linear,
        ..TraceConfig::default()
    };
    let rows = profile_grid(&a, &[1.0, 2.0, 1.0, 2.0], &cfg)?;
    write_trace(&mut std::io::stdout().lock(), a.dim(), &rows)?;
    Ok(())
}
