//! n-sweep on the square under ℓ∞: measured covering radius, lower bound and fitted rate.
use lipbound::cli::{run_sweep, SweepConfig, SweepKind};

fn main() -> lipbound::Result<()> {
    let report = run_sweep(&SweepConfig::square_linf(vec![4, 16, 64, 256]))?;
    for r in &report.rows {
        println!("n={:5} radius {:.5} lower {:.5} scaled {:.4}", r.n, r.error.unwrap(), r.lower.unwrap(), r.scaled.unwrap());
    }
    println!("slope {:.4}, prefactor {:.4}", report.slope.unwrap(), report.prefactor.unwrap());
    let grid = run_sweep(&SweepConfig { kind: SweepKind::Grid, ..SweepConfig::square_linf(vec![4, 16, 64, 256]) })?;
    println!("grid slope {:.4}, prefactor {:.4}", grid.slope.unwrap(), grid.prefactor.unwrap());
    Ok(())
}
