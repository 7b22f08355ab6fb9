//! Dirichlet and Neumann eigenvalues of the L-shape with Weyl ratios and the Li–Yau check.
use lipbound::domains::Domain;
use lipbound::spectral::{discretize, eigenvalue_bound_check, eigenvalues, weyl_ratio, Boundary, BoundKind};

fn main() -> lipbound::Result<()> {
    let grid = discretize(&Domain::builtin_mask("l_shape", None)?, 1.0 / 48.0)?;
    for bc in [Boundary::Dirichlet, Boundary::Neumann] {
        let s = eigenvalues(&grid, bc, 40)?;
        println!("{bc}: first five {:?} ({} solver, residual {:.1e})", &s.eigenvalues[..5], s.solver, s.max_residual);
        let ratios = weyl_ratio(&s, s.volume, 2)?;
        println!("  Weyl ratio at k = {}: {:.4}", ratios.last().unwrap().0, ratios.last().unwrap().1);
        if bc == Boundary::Dirichlet {
            let c = eigenvalue_bound_check(&s, s.volume, 2, BoundKind::LiYau)?;
            println!("  Li–Yau: all pass {}, min margin {:.3}", c.all_pass, c.min_margin);
        }
    }
    Ok(())
}
