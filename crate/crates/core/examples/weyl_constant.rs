//! Shape independence of the Weyl constant: square, disk and L-shape of area one.
use lipbound::cli::compare_weyl;
use lipbound::domains::Domain;
use lipbound::spectral::{discretize, eigenvalues, Boundary};
use lipbound::NormSpec;

fn main() -> lipbound::Result<()> {
    let side = (4.0f64 / 3.0).sqrt();
    let shapes = [
        ("square", Domain::unit_cube(2)),
        ("disk", Domain::ball(vec![0.0, 0.0], 1.0 / std::f64::consts::PI.sqrt(), NormSpec::l2())?),
        ("L-shape", Domain::builtin_mask("l_shape", Some((vec![0.0, 0.0], vec![side, side])))?),
    ];
    let mut spectra = Vec::new();
    for (name, d) in shapes {
        spectra.push((name.to_string(), eigenvalues(&discretize(&d, 1.0 / 80.0)?, Boundary::Dirichlet, 80)?));
    }
    let cmp = compare_weyl(&spectra, 0.10);
    for e in &cmp.entries {
        println!("{:8} {:?}", e.source, e.estimate.as_ref().map(|w| w.value));
    }
    println!("spread {:.2}%, limit {:.4}", 100.0 * cmp.spread.unwrap(), cmp.reference.unwrap());
    Ok(())
}
