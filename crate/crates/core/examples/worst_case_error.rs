//! Worst-case errors of recovery and integration for Lipschitz and Hölder classes,
//! plus the central algorithm and the nearest-node quadrature on a test function.
use lipbound::domains::Domain;
use lipbound::pointopt::make_grid_points;
use lipbound::wce::{central_algorithm, voronoi_quadrature, wce_integration, wce_linf, CoverMode, InformationMap, Modulus};
use lipbound::NormSpec;

fn main() -> lipbound::Result<()> {
    let square = Domain::unit_cube(2);
    let info = InformationMap::new(square.clone(), make_grid_points(&square, 5)?, NormSpec::l2())?;
    for omega in [Modulus::Identity, Modulus::power(0.5)?] {
        let linf = wce_linf(&info, &omega, CoverMode::certified(1e-6))?;
        let int = wce_integration(&info, &omega, 200_000, 3)?;
        println!("{omega:?}: L∞ error {:.5}, integration error {:.5} ± {:.1e}", linf.value, int.value, int.stderr.unwrap());
    }
    let f = |x: &[f64]| (x[0] - 0.3).abs() * 0.6 + (x[1] - 0.7).abs() * 0.6;
    let values = info.apply(f);
    let x = [0.41, 0.13];
    let guess = central_algorithm(&info, &values, &Modulus::Identity, &x)?;
    let q = voronoi_quadrature(&info, &values, 200_000, 4)?;
    println!("central algorithm at {x:?}: {guess:.4} (true {:.4})", f(&x));
    println!("nearest-node quadrature: {:.5} ± {:.1e}", q.value, q.stderr);
    Ok(())
}
