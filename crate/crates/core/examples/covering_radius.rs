//! Certified covering radius of a grid and of random nodes, with the uniform lower bound.
use lipbound::bounds::linf_uniform_lower;
use lipbound::domains::{sample_uniform, Domain};
use lipbound::pointopt::make_grid_points;
use lipbound::wce::{covering_radius, CoverMode, InformationMap};
use lipbound::NormSpec;

fn main() -> lipbound::Result<()> {
    let square = Domain::unit_cube(2);
    let norm = NormSpec::linf();
    for (label, nodes) in [("4x4 grid", make_grid_points(&square, 4)?), ("16 random", sample_uniform(&square, 16, 7)?)] {
        let info = InformationMap::new(square.clone(), nodes, norm.clone())?;
        let r = covering_radius(&info, CoverMode::certified(1e-6))?;
        let mc = covering_radius(&info, CoverMode::MonteCarlo { budget: 100_000, seed: 1 })?;
        println!("{label:10} certified [{:.6}, {:.6}]  sampled max {:.6}", r.lo.unwrap(), r.hi.unwrap(), mc.value);
    }
    println!("uniform lower bound for n = 16: {:.6}", linf_uniform_lower(16.0, 2, &norm, 1.0)?.value);
    Ok(())
}
