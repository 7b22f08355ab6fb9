//! Exact and Monte Carlo volumes for a box, a disk and the builtin L-shape.
use lipbound::domains::{volume, volume_monte_carlo, Domain};
use lipbound::NormSpec;

fn main() -> lipbound::Result<()> {
    let shapes = [
        ("unit square", Domain::unit_cube(2)),
        ("unit disk", Domain::ball(vec![0.0, 0.0], 1.0, NormSpec::l2())?),
        ("L-shape", Domain::builtin_mask("l_shape", None)?),
    ];
    for (name, d) in shapes {
        let exact = volume(&d, 100_000, 1)?;
        let mc = volume_monte_carlo(&d, 100_000, 1)?;
        println!("{name:12} closed form {:.6}  monte carlo {:.6} ± {:.6}", exact.value, mc.value, mc.stderr);
    }
    Ok(())
}
