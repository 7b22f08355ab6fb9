//! Optimized covering nodes on the disk versus farthest-point greedy.
use lipbound::domains::Domain;
use lipbound::pointopt::{greedy_farthest_point, optimize, OptimizerConfig};
use lipbound::wce::{covering_radius, CoverMode, InformationMap};
use lipbound::NormSpec;

fn main() -> lipbound::Result<()> {
    let disk = Domain::ball(vec![0.0, 0.0], 1.0, NormSpec::l2())?;
    let norm = NormSpec::l2();
    let n = 24;
    let cfg = OptimizerConfig { restarts: 2, iterations: 25, seed: 5, ..Default::default() };
    let opt = optimize(&disk, n, &norm, &cfg)?;
    let greedy = greedy_farthest_point(&disk, n, &norm, 10_000, 5)?;
    for (label, pts) in [("greedy", greedy), ("optimized", opt.points.clone())] {
        let r = covering_radius(&InformationMap::new(disk.clone(), pts, norm.clone())?, CoverMode::certified(1e-5))?;
        println!("{label:10} covering radius {:.5}", r.value);
    }
    println!("objective per iteration: {:?}", opt.trace.iter().map(|t| (t.objective * 1e4).round() / 1e4).collect::<Vec<_>>());
    print!("{}", opt.points.to_csv());
    Ok(())
}
