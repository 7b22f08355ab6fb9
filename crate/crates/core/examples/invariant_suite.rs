//! The invariant suite behind `lipbound verify`, and the same suite with a corrupted
//! ball-volume formula to show that it bites.
use lipbound::cli::{run_verify, VerifyOptions};
use lipbound::NormSpec;

fn main() {
    let good = run_verify(&VerifyOptions::default());
    println!("correct formulas: {} passed, {} failed", good.passed, good.failed);
    let bad = run_verify(&VerifyOptions {
        ball_volume: |d: usize, n: &NormSpec| lipbound::geometry::unit_ball_volume(d, n).map(|v| v * 1.1),
        ..Default::default()
    });
    for c in bad.checks.iter().filter(|c| !c.pass) {
        println!("mutant caught by {}::{} ({})", c.module, c.name, c.detail);
    }
}
