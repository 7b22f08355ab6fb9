//! Every closed-form bound for one set of inputs, plus the curse-of-dimension threshold across d.
use lipbound::bounds::{compute, curse_min_n, BoundInputs, FormulaId};
use lipbound::NormSpec;

fn main() -> lipbound::Result<()> {
    let inputs = BoundInputs { n: Some(100.0), d: 2, norm: Some(NormSpec::l2()), vol: Some(1.0), eps: Some(0.1), r: Some(2.0), c_r: Some(1.0) };
    for f in FormulaId::ALL {
        let b = compute(f, &inputs)?;
        println!("{:7} {:28} [{:.5}, {:.5}] asymptotic={}", f.as_str(), b.quantity, b.lo, b.hi, b.asymptotic);
    }
    for d in [2, 5, 10, 20] {
        let r = curse_min_n(0.1, d, 2.0)?;
        println!("d={d:2}: n(0.1) ≥ {:.3e}", r.value);
    }
    Ok(())
}
