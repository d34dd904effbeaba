//! Structural checks on the built-in examples and on a problem whose
//! interior curve runs into the upper limit.
//!
//! ```text
//! cargo run --release --example validation
//! ```

use vie::problem::DEFAULT_SAMPLES;
use vie::{
    builtin_examples, validate_linear, Curve, CurveSet, KernelFamily, KernelFn, LinearProblem,
    RealFn, RhsVariant,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for variant in [RhsVariant::Manufactured, RhsVariant::Printed] {
        for ex in builtin_examples(variant)? {
            let report = ex.problem.validate(DEFAULT_SAMPLES);
            let failed: Vec<&str> = report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.as_str())
                .collect();
            println!(
                "{:<9} {variant:?}: overall {} {failed:?}",
                ex.name, report.overall
            );
        }
    }

    // alpha_1(t) = t - t^2 touches t at the origin and stays below it
    // afterwards, but its slope at 0 equals one
    let curve = Curve::new(RealFn::new(|t| t - t * t), RealFn::new(|t| 1.0 - 2.0 * t));
    let family = KernelFamily::new(
        CurveSet::new(vec![curve]),
        vec![KernelFn::constant(1.0), KernelFn::constant(-1.0)],
    )?;
    let problem = LinearProblem::new(family, RealFn::new(|t| t * t), None, 0.5)?;
    println!("\n{}", validate_linear(&problem, 200));
    Ok(())
}
