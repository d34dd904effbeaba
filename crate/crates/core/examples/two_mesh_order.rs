//! Observed convergence order from two-mesh differences alone, for an
//! equation whose exact solution is not supplied.
//!
//! ```text
//! cargo run --release --example two_mesh_order
//! ```

use vie::convergence::halving_chain;
use vie::{
    run_benchmark, CurveSet, KernelFamily, KernelFn, LinearProblem, Method, Problem, RealFn,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let family = KernelFamily::new(
        CurveSet::proportional(&[0.3]),
        vec![
            KernelFn::new(|t, s| (t - s).cos()),
            KernelFn::new(|_, s| -2.0 - s),
        ],
    )?;
    let f = RealFn::new(|t| (2.0 * t).sin() * (-t).exp());
    let problem = Problem::Linear(LinearProblem::new(family, f, None, 1.0)?);
    let steps = halving_chain(1.0 / 16.0, 1.0 / 8192.0)?;
    for method in [Method::Constant, Method::Linear] {
        let report = run_benchmark("no-exact", &problem, None, &method, &steps)?;
        print!("{}", report.to_markdown());
        println!(
            "mean p_N (3 finest pairs): {:.3}\n",
            report.mean_order(3).unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
