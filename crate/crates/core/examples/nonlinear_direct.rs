//! Forward marching for the nonlinear equation, one bracketed scalar root
//! per node, reporting the nodes where only a tangential root existed.
//!
//! ```text
//! cargo run --release --example nonlinear_direct -- 1024
//! ```

use vie::nonlinear::{nonlinear_seed, solve_nonlinear_direct_traced};
use vie::{builtin_example, max_pointwise_error, Mesh, Problem, RhsVariant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let segments: usize = std::env::args().nth(1).map_or(Ok(1024), |s| s.parse())?;
    let ex = builtin_example("example4", RhsVariant::Manufactured)?;
    let Problem::Nonlinear(problem) = &ex.problem else {
        unreachable!("example4 is nonlinear")
    };
    let config = ex.direct_config();
    println!("seed x(0): {:?}", nonlinear_seed(problem, &config.bracket)?);

    let mesh = Mesh::uniform(segments, problem.horizon)?;
    let trace = solve_nonlinear_direct_traced(problem, &mesh, &config)?;
    println!(
        "eps = {:.3e}",
        max_pointwise_error(&trace.solution, &ex.exact)
    );
    if let (Some(first), Some(last)) = (trace.tangent_nodes.first(), trace.tangent_nodes.last()) {
        println!(
            "{} tangential nodes between t={:.4} and t={:.4}",
            trace.tangent_nodes.len(),
            mesh.node(*first),
            mesh.node(*last)
        );
    }
    for i in 0..=8 {
        let t = problem.horizon * i as f64 / 8.0;
        println!(
            "x({t:.2}) = {:.6}   exact {:.6}",
            trace.solution.evaluate(t),
            ex.exact.eval(t)
        );
    }
    Ok(())
}
