//! Piecewise constant and piecewise linear solutions of one linear
//! equation, with their pointwise error and equation residual.
//!
//! ```text
//! cargo run --release --example direct_methods -- 256
//! ```

use vie::{
    builtin_example, max_pointwise_error, residual_sup_norm, solve_direct, Mesh, Problem,
    RhsVariant, StepKind,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let segments: usize = std::env::args().nth(1).map_or(Ok(256), |s| s.parse())?;
    let ex = builtin_example("example2", RhsVariant::Manufactured)?;
    let Problem::Linear(problem) = &ex.problem else {
        unreachable!("example2 is linear")
    };
    let mesh = Mesh::uniform(segments, problem.horizon)?;
    for kind in [StepKind::Constant, StepKind::Linear] {
        let x = solve_direct(problem, &mesh, kind)?;
        println!(
            "{kind:?}: x(0)={:.6} x(T)={:.6} (exact {:.6})  eps={:.3e}  residual={:.3e}",
            x.x0(),
            x.evaluate(problem.horizon),
            ex.exact.eval(problem.horizon),
            max_pointwise_error(&x, &ex.exact),
            residual_sup_norm(problem, &x, 4),
        );
    }
    Ok(())
}
