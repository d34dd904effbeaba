//! Successive approximations with the regularization parameter picked
//! from a grid by the smallest equation residual.
//!
//! ```text
//! cargo run --release --example iterative_regularization
//! ```

use vie::iterative::IterativeConfig;
use vie::{builtin_example, max_pointwise_error, solve_iterative, Mesh, Problem, RhsVariant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ex = builtin_example("example3", RhsVariant::Manufactured)?;
    let Problem::Linear(problem) = &ex.problem else {
        unreachable!("example3 is linear")
    };
    let mesh = Mesh::uniform(256, problem.horizon)?;
    let config = IterativeConfig {
        gamma_grid: vec![0.1, 0.5, 1.0, 1.5],
        max_iter: 100,
        ..IterativeConfig::default()
    };
    let result = solve_iterative(problem, &mesh, &config)?;
    for trace in &result.residual_history {
        let last = trace.residuals.last().copied().unwrap_or(f64::NAN);
        let state = if trace.diverged {
            "diverged"
        } else if trace.stagnated {
            "stagnated"
        } else {
            "sweep limit"
        };
        println!(
            "gamma={:<4} sweeps={:<4} final residual={last:.3e} ({state})",
            trace.gamma,
            trace.residuals.len()
        );
    }
    println!(
        "gamma*={}  eps={:.3e}  symmetric kernels: {}",
        result.gamma_star,
        max_pointwise_error(&result.solution, &ex.exact),
        result.kernels_symmetric
    );
    Ok(())
}
