//! Modified Newton-Kantorovich iteration: a linear equation in nonlinear
//! form converges in one step, a mildly nonlinear one contracts.
//!
//! ```text
//! cargo run --release --example newton_kantorovich
//! ```

use vie::problem::manufacture_rhs_default;
use vie::{
    builtin_example, max_pointwise_error, newton_kantorovich_solve, solve_direct, CurveSet,
    KernelFamily, KernelFn, Mesh, NkConfig, NonlinearProblem, Nonlinearity, Problem, RealFn,
    RhsVariant, StepKind,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // G_i(s, x) = x reproduces the linear direct solver exactly
    let ex = builtin_example("example2", RhsVariant::Manufactured)?;
    let Problem::Linear(linear) = &ex.problem else {
        unreachable!("example2 is linear")
    };
    let disguise = NonlinearProblem::linear_disguise(linear);
    let mesh = Mesh::uniform(128, linear.horizon)?;
    let nk = newton_kantorovich_solve(&disguise, &mesh, &NkConfig::default())?;
    let direct = solve_direct(linear, &mesh, StepKind::Constant)?;
    let gap = nk
        .solution
        .node_values()
        .iter()
        .zip(direct.node_values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!(
        "disguise: gaps {:?}, |nk - direct| = {gap:e}",
        nk.iterate_gaps
    );

    // x + x^3 / 10 with jumps across t/2
    let family = KernelFamily::new(
        CurveSet::proportional(&[0.5]),
        vec![KernelFn::new(|t, s| 1.0 + t * s), KernelFn::constant(2.0)],
    )?;
    let g = vec![Nonlinearity::new(|_, x: f64| x + 0.1 * x.powi(3)); 2];
    let g_x = vec![Nonlinearity::new(|_, x: f64| 1.0 + 0.3 * x * x); 2];
    let exact = RealFn::new(|t| 1.0 + t.sin());
    let f = manufacture_rhs_default(&family, &exact, Some(&g), 1.0)?;
    let problem = NonlinearProblem::new(family, g, Some(g_x), f, None, 1.0)?;
    let config = NkConfig {
        initial: Some(RealFn::constant(1.0)),
        max_outer: 60,
        ..NkConfig::default()
    };
    let nk = newton_kantorovich_solve(&problem, &Mesh::uniform(256, 1.0)?, &config)?;
    for (m, gap) in nk.iterate_gaps.iter().enumerate() {
        println!("outer step {:>2}: gap {gap:.3e}", m + 1);
    }
    println!(
        "converged={}  eps={:.3e}",
        nk.converged,
        max_pointwise_error(&nk.solution, &exact)
    );
    Ok(())
}
