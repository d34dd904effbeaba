//! The local existence and uniqueness condition for nonlinear equations,
//! evaluated for a few Lipschitz bounds, plus the derivative kernels used
//! by Newton-Kantorovich.
//!
//! ```text
//! cargo run --release --example solvability_condition
//! ```

use vie::nonlinear::{check_theorem1, frechet_linearize};
use vie::{builtin_example, Problem, RealFn, RhsVariant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ex = builtin_example("example4", RhsVariant::Manufactured)?;
    let Problem::Nonlinear(problem) = &ex.problem else {
        unreachable!("example4 is nonlinear")
    };
    // |d/dx sin x| <= 1, |d/dx 2 cos x| <= 2, |d/dx sin^2 x| <= 1
    for q in [[0.0, 0.0, 0.0], [0.5, 0.5, 0.5], [1.0, 2.0, 1.0]] {
        let r = check_theorem1(problem, &q)?;
        println!(
            "q={q:?}: lhs={:.4} K_n(0,0)={} passed={}",
            r.lhs, r.kn_origin, r.passed
        );
    }
    let linearized = frechet_linearize(problem, &RealFn::new(|t| t + std::f64::consts::PI));
    for t in [0.0, 0.5, 1.0] {
        let row: Vec<String> = (0..linearized.pieces())
            .map(|p| format!("{:+.4}", linearized.kernel(p, t, t)))
            .collect();
        println!("K_i(t,t) G_ix at t={t}: {}", row.join(" "));
    }
    Ok(())
}
