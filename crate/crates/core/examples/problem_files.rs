//! Reading a problem definition from text and solving it.
//!
//! ```text
//! cargo run --release --example problem_files
//! cargo run --release --example problem_files -- crates/core/problems/example3.vie
//! ```

use vie::convergence::{default_chain, Method};
use vie::problem_file::{load_problem, parse_problem};
use vie::run_benchmark;

const DEFINITION: &str = "
name = two-branch
n = 2
T = 1

[curves]
alpha1 = t/2          # derivative taken numerically

[kernels]
K1 = exp(-t*s)
K2 = -(2 + s^2)

[rhs]
exact = cos(t) - 1 + t
f = manufactured
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let def = match std::env::args().nth(1) {
        Some(path) => load_problem(path.as_ref())?,
        None => parse_problem(DEFINITION)?,
    };
    println!("{}\n", def.problem.validate(200));
    let method = if def.problem.is_linear() {
        Method::Linear
    } else {
        Method::NonlinearDirect(def.direct_config())
    };
    let report = run_benchmark(
        &def.name,
        &def.problem,
        def.exact.as_ref(),
        &method,
        &default_chain()[..5],
    )?;
    print!("{}", report.to_markdown());

    // errors carry line and column
    if let Err(e) = parse_problem("n = 1\nT = 1\n[kernels]\nK1 = 2 * (t\n[rhs]\nf = t\n") {
        println!("\n{e}");
    }
    Ok(())
}
