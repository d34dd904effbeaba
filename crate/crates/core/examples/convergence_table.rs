//! Step-halving sweep on one built-in example, printed as a Markdown table.
//!
//! ```text
//! cargo run --release --example convergence_table -- example2 pl
//! ```

use std::time::Instant;

use vie::convergence::default_chain;
use vie::iterative::IterativeConfig;
use vie::{builtin_example, run_benchmark, Method, RhsVariant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "example2".into());
    let method = args.next().unwrap_or_else(|| "pc".into());
    let ex = builtin_example(&name, RhsVariant::Manufactured)?;
    let method = match method.as_str() {
        "pc" => Method::Constant,
        "pl" => Method::Linear,
        "iter" => Method::Iterative(IterativeConfig::default()),
        "nk" => Method::NewtonKantorovich(ex.nk_config()),
        "nld" => Method::NonlinearDirect(ex.direct_config()),
        other => return Err(format!("unknown method {other}").into()),
    };
    let start = Instant::now();
    let report = run_benchmark(
        ex.name,
        &ex.problem,
        Some(&ex.exact),
        &method,
        &default_chain(),
    )?;
    print!("{}", report.to_markdown());
    println!(
        "\nmean p_N over the three finest pairs: {:?}  ({:.2?})",
        report.mean_order(3),
        start.elapsed()
    );
    Ok(())
}
