//! Bracketed scalar roots: expanding brackets, the root nearest the
//! bracket centre, and tangential roots without a sign change.
//!
//! ```text
//! cargo run --release --example root_finding
//! ```

use vie::nonlinear::{brent_root, nearest_root};
use vie::BracketSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cubic = |x: f64| x * x * x - 2.0 * x - 5.0;
    println!(
        "x^3 - 2x - 5: {}",
        brent_root(cubic, &BracketSpec::new(2.0, 3.0), 1e-14)?
    );
    // [-1, 1] grows symmetrically until it brackets 40
    println!(
        "x - 40 from [-1, 1]: {}",
        brent_root(|x| x - 40.0, &BracketSpec::default(), 1e-12)?
    );

    let sin = |x: f64| x.sin();
    for centre in [0.4, 2.9, 6.0] {
        let pick = nearest_root(sin, &BracketSpec::new(centre - 4.0, centre + 4.0), 1e-13)?;
        println!("sin x, bracket centred at {centre}: {pick:?}");
    }
    let touching = |x: f64| (x - 1.5).powi(2);
    println!(
        "(x - 1.5)^2: {:?}",
        nearest_root(touching, &BracketSpec::new(0.0, 2.0), 1e-13)?
    );
    match brent_root(|x| x * x + 1.0, &BracketSpec::new(-1.0, 1.0), 1e-12) {
        Ok(r) => println!("unexpected root {r}"),
        Err(e) => println!("x^2 + 1: {e}"),
    }
    Ok(())
}
