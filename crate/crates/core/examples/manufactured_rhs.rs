//! Building a right-hand side from a chosen exact solution by adaptive
//! quadrature, checked against a closed form.
//!
//! ```text
//! cargo run --release --example manufactured_rhs
//! ```

use vie::problem::manufacture_rhs;
use vie::{CurveSet, KernelFamily, KernelFn, RealFn};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // int_0^{t/4} 3 x ds + int_{t/4}^t (-1) x ds with x = t^2
    let family = KernelFamily::new(
        CurveSet::proportional(&[0.25]),
        vec![KernelFn::constant(3.0), KernelFn::constant(-1.0)],
    )?;
    let exact = RealFn::new(|t| t * t);
    let closed = |t: f64| 3.0 * (t / 4.0).powi(3) / 3.0 - (t.powi(3) - (t / 4.0).powi(3)) / 3.0;
    for tol in [1e-6, 1e-9, 1e-12] {
        let f = manufacture_rhs(&family, &exact, None, 2.0, tol)?;
        let worst = (0..=100)
            .map(|i| {
                let t = 2.0 * i as f64 / 100.0;
                (f.eval(t) - closed(t)).abs()
            })
            .fold(0.0, f64::max);
        println!("tol {tol:.0e}: max |f - closed form| = {worst:.2e}");
    }
    Ok(())
}
