//! Adaptive Gauss-Kronrod quadrature used as the high-accuracy reference.
//!
//! This is deliberately independent of the midpoint machinery in
//! [`crate::mesh`]: manufactured right-hand sides, operator residuals and the
//! test oracles all go through here.

/// Default absolute tolerance of the reference integrator.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Default panel budget of one reference integration.
pub const DEFAULT_BUDGET: usize = 1_000_000;

// 15-point Kronrod abscissae (non-negative half) and weights, with the
// embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss-Kronrod 7/15 panel: `(kronrod, |kronrod - gauss|, ∫|f|)`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = kronrod.abs();
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += w * (f1 + f2);
        abs += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    (
        kronrod * half,
        ((kronrod - gauss) * half).abs(),
        abs * half.abs(),
    )
}

/// Budget exhausted (or the integrand produced a non-finite value).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetExceeded;

/// Integrates `f` over `[a, b]` to absolute accuracy `tol` by recursive
/// bisection, charging every evaluated panel against `budget`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    budget: &mut usize,
) -> Result<f64, BudgetExceeded> {
    if b <= a {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut stack = vec![(a, b, tol)];
    while let Some((lo, hi, local_tol)) = stack.pop() {
        if *budget == 0 {
            return Err(BudgetExceeded);
        }
        *budget -= 1;
        let (value, err, abs) = gk15(&f, lo, hi);
        if !value.is_finite() {
            return Err(BudgetExceeded);
        }
        let mid = 0.5 * (lo + hi);
        let unsplittable = mid <= lo || mid >= hi;
        if err <= local_tol || err <= 1e-14 * abs || unsplittable {
            total += value;
        } else {
            stack.push((mid, hi, 0.5 * local_tol));
            stack.push((lo, mid, 0.5 * local_tol));
        }
    }
    Ok(total)
}
