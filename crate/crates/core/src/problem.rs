//! Equation instances, structural validation and manufactured right-hand
//! sides.
//!
//! Pieces are indexed from zero: piece `p` lives between the curves
//! `alpha_p(t)` and `alpha_{p+1}(t)`, where `alpha_0(t) = 0` and
//! `alpha_n(t) = t` are implicit and only the `n - 1` interior curves are
//! stored.

use crate::error::{Result, VieError};
use crate::func::{finite_difference, KernelFn, Nonlinearity, RealFn};
use crate::mesh::reference_integral_by_piece;
use crate::quadrature;

/// An interior discontinuity curve and its derivative.
#[derive(Clone, Debug)]
pub struct Curve {
    pub value: RealFn,
    pub derivative: RealFn,
}

impl Curve {
    pub fn new(value: RealFn, derivative: RealFn) -> Self {
        Self { value, derivative }
    }

    /// `alpha(t) = c * t`.
    pub fn proportional(c: f64) -> Self {
        Self::new(RealFn::new(move |t| c * t), RealFn::constant(c))
    }

    /// Curve whose derivative is taken by finite differences on `[0, horizon]`.
    pub fn with_numeric_derivative(value: RealFn, horizon: f64) -> Self {
        let v = value.clone();
        let derivative = RealFn::new(move |t| finite_difference(&v, t, horizon));
        Self { value, derivative }
    }
}

/// The interior curves `alpha_1 .. alpha_{n-1}`.
#[derive(Clone, Debug, Default)]
pub struct CurveSet {
    interior: Vec<Curve>,
}

impl CurveSet {
    pub fn new(interior: Vec<Curve>) -> Self {
        Self { interior }
    }

    /// One piece, no interior curve.
    pub fn single() -> Self {
        Self::default()
    }

    pub fn proportional(slopes: &[f64]) -> Self {
        Self::new(slopes.iter().map(|&c| Curve::proportional(c)).collect())
    }

    /// Number of kernel pieces `n`.
    pub fn pieces(&self) -> usize {
        self.interior.len() + 1
    }

    pub fn interior(&self) -> &[Curve] {
        &self.interior
    }

    /// `alpha_i(t)` for `i` in `0..=n`.
    pub fn alpha(&self, i: usize, t: f64) -> f64 {
        if i == 0 {
            0.0
        } else if i == self.pieces() {
            t
        } else {
            self.interior[i - 1].value.eval(t)
        }
    }

    /// `alpha_i'(t)` for `i` in `0..=n`.
    pub fn alpha_prime(&self, i: usize, t: f64) -> f64 {
        if i == 0 {
            0.0
        } else if i == self.pieces() {
            1.0
        } else {
            self.interior[i - 1].derivative.eval(t)
        }
    }

    /// Writes `[0, alpha_1(t), .., alpha_{n-1}(t), t]` into `out`.
    pub fn breakpoints_into(&self, t: f64, out: &mut Vec<f64>) {
        out.clear();
        out.push(0.0);
        out.extend(self.interior.iter().map(|c| c.value.eval(t)));
        out.push(t);
    }

    pub fn breakpoints(&self, t: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.pieces() + 1);
        self.breakpoints_into(t, &mut out);
        out
    }
}

/// Curves together with one kernel branch per piece.
#[derive(Clone, Debug)]
pub struct KernelFamily {
    pub curves: CurveSet,
    pub kernels: Vec<KernelFn>,
}

impl KernelFamily {
    pub fn new(curves: CurveSet, kernels: Vec<KernelFn>) -> Result<Self> {
        if kernels.len() != curves.pieces() {
            return Err(VieError::InvalidInput(format!(
                "{} kernels supplied for {} pieces",
                kernels.len(),
                curves.pieces()
            )));
        }
        Ok(Self { curves, kernels })
    }

    pub fn pieces(&self) -> usize {
        self.kernels.len()
    }

    #[inline]
    pub fn kernel(&self, piece: usize, t: f64, s: f64) -> f64 {
        self.kernels[piece].eval(t, s)
    }

    /// `sum_i K_i(0,0) [alpha_i'(0) - alpha_{i-1}'(0)]`, the coefficient of
    /// `x(0)` after differentiating the equation at the origin.
    pub fn seed_denominator(&self) -> f64 {
        (0..self.pieces())
            .map(|p| {
                self.kernel(p, 0.0, 0.0)
                    * (self.curves.alpha_prime(p + 1, 0.0) - self.curves.alpha_prime(p, 0.0))
            })
            .sum()
    }

    /// `max_i |K_i(0,0)|`.
    pub fn max_kernel_at_origin(&self) -> f64 {
        (0..self.pieces())
            .map(|p| self.kernel(p, 0.0, 0.0).abs())
            .fold(0.0, f64::max)
    }

    /// True when every branch satisfies `K_i(t,s) = K_i(s,t)` on a sample grid.
    pub fn is_symmetric(&self, horizon: f64) -> bool {
        let m = 16;
        (0..self.pieces()).all(|p| {
            (0..=m).all(|a| {
                (0..=m).all(|b| {
                    let t = horizon * a as f64 / m as f64;
                    let s = horizon * b as f64 / m as f64;
                    let (k1, k2) = (self.kernel(p, t, s), self.kernel(p, s, t));
                    (k1 - k2).abs() <= 1e-12 * (1.0 + k1.abs())
                })
            })
        })
    }
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon.is_finite() && horizon > 0.0 {
        Ok(())
    } else {
        Err(VieError::InvalidInput(format!(
            "horizon must be positive, got {horizon}"
        )))
    }
}

/// `sum_i int_{alpha_{i-1}(t)}^{alpha_i(t)} K_i(t,s) x(s) ds = f(t)` on `[0, T]`.
#[derive(Clone, Debug)]
pub struct LinearProblem {
    pub family: KernelFamily,
    pub f: RealFn,
    pub f_prime: Option<RealFn>,
    pub horizon: f64,
}

impl LinearProblem {
    pub fn new(
        family: KernelFamily,
        f: RealFn,
        f_prime: Option<RealFn>,
        horizon: f64,
    ) -> Result<Self> {
        check_horizon(horizon)?;
        Ok(Self {
            family,
            f,
            f_prime,
            horizon,
        })
    }

    /// `f'(t)`, analytic when supplied, otherwise by finite differences.
    pub fn rhs_derivative(&self, t: f64) -> f64 {
        match &self.f_prime {
            Some(d) => d.eval(t),
            None => finite_difference(&self.f, t, self.horizon),
        }
    }
}

/// `sum_i int K_i(t,s) G_i(s, x(s)) ds = f(t)` on `[0, T]`.
#[derive(Clone, Debug)]
pub struct NonlinearProblem {
    pub family: KernelFamily,
    pub g: Vec<Nonlinearity>,
    pub g_x: Option<Vec<Nonlinearity>>,
    pub f: RealFn,
    pub f_prime: Option<RealFn>,
    pub horizon: f64,
}

impl NonlinearProblem {
    pub fn new(
        family: KernelFamily,
        g: Vec<Nonlinearity>,
        g_x: Option<Vec<Nonlinearity>>,
        f: RealFn,
        f_prime: Option<RealFn>,
        horizon: f64,
    ) -> Result<Self> {
        check_horizon(horizon)?;
        let n = family.pieces();
        if g.len() != n || g_x.as_ref().is_some_and(|d| d.len() != n) {
            return Err(VieError::InvalidInput(format!(
                "nonlinearities must match the {n} kernel pieces"
            )));
        }
        Ok(Self {
            family,
            g,
            g_x,
            f,
            f_prime,
            horizon,
        })
    }

    /// The linear equation viewed as a nonlinear one with `G_i(s,x) = x`.
    pub fn linear_disguise(problem: &LinearProblem) -> Self {
        let n = problem.family.pieces();
        Self {
            family: problem.family.clone(),
            g: vec![Nonlinearity::identity(); n],
            g_x: Some(vec![Nonlinearity::new(|_, _| 1.0); n]),
            f: problem.f.clone(),
            f_prime: problem.f_prime.clone(),
            horizon: problem.horizon,
        }
    }

    pub fn rhs_derivative(&self, t: f64) -> f64 {
        match &self.f_prime {
            Some(d) => d.eval(t),
            None => finite_difference(&self.f, t, self.horizon),
        }
    }

    /// `dG_p/dx (s, x)`: analytic when supplied, otherwise a central
    /// difference in `x` with step `1e-6 (1 + |x|)`.
    pub fn g_derivative(&self, piece: usize, s: f64, x: f64) -> f64 {
        match &self.g_x {
            Some(d) => d[piece].eval(s, x),
            None => {
                let dx = 1e-6 * (1.0 + x.abs());
                let g = &self.g[piece];
                (g.eval(s, x + dx) - g.eval(s, x - dx)) / (2.0 * dx)
            }
        }
    }
}

/// One named structural check.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub overall: bool,
}

impl ValidationReport {
    fn from_checks(checks: Vec<Check>) -> Self {
        let overall = checks.iter().all(|c| c.passed);
        Self { checks, overall }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Checks other than `f(0)=0` that failed.
    pub fn structural_failures(&self) -> impl Iterator<Item = &Check> {
        self.checks
            .iter()
            .filter(|c| !c.passed && c.name != CHECK_RHS_ORIGIN)
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<4} {:<28} measured={:.6e} tolerance={:.3e}",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.measured,
                c.tolerance
            )?;
        }
        write!(f, "overall: {}", if self.overall { "pass" } else { "fail" })
    }
}

/// Sample count used by the command-line validator.
pub const DEFAULT_SAMPLES: usize = 1000;

pub const CHECK_RHS_ORIGIN: &str = "f(0)=0";
pub const CHECK_ORDERING: &str = "curve ordering";
pub const CHECK_SLOPES: &str = "derivative ordering at 0";
pub const CHECK_SEED: &str = "x0 denominator nonzero";
pub const CHECK_DIAGONAL: &str = "K_n(t,t) != 0";

fn common_checks(family: &KernelFamily, f: &RealFn, horizon: f64, samples: usize) -> Vec<Check> {
    let samples = samples.max(2);
    let grid: Vec<f64> = (1..=samples)
        .map(|i| horizon * i as f64 / samples as f64)
        .collect();
    let curves = &family.curves;
    let n = curves.pieces();
    let mut checks = Vec::new();

    let f_max = grid.iter().map(|&t| f.eval(t).abs()).fold(0.0, f64::max);
    let f0 = f.eval(0.0).abs();
    let tol = 1e-8 * (1.0 + f_max);
    checks.push(Check {
        name: CHECK_RHS_ORIGIN.into(),
        passed: f0 <= tol,
        measured: f0,
        tolerance: tol,
    });

    for i in 1..n {
        let a0 = curves.alpha(i, 0.0).abs();
        checks.push(Check {
            name: format!("alpha_{i}(0)=0"),
            passed: a0 <= 1e-10,
            measured: a0,
            tolerance: 1e-10,
        });
    }

    // Smallest gap between consecutive breakpoints; must stay positive.
    let mut min_gap = f64::INFINITY;
    let mut bps = Vec::with_capacity(n + 1);
    for &t in &grid {
        curves.breakpoints_into(t, &mut bps);
        for w in bps.windows(2) {
            min_gap = min_gap.min(w[1] - w[0]);
        }
    }
    checks.push(Check {
        name: CHECK_ORDERING.into(),
        passed: min_gap > 0.0,
        measured: min_gap,
        tolerance: 0.0,
    });

    // alpha_1'(0) <= .. <= alpha_{n-1}'(0) < 1; measured is the worst violation.
    let slopes: Vec<f64> = (1..n).map(|i| curves.alpha_prime(i, 0.0)).collect();
    let mut violation = f64::NEG_INFINITY;
    for w in slopes.windows(2) {
        violation = violation.max(w[0] - w[1]);
    }
    let last_ok = slopes.last().is_none_or(|&s| s < 1.0);
    if let Some(&s) = slopes.last() {
        violation = violation.max(s - 1.0);
    }
    let violation = if slopes.is_empty() { 0.0 } else { violation };
    checks.push(Check {
        name: CHECK_SLOPES.into(),
        passed: last_ok && violation <= 1e-12,
        measured: violation,
        tolerance: 1e-12,
    });
    checks
}

/// Checks the structural hypotheses of a linear problem at `samples`
/// uniform points of `(0, T]`. Failures are reported, never raised.
pub fn validate_linear(problem: &LinearProblem, samples: usize) -> ValidationReport {
    let family = &problem.family;
    let mut checks = common_checks(family, &problem.f, problem.horizon, samples);
    let den = family.seed_denominator();
    let tol = 1e-12 * family.max_kernel_at_origin();
    checks.push(Check {
        name: CHECK_SEED.into(),
        passed: den != 0.0 && den.abs() >= tol,
        measured: den.abs(),
        tolerance: tol,
    });
    ValidationReport::from_checks(checks)
}

/// Checks a nonlinear problem: the shared structure plus `K_n(t,t) != 0`.
pub fn validate_nonlinear(problem: &NonlinearProblem, samples: usize) -> ValidationReport {
    let family = &problem.family;
    let mut checks = common_checks(family, &problem.f, problem.horizon, samples);
    let last = family.pieces() - 1;
    let samples = samples.max(2);
    let min_diag = (1..=samples)
        .map(|i| {
            let t = problem.horizon * i as f64 / samples as f64;
            family.kernel(last, t, t).abs()
        })
        .fold(f64::INFINITY, f64::min);
    checks.push(Check {
        name: CHECK_DIAGONAL.into(),
        passed: min_diag > 0.0,
        measured: min_diag,
        tolerance: 0.0,
    });
    ValidationReport::from_checks(checks)
}

/// Builds `f(t) = sum_i int K_i(t,s) g_i(s, exact(s)) ds` by adaptive
/// quadrature (`g_i(s,x) = x` when `g` is `None`).
///
/// The returned function is exactly zero at `t = 0`. Quadrature is probed
/// on a grid of `[0, horizon]` up front so budget failures surface here
/// with the offending `t`.
pub fn manufacture_rhs(
    family: &KernelFamily,
    exact: &RealFn,
    g: Option<&[Nonlinearity]>,
    horizon: f64,
    tol: f64,
) -> Result<RealFn> {
    if !(tol > 0.0) {
        return Err(VieError::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    check_horizon(horizon)?;
    if let Some(g) = g {
        if g.len() != family.pieces() {
            return Err(VieError::InvalidInput(
                "nonlinearities must match the kernel pieces".into(),
            ));
        }
    }
    let family = family.clone();
    let exact = exact.clone();
    let g: Option<Vec<Nonlinearity>> = g.map(|g| g.to_vec());
    let eval = move |t: f64| -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        reference_integral_by_piece(&family, t, 0.0, t, tol, |p, s| {
            let x = exact.eval(s);
            let gx = match &g {
                Some(g) => g[p].eval(s, x),
                None => x,
            };
            family.kernel(p, t, s) * gx
        })
    };
    for i in 0..=64 {
        let t = horizon * i as f64 / 64.0;
        let v = eval(t)?;
        if !v.is_finite() {
            return Err(VieError::QuadratureBudget { t });
        }
    }
    Ok(RealFn::new(move |t| eval(t).unwrap_or(f64::NAN)))
}

/// [`manufacture_rhs`] with the default reference tolerance.
pub fn manufacture_rhs_default(
    family: &KernelFamily,
    exact: &RealFn,
    g: Option<&[Nonlinearity]>,
    horizon: f64,
) -> Result<RealFn> {
    manufacture_rhs(family, exact, g, horizon, quadrature::DEFAULT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivial(f: RealFn) -> LinearProblem {
        let family = KernelFamily::new(CurveSet::single(), vec![KernelFn::constant(1.0)]).unwrap();
        LinearProblem::new(family, f, None, 1.0).unwrap()
    }

    #[test]
    fn zero_problem_validates() {
        let report = validate_linear(&trivial(RealFn::constant(0.0)), 100);
        assert!(report.overall, "{report}");
    }

    #[test]
    fn kernel_count_must_match() {
        let r = KernelFamily::new(
            CurveSet::proportional(&[0.5]),
            vec![KernelFn::constant(1.0)],
        );
        assert!(matches!(r, Err(VieError::InvalidInput(_))));
    }

    #[test]
    fn ordering_violation_is_reported() {
        let family = KernelFamily::new(
            CurveSet::proportional(&[1.0]),
            vec![KernelFn::constant(1.0), KernelFn::constant(-1.0)],
        )
        .unwrap();
        let p = LinearProblem::new(family, RealFn::constant(0.0), None, 1.0).unwrap();
        let report = validate_linear(&p, 50);
        assert!(!report.overall);
        assert!(!report.check(CHECK_ORDERING).unwrap().passed);
        assert!(!report.check(CHECK_SLOPES).unwrap().passed);
    }

    #[test]
    fn validation_is_pure() {
        let p = trivial(RealFn::new(|t| t * t));
        assert_eq!(validate_linear(&p, 64), validate_linear(&p, 64));
    }

    #[test]
    fn manufactured_single_piece_matches_antiderivative() {
        let family = KernelFamily::new(CurveSet::single(), vec![KernelFn::constant(1.0)]).unwrap();
        let exact = RealFn::new(|s| 1.0 + 2.0 * s - 3.0 * s * s * s);
        let f = manufacture_rhs(&family, &exact, None, 2.0, 1e-12).unwrap();
        assert_eq!(f.eval(0.0), 0.0);
        for i in 0..=20 {
            let t = 0.1 * i as f64;
            let closed = t + t * t - 0.75 * t.powi(4);
            assert!((f.eval(t) - closed).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn manufactured_zero_solution_is_zero() {
        let family = KernelFamily::new(
            CurveSet::proportional(&[0.25]),
            vec![KernelFn::new(|t, s| t + s), KernelFn::constant(-2.0)],
        )
        .unwrap();
        let f = manufacture_rhs(&family, &RealFn::constant(0.0), None, 2.0, 1e-12).unwrap();
        for i in 0..10 {
            assert_eq!(f.eval(0.2 * i as f64), 0.0);
        }
    }

    #[test]
    fn finite_difference_g_derivative() {
        let lin = trivial(RealFn::constant(0.0));
        let mut p = NonlinearProblem::linear_disguise(&lin);
        p.g = vec![Nonlinearity::new(|_, x: f64| x.sin())];
        p.g_x = None;
        assert!((p.g_derivative(0, 0.0, 0.3) - 0.3f64.cos()).abs() < 1e-9);
    }
}
