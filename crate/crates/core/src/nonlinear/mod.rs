//! Nonlinear first-kind equations
//! `sum_i int_{alpha_{i-1}(t)}^{alpha_i(t)} K_i(t,s) G_i(s, x(s)) ds = f(t)`.

mod brent;
mod direct;
mod newton;

pub use brent::{brent_in, brent_root, nearest_root, BracketSpec, RootPick, MAX_ITER};
pub use direct::{
    nonlinear_seed, solve_nonlinear_direct, solve_nonlinear_direct_traced, BracketCenter,
    DirectConfig, DirectTrace, ROOT_TOL,
};
pub use newton::{default_initial_iterate, newton_kantorovich_solve, NkConfig, NkResult};

use crate::error::Result;
use crate::func::{KernelFn, RealFn};
use crate::mesh::reference_integral_by_piece;
use crate::problem::{KernelFamily, NonlinearProblem};

/// `sum_i int K_i(t,s) G_i(s, x(s)) ds - f(t)` by adaptive quadrature.
#[allow(non_snake_case)]
pub fn apply_operator_F(problem: &NonlinearProblem, x: &RealFn, t: f64, tol: f64) -> Result<f64> {
    let family = &problem.family;
    let integral = reference_integral_by_piece(family, t, 0.0, t, tol, |p, s| {
        family.kernel(p, t, s) * problem.g[p].eval(s, x.eval(s))
    })?;
    Ok(integral - problem.f.eval(t))
}

/// Kernels `K_i(t,s) G_ix(s, x0(s))` of the derivative at `x0`, on the
/// same curves.
pub fn frechet_linearize(problem: &NonlinearProblem, x0: &RealFn) -> KernelFamily {
    let kernels = (0..problem.family.pieces())
        .map(|p| {
            let (problem, x0) = (problem.clone(), x0.clone());
            KernelFn::new(move |t, s| {
                problem.family.kernel(p, t, s) * problem.g_derivative(p, s, x0.eval(s))
            })
        })
        .collect();
    KernelFamily {
        curves: problem.family.curves.clone(),
        kernels,
    }
}

/// Outcome of the local solvability condition.
#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Report {
    /// `q_n + sum_{i<n} alpha_i'(0) |(K_i(0,0) - K_{i+1}(0,0)) / K_n(0,0)| (1 + q_i)`.
    pub lhs: f64,
    pub kn_origin: f64,
    pub curves_ordered: bool,
    pub structural_ok: bool,
    pub passed: bool,
}

/// Evaluates the smallness condition for local existence and uniqueness
/// given Lipschitz constants `q_i` of the `G_i`.
pub fn check_theorem1(problem: &NonlinearProblem, lipschitz_q: &[f64]) -> Result<Theorem1Report> {
    let family = &problem.family;
    let n = family.pieces();
    if lipschitz_q.len() != n {
        return Err(crate::error::VieError::InvalidInput(format!(
            "{} Lipschitz constants for {n} pieces",
            lipschitz_q.len()
        )));
    }
    let report = crate::problem::validate_nonlinear(problem, crate::problem::DEFAULT_SAMPLES);
    let curves_ordered = report
        .check(crate::problem::CHECK_ORDERING)
        .is_none_or(|c| c.passed);
    let kn = family.kernel(n - 1, 0.0, 0.0);
    if kn == 0.0 || !kn.is_finite() {
        return Ok(Theorem1Report {
            lhs: f64::NAN,
            kn_origin: kn,
            curves_ordered,
            structural_ok: false,
            passed: false,
        });
    }
    let mut lhs = lipschitz_q[n - 1];
    for (p, q) in lipschitz_q.iter().enumerate().take(n - 1) {
        let jump = (family.kernel(p, 0.0, 0.0) - family.kernel(p + 1, 0.0, 0.0)) / kn;
        lhs += family.curves.alpha_prime(p + 1, 0.0) * jump.abs() * (1.0 + q);
    }
    Ok(Theorem1Report {
        lhs,
        kn_origin: kn,
        curves_ordered,
        structural_ok: curves_ordered,
        passed: curves_ordered && lhs < 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::Nonlinearity;
    use crate::problem::CurveSet;

    fn problem(slopes: &[f64], kernels: Vec<KernelFn>, g: Vec<Nonlinearity>) -> NonlinearProblem {
        let family = KernelFamily::new(CurveSet::proportional(slopes), kernels).unwrap();
        NonlinearProblem::new(family, g, None, RealFn::new(|t| t), None, 1.0).unwrap()
    }

    #[test]
    fn theorem1_single_piece() {
        let p = problem(
            &[],
            vec![KernelFn::constant(1.0)],
            vec![Nonlinearity::identity()],
        );
        let r = check_theorem1(&p, &[0.5]).unwrap();
        assert_eq!(r.lhs, 0.5);
        assert!(r.passed);
    }

    #[test]
    fn theorem1_no_jump() {
        let p = problem(
            &[0.5],
            vec![KernelFn::constant(2.0), KernelFn::constant(2.0)],
            vec![Nonlinearity::identity(); 2],
        );
        let r = check_theorem1(&p, &[1.0, 0.0]).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.passed);
    }

    #[test]
    fn theorem1_vanishing_last_kernel() {
        let p = problem(
            &[0.5],
            vec![KernelFn::constant(2.0), KernelFn::new(|t, s| t - s)],
            vec![Nonlinearity::identity(); 2],
        );
        let r = check_theorem1(&p, &[1.0, 0.0]).unwrap();
        assert!(!r.structural_ok && !r.passed);
    }

    #[test]
    fn linearize_square_doubles_kernel() {
        let p = problem(
            &[],
            vec![KernelFn::new(|t, s| t + s)],
            vec![Nonlinearity::new(|_, x| x * x)],
        );
        let fam = frechet_linearize(&p, &RealFn::constant(1.0));
        let v = fam.kernel(0, 0.7, 0.3);
        assert!((v - 2.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn operator_of_exact_solution_vanishes() {
        let family = KernelFamily::new(CurveSet::single(), vec![KernelFn::constant(1.0)]).unwrap();
        let p = NonlinearProblem::new(
            family,
            vec![Nonlinearity::new(|_, x| x * x)],
            None,
            RealFn::new(|t| t * t * t / 3.0),
            None,
            1.0,
        )
        .unwrap();
        assert_eq!(
            apply_operator_F(&p, &RealFn::new(|t| t), 0.0, 1e-12).unwrap(),
            0.0
        );
        let r = apply_operator_F(&p, &RealFn::new(|t| t), 0.8, 1e-12).unwrap();
        assert!(r.abs() < 1e-11, "{r}");
    }
}
