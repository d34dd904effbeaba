//! Modified Newton-Kantorovich iteration: every outer step is a linear
//! first-kind equation whose kernels stay frozen at the initial iterate.

use rayon::prelude::*;

use super::brent::BracketSpec;
use super::direct::nonlinear_seed;
use super::frechet_linearize;
use crate::error::{Result, VieError};
use crate::func::RealFn;
use crate::linear::{solve_direct, StepKind, StepSolution};
use crate::mesh::{reference_integral_by_piece, Mesh};
use crate::problem::{LinearProblem, NonlinearProblem};
use crate::quadrature::DEFAULT_TOL;

#[derive(Clone, Debug)]
pub struct NkConfig {
    pub max_outer: usize,
    /// Stop once the sup-norm node gap between iterates drops below this.
    pub tolerance: f64,
    pub inner: StepKind,
    /// Initial iterate; `None` means the constant seed `x(0)` (or 0 when
    /// the seed equation has no root).
    pub initial: Option<RealFn>,
    /// Bracket for the seed equation behind the default initial iterate.
    pub seed_bracket: BracketSpec,
    /// Absolute accuracy of the right-hand-side corrections at each node.
    pub quad_tol: f64,
}

impl Default for NkConfig {
    fn default() -> Self {
        Self {
            max_outer: 30,
            tolerance: 1e-8,
            inner: StepKind::Constant,
            initial: None,
            seed_bracket: BracketSpec::default(),
            quad_tol: DEFAULT_TOL,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NkResult {
    pub solution: StepSolution,
    /// `max_i |x_{m+1}(t_i) - x_m(t_i)|` for every outer step taken.
    pub iterate_gaps: Vec<f64>,
    pub converged: bool,
}

/// The current outer iterate: the initial function or a mesh solution.
enum Iterate<'a> {
    Initial(&'a RealFn),
    Step(&'a StepSolution),
}

impl Iterate<'_> {
    #[inline]
    fn eval(&self, segment: usize, s: f64) -> f64 {
        match self {
            Iterate::Initial(f) => f.eval(s),
            Iterate::Step(x) => x.eval_in_segment(segment, s),
        }
    }

    fn at_node(&self, mesh: &Mesh, i: usize) -> f64 {
        match self {
            Iterate::Initial(f) => f.eval(mesh.node(i)),
            Iterate::Step(x) => x.node_values()[i],
        }
    }
}

/// Default initial iterate: the constant seed value, or 0.
pub fn default_initial_iterate(problem: &NonlinearProblem, bracket: &BracketSpec) -> RealFn {
    let x = nonlinear_seed(problem, bracket)
        .map(|p| p.value())
        .unwrap_or(0.0);
    RealFn::constant(if x.is_finite() { x } else { 0.0 })
}

/// `sum_i int_0^{t_k} K_i [G_ix(s, x_0(s)) x_m(s) - G_i(s, x_m(s))] ds` at
/// every node, integrated segment by segment so the iterate is smooth
/// inside each call.
fn corrections(
    problem: &NonlinearProblem,
    x_init: &RealFn,
    current: &Iterate,
    mesh: &Mesh,
    tol: f64,
) -> Result<Vec<f64>> {
    let family = &problem.family;
    (0..=mesh.segments())
        .into_par_iter()
        .map(|k| {
            let tk = mesh.node(k);
            let mut total = 0.0;
            for j in 1..=k {
                let seg_tol = tol / k as f64;
                total += reference_integral_by_piece(
                    family,
                    tk,
                    mesh.node(j - 1),
                    mesh.node(j),
                    seg_tol,
                    |p, s| {
                        let xm = current.eval(j, s);
                        family.kernel(p, tk, s)
                            * (problem.g_derivative(p, s, x_init.eval(s)) * xm
                                - problem.g[p].eval(s, xm))
                    },
                )?;
            }
            Ok(total)
        })
        .collect()
}

/// `d/dt` of the correction at `t = 0` by the Leibniz rule.
fn correction_slope_at_origin(problem: &NonlinearProblem, x_init: &RealFn, x_m0: f64) -> f64 {
    let family = &problem.family;
    let curves = &family.curves;
    let x00 = x_init.eval(0.0);
    (0..family.pieces())
        .map(|p| {
            (curves.alpha_prime(p + 1, 0.0) - curves.alpha_prime(p, 0.0))
                * family.kernel(p, 0.0, 0.0)
                * (problem.g_derivative(p, 0.0, x00) * x_m0 - problem.g[p].eval(0.0, x_m0))
        })
        .sum()
}

/// Piecewise linear interpolant of node values.
fn interpolate(nodes: &[f64], values: &[f64], t: f64) -> f64 {
    if t <= nodes[0] {
        return values[0];
    }
    let last = nodes.len() - 1;
    if t >= nodes[last] {
        return values[last];
    }
    let j = nodes.partition_point(|&n| n < t).max(1);
    let w = (t - nodes[j - 1]) / (nodes[j] - nodes[j - 1]);
    values[j - 1] + w * (values[j] - values[j - 1])
}

fn interpolate_slope(nodes: &[f64], values: &[f64], t: f64) -> f64 {
    let last = nodes.len() - 1;
    let j = nodes.partition_point(|&n| n < t).clamp(1, last);
    (values[j] - values[j - 1]) / (nodes[j] - nodes[j - 1])
}

/// Modified Newton-Kantorovich iteration.
///
/// Outer step `m` solves the linear equation with kernels
/// `K_i(t,s) G_ix(s, x_0(s))` and right-hand side
/// `Psi_m = f + sum_i int K_i [G_ix(s, x_0) x_m - G_i(s, x_m)] ds`,
/// the latter computed at the nodes by adaptive quadrature and interpolated
/// linearly in between.
pub fn newton_kantorovich_solve(
    problem: &NonlinearProblem,
    mesh: &Mesh,
    config: &NkConfig,
) -> Result<NkResult> {
    if config.max_outer == 0 || !(config.tolerance > 0.0) {
        return Err(VieError::InvalidInput(
            "Newton-Kantorovich needs max_outer >= 1 and a positive tolerance".into(),
        ));
    }
    let x_init = config
        .initial
        .clone()
        .unwrap_or_else(|| default_initial_iterate(problem, &config.seed_bracket));
    let family = frechet_linearize(problem, &x_init);
    let nodes: std::sync::Arc<[f64]> = mesh.nodes().into();
    let mut current: Option<StepSolution> = None;
    let mut gaps = Vec::new();
    for _ in 0..config.max_outer {
        let iterate = match &current {
            Some(x) => Iterate::Step(x),
            None => Iterate::Initial(&x_init),
        };
        let corr: std::sync::Arc<[f64]> =
            corrections(problem, &x_init, &iterate, mesh, config.quad_tol)?.into();
        let slope0 = correction_slope_at_origin(problem, &x_init, iterate.at_node(mesh, 0));
        let psi = {
            let (f, nodes, corr) = (problem.f.clone(), nodes.clone(), corr.clone());
            RealFn::new(move |t| f.eval(t) + interpolate(&nodes, &corr, t))
        };
        let psi_prime = {
            let (p, nodes, corr) = (problem.clone(), nodes.clone(), corr.clone());
            RealFn::new(move |t| {
                let c = if t <= 0.0 {
                    slope0
                } else {
                    interpolate_slope(&nodes, &corr, t)
                };
                p.rhs_derivative(t) + c
            })
        };
        let inner = LinearProblem::new(family.clone(), psi, Some(psi_prime), problem.horizon)?;
        let next = solve_direct(&inner, mesh, config.inner)?;
        let gap = (0..=mesh.segments())
            .map(|i| (next.node_values()[i] - iterate.at_node(mesh, i)).abs())
            .fold(0.0, f64::max);
        if !gap.is_finite() {
            return Err(VieError::NonFinite { k: 0, value: gap });
        }
        gaps.push(gap);
        current = Some(next);
        if gap < config.tolerance {
            break;
        }
    }
    let converged = gaps.last().is_some_and(|g| *g < config.tolerance);
    Ok(NkResult {
        solution: current.expect("at least one outer step"),
        iterate_gaps: gaps,
        converged,
    })
}
