//! Solvers for Volterra integral equations of the first kind whose kernels
//! jump across curves `alpha_i(t)`:
//!
//! ```text
//! sum_{i=1}^{n} int_{alpha_{i-1}(t)}^{alpha_i(t)} K_i(t,s) x(s) ds = f(t),   0 <= t <= T,
//! ```
//!
//! with `alpha_0 = 0` and `alpha_n = t`, plus the nonlinear variant where
//! `x(s)` is replaced by `G_i(s, x(s))`.
//!
//! Provided methods:
//! - piecewise constant and piecewise linear direct quadrature ([`linear`]),
//! - regularized successive approximations ([`iterative`]),
//! - modified Newton-Kantorovich and nonlinear direct marching ([`nonlinear`]),
//! - convergence sweeps reporting `eps`, `D_N` and `p_N` ([`convergence`]).

// `!(a < b)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod builtin;
pub mod cli;
pub mod convergence;
pub mod error;
pub mod expr;
pub mod func;
pub mod iterative;
pub mod linear;
pub mod mesh;
pub mod nonlinear;
pub mod problem;
pub mod problem_file;
pub mod quadrature;

pub use builtin::{builtin_example, builtin_examples, BuiltinExample, Problem, RhsVariant};
pub use convergence::{
    convergence_order, max_pointwise_error, run_benchmark, two_mesh_difference, ConvergenceReport,
    ConvergenceRow, Method,
};
pub use error::{Result, VieError};
pub use func::{KernelFn, Nonlinearity, RealFn};
pub use iterative::{solve_iterative, IterativeConfig, IterativeResult};
pub use linear::{
    compute_x0, compute_x1, residual_sup_norm, solve_direct, solve_piecewise_constant,
    solve_piecewise_linear, StepKind, StepSolution,
};
pub use mesh::{build_uniform_mesh, build_v_table, split_at_curves, Mesh, VIndexTable};
pub use nonlinear::{
    apply_operator_F, brent_root, check_theorem1, frechet_linearize, newton_kantorovich_solve,
    solve_nonlinear_direct, BracketSpec, NkConfig, NkResult,
};
pub use problem::{
    manufacture_rhs, validate_linear, validate_nonlinear, Curve, CurveSet, KernelFamily,
    LinearProblem, NonlinearProblem, ValidationReport,
};
