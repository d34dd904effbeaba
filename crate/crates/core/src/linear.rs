//! Direct quadrature solvers for linear equations.
//!
//! Both methods march forward in `k`: the value at node `t_k` only depends
//! on `f(t_1), .., f(t_k)`, and every kernel integral is a midpoint sum with
//! extra cuts where the curves cross a segment.

use crate::error::{Result, VieError};
use crate::mesh::{for_each_subsegment, midpoint_panels, KernelRow, Mesh, SLIVER};
use crate::problem::{KernelFamily, LinearProblem};

/// Shape of the approximate solution on each segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    /// `x_i` on `(t_{i-1}, t_i]`.
    Constant,
    /// Chord from `x_{i-1}` to `x_i` on `(t_{i-1}, t_i]`.
    Linear,
}

/// Piecewise constant or piecewise linear approximate solution.
#[derive(Clone, Debug, PartialEq)]
pub struct StepSolution {
    kind: StepKind,
    mesh: Mesh,
    values: Vec<f64>,
}

impl StepSolution {
    /// `values[0]` is `x(0)`, `values[i]` the coefficient `x_i`.
    pub fn new(kind: StepKind, mesh: Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.segments() + 1 {
            return Err(VieError::InvalidInput(format!(
                "{} values for a mesh with {} segments",
                values.len(),
                mesh.segments()
            )));
        }
        Ok(Self { kind, mesh, values })
    }

    /// Samples `x` at the nodes (the constant kind then holds the right
    /// end value of every segment).
    pub fn sampled(kind: StepKind, mesh: Mesh, x: impl Fn(f64) -> f64) -> Self {
        let values = mesh.nodes().iter().map(|&t| x(t)).collect();
        Self { kind, mesh, values }
    }

    pub fn kind(&self) -> StepKind {
        self.kind
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn x0(&self) -> f64 {
        self.values[0]
    }

    /// `x_1 .. x_N`.
    pub fn coeffs(&self) -> &[f64] {
        &self.values[1..]
    }

    /// `x_0 .. x_N`; for both kinds `node_values()[i]` is the value reported
    /// at node `t_i`.
    pub fn node_values(&self) -> &[f64] {
        &self.values
    }

    /// Value on segment `j` at `t` (`t` assumed inside `Delta_j`).
    #[inline]
    pub(crate) fn eval_in_segment(&self, j: usize, t: f64) -> f64 {
        match self.kind {
            StepKind::Constant => self.values[j],
            StepKind::Linear => {
                let lo = self.mesh.node(j - 1);
                let h = self.mesh.segment_len(j);
                let (a, b) = (self.values[j - 1], self.values[j]);
                a + (b - a) * (t - lo) / h
            }
        }
    }

    /// `x_N(t)`; `t` is clamped to `[0, T]`.
    pub fn evaluate(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.values[0];
        }
        let t = t.min(self.mesh.horizon());
        let j = self.mesh.nodes().partition_point(|&n| n < t).max(1);
        self.eval_in_segment(j, t)
    }
}

/// `x(0) = f'(0) / sum_i K_i(0,0) [alpha_i'(0) - alpha_{i-1}'(0)]`.
pub fn compute_x0(problem: &LinearProblem) -> Result<f64> {
    let den = problem.family.seed_denominator();
    let threshold = 1e-12 * problem.family.max_kernel_at_origin();
    if den == 0.0 || den.abs() < threshold {
        return Err(VieError::DegenerateSeed {
            denominator: den,
            threshold,
        });
    }
    Ok(problem.rhs_derivative(0.0) / den)
}

/// One midpoint panel per piece on `[0, t_1]`.
pub fn compute_x1(problem: &LinearProblem, mesh: &Mesh) -> Result<f64> {
    let t1 = mesh.node(1);
    let (den, kmax) = first_segment_weight(&problem.family, t1);
    if den == 0.0 || den.abs() < 1e-12 * t1 * kmax {
        return Err(VieError::DegenerateSeed {
            denominator: den,
            threshold: 1e-12 * t1 * kmax,
        });
    }
    Ok(problem.f.eval(t1) / den)
}

fn first_segment_weight(family: &KernelFamily, t1: f64) -> (f64, f64) {
    let curves = &family.curves;
    let mut den = 0.0;
    let mut kmax: f64 = 0.0;
    for p in 0..family.pieces() {
        let (lo, hi) = (curves.alpha(p, t1), curves.alpha(p + 1, t1));
        let k = family.kernel(p, t1, 0.5 * (hi + lo));
        kmax = kmax.max(k.abs());
        den += (hi - lo) * k;
    }
    (den, kmax)
}

fn check_diagonal(k: usize, value: f64, h: f64, kmax: f64) -> Result<()> {
    if value == 0.0 || value.abs() < 1e-12 * h * kmax || !value.is_finite() {
        Err(VieError::DegenerateDiagonal { k, value })
    } else {
        Ok(())
    }
}

fn check_finite(k: usize, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(VieError::NonFinite { k, value })
    }
}

/// Piecewise constant direct method.
///
/// `x_0` is taken from [`compute_x0`] when the seed is well defined and set
/// to `x_1` otherwise; it only affects the reported value at `t = 0`.
pub fn solve_piecewise_constant(problem: &LinearProblem, mesh: &Mesh) -> Result<StepSolution> {
    let n = mesh.segments();
    let mut values = vec![0.0; n + 1];
    values[1] = check_finite(1, compute_x1(problem, mesh)?)?;
    values[0] = compute_x0(problem).unwrap_or(values[1]);
    let mut row = KernelRow::default();
    for k in 2..=n {
        row.fill(&problem.family, mesh, k, false);
        let diag = row.plain[k - 1];
        check_diagonal(k, diag, mesh.segment_len(k), row.kmax)?;
        let mut rhs = problem.f.eval(mesh.node(k));
        for (w, x) in row.plain[..k - 1].iter().zip(&values[1..k]) {
            rhs -= w * x;
        }
        values[k] = check_finite(k, rhs / diag)?;
    }
    StepSolution::new(StepKind::Constant, mesh.clone(), values)
}

/// Piecewise linear direct method, seeded by [`compute_x0`].
pub fn solve_piecewise_linear(problem: &LinearProblem, mesh: &Mesh) -> Result<StepSolution> {
    let n = mesh.segments();
    let mut values = vec![0.0; n + 1];
    values[0] = compute_x0(problem)?;
    let mut row = KernelRow::default();
    for k in 1..=n {
        row.fill(&problem.family, mesh, k, true);
        let diag = row.ramp[k - 1];
        check_diagonal(k, diag, mesh.segment_len(k), row.kmax)?;
        let mut rhs = problem.f.eval(mesh.node(k)) - values[k - 1] * (row.plain[k - 1] - diag);
        for j in 1..k {
            let (a, b) = (row.plain[j - 1], row.ramp[j - 1]);
            rhs -= values[j - 1] * (a - b) + values[j] * b;
        }
        values[k] = check_finite(k, rhs / diag)?;
    }
    StepSolution::new(StepKind::Linear, mesh.clone(), values)
}

/// Dispatch on the solution kind.
pub fn solve_direct(problem: &LinearProblem, mesh: &Mesh, kind: StepKind) -> Result<StepSolution> {
    match kind {
        StepKind::Constant => solve_piecewise_constant(problem, mesh),
        StepKind::Linear => solve_piecewise_linear(problem, mesh),
    }
}

/// `sum_i int K_i(t,s) x_N(s) ds - f(t)` by midpoint panels no longer than
/// `max_panel`, cut at mesh nodes and curves.
pub(crate) fn operator_residual_at(
    family: &KernelFamily,
    f_t: f64,
    solution: &StepSolution,
    t: f64,
    max_panel: f64,
) -> f64 {
    let mesh = solution.mesh();
    let bps = family.curves.breakpoints(t);
    let sliver = SLIVER * t;
    let mut total = 0.0;
    for j in 1..=mesh.segments() {
        let lo = mesh.node(j - 1);
        if lo >= t {
            break;
        }
        let hi = mesh.node(j).min(t);
        for_each_subsegment(&bps, lo, hi, sliver, |a, b, p| {
            midpoint_panels(a, b, max_panel, |len, m| {
                total += len * family.kernel(p, t, m) * solution.eval_in_segment(j, m);
            });
        });
    }
    total - f_t
}

/// Sup norm of the equation residual over the mesh nodes and, for
/// `refinement > 1`, `refinement - 1` extra points inside every segment.
pub fn residual_sup_norm(
    problem: &LinearProblem,
    solution: &StepSolution,
    refinement: usize,
) -> f64 {
    let r = refinement.max(1);
    let mesh = solution.mesh();
    let max_panel = mesh.step() / r as f64;
    let mut worst: f64 = problem.f.eval(0.0).abs();
    for j in 1..=mesh.segments() {
        let lo = mesh.node(j - 1);
        let h = mesh.segment_len(j);
        for i in 1..=r {
            let t = if i == r {
                mesh.node(j)
            } else {
                lo + h * i as f64 / r as f64
            };
            let res =
                operator_residual_at(&problem.family, problem.f.eval(t), solution, t, max_panel);
            worst = worst.max(res.abs());
        }
    }
    worst
}
