//! Regularized successive approximations for linear equations.
//!
//! After `x_0` and `x_1` are fixed by the seed formulas, the remaining
//! coefficients of a piecewise constant solution are refined by
//!
//! ```text
//! x_k <- x_k + gamma * (g(t_k) - int_{t_1}^{t_k} K(t_k,s) x(s) ds) / d_k
//! ```
//!
//! where `g(t) = f(t) - int_0^{t_1} K(t,s) x_1 ds` and `d_k` is the diagonal
//! weight `int_{Delta_k} K(t_k,s) ds`. Sweeps run over `k = 2..N` using the
//! newest values. The parameter is picked from a grid by the smallest
//! final residual.

use rayon::prelude::*;

use crate::error::{Result, VieError};
use crate::linear::{compute_x0, compute_x1, StepKind, StepSolution};
use crate::mesh::{KernelRow, Mesh};
use crate::problem::LinearProblem;

#[derive(Clone, Debug, PartialEq)]
pub struct IterativeConfig {
    pub gamma_grid: Vec<f64>,
    pub max_iter: usize,
    /// Sweeps stop once the largest update falls below
    /// `stagnation * (1 + max_k |f(t_k)|)`.
    pub stagnation: f64,
}

impl Default for IterativeConfig {
    fn default() -> Self {
        Self {
            gamma_grid: vec![0.1, 0.2, 0.5, 1.0, 1.5, 2.0],
            max_iter: 200,
            stagnation: 1e-10,
        }
    }
}

impl IterativeConfig {
    fn check(&self) -> Result<()> {
        if self.gamma_grid.is_empty()
            || self
                .gamma_grid
                .iter()
                .any(|g| !(*g > 0.0) || !g.is_finite())
        {
            return Err(VieError::InvalidInput(
                "gamma grid must be non-empty with positive entries".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(VieError::InvalidInput("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Residual trace of one grid value.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaTrace {
    pub gamma: f64,
    /// Sup-norm equation residual at the nodes after each sweep.
    pub residuals: Vec<f64>,
    pub diverged: bool,
    pub stagnated: bool,
}

#[derive(Clone, Debug)]
pub struct IterativeResult {
    pub solution: StepSolution,
    pub gamma_star: f64,
    pub residual_history: Vec<GammaTrace>,
    pub iterations_used: usize,
    /// Whether every kernel branch is symmetric; not required to run.
    pub kernels_symmetric: bool,
}

/// Lower triangular midpoint weights, row `k` holding `j = 1..=k`.
struct Weights {
    data: Vec<f64>,
}

impl Weights {
    fn build(problem: &LinearProblem, mesh: &Mesh) -> Result<Self> {
        let n = mesh.segments();
        let mut data = Vec::with_capacity(n * (n + 1) / 2);
        let mut row = KernelRow::default();
        for k in 1..=n {
            row.fill(&problem.family, mesh, k, false);
            let d = row.plain[k - 1];
            if k >= 2 && (d == 0.0 || d.abs() < 1e-12 * mesh.segment_len(k) * row.kmax) {
                return Err(VieError::DegenerateDiagonal { k, value: d });
            }
            data.extend_from_slice(&row.plain);
        }
        Ok(Self { data })
    }

    #[inline]
    fn row(&self, k: usize) -> &[f64] {
        let start = (k - 1) * k / 2;
        &self.data[start..start + k]
    }
}

fn node_residual(w: &Weights, f: &[f64], x: &[f64]) -> f64 {
    let mut worst = f[0].abs();
    for k in 1..x.len() {
        let s: f64 = w.row(k).iter().zip(&x[1..=k]).map(|(a, b)| a * b).sum();
        worst = worst.max((s - f[k]).abs());
    }
    worst
}

pub fn solve_iterative(
    problem: &LinearProblem,
    mesh: &Mesh,
    config: &IterativeConfig,
) -> Result<IterativeResult> {
    config.check()?;
    let n = mesh.segments();
    let x1 = compute_x1(problem, mesh)?;
    let x0 = compute_x0(problem).unwrap_or(x1);
    let weights = Weights::build(problem, mesh)?;
    let f: Vec<f64> = mesh.nodes().iter().map(|&t| problem.f.eval(t)).collect();
    let g: Vec<f64> = (0..=n)
        .map(|k| {
            if k < 2 {
                0.0
            } else {
                f[k] - x1 * weights.row(k)[0]
            }
        })
        .collect();
    let f_max = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let stagnation = config.stagnation * (1.0 + f_max);

    let runs: Vec<(GammaTrace, Vec<f64>)> = config
        .gamma_grid
        .par_iter()
        .map(|&gamma| {
            let mut x = g.clone();
            x[0] = x0;
            x[1] = x1;
            let initial = node_residual(&weights, &f, &x).max(f64::MIN_POSITIVE);
            let mut trace = GammaTrace {
                gamma,
                residuals: Vec::new(),
                diverged: false,
                stagnated: false,
            };
            for _ in 0..config.max_iter {
                let mut largest: f64 = 0.0;
                for k in 2..=n {
                    let row = weights.row(k);
                    let s: f64 = row[1..].iter().zip(&x[2..=k]).map(|(a, b)| a * b).sum();
                    let delta = gamma * (g[k] - s) / row[k - 1];
                    x[k] += delta;
                    largest = largest.max(delta.abs());
                }
                let r = node_residual(&weights, &f, &x);
                trace.residuals.push(r);
                if !r.is_finite() || r > 1e6 * initial {
                    trace.diverged = true;
                    break;
                }
                if largest < stagnation {
                    trace.stagnated = true;
                    break;
                }
            }
            (trace, x)
        })
        .collect();

    let best = runs
        .iter()
        .enumerate()
        .filter(|(_, (t, _))| !t.diverged)
        .min_by(|(_, (a, _)), (_, (b, _))| {
            let ra = a.residuals.last().copied().unwrap_or(f64::INFINITY);
            let rb = b.residuals.last().copied().unwrap_or(f64::INFINITY);
            ra.total_cmp(&rb)
        })
        .map(|(i, _)| i);
    let Some(best) = best else {
        return Err(VieError::NoConvergentGamma {
            residuals: runs
                .iter()
                .map(|(t, _)| (t.gamma, t.residuals.last().copied().unwrap_or(f64::NAN)))
                .collect(),
        });
    };
    let (trace, x) = &runs[best];
    Ok(IterativeResult {
        solution: StepSolution::new(StepKind::Constant, mesh.clone(), x.clone())?,
        gamma_star: trace.gamma,
        iterations_used: trace.residuals.len(),
        residual_history: runs.iter().map(|(t, _)| t.clone()).collect(),
        kernels_symmetric: problem.family.is_symmetric(problem.horizon),
    })
}
