//! Error metrics and step-halving sweeps.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::builtin::Problem;
use crate::error::{Result, VieError};
use crate::func::RealFn;
use crate::iterative::{solve_iterative, IterativeConfig};
use crate::linear::{solve_direct, StepKind, StepSolution};
use crate::mesh::Mesh;
use crate::nonlinear::{
    newton_kantorovich_solve, solve_nonlinear_direct_traced, DirectConfig, NkConfig,
};

/// `max_i |exact(t_i) - x_N(t_i)|` over all mesh nodes, `i = 0..=N`.
pub fn max_pointwise_error(solution: &StepSolution, exact: &RealFn) -> f64 {
    solution
        .mesh()
        .nodes()
        .iter()
        .zip(solution.node_values())
        .map(|(&t, x)| (exact.eval(t) - x).abs())
        .fold(0.0, f64::max)
}

/// `D_N`: largest difference at the nodes shared by a mesh and its halving.
pub fn two_mesh_difference(coarse: &StepSolution, fine: &StepSolution) -> Result<f64> {
    if !coarse.mesh().is_halved_by(fine.mesh()) {
        return Err(VieError::MeshesNotNested);
    }
    let fv = fine.node_values();
    Ok(coarse
        .node_values()
        .iter()
        .enumerate()
        .map(|(i, x)| (x - fv[2 * i]).abs())
        .fold(0.0, f64::max))
}

/// `p_N = log2(D_N / D_2N)`.
pub fn convergence_order(d_n: f64, d_2n: f64) -> Result<f64> {
    if !(d_2n > 0.0) {
        return Err(VieError::UndefinedOrder(d_2n));
    }
    Ok((d_n / d_2n).log2())
}

/// Solver selection for a sweep.
#[derive(Clone, Debug)]
pub enum Method {
    /// Piecewise constant direct method.
    Constant,
    /// Piecewise linear direct method.
    Linear,
    Iterative(IterativeConfig),
    NewtonKantorovich(NkConfig),
    NonlinearDirect(DirectConfig),
}

impl Method {
    /// Short name used on the command line: `pc`, `pl`, `iter`, `nk`, `nld`.
    pub fn id(&self) -> &'static str {
        match self {
            Method::Constant => "pc",
            Method::Linear => "pl",
            Method::Iterative(_) => "iter",
            Method::NewtonKantorovich(_) => "nk",
            Method::NonlinearDirect(_) => "nld",
        }
    }

    pub fn needs_linear(&self) -> bool {
        matches!(
            self,
            Method::Constant | Method::Linear | Method::Iterative(_)
        )
    }
}

/// Solves `problem` on `mesh` with `method`. A Newton-Kantorovich run that
/// misses its tolerance is an error.
pub fn solve_with(problem: &Problem, method: &Method, mesh: &Mesh) -> Result<StepSolution> {
    match (problem, method) {
        (Problem::Linear(p), Method::Constant) => solve_direct(p, mesh, StepKind::Constant),
        (Problem::Linear(p), Method::Linear) => solve_direct(p, mesh, StepKind::Linear),
        (Problem::Linear(p), Method::Iterative(c)) => {
            solve_iterative(p, mesh, c).map(|r| r.solution)
        }
        (Problem::Nonlinear(p), Method::NewtonKantorovich(c)) => {
            let r = newton_kantorovich_solve(p, mesh, c)?;
            if r.converged {
                Ok(r.solution)
            } else {
                Err(VieError::NotConverged {
                    iterations: r.iterate_gaps.len(),
                    gap: r.iterate_gaps.last().copied().unwrap_or(f64::NAN),
                })
            }
        }
        (Problem::Nonlinear(p), Method::NonlinearDirect(c)) => {
            solve_nonlinear_direct_traced(p, mesh, c).map(|r| r.solution)
        }
        (Problem::Linear(_), m) => Err(VieError::InvalidInput(format!(
            "method {} needs a nonlinear problem",
            m.id()
        ))),
        (Problem::Nonlinear(_), m) => Err(VieError::InvalidInput(format!(
            "method {} needs a linear problem",
            m.id()
        ))),
    }
}

/// Number of segments `N` for a table step `h = 1/N`.
///
/// Sweeps label their rows by `h = 1/N` whatever the horizon, so on
/// `[0, T]` the mesh spacing is `T h`; `1/h` must be an integer.
pub fn segments_for_step(h: f64) -> Result<usize> {
    let n = (1.0 / h).round();
    if !(h > 0.0) || n < 1.0 || (n * h - 1.0).abs() > 1e-9 {
        return Err(VieError::InvalidInput(format!(
            "step {h} is not the reciprocal of a whole number of segments"
        )));
    }
    Ok(n as usize)
}

/// The halving chain `h_max, h_max/2, .., h_min`.
pub fn halving_chain(h_max: f64, h_min: f64) -> Result<Vec<f64>> {
    if !(h_min > 0.0) || !(h_max >= h_min) {
        return Err(VieError::InvalidInput(format!(
            "need 0 < h_min <= h_max (got {h_min}, {h_max})"
        )));
    }
    let mut out = vec![h_max];
    let mut h = h_max;
    while h > h_min * (1.0 + 1e-9) {
        h /= 2.0;
        out.push(h);
    }
    if (h - h_min).abs() > 1e-9 * h_min {
        return Err(VieError::InvalidInput(format!(
            "h_min {h_min} is not h_max {h_max} halved a whole number of times"
        )));
    }
    Ok(out)
}

/// Default chain `1/32 .. 1/4096`.
pub fn default_chain() -> Vec<f64> {
    (5..=12).map(|e| 1.0 / (1u32 << e) as f64).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    /// Row label `h = 1/N`.
    pub h: f64,
    pub segments: usize,
    /// Error against the exact solution, when one is known.
    pub eps: Option<f64>,
    /// `D_N` against the next (halved) row.
    pub dn: Option<f64>,
    /// `log2(D_N / D_2N)` with the next row's `D`.
    pub pn: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub problem: String,
    pub method: String,
    /// Ordered by decreasing `h`.
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    /// Mean of the last `count` available orders.
    pub fn mean_order(&self, count: usize) -> Option<f64> {
        let p: Vec<f64> = self.rows.iter().filter_map(|r| r.pn).collect();
        if p.len() < count || count == 0 {
            return None;
        }
        Some(p[p.len() - count..].iter().sum::<f64>() / count as f64)
    }

    pub fn row_at(&self, h: f64) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| (r.h - h).abs() <= 1e-12 * h)
    }

    /// `h,eps,dn,pn` with twelve significant digits; absent values empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h,eps,dn,pn\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                num(Some(r.h)),
                num(r.eps),
                num(r.dn),
                num(r.pn)
            );
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("### {} / {}\n\n", self.problem, self.method);
        out.push_str("| h | eps | D_N | p_N |\n|---|---|---|---|\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "| 1/{} | {} | {} | {} |",
                fmt_inverse(r.h),
                num(r.eps),
                num(r.dn),
                num(r.pn)
            );
        }
        out
    }
}

fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.11e}")).unwrap_or_default()
}

fn fmt_inverse(h: f64) -> String {
    let inv = 1.0 / h;
    if (inv - inv.round()).abs() < 1e-9 * inv {
        format!("{}", inv.round() as u64)
    } else {
        format!("{inv:.6}")
    }
}

/// One solve per step, then `eps`, `D_N` and `p_N` per row. Solves run in
/// parallel; the report does not depend on scheduling.
pub fn run_benchmark(
    name: &str,
    problem: &Problem,
    exact: Option<&RealFn>,
    method: &Method,
    steps: &[f64],
) -> Result<ConvergenceReport> {
    if steps.is_empty() {
        return Err(VieError::InvalidInput("empty step list".into()));
    }
    for w in steps.windows(2) {
        if (w[0] - 2.0 * w[1]).abs() > 1e-12 * w[0] {
            return Err(VieError::InvalidInput(
                "steps must form a halving chain".into(),
            ));
        }
    }
    let horizon = problem.horizon();
    let annotate = |h: f64, e: VieError| VieError::Benchmark {
        problem: name.to_string(),
        method: method.id().to_string(),
        h,
        source: Box::new(e),
    };
    let solutions: Vec<StepSolution> = steps
        .par_iter()
        .map(|&h| {
            let n = segments_for_step(h)?;
            let mesh = Mesh::uniform(n, horizon)?;
            solve_with(problem, method, &mesh)
        })
        .zip(steps.par_iter())
        .map(|(r, &h)| r.map_err(|e| annotate(h, e)))
        .collect::<Result<_>>()?;
    let dn: Vec<Option<f64>> = (0..steps.len())
        .map(|i| match solutions.get(i + 1) {
            Some(fine) => two_mesh_difference(&solutions[i], fine).map(Some),
            None => Ok(None),
        })
        .collect::<Result<_>>()?;
    let rows = steps
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            let pn = match (dn[i], dn.get(i + 1).copied().flatten()) {
                (Some(a), Some(b)) => convergence_order(a, b).ok(),
                _ => None,
            };
            ConvergenceRow {
                h,
                segments: solutions[i].mesh().segments(),
                eps: exact.map(|x| max_pointwise_error(&solutions[i], x)),
                dn: dn[i],
                pn,
            }
        })
        .collect();
    Ok(ConvergenceReport {
        problem: name.to_string(),
        method: method.id().to_string(),
        rows,
    })
}
