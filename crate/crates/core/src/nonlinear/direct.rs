//! Forward marching for the nonlinear equation with piecewise constant
//! coefficients: one scalar root per node.

use super::brent::{nearest_root, BracketSpec, RootPick};
use crate::error::{Result, VieError};
use crate::linear::{StepKind, StepSolution};
use crate::mesh::{build_v_table, for_each_subsegment, midpoint_panels, Mesh, SLIVER};
use crate::problem::NonlinearProblem;

/// Absolute-plus-relative width at which node roots are accepted.
pub const ROOT_TOL: f64 = 1e-13;

/// Where the search bracket of node `k` is centred.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BracketCenter {
    /// On the previous value `x_{k-1}`.
    Previous,
    /// On the linear extrapolation from `x_{k-1}` with the slope of the
    /// last step that found a genuine root. After a tangential pick the
    /// search starts just past the tangency point in the direction the
    /// solution first approached it from, so the march crosses the fold
    /// instead of turning back; later visits to the same point keep that
    /// direction.
    #[default]
    Extrapolated,
}

/// Root-search policy of the marching scheme.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct DirectConfig {
    /// Bracket of the seed equation at `t = 0`; later brackets reuse its
    /// width around the centre chosen by `center`.
    pub bracket: BracketSpec,
    pub center: BracketCenter,
    /// Estimate of `x'(0)`. When several solution branches leave the seed
    /// `x(0)`, the first bracket is centred on `x(0) + slope * t_1` to pick
    /// one; without it the first step centres on `x(0)`.
    pub initial_slope: Option<f64>,
}

impl DirectConfig {
    pub fn with_bracket(bracket: BracketSpec) -> Self {
        Self {
            bracket,
            ..Self::default()
        }
    }
}

/// Solution together with the nodes where no sign change existed and the
/// minimiser of the residual was used instead (tangential roots).
#[derive(Clone, Debug)]
pub struct DirectTrace {
    pub solution: StepSolution,
    pub tangent_nodes: Vec<usize>,
}

/// Root of `sum_i (alpha_i'(0) - alpha_{i-1}'(0)) K_i(0,0) G_i(0, x) = f'(0)`.
pub fn nonlinear_seed(problem: &NonlinearProblem, bracket: &BracketSpec) -> Result<RootPick> {
    let family = &problem.family;
    let curves = &family.curves;
    let weights: Vec<f64> = (0..family.pieces())
        .map(|p| {
            (curves.alpha_prime(p + 1, 0.0) - curves.alpha_prime(p, 0.0))
                * family.kernel(p, 0.0, 0.0)
        })
        .collect();
    let scale = weights.iter().fold(0.0_f64, |m, w| m.max(w.abs()));
    if scale == 0.0 {
        return Err(VieError::DegenerateSeed {
            denominator: 0.0,
            threshold: 0.0,
        });
    }
    let df0 = problem.rhs_derivative(0.0);
    let phi = |x: f64| {
        let mut s = -df0;
        for (p, w) in weights.iter().enumerate() {
            s += w * problem.g[p].eval(0.0, x);
        }
        s
    };
    nearest_root(phi, bracket, ROOT_TOL)
}

/// Direct method for the nonlinear equation; see [`solve_nonlinear_direct_traced`].
pub fn solve_nonlinear_direct(
    problem: &NonlinearProblem,
    mesh: &Mesh,
    bracket: &BracketSpec,
) -> Result<StepSolution> {
    solve_nonlinear_direct_traced(problem, mesh, &DirectConfig::with_bracket(*bracket))
        .map(|t| t.solution)
}

/// Marches `k = 1..N`: every sub-integral of `[0, t_k]` between consecutive
/// curves is split over the mesh segments, integrated with one midpoint
/// panel per piece, and uses the known `x_j` on earlier segments. The
/// remaining scalar equation in `x_k` is solved by Brent's method on the
/// sign change nearest to the bracket centre.
pub fn solve_nonlinear_direct_traced(
    problem: &NonlinearProblem,
    mesh: &Mesh,
    config: &DirectConfig,
) -> Result<DirectTrace> {
    config.bracket.check()?;
    // the v-table doubles as the check that every curve stays inside [0, t]
    build_v_table(mesh, &problem.family.curves)?;
    let n = mesh.segments();
    let family = &problem.family;
    let mut values = vec![0.0; n + 1];
    let mut tangent_nodes = Vec::new();
    let seed = nonlinear_seed(problem, &config.bracket)?;
    if let RootPick::Tangent(_) = seed {
        tangent_nodes.push(0);
    }
    values[0] = seed.value();
    let h = mesh.step();
    let mut bps = Vec::new();
    let mut unknown: Vec<(f64, usize, f64)> = Vec::new();
    let mut slope = config.initial_slope.unwrap_or(0.0);
    // last tangency point with its crossing direction, and whether the
    // previous pick was tangential
    let mut fold: Option<(f64, f64)> = match seed {
        RootPick::Tangent(x) => Some((x, slope.signum())),
        RootPick::Root(_) => None,
    };
    let mut in_fold = fold.is_some();
    for k in 1..=n {
        let tk = mesh.node(k);
        family.curves.breakpoints_into(tk, &mut bps);
        let sliver = SLIVER * tk;
        let mut known = 0.0;
        unknown.clear();
        for (j, &xj) in values.iter().enumerate().take(k + 1).skip(1) {
            for_each_subsegment(&bps, mesh.node(j - 1), mesh.node(j), sliver, |a, b, p| {
                midpoint_panels(a, b, h, |len, m| {
                    let w = len * family.kernel(p, tk, m);
                    if j == k {
                        unknown.push((w, p, m));
                    } else {
                        known += w * problem.g[p].eval(m, xj);
                    }
                });
            });
        }
        let rhs = problem.f.eval(tk) - known;
        let phi = |x: f64| {
            let mut s = -rhs;
            for &(w, p, m) in &unknown {
                s += w * problem.g[p].eval(m, x);
            }
            s
        };
        let center = match (config.center, k) {
            (_, 1) => values[0] + slope * tk,
            (BracketCenter::Previous, _) => values[k - 1],
            (BracketCenter::Extrapolated, _) => match fold {
                Some((xt, dir)) if in_fold => xt + dir * 1e-9 * (1.0 + xt.abs()),
                _ => values[k - 1] + slope * mesh.segment_len(k),
            },
        };
        let pick =
            nearest_root(phi, &config.bracket.around(center), ROOT_TOL).map_err(|e| match e {
                VieError::RootBracketFailure { .. } => VieError::RootBracketFailure { k },
                VieError::NonFinite { value, .. } => VieError::NonFinite { k, value },
                other => other,
            })?;
        let x = pick.value();
        if !x.is_finite() {
            return Err(VieError::NonFinite { k, value: x });
        }
        values[k] = x;
        match pick {
            RootPick::Tangent(_) => {
                tangent_nodes.push(k);
                let dir = match fold {
                    Some((xt, dir)) if in_fold || (xt - x).abs() <= 1e-6 * (1.0 + x.abs()) => dir,
                    _ => (x - values[k - 1]).signum(),
                };
                fold = Some((x, dir));
                in_fold = true;
            }
            RootPick::Root(_) => {
                slope = (x - values[k - 1]) / mesh.segment_len(k);
                in_fold = false;
            }
        }
    }
    Ok(DirectTrace {
        solution: StepSolution::new(StepKind::Constant, mesh.clone(), values)?,
        tangent_nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{KernelFn, Nonlinearity, RealFn};
    use crate::linear::solve_piecewise_constant;
    use crate::problem::{CurveSet, KernelFamily, LinearProblem};

    fn two_piece_linear() -> LinearProblem {
        let family = KernelFamily::new(
            CurveSet::proportional(&[0.5]),
            vec![KernelFn::new(|t, s| 1.0 + t - s), KernelFn::constant(2.0)],
        )
        .unwrap();
        // exact x = 1 + t
        let f = RealFn::new(|t| {
            let a = 0.5 * t;
            // int_0^a (1+t-s)(1+s) ds + 2 int_a^t (1+s) ds
            let first = (1.0 + t) * (a + a * a / 2.0) - (a * a / 2.0 + a * a * a / 3.0);
            let second = 2.0 * ((t - a) + (t * t - a * a) / 2.0);
            first + second
        });
        LinearProblem::new(family, f, None, 1.0).unwrap()
    }

    #[test]
    fn identity_nonlinearity_matches_linear_solver() {
        let lin = two_piece_linear();
        let mesh = Mesh::uniform(64, 1.0).unwrap();
        let a = solve_piecewise_constant(&lin, &mesh).unwrap();
        let nl = NonlinearProblem::linear_disguise(&lin);
        let b = solve_nonlinear_direct(&nl, &mesh, &BracketSpec::default()).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn cubic_nonlinearity_converges() {
        // x(s)^3 with x = 1 + s and K = 1: f = ((1+t)^4 - 1) / 4
        let family = KernelFamily::new(CurveSet::single(), vec![KernelFn::constant(1.0)]).unwrap();
        let g = vec![Nonlinearity::new(|_, x| x * x * x)];
        let f = RealFn::new(|t| ((1.0 + t).powi(4) - 1.0) / 4.0);
        let p = NonlinearProblem::new(family, g, None, f, None, 1.0).unwrap();
        let mut errs = Vec::new();
        for n in [64, 128] {
            let mesh = Mesh::uniform(n, 1.0).unwrap();
            let sol = solve_nonlinear_direct(&p, &mesh, &BracketSpec::new(0.0, 2.0)).unwrap();
            let e = mesh
                .nodes()
                .iter()
                .zip(sol.node_values())
                .skip(1)
                .map(|(t, x)| (x - (1.0 + t)).abs())
                .fold(0.0, f64::max);
            errs.push(e);
        }
        assert!(errs[0] < 0.05, "{errs:?}");
        assert!(errs[1] < 0.6 * errs[0], "{errs:?}");
    }

    #[test]
    fn seed_uses_bracket() {
        let family = KernelFamily::new(CurveSet::single(), vec![KernelFn::constant(1.0)]).unwrap();
        let g = vec![Nonlinearity::new(|_, x: f64| x.sin())];
        let f = RealFn::new(|t| 0.5 * t);
        let p = NonlinearProblem::new(family, g, None, f, None, 1.0).unwrap();
        let x = nonlinear_seed(&p, &BracketSpec::new(2.0, 3.0))
            .unwrap()
            .value();
        assert!((x - (std::f64::consts::PI - 0.5f64.asin())).abs() < 1e-6);
    }
}
