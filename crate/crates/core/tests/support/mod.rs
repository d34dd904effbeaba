//! Shared generators and property checks for the integration tests.
//!
//! Random problems use polynomial kernels, proportional curves and a
//! polynomial exact solution, so the right-hand side has a closed form that
//! serves as an independent oracle for the quadrature-built one.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use vie::mesh::{adaptive_reference_integral, split_at_curves};
use vie::nonlinear::brent_root;
use vie::problem::manufacture_rhs;
use vie::{
    max_pointwise_error, solve_direct, two_mesh_difference, BracketSpec, CurveSet, KernelFamily,
    KernelFn, LinearProblem, Mesh, RealFn, StepKind,
};

/// `sum coef * t^i * s^j`.
#[derive(Clone, Debug)]
pub struct Poly2 {
    pub terms: Vec<(f64, i32, i32)>,
}

impl Poly2 {
    pub fn eval(&self, t: f64, s: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, i, j)| c * t.powi(i) * s.powi(j))
            .sum()
    }
}

/// A linear problem with `alpha_i(t) = c_i t`, polynomial kernels of degree
/// at most two and a cubic exact solution.
#[derive(Clone, Debug)]
pub struct RandomProblem {
    /// `0 = c_0 < c_1 < .. < c_{n-1} < c_n = 1`.
    pub c: Vec<f64>,
    pub kernels: Vec<Poly2>,
    /// Coefficients of the exact solution, lowest degree first.
    pub exact: Vec<f64>,
    pub horizon: f64,
}

impl RandomProblem {
    pub fn generate(rng: &mut ChaCha8Rng, horizon: f64) -> Self {
        loop {
            let n = rng.gen_range(1..=3usize);
            let mut inner: Vec<f64> = (1..n).map(|_| rng.gen_range(0.05..0.95)).collect();
            inner.sort_by(f64::total_cmp);
            let mut c = vec![0.0];
            c.extend(inner);
            c.push(1.0);
            if c.windows(2).any(|w| w[1] - w[0] < 0.05) {
                continue;
            }
            let kernels: Vec<Poly2> = (0..n)
                .map(|_| {
                    let lead = rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    let mut terms = vec![(lead, 0, 0)];
                    for (i, j) in [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2)] {
                        terms.push((rng.gen_range(-0.5..0.5), i, j));
                    }
                    Poly2 { terms }
                })
                .collect();
            let exact: Vec<f64> = (0..=rng.gen_range(0..=3usize))
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let p = Self {
                c,
                kernels,
                exact,
                horizon,
            };
            if p.jump_sum() < 0.8 && p.seed_denominator().abs() >= 0.1 {
                return p;
            }
        }
    }

    pub fn pieces(&self) -> usize {
        self.kernels.len()
    }

    /// `sum_{i<n} c_i |K_i(0,0) - K_{i+1}(0,0)| / |K_n(0,0)|`, below one for
    /// a convergent direct scheme.
    pub fn jump_sum(&self) -> f64 {
        let n = self.pieces();
        let kn = self.kernels[n - 1].eval(0.0, 0.0).abs();
        (0..n - 1)
            .map(|p| {
                let jump = self.kernels[p].eval(0.0, 0.0) - self.kernels[p + 1].eval(0.0, 0.0);
                self.c[p + 1] * jump.abs() / kn
            })
            .sum()
    }

    pub fn seed_denominator(&self) -> f64 {
        (0..self.pieces())
            .map(|p| self.kernels[p].eval(0.0, 0.0) * (self.c[p + 1] - self.c[p]))
            .sum()
    }

    pub fn family(&self) -> KernelFamily {
        let kernels = self
            .kernels
            .iter()
            .map(|k| {
                let k = k.clone();
                KernelFn::new(move |t, s| k.eval(t, s))
            })
            .collect();
        KernelFamily::new(CurveSet::proportional(&self.c[1..self.pieces()]), kernels).unwrap()
    }

    pub fn exact_fn(&self) -> RealFn {
        let b = self.exact.clone();
        RealFn::new(move |t| b.iter().rev().fold(0.0, |acc, &c| acc * t + c))
    }

    pub fn max_exact(&self) -> f64 {
        let x = self.exact_fn();
        (0..=1000)
            .map(|i| x.eval(self.horizon * i as f64 / 1000.0).abs())
            .fold(0.0, f64::max)
    }

    /// `f(t)` integrated term by term.
    pub fn closed_form_rhs(&self, t: f64) -> f64 {
        let mut total = 0.0;
        for (p, k) in self.kernels.iter().enumerate() {
            let (lo, hi) = (self.c[p], self.c[p + 1]);
            for &(a, i, j) in &k.terms {
                for (deg, &b) in self.exact.iter().enumerate() {
                    let m = j + deg as i32 + 1;
                    let weight = (hi.powi(m) - lo.powi(m)) / m as f64;
                    total += a * b * weight * t.powi(i + m);
                }
            }
        }
        total
    }

    /// The problem with its right-hand side built by adaptive quadrature.
    pub fn manufactured(&self, tol: f64) -> LinearProblem {
        let family = self.family();
        let f = manufacture_rhs(&family, &self.exact_fn(), None, self.horizon, tol).unwrap();
        LinearProblem::new(family, f, None, self.horizon).unwrap()
    }

    /// The problem with the closed-form right-hand side and derivative.
    pub fn closed_form(&self) -> LinearProblem {
        let (me, me2) = (self.clone(), self.clone());
        let f = RealFn::new(move |t| me.closed_form_rhs(t));
        let df = RealFn::new(move |t| {
            let d = 1e-6 * (1.0 + t.abs());
            (me2.closed_form_rhs(t + d) - me2.closed_form_rhs(t - d)) / (2.0 * d)
        });
        LinearProblem::new(self.family(), f, Some(df), self.horizon).unwrap()
    }
}

pub type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `int_a^b = int_a^m + int_m^b` for the adaptive reference integral.
pub fn quadrature_additivity(p: &RandomProblem, t: f64, a: f64, m: f64, b: f64) -> Check {
    let family = p.family();
    let x = p.exact_fn();
    let tol = 1e-12;
    let whole = adaptive_reference_integral(&family, t, a, b, |s| x.eval(s), tol)
        .map_err(|e| e.to_string())?;
    let left = adaptive_reference_integral(&family, t, a, m, |s| x.eval(s), tol)
        .map_err(|e| e.to_string())?;
    let right = adaptive_reference_integral(&family, t, m, b, |s| x.eval(s), tol)
        .map_err(|e| e.to_string())?;
    let gap = (whole - left - right).abs();
    ensure(gap <= 3.0 * tol + 1e-15 * whole.abs(), || {
        format!("additivity gap {gap:e} on [{a}, {m}, {b}] at t={t}")
    })
}

/// Sub-segments tile `[a, b]` in order and each lies inside its branch.
pub fn split_coverage(p: &RandomProblem, t: f64, a: f64, b: f64) -> Check {
    let family = p.family();
    let parts = split_at_curves(t, a, b, &family.curves);
    ensure(!parts.is_empty(), || {
        format!("no sub-segments for [{a}, {b}]")
    })?;
    ensure(parts[0].a == a && parts.last().unwrap().b == b, || {
        format!("ends {parts:?} do not match [{a}, {b}]")
    })?;
    for w in parts.windows(2) {
        ensure(w[0].b == w[1].a && w[0].piece < w[1].piece, || {
            format!("gap or disorder in {parts:?}")
        })?;
    }
    let slack = 1e-12 * (1.0 + t);
    for s in &parts {
        let mid = 0.5 * (s.a + s.b);
        let (lo, hi) = (
            family.curves.alpha(s.piece, t),
            family.curves.alpha(s.piece + 1, t),
        );
        ensure(s.a < s.b && mid >= lo - slack && mid <= hi + slack, || {
            format!("{s:?} outside branch [{lo}, {hi}] at t={t}")
        })?;
    }
    let total: f64 = parts.iter().map(|s| s.b - s.a).sum();
    ensure((total - (b - a)).abs() <= 1e-14 * (1.0 + b), || {
        format!("lengths sum to {total}")
    })
}

/// `D_N <= eps_N + eps_2N`.
pub fn triangle_bound(p: &RandomProblem, n: usize, kind: StepKind) -> Check {
    let problem = p.closed_form();
    let coarse = solve_direct(&problem, &Mesh::uniform(n, p.horizon).unwrap(), kind)
        .map_err(|e| e.to_string())?;
    let fine = solve_direct(&problem, &Mesh::uniform(2 * n, p.horizon).unwrap(), kind)
        .map_err(|e| e.to_string())?;
    let exact = p.exact_fn();
    let d = two_mesh_difference(&coarse, &fine).map_err(|e| e.to_string())?;
    let bound = max_pointwise_error(&coarse, &exact) + max_pointwise_error(&fine, &exact);
    ensure(d <= bound * (1.0 + 1e-12) + 1e-15, || {
        format!("D_N {d:e} above eps sum {bound:e}")
    })
}

/// Changing `f` after `t_k` leaves the nodes up to `t_k` bit for bit.
pub fn causality(p: &RandomProblem, n: usize, k: usize, bump: f64, kind: StepKind) -> Check {
    let base = p.closed_form();
    let mesh = Mesh::uniform(n, p.horizon).unwrap();
    let cut = mesh.node(k);
    let mut perturbed = base.clone();
    let f = base.f.clone();
    perturbed.f = RealFn::new(move |t| {
        if t > cut {
            f.eval(t) + bump * (t - cut)
        } else {
            f.eval(t)
        }
    });
    let a = solve_direct(&base, &mesh, kind).map_err(|e| e.to_string())?;
    let b = solve_direct(&perturbed, &mesh, kind).map_err(|e| e.to_string())?;
    let same = a.node_values()[..=k] == b.node_values()[..=k];
    let moved = a.node_values()[k + 1..] != b.node_values()[k + 1..];
    ensure(same && moved, || {
        format!("causality broken at k={k} of {n} (same prefix {same}, later change {moved})")
    })
}

/// A sign change in the bracket yields a root inside it.
pub fn brent_bracket(roots: &[f64], lo: f64, hi: f64) -> Check {
    let r = roots.to_vec();
    let phi = move |x: f64| r.iter().map(|&z| x - z).product::<f64>();
    let (f_lo, f_hi) = (phi(lo), phi(hi));
    if f_lo * f_hi >= 0.0 {
        return Ok(());
    }
    let root = brent_root(&phi, &BracketSpec::new(lo, hi), 1e-12).map_err(|e| e.to_string())?;
    let near = roots
        .iter()
        .map(|z| (z - root).abs())
        .fold(f64::INFINITY, f64::min);
    ensure(root >= lo && root <= hi && near <= 1e-9, || {
        format!("root {root} for roots {roots:?} in [{lo}, {hi}]")
    })
}

/// The quadrature-built right-hand side matches the closed form within
/// `10 tol` at `samples` points.
pub fn manufactured_consistency(p: &RandomProblem, tol: f64, samples: usize) -> Check {
    let manufactured = p.manufactured(tol);
    let worst = (0..samples)
        .map(|i| {
            let t = p.horizon * (i as f64 + 0.5) / samples as f64;
            (manufactured.f.eval(t) - p.closed_form_rhs(t)).abs()
        })
        .fold(0.0, f64::max);
    ensure(worst <= 10.0 * tol, || {
        format!("residual {worst:e} above {:e}", 10.0 * tol)
    })
}
