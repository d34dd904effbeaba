//! Meshes, curve location, and midpoint integration of piecewise kernels.

use crate::error::{Result, VieError};
use crate::problem::{CurveSet, KernelFamily};
use crate::quadrature::{self, BudgetExceeded};

/// Relative size below which a sub-interval is treated as a sliver.
pub const SLIVER: f64 = 1e-14;

/// Nodes `0 = t_0 < t_1 < .. < t_N = T`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    nodes: Vec<f64>,
    step: f64,
}

impl Mesh {
    /// `N + 1` equally spaced nodes on `[0, T]`.
    pub fn uniform(segments: usize, horizon: f64) -> Result<Self> {
        if segments == 0 || !(horizon > 0.0) || !horizon.is_finite() {
            return Err(VieError::InvalidInput(format!(
                "uniform mesh needs N >= 1 and T > 0 (got N={segments}, T={horizon})"
            )));
        }
        let nodes = (0..=segments)
            .map(|i| horizon * i as f64 / segments as f64)
            .collect();
        Self::from_nodes(nodes)
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || nodes[0] != 0.0 {
            return Err(VieError::InvalidInput(
                "a mesh needs at least two nodes starting at 0".into(),
            ));
        }
        let mut step: f64 = 0.0;
        for w in nodes.windows(2) {
            let d = w[1] - w[0];
            if !(d > 0.0) || !d.is_finite() {
                return Err(VieError::InvalidInput(
                    "mesh nodes must be strictly increasing".into(),
                ));
            }
            step = step.max(d);
        }
        Ok(Self { nodes, step })
    }

    /// Number of segments `N`.
    pub fn segments(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// `h = max_i (t_i - t_{i-1})`.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn horizon(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Length of `Delta_j = (t_{j-1}, t_j]`, `j` in `1..=N`.
    #[inline]
    pub fn segment_len(&self, j: usize) -> f64 {
        self.nodes[j] - self.nodes[j - 1]
    }

    fn snap(&self) -> f64 {
        SLIVER * self.horizon()
    }

    /// Index `v >= 1` of the segment `(t_{v-1}, t_v]` holding `x`; values
    /// within a sliver of a node count as that node.
    pub fn segment_containing(&self, x: f64) -> usize {
        let target = x - self.snap();
        let v = self.nodes.partition_point(|&t| t < target);
        v.clamp(1, self.segments())
    }

    /// True when `fine` halves every segment of `self`.
    pub fn is_halved_by(&self, fine: &Mesh) -> bool {
        if fine.segments() != 2 * self.segments() {
            return false;
        }
        let tol = 1e-12 * self.horizon();
        self.nodes
            .iter()
            .enumerate()
            .all(|(i, &t)| (fine.nodes[2 * i] - t).abs() <= tol)
    }
}

pub fn build_uniform_mesh(segments: usize, horizon: f64) -> Result<Mesh> {
    Mesh::uniform(segments, horizon)
}

/// `v_{ij}`: the mesh segment holding `alpha_i(t_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VIndexTable {
    rows: Vec<Vec<usize>>,
}

impl VIndexTable {
    /// `v_{ij}` for curve `i` in `1..n` and node `j` in `1..=N`.
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.rows[i - 1][j - 1]
    }

    pub fn curves(&self) -> usize {
        self.rows.len()
    }
}

pub fn build_v_table(mesh: &Mesh, curves: &CurveSet) -> Result<VIndexTable> {
    let snap = mesh.snap();
    let mut rows = Vec::with_capacity(curves.pieces() - 1);
    for i in 1..curves.pieces() {
        let mut row = Vec::with_capacity(mesh.segments());
        for j in 1..=mesh.segments() {
            let tj = mesh.node(j);
            let a = curves.alpha(i, tj);
            if !(a >= -snap && a <= tj + snap) {
                return Err(VieError::Structural(format!(
                    "alpha_{i}(t_{j}) = {a} lies outside [0, {tj}]"
                )));
            }
            let v = if a <= snap {
                1
            } else {
                mesh.segment_containing(a)
            };
            row.push(v.min(j));
        }
        rows.push(row);
    }
    Ok(VIndexTable { rows })
}

/// A piece of `[a, b]` lying inside one kernel branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubSegment {
    pub a: f64,
    pub b: f64,
    pub piece: usize,
}

/// Walks `[a, b]` cut at the breakpoints `bps = [0, alpha_1, .., t]`.
///
/// Cuts within `sliver` of an existing end are absorbed into the following
/// sub-segment, so the visited lengths always sum to `b - a`.
#[inline]
pub(crate) fn for_each_subsegment(
    bps: &[f64],
    a: f64,
    b: f64,
    sliver: f64,
    mut visit: impl FnMut(f64, f64, usize),
) {
    let pieces = bps.len() - 1;
    let mut lo = a;
    let mut p = 0;
    while p + 1 < pieces && bps[p + 1] <= lo + sliver {
        p += 1;
    }
    loop {
        let cut = if p + 1 < pieces {
            bps[p + 1]
        } else {
            f64::INFINITY
        };
        if cut >= b - sliver {
            visit(lo, b, p);
            return;
        }
        if cut - lo > sliver {
            visit(lo, cut, p);
            lo = cut;
        }
        p += 1;
        while p + 1 < pieces && bps[p + 1] <= lo + sliver {
            p += 1;
        }
    }
}

/// Splits `[a, b]` at the curve values `alpha_i(t_eval)`.
pub fn split_at_curves(t_eval: f64, a: f64, b: f64, curves: &CurveSet) -> Vec<SubSegment> {
    let mut out = Vec::new();
    if b <= a {
        return out;
    }
    let bps = curves.breakpoints(t_eval);
    for_each_subsegment(&bps, a, b, SLIVER * t_eval, |a, b, piece| {
        out.push(SubSegment { a, b, piece })
    });
    out
}

/// Calls `visit(width, midpoint)` for equal panels of `[lo, hi]` no longer
/// than `max_panel`.
#[inline]
pub(crate) fn midpoint_panels(lo: f64, hi: f64, max_panel: f64, mut visit: impl FnMut(f64, f64)) {
    let len = hi - lo;
    if !(len > max_panel) {
        visit(len, 0.5 * (lo + hi));
        return;
    }
    let m = (len / max_panel).ceil() as usize;
    let width = len / m as f64;
    for i in 0..m {
        visit(width, lo + (i as f64 + 0.5) * width);
    }
}

/// Midpoint approximation of `int_a^b K(t_eval, s) w(s) ds`, cut at the
/// curves and with panels no longer than `max_panel`.
pub fn integrate_weighted_kernel(
    family: &KernelFamily,
    t_eval: f64,
    a: f64,
    b: f64,
    weight: impl Fn(f64) -> f64,
    max_panel: f64,
) -> f64 {
    if b <= a {
        return 0.0;
    }
    let bps = family.curves.breakpoints(t_eval);
    let mut total = 0.0;
    for_each_subsegment(&bps, a, b, SLIVER * t_eval, |lo, hi, p| {
        midpoint_panels(lo, hi, max_panel, |len, m| {
            total += len * family.kernel(p, t_eval, m) * weight(m);
        });
    });
    total
}

/// Integrals of the kernel row `K(t_k, .)` over every segment up to `k`.
#[derive(Clone, Debug, Default)]
pub(crate) struct KernelRow {
    /// `int_{Delta_j} K(t_k, s) ds`, index `j - 1`.
    pub plain: Vec<f64>,
    /// `(1/h_j) int_{Delta_j} (s - t_{j-1}) K(t_k, s) ds`, index `j - 1`.
    pub ramp: Vec<f64>,
    /// Largest `|K|` met on the row.
    pub kmax: f64,
    bps: Vec<f64>,
}

impl KernelRow {
    pub fn fill(&mut self, family: &KernelFamily, mesh: &Mesh, k: usize, with_ramp: bool) {
        let tk = mesh.node(k);
        family.curves.breakpoints_into(tk, &mut self.bps);
        self.plain.clear();
        self.ramp.clear();
        self.kmax = 0.0;
        let sliver = SLIVER * tk;
        let h = mesh.step();
        for j in 1..=k {
            let lo = mesh.node(j - 1);
            let hj = mesh.segment_len(j);
            let mut plain = 0.0;
            let mut ramp = 0.0;
            let mut kmax = self.kmax;
            for_each_subsegment(&self.bps, lo, mesh.node(j), sliver, |a, b, p| {
                midpoint_panels(a, b, h, |len, m| {
                    let kv = family.kernel(p, tk, m);
                    kmax = kmax.max(kv.abs());
                    plain += len * kv;
                    if with_ramp {
                        ramp += len * kv * ((m - lo) / hj);
                    }
                });
            });
            self.kmax = kmax;
            self.plain.push(plain);
            if with_ramp {
                self.ramp.push(ramp);
            }
        }
    }
}

/// Adaptive reference for `int_a^b K_p(t, s) ... ds` where the integrand
/// may depend on the piece; the range is cut at the curves first.
pub fn reference_integral_by_piece(
    family: &KernelFamily,
    t_eval: f64,
    a: f64,
    b: f64,
    tol: f64,
    integrand: impl Fn(usize, f64) -> f64,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let mut budget = quadrature::DEFAULT_BUDGET;
    let mut total = 0.0;
    let mut failed = false;
    let bps = family.curves.breakpoints(t_eval);
    let span = b - a;
    for_each_subsegment(&bps, a, b, SLIVER * t_eval, |lo, hi, p| {
        if failed {
            return;
        }
        let local = tol * (hi - lo) / span;
        match quadrature::integrate(|s| integrand(p, s), lo, hi, local, &mut budget) {
            Ok(v) => total += v,
            Err(BudgetExceeded) => failed = true,
        }
    });
    if failed {
        Err(VieError::QuadratureBudget { t: t_eval })
    } else {
        Ok(total)
    }
}

/// Same integrand as [`integrate_weighted_kernel`], to absolute accuracy
/// `tol` by adaptive Gauss-Kronrod bisection.
pub fn adaptive_reference_integral(
    family: &KernelFamily,
    t_eval: f64,
    a: f64,
    b: f64,
    weight: impl Fn(f64) -> f64,
    tol: f64,
) -> Result<f64> {
    reference_integral_by_piece(family, t_eval, a, b, tol, |p, s| {
        family.kernel(p, t_eval, s) * weight(s)
    })
}
