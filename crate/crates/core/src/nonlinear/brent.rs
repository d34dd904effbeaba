//! Van Wijngaarden-Dekker-Brent root finding and the bracket search used
//! by the nonlinear marching scheme.

use crate::error::{Result, VieError};

/// Iteration cap of a single Brent solve.
pub const MAX_ITER: usize = 200;

/// Initial search interval and its expansion policy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BracketSpec {
    pub lo: f64,
    pub hi: f64,
    /// Growth factor applied to the half-width on every expansion.
    pub expansion: f64,
    pub max_expansions: usize,
}

impl BracketSpec {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            ..Self::default()
        }
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    /// Same shape, re-centred on `c`.
    pub fn around(&self, c: f64) -> Self {
        let w = self.half_width();
        Self {
            lo: c - w,
            hi: c + w,
            ..*self
        }
    }

    pub(crate) fn check(&self) -> Result<()> {
        if !(self.lo < self.hi)
            || !(self.expansion > 1.0)
            || !self.lo.is_finite()
            || !self.hi.is_finite()
        {
            return Err(VieError::InvalidInput(format!(
                "invalid bracket [{}, {}] with expansion {}",
                self.lo, self.hi, self.expansion
            )));
        }
        Ok(())
    }
}

impl Default for BracketSpec {
    fn default() -> Self {
        Self {
            lo: -1.0,
            hi: 1.0,
            expansion: 2.0,
            max_expansions: 40,
        }
    }
}

/// Brent's method on a sign-changing bracket; returns the root and the
/// number of iterations spent.
pub fn brent_in(phi: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<(f64, usize)> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (phi(a), phi(b));
    if fa == 0.0 {
        return Ok((a, 0));
    }
    if fb == 0.0 {
        return Ok((b, 0));
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(VieError::NoSignChange {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let (mut c, mut fc) = (b, fb);
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol * (1.0 + b.abs());
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok((b, iter));
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // inverse quadratic interpolation, or secant when a == c
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = phi(b);
        if !fb.is_finite() {
            return Err(VieError::NonFinite { k: 0, value: fb });
        }
    }
    Err(VieError::BrentNonConvergence {
        iterations: MAX_ITER,
    })
}

/// Expands `bracket` symmetrically until `phi` changes sign, then runs
/// Brent's method to a bracket width of `tol * (1 + |x|)`.
pub fn brent_root(phi: impl Fn(f64) -> f64, bracket: &BracketSpec, tol: f64) -> Result<f64> {
    bracket.check()?;
    let c = bracket.center();
    let mut w = bracket.half_width();
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let mut expansions = 0;
    loop {
        let (fl, fh) = (phi(lo), phi(hi));
        if fl == 0.0 || fh == 0.0 || fl.signum() != fh.signum() {
            break;
        }
        if expansions == bracket.max_expansions {
            return Err(VieError::NoSignChange {
                lo,
                hi,
                f_lo: fl,
                f_hi: fh,
            });
        }
        expansions += 1;
        w *= bracket.expansion;
        lo = c - w;
        hi = c + w;
    }
    brent_in(phi, lo, hi, tol).map(|(x, _)| x)
}

/// Outcome of [`nearest_root`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RootPick {
    /// A sign change was found and refined.
    Root(f64),
    /// No sign change; the interior minimiser of `|phi|` (a tangency).
    Tangent(f64),
}

impl RootPick {
    pub fn value(self) -> f64 {
        match self {
            RootPick::Root(x) | RootPick::Tangent(x) => x,
        }
    }
}

const GRID: usize = 32;

/// Finds the root of `phi` nearest to the bracket centre.
///
/// The bracket is sampled on a uniform grid. Sign changes between grid
/// points give root brackets; every interior local minimum of `|phi|` is
/// refined as well, since a pair of close roots can hide inside one grid
/// cell. All brackets are solved with Brent's method and the root closest
/// to the centre wins. Without any root, an interior dip of `|phi|` at
/// least halving the end values is taken as a tangency. Otherwise the
/// half-width grows geometrically.
pub fn nearest_root(phi: impl Fn(f64) -> f64, bracket: &BracketSpec, tol: f64) -> Result<RootPick> {
    bracket.check()?;
    let c = bracket.center();
    let mut w = bracket.half_width();
    let mut xs = [0.0; 2 * GRID + 1];
    let mut fs = [0.0; 2 * GRID + 1];
    let mut brackets: Vec<(f64, f64)> = Vec::new();
    let mut dips: Vec<(f64, f64)> = Vec::new();
    for _ in 0..=bracket.max_expansions {
        let dx = w / GRID as f64;
        for i in 0..xs.len() {
            xs[i] = c + (i as f64 - GRID as f64) * dx;
            fs[i] = phi(xs[i]);
        }
        brackets.clear();
        dips.clear();
        let mut exact: Option<f64> = None;
        for i in 0..xs.len() {
            if fs[i] == 0.0 && exact.is_none_or(|x: f64| (xs[i] - c).abs() < (x - c).abs()) {
                exact = Some(xs[i]);
            }
        }
        if let Some(x) = exact {
            return Ok(RootPick::Root(x));
        }
        for i in 0..xs.len() - 1 {
            if fs[i].is_finite() && fs[i + 1].is_finite() && fs[i].signum() != fs[i + 1].signum() {
                brackets.push((xs[i], xs[i + 1]));
            }
        }
        for i in 1..xs.len() - 1 {
            let (a, m, b) = (fs[i - 1], fs[i], fs[i + 1]);
            let same_sign = a.signum() == m.signum() && b.signum() == m.signum();
            if same_sign && m.abs() <= a.abs() && m.abs() <= b.abs() {
                match valley(&phi, xs[i - 1], xs[i], xs[i + 1], m, tol) {
                    Valley::Crossing(x) => {
                        brackets.push((xs[i - 1], x));
                        brackets.push((x, xs[i + 1]));
                    }
                    Valley::Floor(x, fx) => dips.push((x, fx)),
                }
            }
        }
        let mut best: Option<f64> = None;
        for &(lo, hi) in &brackets {
            let (x, _) = brent_in(&phi, lo, hi, tol)?;
            if best.is_none_or(|b| (x - c).abs() < (b - c).abs()) {
                best = Some(x);
            }
        }
        if let Some(x) = best {
            return Ok(RootPick::Root(x));
        }
        let ends = fs[0].abs().min(fs[2 * GRID].abs());
        let tangent = dips
            .iter()
            .filter(|(_, fx)| *fx < 0.5 * ends)
            .min_by(|a, b| (a.0 - c).abs().total_cmp(&(b.0 - c).abs()));
        if let Some(&(x, _)) = tangent {
            return Ok(RootPick::Tangent(x));
        }
        w *= bracket.expansion;
    }
    Err(VieError::RootBracketFailure { k: 0 })
}

enum Valley {
    /// `phi` changes sign at this point of the valley.
    Crossing(f64),
    /// Minimiser of `|phi|` and the value there.
    Floor(f64, f64),
}

/// Golden-section descent of `|phi|` inside `[a, b]` starting from the
/// grid minimum `m`, stopping as soon as `phi` changes sign.
fn valley(phi: &impl Fn(f64) -> f64, mut a: f64, m: f64, mut b: f64, fm: f64, tol: f64) -> Valley {
    const R: f64 = 0.618_033_988_749_894_9;
    let sign = fm.signum();
    let g = |x: f64| sign * phi(x);
    let (mut best_x, mut best_f) = (m, fm.abs());
    let mut x1 = b - R * (b - a);
    let mut x2 = a + R * (b - a);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..200 {
        for (x, f) in [(x1, f1), (x2, f2)] {
            if f <= 0.0 {
                return Valley::Crossing(x);
            }
            if f < best_f {
                best_x = x;
                best_f = f;
            }
        }
        if (b - a).abs() <= tol * (1.0 + a.abs()) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - R * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + R * (b - a);
            f2 = g(x2);
        }
    }
    Valley::Floor(best_x, best_f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::Cell;

    #[test]
    fn linear_root() {
        let x = brent_root(|x| x - 3.0, &BracketSpec::new(0.0, 10.0), 1e-12).unwrap();
        assert!((x - 3.0).abs() < 1e-11);
    }

    #[test]
    fn classical_cubic() {
        let x = brent_root(
            |x| x * x * x - 2.0 * x - 5.0,
            &BracketSpec::new(2.0, 3.0),
            1e-14,
        )
        .unwrap();
        assert!((x - 2.094_551_481_542_326_5).abs() < 1e-12);
    }

    #[test]
    fn sine_root_is_pi() {
        let x = brent_root(f64::sin, &BracketSpec::new(3.0, 4.0), 1e-14).unwrap();
        assert!((x - std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn expansion_finds_distant_root() {
        let x = brent_root(|x| x - 100.0, &BracketSpec::default(), 1e-12).unwrap();
        assert!((x - 100.0).abs() < 1e-9);
    }

    #[test]
    fn no_sign_change_is_an_error() {
        let spec = BracketSpec {
            max_expansions: 5,
            ..BracketSpec::default()
        };
        assert!(matches!(
            brent_root(|x| x * x + 1.0, &spec, 1e-12),
            Err(VieError::NoSignChange { .. })
        ));
    }

    #[test]
    fn stays_inside_bracket() {
        let lo = 0.5;
        let hi = 3.0;
        let outside = Cell::new(false);
        let (_, iters) = brent_in(
            |x: f64| {
                if x < lo || x > hi {
                    outside.set(true);
                }
                (x - 1.0).powi(3)
            },
            lo,
            hi,
            1e-14,
        )
        .unwrap();
        assert!(!outside.get());
        assert!(iters <= MAX_ITER);
    }

    #[test]
    fn nearest_root_prefers_centre() {
        // roots at 1 and 3, centre 1.2
        let pick = nearest_root(
            |x| (x - 1.0) * (x - 3.0),
            &BracketSpec::new(-0.8, 3.2),
            1e-13,
        )
        .unwrap();
        assert!(matches!(pick, RootPick::Root(x) if (x - 1.0).abs() < 1e-10));
        let pick = nearest_root(
            |x| (x - 1.0) * (x - 3.0),
            &BracketSpec::new(1.8, 3.8),
            1e-13,
        )
        .unwrap();
        assert!((pick.value() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn close_roots_inside_one_cell_are_resolved() {
        // roots 1.00 and 1.01, far below the grid spacing of 1/16
        let phi = |x: f64| (x - 1.0) * (x - 1.01);
        let pick = nearest_root(phi, &BracketSpec::new(0.02, 2.02), 1e-14).unwrap();
        assert!((pick.value() - 1.01).abs() < 1e-12, "{pick:?}");
        let pick = nearest_root(phi, &BracketSpec::new(-0.01, 1.99), 1e-14).unwrap();
        assert!((pick.value() - 1.0).abs() < 1e-12, "{pick:?}");
    }

    #[test]
    fn double_root_is_a_tangency() {
        let pick = nearest_root(
            |x: f64| 1e-13 + x.sin().powi(2),
            &BracketSpec::new(2.0, 4.0),
            1e-12,
        )
        .unwrap();
        assert!(matches!(pick, RootPick::Tangent(_)));
        assert!((pick.value() - std::f64::consts::PI).abs() < 1e-5);
    }
}
