//! Shared function handles.
//!
//! Every problem ingredient (right-hand sides, curves, kernels,
//! nonlinearities) is an immutable, thread-safe closure behind an [`Arc`],
//! so problems can be cloned cheaply and solved from several threads.

use std::fmt;
use std::sync::Arc;

/// A real function of one variable, `t -> value`.
#[derive(Clone)]
pub struct RealFn(Arc<dyn Fn(f64) -> f64 + Send + Sync>);

impl RealFn {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.0)(t)
    }
}

impl fmt::Debug for RealFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("RealFn")
    }
}

/// A kernel branch `K_i(t, s)`, meaningful for `0 <= s <= t`.
#[derive(Clone)]
pub struct KernelFn(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>);

impl KernelFn {
    pub fn new(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_, _| c)
    }

    #[inline]
    pub fn eval(&self, t: f64, s: f64) -> f64 {
        (self.0)(t, s)
    }
}

impl fmt::Debug for KernelFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("KernelFn")
    }
}

/// A nonlinearity `G_i(s, x)` or its partial derivative in `x`.
#[derive(Clone)]
pub struct Nonlinearity(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>);

impl Nonlinearity {
    pub fn new(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    /// `G(s, x) = x`.
    pub fn identity() -> Self {
        Self::new(|_, x| x)
    }

    #[inline]
    pub fn eval(&self, s: f64, x: f64) -> f64 {
        (self.0)(s, x)
    }
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Nonlinearity")
    }
}

/// Step used for finite-difference derivatives on a horizon `T`.
pub fn difference_step(horizon: f64) -> f64 {
    (1e-8 * horizon).max(1e-6)
}

/// Finite-difference derivative of `f` at `t` on `[0, horizon]`.
///
/// Central differences in the interior; second-order one-sided formulas
/// within one step of either end so `f` is never sampled outside the
/// horizon.
pub fn finite_difference(f: &RealFn, t: f64, horizon: f64) -> f64 {
    let h = difference_step(horizon);
    if t - h < 0.0 {
        (-3.0 * f.eval(t) + 4.0 * f.eval(t + h) - f.eval(t + 2.0 * h)) / (2.0 * h)
    } else if t + h > horizon {
        (3.0 * f.eval(t) - 4.0 * f.eval(t - h) + f.eval(t - 2.0 * h)) / (2.0 * h)
    } else {
        (f.eval(t + h) - f.eval(t - h)) / (2.0 * h)
    }
}
