//! The four benchmark equations on `[0, 2]`.
//!
//! Each is available with the right-hand side as originally published
//! ([`RhsVariant::Printed`]) or recomputed from the exact solution by
//! adaptive quadrature ([`RhsVariant::Manufactured`]). The published
//! right-hand side of `example1` does not vanish at `t = 0`, so the
//! manufactured variant is the default everywhere.

use std::f64::consts::PI;

use crate::error::{Result, VieError};
use crate::func::{KernelFn, Nonlinearity, RealFn};
use crate::nonlinear::{BracketSpec, DirectConfig, NkConfig};
use crate::problem::{
    manufacture_rhs_default, validate_linear, validate_nonlinear, CurveSet, KernelFamily,
    LinearProblem, NonlinearProblem, ValidationReport,
};

pub const HORIZON: f64 = 2.0;

pub const NAMES: [&str; 4] = ["example1", "example2", "example3", "example4"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RhsVariant {
    #[default]
    Manufactured,
    Printed,
}

/// A linear or nonlinear equation instance.
#[derive(Clone, Debug)]
pub enum Problem {
    Linear(LinearProblem),
    Nonlinear(NonlinearProblem),
}

impl Problem {
    pub fn horizon(&self) -> f64 {
        match self {
            Problem::Linear(p) => p.horizon,
            Problem::Nonlinear(p) => p.horizon,
        }
    }

    pub fn family(&self) -> &KernelFamily {
        match self {
            Problem::Linear(p) => &p.family,
            Problem::Nonlinear(p) => &p.family,
        }
    }

    pub fn rhs(&self) -> &RealFn {
        match self {
            Problem::Linear(p) => &p.f,
            Problem::Nonlinear(p) => &p.f,
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, Problem::Linear(_))
    }

    pub fn validate(&self, samples: usize) -> ValidationReport {
        match self {
            Problem::Linear(p) => validate_linear(p, samples),
            Problem::Nonlinear(p) => validate_nonlinear(p, samples),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BuiltinExample {
    pub name: &'static str,
    pub variant: RhsVariant,
    pub problem: Problem,
    pub exact: RealFn,
    /// Bracket for `x(0)` when the seed equation has several roots.
    pub seed_bracket: Option<BracketSpec>,
    /// Sign-carrying estimate of `x'(0)` that picks the solution branch
    /// when more than one leaves the seed.
    pub initial_slope: Option<f64>,
}

impl BuiltinExample {
    /// Root-search policy for the nonlinear direct method.
    pub fn direct_config(&self) -> DirectConfig {
        DirectConfig {
            bracket: self.seed_bracket.unwrap_or_default(),
            initial_slope: self.initial_slope,
            ..DirectConfig::default()
        }
    }

    /// Newton-Kantorovich settings with the example's seed bracket.
    pub fn nk_config(&self) -> NkConfig {
        NkConfig {
            seed_bracket: self.seed_bracket.unwrap_or_default(),
            ..NkConfig::default()
        }
    }
}

fn family(slopes: &[f64], kernels: Vec<KernelFn>) -> KernelFamily {
    KernelFamily::new(CurveSet::proportional(slopes), kernels).expect("static example layout")
}

fn linear(
    name: &'static str,
    variant: RhsVariant,
    fam: KernelFamily,
    exact: RealFn,
    printed: RealFn,
) -> Result<BuiltinExample> {
    let f = match variant {
        RhsVariant::Printed => printed,
        RhsVariant::Manufactured => manufacture_rhs_default(&fam, &exact, None, HORIZON)?,
    };
    Ok(BuiltinExample {
        name,
        variant,
        problem: Problem::Linear(LinearProblem::new(fam, f, None, HORIZON)?),
        exact,
        seed_bracket: None,
        initial_slope: None,
    })
}

fn example1(variant: RhsVariant) -> Result<BuiltinExample> {
    let fam = family(
        &[1.0 / 3.0],
        vec![KernelFn::new(|t, s| 1.0 + t + s), KernelFn::constant(-1.0)],
    );
    let exact = RealFn::new(|t| (2.0 * t + 1.0).sqrt() - 1.0);
    let printed = RealFn::new(|t| {
        (2.0 * t + 1.0).powf(1.5) / 3.0 + 3f64.sqrt() * (2.0 * t + 3.0).powf(2.5) / 45.0
            - 7.0 * t * t / 18.0
            - 4.0 / 15.0
    });
    linear("example1", variant, fam, exact, printed)
}

fn example2(variant: RhsVariant) -> Result<BuiltinExample> {
    let fam = family(
        &[1.0 / 8.0, 3.0 / 8.0],
        vec![
            KernelFn::new(|t, s| 1.0 - t * s),
            KernelFn::new(|t, s| t + s),
            KernelFn::constant(-1.0),
        ],
    );
    let exact = RealFn::new(|t| t * t);
    let printed = RealFn::new(|t| {
        -t.powi(5) / 16384.0 + 67.0 * t.powi(4) / 3072.0 - 121.0 * t.powi(3) / 384.0
    });
    linear("example2", variant, fam, exact, printed)
}

fn example3(variant: RhsVariant) -> Result<BuiltinExample> {
    // Third branch spans (t/2, 3t/4); the published right-hand side is
    // consistent with that layout.
    let fam = family(
        &[1.0 / 8.0, 1.0 / 2.0, 3.0 / 4.0],
        vec![
            KernelFn::new(|t, s| 1.0 + t + s),
            KernelFn::new(|t, s| 2.0 + t * s),
            KernelFn::new(|t, s| t + s - 1.0),
            KernelFn::constant(-4.0),
        ],
    );
    let exact = RealFn::new(|t| ((2.0 * t).exp() - 1.0) / 8.0);
    let printed = RealFn::new(|t| {
        (-4.0
            - (16.0 * t + 69.0 * t * t + 15.0 * t.powi(3)) / 8.0
            - (t / 4.0).exp() * (t * t - 13.0 * t + 12.0)
            + t.exp() * (4.0 * t * t - 16.0 * t + 28.0)
            + (1.5 * t).exp() * (14.0 * t + 20.0)
            - 32.0 * (2.0 * t).exp())
            / 128.0
    });
    linear("example3", variant, fam, exact, printed)
}

fn example4(variant: RhsVariant) -> Result<BuiltinExample> {
    let fam = family(
        &[1.0 / 8.0, 1.0 / 4.0],
        vec![
            KernelFn::new(|t, s| t - s),
            KernelFn::new(|t, _| t),
            KernelFn::constant(-1.0),
        ],
    );
    let g = vec![
        Nonlinearity::new(|_, x: f64| x.sin()),
        Nonlinearity::new(|_, x: f64| 2.0 * x.cos()),
        Nonlinearity::new(|_, x: f64| x.sin().powi(2) + 1.0),
    ];
    let g_x = vec![
        Nonlinearity::new(|_, x: f64| x.cos()),
        Nonlinearity::new(|_, x: f64| -2.0 * x.sin()),
        Nonlinearity::new(|_, x: f64| 2.0 * x.sin() * x.cos()),
    ];
    let exact = RealFn::new(|t| t + PI);
    let f = match variant {
        RhsVariant::Printed => RealFn::new(|t| {
            -17.0 * t / 8.0 + 7.0 * t / 8.0 * (t / 8.0).cos() + (1.0 + 2.0 * t) * (t / 8.0).sin()
                - 2.0 * t * (t / 4.0).sin()
                - (t / 2.0).sin() / 4.0
                + (2.0 * t).sin() / 4.0
        }),
        RhsVariant::Manufactured => manufacture_rhs_default(&fam, &exact, Some(&g), HORIZON)?,
    };
    Ok(BuiltinExample {
        name: "example4",
        variant,
        problem: Problem::Nonlinear(NonlinearProblem::new(fam, g, Some(g_x), f, None, HORIZON)?),
        exact,
        // x(0) solves sin^2 x = 0, so every multiple of pi is a seed
        seed_bracket: Some(BracketSpec::new(2.0, 4.0)),
        // G_3 only sees sin^2 x, and a second solution branch with slope
        // close to -1 also leaves x(0) = pi
        initial_slope: Some(1.0),
    })
}

/// Looks up one of [`NAMES`].
pub fn builtin_example(name: &str, variant: RhsVariant) -> Result<BuiltinExample> {
    match name {
        "example1" => example1(variant),
        "example2" => example2(variant),
        "example3" => example3(variant),
        "example4" => example4(variant),
        other => Err(VieError::InvalidInput(format!(
            "unknown built-in problem '{other}' (expected one of {NAMES:?})"
        ))),
    }
}

/// All four examples in the requested variant.
pub fn builtin_examples(variant: RhsVariant) -> Result<Vec<BuiltinExample>> {
    NAMES.iter().map(|n| builtin_example(n, variant)).collect()
}
