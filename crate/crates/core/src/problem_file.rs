//! Plain-text problem definitions.
//!
//! ```text
//! # comments start with '#'
//! name = example2
//! n = 3
//! T = 2
//!
//! [curves]            # alpha_1 .. alpha_{n-1}, functions of t
//! alpha1 = t/8
//! alpha2 = 3*t/8
//! dalpha1 = 1/8       # optional derivatives; numeric otherwise
//!
//! [kernels]           # K_1 .. K_n, functions of t and s
//! K1 = 1 - t*s
//! K2 = t + s
//! K3 = -1
//!
//! [G]                 # optional: G_1 .. G_n of s and x make it nonlinear
//! G1 = sin(x)         # dG1 .. dGn (derivatives in x) are optional
//!
//! [rhs]
//! exact = t^2         # optional unless f = manufactured
//! f = manufactured    # or an expression in t
//! df = 2*t            # optional derivative of f
//!
//! [seed]              # optional, nonlinear problems with several seeds
//! lo = 2              # bracket searched for x(0)
//! hi = 4
//! slope = 1           # estimate of x'(0) selecting the solution branch
//! ```

use std::collections::HashMap;
use std::sync::Arc;

use crate::builtin::Problem;
use crate::error::{Result, VieError};
use crate::expr::{self, Expr, Var, Vars};
use crate::func::{KernelFn, Nonlinearity, RealFn};
use crate::nonlinear::{BracketSpec, DirectConfig, NkConfig};
use crate::problem::{
    manufacture_rhs_default, Curve, CurveSet, KernelFamily, LinearProblem, NonlinearProblem,
};

/// A problem read from a file.
#[derive(Clone, Debug)]
pub struct ProblemDefinition {
    pub name: String,
    pub problem: Problem,
    pub exact: Option<RealFn>,
    pub seed_bracket: Option<BracketSpec>,
    pub initial_slope: Option<f64>,
}

impl ProblemDefinition {
    /// Root-search policy for the nonlinear direct method.
    pub fn direct_config(&self) -> DirectConfig {
        DirectConfig {
            bracket: self.seed_bracket.unwrap_or_default(),
            initial_slope: self.initial_slope,
            ..DirectConfig::default()
        }
    }

    /// Newton-Kantorovich settings with the file's seed bracket.
    pub fn nk_config(&self) -> NkConfig {
        NkConfig {
            seed_bracket: self.seed_bracket.unwrap_or_default(),
            ..NkConfig::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Section {
    Top,
    Curves,
    Kernels,
    G,
    Rhs,
    Seed,
}

impl Section {
    fn label(self) -> &'static str {
        match self {
            Section::Top => "top level",
            Section::Curves => "[curves]",
            Section::Kernels => "[kernels]",
            Section::G => "[G]",
            Section::Rhs => "[rhs]",
            Section::Seed => "[seed]",
        }
    }
}

/// One `key = value` entry with its position.
#[derive(Clone, Debug)]
struct Entry {
    value: String,
    line: usize,
    /// 1-based column where the value starts.
    column: usize,
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> VieError {
    VieError::Parse {
        line,
        column,
        message: message.into(),
    }
}

struct Entries {
    map: HashMap<(Section, String), Entry>,
    last_line: usize,
}

impl Entries {
    fn take(&mut self, section: Section, key: &str) -> Option<Entry> {
        self.map.remove(&(section, key.to_string()))
    }

    fn require(&mut self, section: Section, key: &str) -> Result<Entry> {
        self.take(section, key).ok_or_else(|| {
            parse_error(
                self.last_line,
                1,
                format!("missing key '{key}' in {}", section.label()),
            )
        })
    }

    fn expr(&mut self, section: Section, key: &str, vars: &[Var]) -> Result<Option<Arc<Expr>>> {
        match self.take(section, key) {
            Some(e) => compile(&e, vars).map(Some),
            None => Ok(None),
        }
    }
}

fn compile(entry: &Entry, vars: &[Var]) -> Result<Arc<Expr>> {
    expr::parse(&entry.value, vars)
        .map(Arc::new)
        .map_err(|e| parse_error(entry.line, entry.column + e.column - 1, e.message))
}

fn split_entries(text: &str) -> Result<Entries> {
    let mut map = HashMap::new();
    let mut section = Section::Top;
    let mut last_line = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if trimmed.starts_with('[') {
            if !trimmed.ends_with(']') {
                return Err(parse_error(line, indent + 1, "unterminated section header"));
            }
            section = match trimmed[1..trimmed.len() - 1].trim() {
                "curves" => Section::Curves,
                "kernels" => Section::Kernels,
                "G" => Section::G,
                "rhs" => Section::Rhs,
                "seed" => Section::Seed,
                other => {
                    return Err(parse_error(
                        line,
                        indent + 1,
                        format!("unknown section '[{other}]'"),
                    ))
                }
            };
            continue;
        }
        let Some(eq) = content.find('=') else {
            return Err(parse_error(line, indent + 1, "expected 'key = value'"));
        };
        let key = content[..eq].trim();
        if key.is_empty() {
            return Err(parse_error(line, indent + 1, "missing key before '='"));
        }
        let after = &content[eq + 1..];
        let lead = after.len() - after.trim_start().len();
        let value = after.trim().to_string();
        let column = content[..eq + 1 + lead].chars().count() + 1;
        if value.is_empty() {
            return Err(parse_error(
                line,
                column,
                format!("empty value for '{key}'"),
            ));
        }
        let entry = Entry {
            value,
            line,
            column,
        };
        if map.insert((section, key.to_string()), entry).is_some() {
            return Err(parse_error(
                line,
                indent + 1,
                format!("duplicate key '{key}'"),
            ));
        }
    }
    Ok(Entries { map, last_line })
}

fn constant(entry: &Entry) -> Result<f64> {
    let e = compile(entry, &[])?;
    Ok(e.eval(&Vars::default()))
}

fn of_t(e: Arc<Expr>) -> RealFn {
    RealFn::new(move |t| e.eval(&Vars { t, s: 0.0, x: 0.0 }))
}

fn of_ts(e: Arc<Expr>) -> KernelFn {
    KernelFn::new(move |t, s| e.eval(&Vars { t, s, x: 0.0 }))
}

fn of_sx(e: Arc<Expr>) -> Nonlinearity {
    Nonlinearity::new(move |s, x| e.eval(&Vars { t: 0.0, s, x }))
}

/// Parses a problem definition; `f = manufactured` computes the right-hand
/// side from `exact` by adaptive quadrature.
pub fn parse_problem(text: &str) -> Result<ProblemDefinition> {
    let mut entries = split_entries(text)?;
    let n_entry = entries.require(Section::Top, "n")?;
    let n: usize = n_entry
        .value
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| parse_error(n_entry.line, n_entry.column, "n must be a positive integer"))?;
    let t_entry = entries.require(Section::Top, "T")?;
    let horizon = constant(&t_entry)?;
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(parse_error(
            t_entry.line,
            t_entry.column,
            "T must be positive",
        ));
    }
    let name = entries
        .take(Section::Top, "name")
        .map(|e| e.value)
        .unwrap_or_else(|| "problem".to_string());

    let mut curves = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let value = entries.require(Section::Curves, &format!("alpha{i}"))?;
        let value = of_t(compile(&value, &[Var::T])?);
        let curve = match entries.expr(Section::Curves, &format!("dalpha{i}"), &[Var::T])? {
            Some(d) => Curve::new(value, of_t(d)),
            None => Curve::with_numeric_derivative(value, horizon),
        };
        curves.push(curve);
    }
    let mut kernels = Vec::with_capacity(n);
    for i in 1..=n {
        let k = entries.require(Section::Kernels, &format!("K{i}"))?;
        kernels.push(of_ts(compile(&k, &[Var::T, Var::S])?));
    }
    let family = KernelFamily::new(CurveSet::new(curves), kernels)?;

    let mut g = Vec::new();
    let mut g_x = Vec::new();
    for i in 1..=n {
        if let Some(e) = entries.expr(Section::G, &format!("G{i}"), &[Var::S, Var::X])? {
            g.push(of_sx(e));
        }
        if let Some(e) = entries.expr(Section::G, &format!("dG{i}"), &[Var::S, Var::X])? {
            g_x.push(of_sx(e));
        }
    }
    if !g.is_empty() && g.len() != n {
        return Err(parse_error(
            entries.last_line,
            1,
            format!("[G] needs all of G1..G{n}"),
        ));
    }
    if !g_x.is_empty() && g_x.len() != n {
        return Err(parse_error(
            entries.last_line,
            1,
            format!("[G] needs all of dG1..dG{n} or none"),
        ));
    }

    let exact = entries.expr(Section::Rhs, "exact", &[Var::T])?.map(of_t);
    let f_entry = entries.require(Section::Rhs, "f")?;
    let f_prime = entries.expr(Section::Rhs, "df", &[Var::T])?.map(of_t);
    let nonlinear = !g.is_empty();
    let f = if f_entry.value == "manufactured" {
        let Some(exact) = &exact else {
            return Err(parse_error(
                f_entry.line,
                f_entry.column,
                "f = manufactured needs an 'exact' solution in [rhs]",
            ));
        };
        manufacture_rhs_default(&family, exact, nonlinear.then_some(g.as_slice()), horizon)?
    } else {
        of_t(compile(&f_entry, &[Var::T])?)
    };

    let lo = entries.take(Section::Seed, "lo");
    let hi = entries.take(Section::Seed, "hi");
    let seed_bracket = match (lo, hi) {
        (None, None) => None,
        (Some(lo), Some(hi)) => {
            let (a, b) = (constant(&lo)?, constant(&hi)?);
            if !(a < b) {
                return Err(parse_error(hi.line, hi.column, "[seed] needs lo < hi"));
            }
            Some(BracketSpec::new(a, b))
        }
        (Some(e), None) | (None, Some(e)) => {
            return Err(parse_error(e.line, 1, "[seed] needs both lo and hi"))
        }
    };
    let initial_slope = match entries.take(Section::Seed, "slope") {
        Some(e) => Some(constant(&e)?),
        None => None,
    };

    if let Some(((section, key), entry)) = entries.map.iter().min_by_key(|(_, e)| e.line) {
        return Err(parse_error(
            entry.line,
            1,
            format!("unknown key '{key}' in {}", section.label()),
        ));
    }

    let problem = if nonlinear {
        let g_x = (!g_x.is_empty()).then_some(g_x);
        Problem::Nonlinear(NonlinearProblem::new(family, g, g_x, f, f_prime, horizon)?)
    } else {
        Problem::Linear(LinearProblem::new(family, f, f_prime, horizon)?)
    };
    Ok(ProblemDefinition {
        name,
        problem,
        exact,
        seed_bracket,
        initial_slope,
    })
}

/// Reads and parses a problem file.
pub fn load_problem(path: &std::path::Path) -> Result<ProblemDefinition> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| VieError::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_problem(&text)
}
