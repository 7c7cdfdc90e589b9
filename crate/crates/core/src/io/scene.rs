//! TOML scene files.
//!
//! ```toml
//! [curve]
//! x1 = "0.5*cos(s)"
//! x2 = "0.5*sin(s)"
//! x3 = "0.5*s"
//! x4 = "sqrt(2)/2*s"
//! s_range = [0, "2*pi"]
//!
//! [marching]
//! type = "I"             # "general", "I", "II" or "III"
//! l = "1"                # coefficients l m n p and profiles U V W X,
//! m = "1"                # or u v w x for "general"
//! n = "1"
//! p = "1"
//! U = "(t - t0)*(q - q0)"
//! V = "0"
//! W = "t - t0"
//! X = "q - q0"
//!
//! [anchor]
//! t0 = 0.5
//! q0 = 0
//! t_range = [0, 1]       # optional, default [0, 1]
//! q_range = [0, 1]
//!
//! [grid]                 # optional
//! fix = "q = 1/8"        # omit for a volume
//! n_s = 65
//! n_t = 17
//! n_q = 17
//! axis = "w"             # coordinate dropped by the projection
//!
//! [output]               # optional
//! mesh = "example1.obj"
//! table = "example1.csv"
//! report = "example1-report.csv"
//! ```
//!
//! Numbers may be given as TOML numbers or as constant expressions
//! (`"2*pi"`, `"1/500"`).

use std::fmt;
use std::path::PathBuf;

use thiserror::Error;
use toml::{Table, Value};

use crate::curve::{Curve4, CurveError, Interval};
use crate::expr::{parse_in, Expr, ParseError, Var};
use crate::family::{
    FamilyError, FamilyParams, HypersurfaceFamily, MarchingKind, MarchingScale, Separable, COEFF_NAMES,
    FUNCTION_NAMES, PROFILE_NAMES,
};
use crate::projection::{Axis, GridSpec};

/// One problem in a scene file, located by its dotted key path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

/// Every problem found while loading a scene.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct SceneError {
    pub errors: Vec<SchemaError>,
}

impl SceneError {
    pub fn mentions(&self, path: &str) -> bool {
        self.errors.iter().any(|e| e.path == path)
    }
}

impl fmt::Display for SceneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.errors.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OutputPaths {
    pub mesh: Option<PathBuf>,
    pub table: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub family: HypersurfaceFamily,
    pub grid: GridSpec,
    pub axis: Axis,
    pub output: OutputPaths,
}

impl Scene {
    pub fn curve(&self) -> &Curve4 {
        self.family.curve()
    }

    pub fn marching(&self) -> &MarchingScale {
        self.family.marching()
    }

    pub fn params(&self) -> &FamilyParams {
        self.family.params()
    }
}

/// Parses `"q = 0.125"` (or `"q=1/8"`) into a fixed parameter.
pub fn parse_fixed(text: &str) -> Result<(Var, f64), String> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| format!("expected `<s|t|q>=<value>`, got `{text}`"))?;
    let var = Var::from_name(name.trim()).ok_or_else(|| format!("unknown parameter `{}`", name.trim()))?;
    let value = constant(value.trim())?;
    Ok((var, value))
}

/// Evaluates a constant expression such as `"2*pi"`.
pub fn constant(text: &str) -> Result<f64, String> {
    let e = parse_in(text, &[]).map_err(|e| e.to_string())?;
    e.eval(0.0, 0.0, 0.0).map_err(|e| e.to_string())
}

struct Ctx {
    errors: Vec<SchemaError>,
}

impl Ctx {
    fn err(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(SchemaError { path: path.into(), message: message.into() });
    }

    fn table<'a>(&mut self, root: &'a Table, key: &str, required: bool) -> Option<&'a Table> {
        match root.get(key) {
            Some(Value::Table(t)) => Some(t),
            Some(other) => {
                self.err(key, format!("expected a table, found {}", other.type_str()));
                None
            }
            None => {
                if required {
                    self.err(key, "missing table");
                }
                None
            }
        }
    }

    fn extra_keys(&mut self, prefix: &str, t: &Table, allowed: &[&str]) {
        for k in t.keys() {
            if !allowed.contains(&k.as_str()) {
                self.err(join(prefix, k), "unknown key");
            }
        }
    }

    fn string<'a>(&mut self, prefix: &str, t: &'a Table, key: &str) -> Option<&'a str> {
        match t.get(key) {
            Some(Value::String(s)) => Some(s),
            Some(other) => {
                self.err(join(prefix, key), format!("expected a string, found {}", other.type_str()));
                None
            }
            None => {
                self.err(join(prefix, key), "missing key");
                None
            }
        }
    }

    fn number_value(&mut self, path: &str, v: &Value) -> Option<f64> {
        match v {
            Value::Integer(i) => Some(*i as f64),
            Value::Float(x) => Some(*x),
            Value::String(s) => match constant(s) {
                Ok(x) => Some(x),
                Err(e) => {
                    self.err(path, e);
                    None
                }
            },
            other => {
                self.err(path, format!("expected a number, found {}", other.type_str()));
                None
            }
        }
    }

    fn number(&mut self, prefix: &str, t: &Table, key: &str) -> Option<f64> {
        match t.get(key) {
            Some(v) => self.number_value(&join(prefix, key), v),
            None => {
                self.err(join(prefix, key), "missing key");
                None
            }
        }
    }

    fn range(&mut self, prefix: &str, t: &Table, key: &str, default: Option<(f64, f64)>) -> Option<Interval> {
        let path = join(prefix, key);
        let (lo, hi) = match t.get(key) {
            None => match default {
                Some(d) => d,
                None => {
                    self.err(path, "missing key");
                    return None;
                }
            },
            Some(Value::Array(a)) if a.len() == 2 => {
                let lo = self.number_value(&format!("{path}[0]"), &a[0]);
                let hi = self.number_value(&format!("{path}[1]"), &a[1]);
                (lo?, hi?)
            }
            Some(_) => {
                self.err(path, "expected an array [L1, L2]");
                return None;
            }
        };
        match Interval::new(lo, hi) {
            Ok(i) => Some(i),
            Err(_) => {
                self.err(path, "L1 < L2 required");
                None
            }
        }
    }

    fn count(&mut self, prefix: &str, t: &Table, key: &str, default: usize) -> usize {
        match t.get(key) {
            None => default,
            Some(Value::Integer(i)) if *i >= 2 => *i as usize,
            Some(Value::Integer(_)) => {
                self.err(join(prefix, key), "at least 2 samples required");
                default
            }
            Some(other) => {
                self.err(join(prefix, key), format!("expected an integer, found {}", other.type_str()));
                default
            }
        }
    }

    fn expr(&mut self, prefix: &str, t: &Table, key: &str, scope: &[Var]) -> Option<Expr> {
        let text = self.string(prefix, t, key)?;
        match parse_in(text, scope) {
            Ok(e) => Some(e),
            Err(ParseError::UnknownIdentifier { name, .. }) if Var::from_name(&name).is_some() => {
                self.err(join(prefix, key), format!("may not depend on `{name}`"));
                None
            }
            Err(e) => {
                self.err(join(prefix, key), e.to_string());
                None
            }
        }
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn slots<const N: usize>(ctx: &mut Ctx, t: &Table, names: [&str; N], scope: &[Var]) -> Option<[Expr; N]> {
    let parsed: Vec<Option<Expr>> = names.iter().map(|n| ctx.expr("marching", t, n, scope)).collect();
    let all: Option<Vec<Expr>> = parsed.into_iter().collect();
    all.map(|v| v.try_into().expect("one per name"))
}

fn load_marching(ctx: &mut Ctx, t: &Table) -> Option<MarchingScale> {
    let label = ctx.string("marching", t, "type")?;
    let Some(kind) = MarchingKind::from_label(label) else {
        ctx.err("marching.type", format!("unknown type `{label}` (expected general, I, II or III)"));
        return None;
    };
    let mut allowed = vec!["type"];
    let (coeff_scope, profile_scope) = kind.scopes();
    let out = if kind == MarchingKind::General {
        allowed.extend(FUNCTION_NAMES);
        slots(ctx, t, FUNCTION_NAMES, &Var::ALL).map(|functions| MarchingScale::General { functions })
    } else {
        allowed.extend(COEFF_NAMES);
        allowed.extend(PROFILE_NAMES);
        let coeff = slots(ctx, t, COEFF_NAMES, coeff_scope);
        let profile = slots(ctx, t, PROFILE_NAMES, profile_scope);
        Some(MarchingScale::separable(kind, Separable { coeff: coeff?, profile: profile? }))
    };
    ctx.extra_keys("marching", t, &allowed);
    out
}

fn load_curve(ctx: &mut Ctx, t: &Table) -> Option<Curve4> {
    ctx.extra_keys("curve", t, &["x1", "x2", "x3", "x4", "s_range"]);
    let comps: Vec<Option<Expr>> = ["x1", "x2", "x3", "x4"]
        .iter()
        .map(|k| ctx.expr("curve", t, k, &[Var::S]))
        .collect();
    let domain = ctx.range("curve", t, "s_range", None);
    let comps: Vec<Expr> = comps.into_iter().collect::<Option<_>>()?;
    Some(Curve4::new(comps.try_into().expect("four components"), domain?).expect("validated components"))
}

fn load_grid(ctx: &mut Ctx, t: Option<&Table>) -> (GridSpec, Axis) {
    let empty = Table::new();
    let t = t.unwrap_or(&empty);
    ctx.extra_keys("grid", t, &["fix", "n_s", "n_t", "n_q", "axis"]);
    let fixed = match t.get("fix") {
        None => None,
        Some(Value::String(s)) => match parse_fixed(s) {
            Ok(f) => Some(f),
            Err(e) => {
                ctx.err("grid.fix", e);
                None
            }
        },
        Some(other) => {
            ctx.err("grid.fix", format!("expected a string, found {}", other.type_str()));
            None
        }
    };
    let base = match fixed {
        Some((p, v)) => GridSpec::slice(p, v),
        None => GridSpec::volume(),
    };
    let grid = base.with_counts(
        ctx.count("grid", t, "n_s", base.n_s),
        ctx.count("grid", t, "n_t", base.n_t),
        ctx.count("grid", t, "n_q", base.n_q),
    );
    let axis = match t.get("axis") {
        None => Axis::W,
        Some(Value::String(s)) => s.parse().unwrap_or_else(|e| {
            ctx.err("grid.axis", format!("{e}"));
            Axis::W
        }),
        Some(other) => {
            ctx.err("grid.axis", format!("expected a string, found {}", other.type_str()));
            Axis::W
        }
    };
    (grid, axis)
}

fn load_output(ctx: &mut Ctx, t: Option<&Table>) -> OutputPaths {
    let Some(t) = t else {
        return OutputPaths::default();
    };
    ctx.extra_keys("output", t, &["mesh", "table", "report"]);
    let mut path = |key: &str| match t.get(key) {
        None => None,
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(other) => {
            ctx.err(join("output", key), format!("expected a string, found {}", other.type_str()));
            None
        }
    };
    OutputPaths { mesh: path("mesh"), table: path("table"), report: path("report") }
}

fn family_error_path(e: &FamilyError) -> String {
    match e {
        FamilyError::AnchorOutsideDomain { name, .. } => join("anchor", name),
        FamilyError::Scope { slot, .. } => join("marching", slot),
        FamilyError::Curve(CurveError::InvalidInterval { .. }) => "curve.s_range".into(),
        _ => String::new(),
    }
}

/// Loads and validates a scene, reporting every schema problem found.
pub fn load_scene(text: &str) -> Result<Scene, SceneError> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| SceneError {
        errors: vec![SchemaError { path: String::new(), message: e.to_string().trim_end().to_string() }],
    })?;
    let mut ctx = Ctx { errors: Vec::new() };
    ctx.extra_keys("", &root, &["curve", "marching", "anchor", "grid", "output"]);

    let curve = ctx.table(&root, "curve", true).and_then(|t| load_curve(&mut ctx, t));
    let marching = ctx.table(&root, "marching", true).and_then(|t| load_marching(&mut ctx, t));
    let anchor = ctx.table(&root, "anchor", true).map(|t| {
        ctx.extra_keys("anchor", t, &["t0", "q0", "t_range", "q_range"]);
        (
            ctx.number("anchor", t, "t0"),
            ctx.number("anchor", t, "q0"),
            ctx.range("anchor", t, "t_range", Some((0.0, 1.0))),
            ctx.range("anchor", t, "q_range", Some((0.0, 1.0))),
        )
    });
    let grid_table = ctx.table(&root, "grid", false);
    let (grid, axis) = load_grid(&mut ctx, grid_table);
    let output_table = ctx.table(&root, "output", false);
    let output = load_output(&mut ctx, output_table);

    if let (Some(curve), Some(marching), Some((Some(t0), Some(q0), Some(td), Some(qd)))) = (curve, marching, anchor) {
        if ctx.errors.is_empty() {
            let built = FamilyParams::new(t0, q0, td, qd)
                .and_then(|params| HypersurfaceFamily::new(curve, marching, params));
            match built {
                Ok(family) => return Ok(Scene { family, grid, axis, output }),
                Err(e) => ctx.err(family_error_path(&e), e.to_string()),
            }
        }
    }
    if ctx.errors.is_empty() {
        ctx.err("", "incomplete scene");
    }
    Err(SceneError { errors: ctx.errors })
}
