//! The three worked examples, one per separable type.

use std::f64::consts::PI;

use super::{FamilyParams, HypersurfaceFamily, MarchingKind, MarchingScale, Separable};
use crate::curve::{Curve4, Interval};
use crate::expr::parse_in;

pub const BUILTIN_NAMES: [&str; 3] = ["example1", "example2", "example3"];

struct Template {
    curve: [&'static str; 4],
    s: (f64, f64),
    kind: MarchingKind,
    coeff: [&'static str; 4],
    profile: [&'static str; 4],
    anchor: (f64, f64),
}

fn template(name: &str) -> Option<Template> {
    let helix_b = ["0.5*sin(s)", "0.5*cos(s)", "0", "sqrt(3)/2*s"];
    Some(match name {
        "example1" => Template {
            curve: ["0.5*cos(s)", "0.5*sin(s)", "0.5*s", "sqrt(2)/2*s"],
            s: (0.0, 2.0 * PI),
            kind: MarchingKind::TypeI,
            coeff: ["1", "1", "1", "1"],
            profile: ["(t - t0)*(q - q0)", "0", "t - t0", "q - q0"],
            anchor: (0.5, 0.0),
        },
        "example2" => Template {
            curve: helix_b,
            s: (0.0, 2.0 * PI),
            kind: MarchingKind::TypeII,
            coeff: ["1", "1", "s + t + 1", "(s + 1)*(t - t0)"],
            profile: ["0", "0", "q - q0", "1"],
            anchor: (0.5, 0.0),
        },
        "example3" => Template {
            curve: helix_b,
            s: (PI, 3.0 * PI),
            kind: MarchingKind::TypeIII,
            coeff: ["1", "1", "sin(s*(q - q0))", "s*q^2"],
            profile: ["0", "0", "1", "t - t0"],
            anchor: (1.0, 1.0),
        },
        _ => return None,
    })
}

fn build(t: Template) -> HypersurfaceFamily {
    let unit = Interval::new(0.0, 1.0).expect("unit interval");
    let curve = Curve4::parse(t.curve, Interval::new(t.s.0, t.s.1).expect("domain"))
        .expect("builtin curve parses");
    let (coeff_scope, profile_scope) = t.kind.scopes();
    let parts = Separable {
        coeff: t.coeff.map(|c| parse_in(c, coeff_scope).expect("builtin coefficient")),
        profile: t.profile.map(|c| parse_in(c, profile_scope).expect("builtin profile")),
    };
    let params = FamilyParams::new(t.anchor.0, t.anchor.1, unit, unit).expect("anchor in domain");
    HypersurfaceFamily::new(curve, MarchingScale::separable(t.kind, parts), params)
        .expect("builtin family is valid")
}

/// A built-in family by name.
pub fn builtin(name: &str) -> Option<HypersurfaceFamily> {
    template(name).map(build)
}

/// All built-in families in name order.
pub fn builtin_examples() -> Vec<(&'static str, HypersurfaceFamily)> {
    BUILTIN_NAMES
        .iter()
        .map(|&n| (n, builtin(n).expect("listed builtin")))
        .collect()
}
