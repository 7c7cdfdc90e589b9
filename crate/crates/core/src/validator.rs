//! Geometric verification that the curve is a geodesic of a family member.
//!
//! This path does not use the φ cofactors to decide anything geometric. At
//! each sample it builds the three tangent vectors `P_s, P_t, P_q` at the
//! anchor and measures two things:
//!
//! * the collinearity defect `1 − |cos∠(n̂, N)|` between the hypersurface
//!   normal `n̂ = P_s ⊗ P_t ⊗ P_q` and the principal normal;
//! * the tangential acceleration, i.e. the length of the projection of
//!   `r″ = k₁N` onto the tangent space (Gram–Schmidt basis).
//!
//! Both vanish exactly when the curve is a geodesic. The φ statistics are
//! recorded alongside so that the report is a superset of the algebraic check.

use std::fmt;

use rayon::prelude::*;

use crate::family::{FamilyError, HypersurfaceFamily, Tolerances, DEFAULT_SAMPLES};
use crate::linalg4::{dot, gram_det3, triple_product, Vec4};

/// Relative Gram-determinant level below which the tangent space counts as singular.
pub const SINGULAR_GRAM_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    pub isoparam: f64,
    pub collinearity: f64,
    pub tangential: f64,
    pub phi: Tolerances,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            isoparam: 1e-9,
            collinearity: 1e-9,
            tangential: 1e-9,
            phi: Tolerances::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reason {
    Isoparametric,
    Phi2Zero,
    Phi34Nonzero,
    Collinearity,
    TangentialAcceleration,
    SingularTangentSpace,
}

impl Reason {
    pub fn code(self) -> &'static str {
        match self {
            Reason::Isoparametric => "isoparam",
            Reason::Phi2Zero => "phi2_zero",
            Reason::Phi34Nonzero => "phi34_nonzero",
            Reason::Collinearity => "collinearity",
            Reason::TangentialAcceleration => "tangential_accel",
            Reason::SingularTangentSpace => "singular_tangent_space",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Vec<Reason>),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn reasons(&self) -> &[Reason] {
        match self {
            Verdict::Pass => &[],
            Verdict::Fail(r) => r,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationSample {
    pub s: f64,
    pub isoparam_residual: f64,
    pub collinearity_defect: f64,
    pub tangential_accel: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub phi4: f64,
    /// Tangent vectors at the anchor are (numerically) linearly dependent.
    /// The defect is then reported as 1 and the acceleration as `‖r″‖`.
    pub singular: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub n_samples: usize,
    pub max_isoparam_residual: f64,
    pub max_collinearity_defect: f64,
    pub max_tangential_accel: f64,
    pub min_abs_phi2: f64,
    pub max_abs_phi3: f64,
    pub max_abs_phi4: f64,
    /// Threshold `min_abs_phi2` was compared against.
    pub phi2_threshold: f64,
    pub verdict: Verdict,
    pub samples: Vec<ValidationSample>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }

    /// One line for logs and CI.
    pub fn summary_line(&self, label: &str) -> String {
        let stats = format!(
            "n={} isoparam={:.3e} collinearity={:.3e} tangential={:.3e} min|phi2|={:.3e} max|phi3|={:.3e} max|phi4|={:.3e}",
            self.n_samples,
            self.max_isoparam_residual,
            self.max_collinearity_defect,
            self.max_tangential_accel,
            self.min_abs_phi2,
            self.max_abs_phi3,
            self.max_abs_phi4,
        );
        match &self.verdict {
            Verdict::Pass => format!("PASS {label} {stats}"),
            Verdict::Fail(reasons) => {
                let codes: Vec<&str> = reasons.iter().map(|r| r.code()).collect();
                format!("FAIL {label} {stats} reasons={}", codes.join(","))
            }
        }
    }
}

/// Orthonormal basis of `span(vs)` by Gram–Schmidt with one
/// reorthogonalisation pass; dependent vectors are dropped.
fn orthonormal_basis(vs: &[Vec4]) -> Vec<Vec4> {
    let mut basis: Vec<Vec4> = Vec::with_capacity(vs.len());
    for &v in vs {
        let mut w = v;
        for _ in 0..2 {
            for e in &basis {
                w = w - *e * dot(w, *e);
            }
        }
        if w.norm() > 1e-12 * v.norm().max(f64::MIN_POSITIVE) {
            basis.push(w / w.norm());
        }
    }
    basis
}

fn sample(f: &HypersurfaceFamily, s: f64) -> Result<(ValidationSample, f64), FamilyError> {
    let p = f.params();
    let at = f.curve_sample(s)?;
    let d2 = f.curve().derivatives(s)?.d2;
    let residual = (f.eval_point_at(&at, p.t0, p.q0)? - at.r).norm();
    let tangents = f.partials_at(&at.apparatus, p.t0, p.q0)?;
    let vs = [tangents.p_s, tangents.p_t, tangents.p_q];

    let gram = gram_det3(vs[0], vs[1], vs[2]);
    let scale: f64 = vs.iter().map(|v| v.norm_squared()).product();
    let singular = !(gram > SINGULAR_GRAM_TOL * scale);

    let (defect, accel) = if singular {
        (1.0, d2.norm())
    } else {
        let n = triple_product(vs[0], vs[1], vs[2]);
        let big_n = at.apparatus.frame.n;
        let cos = dot(n, big_n).abs() / (n.norm() * big_n.norm());
        let accel = orthonormal_basis(&vs)
            .iter()
            .map(|e| dot(d2, *e).powi(2))
            .sum::<f64>()
            .sqrt();
        ((1.0 - cos).max(0.0), accel)
    };
    let phi = f.phi_on_curve(s)?;
    Ok((
        ValidationSample {
            s,
            isoparam_residual: residual,
            collinearity_defect: defect,
            tangential_accel: accel,
            phi2: phi.phi2,
            phi3: phi.phi3,
            phi4: phi.phi4,
            singular,
        },
        f.partial_scale(s)?,
    ))
}

/// Measures every statistic at `n_samples` uniform points of the curve
/// domain and compares them against `thresholds`.
pub fn validate(f: &HypersurfaceFamily, n_samples: usize, thresholds: &Thresholds) -> Result<ValidationReport, FamilyError> {
    let rows: Vec<(ValidationSample, f64)> = f
        .s_samples(n_samples)
        .par_iter()
        .map(|&s| sample(f, s))
        .collect::<Result<_, _>>()?;
    let scale = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let samples: Vec<ValidationSample> = rows.into_iter().map(|r| r.0).collect();

    let max = |g: fn(&ValidationSample) -> f64| samples.iter().map(g).fold(0.0, f64::max);
    let max_isoparam_residual = max(|r| r.isoparam_residual);
    let max_collinearity_defect = max(|r| r.collinearity_defect);
    let max_tangential_accel = max(|r| r.tangential_accel);
    let min_abs_phi2 = samples.iter().map(|r| r.phi2.abs()).fold(f64::INFINITY, f64::min);
    let max_abs_phi3 = max(|r| r.phi3.abs());
    let max_abs_phi4 = max(|r| r.phi4.abs());
    let phi2_threshold = thresholds.phi.nonzero_threshold(scale * scale);

    let mut reasons = Vec::new();
    if max_isoparam_residual > thresholds.isoparam {
        reasons.push(Reason::Isoparametric);
    }
    if !(min_abs_phi2 >= phi2_threshold) {
        reasons.push(Reason::Phi2Zero);
    }
    if max_abs_phi3.max(max_abs_phi4) > thresholds.phi.eps_zero {
        reasons.push(Reason::Phi34Nonzero);
    }
    if max_collinearity_defect > thresholds.collinearity {
        reasons.push(Reason::Collinearity);
    }
    if max_tangential_accel > thresholds.tangential {
        reasons.push(Reason::TangentialAcceleration);
    }
    if samples.iter().any(|r| r.singular) {
        reasons.push(Reason::SingularTangentSpace);
    }
    let verdict = if reasons.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail(reasons)
    };

    Ok(ValidationReport {
        n_samples: samples.len(),
        max_isoparam_residual,
        max_collinearity_defect,
        max_tangential_accel,
        min_abs_phi2,
        max_abs_phi3,
        max_abs_phi4,
        phi2_threshold,
        verdict,
        samples,
    })
}

pub fn validate_default(f: &HypersurfaceFamily) -> Result<ValidationReport, FamilyError> {
    validate(f, DEFAULT_SAMPLES, &Thresholds::default())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub t0: f64,
    pub q0: f64,
    pub report: ValidationReport,
}

/// Validates `template` re-anchored at each `(t0, q0)`, in input order.
pub fn sweep_anchor(
    template: &HypersurfaceFamily,
    anchors: &[(f64, f64)],
    n_samples: usize,
    thresholds: &Thresholds,
) -> Result<Vec<SweepRow>, FamilyError> {
    anchors
        .iter()
        .map(|&(t0, q0)| {
            let f = template.with_anchor(t0, q0)?;
            Ok(SweepRow {
                t0,
                q0,
                report: validate(&f, n_samples, thresholds)?,
            })
        })
        .collect()
}

/// Cartesian product of anchor values, `t0` outer.
pub fn anchor_grid(t0s: &[f64], q0s: &[f64]) -> Vec<(f64, f64)> {
    t0s.iter()
        .flat_map(|&t| q0s.iter().map(move |&q| (t, q)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_in;
    use crate::family::{builtin, slot};

    fn with_profile(f: &HypersurfaceFamily, i: usize, text: &str) -> HypersurfaceFamily {
        let mut m = f.marching().clone();
        let (_, scope) = m.kind().scopes();
        m.parts_mut().unwrap().profile[i] = parse_in(text, scope).unwrap();
        f.with_marching(m).unwrap()
    }

    #[test]
    fn builtins_pass() {
        for (name, f) in crate::family::builtin_examples() {
            let r = validate_default(&f).unwrap();
            assert!(r.passed(), "{}", r.summary_line(name));
        }
    }

    #[test]
    fn example1_passes() {
        let r = validate_default(&builtin("example1").unwrap()).unwrap();
        assert!(r.passed(), "{}", r.summary_line("example1"));
        assert!(r.max_collinearity_defect <= 1e-9);
        assert!(r.max_tangential_accel <= 1e-9);
        assert_eq!(r.n_samples, 257);
    }

    #[test]
    fn degenerate_x_fails_with_phi2_zero() {
        let f = with_profile(&builtin("example1").unwrap(), slot::X, "t - t0");
        let r = validate_default(&f).unwrap();
        assert!(r.verdict.reasons().contains(&Reason::Phi2Zero));
        assert!(r.verdict.reasons().contains(&Reason::SingularTangentSpace));
    }

    #[test]
    fn example3_needs_nonzero_q0() {
        let f = builtin("example3").unwrap().with_anchor(1.0, 0.0).unwrap();
        assert!(!validate_default(&f).unwrap().passed());
    }

    #[test]
    fn v_mutation_fails_geometrically() {
        let f = with_profile(&builtin("example1").unwrap(), slot::V, "t - t0");
        let r = validate_default(&f).unwrap();
        let reasons = r.verdict.reasons();
        assert!(reasons.contains(&Reason::Collinearity));
        assert!(reasons.contains(&Reason::TangentialAcceleration));
        // N·(N + B₁)/√2 scaled by k₁ = 1/2.
        assert!((r.max_tangential_accel - 0.5 / 2f64.sqrt()).abs() < 1e-12);
        assert!((r.max_collinearity_defect - (1.0 - 1.0 / 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn sweeps() {
        let grid = anchor_grid(&[0.0, 0.5, 1.0], &[0.0, 0.5, 1.0]);
        let rows = sweep_anchor(&builtin("example1").unwrap(), &grid, 65, &Thresholds::default()).unwrap();
        assert_eq!(rows.len(), 9);
        assert!(rows.iter().all(|r| r.report.passed()));
        assert!(sweep_anchor(&builtin("example1").unwrap(), &[], 65, &Thresholds::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn gram_schmidt_drops_dependent_vectors() {
        let a = Vec4::new(1.0, 1.0, 0.0, 0.0);
        let b = Vec4::new(2.0, 2.0, 0.0, 0.0);
        let c = Vec4::new(0.0, 1.0, 0.0, 0.0);
        let basis = orthonormal_basis(&[a, b, c]);
        assert_eq!(basis.len(), 2);
        assert!(dot(basis[0], basis[1]).abs() < 1e-15);
    }
}
