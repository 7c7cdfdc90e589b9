//! Hypersurface families built on the Frenet frame of a curve.
//!
//! A family member is
//!
//! ```text
//! P(s,t,q) = r(s) + u·T(s) + v·N(s) + w·B₁(s) + x·B₂(s)
//! ```
//!
//! with marching-scale functions `u, v, w, x` of `(s, t, q)`. The curve is an
//! isogeodesic of `P` when all four functions vanish at the anchor
//! `(t0, q0)` and, along the curve, the hypersurface normal is parallel to
//! the principal normal `N`. On the curve the normal reduces to
//! `-φ₂ N + φ₃ B₁ - φ₄ B₂`, so the second condition reads `φ₃ = φ₄ = 0`,
//! `φ₂ ≠ 0`; see [`PhiTriple`].

mod builtin;
mod conditions;
mod report;

use rayon::prelude::*;
use thiserror::Error;

pub use builtin::{builtin, builtin_examples, BUILTIN_NAMES};
pub use conditions::check_type_conditions;
pub use report::{CheckEntry, ConditionReport, PhiSample, Relation};

use crate::curve::{Curve4, CurveError, FrenetApparatus, Interval};
use crate::expr::{eval_grad3, EvalError, Expr, Grad3, Var};
use crate::linalg4::{triple_product, Vec4};

/// Default sample count for "holds for every s" conditions (2⁸ + 1).
pub const DEFAULT_SAMPLES: usize = 257;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum FamilyError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("anchor {name} = {value} lies outside {domain}")]
    AnchorOutsideDomain {
        name: &'static str,
        value: f64,
        domain: Interval,
    },
    #[error("marching function `{slot}` may not depend on `{var}`")]
    Scope { slot: &'static str, var: Var },
    #[error("condition check requires a {expected} marching scale, got {actual}")]
    WrongVariant {
        expected: &'static str,
        actual: &'static str,
    },
    #[error("type {kind} hypothesis violated: {detail}")]
    HypothesisViolated { kind: &'static str, detail: String },
}

/// The four separable slots are `u = l·U`, `v = m·V`, `w = n·W`, `x = p·X`.
/// `coeff` holds `[l, m, n, p]`, `profile` holds `[U, V, W, X]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Separable {
    pub coeff: [Expr; 4],
    pub profile: [Expr; 4],
}

/// Slot indices into [`Separable`] arrays and marching-function tuples.
pub mod slot {
    pub const U: usize = 0;
    pub const V: usize = 1;
    pub const W: usize = 2;
    pub const X: usize = 3;
}

pub const COEFF_NAMES: [&str; 4] = ["l", "m", "n", "p"];
pub const PROFILE_NAMES: [&str; 4] = ["U", "V", "W", "X"];
pub const FUNCTION_NAMES: [&str; 4] = ["u", "v", "w", "x"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MarchingKind {
    General,
    /// `l(s)·U(t,q)`
    TypeI,
    /// `l(s,t)·U(q)`
    TypeII,
    /// `l(s,q)·U(t)`
    TypeIII,
}

impl MarchingKind {
    pub fn label(self) -> &'static str {
        match self {
            MarchingKind::General => "general",
            MarchingKind::TypeI => "I",
            MarchingKind::TypeII => "II",
            MarchingKind::TypeIII => "III",
        }
    }

    pub fn from_label(label: &str) -> Option<MarchingKind> {
        Some(match label {
            "general" => MarchingKind::General,
            "I" => MarchingKind::TypeI,
            "II" => MarchingKind::TypeII,
            "III" => MarchingKind::TypeIII,
            _ => return None,
        })
    }

    /// Variables allowed in `(coefficient, profile)` expressions.
    pub fn scopes(self) -> (&'static [Var], &'static [Var]) {
        match self {
            MarchingKind::General => (&Var::ALL, &Var::ALL),
            MarchingKind::TypeI => (&[Var::S], &[Var::T, Var::Q]),
            MarchingKind::TypeII => (&[Var::S, Var::T], &[Var::Q]),
            MarchingKind::TypeIII => (&[Var::S, Var::Q], &[Var::T]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MarchingScale {
    General { functions: [Expr; 4] },
    TypeI(Separable),
    TypeII(Separable),
    TypeIII(Separable),
}

impl MarchingScale {
    pub fn kind(&self) -> MarchingKind {
        match self {
            MarchingScale::General { .. } => MarchingKind::General,
            MarchingScale::TypeI(_) => MarchingKind::TypeI,
            MarchingScale::TypeII(_) => MarchingKind::TypeII,
            MarchingScale::TypeIII(_) => MarchingKind::TypeIII,
        }
    }

    pub fn separable(kind: MarchingKind, parts: Separable) -> MarchingScale {
        match kind {
            MarchingKind::TypeI => MarchingScale::TypeI(parts),
            MarchingKind::TypeII => MarchingScale::TypeII(parts),
            MarchingKind::TypeIII => MarchingScale::TypeIII(parts),
            MarchingKind::General => {
                MarchingScale::General { functions: functions_of(&parts) }
            }
        }
    }

    pub fn parts(&self) -> Option<&Separable> {
        match self {
            MarchingScale::General { .. } => None,
            MarchingScale::TypeI(p) | MarchingScale::TypeII(p) | MarchingScale::TypeIII(p) => {
                Some(p)
            }
        }
    }

    pub fn parts_mut(&mut self) -> Option<&mut Separable> {
        match self {
            MarchingScale::General { .. } => None,
            MarchingScale::TypeI(p) | MarchingScale::TypeII(p) | MarchingScale::TypeIII(p) => {
                Some(p)
            }
        }
    }

    /// `[u, v, w, x]` as expressions in `(s, t, q)`.
    pub fn functions(&self) -> [Expr; 4] {
        match self {
            MarchingScale::General { functions } => functions.clone(),
            _ => functions_of(self.parts().expect("separable")),
        }
    }

    /// Checks every expression against its variable scope.
    pub fn validate(&self) -> Result<(), FamilyError> {
        let (coeff_scope, profile_scope) = self.kind().scopes();
        let check = |e: &Expr, slot: &'static str, scope: &[Var]| {
            match e.variables().into_iter().find(|v| !scope.contains(v)) {
                Some(var) => Err(FamilyError::Scope { slot, var }),
                None => Ok(()),
            }
        };
        match self {
            MarchingScale::General { functions } => {
                for (e, name) in functions.iter().zip(FUNCTION_NAMES) {
                    check(e, name, &Var::ALL)?;
                }
            }
            _ => {
                let parts = self.parts().expect("separable");
                for i in 0..4 {
                    check(&parts.coeff[i], COEFF_NAMES[i], coeff_scope)?;
                    check(&parts.profile[i], PROFILE_NAMES[i], profile_scope)?;
                }
            }
        }
        Ok(())
    }
}

fn functions_of(parts: &Separable) -> [Expr; 4] {
    std::array::from_fn(|i| {
        Expr::binary(
            crate::expr::BinOp::Mul,
            parts.coeff[i].clone(),
            parts.profile[i].clone(),
        )
    })
}

/// Anchor `(t0, q0)` and the `t`, `q` parameter domains.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyParams {
    pub t0: f64,
    pub q0: f64,
    pub t_domain: Interval,
    pub q_domain: Interval,
}

impl FamilyParams {
    pub fn new(t0: f64, q0: f64, t_domain: Interval, q_domain: Interval) -> Result<Self, FamilyError> {
        let p = FamilyParams {
            t0,
            q0,
            t_domain,
            q_domain,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        for (name, value, domain) in [("t0", self.t0, self.t_domain), ("q0", self.q0, self.q_domain)] {
            if !domain.contains(value) {
                return Err(FamilyError::AnchorOutsideDomain {
                    name,
                    value,
                    domain,
                });
            }
        }
        Ok(())
    }
}

/// Value of `φ₂, φ₃, φ₄` at a point `(s, t0, q0)` of the curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiTriple {
    pub phi2: f64,
    pub phi3: f64,
    pub phi4: f64,
}

impl PhiTriple {
    /// From the `t`/`q` partials of `v, w, x` on the curve:
    /// `φ₂ = w_t x_q − w_q x_t`, `φ₃ = v_t x_q − v_q x_t`, `φ₄ = v_t w_q − v_q w_t`.
    pub fn from_partials(v: &Grad3, w: &Grad3, x: &Grad3) -> PhiTriple {
        PhiTriple {
            phi2: w.d_t * x.d_q - w.d_q * x.d_t,
            phi3: v.d_t * x.d_q - v.d_q * x.d_t,
            phi4: v.d_t * w.d_q - v.d_q * w.d_t,
        }
    }
}

/// Partial derivatives of `P` at one parameter point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Partials {
    pub p_s: Vec4,
    pub p_t: Vec4,
    pub p_q: Vec4,
}

/// Curve point and frame at one `s`, shared by every `(t, q)` at that `s`.
#[derive(Clone, Copy, Debug)]
pub struct CurveSample {
    pub r: Vec4,
    pub apparatus: FrenetApparatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct IsoparametricReport {
    /// `max_s ‖P(s, t0, q0) − r(s)‖`.
    pub max_residual: f64,
    /// `max_s |u|, |v|, |w|, |x|` at the anchor.
    pub max_abs: [f64; 4],
}

/// A curve, its marching scale and anchor.
#[derive(Clone, Debug, PartialEq)]
pub struct HypersurfaceFamily {
    curve: Curve4,
    marching: MarchingScale,
    params: FamilyParams,
    bound: [Expr; 4],
}

impl HypersurfaceFamily {
    pub fn new(curve: Curve4, marching: MarchingScale, params: FamilyParams) -> Result<Self, FamilyError> {
        marching.validate()?;
        params.validate()?;
        let bound = marching.functions().map(|e| e.bind_anchors(params.t0, params.q0));
        Ok(HypersurfaceFamily {
            curve,
            marching,
            params,
            bound,
        })
    }

    pub fn curve(&self) -> &Curve4 {
        &self.curve
    }

    pub fn marching(&self) -> &MarchingScale {
        &self.marching
    }

    pub fn params(&self) -> &FamilyParams {
        &self.params
    }

    /// `[u, v, w, x]` with the anchors substituted.
    pub fn functions(&self) -> &[Expr; 4] {
        &self.bound
    }

    pub fn with_anchor(&self, t0: f64, q0: f64) -> Result<Self, FamilyError> {
        let params = FamilyParams { t0, q0, ..self.params };
        HypersurfaceFamily::new(self.curve.clone(), self.marching.clone(), params)
    }

    pub fn with_marching(&self, marching: MarchingScale) -> Result<Self, FamilyError> {
        HypersurfaceFamily::new(self.curve.clone(), marching, self.params)
    }

    pub fn curve_sample(&self, s: f64) -> Result<CurveSample, FamilyError> {
        Ok(CurveSample {
            r: self.curve.point(s)?,
            apparatus: self.curve.frenet_apparatus(s)?,
        })
    }

    fn values(&self, s: f64, t: f64, q: f64) -> Result<[f64; 4], FamilyError> {
        let mut out = [0.0; 4];
        for (o, e) in out.iter_mut().zip(&self.bound) {
            *o = e.eval(s, t, q)?;
        }
        Ok(out)
    }

    fn grads(&self, s: f64, t: f64, q: f64) -> Result<[Grad3; 4], FamilyError> {
        let g: Result<Vec<Grad3>, EvalError> =
            self.bound.iter().map(|e| eval_grad3(e, s, t, q)).collect();
        Ok(g?.try_into().expect("four functions"))
    }

    /// `P(s, t, q)` reusing a precomputed curve sample at the same `s`.
    pub fn eval_point_at(&self, at: &CurveSample, t: f64, q: f64) -> Result<Vec4, FamilyError> {
        let c = self.values(at.apparatus.s, t, q)?;
        Ok(at.r + at.apparatus.frame.combine(c))
    }

    pub fn eval_point(&self, s: f64, t: f64, q: f64) -> Result<Vec4, FamilyError> {
        self.eval_point_at(&self.curve_sample(s)?, t, q)
    }

    pub fn partials_at(&self, at: &FrenetApparatus, t: f64, q: f64) -> Result<Partials, FamilyError> {
        let [u, v, w, x] = self.grads(at.s, t, q)?;
        let (k1, k2, k3) = (at.k1, at.k2, at.k3);
        let f = &at.frame;
        let p_s = f.combine([
            1.0 + u.d_s - v.value * k1,
            u.value * k1 + v.d_s - w.value * k2,
            v.value * k2 + w.d_s - x.value * k3,
            w.value * k3 + x.d_s,
        ]);
        let p_t = f.combine([u.d_t, v.d_t, w.d_t, x.d_t]);
        let p_q = f.combine([u.d_q, v.d_q, w.d_q, x.d_q]);
        Ok(Partials { p_s, p_t, p_q })
    }

    pub fn partials(&self, s: f64, t: f64, q: f64) -> Result<Partials, FamilyError> {
        self.partials_at(&self.curve.frenet_apparatus(s)?, t, q)
    }

    /// `P_s ⊗ P_t ⊗ P_q`; zero at singular points of the parametrisation.
    pub fn normal(&self, s: f64, t: f64, q: f64) -> Result<Vec4, FamilyError> {
        let p = self.partials(s, t, q)?;
        Ok(triple_product(p.p_s, p.p_t, p.p_q))
    }

    pub fn phi_on_curve(&self, s: f64) -> Result<PhiTriple, FamilyError> {
        let [_, v, w, x] = self.grads(s, self.params.t0, self.params.q0)?;
        Ok(PhiTriple::from_partials(&v, &w, &x))
    }

    /// Largest `t`/`q` partial of `v, w, x` on the curve at `s`; the
    /// magnitude that `φ` values are compared against.
    pub(crate) fn partial_scale(&self, s: f64) -> Result<f64, FamilyError> {
        let [_, v, w, x] = self.grads(s, self.params.t0, self.params.q0)?;
        Ok([v, w, x]
            .iter()
            .flat_map(|g| [g.d_t.abs(), g.d_q.abs()])
            .fold(0.0, f64::max))
    }

    pub fn s_samples(&self, n_samples: usize) -> Vec<f64> {
        self.curve.domain().samples(n_samples.max(2))
    }

    pub fn check_isoparametric(&self, n_samples: usize) -> Result<IsoparametricReport, FamilyError> {
        let (t0, q0) = (self.params.t0, self.params.q0);
        let per_sample: Vec<(f64, [f64; 4])> = self
            .s_samples(n_samples)
            .par_iter()
            .map(|&s| {
                let at = self.curve_sample(s)?;
                let p = self.eval_point_at(&at, t0, q0)?;
                Ok(((p - at.r).norm(), self.values(s, t0, q0)?))
            })
            .collect::<Result<_, FamilyError>>()?;
        let mut report = IsoparametricReport::default();
        for (res, vals) in per_sample {
            report.max_residual = report.max_residual.max(res);
            for (m, v) in report.max_abs.iter_mut().zip(vals) {
                *m = m.max(v.abs());
            }
        }
        Ok(report)
    }

    /// Sampled form of the isogeodesic condition: isoparametric residual and
    /// `|φ₃|, |φ₄|` at most `eps_zero`, `|φ₂|` at least the scaled nonzero
    /// threshold, at every sample.
    pub fn check_isogeodesic(&self, n_samples: usize, tol: &Tolerances) -> Result<ConditionReport, FamilyError> {
        let (t0, q0) = (self.params.t0, self.params.q0);
        let samples: Vec<(PhiSample, f64)> = self
            .s_samples(n_samples)
            .par_iter()
            .map(|&s| {
                let at = self.curve_sample(s)?;
                let residual = (self.eval_point_at(&at, t0, q0)? - at.r).norm();
                let phi = self.phi_on_curve(s)?;
                let scale = self.partial_scale(s)?;
                Ok((PhiSample { s, phi, isoparam_residual: residual }, scale))
            })
            .collect::<Result<_, FamilyError>>()?;

        let scale = samples.iter().map(|(_, k)| *k).fold(0.0, f64::max);
        let samples: Vec<PhiSample> = samples.into_iter().map(|(p, _)| p).collect();
        let max_of = |f: fn(&PhiSample) -> f64| samples.iter().map(f).fold(0.0, f64::max);
        let min_phi2 = samples.iter().map(|p| p.phi.phi2.abs()).fold(f64::INFINITY, f64::min);

        let mut report = ConditionReport::new("isogeodesic");
        report.push(CheckEntry::at_most(
            "isoparametric",
            max_of(|p| p.isoparam_residual),
            tol.eps_zero,
        ));
        report.push(CheckEntry::at_most("phi3_zero", max_of(|p| p.phi.phi3.abs()), tol.eps_zero));
        report.push(CheckEntry::at_most("phi4_zero", max_of(|p| p.phi.phi4.abs()), tol.eps_zero));
        report.push(CheckEntry::at_least(
            "phi2_nonzero",
            min_phi2,
            tol.nonzero_threshold(scale * scale),
        ));
        report.samples = samples;
        Ok(report)
    }

    /// Type-specific conditions; see [`check_type_conditions`].
    pub fn check_type_conditions(&self, n_samples: usize, tol: &Tolerances) -> Result<ConditionReport, FamilyError> {
        check_type_conditions(&self.marching, &self.params, self.curve.domain(), n_samples, tol)
    }

    /// Type-specific check for separable scales, the general check otherwise.
    pub fn check_conditions(&self, n_samples: usize, tol: &Tolerances) -> Result<ConditionReport, FamilyError> {
        match self.marching.kind() {
            MarchingKind::General => self.check_isogeodesic(n_samples, tol),
            _ => self.check_type_conditions(n_samples, tol),
        }
    }
}

/// Thresholds that turn "≡ 0" and "≠ 0" into sampled inequalities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Upper bound for quantities that must vanish.
    pub eps_zero: f64,
    /// Relative lower bound for quantities that must not vanish; the
    /// threshold is `eps_nonzero · (1 + scale)`.
    pub eps_nonzero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_zero: 1e-9,
            eps_nonzero: 1e-7,
        }
    }
}

impl Tolerances {
    pub fn nonzero_threshold(&self, scale: f64) -> f64 {
        self.eps_nonzero * (1.0 + scale)
    }
}
