//! Closed-form conditions for separable marching scales.
//!
//! * Type I, `l(s)U(t,q)`: `U = V = W = X = 0` and `V_t = V_q = 0` at the
//!   anchor, `W_t X_q − W_q X_t ≠ 0`, with `l, m, n, p` nowhere zero.
//! * Type II, `l(s,t)U(q)`: assuming `U(q0) = U′(q0) = V(q0) = V′(q0) = 0`,
//!   `n(s,t0)W(q0) = p(s,t0)X(q0) ≡ 0` and
//!   `n_t W(q0) p X′(q0) − n W′(q0) p_t X(q0) ≠ 0` along the curve.
//! * Type III, `l(s,q)U(t)`: the same with the roles of `t` and `q`
//!   exchanged, the bracket being `n W′(t0) p_q X(t0) − n_q W(t0) p X′(t0)`
//!   with `n, p` evaluated at `(s, q0)`.

use rayon::prelude::*;

use super::{
    slot, CheckEntry, ConditionReport, FamilyError, FamilyParams, MarchingKind, MarchingScale,
    Separable, Tolerances,
};
use crate::curve::Interval;
use crate::expr::{eval_grad3, Expr, Grad3};

fn grad(e: &Expr, params: &FamilyParams, s: f64, t: f64, q: f64) -> Result<Grad3, FamilyError> {
    Ok(eval_grad3(&e.bind_anchors(params.t0, params.q0), s, t, q)?)
}

fn grads(es: &[Expr; 4], params: &FamilyParams, s: f64, t: f64, q: f64) -> Result<[Grad3; 4], FamilyError> {
    let mut out = Vec::with_capacity(4);
    for e in es {
        out.push(grad(e, params, s, t, q)?);
    }
    Ok(out.try_into().expect("four slots"))
}

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().map(f64::abs).fold(0.0, f64::max)
}

/// Checks the type-specific conditions of a separable marching scale.
///
/// The "for all s" parts are sampled at `n_samples` uniform points of
/// `s_domain`. General scales are rejected with
/// [`FamilyError::WrongVariant`]; use
/// [`HypersurfaceFamily::check_isogeodesic`](super::HypersurfaceFamily::check_isogeodesic)
/// for those.
pub fn check_type_conditions(
    m: &MarchingScale,
    params: &FamilyParams,
    s_domain: Interval,
    n_samples: usize,
    tol: &Tolerances,
) -> Result<ConditionReport, FamilyError> {
    m.validate()?;
    let samples = s_domain.samples(n_samples.max(2));
    match m {
        MarchingScale::TypeI(parts) => type_one(parts, params, &samples, tol),
        MarchingScale::TypeII(parts) => mixed(MarchingKind::TypeII, parts, params, &samples, tol),
        MarchingScale::TypeIII(parts) => mixed(MarchingKind::TypeIII, parts, params, &samples, tol),
        MarchingScale::General { .. } => Err(FamilyError::WrongVariant {
            expected: "type I, II or III",
            actual: "general",
        }),
    }
}

fn type_one(
    parts: &Separable,
    params: &FamilyParams,
    samples: &[f64],
    tol: &Tolerances,
) -> Result<ConditionReport, FamilyError> {
    let (t0, q0) = (params.t0, params.q0);
    let mut report = ConditionReport::new("type I");

    let coeff_values: Vec<[f64; 4]> = samples
        .par_iter()
        .map(|&s| Ok(grads(&parts.coeff, params, s, t0, q0)?.map(|g| g.value)))
        .collect::<Result<_, FamilyError>>()?;
    let min_coeff = coeff_values
        .iter()
        .flatten()
        .map(|c| c.abs())
        .fold(f64::INFINITY, f64::min);
    let coeff_scale = max_abs(coeff_values.iter().flatten().copied());
    report.push(CheckEntry::at_least(
        "coefficients_nonvanishing",
        min_coeff,
        tol.nonzero_threshold(coeff_scale),
    ));

    let [u, v, w, x] = grads(&parts.profile, params, samples[0], t0, q0)?;
    report.push(CheckEntry::at_most(
        "profiles_vanish_at_anchor",
        max_abs([u.value, v.value, w.value, x.value]),
        tol.eps_zero,
    ));
    report.push(CheckEntry::at_most(
        "v_gradient_zero",
        max_abs([v.d_t, v.d_q]),
        tol.eps_zero,
    ));
    let scale = max_abs([w.d_t, w.d_q, x.d_t, x.d_q]);
    report.push(CheckEntry::at_least(
        "wx_jacobian_nonzero",
        (w.d_t * x.d_q - w.d_q * x.d_t).abs(),
        tol.nonzero_threshold(scale * scale),
    ));
    Ok(report)
}

/// Types II and III. `along` is the variable carried by the coefficients
/// besides `s` (t for II, q for III); the profiles depend on the other one.
fn mixed(
    kind: MarchingKind,
    parts: &Separable,
    params: &FamilyParams,
    samples: &[f64],
    tol: &Tolerances,
) -> Result<ConditionReport, FamilyError> {
    let (t0, q0) = (params.t0, params.q0);
    let type_two = kind == MarchingKind::TypeII;
    // Derivative in the coefficient-side variable and in the profile-side variable.
    let coeff_d = |g: &Grad3| if type_two { g.d_t } else { g.d_q };
    let profile_d = |g: &Grad3| if type_two { g.d_q } else { g.d_t };
    let label = if type_two { "II" } else { "III" };
    let anchor_name = if type_two { "q0" } else { "t0" };

    let profiles = grads(&parts.profile, params, samples[0], t0, q0)?;
    for i in [slot::U, slot::V] {
        let g = &profiles[i];
        let worst = max_abs([g.value, profile_d(g)]);
        if worst > tol.eps_zero {
            return Err(FamilyError::HypothesisViolated {
                kind: label,
                detail: format!(
                    "{name}({anchor_name}) and {name}'({anchor_name}) must vanish, got {} and {}",
                    g.value,
                    profile_d(g),
                    name = super::PROFILE_NAMES[i],
                ),
            });
        }
    }
    let w_prof = profiles[slot::W];
    let x_prof = profiles[slot::X];
    let (w0, dw0) = (w_prof.value, profile_d(&w_prof));
    let (x0, dx0) = (x_prof.value, profile_d(&x_prof));

    // For each s: (anchor values, bracket, bracket scale).
    let per_sample: Vec<(f64, f64, f64)> = samples
        .par_iter()
        .map(|&s| {
            let c = grads(&parts.coeff, params, s, t0, q0)?;
            let (n, p) = (c[slot::W], c[slot::X]);
            let anchored = max_abs([n.value * w0, p.value * x0]);
            let (bracket, terms) = if type_two {
                let wt = coeff_d(&n) * w0;
                let wq = n.value * dw0;
                let xt = coeff_d(&p) * x0;
                let xq = p.value * dx0;
                (wt * xq - wq * xt, [wt, wq, xt, xq])
            } else {
                let wt = n.value * dw0;
                let wq = coeff_d(&n) * w0;
                let xt = p.value * dx0;
                let xq = coeff_d(&p) * x0;
                (wt * xq - wq * xt, [wt, wq, xt, xq])
            };
            Ok((anchored, bracket.abs(), max_abs(terms)))
        })
        .collect::<Result<_, FamilyError>>()?;

    let mut report = ConditionReport::new(if type_two { "type II" } else { "type III" });
    report.push(CheckEntry::at_most(
        "wx_vanish_on_curve",
        per_sample.iter().map(|r| r.0).fold(0.0, f64::max),
        tol.eps_zero,
    ));
    let scale = per_sample.iter().map(|r| r.2).fold(0.0, f64::max);
    report.push(CheckEntry::at_least(
        "bracket_nonzero",
        per_sample.iter().map(|r| r.1).fold(f64::INFINITY, f64::min),
        tol.nonzero_threshold(scale * scale),
    ));
    Ok(report)
}
