//! Arc-length curves in R⁴ and their Frenet apparatus.

use std::fmt;

use thiserror::Error;

use crate::expr::{eval_jet_s, parse_in, EvalError, Expr, ParseError, Var};
use crate::linalg4::{dot, triple_product, Frame4, Vec4};

/// Default threshold below which `k1` (or the `r′⊗r″⊗r‴` volume) counts as zero.
pub const DEFAULT_EPS_K: f64 = 1e-12;
/// `|k2|` at or below this is reported as degenerate and `k3` is set to 0.
pub const K2_DEGENERATE_TOL: f64 = 1e-10;

/// Closed real interval with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Interval, CurveError> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Interval { lo, hi })
        } else {
            Err(CurveError::InvalidInterval { lo, hi })
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `n` uniform samples including both endpoints (`n = 1` gives `lo`).
    pub fn samples(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![self.lo],
            _ => {
                let step = (self.hi - self.lo) / (n - 1) as f64;
                (0..n)
                    .map(|i| if i == n - 1 { self.hi } else { self.lo + step * i as f64 })
                    .collect()
            }
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degeneracy {
    /// `r″ = 0`: no principal normal.
    ZeroCurvature,
    /// `r′, r″, r‴` linearly dependent: second binormal undefined.
    FlatOsculatingSpace,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CurveError {
    #[error("interval [{lo}, {hi}] must satisfy L1 < L2")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("curve component {component}: {source}")]
    Parse {
        component: usize,
        #[source]
        source: ParseError,
    },
    #[error("curve component {component} may only depend on s")]
    Scope { component: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{}", degenerate_message(*.kind, *.s))]
    DegenerateFrame { s: f64, kind: Degeneracy },
}

fn degenerate_message(kind: Degeneracy, s: f64) -> String {
    match kind {
        Degeneracy::ZeroCurvature => format!("k1 = 0: frame undefined at s = {s}"),
        Degeneracy::FlatOsculatingSpace => {
            format!("r' x r'' x r''' = 0: second binormal undefined at s = {s}")
        }
    }
}

/// Value and first four derivatives of the position vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveDerivatives {
    pub r: Vec4,
    pub d1: Vec4,
    pub d2: Vec4,
    pub d3: Vec4,
    pub d4: Vec4,
}

/// Frenet frame and curvatures at one parameter value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrenetApparatus {
    pub s: f64,
    pub frame: Frame4,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    /// `|k2| ≤ K2_DEGENERATE_TOL`; `k3` is then reported as 0.
    pub k2_degenerate: bool,
}

/// A curve `r(s)` in R⁴ given by four expressions in `s`, assumed to be
/// parametrised by arc length on its domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve4 {
    components: [Expr; 4],
    domain: Interval,
}

impl Curve4 {
    pub fn new(components: [Expr; 4], domain: Interval) -> Result<Curve4, CurveError> {
        for (i, c) in components.iter().enumerate() {
            if c.variables().iter().any(|v| *v != Var::S) || !c.anchors().is_empty() {
                return Err(CurveError::Scope { component: i + 1 });
            }
        }
        Ok(Curve4 { components, domain })
    }

    pub fn parse(components: [&str; 4], domain: Interval) -> Result<Curve4, CurveError> {
        let mut parsed = Vec::with_capacity(4);
        for (i, text) in components.iter().enumerate() {
            let e = parse_in(text, &[Var::S]).map_err(|source| CurveError::Parse {
                component: i + 1,
                source,
            })?;
            parsed.push(e);
        }
        let components: [Expr; 4] = parsed.try_into().expect("four components");
        Curve4::new(components, domain)
    }

    pub fn components(&self) -> &[Expr; 4] {
        &self.components
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Same curve on a different parameter interval.
    pub fn with_domain(&self, domain: Interval) -> Curve4 {
        Curve4 {
            components: self.components.clone(),
            domain,
        }
    }

    pub fn point(&self, s: f64) -> Result<Vec4, CurveError> {
        let mut c = [0.0; 4];
        for (ci, e) in c.iter_mut().zip(&self.components) {
            *ci = e.eval(s, 0.0, 0.0)?;
        }
        Ok(Vec4::from_array(c))
    }

    /// `r, r′, r″, r‴, r⁗` at `s` by jet evaluation of each component.
    pub fn derivatives(&self, s: f64) -> Result<CurveDerivatives, CurveError> {
        let mut d = [[0.0; 4]; 5];
        for (i, e) in self.components.iter().enumerate() {
            let jet = eval_jet_s(e, s, 0.0, 0.0)?;
            for (k, dk) in d.iter_mut().enumerate() {
                dk[i] = jet.derivative(k);
            }
        }
        let [r, d1, d2, d3, d4] = d.map(Vec4::from_array);
        Ok(CurveDerivatives { r, d1, d2, d3, d4 })
    }

    /// Largest `|‖r′(s)‖ − 1|` over `n_samples` uniform samples of the domain.
    pub fn check_arclength(&self, n_samples: usize) -> Result<f64, CurveError> {
        let mut worst = 0.0_f64;
        for s in self.domain.samples(n_samples.max(2)) {
            let d = self.derivatives(s)?;
            worst = worst.max((d.d1.norm() - 1.0).abs());
        }
        Ok(worst)
    }

    pub fn frenet_apparatus(&self, s: f64) -> Result<FrenetApparatus, CurveError> {
        self.frenet_apparatus_with(s, DEFAULT_EPS_K)
    }

    /// Frame `T = r′`, `N = r″/k1`, `B₂ = r′⊗r″⊗r‴ / ‖·‖`, `B₁ = B₂⊗T⊗N`
    /// with `k1 = ‖r″‖`, `k2 = B₁·r‴ / k1`, `k3 = B₂·r⁗ / (k1 k2)`.
    pub fn frenet_apparatus_with(&self, s: f64, eps_k: f64) -> Result<FrenetApparatus, CurveError> {
        let d = self.derivatives(s)?;
        let degenerate = |kind| CurveError::DegenerateFrame { s, kind };

        let k1 = d.d2.norm();
        if k1 <= eps_k {
            return Err(degenerate(Degeneracy::ZeroCurvature));
        }
        let volume = triple_product(d.d1, d.d2, d.d3);
        let vol_norm = volume.norm();
        if vol_norm <= eps_k * d.d1.norm() * k1 * d.d3.norm() {
            return Err(degenerate(Degeneracy::FlatOsculatingSpace));
        }

        let renorm = |v: Vec4| v.normalized().ok_or(degenerate(Degeneracy::ZeroCurvature));
        let t = renorm(d.d1)?;
        let n = renorm(d.d2 / k1)?;
        let b2 = renorm(volume / vol_norm)?;
        let b1 = renorm(triple_product(b2, t, n))
            .map_err(|_| degenerate(Degeneracy::FlatOsculatingSpace))?;

        let k2 = dot(b1, d.d3) / k1;
        let k2_degenerate = k2.abs() <= K2_DEGENERATE_TOL;
        let k3 = if k2_degenerate {
            0.0
        } else {
            dot(b2, d.d4) / (k1 * k2)
        };
        Ok(FrenetApparatus {
            s,
            frame: Frame4 { t, n, b1, b2 },
            k1,
            k2,
            k3,
            k2_degenerate,
        })
    }
}
