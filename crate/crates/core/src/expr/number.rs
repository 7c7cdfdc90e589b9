//! Number types the evaluator is generic over: plain reals, fourth-order
//! jets in one variable, and first-order gradients in three variables.

use std::f64::consts::PI;

use super::ast::Func;
use super::EvalError;

pub(crate) trait Scalar: Copy {
    fn constant(c: f64) -> Self;
    fn value(&self) -> f64;
    fn add(self, o: Self) -> Self;
    fn sub(self, o: Self) -> Self;
    fn mul(self, o: Self) -> Self;
    fn neg(self) -> Self;
    fn div(self, o: Self) -> Result<Self, EvalError>;
    fn apply(self, f: Func) -> Result<Self, EvalError>;
    fn powf(self, c: f64) -> Result<Self, EvalError>;
}

pub(crate) fn pi<N: Scalar>() -> N {
    N::constant(PI)
}

fn domain(op: &'static str, arg: f64) -> EvalError {
    EvalError::Domain { op, arg }
}

fn check_func_domain(f: Func, x: f64, need_derivatives: bool) -> Result<(), EvalError> {
    match f {
        Func::Log if x <= 0.0 => Err(domain("log", x)),
        Func::Sqrt if x < 0.0 || (need_derivatives && x == 0.0) => Err(domain("sqrt", x)),
        Func::Tan if x.cos() == 0.0 => Err(domain("tan", x)),
        _ => Ok(()),
    }
}

/// Exponents that are small integers use repeated multiplication, so that
/// `s^3` stays exact and a zero base is fine.
fn integer_exponent(c: f64) -> Option<i32> {
    (c.fract() == 0.0 && c.abs() <= 64.0).then_some(c as i32)
}

fn check_pow_base(base: f64, c: f64, need_derivatives: bool) -> Result<(), EvalError> {
    if integer_exponent(c).is_some() {
        return Ok(());
    }
    if base < 0.0 || (base == 0.0 && (need_derivatives || c < 0.0)) {
        return Err(domain("pow", base));
    }
    Ok(())
}

fn powi_by_squaring<N: Scalar>(x: N, n: i32) -> Result<N, EvalError> {
    let mut result = N::constant(1.0);
    let mut base = x;
    let mut k = n.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            result = result.mul(base);
        }
        k >>= 1;
        if k > 0 {
            base = base.mul(base);
        }
    }
    if n < 0 {
        N::constant(1.0).div(result)
    } else {
        Ok(result)
    }
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn neg(self) -> Self {
        -self
    }
    fn div(self, o: Self) -> Result<Self, EvalError> {
        if o == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        Ok(self / o)
    }
    fn apply(self, f: Func) -> Result<Self, EvalError> {
        check_func_domain(f, self, false)?;
        Ok(match f {
            Func::Sin => self.sin(),
            Func::Cos => self.cos(),
            Func::Tan => self.tan(),
            Func::Exp => self.exp(),
            Func::Log => self.ln(),
            Func::Sqrt => self.sqrt(),
        })
    }
    fn powf(self, c: f64) -> Result<Self, EvalError> {
        check_pow_base(self, c, false)?;
        match integer_exponent(c) {
            Some(n) => powi_by_squaring(self, n),
            None => Ok(self.powf(c)),
        }
    }
}

/// Value and first four derivatives of a univariate function at a point.
///
/// Entries are derivative values `f, f′, f″, f‴, f⁗`, not Taylor
/// coefficients; the composition rules convert internally.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet4(pub [f64; 5]);

const FACTORIAL: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];

impl Jet4 {
    pub fn variable(at: f64) -> Jet4 {
        Jet4([at, 1.0, 0.0, 0.0, 0.0])
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// `k`-th derivative value, `k` in 0..=4.
    pub fn derivative(&self, k: usize) -> f64 {
        self.0[k]
    }

    fn to_taylor(self) -> [f64; 5] {
        let mut c = self.0;
        for (ck, f) in c.iter_mut().zip(FACTORIAL) {
            *ck /= f;
        }
        c
    }

    fn from_taylor(mut c: [f64; 5]) -> Jet4 {
        for (ck, f) in c.iter_mut().zip(FACTORIAL) {
            *ck *= f;
        }
        Jet4(c)
    }
}

// Truncated power-series recurrences on Taylor coefficients.
mod series {
    pub type S = [f64; 5];

    pub fn mul(a: &S, b: &S) -> S {
        let mut c = [0.0; 5];
        for k in 0..5 {
            for i in 0..=k {
                c[k] += a[i] * b[k - i];
            }
        }
        c
    }

    pub fn div(a: &S, b: &S) -> S {
        let mut c = [0.0; 5];
        for k in 0..5 {
            let mut acc = a[k];
            for i in 1..=k {
                acc -= b[i] * c[k - i];
            }
            c[k] = acc / b[0];
        }
        c
    }

    pub fn exp(a: &S) -> S {
        let mut e = [0.0; 5];
        e[0] = a[0].exp();
        for k in 1..5 {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * a[j] * e[k - j];
            }
            e[k] = acc / k as f64;
        }
        e
    }

    pub fn log(a: &S) -> S {
        let mut l = [0.0; 5];
        l[0] = a[0].ln();
        for k in 1..5 {
            let mut acc = a[k];
            for j in 1..k {
                acc -= j as f64 * l[j] * a[k - j] / k as f64;
            }
            l[k] = acc / a[0];
        }
        l
    }

    pub fn sin_cos(a: &S) -> (S, S) {
        let mut s = [0.0; 5];
        let mut c = [0.0; 5];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for k in 1..5 {
            let (mut sa, mut ca) = (0.0, 0.0);
            for j in 1..=k {
                let ja = j as f64 * a[j];
                sa += ja * c[k - j];
                ca -= ja * s[k - j];
            }
            s[k] = sa / k as f64;
            c[k] = ca / k as f64;
        }
        (s, c)
    }

    /// From `tan′ = (1 + tan²)·a′`.
    pub fn tan(a: &S) -> S {
        let mut t = [0.0; 5];
        let mut sec2 = [0.0; 5];
        t[0] = a[0].tan();
        sec2[0] = 1.0 + t[0] * t[0];
        for k in 1..5 {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * a[j] * sec2[k - j];
            }
            t[k] = acc / k as f64;
            sec2[k] = (0..=k).map(|j| t[j] * t[k - j]).sum();
        }
        t
    }

    pub fn sqrt(a: &S) -> S {
        let mut r = [0.0; 5];
        r[0] = a[0].sqrt();
        for k in 1..5 {
            let mut acc = a[k];
            for j in 1..k {
                acc -= r[j] * r[k - j];
            }
            r[k] = acc / (2.0 * r[0]);
        }
        r
    }

    /// `a^c` for real `c`, requires `a[0] != 0`.
    pub fn pow(a: &S, c: f64) -> S {
        let mut p = [0.0; 5];
        p[0] = a[0].powf(c);
        for k in 1..5 {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += ((c + 1.0) * j as f64 - k as f64) * a[j] * p[k - j];
            }
            p[k] = acc / (k as f64 * a[0]);
        }
        p
    }
}

impl Scalar for Jet4 {
    fn constant(c: f64) -> Self {
        Jet4([c, 0.0, 0.0, 0.0, 0.0])
    }
    fn value(&self) -> f64 {
        self.0[0]
    }
    fn add(self, o: Self) -> Self {
        Jet4(std::array::from_fn(|k| self.0[k] + o.0[k]))
    }
    fn sub(self, o: Self) -> Self {
        Jet4(std::array::from_fn(|k| self.0[k] - o.0[k]))
    }
    fn mul(self, o: Self) -> Self {
        Jet4::from_taylor(series::mul(&self.to_taylor(), &o.to_taylor()))
    }
    fn neg(self) -> Self {
        Jet4(self.0.map(|x| -x))
    }
    fn div(self, o: Self) -> Result<Self, EvalError> {
        if o.0[0] == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        Ok(Jet4::from_taylor(series::div(&self.to_taylor(), &o.to_taylor())))
    }
    fn apply(self, f: Func) -> Result<Self, EvalError> {
        check_func_domain(f, self.0[0], true)?;
        let a = self.to_taylor();
        let out = match f {
            Func::Sin => series::sin_cos(&a).0,
            Func::Cos => series::sin_cos(&a).1,
            Func::Tan => series::tan(&a),
            Func::Exp => series::exp(&a),
            Func::Log => series::log(&a),
            Func::Sqrt => series::sqrt(&a),
        };
        Ok(Jet4::from_taylor(out))
    }
    fn powf(self, c: f64) -> Result<Self, EvalError> {
        check_pow_base(self.0[0], c, true)?;
        match integer_exponent(c) {
            Some(n) => powi_by_squaring(self, n),
            None => Ok(Jet4::from_taylor(series::pow(&self.to_taylor(), c))),
        }
    }
}

/// Value and the three first partials ∂/∂s, ∂/∂t, ∂/∂q.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grad3 {
    pub value: f64,
    pub d_s: f64,
    pub d_t: f64,
    pub d_q: f64,
}

impl Grad3 {
    fn with(value: f64, d: [f64; 3]) -> Grad3 {
        Grad3 {
            value,
            d_s: d[0],
            d_t: d[1],
            d_q: d[2],
        }
    }

    pub fn partials(&self) -> [f64; 3] {
        [self.d_s, self.d_t, self.d_q]
    }

    /// Chain rule: `g(self)` with `g(value) = gv` and `g′(value) = dg`.
    fn chain(self, gv: f64, dg: f64) -> Grad3 {
        Grad3::with(gv, self.partials().map(|d| dg * d))
    }
}

impl Scalar for Grad3 {
    fn constant(c: f64) -> Self {
        Grad3::with(c, [0.0; 3])
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn add(self, o: Self) -> Self {
        let (a, b) = (self.partials(), o.partials());
        Grad3::with(self.value + o.value, std::array::from_fn(|i| a[i] + b[i]))
    }
    fn sub(self, o: Self) -> Self {
        let (a, b) = (self.partials(), o.partials());
        Grad3::with(self.value - o.value, std::array::from_fn(|i| a[i] - b[i]))
    }
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self.partials(), o.partials());
        Grad3::with(
            self.value * o.value,
            std::array::from_fn(|i| a[i] * o.value + self.value * b[i]),
        )
    }
    fn neg(self) -> Self {
        Grad3::with(-self.value, self.partials().map(|d| -d))
    }
    fn div(self, o: Self) -> Result<Self, EvalError> {
        if o.value == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        let q = self.value / o.value;
        let (a, b) = (self.partials(), o.partials());
        Ok(Grad3::with(
            q,
            std::array::from_fn(|i| (a[i] - q * b[i]) / o.value),
        ))
    }
    fn apply(self, f: Func) -> Result<Self, EvalError> {
        let x = self.value;
        check_func_domain(f, x, true)?;
        Ok(match f {
            Func::Sin => self.chain(x.sin(), x.cos()),
            Func::Cos => self.chain(x.cos(), -x.sin()),
            Func::Tan => {
                let t = x.tan();
                self.chain(t, 1.0 + t * t)
            }
            Func::Exp => {
                let e = x.exp();
                self.chain(e, e)
            }
            Func::Log => self.chain(x.ln(), 1.0 / x),
            Func::Sqrt => {
                let r = x.sqrt();
                self.chain(r, 0.5 / r)
            }
        })
    }
    fn powf(self, c: f64) -> Result<Self, EvalError> {
        check_pow_base(self.value, c, true)?;
        match integer_exponent(c) {
            Some(n) => powi_by_squaring(self, n),
            None => {
                let p = self.value.powf(c);
                Ok(self.chain(p, c * self.value.powf(c - 1.0)))
            }
        }
    }
}
