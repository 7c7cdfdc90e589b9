//! Scalar expression language over the variables `s`, `t`, `q`.
//!
//! Curves and marching-scale functions are written as strings in this
//! language, parsed once into an immutable [`Expr`], and evaluated either
//! as plain reals, as fourth-order jets in `s` ([`Jet4`]) or with first
//! partials in all three variables ([`Grad3`]).
//!
//! Besides the variables the language knows the constant `pi` and the
//! anchor parameters `t0`, `q0`. Anchors must be bound to numbers with
//! [`Expr::bind_anchors`] before evaluation.
//!
//! ```
//! use isogeo4::expr::{parse, eval_jet_s};
//! let e = parse("s^3").unwrap();
//! assert_eq!(eval_jet_s(&e, 2.0, 0.0, 0.0).unwrap().0, [8.0, 12.0, 12.0, 6.0, 0.0]);
//! ```

mod ast;
mod number;
mod parse;

use thiserror::Error;

pub use ast::{Anchor, BinOp, Expr, Func, Var};
pub use number::{Grad3, Jet4};
pub use parse::{parse, parse_in, ParseError};

use number::Scalar;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error: {op} undefined at {arg}")]
    Domain { op: &'static str, arg: f64 },
    #[error("domain error: division by zero")]
    DivisionByZero,
    #[error("domain error: non-finite result")]
    NonFinite,
    #[error("anchor `{0}` is not bound")]
    UnboundAnchor(&'static str),
}

fn eval_generic<N: Scalar>(e: &Expr, leaf: &dyn Fn(Var) -> N) -> Result<N, EvalError> {
    let out = match e {
        Expr::Const(c) => N::constant(*c),
        Expr::Pi => number::pi(),
        Expr::Var(v) => leaf(*v),
        Expr::Anchor(a) => return Err(EvalError::UnboundAnchor(a.name())),
        Expr::Neg(a) => eval_generic(a, leaf)?.neg(),
        Expr::Call(f, a) => eval_generic(a, leaf)?.apply(*f)?,
        Expr::Binary(BinOp::Pow, a, b) => {
            // Exponents never reference variables, so a plain evaluation suffices.
            let c = eval_generic::<f64>(b, &|_| 0.0)?;
            eval_generic(a, leaf)?.powf(c)?
        }
        Expr::Binary(op, a, b) => {
            let x = eval_generic(a, leaf)?;
            let y = eval_generic(b, leaf)?;
            match op {
                BinOp::Add => x.add(y),
                BinOp::Sub => x.sub(y),
                BinOp::Mul => x.mul(y),
                BinOp::Div => x.div(y)?,
                BinOp::Pow => unreachable!(),
            }
        }
    };
    if out.value().is_finite() {
        Ok(out)
    } else {
        Err(EvalError::NonFinite)
    }
}

/// Plain real evaluation.
pub fn eval(e: &Expr, s: f64, t: f64, q: f64) -> Result<f64, EvalError> {
    eval_generic(e, &|v| match v {
        Var::S => s,
        Var::T => t,
        Var::Q => q,
    })
}

/// Value and the first four derivatives in `s`, with `t` and `q` held fixed.
pub fn eval_jet_s(e: &Expr, s: f64, t: f64, q: f64) -> Result<Jet4, EvalError> {
    let jet = eval_generic(e, &|v| match v {
        Var::S => Jet4::variable(s),
        Var::T => Jet4::constant(t),
        Var::Q => Jet4::constant(q),
    })?;
    if jet.0.iter().all(|x| x.is_finite()) {
        Ok(jet)
    } else {
        Err(EvalError::NonFinite)
    }
}

/// Value and exact first partials in `s`, `t` and `q`.
pub fn eval_grad3(e: &Expr, s: f64, t: f64, q: f64) -> Result<Grad3, EvalError> {
    let seed = |x: f64, i: usize| {
        let mut d = [0.0; 3];
        d[i] = 1.0;
        Grad3 {
            value: x,
            d_s: d[0],
            d_t: d[1],
            d_q: d[2],
        }
    };
    let g = eval_generic(e, &|v| match v {
        Var::S => seed(s, 0),
        Var::T => seed(t, 1),
        Var::Q => seed(q, 2),
    })?;
    if g.partials().iter().all(|x| x.is_finite()) {
        Ok(g)
    } else {
        Err(EvalError::NonFinite)
    }
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        parse(text)
    }

    pub fn eval(&self, s: f64, t: f64, q: f64) -> Result<f64, EvalError> {
        eval(self, s, t, q)
    }

    pub fn eval_jet_s(&self, s: f64, t: f64, q: f64) -> Result<Jet4, EvalError> {
        eval_jet_s(self, s, t, q)
    }

    pub fn eval_grad3(&self, s: f64, t: f64, q: f64) -> Result<Grad3, EvalError> {
        eval_grad3(self, s, t, q)
    }
}
