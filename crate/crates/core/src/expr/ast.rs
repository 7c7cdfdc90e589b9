use std::collections::BTreeSet;
use std::fmt;

/// Free variables of the expression language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    S,
    T,
    Q,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::S, Var::T, Var::Q];

    pub fn name(self) -> &'static str {
        match self {
            Var::S => "s",
            Var::T => "t",
            Var::Q => "q",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        match name {
            "s" => Some(Var::S),
            "t" => Some(Var::T),
            "q" => Some(Var::Q),
            _ => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Anchor parameters `t0` and `q0`. They behave as constants once a family
/// binds them with [`Expr::bind_anchors`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Anchor {
    T0,
    Q0,
}

impl Anchor {
    pub fn name(self) -> &'static str {
        match self {
            Anchor::T0 => "t0",
            Anchor::Q0 => "q0",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    /// The exponent is always a constant expression (no free variables).
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

/// Scalar expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Pi,
    Var(Var),
    Anchor(Anchor),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    /// Free variables referenced anywhere in the tree.
    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Var(v) = e {
                out.insert(*v);
            }
        });
        out
    }

    pub fn anchors(&self) -> BTreeSet<Anchor> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Anchor(a) = e {
                out.insert(*a);
            }
        });
        out
    }

    pub fn references(&self, v: Var) -> bool {
        self.variables().contains(&v)
    }

    /// `true` if the tree is the literal `0` (possibly negated).
    pub fn is_literal_zero(&self) -> bool {
        match self {
            Expr::Const(c) => *c == 0.0,
            Expr::Neg(a) => a.is_literal_zero(),
            _ => false,
        }
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Neg(a) | Expr::Call(_, a) => a.visit(f),
            Expr::Binary(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Expr::Const(_) | Expr::Pi | Expr::Var(_) | Expr::Anchor(_) => {}
        }
    }

    /// Replace anchor references with the given constants.
    pub fn bind_anchors(&self, t0: f64, q0: f64) -> Expr {
        match self {
            Expr::Anchor(Anchor::T0) => Expr::Const(t0),
            Expr::Anchor(Anchor::Q0) => Expr::Const(q0),
            Expr::Const(_) | Expr::Pi | Expr::Var(_) => self.clone(),
            Expr::Neg(a) => Expr::Neg(Box::new(a.bind_anchors(t0, q0))),
            Expr::Call(func, a) => Expr::Call(*func, Box::new(a.bind_anchors(t0, q0))),
            Expr::Binary(op, a, b) => Expr::Binary(
                *op,
                Box::new(a.bind_anchors(t0, q0)),
                Box::new(b.bind_anchors(t0, q0)),
            ),
        }
    }
}

/// Fully parenthesised canonical form; it re-parses to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if c.is_sign_negative() => write!(f, "(-{:?})", -c),
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Pi => f.write_str("pi"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Anchor(a) => f.write_str(a.name()),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
