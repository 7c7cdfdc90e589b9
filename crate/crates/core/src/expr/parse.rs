//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' factor)?
//! atom   := number | 'pi' | var | anchor | func '(' expr ')' | '(' expr ')'
//! ```

use thiserror::Error;

use super::ast::{Anchor, BinOp, Expr, Func, Var};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => {
                *offset
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(x) => format!("number {x}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit = &text[start..i];
                let value = lit.parse::<f64>().map_err(|_| ParseError::Syntax {
                    offset: start,
                    expected: "a number".into(),
                    found: format!("`{lit}`"),
                })?;
                out.push((start, Tok::Num(value)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: start,
                    expected: "an expression token".into(),
                    found: format!("`{ch}`"),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    allowed: &'a [Var],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.to_string(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let exponent = self.factor()?;
        if let Some(v) = exponent.variables().into_iter().next() {
            return Err(ParseError::Syntax {
                offset: at,
                expected: "a constant exponent".into(),
                found: format!("exponent depending on `{v}`"),
            });
        }
        Ok(Expr::binary(BinOp::Pow, base, exponent))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (offset, tok) = self.bump();
        match tok {
            Tok::Num(x) => Ok(Expr::Const(x)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => self.identifier(offset, name),
            other => {
                // Report at the offending token, not after it.
                self.pos -= usize::from(other != Tok::End);
                Err(self.error("a number, variable, function call or `(`"))
            }
        }
    }

    fn identifier(&mut self, offset: usize, name: String) -> Result<Expr, ParseError> {
        if let Some(func) = Func::from_name(&name) {
            self.expect(Tok::LParen, "`(`")?;
            let arg = self.expr()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Expr::call(func, arg));
        }
        match name.as_str() {
            "pi" => return Ok(Expr::Pi),
            "t0" => return Ok(Expr::Anchor(Anchor::T0)),
            "q0" => return Ok(Expr::Anchor(Anchor::Q0)),
            _ => {}
        }
        match Var::from_name(&name) {
            Some(v) if self.allowed.contains(&v) => Ok(Expr::Var(v)),
            _ => Err(ParseError::UnknownIdentifier { offset, name }),
        }
    }
}

/// Parse with all of `s`, `t`, `q` declared.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_in(text, &Var::ALL)
}

/// Parse, rejecting variables outside `allowed` as unknown identifiers.
pub fn parse_in(text: &str, allowed: &[Var]) -> Result<Expr, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        allowed,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("an operator or end of input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Expr {
        Expr::Const(x)
    }

    #[test]
    fn simple_product() {
        let e = parse("0.5*cos(s)").unwrap();
        assert_eq!(
            e,
            Expr::binary(BinOp::Mul, c(0.5), Expr::call(Func::Cos, Expr::Var(Var::S)))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        // 1 - 2 - 3 is (1 - 2) - 3
        let e = parse("1 - 2 - 3").unwrap();
        assert_eq!(
            e,
            Expr::binary(BinOp::Sub, Expr::binary(BinOp::Sub, c(1.0), c(2.0)), c(3.0))
        );
        // 2^3^2 is 2^(3^2)
        let e = parse("2^3^2").unwrap();
        assert_eq!(
            e,
            Expr::binary(BinOp::Pow, c(2.0), Expr::binary(BinOp::Pow, c(3.0), c(2.0)))
        );
        // -2^2 is -(2^2)
        let e = parse("-2^2").unwrap();
        assert_eq!(
            e,
            Expr::Neg(Box::new(Expr::binary(BinOp::Pow, c(2.0), c(2.0))))
        );
        // a*b+c
        let e = parse("s*t+q").unwrap();
        assert!(matches!(e, Expr::Binary(BinOp::Add, _, _)));
    }

    #[test]
    fn unbalanced_paren() {
        let err = parse("sin(s").unwrap_err();
        match err {
            ParseError::Syntax {
                offset, expected, ..
            } => {
                assert_eq!(offset, 5);
                assert_eq!(expected, "`)`");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn undeclared_variables() {
        let err = parse_in("sin(t)", &[Var::S]).unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownIdentifier {
                offset: 4,
                name: "t".into()
            }
        );
        assert!(matches!(
            parse("foo + 1"),
            Err(ParseError::UnknownIdentifier { offset: 0, .. })
        ));
    }

    #[test]
    fn variable_exponent_rejected() {
        assert!(matches!(parse("2^s"), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(parse("s^(1/2)").is_ok());
        assert!(parse("s^t0").is_ok());
    }

    #[test]
    fn misc_errors() {
        assert!(matches!(parse(""), Err(ParseError::Syntax { offset: 0, .. })));
        assert!(matches!(parse("1 +"), Err(ParseError::Syntax { offset: 3, .. })));
        assert!(matches!(parse("1 2"), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("s $ t"), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse(")"), Err(ParseError::Syntax { offset: 0, .. })));
        assert!(matches!(parse("sin s"), Err(ParseError::Syntax { offset: 4, .. })));
    }

    #[test]
    fn scientific_literals() {
        assert_eq!(parse("1e-3").unwrap(), c(1e-3));
        assert_eq!(parse("2.5E+2").unwrap(), c(250.0));
        // `e` without digits is left for the identifier lexer.
        assert!(parse("2e").is_err());
    }

    #[test]
    fn anchors_parse() {
        let e = parse("(t - t0)*(q - q0)").unwrap();
        assert_eq!(e.anchors().len(), 2);
    }
}
