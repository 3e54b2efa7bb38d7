//! Recursive-descent parser for the expression grammar.
//!
//! Precedence, tightest first: `^` (right operand restricted to literals),
//! unary `-`, `*` `/`, `+` `-`. Every failure is reported as a
//! [`ParseDiagnostic`] with the offending offset; the parser never panics.

use super::{Expr, Func};
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

/// A parse failure: where, what, and which tokens would have been accepted.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseDiagnostic {
    /// Offset into the source text, in bytes (equals characters for ASCII input).
    pub position: usize,
    pub message: String,
    pub expected: Vec<&'static str>,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}: {}", self.position, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseDiagnostic {}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Num { value: f64, is_int: bool, imag: bool },
    Z,
    ImagUnit,
    Func(Func),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

#[derive(Debug, Clone, Copy)]
struct Spanned {
    tok: Tok,
    pos: usize,
}

fn diag(position: usize, message: impl Into<String>, expected: &[&'static str]) -> ParseDiagnostic {
    ParseDiagnostic {
        position,
        message: message.into(),
        expected: expected.to_vec(),
    }
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseDiagnostic> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let pos = i;
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
            }
            b'+' => {
                toks.push(Spanned { tok: Tok::Plus, pos });
                i += 1;
            }
            b'-' => {
                toks.push(Spanned { tok: Tok::Minus, pos });
                i += 1;
            }
            b'*' => {
                toks.push(Spanned { tok: Tok::Star, pos });
                i += 1;
            }
            b'/' => {
                toks.push(Spanned { tok: Tok::Slash, pos });
                i += 1;
            }
            b'^' => {
                toks.push(Spanned { tok: Tok::Caret, pos });
                i += 1;
            }
            b'(' => {
                toks.push(Spanned { tok: Tok::LParen, pos });
                i += 1;
            }
            b')' => {
                toks.push(Spanned { tok: Tok::RParen, pos });
                i += 1;
            }
            b'0'..=b'9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let mut is_int = true;
                if j < bytes.len() && bytes[j] == b'.' {
                    if j + 1 >= bytes.len() || !bytes[j + 1].is_ascii_digit() {
                        return Err(diag(j, "expected digits after decimal point", &["digit"]));
                    }
                    is_int = false;
                    j += 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                // scientific notation, only when the exponent digits follow
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        is_int = false;
                        j = k;
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                    }
                }
                let text = &src[i..j];
                let value: f64 = text.parse().map_err(|_| {
                    diag(i, format!("malformed number `{text}`"), &["number"])
                })?;
                let mut imag = false;
                if j < bytes.len() && bytes[j] == b'i' {
                    // only a bare suffix: `2iz` would be `2i` then `z`
                    imag = true;
                    is_int = false;
                    j += 1;
                }
                toks.push(Spanned {
                    tok: Tok::Num { value, is_int, imag },
                    pos,
                });
                i = j;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut j = i;
                while j < bytes.len()
                    && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                let name = &src[i..j];
                let tok = match name {
                    "z" => Tok::Z,
                    "i" => Tok::ImagUnit,
                    "e" => {
                        return Err(diag(
                            pos,
                            "`e` is reserved and not predefined; write exp(1)",
                            &[],
                        ))
                    }
                    _ => match Func::from_name(name) {
                        Some(f) => Tok::Func(f),
                        None => {
                            return Err(diag(
                                pos,
                                format!("unknown identifier `{name}`"),
                                &["z", "i", "function name"],
                            ))
                        }
                    },
                };
                toks.push(Spanned { tok, pos });
                i = j;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(diag(pos, format!("unexpected character `{ch}`"), &[]));
            }
        }
    }
    toks.push(Spanned {
        tok: Tok::Eof,
        pos: src.len(),
    });
    Ok(toks)
}

const MAX_DEPTH: usize = 256;

struct Parser<'t> {
    toks: &'t [Spanned],
    at: usize,
}

/// Parse an expression, returning the AST or a diagnostic. Never panics.
pub fn parse(source: &str) -> Result<Expr, ParseDiagnostic> {
    let toks = lex(source)?;
    let mut p = Parser { toks: &toks, at: 0 };
    let e = p.expr(0)?;
    let t = p.peek();
    if t.tok != Tok::Eof {
        return Err(diag(
            t.pos,
            "unexpected trailing input (implicit multiplication is not supported)",
            &["operator", "end of input"],
        ));
    }
    Ok(e)
}

// Constant-only negation and addition fold into a single literal. This keeps
// complex literals like `(1+3i)` representable as one `Const` node, so the
// printed form of any constant reparses to the same tree.
fn mk_neg(a: Expr) -> Expr {
    if let Expr::Const(c) = a {
        return Expr::Const(-c);
    }
    Expr::Neg(Arc::new(a))
}

fn mk_add(a: Expr, b: Expr) -> Expr {
    if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
        let s = x + y;
        if s.re.is_finite() && s.im.is_finite() {
            return Expr::Const(s);
        }
    }
    Expr::Add(Arc::new(a), Arc::new(b))
}

fn mk_sub(a: Expr, b: Expr) -> Expr {
    if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
        let d = x - y;
        if d.re.is_finite() && d.im.is_finite() {
            return Expr::Const(d);
        }
    }
    Expr::Sub(Arc::new(a), Arc::new(b))
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Spanned {
        self.toks[self.at.min(self.toks.len() - 1)]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.peek();
        self.at += 1;
        t
    }

    fn expr(&mut self, depth: usize) -> Result<Expr, ParseDiagnostic> {
        if depth > MAX_DEPTH {
            return Err(diag(self.peek().pos, "expression too deeply nested", &[]));
        }
        let mut lhs = self.term(depth + 1)?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term(depth + 1)?;
                    lhs = mk_add(lhs, rhs);
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term(depth + 1)?;
                    lhs = mk_sub(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self, depth: usize) -> Result<Expr, ParseDiagnostic> {
        if depth > MAX_DEPTH {
            return Err(diag(self.peek().pos, "expression too deeply nested", &[]));
        }
        let mut lhs = self.unary(depth + 1)?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary(depth + 1)?;
                    lhs = Expr::mul(lhs, rhs);
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary(depth + 1)?;
                    lhs = Expr::div(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self, depth: usize) -> Result<Expr, ParseDiagnostic> {
        if depth > MAX_DEPTH {
            return Err(diag(self.peek().pos, "expression too deeply nested", &[]));
        }
        if self.peek().tok == Tok::Minus {
            self.bump();
            let inner = self.unary(depth + 1)?;
            return Ok(mk_neg(inner));
        }
        self.power(depth + 1)
    }

    fn power(&mut self, depth: usize) -> Result<Expr, ParseDiagnostic> {
        if depth > MAX_DEPTH {
            return Err(diag(self.peek().pos, "expression too deeply nested", &[]));
        }
        let base = self.atom(depth + 1)?;
        if self.peek().tok == Tok::Caret {
            self.bump();
            let (c, bare_int) = self.exponent()?;
            if bare_int {
                // Bare integer exponents keep algebraic power semantics.
                return Ok(Expr::PowInt(Arc::new(base), c.re as i32));
            }
            return Ok(Expr::Pow(Arc::new(base), c));
        }
        Ok(base)
    }

    /// The right operand of `^`: a signed numeric literal, or a parenthesized
    /// complex literal combined only with `+`/`-`. Anything else (a variable,
    /// `*`, `/`, a function call) is rejected so that branch handling stays
    /// analyzable. Returns the value and whether it was a bare integer token.
    fn exponent(&mut self) -> Result<(Complex64, bool), ParseDiagnostic> {
        let mut sign = 1.0;
        loop {
            let t = self.peek();
            match t.tok {
                Tok::Minus => {
                    self.bump();
                    sign = -sign;
                }
                Tok::Num { value, is_int, imag } => {
                    self.bump();
                    let v = if imag {
                        Complex64::new(0.0, sign * value)
                    } else {
                        Complex64::new(sign * value, 0.0)
                    };
                    let bare = is_int && v.im == 0.0 && v.re.abs() <= i32::MAX as f64;
                    return Ok((v, bare));
                }
                Tok::ImagUnit => {
                    self.bump();
                    return Ok((Complex64::new(0.0, sign), false));
                }
                Tok::LParen => {
                    self.bump();
                    let v = self.literal_sum()?;
                    let t = self.peek();
                    if t.tok != Tok::RParen {
                        return Err(diag(
                            t.pos,
                            "exponent must be a numeric literal; rational exponents are written as decimals",
                            &["`+`", "`-`", "`)`"],
                        ));
                    }
                    self.bump();
                    return Ok((v * sign, false));
                }
                _ => {
                    return Err(diag(
                        t.pos,
                        "exponent must be a numeric literal (integer, decimal, or complex like (1+3i))",
                        &["number", "i", "`(`", "`-`"],
                    ))
                }
            }
        }
    }

    /// `a`, `a+bi`, `-a-bi`, ... inside a parenthesized exponent.
    fn literal_sum(&mut self) -> Result<Complex64, ParseDiagnostic> {
        let mut total = self.literal_part()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    total += self.literal_part()?;
                }
                Tok::Minus => {
                    self.bump();
                    total -= self.literal_part()?;
                }
                _ => return Ok(total),
            }
        }
    }

    fn literal_part(&mut self) -> Result<Complex64, ParseDiagnostic> {
        let mut sign = 1.0;
        loop {
            let t = self.peek();
            match t.tok {
                Tok::Minus => {
                    self.bump();
                    sign = -sign;
                }
                Tok::Num { value, imag, .. } => {
                    self.bump();
                    return Ok(if imag {
                        Complex64::new(0.0, sign * value)
                    } else {
                        Complex64::new(sign * value, 0.0)
                    });
                }
                Tok::ImagUnit => {
                    self.bump();
                    return Ok(Complex64::new(0.0, sign));
                }
                _ => {
                    return Err(diag(
                        t.pos,
                        "exponent must be a numeric literal; rational exponents are written as decimals",
                        &["number", "i"],
                    ))
                }
            }
        }
    }

    fn atom(&mut self, depth: usize) -> Result<Expr, ParseDiagnostic> {
        let t = self.bump();
        match t.tok {
            Tok::Num { value, imag, .. } => Ok(Expr::Const(if imag {
                Complex64::new(0.0, value)
            } else {
                Complex64::new(value, 0.0)
            })),
            Tok::Z => Ok(Expr::Var),
            Tok::ImagUnit => Ok(Expr::Const(Complex64::new(0.0, 1.0))),
            Tok::Func(f) => {
                let open = self.peek();
                if open.tok != Tok::LParen {
                    return Err(diag(
                        open.pos,
                        format!("expected `(` after function `{}`", f.name()),
                        &["`(`"],
                    ));
                }
                self.bump();
                let arg = self.expr(depth + 1)?;
                let close = self.peek();
                if close.tok != Tok::RParen {
                    return Err(diag(close.pos, "expected closing `)`", &["`)`"]));
                }
                self.bump();
                Ok(Expr::App(f, Arc::new(arg)))
            }
            Tok::LParen => {
                let inner = self.expr(depth + 1)?;
                let close = self.peek();
                if close.tok != Tok::RParen {
                    return Err(diag(close.pos, "expected closing `)`", &["`)`"]));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Eof => Err(diag(
                t.pos,
                "unexpected end of input",
                &["number", "z", "i", "function", "`(`", "`-`"],
            )),
            _ => Err(diag(
                t.pos,
                "expected a value",
                &["number", "z", "i", "function", "`(`", "`-`"],
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str) -> Expr {
        parse(src).unwrap_or_else(|d| panic!("parse of {src:?} failed: {d}"))
    }

    #[test]
    fn grammar_identities() {
        assert_eq!(p("z^2"), Expr::pow_int(Expr::Var, 2));
        assert_eq!(
            p("sin(z)^2"),
            Expr::pow_int(Expr::app(Func::Sin, Expr::Var), 2)
        );
        assert_eq!(p("2*z"), Expr::mul(Expr::real(2.0), Expr::Var));
    }

    #[test]
    fn precedence_and_associativity() {
        // left assoc for - and /
        assert_eq!(
            p("z-1-2"),
            Expr::sub(Expr::sub(Expr::Var, Expr::real(1.0)), Expr::real(2.0))
        );
        // ^ binds tighter than unary minus
        assert_eq!(p("-z^2"), Expr::neg(Expr::pow_int(Expr::Var, 2)));
        // unary minus binds tighter than *
        assert_eq!(p("2*-z"), Expr::mul(Expr::real(2.0), Expr::neg(Expr::Var)));
    }

    #[test]
    fn example_closed_form_parses() {
        let e = p("((z-1)/(z+2))^(0.6666666666666666)");
        match e {
            Expr::Pow(base, c) => {
                assert_eq!(c, Complex64::new(0.6666666666666666, 0.0));
                assert_eq!(
                    *base,
                    Expr::div(
                        Expr::sub(Expr::Var, Expr::real(1.0)),
                        Expr::add(Expr::Var, Expr::real(2.0))
                    )
                );
            }
            other => panic!("expected a general power, got {other:?}"),
        }
    }

    #[test]
    fn rational_exponent_syntax_is_rejected_at_the_slash() {
        let err = parse("(-0.5)^(2/3) * exp(z)").unwrap_err();
        assert_eq!(err.position, 9); // the `/`
    }

    #[test]
    fn complex_exponents() {
        assert_eq!(
            p("(z+2)^(1+3i)"),
            Expr::Pow(
                Arc::new(Expr::add(Expr::Var, Expr::real(2.0))),
                Complex64::new(1.0, 3.0)
            )
        );
        assert_eq!(p("z^-2"), Expr::pow_int(Expr::Var, -2));
        assert_eq!(p("z^2.0"), Expr::Pow(Arc::new(Expr::Var), Complex64::new(2.0, 0.0)));
        assert_eq!(p("z^i"), Expr::Pow(Arc::new(Expr::Var), Complex64::new(0.0, 1.0)));
    }

    #[test]
    fn constant_folding_of_literal_sums() {
        assert_eq!(p("(1+3i)"), Expr::Const(Complex64::new(1.0, 3.0)));
        assert_eq!(p("(1-3i)"), Expr::Const(Complex64::new(1.0, -3.0)));
        // non-literal sums are left intact
        assert!(matches!(p("1+z"), Expr::Add(..)));
        // products of constants stay structural
        assert!(matches!(p("2*3"), Expr::Mul(..)));
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("2z").unwrap_err();
        assert_eq!(err.position, 1);
        let err = parse("q+1").unwrap_err();
        assert_eq!(err.position, 0);
        let err = parse("e").unwrap_err();
        assert_eq!(err.position, 0);
        let err = parse("sin z").unwrap_err();
        assert_eq!(err.position, 4);
        let err = parse("(1+2").unwrap_err();
        assert_eq!(err.position, 4);
        let err = parse("").unwrap_err();
        assert_eq!(err.position, 0);
    }

    #[test]
    fn identifiers_are_case_sensitive() {
        assert!(parse("Sin(z)").is_err());
        assert!(parse("Z").is_err());
    }
}
