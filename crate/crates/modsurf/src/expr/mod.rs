//! Analytic expressions in one complex variable.
//!
//! An [`Expr`] is an immutable AST over the variable `z`, complex literals,
//! arithmetic, integer and general (complex-exponent) powers, and the named
//! functions `exp`, `log`, `sqrt`, `sin`, `cos`, `sinh`, `cosh`. The text
//! grammar is what the CLI and config files accept; `Display` prints a
//! canonical form that parses back to a structurally identical tree.
//!
//! Grammar notes:
//! - `^` binds tightest and its right operand must be a numeric literal
//!   (integer, decimal, imaginary like `3i`, or a parenthesized complex
//!   literal like `(1+3i)`). Rational exponent syntax such as `(2/3)` is
//!   rejected; write the decimal instead.
//! - no implicit multiplication: `2z` is an error, write `2*z`.
//! - `i` is the imaginary unit, `z` the variable; `e` is reserved
//!   (use `exp(1)`).

mod parse;

pub use parse::{parse, ParseDiagnostic};

use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

/// Named analytic functions available in the expression language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Sinh,
    Cosh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            _ => return None,
        })
    }
}

/// An analytic expression of the single variable `z`.
///
/// Sub-trees are shared via `Arc`, so clones are cheap and the tree is safe
/// to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// The variable `z`.
    Var,
    /// A complex literal with exactly the parsed real/imaginary parts.
    Const(Complex64),
    Neg(Arc<Expr>),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    /// Integer power, evaluated algebraically (no branch cut).
    PowInt(Arc<Expr>, i32),
    /// General power with a complex literal exponent, evaluated as
    /// `exp(c*log(base))` on a chosen branch of the logarithm.
    Pow(Arc<Expr>, Complex64),
    App(Func, Arc<Expr>),
}

#[allow(clippy::should_implement_trait)] // builders named after the nodes
impl Expr {
    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn constant(c: Complex64) -> Expr {
        Expr::Const(c)
    }

    pub fn real(x: f64) -> Expr {
        Expr::Const(Complex64::new(x, 0.0))
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::Neg(Arc::new(e))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Arc::new(a), Arc::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Arc::new(a), Arc::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Arc::new(a), Arc::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Arc::new(a), Arc::new(b))
    }

    pub fn pow_int(base: Expr, n: i32) -> Expr {
        Expr::PowInt(Arc::new(base), n)
    }

    pub fn app(f: Func, arg: Expr) -> Expr {
        Expr::App(f, Arc::new(arg))
    }

    /// Power with a literal exponent. Routes integral real exponents to
    /// [`Expr::PowInt`] so the algebraic (branch-free) semantics apply.
    pub fn pow_literal(base: Expr, c: Complex64) -> Expr {
        if c.im == 0.0 && c.re.fract() == 0.0 && c.re.abs() <= i32::MAX as f64 {
            Expr::PowInt(Arc::new(base), c.re as i32)
        } else {
            Expr::Pow(Arc::new(base), c)
        }
    }

    /// Number of nodes in the tree.
    pub fn node_count(&self) -> usize {
        match self {
            Expr::Var | Expr::Const(_) => 1,
            Expr::Neg(a) | Expr::PowInt(a, _) | Expr::Pow(a, _) | Expr::App(_, a) => {
                1 + a.node_count()
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.node_count() + b.node_count()
            }
        }
    }

    /// Number of branch-sensitive nodes (`log`, `sqrt`, general powers),
    /// counted in a fixed depth-first order. Branch assignments index into
    /// this ordering.
    pub fn branchy_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |e| {
            if matches!(e, Expr::Pow(..) | Expr::App(Func::Log, _) | Expr::App(Func::Sqrt, _)) {
                n += 1;
            }
        });
        n
    }

    fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Var | Expr::Const(_) => {}
            Expr::Neg(a) | Expr::PowInt(a, _) | Expr::Pow(a, _) | Expr::App(_, a) => {
                a.visit(f);
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }
}

// Printing precedence levels: additive 1, multiplicative 2, unary minus 3,
// power 4, atoms 5. A constant with a leading minus sign prints like a
// unary-minus expression; a full complex constant prints its own parens and
// therefore behaves like an atom.
fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::PowInt(..) | Expr::Pow(..) => 4,
        Expr::Var | Expr::App(..) => 5,
        Expr::Const(c) => {
            if c.re != 0.0 && c.im != 0.0 {
                5
            } else if c.re < 0.0 || (c.re == 0.0 && c.im < 0.0) {
                3
            } else {
                5
            }
        }
    }
}

fn fmt_child(f: &mut fmt::Formatter<'_>, child: &Expr, min_prec: u8) -> fmt::Result {
    if prec(child) < min_prec {
        write!(f, "({})", child)
    } else {
        write!(f, "{}", child)
    }
}

fn fmt_const(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    if c.im == 0.0 {
        write!(f, "{}", c.re)
    } else if c.re == 0.0 {
        if c.im == 1.0 {
            write!(f, "i")
        } else if c.im == -1.0 {
            write!(f, "-i")
        } else {
            write!(f, "{}i", c.im)
        }
    } else if c.im < 0.0 {
        write!(f, "({}-{}i)", c.re, -c.im)
    } else {
        write!(f, "({}+{}i)", c.re, c.im)
    }
}

fn fmt_exponent(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    // A general-power exponent that happens to be an integral real must not
    // print as a bare integer, or it would reparse as an integer power.
    if c.im == 0.0 && c.re.fract() == 0.0 && c.re.is_finite() {
        write!(f, "{:.1}", c.re)
    } else {
        fmt_const(f, c)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var => write!(f, "z"),
            Expr::Const(c) => fmt_const(f, *c),
            Expr::Neg(a) => {
                write!(f, "-")?;
                fmt_child(f, a, 3)
            }
            Expr::Add(a, b) => {
                fmt_child(f, a, 1)?;
                write!(f, "+")?;
                fmt_child(f, b, 2)
            }
            Expr::Sub(a, b) => {
                fmt_child(f, a, 1)?;
                write!(f, "-")?;
                fmt_child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                fmt_child(f, a, 2)?;
                write!(f, "*")?;
                fmt_child(f, b, 3)
            }
            Expr::Div(a, b) => {
                fmt_child(f, a, 2)?;
                write!(f, "/")?;
                fmt_child(f, b, 3)
            }
            Expr::PowInt(base, n) => {
                fmt_child(f, base, 5)?;
                write!(f, "^{}", n)
            }
            Expr::Pow(base, c) => {
                fmt_child(f, base, 5)?;
                write!(f, "^")?;
                fmt_exponent(f, *c)
            }
            Expr::App(func, arg) => write!(f, "{}({})", func.name(), arg),
        }
    }
}
