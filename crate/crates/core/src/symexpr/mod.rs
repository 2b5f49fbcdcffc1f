//! Scalar expressions over named coordinates.
//!
//! Two representations live here. [`Expr`] is the syntax tree produced by the
//! parser and consumed by the printer. [`Poly`] is the canonical form: a
//! polynomial with exact rational coefficients whose indeterminates are
//! variables and opaque atoms (`sin(..)`, `exp(..)`, radicals, reciprocals of
//! sums). Everything downstream (forms, algebroids) computes with `Poly`.
//!
//! Grammar accepted by [`parse`]:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?
//! primary := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Numbers are decimal literals and are read exactly (`0.25` is `1/4`).
//! Identifiers start with a letter or `_` and may contain letters, digits,
//! `_` and combining dot-above marks (so `ẋ1` is a valid name). `·` and `−`
//! are accepted as `*` and `-`. Known functions: `sin cos tan exp ln log sqrt`.

mod check;
pub(crate) mod parse;
mod poly;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub use check::{
    check_equal, check_zero, expr_equal, Method, NumericOptions, Sampler, Verdict, ZeroTest,
    EqualityMode,
};
pub use parse::{parse, ParseError, Token, Tokenizer};
pub use poly::{Atom, Monomial, Poly};

/// Interned variable name.
pub type Symbol = Arc<str>;

/// Exact coefficient field.
pub type Rational = num_rational::BigRational;

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn apply<T: Scalar>(self, x: T) -> Result<T, EvalError> {
        let y = match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Ln => {
                if x <= T::zero() {
                    return Err(EvalError::Domain(format!("ln of non-positive value {x}")));
                }
                x.ln()
            }
            Func::Sqrt => {
                if x < T::zero() {
                    return Err(EvalError::Domain(format!("sqrt of negative value {x}")));
                }
                x.sqrt()
            }
        };
        finite(y, self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not bound")]
    Unbound(String),
    #[error("domain error: {0}")]
    Domain(String),
}

fn finite<T: Scalar>(y: T, what: &str) -> Result<T, EvalError> {
    if y.is_finite() {
        Ok(y)
    } else {
        Err(EvalError::Domain(format!("{what} produced a non-finite value")))
    }
}

/// `base^(p/q)` over the reals; odd roots of negative numbers are allowed.
pub(crate) fn real_pow<T: Scalar>(base: T, p: &BigInt, q: &BigInt) -> Result<T, EvalError> {
    let p = p
        .to_i32()
        .ok_or_else(|| EvalError::Domain("exponent out of range".into()))?;
    if q.is_one() {
        if base.is_zero() && p < 0 {
            return Err(EvalError::Domain("division by zero".into()));
        }
        return finite(base.powi(p), "power");
    }
    let q = q
        .to_i32()
        .ok_or_else(|| EvalError::Domain("root index out of range".into()))?;
    let root = if base < T::zero() {
        if q.is_even() {
            return Err(EvalError::Domain(format!("even root of negative value {base}")));
        }
        -(-base).powf(T::one() / T::lit(q as f64))
    } else {
        base.powf(T::one() / T::lit(q as f64))
    };
    if root.is_zero() && p < 0 {
        return Err(EvalError::Domain("division by zero".into()));
    }
    finite(root.powi(p), "power")
}

/// An assignment of values to variable names.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point<T> {
    values: BTreeMap<String, T>,
}

impl<T: Copy> Point<T> {
    pub fn new() -> Self {
        Point {
            values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: T) -> Self {
        self.values.insert(name.to_string(), value);
        self
    }

    pub fn insert(&mut self, name: &str, value: T) {
        self.values.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<T> {
        self.values.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, T)> + '_ {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<T: Copy, S: AsRef<str>> FromIterator<(S, T)> for Point<T> {
    fn from_iter<I: IntoIterator<Item = (S, T)>>(iter: I) -> Self {
        Point {
            values: iter
                .into_iter()
                .map(|(k, v)| (k.as_ref().to_string(), v))
                .collect(),
        }
    }
}

impl<T: fmt::Display + Copy> fmt::Display for Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (k, v)) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        write!(f, ")")
    }
}

/// Expression syntax tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Rational),
    Var(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(Arc::from(name))
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(integer(n))
    }

    pub fn constant(r: Rational) -> Expr {
        Expr::Const(r)
    }

    pub fn pow(self, exponent: Expr) -> Expr {
        Expr::Pow(Box::new(self), Box::new(exponent))
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::Call(func, Box::new(arg))
    }

    pub fn free_vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(s) => {
                out.insert(s.clone());
            }
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().for_each(|x| x.collect_vars(out)),
            Expr::Pow(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_vars(out),
        }
    }

    pub fn eval<T: Scalar>(&self, point: &Point<T>) -> Result<T, EvalError> {
        match self {
            Expr::Const(c) => Ok(T::from_rational(c)),
            Expr::Var(s) => point.get(s).ok_or_else(|| EvalError::Unbound(s.to_string())),
            Expr::Add(xs) => xs.iter().try_fold(T::zero(), |acc, x| Ok(acc + x.eval(point)?)),
            Expr::Mul(xs) => xs.iter().try_fold(T::one(), |acc, x| Ok(acc * x.eval(point)?)),
            Expr::Neg(a) => Ok(-a.eval(point)?),
            Expr::Call(f, a) => f.apply(a.eval(point)?),
            Expr::Pow(a, b) => {
                let base = a.eval(point)?;
                match Poly::from(&**b).as_constant() {
                    Some(r) => real_pow(base, r.numer(), r.denom()),
                    None => {
                        let e = b.eval(point)?;
                        if base < T::zero() || (base.is_zero() && e <= T::zero()) {
                            return Err(EvalError::Domain(format!(
                                "{base} raised to non-constant power {e}"
                            )));
                        }
                        finite(base.powf(e), "power")
                    }
                }
            }
        }
    }

    /// Partial derivative, returned in canonical form.
    pub fn diff(&self, var: &str) -> Expr {
        Poly::from(self).diff(var).to_expr()
    }

    /// Canonical form: polynomial parts expanded with like terms collected.
    pub fn simplify(&self) -> Expr {
        Poly::from(self).to_expr()
    }
}

/// Value of a literal exponent, allowing a leading sign.
fn constant_value(e: &Expr) -> Option<Rational> {
    match e {
        Expr::Const(c) => Some(c.clone()),
        Expr::Neg(a) => constant_value(a).map(|c| -c),
        _ => None,
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(vec![self, rhs])
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Add(vec![self, Expr::Neg(Box::new(rhs))])
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(vec![self, rhs])
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Mul(vec![self, rhs.pow(Expr::int(-1))])
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

// Printing. Precedence: sum 1, product 2, unary minus 3, power 4, atom 5.

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(xs) if xs.len() > 1 => 1,
        Expr::Add(xs) => xs.first().map_or(5, precedence),
        Expr::Mul(xs) if xs.len() > 1 => 2,
        Expr::Mul(xs) => xs.first().map_or(5, precedence),
        Expr::Const(c) if !c.is_integer() => 2,
        Expr::Const(c) if c.is_negative() => 3,
        Expr::Neg(_) => 3,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

fn write_prec(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn negative_exponent(e: &Expr) -> Option<Rational> {
    match e {
        Expr::Pow(_, b) => constant_value(b).filter(|c| c.is_negative()),
        _ => None,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_integer() {
                    write!(f, "{}", c.numer())
                } else {
                    write!(f, "{}/{}", c.numer(), c.denom())
                }
            }
            Expr::Var(s) => write!(f, "{s}"),
            Expr::Add(xs) => {
                if xs.is_empty() {
                    return write!(f, "0");
                }
                for (i, x) in xs.iter().enumerate() {
                    match (i, x) {
                        (0, _) => write_prec(f, x, 2)?,
                        (_, Expr::Neg(inner)) => {
                            write!(f, " - ")?;
                            write_prec(f, inner, 2)?;
                        }
                        _ => {
                            write!(f, " + ")?;
                            write_prec(f, x, 2)?;
                        }
                    }
                }
                Ok(())
            }
            Expr::Mul(xs) => {
                if xs.is_empty() {
                    return write!(f, "1");
                }
                for (i, x) in xs.iter().enumerate() {
                    match (negative_exponent(x), x) {
                        (Some(r), Expr::Pow(base, _)) => {
                            if i == 0 {
                                write!(f, "1")?;
                            }
                            write!(f, "/")?;
                            if r == -Rational::one() {
                                write_prec(f, base, 5)?;
                            } else {
                                write_prec(f, base, 5)?;
                                write!(f, "^")?;
                                write_exponent(f, &Expr::Const(-r))?;
                            }
                        }
                        _ => {
                            if i > 0 {
                                write!(f, "*")?;
                            }
                            // a leading unary minus binds looser than '*'
                            write_prec(f, x, if i == 0 { 3 } else { 4 })?;
                        }
                    }
                }
                Ok(())
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                write_prec(f, a, 4)
            }
            Expr::Pow(a, b) => {
                write_prec(f, a, 5)?;
                write!(f, "^")?;
                write_exponent(f, b)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

fn write_exponent(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e {
        Expr::Const(c) if c.is_integer() => write!(f, "{}", c.numer()),
        Expr::Neg(inner) if matches!(**inner, Expr::Const(ref c) if c.is_integer()) => {
            write!(f, "{e}")
        }
        _ => write_prec(f, e, 5),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_respects_precedence() {
        let e = parse("2 + 3*x^2 - x/4").unwrap();
        let p = Point::new().with("x", 2.0);
        assert_eq!(e.eval(&p).unwrap(), 2.0 + 12.0 - 0.5);
    }

    #[test]
    fn unbound_variable_is_reported() {
        let e = parse("x*y").unwrap();
        let p = Point::new().with("x", 1.0);
        assert_eq!(e.eval(&p), Err(EvalError::Unbound("y".into())));
    }

    #[test]
    fn domain_errors_are_declared() {
        let p = Point::new().with("x", -1.0);
        assert!(matches!(parse("ln(x)").unwrap().eval(&p), Err(EvalError::Domain(_))));
        assert!(matches!(parse("sqrt(x)").unwrap().eval(&p), Err(EvalError::Domain(_))));
        assert!(matches!(parse("1/(x+1)").unwrap().eval(&p), Err(EvalError::Domain(_))));
        // odd roots of negative numbers are real
        let cube = parse("x^(1/3)").unwrap().eval(&p).unwrap();
        assert!((cube + 1.0).abs() < 1e-12);
    }

    #[test]
    fn f32_evaluation() {
        let e = parse("sin(x)^2 + cos(x)^2").unwrap();
        let p = Point::new().with("x", 0.7f32);
        assert!((e.eval(&p).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn printing_is_parseable() {
        for src in [
            "x1*x2 + 3",
            "-x^2",
            "(a + b)^2",
            "a/(b*c)",
            "2^-1",
            "x^(1/2) - sin(-y)",
            "-(a - b)*c",
        ] {
            let e = parse(src).unwrap();
            let printed = e.to_string();
            let again = parse(&printed).unwrap().to_string();
            assert_eq!(printed, again, "source {src}");
        }
    }
}
