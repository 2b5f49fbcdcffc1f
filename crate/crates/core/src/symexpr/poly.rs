use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{parse, real_pow, EvalError, Expr, Func, ParseError, Point, Rational, Symbol};
use crate::scalar::Scalar;

/// An indeterminate of the canonical form.
///
/// `Root(b, q)` stands for `b^(1/q)`. With `q == 1` it is the reciprocal of a
/// non-monomial `b` and only ever carries negative exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Var(Symbol),
    Call(Func, Poly),
    Root(Poly, u32),
}

/// Sorted product of atom powers; exponents are never zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    factors: Vec<(Atom, i32)>,
}

/// Canonical sum of monomials with exact rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn factors(&self) -> &[(Atom, i32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.factors.iter().map(|(_, e)| *e as i64).sum()
    }

    /// Exponent of the plain variable `name` (0 when absent).
    pub fn exponent_of(&self, name: &str) -> i32 {
        self.factors
            .iter()
            .find_map(|(a, e)| match a {
                Atom::Var(s) if &**s == name => Some(*e),
                _ => None,
            })
            .unwrap_or(0)
    }

    fn without(&self, names: &BTreeSet<&str>) -> Monomial {
        Monomial {
            factors: self
                .factors
                .iter()
                .filter(|(a, _)| !matches!(a, Atom::Var(s) if names.contains(&**s)))
                .cloned()
                .collect(),
        }
    }
}

fn merge(a: &[(Atom, i32)], b: &[(Atom, i32)]) -> Vec<(Atom, i32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let e = a[i].1 + b[j].1;
                if e != 0 {
                    out.push((a[i].0.clone(), e));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn root_needs_fix(q: u32, e: i32) -> bool {
    if q == 1 {
        e > 0
    } else {
        e >= q as i32 || (e.unsigned_abs()).gcd(&q) > 1
    }
}

fn needs_fix(factors: &[(Atom, i32)]) -> bool {
    factors
        .iter()
        .any(|(a, e)| matches!(a, Atom::Root(_, q) if root_needs_fix(*q, *e)))
}

/// Canonical polynomial for `coef * Π atom^e`, folding radical powers back
/// into their bases where that is exact.
fn normalize(coef: Rational, factors: Vec<(Atom, i32)>) -> Poly {
    let mut sorted = factors;
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let mut merged: Vec<(Atom, i32)> = Vec::with_capacity(sorted.len());
    for (a, e) in sorted {
        match merged.last_mut() {
            Some((last, le)) if *last == a => *le += e,
            _ => merged.push((a, e)),
        }
    }
    merged.retain(|(_, e)| *e != 0);
    if !needs_fix(&merged) {
        return Poly::from_term(Monomial { factors: merged }, coef);
    }
    let mut clean = Vec::new();
    let mut extra = Poly::constant(coef);
    for (a, e) in merged {
        match a {
            Atom::Root(b, q) if root_needs_fix(q, e) => {
                let g = e.unsigned_abs().gcd(&q);
                let (q, e) = (q / g, e / g as i32);
                if q == 1 {
                    extra = &extra * &b.pow_int(e);
                } else if e >= q as i32 {
                    let (k, r) = (e.div_euclid(q as i32), e.rem_euclid(q as i32));
                    extra = &extra * &b.pow_int(k);
                    if r != 0 {
                        extra = &extra * &Poly::atom_pow(Atom::Root(b, q), r);
                    }
                } else {
                    extra = &extra * &Poly::atom_pow(Atom::Root(b, q), e);
                }
            }
            other => clean.push((other, e)),
        }
    }
    &extra * &Poly::from_term(Monomial { factors: clean }, Rational::one())
}

/// Exact `c^(1/q)` for a rational constant when it exists over the reals.
fn exact_root(c: &Rational, q: u32) -> Option<Rational> {
    let root_int = |n: &BigInt| -> Option<BigInt> {
        if n.is_negative() {
            if q.is_multiple_of(2) {
                return None;
            }
            let r = -((-n).nth_root(q));
            return (num_traits::pow(r.clone(), q as usize) == *n).then_some(r);
        }
        let r = n.nth_root(q);
        (num_traits::pow(r.clone(), q as usize) == *n).then_some(r)
    };
    Some(Rational::new(root_int(c.numer())?, root_int(c.denom())?))
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::from_term(Monomial::one(), c)
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn var(name: &str) -> Self {
        Poly::atom_pow(Atom::Var(Arc::from(name)), 1)
    }

    pub fn symbol(name: &Symbol) -> Self {
        Poly::atom_pow(Atom::Var(name.clone()), 1)
    }

    pub fn from_term(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    fn atom_pow(a: Atom, e: i32) -> Self {
        if e == 0 {
            return Poly::one();
        }
        Poly::from_term(
            Monomial {
                factors: vec![(a, e)],
            },
            Rational::one(),
        )
    }

    pub fn parse(src: &str) -> Result<Poly, ParseError> {
        Ok(Poly::from(&parse(src)?))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// No terms at all; the same as [`Poly::is_zero`].
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// True when every atom is a variable with a non-negative exponent.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|m| {
            m.factors
                .iter()
                .all(|(a, e)| matches!(a, Atom::Var(_)) && *e > 0)
        })
    }

    pub fn free_vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Symbol>) {
        for m in self.terms.keys() {
            for (a, _) in &m.factors {
                match a {
                    Atom::Var(s) => {
                        out.insert(s.clone());
                    }
                    Atom::Call(_, p) | Atom::Root(p, _) => p.collect_vars(out),
                }
            }
        }
    }

    pub fn depends_on(&self, name: &str) -> bool {
        self.terms
            .keys()
            .any(|m| m.factors.iter().any(|(a, _)| atom_depends_on(a, name)))
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &Poly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    fn add_scaled_into(&mut self, other: Poly) {
        for (m, c) in other.terms {
            self.add_term(m, c);
        }
    }

    pub fn pow_int(&self, n: i32) -> Poly {
        if n == 0 {
            return Poly::one();
        }
        if n < 0 {
            return self.reciprocal().pow_int(-n);
        }
        let mut base = self.clone();
        let mut acc = Poly::one();
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `1/self`. Division by the zero polynomial yields the atom `0^(-1)`,
    /// which fails at evaluation with a domain error.
    pub fn reciprocal(&self) -> Poly {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            let inv: Vec<(Atom, i32)> = m.factors.iter().map(|(a, e)| (a.clone(), -e)).collect();
            return normalize(c.recip(), inv);
        }
        if self.is_zero() {
            return Poly::atom_pow(Atom::Root(Poly::zero(), 1), -1);
        }
        // pull the leading coefficient out so that 1/(2x+2) and 1/(x+1)/2 agree
        let lead = self.terms.values().next().unwrap().clone();
        let base = self.scale(&lead.recip());
        Poly::atom_pow(Atom::Root(base, 1), -1).scale(&lead.recip())
    }

    pub fn pow_rational(&self, r: &Rational) -> Poly {
        let (Some(p), Some(q)) = (r.numer().to_i32(), r.denom().to_u32()) else {
            // absurd exponents stay symbolic via exp/ln
            return Poly::from(&Expr::call(
                Func::Exp,
                Expr::Mul(vec![Expr::Const(r.clone()), Expr::call(Func::Ln, self.to_expr())]),
            ));
        };
        if q == 1 {
            return self.pow_int(p);
        }
        if let Some(c) = self.as_constant() {
            if let Some(root) = exact_root(&c, q) {
                return Poly::constant(root).pow_int(p);
            }
        }
        normalize(Rational::one(), vec![(Atom::Root(self.clone(), q), p)])
    }

    pub fn apply_func(f: Func, arg: Poly) -> Poly {
        if let Some(c) = arg.as_constant() {
            if c.is_zero() {
                match f {
                    Func::Sin | Func::Tan | Func::Sqrt => return Poly::zero(),
                    Func::Cos | Func::Exp => return Poly::one(),
                    Func::Ln => {}
                }
            }
            if c.is_one() && f == Func::Ln {
                return Poly::zero();
            }
        }
        match f {
            Func::Sqrt => arg.pow_rational(&Rational::new(BigInt::one(), BigInt::from(2))),
            _ => Poly::atom_pow(Atom::Call(f, arg), 1),
        }
    }

    /// Partial derivative with respect to the variable `name`.
    pub fn diff(&self, name: &str) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (i, (a, e)) in m.factors.iter().enumerate() {
                if !atom_depends_on(a, name) {
                    continue;
                }
                let inner = atom_diff(a, name);
                if inner.is_zero() {
                    continue;
                }
                let mut rest = m.factors.clone();
                if *e == 1 {
                    rest.remove(i);
                } else {
                    rest[i].1 -= 1;
                }
                let coef = c * Rational::from_integer(BigInt::from(*e));
                let term = normalize(coef, rest);
                out.add_scaled_into(&term * &inner);
            }
        }
        out
    }

    /// Simultaneous substitution of variables; unmapped variables stay.
    pub fn subs(&self, map: &BTreeMap<Symbol, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut acc = Poly::constant(c.clone());
            let mut untouched = Vec::new();
            for (a, e) in &m.factors {
                match a {
                    Atom::Var(s) => match map.get(s) {
                        Some(p) => acc = &acc * &p.pow_int(*e),
                        None => untouched.push((a.clone(), *e)),
                    },
                    Atom::Call(f, p) => {
                        let v = Poly::apply_func(*f, p.subs(map));
                        acc = &acc * &v.pow_int(*e);
                    }
                    Atom::Root(p, q) => {
                        let b = p.subs(map);
                        let v = if *q == 1 {
                            b.pow_int(*e)
                        } else {
                            b.pow_rational(&Rational::new(BigInt::from(*e), BigInt::from(*q)))
                        };
                        acc = &acc * &v;
                    }
                }
                if acc.is_zero() {
                    break;
                }
            }
            if !untouched.is_empty() && !acc.is_zero() {
                acc = &acc * &normalize(Rational::one(), untouched);
            }
            out.add_scaled_into(acc);
        }
        out
    }

    pub fn rename(&self, from: &str, to: &str) -> Poly {
        let mut map = BTreeMap::new();
        map.insert(Arc::from(from), Poly::var(to));
        self.subs(&map)
    }

    pub fn eval<T: Scalar>(&self, point: &Point<T>) -> Result<T, EvalError> {
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = T::from_rational(c);
            for (a, e) in &m.factors {
                let v = atom_eval(a, point)?;
                if v.is_zero() && *e < 0 {
                    return Err(EvalError::Domain("division by zero".into()));
                }
                t = t * v.powi(*e);
            }
            acc = acc + t;
        }
        if acc.is_finite() {
            Ok(acc)
        } else {
            Err(EvalError::Domain("non-finite value".into()))
        }
    }

    /// Groups terms by the exponents of the given variables. Returns `None`
    /// if one of them occurs inside a non-polynomial atom or with a negative
    /// exponent.
    pub fn collect_in(&self, names: &[&str]) -> Option<BTreeMap<Vec<i32>, Poly>> {
        let set: BTreeSet<&str> = names.iter().copied().collect();
        let mut out: BTreeMap<Vec<i32>, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            for (a, e) in &m.factors {
                match a {
                    Atom::Var(s) if set.contains(&**s) => {
                        if *e < 0 {
                            return None;
                        }
                    }
                    Atom::Var(_) => {}
                    _ => {
                        if names.iter().any(|n| atom_depends_on(a, n)) {
                            return None;
                        }
                    }
                }
            }
            let key: Vec<i32> = names.iter().map(|n| m.exponent_of(n)).collect();
            out.entry(key).or_default().add_term(m.without(&set), c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        Some(out)
    }

    /// Largest total degree in the given variables, `None` as in [`Poly::collect_in`].
    pub fn degree_in(&self, names: &[&str]) -> Option<i32> {
        Some(
            self.collect_in(names)?
                .keys()
                .map(|k| k.iter().sum::<i32>())
                .max()
                .unwrap_or(0),
        )
    }

    pub fn to_expr(&self) -> Expr {
        let mut terms: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        // highest degree first, constant last
        terms.sort_by(|a, b| {
            let ka = (a.0.is_one(), -a.0.degree());
            let kb = (b.0.is_one(), -b.0.degree());
            ka.cmp(&kb).then_with(|| a.0.cmp(b.0))
        });
        let mut out: Vec<Expr> = terms.into_iter().map(|(m, c)| term_expr(m, c)).collect();
        match out.len() {
            0 => Expr::int(0),
            1 => out.pop().unwrap(),
            _ => Expr::Add(out),
        }
    }
}

fn term_expr(m: &Monomial, c: &Rational) -> Expr {
    let mut factors: Vec<Expr> = Vec::new();
    let mag = c.abs();
    if m.is_one() || !mag.is_one() {
        factors.push(Expr::Const(mag));
    }
    for (a, e) in &m.factors {
        factors.push(atom_power_expr(a, *e));
    }
    let body = if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        Expr::Mul(factors)
    };
    if c.is_negative() {
        Expr::Neg(Box::new(body))
    } else {
        body
    }
}

fn atom_power_expr(a: &Atom, e: i32) -> Expr {
    let int_pow = |base: Expr| {
        if e == 1 {
            base
        } else {
            base.pow(Expr::int(e as i64))
        }
    };
    match a {
        Atom::Var(s) => int_pow(Expr::Var(s.clone())),
        Atom::Call(f, p) => int_pow(Expr::call(*f, p.to_expr())),
        Atom::Root(p, 1) => p.to_expr().pow(Expr::int(e as i64)),
        Atom::Root(p, 2) if e == 1 => Expr::call(Func::Sqrt, p.to_expr()),
        Atom::Root(p, q) => p.to_expr().pow(Expr::Const(Rational::new(
            BigInt::from(e),
            BigInt::from(*q),
        ))),
    }
}

fn atom_depends_on(a: &Atom, name: &str) -> bool {
    match a {
        Atom::Var(s) => &**s == name,
        Atom::Call(_, p) | Atom::Root(p, _) => p.depends_on(name),
    }
}

fn atom_diff(a: &Atom, name: &str) -> Poly {
    match a {
        Atom::Var(s) => {
            if &**s == name {
                Poly::one()
            } else {
                Poly::zero()
            }
        }
        Atom::Call(f, p) => {
            let inner = p.diff(name);
            if inner.is_zero() {
                return inner;
            }
            let outer = match f {
                Func::Sin => Poly::apply_func(Func::Cos, p.clone()),
                Func::Cos => -&Poly::apply_func(Func::Sin, p.clone()),
                Func::Tan => &Poly::one() + &Poly::apply_func(Func::Tan, p.clone()).pow_int(2),
                Func::Exp => Poly::apply_func(Func::Exp, p.clone()),
                Func::Ln => p.reciprocal(),
                Func::Sqrt => unreachable!("sqrt is always stored as a radical"),
            };
            &outer * &inner
        }
        Atom::Root(p, q) => {
            let inner = p.diff(name);
            if inner.is_zero() {
                return inner;
            }
            // d b^(1/q) = (1/q) b^(1/q - 1) db
            let outer = if *q == 1 {
                Poly::one()
            } else {
                normalize(
                    Rational::new(BigInt::one(), BigInt::from(*q)),
                    vec![(a.clone(), 1 - *q as i32)],
                )
            };
            &outer * &inner
        }
    }
}

fn atom_eval<T: Scalar>(a: &Atom, point: &Point<T>) -> Result<T, EvalError> {
    match a {
        Atom::Var(s) => point.get(s).ok_or_else(|| EvalError::Unbound(s.to_string())),
        Atom::Call(f, p) => f.apply(p.eval(point)?),
        Atom::Root(p, q) => real_pow(p.eval(point)?, &BigInt::one(), &BigInt::from(*q)),
    }
}

impl From<&Expr> for Poly {
    fn from(e: &Expr) -> Poly {
        match e {
            Expr::Const(c) => Poly::constant(c.clone()),
            Expr::Var(s) => Poly::symbol(s),
            Expr::Add(xs) => {
                let mut acc = Poly::zero();
                for x in xs {
                    acc.add_scaled_into(Poly::from(x));
                }
                acc
            }
            Expr::Mul(xs) => {
                let mut acc = Poly::one();
                for x in xs {
                    acc = &acc * &Poly::from(x);
                    if acc.is_zero() {
                        break;
                    }
                }
                acc
            }
            Expr::Neg(a) => -&Poly::from(&**a),
            Expr::Call(f, a) => Poly::apply_func(*f, Poly::from(&**a)),
            Expr::Pow(a, b) => {
                let base = Poly::from(&**a);
                let exponent = Poly::from(&**b);
                match exponent.as_constant() {
                    Some(r) => base.pow_rational(&r),
                    None => Poly::apply_func(
                        Func::Exp,
                        &exponent * &Poly::apply_func(Func::Ln, base),
                    ),
                }
            }
        }
    }
}

impl From<Expr> for Poly {
    fn from(e: Expr) -> Poly {
        Poly::from(&e)
    }
}

impl From<i64> for Poly {
    fn from(n: i64) -> Poly {
        Poly::int(n)
    }
}

impl From<Rational> for Poly {
    fn from(r: Rational) -> Poly {
        Poly::constant(r)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let src = String::deserialize(d)?;
        Poly::parse(&src).map_err(serde::de::Error::custom)
    }
}

impl ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (mut big, small) = if self.terms.len() >= rhs.terms.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        big.add_assign_ref(small);
        big
    }
}

impl ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let factors = merge(&ma.factors, &mb.factors);
                let c = ca * cb;
                if needs_fix(&factors) {
                    out.add_scaled_into(normalize(c, factors));
                } else {
                    out.add_term(Monomial { factors }, c);
                }
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl ops::$tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                ops::$tr::$m(&self, &rhs)
            }
        }
        impl ops::$tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                ops::$tr::$m(&self, rhs)
            }
        }
        impl ops::$tr<Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                ops::$tr::$m(self, &rhs)
            }
        }
    )*};
}

owned_ops!(Add add, Sub sub, Mul mul);

impl ops::Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl ops::AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        self.add_assign_ref(rhs);
    }
}

impl ops::AddAssign for Poly {
    fn add_assign(&mut self, rhs: Poly) {
        self.add_scaled_into(rhs);
    }
}

impl ops::SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl ops::SubAssign for Poly {
    fn sub_assign(&mut self, rhs: Poly) {
        *self -= &rhs;
    }
}

impl std::iter::Sum for Poly {
    fn sum<I: Iterator<Item = Poly>>(iter: I) -> Poly {
        let mut acc = Poly::zero();
        for p in iter {
            acc += p;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    #[test]
    fn additive_identity_and_commutativity() {
        assert_eq!(p("x1 + 0"), p("x1"));
        assert!(p("x1*x2 - x2*x1").is_zero());
        assert_eq!(p("x1 + 0").to_string(), "x1");
    }

    #[test]
    fn expansion_collects_monomials() {
        assert_eq!(p("(x1+x2)^2 - x1^2 - 2*x1*x2"), p("x2^2"));
        assert_eq!(p("(x1+1)^2"), p("x1^2+2*x1+1"));
    }

    #[test]
    fn derivatives() {
        assert_eq!(p("x1*x2").diff("x1"), p("x2"));
        assert!(p("7/3").diff("x1").is_zero());
        assert_eq!(p("x1^3").diff("x1"), p("3*x1^2"));
        assert_eq!(p("sin(x)^2").diff("x"), p("2*sin(x)*cos(x)"));
        assert_eq!(p("sqrt(x)").diff("x"), p("1/(2*sqrt(x))"));
        // rational functions are only canonical up to how they were built
        assert_eq!(p("1/(x+1)").diff("x"), p("-(1/(x+1))^2"));
        assert_eq!(p("ln(x^2+1)").diff("x"), p("2*x/(x^2+1)"));
    }

    #[test]
    fn radicals_fold() {
        assert_eq!(p("sqrt(x)*sqrt(x)"), p("x"));
        assert_eq!(p("(x^(1/3))^3"), p("x"));
        assert_eq!(p("x^(2/4)"), p("sqrt(x)"));
        assert_eq!(p("sqrt(4/9)"), p("2/3"));
        assert_eq!(p("(-8)^(1/3)"), p("-2"));
        assert_eq!(p("x^(1/4)*x^(1/4)"), p("sqrt(x)"));
    }

    #[test]
    fn reciprocals_normalise_leading_coefficient() {
        assert_eq!(p("1/(2*x+2)"), p("(1/2)/(x+1)"));
        assert_eq!(p("x/x"), p("1"));
        assert_eq!(p("(x*y)^-2 * x^2"), p("y^-2"));
    }

    #[test]
    fn constant_folding_of_functions() {
        assert!(p("sin(0)").is_zero());
        assert_eq!(p("exp(x - x)"), Poly::one());
        assert!(p("ln(1)").is_zero());
    }

    #[test]
    fn substitution_is_simultaneous() {
        let mut map = BTreeMap::new();
        map.insert(Arc::from("x"), p("y"));
        map.insert(Arc::from("y"), p("x"));
        assert_eq!(p("x - 2*y").subs(&map), p("y - 2*x"));
        let mut map = BTreeMap::new();
        map.insert(Arc::from("x"), p("t^2"));
        assert_eq!(p("sqrt(x) + sin(x)").subs(&map).to_string(), p("sqrt(t^2) + sin(t^2)").to_string());
    }

    #[test]
    fn collect_in_variables() {
        let parts = p("3*u1*x + u2*x^2 + x").collect_in(&["u1", "u2"]).unwrap();
        assert_eq!(parts[&vec![1, 0]], p("3*x"));
        assert_eq!(parts[&vec![0, 1]], p("x^2"));
        assert_eq!(parts[&vec![0, 0]], p("x"));
        assert!(p("sin(u1)").collect_in(&["u1"]).is_none());
        assert_eq!(p("u1*u2 + u1").degree_in(&["u1", "u2"]), Some(2));
    }

    #[test]
    fn printing_round_trips_canonically() {
        for src in [
            "x1*x2 + 3",
            "(x+y)^3 - 1/2",
            "sin(x)^2 + cos(x)^2",
            "1/(x^2+1) - sqrt(y+1)",
            "x^(2/3) + x^(-1/3)",
            "-x - y",
            "exp(-x)*x",
            "x^y",
        ] {
            let a = p(src);
            let printed = a.to_string();
            assert_eq!(p(&printed), a, "{src} printed as {printed}");
        }
    }

    #[test]
    fn eval_matches_tree() {
        let src = "(x+1)^2/(y^2+1) - sqrt(x+3)*sin(y)";
        let pt = Point::new().with("x", 0.3).with("y", -1.2);
        let a = parse(src).unwrap().eval(&pt).unwrap();
        let b = p(src).eval(&pt).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn degree_order_in_printing() {
        assert_eq!(p("1 + x + x^2").to_string(), "x^2 + x + 1");
    }
}
