//! Exterior calculus on a single coordinate chart.
//!
//! Forms are stored on strictly increasing index tuples, so the coefficient
//! at `(i₁<…<i_k)` is the component `α_{i₁…i_k}` of the fully antisymmetric
//! tensor (the usual `1/k!` normalisation). [`KForm::component`] reads the
//! antisymmetric component for any index order.

mod identities;
mod map;
mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops;
use std::sync::Arc;

use thiserror::Error;

use crate::scalar::Scalar;
use crate::symexpr::{EvalError, ParseError, Point, Poly, Symbol};

pub use identities::{all_basis_forms, lie_derivative_by_components, run_exterior_suite};
pub use map::ChartMap;
pub use text::{parse_form, FormRecord, FormSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CartanError {
    #[error("duplicate coordinate name `{0}`")]
    DuplicateName(String),
    #[error("invalid coordinate name `{0}`")]
    InvalidName(String),
    #[error("chart mismatch: expected ({expected}), found ({found})")]
    ChartMismatch { expected: String, found: String },
    #[error("interior product of a 0-form")]
    InteriorOfFunction,
    #[error("expected {expected} components, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("index {index} out of range for a chart of dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("form degree {degree} exceeds chart dimension {dim}")]
    DegreeTooLarge { degree: usize, dim: usize },
    #[error("variable `{0}` is not a coordinate of the chart")]
    UnknownVariable(String),
    #[error("mixed degrees in form: {0} and {1}")]
    MixedDegree(usize, usize),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Syntax(String),
}

/// Ordered, distinct coordinate names.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chart {
    names: Arc<[Symbol]>,
}

impl Chart {
    pub fn new<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Result<Chart, CartanError> {
        let names: Vec<Symbol> = names.into_iter().map(|s| Arc::from(s.as_ref())).collect();
        let mut seen = BTreeSet::new();
        for n in &names {
            if !valid_name(n) {
                return Err(CartanError::InvalidName(n.to_string()));
            }
            if !seen.insert(n.clone()) {
                return Err(CartanError::DuplicateName(n.to_string()));
            }
        }
        Ok(Chart {
            names: names.into(),
        })
    }

    /// `x1, …, xn`.
    pub fn standard(prefix: &str, n: usize) -> Chart {
        Chart::new((1..=n).map(|i| format!("{prefix}{i}"))).expect("generated names are valid")
    }

    /// Comma-separated names, e.g. `"x1,x2"`.
    pub fn parse(src: &str) -> Result<Chart, CartanError> {
        let names: Vec<&str> = src
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        Chart::new(names)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[Symbol] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| &**n == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    /// Product chart with `self`'s coordinates first.
    pub fn product(&self, other: &Chart) -> Result<Chart, CartanError> {
        Chart::new(self.names.iter().chain(other.names.iter()).map(|s| &**s))
    }

    pub fn coordinate(&self, i: usize) -> Poly {
        Poly::symbol(&self.names[i])
    }

    pub fn coordinates(&self) -> Vec<Poly> {
        self.names.iter().map(Poly::symbol).collect()
    }

    pub(crate) fn ensure_same(&self, other: &Chart) -> Result<(), CartanError> {
        if self == other {
            Ok(())
        } else {
            Err(CartanError::ChartMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            })
        }
    }
}

fn valid_name(n: &str) -> bool {
    let mut toks = crate::symexpr::Tokenizer::new(n);
    matches!(toks.next_token(), Ok((crate::symexpr::Token::Ident(ref s), 0)) if s == n)
        && matches!(toks.next_token(), Ok((crate::symexpr::Token::End, _)))
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.names.iter().map(|s| &**s).collect();
        write!(f, "{}", names.join(","))
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart({self})")
    }
}

/// Sign of the permutation sorting `idx`, with the sorted tuple; `None` when
/// an index repeats.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// Differential form of fixed degree with polynomial-or-atom coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct KForm {
    chart: Chart,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, Poly>,
}

impl KForm {
    pub fn zero(chart: &Chart, degree: usize) -> KForm {
        KForm {
            chart: chart.clone(),
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn function(chart: &Chart, f: Poly) -> KForm {
        let mut out = KForm::zero(chart, 0);
        out.add_term(&[], f);
        out
    }

    /// `dx^i` (0-based index).
    pub fn dx(chart: &Chart, i: usize) -> KForm {
        KForm::basis(chart, &[i])
    }

    /// `dx^{i₁}∧…∧dx^{i_k}` for any index order.
    pub fn basis(chart: &Chart, idx: &[usize]) -> KForm {
        let mut out = KForm::zero(chart, idx.len());
        out.add_term(idx, Poly::one());
        out
    }

    /// Builds a form from its antisymmetric components `α_{i₁…i_k}`,
    /// queried only on increasing tuples.
    pub fn from_components(
        chart: &Chart,
        degree: usize,
        mut comp: impl FnMut(&[usize]) -> Poly,
    ) -> KForm {
        let mut out = KForm::zero(chart, degree);
        for idx in increasing_tuples(chart.dim(), degree) {
            let c = comp(&idx);
            out.add_term(&idx, c);
        }
        out
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &Poly)> {
        self.coeffs.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Coefficient stored on an increasing tuple.
    pub fn coeff(&self, idx: &[usize]) -> Poly {
        self.coeffs.get(idx).cloned().unwrap_or_default()
    }

    /// Antisymmetric component for an arbitrary index tuple.
    pub fn component(&self, idx: &[usize]) -> Poly {
        match sort_with_sign(idx) {
            None => Poly::zero(),
            Some((sorted, sign)) => {
                let c = self.coeff(&sorted);
                if sign < 0 {
                    -c
                } else {
                    c
                }
            }
        }
    }

    /// Scalar value of a 0-form.
    pub fn as_function(&self) -> Option<Poly> {
        (self.degree == 0).then(|| self.coeff(&[]))
    }

    /// Adds `c · dx^{idx}` with `idx` in any order.
    pub fn add_term(&mut self, idx: &[usize], c: Poly) {
        debug_assert_eq!(idx.len(), self.degree);
        if c.is_zero() {
            return;
        }
        let Some((sorted, sign)) = sort_with_sign(idx) else {
            return;
        };
        let c = if sign < 0 { -c } else { c };
        match self.coeffs.entry(sorted) {
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

    pub fn map_coeffs(&self, mut f: impl FnMut(&Poly) -> Poly) -> KForm {
        let mut out = KForm::zero(&self.chart, self.degree);
        for (k, v) in &self.coeffs {
            out.add_term(k, f(v));
        }
        out
    }

    /// Multiplication by a function.
    pub fn scale(&self, f: &Poly) -> KForm {
        if f.is_zero() {
            return KForm::zero(&self.chart, self.degree);
        }
        self.map_coeffs(|c| c * f)
    }

    pub fn try_add(&self, other: &KForm) -> Result<KForm, CartanError> {
        self.chart.ensure_same(&other.chart)?;
        if self.degree != other.degree {
            return Err(CartanError::MixedDegree(self.degree, other.degree));
        }
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.add_term(k, v.clone());
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &KForm) -> KForm {
        assert_eq!(self.chart, other.chart, "wedge of forms on different charts");
        let degree = self.degree + other.degree;
        let mut out = KForm::zero(&self.chart, degree);
        if degree > self.chart.dim() {
            return out;
        }
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                if i.iter().any(|x| j.contains(x)) {
                    continue;
                }
                let idx: Vec<usize> = i.iter().chain(j.iter()).copied().collect();
                out.add_term(&idx, a * b);
            }
        }
        out
    }

    /// Exterior derivative.
    pub fn d(&self) -> KForm {
        let mut out = KForm::zero(&self.chart, self.degree + 1);
        if self.degree >= self.chart.dim() {
            return out;
        }
        for (idx, c) in &self.coeffs {
            for (j, name) in self.chart.names.iter().enumerate() {
                if idx.contains(&j) || !c.depends_on(name) {
                    continue;
                }
                let mut full = Vec::with_capacity(idx.len() + 1);
                full.push(j);
                full.extend_from_slice(idx);
                out.add_term(&full, c.diff(name));
            }
        }
        out
    }

    /// Interior product `i_X`.
    pub fn interior(&self, x: &VField) -> Result<KForm, CartanError> {
        self.chart.ensure_same(&x.chart)?;
        if self.degree == 0 {
            return Err(CartanError::InteriorOfFunction);
        }
        let mut out = KForm::zero(&self.chart, self.degree - 1);
        for (idx, c) in &self.coeffs {
            for (p, &i) in idx.iter().enumerate() {
                let xi = &x.comps[i];
                if xi.is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(p);
                let t = c * xi;
                out.add_term(&rest, if p % 2 == 1 { -t } else { t });
            }
        }
        Ok(out)
    }

    /// Lie derivative via `i_X d + d i_X`.
    pub fn lie_derivative(&self, x: &VField) -> Result<KForm, CartanError> {
        self.chart.ensure_same(&x.chart)?;
        let a = self.d().interior(x)?;
        if self.degree == 0 {
            return Ok(a);
        }
        let b = self.interior(x)?.d();
        a.try_add(&b)
    }

    /// The same form on a chart containing all of this chart's names.
    pub fn embed(&self, chart: &Chart) -> Result<KForm, CartanError> {
        let pos: Vec<usize> = self
            .chart
            .names
            .iter()
            .map(|n| {
                chart
                    .index_of(n)
                    .ok_or_else(|| CartanError::UnknownVariable(n.to_string()))
            })
            .collect::<Result<_, _>>()?;
        let mut out = KForm::zero(chart, self.degree);
        for (idx, c) in &self.coeffs {
            let mapped: Vec<usize> = idx.iter().map(|&i| pos[i]).collect();
            out.add_term(&mapped, c.clone());
        }
        Ok(out)
    }

    /// Coefficients evaluated at a point.
    pub fn eval<T: Scalar>(&self, p: &Point<T>) -> Result<BTreeMap<Vec<usize>, T>, EvalError> {
        self.coeffs
            .iter()
            .map(|(k, v)| Ok((k.clone(), v.eval(p)?)))
            .collect()
    }

    /// Largest coefficient magnitude at a point.
    pub fn max_abs_at<T: Scalar>(&self, p: &Point<T>) -> Result<T, EvalError> {
        let mut m = T::zero();
        for v in self.coeffs.values() {
            m = m.max(v.eval(p)?.abs());
        }
        Ok(m)
    }

    pub fn free_vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for c in self.coeffs.values() {
            out.extend(c.free_vars());
        }
        out
    }
}

/// All strictly increasing tuples of length `k` from `0..n`.
pub fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(n, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

impl fmt::Display for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::print_form(self))
    }
}

impl fmt::Debug for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KForm[{}; {}]({self})", self.chart, self.degree)
    }
}

impl ops::Add for &KForm {
    type Output = KForm;
    fn add(self, rhs: &KForm) -> KForm {
        self.try_add(rhs).expect("adding incompatible forms")
    }
}

impl ops::Add for KForm {
    type Output = KForm;
    fn add(self, rhs: KForm) -> KForm {
        &self + &rhs
    }
}

impl ops::Neg for &KForm {
    type Output = KForm;
    fn neg(self) -> KForm {
        self.map_coeffs(|c| -c)
    }
}

impl ops::Neg for KForm {
    type Output = KForm;
    fn neg(self) -> KForm {
        -&self
    }
}

impl ops::Sub for &KForm {
    type Output = KForm;
    fn sub(self, rhs: &KForm) -> KForm {
        self + &(-rhs)
    }
}

impl ops::Sub for KForm {
    type Output = KForm;
    fn sub(self, rhs: KForm) -> KForm {
        &self - &rhs
    }
}

/// Vector field `Σ vⁱ ∂/∂xⁱ`.
#[derive(Clone, PartialEq, Eq)]
pub struct VField {
    chart: Chart,
    comps: Vec<Poly>,
}

impl VField {
    pub fn new(chart: &Chart, comps: Vec<Poly>) -> Result<VField, CartanError> {
        if comps.len() != chart.dim() {
            return Err(CartanError::Arity {
                expected: chart.dim(),
                found: comps.len(),
            });
        }
        Ok(VField {
            chart: chart.clone(),
            comps,
        })
    }

    pub fn zero(chart: &Chart) -> VField {
        VField {
            chart: chart.clone(),
            comps: vec![Poly::zero(); chart.dim()],
        }
    }

    /// `∂/∂xⁱ`.
    pub fn coordinate(chart: &Chart, i: usize) -> VField {
        let mut v = VField::zero(chart);
        v.comps[i] = Poly::one();
        v
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &Poly {
        &self.comps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    /// Directional derivative `X(f)`.
    pub fn apply(&self, f: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (c, name) in self.comps.iter().zip(self.chart.names.iter()) {
            if c.is_zero() || !f.depends_on(name) {
                continue;
            }
            out += c * &f.diff(name);
        }
        out
    }

    /// Jacobi–Lie bracket `[X, Y]`.
    pub fn bracket(&self, other: &VField) -> Result<VField, CartanError> {
        self.chart.ensure_same(&other.chart)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(x, y)| &self.apply(y) - &other.apply(x))
            .collect();
        VField::new(&self.chart, comps)
    }

    pub fn scale(&self, f: &Poly) -> VField {
        VField {
            chart: self.chart.clone(),
            comps: self.comps.iter().map(|c| c * f).collect(),
        }
    }

    /// The dual 1-form pairing: `α(X)` for a 1-form `α`.
    pub fn pair(&self, alpha: &KForm) -> Result<Poly, CartanError> {
        if alpha.degree() != 1 {
            return Err(CartanError::MixedDegree(1, alpha.degree()));
        }
        Ok(alpha.interior(self)?.coeff(&[]))
    }
}

impl ops::Add for &VField {
    type Output = VField;
    fn add(self, rhs: &VField) -> VField {
        assert_eq!(self.chart, rhs.chart);
        VField {
            chart: self.chart.clone(),
            comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a + b).collect(),
        }
    }
}

impl ops::Sub for &VField {
    type Output = VField;
    fn sub(self, rhs: &VField) -> VField {
        assert_eq!(self.chart, rhs.chart);
        VField {
            chart: self.chart.clone(),
            comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Display for VField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, n) in self.comps.iter().zip(self.chart.names.iter()) {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.len() > 1 {
                write!(f, "({c})·∂{n}")?;
            } else if c == &Poly::one() {
                write!(f, "∂{n}")?;
            } else {
                write!(f, "{c}·∂{n}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for VField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VField[{}]({self})", self.chart)
    }
}
