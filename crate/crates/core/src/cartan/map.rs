use std::collections::BTreeMap;
use std::fmt;

use super::{CartanError, Chart, KForm, VField};
use crate::scalar::Scalar;
use crate::symexpr::{EvalError, Point, Poly, Symbol};

/// Smooth map between charts: one expression in the source coordinates per
/// target coordinate.
#[derive(Clone, PartialEq, Eq)]
pub struct ChartMap {
    source: Chart,
    target: Chart,
    comps: Vec<Poly>,
}

impl ChartMap {
    pub fn new(source: &Chart, target: &Chart, comps: Vec<Poly>) -> Result<ChartMap, CartanError> {
        if comps.len() != target.dim() {
            return Err(CartanError::Arity {
                expected: target.dim(),
                found: comps.len(),
            });
        }
        for c in &comps {
            for v in c.free_vars() {
                if !source.contains(&v) {
                    return Err(CartanError::UnknownVariable(v.to_string()));
                }
            }
        }
        Ok(ChartMap {
            source: source.clone(),
            target: target.clone(),
            comps,
        })
    }

    pub fn identity(chart: &Chart) -> ChartMap {
        ChartMap {
            source: chart.clone(),
            target: chart.clone(),
            comps: chart.coordinates(),
        }
    }

    /// Map sending target coordinate `i` to source coordinate `perm[i]`.
    pub fn permutation(source: &Chart, target: &Chart, perm: &[usize]) -> Result<ChartMap, CartanError> {
        let comps = perm.iter().map(|&j| source.coordinate(j)).collect();
        ChartMap::new(source, target, comps)
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    fn substitution(&self) -> BTreeMap<Symbol, Poly> {
        self.target
            .names()
            .iter()
            .cloned()
            .zip(self.comps.iter().cloned())
            .collect()
    }

    /// `outer ∘ self`.
    pub fn then(&self, outer: &ChartMap) -> Result<ChartMap, CartanError> {
        self.target.ensure_same(&outer.source)?;
        let sub = self.substitution();
        Ok(ChartMap {
            source: self.source.clone(),
            target: outer.target.clone(),
            comps: outer.comps.iter().map(|c| c.subs(&sub)).collect(),
        })
    }

    /// `∂Fⁱ/∂xʲ`, indexed `[i][j]`.
    pub fn jacobian(&self) -> Vec<Vec<Poly>> {
        self.comps
            .iter()
            .map(|c| self.source.names().iter().map(|n| c.diff(n)).collect())
            .collect()
    }

    pub fn apply<T: Scalar>(&self, p: &Point<T>) -> Result<Point<T>, EvalError> {
        let mut out = Point::new();
        for (n, c) in self.target.names().iter().zip(&self.comps) {
            out.insert(n, c.eval(p)?);
        }
        Ok(out)
    }

    /// Pullback of a function on the target.
    pub fn pull_function(&self, f: &Poly) -> Poly {
        f.subs(&self.substitution())
    }

    /// Pullback of a form living on the target chart.
    pub fn pullback(&self, a: &KForm) -> Result<KForm, CartanError> {
        self.target.ensure_same(a.chart())?;
        let sub = self.substitution();
        let k = a.degree();
        let mut out = KForm::zero(&self.source, k);
        if a.is_zero() {
            return Ok(out);
        }
        let differentials: Vec<KForm> = self
            .comps
            .iter()
            .map(|c| KForm::function(&self.source, c.clone()).d())
            .collect();
        'terms: for (idx, c) in a.terms() {
            let mut acc = KForm::function(&self.source, c.subs(&sub));
            for &i in idx {
                acc = acc.wedge(&differentials[i]);
                if acc.is_zero() {
                    // a lower-degree zero must not reach the sum
                    continue 'terms;
                }
            }
            out = &out + &acc;
        }
        Ok(out)
    }

    /// Pushforward `F_*X`: components over the target indices, written in
    /// source coordinates.
    pub fn push_vector(&self, x: &VField) -> Result<Vec<Poly>, CartanError> {
        self.source.ensure_same(x.chart())?;
        Ok(self.comps.iter().map(|c| x.apply(c)).collect())
    }
}

impl fmt::Debug for ChartMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChartMap[({}) -> ({})](", self.source, self.target)?;
        for (i, (n, c)) in self.target.names().iter().zip(&self.comps).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n} = {c}")?;
        }
        write!(f, ")")
    }
}
