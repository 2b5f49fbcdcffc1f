//! Seeded generators of random polynomials, forms and vector fields for
//! identity testing.

use rand::Rng;

use crate::cartan::{increasing_tuples, Chart, KForm, VField};
use crate::symexpr::{Poly, Rational, Symbol};

/// Shape of random polynomials.
#[derive(Clone, Copy, Debug)]
pub struct PolyShape {
    pub max_terms: usize,
    pub max_degree: u32,
    /// Integer coefficients are drawn from `-coeff..=coeff`, zero excluded.
    pub coeff: i64,
}

impl Default for PolyShape {
    fn default() -> Self {
        PolyShape {
            max_terms: 3,
            max_degree: 2,
            coeff: 3,
        }
    }
}

pub fn random_poly<R: Rng>(rng: &mut R, vars: &[Symbol], shape: PolyShape) -> Poly {
    let mut out = Poly::zero();
    let terms = rng.random_range(1..=shape.max_terms.max(1));
    for _ in 0..terms {
        let mut c = rng.random_range(-shape.coeff..=shape.coeff);
        if c == 0 {
            c = 1;
        }
        let deg = rng.random_range(0..=shape.max_degree);
        let mut m = Poly::constant(Rational::from_integer(c.into()));
        for _ in 0..deg {
            if vars.is_empty() {
                break;
            }
            let v = &vars[rng.random_range(0..vars.len())];
            m = &m * &Poly::symbol(v);
        }
        out += m;
    }
    out
}

/// Random form on `chart` of the given degree; each increasing index tuple
/// gets a nonzero coefficient with probability `density`.
pub fn random_form<R: Rng>(rng: &mut R, chart: &Chart, degree: usize, shape: PolyShape, density: f64) -> KForm {
    let vars = chart.names().to_vec();
    let mut out = KForm::zero(chart, degree);
    let tuples = increasing_tuples(chart.dim(), degree);
    let forced = if tuples.is_empty() { 0 } else { rng.random_range(0..tuples.len()) };
    for (t, idx) in tuples.iter().enumerate() {
        if t == forced || rng.random_bool(density.clamp(0.0, 1.0)) {
            out.add_term(idx, random_poly(rng, &vars, shape));
        }
    }
    out
}

pub fn random_vfield<R: Rng>(rng: &mut R, chart: &Chart, shape: PolyShape) -> VField {
    let vars = chart.names().to_vec();
    let comps = (0..chart.dim()).map(|_| random_poly(rng, &vars, shape)).collect();
    VField::new(chart, comps).expect("component count matches chart")
}

/// A random integer matrix, redrawn until its determinant is nonzero.
pub fn random_invertible<R: Rng>(rng: &mut R, n: usize, range: i64) -> Vec<Vec<i64>> {
    loop {
        let m: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.random_range(-range..=range)).collect())
            .collect();
        let f = nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j] as f64);
        if f.determinant().abs() > 0.5 {
            return m;
        }
    }
}

