use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EvalError, Expr, Point, Poly, Symbol};

/// Sampling parameters for numeric identity tests.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericOptions {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    pub lo: f64,
    pub hi: f64,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions {
            samples: 100,
            tol: 1e-9,
            seed: 42,
            lo: -2.0,
            hi: 2.0,
        }
    }
}

impl NumericOptions {
    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum EqualityMode {
    /// Compare canonical forms; non-polynomial differences fall back to
    /// numeric sampling with default options.
    #[default]
    Symbolic,
    Numeric(NumericOptions),
}


#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }

    /// Conjunction: any failure wins, then any inconclusive.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    pub fn all(it: impl IntoIterator<Item = Verdict>) -> Verdict {
        it.into_iter().fold(Verdict::Pass, Verdict::and)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Symbolic,
    Numeric,
}

/// Outcome of testing one expression for identical vanishing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroTest {
    pub verdict: Verdict,
    pub method: Method,
    /// Largest scaled residual seen; 0 for a symbolic pass.
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Point<f64>>,
}

impl ZeroTest {
    pub fn holds(&self) -> bool {
        self.verdict.passed()
    }

    fn symbolic_pass() -> Self {
        ZeroTest {
            verdict: Verdict::Pass,
            method: Method::Symbolic,
            max_residual: 0.0,
            witness: None,
        }
    }
}

/// Seeded uniform sampler over a box.
pub struct Sampler {
    rng: ChaCha8Rng,
    lo: f64,
    hi: f64,
}

impl Sampler {
    pub fn new(seed: u64, lo: f64, hi: f64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            lo,
            hi,
        }
    }

    pub fn from_options(opts: &NumericOptions) -> Self {
        Sampler::new(opts.seed, opts.lo, opts.hi)
    }

    pub fn value(&mut self) -> f64 {
        self.rng.random_range(self.lo..self.hi)
    }

    pub fn point<'a>(&mut self, vars: impl IntoIterator<Item = &'a str>) -> Point<f64> {
        vars.into_iter().map(|v| (v, self.value())).collect()
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Scaled residual `|a-b| / (1+|a|+|b|)`; domain errors propagate.
fn scaled_gap(a: &Poly, b: &Poly, p: &Point<f64>) -> Result<f64, EvalError> {
    let (x, y) = (a.eval(p)?, b.eval(p)?);
    Ok((x - y).abs() / (1.0 + x.abs() + y.abs()))
}

/// Small grid values tried, in order, when looking for a readable
/// counterexample. Zero is skipped since it tends to sit on singular sets.
const GRID: [f64; 7] = [1.0, 2.0, -1.0, -2.0, 3.0, -3.0, 0.5];
const GRID_BUDGET: usize = 20_000;

/// First grid point (by total rank, then lexicographic) where `a != b`.
fn grid_witness(a: &Poly, b: &Poly, vars: &[Symbol], tol: f64) -> Option<Point<f64>> {
    let n = vars.len();
    let max_rank = GRID.len() - 1;
    let mut tried = 0usize;
    for total in 0..=(n * max_rank) {
        let mut idx = vec![0usize; n];
        if !fill(&mut idx, 0, total, max_rank) {
            continue;
        }
        loop {
            tried += 1;
            if tried > GRID_BUDGET {
                return None;
            }
            let p: Point<f64> = vars
                .iter()
                .zip(&idx)
                .map(|(v, &i)| (&**v, GRID[i]))
                .collect();
            if let Ok(g) = scaled_gap(a, b, &p) {
                if g > tol {
                    return Some(p);
                }
            }
            if !next_composition(&mut idx, max_rank) {
                break;
            }
        }
    }
    None
}

/// Lexicographically smallest vector from position `at` with entries in
/// `0..=cap` summing to `rest`.
fn fill(idx: &mut [usize], at: usize, mut rest: usize, cap: usize) -> bool {
    let n = idx.len();
    if (n - at) * cap < rest {
        return false;
    }
    for k in (at..n).rev() {
        let v = rest.min(cap);
        idx[k] = v;
        rest -= v;
    }
    rest == 0
}

/// Advances to the next vector with the same sum in lexicographic order.
fn next_composition(idx: &mut [usize], cap: usize) -> bool {
    let n = idx.len();
    // find the rightmost position that can grow while the tail can shrink
    for i in (0..n.saturating_sub(1)).rev() {
        let tail: usize = idx[i + 1..].iter().sum();
        if idx[i] < cap && tail > 0 {
            idx[i] += 1;
            return fill(idx, i + 1, tail - 1, cap);
        }
    }
    false
}

fn numeric_equal(a: &Poly, b: &Poly, opts: &NumericOptions) -> ZeroTest {
    let mut vars: BTreeSet<Symbol> = a.free_vars();
    vars.extend(b.free_vars());
    let vars: Vec<Symbol> = vars.into_iter().collect();
    let mut sampler = Sampler::from_options(opts);
    let mut worst = 0.0f64;
    let mut failing: Option<Point<f64>> = None;
    let mut domain_hit = false;
    for _ in 0..opts.samples.max(1) {
        let p = sampler.point(vars.iter().map(|v| &**v));
        match scaled_gap(a, b, &p) {
            Ok(g) => {
                if g > worst || g.is_nan() {
                    worst = if g.is_nan() { f64::INFINITY } else { g };
                }
                if (g > opts.tol || g.is_nan()) && failing.is_none() {
                    failing = Some(p);
                }
            }
            Err(_) => domain_hit = true,
        }
    }
    let verdict = if failing.is_some() {
        Verdict::Fail
    } else if domain_hit {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    let witness = failing.map(|p| grid_witness(a, b, &vars, opts.tol).unwrap_or(p));
    ZeroTest {
        verdict,
        method: Method::Numeric,
        max_residual: worst,
        witness,
    }
}

/// Tests `a == b` as functions of their free variables.
pub fn check_equal(a: &Poly, b: &Poly, mode: &EqualityMode) -> ZeroTest {
    match mode {
        EqualityMode::Numeric(opts) => numeric_equal(a, b, opts),
        EqualityMode::Symbolic => {
            let diff = a - b;
            if diff.is_zero() {
                return ZeroTest::symbolic_pass();
            }
            if diff.is_polynomial() {
                // a nonzero polynomial over Q is a nonzero function
                let vars: Vec<Symbol> = diff.free_vars().into_iter().collect();
                let witness = grid_witness(&diff, &Poly::zero(), &vars, 0.0);
                let max_residual = witness
                    .as_ref()
                    .and_then(|p| diff.eval(p).ok())
                    .map_or(f64::INFINITY, f64::abs);
                return ZeroTest {
                    verdict: Verdict::Fail,
                    method: Method::Symbolic,
                    max_residual,
                    witness,
                };
            }
            numeric_equal(a, b, &NumericOptions::default())
        }
    }
}

pub fn check_zero(p: &Poly, mode: &EqualityMode) -> ZeroTest {
    check_equal(p, &Poly::zero(), mode)
}

/// Equality of two expressions under the given mode.
pub fn expr_equal(a: &Expr, b: &Expr, mode: &EqualityMode) -> ZeroTest {
    check_equal(&Poly::from(a), &Poly::from(b), mode)
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn eq(a: &str, b: &str, mode: EqualityMode) -> ZeroTest {
        expr_equal(&parse(a).unwrap(), &parse(b).unwrap(), &mode)
    }

    #[test]
    fn binomial_symbolic() {
        let r = eq("(x1+1)^2", "x1^2+2*x1+1", EqualityMode::Symbolic);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.method, Method::Symbolic);
    }

    #[test]
    fn numeric_counterexample_is_minimised() {
        let opts = NumericOptions::default().with_samples(50).with_tol(1e-9);
        let r = eq("x1*x2", "x2", EqualityMode::Numeric(opts));
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.witness.unwrap();
        assert_eq!(w.get("x1"), Some(2.0));
        assert_eq!(w.get("x2"), Some(1.0));
    }

    #[test]
    fn pythagorean_identity_numeric() {
        let opts = NumericOptions::default().with_samples(50);
        assert!(eq("sin(x1)^2+cos(x1)^2", "1", EqualityMode::Numeric(opts)).holds());
        // symbolic mode falls back to sampling here
        let r = eq("sin(x1)^2+cos(x1)^2", "1", EqualityMode::Symbolic);
        assert!(r.holds());
        assert_eq!(r.method, Method::Numeric);
    }

    #[test]
    fn domain_errors_are_inconclusive() {
        let opts = NumericOptions::default();
        let r = eq("sqrt(x)*y", "y*sqrt(x)", EqualityMode::Numeric(opts));
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn symbolic_failure_has_witness() {
        let r = eq("x*y", "y*x + x - 1", EqualityMode::Symbolic);
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.witness.unwrap();
        assert!((w.get("x").unwrap() - 1.0).abs() > 0.0);
    }

    #[test]
    fn grid_enumeration_is_exhaustive() {
        // every vector of length 3 with entries <= 2 appears once
        let mut seen = BTreeSet::new();
        for total in 0..=6 {
            let mut idx = vec![0; 3];
            if !fill(&mut idx, 0, total, 2) {
                continue;
            }
            loop {
                assert!(seen.insert(idx.clone()));
                if !next_composition(&mut idx, 2) {
                    break;
                }
            }
        }
        assert_eq!(seen.len(), 27);
    }

    #[test]
    fn verdict_conjunction() {
        use Verdict::*;
        assert_eq!(Verdict::all([Pass, Inconclusive, Pass]), Inconclusive);
        assert_eq!(Verdict::all([Inconclusive, Fail]), Fail);
        assert_eq!(Verdict::all([]), Pass);
    }
}
