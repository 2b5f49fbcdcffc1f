//! Randomized checks of the exterior-calculus identities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{increasing_tuples, Chart, ChartMap, KForm, VField};
use crate::random::{random_form, random_poly, random_vfield};
use crate::report::{IdentityOutcome, IdentityReport, SuiteOptions};
use crate::symexpr::Poly;

/// `(L_X α)_I = X^j ∂_j α_I + Σ_m α_{i₁…j…i_k} ∂_{i_m} X^j`, computed
/// componentwise without the Cartan formula.
pub fn lie_derivative_by_components(a: &KForm, x: &VField) -> KForm {
    let chart = a.chart();
    let n = chart.dim();
    let k = a.degree();
    KForm::from_components(chart, k, |idx| {
        let mut c = x.apply(&a.coeff(idx));
        for m in 0..k {
            for j in 0..n {
                let dx = x.comp(j).diff(chart.name(idx[m]));
                if dx.is_zero() {
                    continue;
                }
                let mut swapped = idx.to_vec();
                swapped[m] = j;
                c += &a.component(&swapped) * &dx;
            }
        }
        c
    })
}

fn residual(name: &str, lhs: &KForm, rhs: &KForm) -> Option<String> {
    (lhs != rhs).then(|| format!("{name}: {} ≠ {}", lhs, rhs))
}

/// d² = 0, Cartan's formula against the component formula, Leibniz rules,
/// and naturality of pullback, on random polynomial forms over charts of
/// dimension 2 to 4.
pub fn run_exterior_suite(opts: &SuiteOptions) -> IdentityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let shape = opts.shape;
    let mut d_squared = IdentityOutcome::new("d_squared_vanishes");
    let mut cartan = IdentityOutcome::new("cartan_formula");
    let mut leibniz = IdentityOutcome::new("lie_derivative_leibniz");
    let mut commutator = IdentityOutcome::new("lie_derivative_of_bracket");
    let mut interior = IdentityOutcome::new("interior_twice_vanishes");
    let mut graded = IdentityOutcome::new("wedge_graded_commutative");
    let mut pull_d = IdentityOutcome::new("pullback_commutes_with_d");
    let mut pull_wedge = IdentityOutcome::new("pullback_commutes_with_wedge");
    for t in 0..opts.trials {
        let n = 2 + t % 3;
        let chart = Chart::standard("x", n);
        let k = rng.random_range(0..=n);
        let a = random_form(&mut rng, &chart, k, shape, 0.5);
        let l = rng.random_range(0..=n - k.min(n));
        let b = random_form(&mut rng, &chart, l, shape, 0.5);
        let x = random_vfield(&mut rng, &chart, shape);
        let y = random_vfield(&mut rng, &chart, shape);

        let dd = a.d().d();
        d_squared.record((!dd.is_zero()).then(|| format!("d²({a}) = {dd}")));

        let lie = a.lie_derivative(&x).expect("same chart");
        cartan.record(residual("L_X a", &lie, &lie_derivative_by_components(&a, &x)));

        let ab = a.wedge(&b);
        let lhs = ab.lie_derivative(&x).expect("same chart");
        let rhs = &lie.wedge(&b) + &a.wedge(&b.lie_derivative(&x).expect("same chart"));
        leibniz.record(residual("L_X(a∧b)", &lhs, &rhs));

        let xy = x.bracket(&y).expect("same chart");
        let lhs = a.lie_derivative(&xy).expect("same chart");
        let ly = a.lie_derivative(&y).expect("same chart");
        let rhs = &ly.lie_derivative(&x).expect("same chart")
            - &lie.lie_derivative(&y).expect("same chart");
        commutator.record(residual("L_[X,Y] a", &lhs, &rhs));

        if k >= 2 {
            let ii = a.interior(&x).and_then(|f| f.interior(&x)).expect("degree ≥ 2");
            interior.record((!ii.is_zero()).then(|| format!("i_X i_X({a}) = {ii}")));
        }

        let sign = if (k * l) % 2 == 1 { -1 } else { 1 };
        let ba = b.wedge(&a);
        let ba = if sign < 0 { -ba } else { ba };
        graded.record(residual("a∧b", &ab, &ba));

        let m = 2 + rng.random_range(0..3);
        let src = Chart::standard("y", m);
        let comps: Vec<Poly> = (0..n)
            .map(|_| random_poly(&mut rng, src.names(), shape))
            .collect();
        let f = ChartMap::new(&src, &chart, comps).expect("arity matches");
        let lhs = f.pullback(&a.d()).expect("same chart");
        let rhs = f.pullback(&a).expect("same chart").d();
        pull_d.record(residual("F*(da)", &lhs, &rhs));
        let lhs = f.pullback(&ab).expect("same chart");
        let rhs = f
            .pullback(&a)
            .expect("same chart")
            .wedge(&f.pullback(&b).expect("same chart"));
        pull_wedge.record(residual("F*(a∧b)", &lhs, &rhs));
    }
    IdentityReport {
        suite: "exterior calculus".into(),
        seed: opts.seed,
        outcomes: vec![
            d_squared, cartan, leibniz, commutator, interior, graded, pull_d, pull_wedge,
        ],
    }
}

/// Every increasing tuple of every degree on `chart`, for exhaustive
/// small-chart checks.
pub fn all_basis_forms(chart: &Chart) -> Vec<KForm> {
    (0..=chart.dim())
        .flat_map(|k| increasing_tuples(chart.dim(), k))
        .map(|idx| KForm::basis(chart, &idx))
        .collect()
}
