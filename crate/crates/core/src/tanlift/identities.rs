//! Randomized checks of the tangent-lift identities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    sharp_map, tangent_lift, tangent_lift_via_sharp, tau, vertical_lift, CotangentChart,
    TangentChart,
};
use crate::cartan::{Chart, KForm};
use crate::random::{random_form, random_poly};
use crate::report::{IdentityOutcome, IdentityReport, SuiteOptions};
use crate::symexpr::{Poly, Rational};

fn residual(name: &str, lhs: &KForm, rhs: &KForm) -> Option<String> {
    (lhs != rhs).then(|| format!("{name}: {lhs} ≠ {rhs}"))
}

/// `τ(α) = 1/(k−1)! Σ α_{i₁…i_k} ẋ^{i₁} dx^{i₂}∧…∧dx^{i_k}`, summed over
/// all index tuples.
pub fn tau_by_components(a: &KForm, tc: &TangentChart) -> KForm {
    let n = tc.dim();
    let k = a.degree();
    let mut out = KForm::zero(tc.total(), k - 1);
    let mut idx = vec![0usize; k];
    loop {
        let c = a.component(&idx);
        if !c.is_zero() {
            out.add_term(&idx[1..], &c * &tc.fibre().coordinate(idx[0]));
        }
        // odometer over {0..n}^k
        let mut p = k;
        loop {
            if p == 0 {
                let fact: u64 = (1..k as u64).product();
                return out.scale(&Poly::constant(Rational::new(1.into(), fact.max(1).into())));
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < n {
                break;
            }
            idx[p] = 0;
        }
    }
}

/// `Σ_m dx^{i₁}∧…∧dẋ^{i_m}∧…∧dx^{i_k}` on `TM`.
pub fn basis_lift_expansion(idx: &[usize], tc: &TangentChart) -> KForm {
    let n = tc.dim();
    let mut out = KForm::zero(tc.total(), idx.len());
    for m in 0..idx.len() {
        let mut lifted = idx.to_vec();
        lifted[m] += n;
        out.add_term(&lifted, Poly::one());
    }
    out
}

/// The lift identities over random forms on charts of dimension 2 to 4:
/// the Leibniz and basis rules, the Cartan-type formula for `α_T`,
/// commutation with `d`, the `θ_can`/`ω_can` descriptions for 2-forms and
/// agreement with the sharp-map construction.
pub fn run_lift_suite(opts: &SuiteOptions) -> IdentityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let shape = opts.shape;
    let mut euler = IdentityOutcome::new("euler_field_projects_to_identity");
    let mut fun_lift = IdentityOutcome::new("function_lift_is_df");
    let mut d_fun = IdentityOutcome::new("lift_commutes_with_d_on_functions");
    let mut leibniz = IdentityOutcome::new("lift_leibniz_rule");
    let mut basis = IdentityOutcome::new("lift_of_basis_forms");
    let mut magic = IdentityOutcome::new("lift_equals_d_tau_plus_tau_d");
    let mut d_commute = IdentityOutcome::new("lift_commutes_with_d");
    let mut tau_coord = IdentityOutcome::new("tau_coordinate_formula");
    let mut theta = IdentityOutcome::new("tau_of_2form_is_sharp_pullback_of_theta");
    let mut omega = IdentityOutcome::new("lift_of_2form_via_omega_can");
    let mut sharp = IdentityOutcome::new("lift_of_2form_via_sharp_map");

    for t in 0..opts.trials {
        let n = 2 + t % 3;
        let base = Chart::standard("x", n);
        let tc = TangentChart::new(&base);
        let cc = CotangentChart::new(&base, "p");
        if t < 3 {
            euler.record((!tc.euler_projects_to_identity()).then(|| format!("dim {n}")));
        }

        let f = random_poly(&mut rng, base.names(), shape);
        let f0 = KForm::function(&base, f.clone());
        let f_t = tangent_lift(&f0, &tc).expect("same chart");
        let mut df_x = Poly::zero();
        for j in 0..n {
            df_x += &f.diff(base.name(j)) * &tc.fibre().coordinate(j);
        }
        fun_lift.record(residual("f_T", &f_t, &KForm::function(tc.total(), df_x)));
        d_fun.record(residual(
            "d(f_T)",
            &f_t.d(),
            &tangent_lift(&f0.d(), &tc).expect("same chart"),
        ));

        let k = rng.random_range(1..=n.min(3));
        let a = random_form(&mut rng, &base, k, shape, 0.6);
        let a_t = tangent_lift(&a, &tc).expect("same chart");
        let fa_t = tangent_lift(&a.scale(&f), &tc).expect("same chart");
        let f_v = vertical_lift(&f0, &tc).expect("same chart").as_function().unwrap();
        let a_v = vertical_lift(&a, &tc).expect("same chart");
        let rhs = &a_v.scale(&f_t.as_function().unwrap()) + &a_t.scale(&f_v);
        leibniz.record(residual("(fα)_T", &fa_t, &rhs));

        let kb = 2 + t % 2;
        if kb <= n {
            let mut idx: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                idx.swap(i, rng.random_range(0..=i));
            }
            idx.truncate(kb);
            idx.sort_unstable();
            let lifted = tangent_lift(&KForm::basis(&base, &idx), &tc).expect("same chart");
            basis.record(residual("(dx^I)_T", &lifted, &basis_lift_expansion(&idx, &tc)));
        }

        let tau_a = tau(&a, &tc).expect("degree ≥ 1");
        let da = a.d();
        let rhs = if da.degree() <= n {
            &tau_a.d() + &tau(&da, &tc).expect("degree ≥ 1")
        } else {
            tau_a.d()
        };
        magic.record(residual("α_T", &a_t, &rhs));
        d_commute.record(residual(
            "d(α_T)",
            &a_t.d(),
            &tangent_lift(&da, &tc).expect("same chart"),
        ));
        tau_coord.record(residual("τ(α)", &tau_a, &tau_by_components(&a, &tc)));

        let w = random_form(&mut rng, &base, 2, shape, 0.6);
        let w_sharp = sharp_map(&w, &tc, &cc).expect("2-form on base");
        let tau_w = tau(&w, &tc).expect("degree 2");
        theta.record(residual(
            "τ(ω)",
            &tau_w,
            &w_sharp.pullback(&cc.theta_can()).expect("same chart"),
        ));
        let w_t = tangent_lift(&w, &tc).expect("same chart");
        let rhs = &-w_sharp.pullback(&cc.omega_can()).expect("same chart")
            + &tau(&w.d(), &tc).expect("degree 3");
        omega.record(residual("ω_T", &w_t, &rhs));
        sharp.record(residual(
            "ω_T",
            &w_t,
            &tangent_lift_via_sharp(&w, &tc).expect("2-form"),
        ));
    }
    IdentityReport {
        suite: "tangent lift".into(),
        seed: opts.seed,
        outcomes: vec![
            euler, fun_lift, d_fun, leibniz, basis, magic, d_commute, tau_coord, theta, omega,
            sharp,
        ],
    }
}
