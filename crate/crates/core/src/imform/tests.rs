use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::cartan::{parse_form, Chart};
use crate::random::{random_poly, random_vfield, PolyShape};
use crate::symexpr::{NumericOptions, Point};
use crate::tanlift::tangent_lift;

fn p(s: &str) -> Poly {
    Poly::parse(s).unwrap()
}

fn sym() -> EqualityMode {
    EqualityMode::Symbolic
}

fn mat(rows: &[&[&str]]) -> Vec<Vec<Poly>> {
    rows.iter().map(|r| r.iter().map(|s| p(s)).collect()).collect()
}

fn identity(n: usize) -> Vec<Vec<Poly>> {
    (0..n)
        .map(|i| (0..n).map(|j| Poly::int((i == j) as i64)).collect())
        .collect()
}

/// `σ = β♯`, i.e. `σ_jd = β_dj`.
fn flat(beta: &KForm) -> Vec<Vec<Poly>> {
    let n = beta.chart().dim();
    (0..n).map(|j| (0..n).map(|d| beta.component(&[d, j])).collect()).collect()
}

fn r3() -> Chart {
    Chart::standard("x", 3)
}

/// `TM` over ℝ³ with `σ = β♯`, `β = x2 dx1∧dx3` and `φ = −dβ`.
fn tm_beta() -> ImData {
    let base = r3();
    let beta = parse_form("x2*dx1^dx3", &base).unwrap();
    let phi = -&beta.d();
    ImData::new(LieAlgebroid::tangent_bundle(&base), flat(&beta), phi).unwrap()
}

fn so3_koszul() -> ImData {
    ImData::untwisted(LieAlgebroid::so3_koszul(), identity(3)).unwrap()
}

fn so3_point() -> ImData {
    let g = LieAlgebroid::so3();
    ImData::untwisted(g, Vec::new()).unwrap()
}

fn tm_closed() -> ImData {
    let base = Chart::standard("x", 2);
    let beta = parse_form("x1*dx1^dx2", &base).unwrap();
    ImData::untwisted(LieAlgebroid::tangent_bundle(&base), flat(&beta)).unwrap()
}

fn positives() -> Vec<(&'static str, ImData)> {
    vec![
        ("tm_beta", tm_beta()),
        ("so3_koszul", so3_koszul()),
        ("so3_point", so3_point()),
        ("tm_closed", tm_closed()),
    ]
}

#[test]
fn tm_beta_data() {
    let d = tm_beta();
    assert_eq!(d.phi().to_string(), "dx1∧dx2∧dx3");
    assert_eq!(d.sigma()[2][0], p("x2"));
    assert_eq!(d.sigma()[0][2], p("-x2"));
}

#[test]
fn positive_examples_are_im() {
    for (name, d) in positives() {
        let rep = check_im(&d, &sym());
        assert_eq!(rep.verdict(), Verdict::Pass, "{name}\n{}", rep.to_text());
    }
}

#[test]
fn tm_beta_matches_cartan_oracle() {
    // for TM and σ = β♯ the IM conditions reduce to
    // i_{[X,Y]}β = L_X i_Yβ − i_Y d i_Xβ + i_Y i_X φ with φ = −dβ, on arbitrary X, Y
    let d = tm_beta();
    let base = r3();
    let beta = parse_form("x2*dx1^dx3", &base).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let x = random_vfield(&mut rng, &base, PolyShape::default());
        let y = random_vfield(&mut rng, &base, PolyShape::default());
        let lhs = beta.interior(&x.bracket(&y).unwrap()).unwrap();
        let rhs = &(&beta.interior(&y).unwrap().lie_derivative(&x).unwrap()
            - &beta.interior(&x).unwrap().d().interior(&y).unwrap())
            + &d.phi().interior(&x).unwrap().interior(&y).unwrap();
        assert_eq!(lhs, rhs);
        let u = Section::new(x.comps().to_vec());
        let v = Section::new(y.comps().to_vec());
        assert!(d.im2_defect(&u, &v).unwrap().is_zero());
        assert!(d.im1_defect(&u, &v).unwrap().is_zero());
    }
}

#[test]
fn scaled_row_fails_im1_with_witness() {
    let d = so3_koszul();
    let mut s = d.sigma().to_vec();
    for x in s[0].iter_mut() {
        *x = x.scale(&crate::symexpr::integer(2));
    }
    let bad = d.with_sigma(s).unwrap();
    let rep = check_im(&bad, &sym());
    assert_eq!(rep.im1.verdict, Verdict::Fail);
    let w = rep.im1.witness.as_ref().unwrap();
    assert!(w.case.starts_with("(a,b) = (dx"), "{}", w.case);
    // ⟨σe1, ρe2⟩ + ⟨σe2, ρe1⟩ = 2π²¹ + π¹² = −x3
    let e = |a| Section::basis(3, a);
    assert_eq!(bad.im1_defect(&e(0), &e(1)).unwrap(), p("-x3"));
}

#[test]
fn im2_defect_tensoriality() {
    // IM2(fu, v) − f IM2(u, v) = −IM1(u, v) df and IM2(u, fv) = f IM2(u, v)
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let d = so3_koszul();
    let mut s = d.sigma().to_vec();
    s[0][1] = p("x2");
    let d = d.with_sigma(s).unwrap();
    let base = d.algebroid().base().clone();
    let rand_sec = |rng: &mut ChaCha8Rng| {
        Section::new((0..3).map(|_| random_poly(rng, base.names(), PolyShape::default())).collect())
    };
    for _ in 0..3 {
        let (u, v) = (rand_sec(&mut rng), rand_sec(&mut rng));
        let f = random_poly(&mut rng, base.names(), PolyShape::default());
        let base_defect = d.im2_defect(&u, &v).unwrap();
        let left = &d.im2_defect(&u.scale(&f), &v).unwrap() - &base_defect.scale(&f);
        let df = KForm::function(&base, f.clone()).d();
        assert_eq!(left, df.scale(&-d.im1_defect(&u, &v).unwrap()));
        assert_eq!(d.im2_defect(&u, &v.scale(&f)).unwrap(), base_defect.scale(&f));
    }
}

#[test]
fn rejects_bad_phi_and_sigma() {
    let base = r3();
    let tm = LieAlgebroid::tangent_bundle(&base);
    let phi = parse_form("x1*dx1^dx2^dx3", &base).unwrap();
    assert!(ImData::new(tm.clone(), identity(3), phi).is_ok());
    let four = Chart::standard("x", 4);
    let tm4 = LieAlgebroid::tangent_bundle(&four);
    let open = parse_form("x4*dx1^dx2^dx3", &four).unwrap();
    assert!(matches!(ImData::new(tm4, identity(4), open), Err(ImError::PhiNotClosed(_))));
    let two = parse_form("dx1^dx2", &base).unwrap();
    assert!(matches!(ImData::new(tm.clone(), identity(3), two), Err(ImError::PhiDegree(2))));
    assert!(matches!(ImData::untwisted(tm.clone(), identity(2)), Err(ImError::SigmaShape { .. })));
    assert!(ImData::untwisted(tm, mat(&[&["y", "0", "0"], &["0"; 3], &["0"; 3]])).is_err());
}

#[test]
fn lambda_of_identity_sigma() {
    let d = so3_koszul();
    let lf = build_lambda(&d);
    let total = lf.chart().total().clone();
    let expected = parse_form("-dx1^du1 - dx2^du2 - dx3^du3", &total).unwrap();
    assert_eq!(lf.form(), &expected);
    let m1 = Poly::int(-1);
    for j in 0..3 {
        for dd in 0..3 {
            assert_eq!(lf.covering()[j][dd], if j == dd { m1.clone() } else { Poly::zero() });
        }
    }
}

#[test]
fn lambda_of_zero_sigma_is_twist_term() {
    // σ = 0: Λ = −½ φ_ijk ρᵏ_d uᵈ dxⁱ∧dxʲ
    let base = r3();
    let a = LieAlgebroid::so3_koszul();
    let phi = parse_form("dx1^dx2^dx3", &base).unwrap();
    let zero = vec![vec![Poly::zero(); 3]; 3];
    let d = ImData::new(a.clone(), zero, phi.clone()).unwrap();
    let lf = build_lambda(&d);
    let total = lf.chart().total().clone();
    let mut expected = KForm::zero(&total, 2);
    for i in 0..3 {
        for j in i + 1..3 {
            let mut c = Poly::zero();
            for k in 0..3 {
                for dd in 0..3 {
                    c -= &(&phi.component(&[i, j, k]) * a.rho(k, dd)) * &lf.chart().fibre().coordinate(dd);
                }
            }
            expected.add_term(&[i, j], c);
        }
    }
    assert_eq!(lf.form(), &expected);
    assert!(lf.covering().iter().flatten().all(Poly::is_zero));
    // the so3 anchor kills φ(·,·,ρ(u)) only off the fibre: Λ is nonzero
    assert!(!expected.is_zero());
}

#[test]
fn lambda_of_tm_is_tangent_lift() {
    // on A = TM with σ = β♯ and φ = −dβ, Λ is the tangent lift β_T
    for (beta_src, n) in [("x2*dx1^dx3", 3), ("x1*dx1^dx2", 2), ("x1*x2*dx1^dx2 + x3^2*dx2^dx3", 3)] {
        let base = Chart::standard("x", n);
        let beta = parse_form(beta_src, &base).unwrap();
        let d = ImData::new(LieAlgebroid::tangent_bundle(&base), flat(&beta), -&beta.d()).unwrap();
        let lf = build_lambda(&d);
        let tc = TangentChart::with_fibre(&base, lf.chart().fibre()).unwrap();
        assert_eq!(lf.form(), &tangent_lift(&beta, &tc).unwrap(), "{beta_src}");
    }
}

#[test]
fn covering_is_minus_sigma_transpose() {
    for (name, d) in positives() {
        let lf = build_lambda(&d);
        for (j, row) in d.sigma().iter().enumerate() {
            for (dd, s) in row.iter().enumerate() {
                assert_eq!(lf.covering()[j][dd], -s.clone(), "{name}");
            }
        }
    }
}

fn mutated() -> Vec<(&'static str, ImData)> {
    let base = r3();
    let beta = parse_form("x2*dx1^dx3", &base).unwrap();
    let tm = LieAlgebroid::tangent_bundle(&base);
    let plus_g: Vec<Vec<Poly>> = flat(&beta)
        .iter()
        .enumerate()
        .map(|(j, row)| {
            row.iter()
                .enumerate()
                .map(|(dd, s)| if j == dd { s + &Poly::one() } else { s.clone() })
                .collect()
        })
        .collect();
    let bent = parse_form("x2*dx1^dx3 + x1*dx2^dx3", &base).unwrap();
    vec![
        ("sigma_plus_metric", ImData::new(tm.clone(), plus_g, -&beta.d()).unwrap()),
        ("dropped_phi", ImData::untwisted(tm.clone(), flat(&beta)).unwrap()),
        ("flipped_phi", ImData::new(tm.clone(), flat(&beta), beta.d()).unwrap()),
        ("wrong_beta", ImData::new(tm, flat(&bent), -&beta.d()).unwrap()),
        (
            "twisted_koszul",
            so3_koszul().with_phi(parse_form("dx1^dx2^dx3", &base).unwrap()).unwrap(),
        ),
    ]
}

#[test]
fn lambda_sharp_matches_contraction() {
    let mut all = positives();
    all.extend(mutated());
    for (name, d) in &all {
        let lf = build_lambda(d);
        let closed = lambda_sharp(d);
        let contracted = sharp_by_contraction(&lf);
        assert_eq!(closed.source(), contracted.source(), "{name}");
        assert_eq!(closed.comps(), contracted.comps(), "{name}");
    }
}

#[test]
fn lambda_sharp_numeric_agreement() {
    let opts = NumericOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for (name, d) in mutated().into_iter().chain(positives()) {
        let closed = lambda_sharp(&d);
        let contracted = sharp_by_contraction(&build_lambda(&d));
        for _ in 0..50 {
            let pt: Point<f64> = closed
                .source()
                .names()
                .iter()
                .map(|s| (s.to_string(), rng.random_range(-2.0..2.0)))
                .collect();
            let (a, b) = (closed.apply(&pt).unwrap(), contracted.apply(&pt).unwrap());
            for ((_, x), (_, y)) in a.iter().zip(b.iter()) {
                assert!((x - y).abs() < 1e-10, "{name}");
            }
        }
    }
}

#[test]
fn lambda_sharp_of_identity() {
    let sharp = lambda_sharp(&so3_koszul());
    let shown: Vec<String> = sharp.comps().iter().map(|c| c.to_string()).collect();
    assert_eq!(shown, ["x1", "x2", "x3", "u1", "u2", "u3", "u̇1", "u̇2", "u̇3", "-ẋ1", "-ẋ2", "-ẋ3"]);
}

#[test]
fn generator_images_decompose() {
    // Λ♯(Te_a) = e_aᴸ + f^a_j d̂xʲ with f^a_j = −φ_ijk ρᵏ_a ẋⁱ + ẋˡ(∂_lσ_ja − ∂_jσ_la),
    // Λ♯(ê_a) = σ_ja d̂xʲ
    let d = tm_beta();
    let (n, r) = (3, 3);
    let images = generator_images(&d);
    let xd: Vec<Poly> = (1..=3).map(|i| p(&format!("ẋ{i}"))).collect();
    let base = d.algebroid().base().clone();
    for a in 0..r {
        let lin = &images[a];
        for m in 0..r {
            assert_eq!(lin[n + m], Poly::int((m == a) as i64));
        }
        for j in 0..n {
            let mut f = Poly::zero();
            for i in 0..n {
                for k in 0..n {
                    f -= &(&d.phi().component(&[i, j, k]) * d.algebroid().rho(k, a)) * &xd[i];
                }
            }
            for l in 0..n {
                let curl = &d.sigma()[j][a].diff(base.name(l)) - &d.sigma()[l][a].diff(base.name(j));
                f += &xd[l] * &curl;
            }
            assert_eq!(lin[n + r + j], f);
            let core = &images[r + a];
            assert!(core[n + j].is_zero() || j >= r);
            assert_eq!(core[n + r + j], d.sigma()[j][a]);
        }
    }
}

#[test]
fn analyze_sigma_pullback() {
    // σ^*ω_can is linear, closed and has λ = σᵗ
    let d = tm_beta();
    let chart = d.a_chart();
    let cc = CotangentChart::new(d.algebroid().base(), "p");
    let form = cc
        .bundle_map(chart.total(), d.sigma())
        .unwrap()
        .pullback(&cc.omega_can())
        .unwrap();
    let an = analyze_linear(&chart, &form).unwrap();
    assert!(an.linear && an.closed);
    assert_eq!(an.reconstructs, Some(true));
    assert_eq!(an.lambda.as_deref(), Some(d.sigma()));
    assert_eq!(an.biconditional_holds(), Some(true));
}

#[test]
fn analyze_twist_term() {
    let d = tm_beta();
    let chart = d.a_chart();
    let tc = TangentChart::new(d.algebroid().base());
    let form = d
        .anchor_map(&chart, &tc)
        .unwrap()
        .pullback(&tau(d.phi(), &tc).unwrap())
        .unwrap();
    // linear with zero covering map, so closed only when it vanishes
    let an = analyze_linear(&chart, &form).unwrap();
    assert!(an.linear && !an.closed);
    assert_eq!(an.reconstructs, Some(false));
    assert_eq!(an.covering_zero_on_fibres, Some(true));
    assert_eq!(an.biconditional_holds(), Some(true));
}

#[test]
fn analyze_nonclosed_and_nonlinear() {
    let chart = BundleChart::new(&Chart::standard("x", 2), "u", 1);
    let total = chart.total().clone();
    let an = analyze_linear(&chart, &parse_form("u1*dx1^dx2", &total).unwrap()).unwrap();
    assert!(an.linear && !an.closed);
    assert_eq!(an.reconstructs, Some(false));
    assert_eq!(an.biconditional_holds(), Some(true));
    let bad = analyze_linear(&chart, &parse_form("u1^2*dx1^dx2 + u1*dx1^du1", &total).unwrap()).unwrap();
    assert!(!bad.linear);
    assert_eq!(bad.violations.len(), 2, "{:?}", bad.violations);
    let vert = analyze_linear(&chart, &parse_form("dx1^du1", &total).unwrap()).unwrap();
    assert!(vert.linear && vert.closed && vert.reconstructs == Some(true));
}

#[test]
fn random_linear_forms_satisfy_biconditional() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let chart = BundleChart::new(&Chart::standard("x", 2), "u", 2);
    let shape = PolyShape {
        max_terms: 2,
        max_degree: 2,
        coeff: 3,
    };
    let base_names = chart.base().names().to_vec();
    for _ in 0..10 {
        let sigma: Vec<Vec<Poly>> = (0..2)
            .map(|_| (0..2).map(|_| random_poly(&mut rng, &base_names, shape)).collect())
            .collect();
        let cc = CotangentChart::new(chart.base(), "p");
        let mut form = cc
            .bundle_map(chart.total(), &sigma)
            .unwrap()
            .pullback(&cc.omega_can())
            .unwrap();
        if rng.random_bool(0.5) {
            let c = random_poly(&mut rng, &base_names, shape);
            form.add_term(&[0, 1], &c * &chart.fibre().coordinate(0));
        }
        let an = analyze_linear(&chart, &form).unwrap();
        assert!(an.linear);
        assert_eq!(an.biconditional_holds(), Some(true), "{}", an.to_text());
    }
}

#[test]
fn morphism_iff_im_on_examples() {
    for (name, d) in positives() {
        let rep = check_morphism(&d, &sym());
        assert_eq!(rep.verdict, Verdict::Pass, "{name}\n{}", rep.to_text());
        assert_eq!(rep.im.verdict(), Verdict::Pass);
    }
}

#[test]
fn morphism_failures_match_predictions() {
    let expected: &[(&str, &[&str], bool, bool)] = &[
        ("sigma_plus_metric", &["anchor (core sections)"], false, true),
        ("dropped_phi", &["anchor (linear sections)", "bracket core–linear"], true, false),
        ("flipped_phi", &["anchor (linear sections)", "bracket core–linear"], true, false),
        ("wrong_beta", &["anchor (linear sections)", "bracket core–linear"], true, false),
        ("twisted_koszul", &["anchor (linear sections)", "bracket core–linear"], true, false),
    ];
    let all = mutated();
    for ((name, d), (ename, failing, im1, im2)) in all.iter().zip(expected) {
        assert_eq!(name, ename);
        let rep = check_morphism(d, &sym());
        assert_eq!(rep.verdict, Verdict::Fail, "{name}");
        assert_eq!(rep.im.im1.passed(), *im1, "{name}");
        assert_eq!(rep.im.im2.passed(), *im2, "{name}");
        let f = rep.failing();
        for want in *failing {
            assert!(f.contains(want), "{name}: {f:?}");
        }
        assert!(!f.contains(&"bracket core–core"), "{name}: {f:?}");
        assert!(!f.contains(&"covering"), "{name}");
    }
}

#[test]
fn numeric_mode_agrees() {
    let num = EqualityMode::Numeric(NumericOptions::default());
    for (name, d) in positives() {
        assert_eq!(check_morphism(&d, &num).verdict, Verdict::Pass, "{name}");
    }
    for (name, d) in mutated() {
        assert_eq!(check_im(&d, &num).verdict(), Verdict::Fail, "{name}");
    }
}
