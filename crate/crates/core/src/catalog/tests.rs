use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::imform::{check_im, check_morphism};
use crate::random::{random_form, random_invertible, PolyShape};
use crate::symexpr::{EqualityMode, NumericOptions, Verdict};

fn sym() -> EqualityMode {
    EqualityMode::Symbolic
}

#[test]
fn examples_pass_everything() {
    for e in builtin_examples() {
        let a = e.data.algebroid();
        assert_eq!(a.check_axioms(&sym()).verdict(), Verdict::Pass, "{}", e.name);
        assert_eq!(check_im(&e.data, &sym()).verdict(), Verdict::Pass, "{}", e.name);
        let m = check_morphism(&e.data, &sym());
        assert_eq!(m.verdict, Verdict::Pass, "{}\n{}", e.name, m.to_text());
    }
}

#[test]
fn mutations_fail_exactly_their_cases() {
    let ms = mutations();
    assert!(ms.len() >= 6);
    for m in ms {
        let im = check_im(&m.data, &sym());
        assert_eq!(im.im1.passed(), !m.breaks_im1, "{} IM1", m.name);
        assert_eq!(im.im2.passed(), !m.breaks_im2, "{} IM2", m.name);
        let rep = check_morphism(&m.data, &sym());
        assert_eq!(rep.verdict, im.verdict(), "{}", m.name);
        assert_eq!(rep.failing(), m.failing_cases, "{}\n{}", m.name, rep.to_text());
    }
}

#[test]
fn lookup_by_name() {
    for name in names() {
        let found = im_example(name).is_some()
            || algebroid(name).is_some()
            || dirac_example(name).is_some()
            || pair_example(name).is_some();
        assert!(found, "{name}");
    }
    assert!(im_example("nope").is_none());
    assert_eq!(algebroid("so3_koszul").unwrap().rank(), 3);
}

#[test]
fn koszul_entry_relations() {
    let d = im_example("so3_koszul").unwrap();
    let a = d.algebroid();
    use crate::algebroid::Section;
    let br = a.bracket(&Section::basis(3, 0), &Section::basis(3, 1)).unwrap();
    assert_eq!(br, Section::basis(3, 2));
}

#[test]
fn dirac_graphs_accepted() {
    let opts = DiracOptions::default();
    for name in ["graph_closed", "graph_twisted"] {
        let f = dirac_example(name).unwrap();
        let rep = check_dirac(&f, &opts);
        assert_eq!(rep.verdict, Verdict::Pass, "{name}\n{}", rep.to_text());
        assert!(rep.involutivity.max_residual < 1e-8);
        assert_eq!(rep.involutivity.cases, 100 * f.base().dim() * (f.base().dim() - 1) / 2);
        let data = dirac_to_im(&f, &opts).unwrap();
        // σ = pr_{T*} on the graph of β is β♯
        let beta = if name == "graph_closed" { beta_r2() } else { beta_r3() };
        assert_eq!(data.sigma(), flat(&beta).as_slice());
    }
}

#[test]
fn dirac_rejections() {
    let opts = DiracOptions::default();
    let err = dirac_to_im(&dirac_example("non_isotropic").unwrap(), &opts).unwrap_err();
    assert!(matches!(err, DiracError::NotIsotropic { ref pair, .. } if pair == "e1, e1"), "{err}");
    let err = dirac_to_im(&dirac_example("graph_untwisted_nonclosed").unwrap(), &opts).unwrap_err();
    assert!(matches!(err, DiracError::NotInvolutive { .. }), "{err}");
    let r3 = crate::cartan::Chart::standard("x", 3);
    let zero = vec![vec![crate::symexpr::Poly::zero(); 3]; 3];
    let degenerate = DiracFrame::new(&r3, zero.clone(), zero, KForm::zero(&r3, 3)).unwrap();
    assert!(matches!(dirac_to_im(&degenerate, &opts), Err(DiracError::RankDeficient { rank: 0, .. })));
}

#[test]
fn dirac_frame_change_invariance() {
    let opts = DiracOptions {
        numeric: NumericOptions::default().with_samples(20),
        ..DiracOptions::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (name, f) in dirac_examples() {
        let before = check_dirac(&f, &opts).verdict;
        let m = random_invertible(&mut rng, f.base().dim(), 2);
        let after = check_dirac(&f.transformed(&m), &opts);
        assert_eq!(before, after.verdict, "{name}\n{}", after.to_text());
    }
}

#[test]
fn pair_groupoid_examples() {
    for (beta, phi) in [(beta_r2(), "0"), (beta_r3(), "dx1∧dx2∧dx3")] {
        let rep = pair_groupoid_check(&PairGroupoidModel::telescoped(&beta), &sym());
        assert_eq!(rep.verdict, Verdict::Pass, "{}", rep.to_text());
        assert_eq!(rep.phi, phi);
        let data = rep.data.as_ref().unwrap();
        // cross-check with the catalog's TM example
        assert_eq!(data.sigma(), tangent_example(&beta).sigma());
        assert_eq!(data.phi(), tangent_example(&beta).phi());
        assert!(rep.relation.as_ref().unwrap().passed());
    }
}

#[test]
fn pair_groupoid_sign_mutation() {
    for beta in [beta_r2(), beta_r3()] {
        let rep = pair_groupoid_check(&PairGroupoidModel::summed(&beta), &sym());
        assert_eq!(rep.multiplicative.verdict, Verdict::Fail);
        assert_eq!(rep.verdict, Verdict::Fail);
        let w = rep.multiplicative.witness.as_ref().unwrap();
        assert!(w.case.starts_with("m^*ω − p₁^*ω − p₂^*ω on d"), "{}", w.case);
        assert!(rep.structure.passed());
    }
    // with dβ ≠ 0 the summed form is not relatively closed either
    let rep = pair_groupoid_check(&PairGroupoidModel::summed(&beta_r3()), &sym());
    assert!(!rep.relatively_closed.passed());
    assert!(rep.relation.is_none());
    assert!(rep.to_text().contains("not relatively φ-closed"));
}

#[test]
fn telescoped_random_beta_is_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 2..=3 {
        let base = crate::cartan::Chart::standard("x", n);
        for _ in 0..4 {
            let beta = random_form(&mut rng, &base, 2, PolyShape::default(), 0.7);
            let rep = pair_groupoid_check(&PairGroupoidModel::telescoped(&beta), &sym());
            assert_eq!(rep.verdict, Verdict::Pass, "{beta}\n{}", rep.to_text());
        }
    }
}

#[test]
fn pair_charts() {
    let m = PairGroupoidModel::telescoped(&beta_r2());
    assert_eq!(m.chart().to_string(), "x1,x2,y1,y2");
    let odd = crate::cartan::Chart::parse("a,b").unwrap();
    assert_eq!(PairGroupoidModel::groupoid_chart(&odd).to_string(), "a,b,a_y,b_y");
}
