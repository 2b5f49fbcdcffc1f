use super::*;
use crate::imform::check_im;
use crate::symexpr::Verdict;

fn load(src: &str) -> Result<Problem, ProblemError> {
    ProblemFile::from_toml(src)?.resolve()
}

#[test]
fn builtin_im_problem() {
    let src = r#"
kind = "im"
[options]
mode = "numeric"
samples = 10
[algebroid]
builtin = "so3_koszul"
[im]
sigma = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]
"#;
    let file = ProblemFile::from_toml(src).unwrap();
    assert_eq!(file.options.numeric().samples, 10);
    assert!(matches!(file.options.equality_mode(), EqualityMode::Numeric(_)));
    let Problem::Im(d) = file.resolve().unwrap() else { panic!() };
    assert_eq!(check_im(&d, &EqualityMode::Symbolic).verdict(), Verdict::Pass);
}

#[test]
fn inline_algebroid_with_structure() {
    let src = r#"
kind = "algebroid"
[algebroid]
n = 0
rho = []
C = [[["0", "0"], ["0", "1"]], [["0", "-1"], ["0", "0"]]]
"#;
    let Problem::Algebroid(a) = load(src).unwrap() else { panic!() };
    assert_eq!(a.rank(), 2);
    assert_eq!(a.c(0, 1, 1), &Poly::one());
}

#[test]
fn koszul_from_poisson() {
    let src = r#"
kind = "algebroid"
[algebroid]
chart = "x1,x2,x3"
poisson = [["0", "x3", "-x2"], ["-x3", "0", "x1"], ["x2", "-x1", "0"]]
"#;
    let Problem::Algebroid(a) = load(src).unwrap() else { panic!() };
    assert_eq!(a.rank(), 3);
    assert_eq!(a.check_axioms(&EqualityMode::Symbolic).verdict(), Verdict::Pass);
}

#[test]
fn schema_errors() {
    let cases = [
        ("kind = \"im\"\n[algebroid]\nbuiltin = \"so3\"\n", "needs a [im]"),
        ("kind = \"algebroid\"\n[algebroid]\nbuiltin = \"so3\"\n[im]\nsigma = []\n", "not allowed"),
        ("kind = \"algebroid\"\n[algebroid]\nbuiltin = \"nope\"\n", "unknown built-in"),
        ("kind = \"algebroid\"\n[algebroid]\nbuiltin = \"so3\"\nn = 2\n", "excludes"),
        ("kind = \"algebroid\"\n[algebroid]\nn = 2\nrho = [[\"1\"]]\n", "2×1 matrix"),
        ("kind = \"wat\"\n", "invalid TOML"),
        ("kind = \"algebroid\"\nextra = 1\n", "invalid TOML"),
        ("kind = \"dirac\"\n[dirac]\nchart = \"x1,x2\"\n", "either `graph`"),
    ];
    for (src, needle) in cases {
        let err = load(src).unwrap_err().to_string();
        assert!(err.contains(needle), "{src}\n→ {err}");
    }
    let err = load("kind = \"im\"\n[algebroid]\nbuiltin = \"tm_r2\"\n[im]\nsigma = [[\"1\", \"0\"], [\"0\", \"1\"]]\nphi = \"dx1\"\n").unwrap_err();
    assert!(matches!(err, ProblemError::Cartan(_)), "{err}");
}

#[test]
fn exports_round_trip() {
    for name in crate::catalog::names() {
        let file = export(name).unwrap_or_else(|| panic!("{name}"));
        let text = file.to_toml();
        let back = ProblemFile::from_toml(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        assert_eq!(back, file, "{name}");
        let problem = back.resolve().unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        match problem {
            Problem::Im(d) => {
                let orig = crate::catalog::im_example(name).unwrap();
                assert_eq!(d.sigma(), orig.sigma(), "{name}");
                assert_eq!(d.phi(), orig.phi(), "{name}");
                assert_eq!(d.algebroid(), orig.algebroid(), "{name}");
            }
            Problem::Dirac { frame, .. } => assert_eq!(frame, crate::catalog::dirac_example(name).unwrap()),
            Problem::PairGroupoid(m) => assert_eq!(m, crate::catalog::pair_example(name).unwrap()),
            Problem::Algebroid(a) => assert_eq!(a, crate::catalog::algebroid(name).unwrap()),
            other => panic!("{name}: {other:?}"),
        }
    }
}

#[test]
fn pair_from_beta() {
    let src = "kind = \"pair-groupoid\"\n[pair_groupoid]\nchart = \"x1,x2\"\nbeta = \"x1*dx1^dx2\"\ncombine = \"summed\"\n";
    let Problem::PairGroupoid(m) = load(src).unwrap() else { panic!() };
    assert_eq!(m, PairGroupoidModel::summed(&crate::catalog::beta_r2()));
}

#[test]
fn linear_form_problem() {
    let src = "kind = \"linear-form\"\n[linear_form]\nchart = \"x1,x2\"\nrank = 2\nform = \"du1^dx1 + x1*du2^dx2\"\n";
    let Problem::LinearForm { chart, form } = load(src).unwrap() else { panic!() };
    assert_eq!(chart.total().to_string(), "x1,x2,u1,u2");
    assert!(ProblemFile::from_linear(&chart, &form).to_toml().contains("rank = 2"));
}

#[test]
fn options_merge() {
    let file = Options { samples: Some(5), ..Options::default() };
    let cli = Options { samples: Some(7), seed: Some(9), ..Options::default() };
    let m = file.or(&cli);
    assert_eq!((m.samples, m.seed), (Some(5), Some(9)));
}
