//! Built-in worked examples: IM 2-forms, their targeted mutations, Dirac
//! frames and pair-groupoid models.

mod dirac;
mod pair;

use crate::algebroid::{zero_structure, LieAlgebroid};
use crate::cartan::{parse_form, Chart, KForm};
use crate::imform::ImData;
use crate::symexpr::Poly;

pub use dirac::{check_dirac, dirac_to_im, DiracError, DiracFrame, DiracOptions, DiracReport};
pub use pair::{pair_groupoid_check, PairGroupoidModel, PairReport};

/// A named IM example expected to pass every check.
#[derive(Clone, Debug)]
pub struct Example {
    pub name: &'static str,
    pub summary: &'static str,
    pub data: ImData,
}

/// A deliberately broken IM example and the morphism cases it must fail.
#[derive(Clone, Debug)]
pub struct Mutation {
    pub name: &'static str,
    pub summary: &'static str,
    pub data: ImData,
    pub breaks_im1: bool,
    pub breaks_im2: bool,
    /// Exactly the failing cases of [`crate::imform::check_morphism`].
    pub failing_cases: &'static [&'static str],
}

const CORE_ANCHOR: &str = "anchor (core sections)";
const LINEAR_ANCHOR: &str = "anchor (linear sections)";
const CORE_LINEAR: &str = "bracket core–linear";
const LINEAR_LINEAR: &str = "bracket linear–linear";

fn form(src: &str, chart: &Chart) -> KForm {
    parse_form(src, chart).expect("built-in form parses")
}

fn identity(n: usize) -> Vec<Vec<Poly>> {
    (0..n)
        .map(|i| (0..n).map(|j| Poly::int((i == j) as i64)).collect())
        .collect()
}

/// `σ = β♯` as a matrix `σ_jd = β(e_d, ∂_j)`.
pub fn flat(beta: &KForm) -> Vec<Vec<Poly>> {
    let n = beta.chart().dim();
    (0..n).map(|j| (0..n).map(|d| beta.component(&[d, j])).collect()).collect()
}

/// `β = x2 dx1∧dx3` on ℝ³.
pub fn beta_r3() -> KForm {
    form("x2*dx1^dx3", &Chart::standard("x", 3))
}

/// `β = x1 dx1∧dx2` on ℝ².
pub fn beta_r2() -> KForm {
    form("x1*dx1^dx2", &Chart::standard("x", 2))
}

/// `A = TM`, `σ = β♯`, `φ = −dβ`.
pub fn tangent_example(beta: &KForm) -> ImData {
    let base = beta.chart().clone();
    ImData::new(LieAlgebroid::tangent_bundle(&base), flat(beta), -&beta.d()).expect("−dβ is closed")
}

fn affine_line() -> LieAlgebroid {
    // [e1, e2] = e2
    let mut c = zero_structure(2);
    c[0][1][1] = Poly::one();
    c[1][0][1] = Poly::int(-1);
    LieAlgebroid::lie_algebra(c).expect("well formed")
}

pub fn builtin_examples() -> Vec<Example> {
    let point = |a: LieAlgebroid| ImData::untwisted(a, Vec::new()).expect("empty σ over a point");
    vec![
        Example {
            name: "tm_beta",
            summary: "A = Tℝ³, σ = β♯ for β = x2 dx1∧dx3, φ = −dβ = dx1∧dx2∧dx3",
            data: tangent_example(&beta_r3()),
        },
        Example {
            name: "tm_closed",
            summary: "A = Tℝ², σ = β♯ for the closed β = x1 dx1∧dx2, φ = 0",
            data: tangent_example(&beta_r2()),
        },
        Example {
            name: "so3_koszul",
            summary: "Koszul algebroid T*ℝ³ of the linear Poisson structure of so(3), σ = id, φ = 0",
            data: ImData::untwisted(LieAlgebroid::so3_koszul(), identity(3)).expect("valid"),
        },
        Example {
            name: "so3_point",
            summary: "so(3) over a point, ρ = 0, σ = 0, φ = 0",
            data: point(LieAlgebroid::so3()),
        },
        Example {
            name: "affine_point",
            summary: "the 2-dimensional Lie algebra [e1,e2] = e2 over a point, σ = 0, φ = 0",
            data: point(affine_line()),
        },
    ]
}

pub fn mutations() -> Vec<Mutation> {
    let r3 = Chart::standard("x", 3);
    let beta = beta_r3();
    let tm = LieAlgebroid::tangent_bundle(&r3);
    let good = tangent_example(&beta);
    let mut plus_metric = good.sigma().to_vec();
    for (j, row) in plus_metric.iter_mut().enumerate() {
        row[j] = &row[j] + &Poly::one();
    }
    let koszul = ImData::untwisted(LieAlgebroid::so3_koszul(), identity(3)).expect("valid");
    let mut scaled = identity(3);
    scaled[0][0] = Poly::int(2);
    let r2 = Chart::standard("x", 2);
    vec![
        Mutation {
            name: "tm_sigma_symmetric",
            summary: "A = Tℝ², σ = id (a symmetric σ)",
            data: ImData::untwisted(LieAlgebroid::tangent_bundle(&r2), identity(2)).expect("valid"),
            breaks_im1: true,
            breaks_im2: false,
            failing_cases: &[CORE_ANCHOR],
        },
        Mutation {
            name: "tm_beta_plus_metric",
            summary: "tm_beta with the identity matrix added to σ",
            data: good.with_sigma(plus_metric).expect("valid"),
            breaks_im1: true,
            breaks_im2: false,
            failing_cases: &[CORE_ANCHOR],
        },
        Mutation {
            name: "so3_koszul_scaled_row",
            summary: "so3_koszul with the first row of σ doubled",
            data: koszul.with_sigma(scaled).expect("valid"),
            breaks_im1: true,
            breaks_im2: true,
            failing_cases: &[CORE_ANCHOR, LINEAR_ANCHOR, CORE_LINEAR],
        },
        Mutation {
            name: "tm_beta_dropped_phi",
            summary: "tm_beta with the twisting φ dropped",
            data: ImData::untwisted(tm.clone(), flat(&beta)).expect("valid"),
            breaks_im1: false,
            breaks_im2: true,
            failing_cases: &[LINEAR_ANCHOR, CORE_LINEAR],
        },
        Mutation {
            name: "tm_beta_flipped_phi",
            summary: "tm_beta with φ = +dβ",
            data: good.with_phi(beta.d()).expect("valid"),
            breaks_im1: false,
            breaks_im2: true,
            failing_cases: &[LINEAR_ANCHOR, CORE_LINEAR],
        },
        Mutation {
            name: "tm_beta_perturbed_sigma",
            summary: "tm_beta with σ = (β + x1 dx2∧dx3)♯ but φ unchanged",
            data: good
                .with_sigma(flat(&form("x2*dx1^dx3 + x1*dx2^dx3", &r3)))
                .expect("valid"),
            breaks_im1: false,
            breaks_im2: true,
            failing_cases: &[LINEAR_ANCHOR, CORE_LINEAR],
        },
        Mutation {
            name: "so3_koszul_twisted",
            summary: "so3_koszul with φ = dx1∧dx2∧dx3",
            data: koszul.with_phi(form("dx1^dx2^dx3", &r3)).expect("valid"),
            breaks_im1: false,
            breaks_im2: true,
            failing_cases: &[LINEAR_ANCHOR, CORE_LINEAR, LINEAR_LINEAR],
        },
    ]
}

/// Named algebroids, for axiom checks.
pub fn builtin_algebroids() -> Vec<(&'static str, LieAlgebroid)> {
    vec![
        ("tm_r2", LieAlgebroid::tangent_bundle(&Chart::standard("x", 2))),
        ("tm_r3", LieAlgebroid::tangent_bundle(&Chart::standard("x", 3))),
        ("so3", LieAlgebroid::so3()),
        ("so3_koszul", LieAlgebroid::so3_koszul()),
        ("affine", affine_line()),
    ]
}

pub fn algebroid(name: &str) -> Option<LieAlgebroid> {
    builtin_algebroids()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, a)| a)
        .or_else(|| im_example(name).map(|d| d.algebroid().clone()))
}

/// Positive example or mutation by name.
pub fn im_example(name: &str) -> Option<ImData> {
    builtin_examples()
        .into_iter()
        .find(|e| e.name == name)
        .map(|e| e.data)
        .or_else(|| mutations().into_iter().find(|m| m.name == name).map(|m| m.data))
}

/// Dirac frames: two accepted graphs, an isotropy violation and a graph
/// of a non-closed form without its twist.
pub fn dirac_examples() -> Vec<(&'static str, DiracFrame)> {
    let r3 = Chart::standard("x", 3);
    let beta = beta_r3();
    vec![
        ("graph_closed", DiracFrame::graph(&beta_r2(), &KForm::zero(&Chart::standard("x", 2), 3)).expect("valid")),
        ("graph_twisted", DiracFrame::graph(&beta, &-&beta.d()).expect("valid")),
        ("graph_untwisted_nonclosed", DiracFrame::graph(&beta, &KForm::zero(&r3, 3)).expect("valid")),
        (
            "non_isotropic",
            DiracFrame::new(
                &r3,
                identity(3),
                vec![
                    vec![Poly::one(), Poly::zero(), Poly::zero()],
                    vec![Poly::zero(); 3],
                    vec![Poly::zero(); 3],
                ],
                KForm::zero(&r3, 3),
            )
            .expect("valid shapes"),
        ),
    ]
}

pub fn dirac_example(name: &str) -> Option<DiracFrame> {
    dirac_examples().into_iter().find(|(n, _)| *n == name).map(|(_, f)| f)
}

/// Pair-groupoid models: the telescoped `ω = t^*β − s^*β` for both
/// catalog forms, and the sign mutation `t^*β + s^*β`.
pub fn pair_examples() -> Vec<(&'static str, PairGroupoidModel)> {
    vec![
        ("pair_r2", PairGroupoidModel::telescoped(&beta_r2())),
        ("pair_r3", PairGroupoidModel::telescoped(&beta_r3())),
        ("pair_r2_sum", PairGroupoidModel::summed(&beta_r2())),
        ("pair_r3_sum", PairGroupoidModel::summed(&beta_r3())),
    ]
}

pub fn pair_example(name: &str) -> Option<PairGroupoidModel> {
    pair_examples().into_iter().find(|(n, _)| *n == name).map(|(_, m)| m)
}

/// Every name accepted by [`im_example`], [`algebroid`], [`dirac_example`]
/// and [`pair_example`].
pub fn names() -> Vec<&'static str> {
    let mut out: Vec<&'static str> = builtin_examples().iter().map(|e| e.name).collect();
    out.extend(mutations().iter().map(|m| m.name));
    out.extend(builtin_algebroids().iter().map(|(n, _)| *n).filter(|n| *n != "so3_koszul"));
    out.extend(dirac_examples().iter().map(|(n, _)| *n));
    out.extend(pair_examples().iter().map(|(n, _)| *n));
    out
}

#[cfg(test)]
mod tests;
