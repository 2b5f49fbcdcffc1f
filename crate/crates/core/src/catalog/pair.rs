//! The pair groupoid `M × M ⇉ M` with `s(x,y) = y`, `t(x,y) = x`,
//! `m((x,y),(y,z)) = (x,z)`, and a 2-form `ω` on it.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebroid::{BundleChart, LieAlgebroid};
use crate::cartan::{CartanError, Chart, ChartMap, KForm};
use crate::imform::{build_lambda, ImData};
use crate::report::Check;
use crate::symexpr::{EqualityMode, Poly, Symbol, Verdict};
use crate::tanlift::{tangent_lift, TangentChart};

#[derive(Clone, Debug, PartialEq)]
pub struct PairGroupoidModel {
    base: Chart,
    /// `(x, y)`
    g: Chart,
    /// composable pairs `(x, y, z)`
    comp: Chart,
    omega: KForm,
}

fn copy_names(base: &Chart, letter: char, taken: &[String]) -> Vec<String> {
    base.names()
        .iter()
        .map(|n| {
            let mut chars = n.chars();
            let cand = match chars.next() {
                Some('x') => format!("{letter}{}", chars.as_str()),
                _ => format!("{n}_{letter}"),
            };
            let clash = |c: &str| base.contains(c) || taken.iter().any(|t| t == c);
            crate::tanlift::fresh(cand, &clash)
        })
        .collect()
}

impl PairGroupoidModel {
    /// `ω` must live on [`PairGroupoidModel::groupoid_chart`] for `base`.
    pub fn new(base: &Chart, omega: &KForm) -> Result<PairGroupoidModel, CartanError> {
        let (g, comp) = Self::charts(base);
        let omega = omega.embed(&g)?;
        Ok(PairGroupoidModel {
            base: base.clone(),
            g,
            comp,
            omega,
        })
    }

    fn charts(base: &Chart) -> (Chart, Chart) {
        let mut names: Vec<String> = base.names().iter().map(|s| s.to_string()).collect();
        let ys = copy_names(base, 'y', &names);
        names.extend(ys.iter().cloned());
        let zs = copy_names(base, 'z', &names);
        let g = Chart::new(&names).expect("fresh names");
        names.extend(zs);
        (g, Chart::new(&names).expect("fresh names"))
    }

    /// Chart `(x, y)` on `M × M`.
    pub fn groupoid_chart(base: &Chart) -> Chart {
        Self::charts(base).0
    }

    /// `ω = t^*β − s^*β`, multiplicative for every `β`.
    pub fn telescoped(beta: &KForm) -> PairGroupoidModel {
        Self::combined(beta, -1)
    }

    /// `ω = t^*β + s^*β`, which is not multiplicative unless `β = 0`.
    pub fn summed(beta: &KForm) -> PairGroupoidModel {
        Self::combined(beta, 1)
    }

    fn combined(beta: &KForm, sign: i64) -> PairGroupoidModel {
        let base = beta.chart().clone();
        let g = Self::groupoid_chart(&base);
        let probe = PairGroupoidModel {
            base: base.clone(),
            g: g.clone(),
            comp: Self::charts(&base).1,
            omega: KForm::zero(&g, 2),
        };
        let tb = probe.target().pullback(beta).expect("same chart");
        let sb = probe.source().pullback(beta).expect("same chart");
        let omega = &tb + &sb.scale(&Poly::int(sign));
        PairGroupoidModel { omega, ..probe }
    }

    pub fn base(&self) -> &Chart {
        &self.base
    }

    pub fn chart(&self) -> &Chart {
        &self.g
    }

    pub fn omega(&self) -> &KForm {
        &self.omega
    }

    fn n(&self) -> usize {
        self.base.dim()
    }

    fn block(&self, chart: &Chart, k: usize) -> Vec<Poly> {
        let n = self.n();
        (k * n..(k + 1) * n).map(|i| chart.coordinate(i)).collect()
    }

    fn map(&self, src: &Chart, dst: &Chart, blocks: &[usize]) -> ChartMap {
        let comps = blocks.iter().flat_map(|&k| self.block(src, k)).collect();
        ChartMap::new(src, dst, comps).expect("well formed")
    }

    pub fn source(&self) -> ChartMap {
        self.map(&self.g, &self.base, &[1])
    }

    pub fn target(&self) -> ChartMap {
        self.map(&self.g, &self.base, &[0])
    }

    pub fn multiplication(&self) -> ChartMap {
        self.map(&self.comp, &self.g, &[0, 2])
    }

    pub fn first(&self) -> ChartMap {
        self.map(&self.comp, &self.g, &[0, 1])
    }

    pub fn second(&self) -> ChartMap {
        self.map(&self.comp, &self.g, &[1, 2])
    }

    /// `y ↦ x` on functions of `(x, y)`: restriction to the units.
    fn at_units(&self, p: &Poly) -> Poly {
        let n = self.n();
        let sub: BTreeMap<Symbol, Poly> = (0..n)
            .map(|i| (self.g.names()[n + i].clone(), self.base.coordinate(i)))
            .collect();
        p.subs(&sub)
    }
}

/// Outcome of [`pair_groupoid_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub verdict: Verdict,
    /// `s∘m = s∘p₂`, `t∘m = t∘p₁`.
    pub structure: Check,
    pub multiplicative: Check,
    /// `LF(ω) = ι_A^*ω_T` on `A` with coordinates `(x, u)`.
    pub lie_form: String,
    /// `σ_ω`, rows `dxʲ`, columns `e_d`.
    pub sigma: Vec<Vec<String>>,
    pub phi: String,
    pub relatively_closed: Check,
    /// `LF(ω) + σ_ω^*ω_can + ρ^*τ(φ) = 0`; only run when `φ` is found.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<Check>,
    #[serde(skip)]
    pub data: Option<ImData>,
}

impl PairReport {
    pub fn to_text(&self) -> String {
        let mut s = String::from("pair groupoid\n");
        for c in [&self.structure, &self.multiplicative, &self.relatively_closed] {
            s.push_str(&format!("  {}\n", c.line().replace('\n', "\n  ")));
        }
        if let Some(r) = &self.relation {
            s.push_str(&format!("  {}\n", r.line().replace('\n', "\n  ")));
        }
        s.push_str(&format!("LF(ω) = {}\n", self.lie_form));
        let rows: Vec<String> = self.sigma.iter().map(|r| r.join(", ")).collect();
        s.push_str(&format!("σ_ω = [{}]\n", rows.join("; ")));
        s.push_str(&format!("φ = {}\n", self.phi));
        if !self.relatively_closed.passed() {
            s.push_str("ω is not relatively φ-closed\n");
        }
        s.push_str(&format!("verdict: {}\n", self.verdict));
        s
    }
}

/// Multiplicativity, the Lie form `LF(ω)`, `σ_ω`, recovery of `φ` from
/// `dω = s^*φ − t^*φ`, and the relation `LF(ω) = −(σ_ω^*ω_can + ρ^*τ(φ))`.
pub fn pair_groupoid_check(model: &PairGroupoidModel, mode: &EqualityMode) -> PairReport {
    let n = model.n();
    let (s, t, m, p1, p2) = (
        model.source(),
        model.target(),
        model.multiplication(),
        model.first(),
        model.second(),
    );
    let mut structure = Check::new("groupoid structure", mode);
    let compose = |a: &ChartMap, b: &ChartMap| a.then(b).expect("charts match");
    for (lhs, rhs, label) in [
        (compose(&m, &s), compose(&p2, &s), "s∘m = s∘p₂"),
        (compose(&m, &t), compose(&p1, &t), "t∘m = t∘p₁"),
    ] {
        for (k, (a, b)) in lhs.comps().iter().zip(rhs.comps()).enumerate() {
            structure.equal(a, b, mode, || format!("{label}, component {}", k + 1));
        }
    }

    let omega = model.omega();
    let mut multiplicative = Check::new("multiplicativity", mode);
    let pull = |f: &ChartMap| f.pullback(omega).expect("same chart");
    let defect = &(&pull(&m) - &pull(&p1)) - &pull(&p2);
    for idx in crate::cartan::increasing_tuples(model.comp.dim(), 2) {
        multiplicative.zero(&defect.coeff(&idx), mode, || {
            format!("m^*ω − p₁^*ω − p₂^*ω on d{}∧d{}", model.comp.name(idx[0]), model.comp.name(idx[1]))
        });
    }

    // A = ker Ts along the units: (x, u) ↦ (x, x; u, 0)
    let achart = BundleChart::new(&model.base, "u", n);
    let tg = TangentChart::new(&model.g);
    let mut iota = model.base.coordinates();
    iota.extend(model.base.coordinates());
    iota.extend(achart.fibre().coordinates());
    iota.extend(std::iter::repeat_n(Poly::zero(), n));
    let iota = ChartMap::new(achart.total(), tg.total(), iota).expect("well formed");
    let lf = iota
        .pullback(&tangent_lift(omega, &tg).expect("degree 2"))
        .expect("same chart");

    // σ_ω(e_d)(∂_j) = ω(∂_{x_d}, ∂_{x_j} + ∂_{y_j}) at the units
    let sigma: Vec<Vec<Poly>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|d| model.at_units(&(&omega.component(&[d, j]) + &omega.component(&[d, n + j]))))
                .collect()
        })
        .collect();

    // on ker Ts, s^*φ vanishes and t^*φ restricts to φ, so φ = −dω there
    let domega = omega.d();
    let mut phi = KForm::zero(&model.base, 3);
    for idx in crate::cartan::increasing_tuples(n, 3) {
        phi.add_term(&idx, -model.at_units(&domega.coeff(&idx)));
    }
    let mut relatively_closed = Check::new("dω = s^*φ − t^*φ", mode);
    let rel = &(&s.pullback(&phi).expect("same chart") - &t.pullback(&phi).expect("same chart")) - &domega;
    for idx in crate::cartan::increasing_tuples(model.g.dim(), 3) {
        relatively_closed.zero(&rel.coeff(&idx), mode, || {
            let names: Vec<&str> = idx.iter().map(|&i| model.g.name(i)).collect();
            format!("component d{}", names.join("∧d"))
        });
    }

    let mut relation = None;
    let mut data = None;
    if relatively_closed.passed() {
        if let Ok(d) = ImData::new(LieAlgebroid::tangent_bundle(&model.base), sigma.clone(), phi.clone()) {
            let lambda = build_lambda(&d);
            let mut check = Check::new("LF(ω) = −(σ^*ω_can + ρ^*τ(φ))", mode);
            let diff = lf.try_add(&-lambda.form()).expect("same chart");
            for idx in crate::cartan::increasing_tuples(achart.total().dim(), 2) {
                check.zero(&diff.coeff(&idx), mode, || {
                    format!("d{}∧d{}", achart.total().name(idx[0]), achart.total().name(idx[1]))
                });
            }
            relation = Some(check);
            data = Some(d);
        }
    }
    let verdict = Verdict::all(
        [&structure, &multiplicative, &relatively_closed]
            .into_iter()
            .chain(relation.as_ref())
            .map(|c| c.verdict)
            .chain((relation.is_none()).then_some(Verdict::Fail)),
    );
    PairReport {
        verdict,
        structure,
        multiplicative,
        lie_form: lf.to_string(),
        sigma: sigma.iter().map(|r| r.iter().map(|p| p.to_string()).collect()).collect(),
        phi: phi.to_string(),
        relatively_closed,
        relation,
        data,
    }
}
