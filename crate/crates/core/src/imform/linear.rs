//! Linear 2-forms on a vector bundle `A` in coordinates `(x, u)`.

use serde::Serialize;

use super::{t_star_a_chart, ImError};
use crate::algebroid::BundleChart;
use crate::cartan::{CartanError, ChartMap, KForm};
use crate::symexpr::Poly;
use crate::tanlift::{sharp_map, CotangentChart};

/// A 2-form of the shape `½Λ_{ij,d}uᵈ dxⁱ∧dxʲ + λ_jd dxʲ∧duᵈ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearForm {
    chart: BundleChart,
    form: KForm,
    /// `Λ_{ij,d}`, indexed `[i][j][d]`, antisymmetric in `i, j`
    big: Vec<Vec<Vec<Poly>>>,
    /// `λ_jd`, indexed `[j][d]`
    small: Vec<Vec<Poly>>,
}

impl LinearForm {
    /// Splits `form` into its `Λ` and `λ` parts, or lists every way in
    /// which it fails to have the linear shape.
    pub fn from_form(chart: &BundleChart, form: &KForm) -> Result<LinearForm, Vec<String>> {
        let n = chart.base().dim();
        let r = chart.rank();
        let total = chart.total();
        if form.degree() != 2 {
            return Err(vec![format!("degree {} is not 2", form.degree())]);
        }
        if form.chart() != total {
            return Err(vec![format!("form lives on ({}), not ({total})", form.chart())]);
        }
        let u_names: Vec<&str> = chart.fibre().names().iter().map(|s| s.as_ref()).collect();
        let mut big = vec![vec![vec![Poly::zero(); r]; n]; n];
        let mut small = vec![vec![Poly::zero(); r]; n];
        let mut bad = Vec::new();
        for (idx, c) in form.terms() {
            let (i, j) = (idx[0], idx[1]);
            let label = format!("d{}∧d{}", total.name(i), total.name(j));
            match (i < n, j < n) {
                (true, true) => {
                    let Some(parts) = c.collect_in(&u_names) else {
                        bad.push(format!("coefficient of {label} is not polynomial in the fibre"));
                        continue;
                    };
                    for (exp, coef) in parts {
                        match exp.iter().position(|&e| e != 0) {
                            Some(d) if exp.iter().sum::<i32>() == 1 && exp[d] == 1 => {
                                big[i][j][d] = coef.clone();
                                big[j][i][d] = -coef;
                            }
                            _ => bad.push(format!("coefficient of {label} is not fibrewise linear")),
                        }
                    }
                }
                (true, false) => {
                    if u_names.iter().any(|u| c.depends_on(u)) {
                        bad.push(format!("coefficient of {label} depends on the fibre"));
                    } else {
                        small[i][j - n] = c.clone();
                    }
                }
                _ => bad.push(format!("{label} term is not allowed")),
            }
        }
        if !bad.is_empty() {
            bad.dedup();
            return Err(bad);
        }
        Ok(LinearForm {
            chart: chart.clone(),
            form: form.clone(),
            big,
            small,
        })
    }

    pub fn chart(&self) -> &BundleChart {
        &self.chart
    }

    pub fn form(&self) -> &KForm {
        &self.form
    }

    /// `Λ_{ij,d}`.
    pub fn big_lambda(&self, i: usize, j: usize, d: usize) -> &Poly {
        &self.big[i][j][d]
    }

    /// The matrix `λ_jd` of the covering map `λ: TM → A*`,
    /// `(x, ẋ) ↦ (x, ẋʲλ_jd)`.
    pub fn covering(&self) -> &[Vec<Poly>] {
        &self.small
    }

    /// `λ` as a chart map from `(x, ẋ)` to the given chart on `A*`.
    pub fn covering_map(&self, tm: &crate::tanlift::TangentChart, dual: &BundleChart) -> Result<ChartMap, CartanError> {
        let mut comps = self.chart.base().coordinates();
        for d in 0..self.chart.rank() {
            let mut s = Poly::zero();
            for (j, row) in self.small.iter().enumerate() {
                if !row[d].is_zero() {
                    s += &tm.fibre().coordinate(j) * &row[d];
                }
            }
            comps.push(s);
        }
        ChartMap::new(tm.total(), dual.total(), comps)
    }

    /// `(λᵗ)^*ω_can`, the pullback along `(x, u) ↦ (x, p_j = λ_jd uᵈ)`.
    pub fn reconstruction(&self) -> KForm {
        let cc = CotangentChart::new(self.chart.base(), "p");
        let map = cc
            .bundle_map(self.chart.total(), &self.small)
            .expect("shapes match");
        map.pullback(&cc.omega_can()).expect("same chart")
    }
}

/// `U ↦ i_UΛ` as a chart map `(x, u, ẋ, u̇) ↦ (x, u, p, ζ)`.
pub fn sharp_by_contraction(lf: &LinearForm) -> ChartMap {
    let tc = lf.chart.tangent();
    let target = t_star_a_chart(&lf.chart);
    sharp_map(&lf.form, &tc, &target).expect("same chart")
}

/// Linearity and closedness of a 2-form on `A`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearAnalysis {
    pub linear: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
    /// `λ_jd` when linear.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<Vec<Poly>>>,
    pub closed: bool,
    /// `Λ = (λᵗ)^*ω_can`, when linear.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reconstructs: Option<bool>,
    /// `λ` vanishes, i.e. the covering map is zero on each fibre.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covering_zero_on_fibres: Option<bool>,
    pub d_form: String,
}

impl LinearAnalysis {
    /// For linear forms: `closed ⇔ reconstructs`.
    pub fn biconditional_holds(&self) -> Option<bool> {
        self.reconstructs.map(|rec| rec == self.closed)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("linear: {}\n", self.linear);
        for v in &self.violations {
            s.push_str(&format!("  {v}\n"));
        }
        s.push_str(&format!("closed: {}\n", self.closed));
        if let Some(rec) = self.reconstructs {
            s.push_str(&format!("equals (λᵗ)^*ω_can: {rec}\n"));
        }
        if let Some(l) = &self.lambda {
            let rows: Vec<String> = l
                .iter()
                .map(|row| row.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", "))
                .collect();
            s.push_str(&format!("λ = [{}]\n", rows.join("; ")));
        }
        if let Some(z) = self.covering_zero_on_fibres {
            s.push_str(&format!("covering map zero on fibres: {z}\n"));
        }
        if let Some(b) = self.biconditional_holds() {
            s.push_str(&format!("dΛ = 0 ⇔ Λ = (λᵗ)^*ω_can: {}\n", if b { "holds" } else { "VIOLATED" }));
        }
        s
    }
}

/// Classifies a 2-form on `A`: linear shape, `λ`, closedness, and whether
/// it is `(λᵗ)^*ω_can`.
pub fn analyze_linear(chart: &BundleChart, form: &KForm) -> Result<LinearAnalysis, ImError> {
    chart.total().ensure_same(form.chart())?;
    if form.degree() != 2 {
        return Err(CartanError::MixedDegree(2, form.degree()).into());
    }
    let d = form.d();
    let closed = d.is_zero();
    Ok(match LinearForm::from_form(chart, form) {
        Ok(lf) => {
            let rec = lf.reconstruction() == *form;
            LinearAnalysis {
                linear: true,
                violations: vec![],
                covering_zero_on_fibres: Some(lf.small.iter().flatten().all(Poly::is_zero)),
                lambda: Some(lf.small),
                closed,
                reconstructs: Some(rec),
                d_form: d.to_string(),
            }
        }
        Err(violations) => LinearAnalysis {
            linear: false,
            violations,
            lambda: None,
            closed,
            reconstructs: None,
            covering_zero_on_fibres: None,
            d_form: d.to_string(),
        },
    })
}
