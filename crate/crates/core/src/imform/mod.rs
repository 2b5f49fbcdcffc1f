//! IM 2-forms `σ: A → T*M` relative to a closed 3-form `φ`, the linear
//! 2-form `Λ = −(σ^*ω_can + ρ^*τ(φ))` on `A`, its sharp map, and the
//! check that `Λ♯: TA → T*A` is an algebroid morphism.

mod linear;
mod morphism;

use serde::Serialize;
use thiserror::Error;

use crate::algebroid::{AlgebroidError, BundleChart, LieAlgebroid, Section};
use crate::cartan::{CartanError, ChartMap, KForm};
use crate::report::Check;
use crate::symexpr::{EqualityMode, Poly, Verdict};
use crate::tanlift::{tau, CotangentChart, TangentChart};

pub use linear::{analyze_linear, sharp_by_contraction, LinearAnalysis, LinearForm};
pub use morphism::{check_morphism, generator_images, MorphismReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImError {
    #[error("σ must be {n}×{r}, found {rows}×{cols}")]
    SigmaShape {
        n: usize,
        r: usize,
        rows: usize,
        cols: usize,
    },
    #[error("φ must be a 3-form, found degree {0}")]
    PhiDegree(usize),
    #[error("φ is not closed: dφ = {0}")]
    PhiNotClosed(String),
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
}

/// An algebroid with a bundle map `σ` (components `σ_jd`, row `j` for
/// `dxʲ`, column `d` for `e_d`) and a closed 3-form `φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ImData {
    algebroid: LieAlgebroid,
    sigma: Vec<Vec<Poly>>,
    phi: KForm,
}

impl ImData {
    pub fn new(algebroid: LieAlgebroid, sigma: Vec<Vec<Poly>>, phi: KForm) -> Result<ImData, ImError> {
        let (n, r) = (algebroid.dim(), algebroid.rank());
        if sigma.len() != n || sigma.iter().any(|row| row.len() != r) {
            return Err(ImError::SigmaShape {
                n,
                r,
                rows: sigma.len(),
                cols: sigma.first().map_or(0, Vec::len),
            });
        }
        for v in sigma.iter().flatten().flat_map(Poly::free_vars) {
            if !algebroid.base().contains(&v) {
                return Err(CartanError::UnknownVariable(v.to_string()).into());
            }
        }
        if phi.degree() != 3 {
            return Err(ImError::PhiDegree(phi.degree()));
        }
        let phi = phi.embed(algebroid.base())?;
        let dphi = phi.d();
        if !dphi.is_zero() {
            return Err(ImError::PhiNotClosed(dphi.to_string()));
        }
        Ok(ImData {
            algebroid,
            sigma,
            phi,
        })
    }

    /// `φ = 0`.
    pub fn untwisted(algebroid: LieAlgebroid, sigma: Vec<Vec<Poly>>) -> Result<ImData, ImError> {
        let phi = KForm::zero(algebroid.base(), 3);
        ImData::new(algebroid, sigma, phi)
    }

    pub fn algebroid(&self) -> &LieAlgebroid {
        &self.algebroid
    }

    pub fn sigma(&self) -> &[Vec<Poly>] {
        &self.sigma
    }

    pub fn phi(&self) -> &KForm {
        &self.phi
    }

    pub fn with_sigma(&self, sigma: Vec<Vec<Poly>>) -> Result<ImData, ImError> {
        ImData::new(self.algebroid.clone(), sigma, self.phi.clone())
    }

    pub fn with_phi(&self, phi: KForm) -> Result<ImData, ImError> {
        ImData::new(self.algebroid.clone(), self.sigma.clone(), phi)
    }

    /// Coordinates `(x, u)` on `A`.
    pub fn a_chart(&self) -> BundleChart {
        BundleChart::new(self.algebroid.base(), "u", self.algebroid.rank())
    }

    /// `σ(u) = uᵈ σ_jd dxʲ`.
    pub fn sigma_of(&self, u: &Section) -> KForm {
        let base = self.algebroid.base();
        let mut out = KForm::zero(base, 1);
        for (j, row) in self.sigma.iter().enumerate() {
            let mut c = Poly::zero();
            for (ud, s) in u.comps().iter().zip(row) {
                if !ud.is_zero() && !s.is_zero() {
                    c += ud * s;
                }
            }
            out.add_term(&[j], c);
        }
        out
    }

    /// `⟨σ(u), ρ(v)⟩ + ⟨σ(v), ρ(u)⟩`; vanishes for all `u, v` iff IM1 holds.
    pub fn im1_defect(&self, u: &Section, v: &Section) -> Result<Poly, ImError> {
        let pair = |s: &Section, t: &Section| -> Result<Poly, ImError> {
            let rt = self.algebroid.anchor(t)?;
            Ok(self.sigma_of(s).interior(&rt)?.as_function().expect("0-form"))
        };
        Ok(&pair(u, v)? + &pair(v, u)?)
    }

    /// `σ([u,v]) − L_{ρ(u)}σ(v) + i_{ρ(v)}dσ(u) − i_{ρ(v)}i_{ρ(u)}φ`;
    /// vanishes for all `u, v` iff IM2 holds.
    pub fn im2_defect(&self, u: &Section, v: &Section) -> Result<KForm, ImError> {
        let a = &self.algebroid;
        let (ru, rv) = (a.anchor(u)?, a.anchor(v)?);
        let lhs = self.sigma_of(&a.bracket(u, v)?);
        let lie = self.sigma_of(v).lie_derivative(&ru)?;
        let idsig = self.sigma_of(u).d().interior(&rv)?;
        let iiphi = self.phi.interior(&ru)?.interior(&rv)?;
        Ok(&(&(&lhs - &lie) + &idsig) - &iiphi)
    }

    /// `ρ: A → TM, (x, u) ↦ (x, ρʲ_d uᵈ)` into the given tangent chart.
    pub fn anchor_map(&self, chart: &BundleChart, tc: &TangentChart) -> Result<ChartMap, ImError> {
        let n = self.algebroid.dim();
        let u = chart.fibre().coordinates();
        let mut comps = self.algebroid.base().coordinates();
        for j in 0..n {
            let mut s = Poly::zero();
            for (d, ud) in u.iter().enumerate() {
                let r = self.algebroid.rho(j, d);
                if !r.is_zero() {
                    s += ud * r;
                }
            }
            comps.push(s);
        }
        Ok(ChartMap::new(chart.total(), tc.total(), comps)?)
    }
}

/// Outcome of [`check_im`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImReport {
    pub im1: Check,
    pub im2: Check,
}

impl ImReport {
    pub fn verdict(&self) -> Verdict {
        self.im1.verdict.and(self.im2.verdict)
    }

    pub fn to_text(&self) -> String {
        format!("{}\n{}\n", self.im1.line(), self.im2.line())
    }
}

/// IM1 on unordered basis pairs and IM2 on ordered basis pairs, each
/// component separately. Basis pairs suffice: `IM1` is tensorial, and
/// given IM1 the IM2 defect is tensorial too (see
/// [`ImData::im2_defect`]).
pub fn check_im(data: &ImData, mode: &EqualityMode) -> ImReport {
    let a = data.algebroid();
    let (n, r) = (a.dim(), a.rank());
    let f = a.frame();
    let mut im1 = Check::new("IM1", mode);
    for x in 0..r {
        for y in x..r {
            let mut s = Poly::zero();
            for j in 0..n {
                s += &data.sigma[j][x] * a.rho(j, y);
                s += &data.sigma[j][y] * a.rho(j, x);
            }
            im1.zero(&s, mode, || format!("(a,b) = ({},{})", f[x], f[y]));
        }
    }
    let mut im2 = Check::new("IM2", mode);
    for x in 0..r {
        for y in 0..r {
            let defect = data
                .im2_defect(&Section::basis(r, x), &Section::basis(r, y))
                .expect("shapes validated");
            for j in 0..n {
                im2.zero(&defect.coeff(&[j]), mode, || {
                    format!("(a,b) = ({},{}), component dx{}", f[x], f[y], j + 1)
                });
            }
        }
    }
    ImReport { im1, im2 }
}

/// The linear 2-form `Λ = −(σ^*ω_can + ρ^*τ(φ))` on `A`.
pub fn build_lambda(data: &ImData) -> LinearForm {
    let chart = data.a_chart();
    let base = data.algebroid.base();
    let cc = CotangentChart::new(base, "p");
    let s: Vec<Vec<Poly>> = data.sigma.clone();
    let sig = cc.bundle_map(chart.total(), &s).expect("shapes validated");
    let first = sig.pullback(&cc.omega_can()).expect("same chart");
    let tc = TangentChart::new(base);
    let rho = data.anchor_map(&chart, &tc).expect("shapes validated");
    let tphi = tau(&data.phi, &tc).expect("degree 3");
    let second = rho.pullback(&tphi).expect("same chart");
    let form = -(&first + &second);
    LinearForm::from_form(&chart, &form).expect("Λ has the linear shape")
}

/// Chart `(x, u, p, ζ)` on `T*A` for the given chart on `A`.
pub fn t_star_a_chart(chart: &BundleChart) -> CotangentChart {
    let n = chart.base().dim();
    let r = chart.rank();
    let total = chart.total();
    let mut names: Vec<String> = Vec::new();
    for (prefix, count) in [("p", n), ("ζ", r)] {
        for i in 0..count {
            let taken = |c: &str| total.contains(c) || names.iter().any(|m| m == c);
            names.push(crate::tanlift::fresh(format!("{prefix}{}", i + 1), &taken));
        }
    }
    let momenta = crate::cartan::Chart::new(&names).expect("valid names");
    CotangentChart::with_momenta(total, &momenta).expect("fresh names")
}

/// `Λ♯(x, u, ẋ, u̇) = (x, u, p, ζ)` from the closed-form expressions
/// `p_j = ẋˡuᵈ(∂_lσ_jd − ∂_jσ_ld) + u̇ᵈσ_jd − φ_ijk uᵈρᵏ_d ẋⁱ`,
/// `ζ_d = −ẋˡσ_ld`.
pub fn lambda_sharp(data: &ImData) -> ChartMap {
    let chart = data.a_chart();
    let a = &data.algebroid;
    let (n, r) = (a.dim(), a.rank());
    let base = a.base();
    let tc = chart.tangent();
    let target = t_star_a_chart(&chart);
    let x = base.coordinates();
    let u = chart.fibre().coordinates();
    let fib = tc.fibre().coordinates();
    let (xd, ud) = (&fib[..n], &fib[n..]);
    let sig = &data.sigma;
    let mut comps: Vec<Poly> = x.iter().chain(&u).cloned().collect();
    for j in 0..n {
        let mut p = Poly::zero();
        for l in 0..n {
            for d in 0..r {
                let curl = &sig[j][d].diff(base.name(l)) - &sig[l][d].diff(base.name(j));
                if !curl.is_zero() {
                    p += &(&xd[l] * &u[d]) * &curl;
                }
            }
        }
        for d in 0..r {
            if !sig[j][d].is_zero() {
                p += &ud[d] * &sig[j][d];
            }
        }
        for i in 0..n {
            for k in 0..n {
                let phi = data.phi.component(&[i, j, k]);
                if phi.is_zero() {
                    continue;
                }
                for d in 0..r {
                    let rk = a.rho(k, d);
                    if !rk.is_zero() {
                        p -= &(&(&phi * &u[d]) * rk) * &xd[i];
                    }
                }
            }
        }
        comps.push(p);
    }
    for d in 0..r {
        let mut z = Poly::zero();
        for l in 0..n {
            if !sig[l][d].is_zero() {
                z -= &xd[l] * &sig[l][d];
            }
        }
        comps.push(z);
    }
    ChartMap::new(tc.total(), target.total(), comps).expect("well formed")
}

/// `−σᵗ: TM → A*, (x, ẋ) ↦ (x, ξ_d = −ẋˡσ_ld)` as substitution values
/// for `ξ`.
pub(crate) fn minus_sigma_t(data: &ImData, xdot: &[Poly]) -> Vec<Poly> {
    let (n, r) = (data.algebroid.dim(), data.algebroid.rank());
    (0..r)
        .map(|d| {
            let mut z = Poly::zero();
            for l in 0..n {
                if !data.sigma[l][d].is_zero() {
                    z -= &xdot[l] * &data.sigma[l][d];
                }
            }
            z
        })
        .collect()
}

#[cfg(test)]
mod tests;
