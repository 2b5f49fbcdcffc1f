//! `Λ♯: TA → T*A` as a candidate algebroid morphism covering `−σᵗ`.
//!
//! Both prolongations are handled in their generator frames: `Te_a, ê_a`
//! over `TM` and `e_aᴸ, d̂xʲ` over `A*`. Writing `Λ♯(G_k) = h_kᵐ ψ^*H_m`
//! with `ψ = −σᵗ`, the morphism conditions on generators are
//!
//! * anchors: `Tψ(ρ_TA(G_k)) = h_kᵐ ρ_T*A(H_m)∘ψ`;
//! * brackets: `C_TA^m_kl h_mˢ = h_kᵖ h_lᵠ C_T*A^s_pq∘ψ + ρ_TA(G_k)(h_lˢ) − ρ_TA(G_l)(h_kˢ)`.
//!
//! The coefficients `h` are read off from [`lambda_sharp`] by evaluating it
//! on each generator.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{check_im, lambda_sharp, minus_sigma_t, ImData, ImReport};
use crate::algebroid::{cotangent_prolongation, tangent_prolongation, LieAlgebroid};
use crate::cartan::VField;
use crate::report::Check;
use crate::symexpr::{EqualityMode, Poly, Symbol, Verdict};

/// Per-case results of [`check_morphism`]. The verdict is the conjunction
/// of the morphism cases; the IM report is attached for comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MorphismReport {
    pub verdict: Verdict,
    /// `Λ♯` covers `−σᵗ` and is the identity on the base.
    pub covering: Check,
    pub anchor_core: Check,
    pub anchor_linear: Check,
    pub bracket_core_core: Check,
    pub bracket_core_linear: Check,
    pub bracket_linear_linear: Check,
    pub im: ImReport,
}

impl MorphismReport {
    pub fn cases(&self) -> [&Check; 6] {
        [
            &self.covering,
            &self.anchor_core,
            &self.anchor_linear,
            &self.bracket_core_core,
            &self.bracket_core_linear,
            &self.bracket_linear_linear,
        ]
    }

    /// Names of failing cases.
    pub fn failing(&self) -> Vec<&str> {
        self.cases()
            .into_iter()
            .filter(|c| c.verdict == Verdict::Fail)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("morphism cases\n");
        for c in self.cases() {
            s.push_str("  ");
            s.push_str(&c.line().replace('\n', "\n  "));
            s.push('\n');
        }
        s.push_str(&format!("morphism: {}\nIM conditions: {}\n", self.verdict, self.im.verdict()));
        s
    }
}

struct Setup {
    n: usize,
    ta: LieAlgebroid,
    ts: LieAlgebroid,
    /// `ξ_d ↦ ψ_d(x, ẋ)`
    pull: BTreeMap<Symbol, Poly>,
    /// `ψ_d(x, ẋ) = −ẋˡσ_ld`
    psi: Vec<Poly>,
    /// `h[k][m]`
    h: Vec<Vec<Poly>>,
    anchors_ta: Vec<VField>,
}

/// Checks that `Λ♯` is a morphism `TA → T*A`, case by case.
pub fn check_morphism(data: &ImData, mode: &EqualityMode) -> MorphismReport {
    let a = data.algebroid();
    let (n, r) = (a.dim(), a.rank());
    let tap = tangent_prolongation(a);
    let tsp = cotangent_prolongation(a);
    let ta = tap.algebroid().clone();
    let ts = tsp.algebroid().clone();
    let xdot: Vec<Poly> = tap.host().fibre().coordinates();
    let psi = minus_sigma_t(data, &xdot);
    let pull: BTreeMap<Symbol, Poly> = tsp.host().fibre().names().iter().cloned().zip(psi.iter().cloned()).collect();

    let images = generator_images(data);
    let mut covering = Check::new("covering", mode);
    let mut h = Vec::with_capacity(2 * r);
    for (k, image) in images.iter().enumerate() {
        let name = &ta.frame()[k];
        for j in 0..n {
            covering.equal(&image[j], &a.base().coordinate(j), mode, || format!("{name}: x{}", j + 1));
        }
        for d in 0..r {
            covering.equal(&image[2 * n + r + d], &psi[d], mode, || format!("{name}: ζ{}", d + 1));
        }
        // T*A fibre coordinates (u, p) ↔ generators (e_mᴸ, d̂xʲ)
        h.push(image[n..2 * n + r].to_vec());
    }
    let anchors_ta = (0..2 * r).map(|k| ta.anchor_of_basis(k)).collect();
    let s = Setup {
        n,
        ta,
        ts,
        pull,
        psi,
        h,
        anchors_ta,
    };

    let mut anchor_core = Check::new("anchor (core sections)", mode);
    let mut anchor_linear = Check::new("anchor (linear sections)", mode);
    for k in 0..2 * r {
        let target = if k < r { &mut anchor_linear } else { &mut anchor_core };
        s.anchor_case(k, mode, target);
    }
    let mut cc = Check::new("bracket core–core", mode);
    let mut cl = Check::new("bracket core–linear", mode);
    let mut ll = Check::new("bracket linear–linear", mode);
    for k in 0..2 * r {
        for l in 0..2 * r {
            match (k < r, l < r) {
                (true, true) if k < l => s.bracket_case(k, l, mode, &mut ll),
                (true, false) => s.bracket_case(k, l, mode, &mut cl),
                (false, false) if k < l => s.bracket_case(k, l, mode, &mut cc),
                _ => {}
            }
        }
    }
    let im = check_im(data, mode);
    let verdict = Verdict::all(
        [&covering, &anchor_core, &anchor_linear, &cc, &cl, &ll]
            .iter()
            .map(|c| c.verdict),
    );
    MorphismReport {
        verdict,
        covering,
        anchor_core,
        anchor_linear,
        bracket_core_core: cc,
        bracket_core_linear: cl,
        bracket_linear_linear: ll,
        im,
    }
}

/// `Λ♯` evaluated on `Te_1 … Te_r, ê_1 … ê_r`: for each, the point
/// `(x, u, p, ζ)` of `T*A` as functions of `(x, ẋ)`.
pub fn generator_images(data: &ImData) -> Vec<Vec<Poly>> {
    let a = data.algebroid();
    let (n, r) = (a.dim(), a.rank());
    let sharp = lambda_sharp(data);
    let src = sharp.source();
    let (u_names, udot_names) = (&src.names()[n..n + r], &src.names()[2 * n + r..]);
    (0..2 * r)
        .map(|k| {
            let mut sub = BTreeMap::new();
            for d in 0..r {
                sub.insert(u_names[d].clone(), Poly::int((k == d) as i64));
                sub.insert(udot_names[d].clone(), Poly::int((k == r + d) as i64));
            }
            sharp.comps().iter().map(|c| c.subs(&sub)).collect()
        })
        .collect()
}

impl Setup {
    fn at_psi(&self, p: &Poly) -> Poly {
        p.subs(&self.pull)
    }

    fn anchor_case(&self, k: usize, mode: &EqualityMode, check: &mut Check) {
        let ts = &self.ts;
        let v = &self.anchors_ta[k];
        let (n, r) = (self.n, self.psi.len());
        // Tψ(v): base part unchanged, ξ part v(ψ_d)
        let mut lhs: Vec<Poly> = v.comps()[..n].to_vec();
        lhs.extend(self.psi.iter().map(|p| v.apply(p)));
        let mut rhs = vec![Poly::zero(); n + r];
        for (m, hm) in self.h[k].iter().enumerate() {
            if hm.is_zero() {
                continue;
            }
            for (c, slot) in rhs.iter_mut().enumerate() {
                let rho = ts.rho(c, m);
                if !rho.is_zero() {
                    *slot += hm * &self.at_psi(rho);
                }
            }
        }
        let name = &self.ta.frame()[k];
        for c in 0..n + r {
            check.equal(&lhs[c], &rhs[c], mode, || {
                format!("ρ({name}), component ∂{}", ts.base().name(c))
            });
        }
    }

    fn bracket_case(&self, k: usize, l: usize, mode: &EqualityMode, check: &mut Check) {
        let (ta, ts) = (&self.ta, &self.ts);
        let m_ts = ts.rank();
        for s in 0..m_ts {
            let mut lhs = Poly::zero();
            for m in 0..ta.rank() {
                let c = ta.c(k, l, m);
                if !c.is_zero() && !self.h[m][s].is_zero() {
                    lhs += c * &self.h[m][s];
                }
            }
            let mut rhs = &self.anchors_ta[k].apply(&self.h[l][s]) - &self.anchors_ta[l].apply(&self.h[k][s]);
            for p in 0..m_ts {
                if self.h[k][p].is_zero() {
                    continue;
                }
                for q in 0..m_ts {
                    let c = ts.c(p, q, s);
                    if c.is_zero() || self.h[l][q].is_zero() {
                        continue;
                    }
                    rhs += &(&self.h[k][p] * &self.h[l][q]) * &self.at_psi(c);
                }
            }
            let (nk, nl, ns) = (&ta.frame()[k], &ta.frame()[l], &ts.frame()[s]);
            check.equal(&lhs, &rhs, mode, || format!("[{nk}, {nl}], coefficient of {ns}"));
        }
    }
}
