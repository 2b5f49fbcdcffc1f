//! The tangent prolongation `TA → TM` and the cotangent prolongation
//! `T*A → A*`, each realized as an ordinary algebroid in the frame of its
//! generating sections. Brackets of general sections then follow from the
//! generator relations by the Leibniz rule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{BundleChart, LieAlgebroid, Section};
use crate::random::{random_poly, PolyShape};
use crate::report::Check;
use crate::symexpr::{EqualityMode, NumericOptions, Poly, Sampler};
use crate::tanlift::TangentChart;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProlongKind {
    /// `TA → TM` with generators `Te_a`, `ê_a`.
    Tangent,
    /// `T*A → A*` with generators `e_aᴸ`, `d̂xʲ`.
    Cotangent,
}

/// A prolongation algebroid together with the chart of its base (`TM` as
/// `(x, ẋ)` or `A*` as `(x, ξ)`). Frame order: the `r` linear generators,
/// then the core generators.
#[derive(Clone, Debug, PartialEq)]
pub struct Prolongation {
    kind: ProlongKind,
    n: usize,
    r: usize,
    host: BundleChart,
    algebroid: LieAlgebroid,
}

fn hat(name: &str) -> String {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) => format!("{c}\u{302}{}", chars.as_str()),
        None => String::new(),
    }
}

/// `df(ẋ) = ẋᵏ ∂_k f`.
fn along(f: &Poly, base: &crate::cartan::Chart, fibre: &crate::cartan::Chart) -> Poly {
    let mut s = Poly::zero();
    for k in 0..base.dim() {
        let d = f.diff(base.name(k));
        if !d.is_zero() {
            s += &d * &fibre.coordinate(k);
        }
    }
    s
}

/// `TA → TM`:
/// `[ê_a, ê_b] = 0`, `[Te_a, ê_b] = Cᶜ_ab ê_c`,
/// `[Te_a, Te_b] = Cᶜ_ab Te_c + dCᶜ_ab(ẋ) ê_c`,
/// `ρ(Te_a) = ρʲ_a ∂_{xʲ} + dρʲ_a(ẋ) ∂_{ẋʲ}`, `ρ(ê_a) = ρʲ_a ∂_{ẋʲ}`.
pub fn tangent_prolongation(a: &LieAlgebroid) -> Prolongation {
    let (n, r) = (a.dim(), a.rank());
    let tc = TangentChart::new(a.base());
    let host = BundleChart::with_fibre(a.base(), tc.fibre()).expect("fresh names");
    let fib = host.fibre().clone();
    let mut rho = vec![vec![Poly::zero(); 2 * r]; 2 * n];
    for j in 0..n {
        for b in 0..r {
            rho[j][b] = a.rho(j, b).clone();
            rho[n + j][b] = along(a.rho(j, b), a.base(), &fib);
            rho[n + j][r + b] = a.rho(j, b).clone();
        }
    }
    let mut c = super::zero_structure(2 * r);
    for x in 0..r {
        for y in 0..r {
            for z in 0..r {
                let k = a.c(x, y, z);
                if k.is_zero() {
                    continue;
                }
                c[x][y][z] = k.clone();
                c[x][y][r + z] = along(k, a.base(), &fib);
                c[x][r + y][r + z] = k.clone();
                c[r + y][x][r + z] = -k.clone();
            }
        }
    }
    let mut frame: Vec<String> = a.frame().iter().map(|e| format!("T{e}")).collect();
    frame.extend(a.frame().iter().map(|e| hat(e)));
    let algebroid = LieAlgebroid::new(host.total(), frame, rho, c).expect("well formed");
    Prolongation {
        kind: ProlongKind::Tangent,
        n,
        r,
        host,
        algebroid,
    }
}

/// `T*A → A*`:
/// `[d̂xⁱ, d̂xʲ] = 0`, `[e_aᴸ, d̂xʲ] = d̂ρʲ_a`,
/// `[e_aᴸ, e_bᴸ] = −d̂Cᶜ_ab ξ_c + Cᶜ_ab e_cᴸ`,
/// `ρ(d̂xⁱ) = ρⁱ_a ∂_{ξ_a}`, `ρ(e_aᴸ) = ρⁱ_a ∂_{xⁱ} + Cᶜ_ab ξ_c ∂_{ξ_b}`.
pub fn cotangent_prolongation(a: &LieAlgebroid) -> Prolongation {
    let (n, r) = (a.dim(), a.rank());
    let host = BundleChart::new(a.base(), "ξ", r);
    let xi = host.fibre().coordinates();
    let mut rho = vec![vec![Poly::zero(); r + n]; n + r];
    for i in 0..n {
        for b in 0..r {
            rho[i][b] = a.rho(i, b).clone();
            rho[n + b][r + i] = a.rho(i, b).clone();
        }
    }
    for x in 0..r {
        for y in 0..r {
            let mut s = Poly::zero();
            for (z, xz) in xi.iter().enumerate() {
                let k = a.c(x, y, z);
                if !k.is_zero() {
                    s += k * xz;
                }
            }
            rho[n + y][x] = s;
        }
    }
    let mut c = super::zero_structure(r + n);
    for x in 0..r {
        for y in 0..r {
            for z in 0..r {
                c[x][y][z] = a.c(x, y, z).clone();
            }
            for j in 0..n {
                let mut s = Poly::zero();
                for (z, xz) in xi.iter().enumerate() {
                    let d = a.c(x, y, z).diff(a.base().name(j));
                    if !d.is_zero() {
                        s -= &d * xz;
                    }
                }
                c[x][y][r + j] = s;
            }
        }
        for j in 0..n {
            for k in 0..n {
                let d = a.rho(j, x).diff(a.base().name(k));
                c[x][r + j][r + k] = d.clone();
                c[r + j][x][r + k] = -d;
            }
        }
    }
    let mut frame: Vec<String> = a.frame().iter().map(|e| format!("{e}ᴸ")).collect();
    frame.extend(a.base().names().iter().map(|x| hat(&format!("d{x}"))));
    let algebroid = LieAlgebroid::new(host.total(), frame, rho, c).expect("well formed");
    Prolongation {
        kind: ProlongKind::Cotangent,
        n,
        r,
        host,
        algebroid,
    }
}

impl Prolongation {
    pub fn kind(&self) -> ProlongKind {
        self.kind
    }

    pub fn algebroid(&self) -> &LieAlgebroid {
        &self.algebroid
    }

    /// Base chart of the prolongation: `(x, ẋ)` or `(x, ξ)`.
    pub fn host(&self) -> &BundleChart {
        &self.host
    }

    /// Rank of the underlying algebroid `A`.
    pub fn base_rank(&self) -> usize {
        self.r
    }

    /// Number of generators: `2r` or `r + n`.
    pub fn rank(&self) -> usize {
        self.algebroid.rank()
    }

    /// `Te_a` or `e_aᴸ`.
    pub fn linear(&self, a: usize) -> Section {
        Section::basis(self.rank(), a)
    }

    /// `ê_a` (tangent) or `d̂xʲ` (cotangent).
    pub fn core(&self, i: usize) -> Section {
        Section::basis(self.rank(), self.r + i)
    }

    /// `Tu = uᵃ Te_a + duᵃ(ẋ) ê_a`, or `uᴸ = uᵃ e_aᴸ`.
    pub fn lift(&self, u: &Section) -> Section {
        let mut comps = vec![Poly::zero(); self.rank()];
        for (a, ua) in u.comps().iter().enumerate() {
            comps[a] = ua.clone();
            if self.kind == ProlongKind::Tangent {
                comps[self.r + a] = along(ua, self.host.base(), self.host.fibre());
            }
        }
        Section::new(comps)
    }

    /// `û = uᵃ ê_a` for a section of `A`, or `α̂ = α_j d̂xʲ` for a 1-form
    /// given by its components.
    pub fn core_of(&self, comps: &[Poly]) -> Section {
        let mut out = vec![Poly::zero(); self.rank()];
        for (i, c) in comps.iter().enumerate() {
            out[self.r + i] = c.clone();
        }
        Section::new(out)
    }

    /// Dimension of the base `M` of `A`.
    pub fn base_dim(&self) -> usize {
        self.n
    }
}

/// Numeric check on random general sections: the Jacobiator and the
/// anchor defect `ρ[U,V] − [ρU, ρV]` evaluated at a random point must
/// vanish to within `tol`.
pub fn general_triples(p: &Prolongation, count: usize, seed: u64, tol: f64) -> Check {
    let alg = p.algebroid();
    let chart = alg.base();
    let opts = NumericOptions::default().with_seed(seed).with_tol(tol);
    let mut check = Check::new("general triples", &EqualityMode::Numeric(opts));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampler = Sampler::from_options(&opts);
    let shape = PolyShape {
        max_terms: 2,
        max_degree: 1,
        coeff: 3,
    };
    let rand_section = |rng: &mut ChaCha8Rng| {
        Section::new((0..alg.rank()).map(|_| random_poly(rng, chart.names(), shape)).collect())
    };
    for t in 0..count {
        let (u, v, w) = (rand_section(&mut rng), rand_section(&mut rng), rand_section(&mut rng));
        let jac = alg.jacobiator(&u, &v, &w).expect("rank matches");
        let uv = alg.bracket(&u, &v).expect("rank matches");
        let lhs = alg.anchor(&uv).expect("rank matches");
        let rhs = alg
            .anchor(&u)
            .and_then(|a| Ok(a.bracket(&alg.anchor(&v)?)?))
            .expect("same chart");
        let pt = sampler.point(chart.names().iter().map(|s| s.as_ref()));
        let mut worst: f64 = 0.0;
        for c in jac.comps() {
            worst = worst.max(c.eval(&pt).map_or(f64::INFINITY, f64::abs));
        }
        for (a, b) in lhs.comps().iter().zip(rhs.comps()) {
            worst = worst.max((a - b).eval(&pt).map_or(f64::INFINITY, f64::abs));
        }
        check.sample(worst, tol, || format!("random triple #{t}"), &pt);
    }
    check
}
