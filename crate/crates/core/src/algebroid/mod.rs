//! Lie algebroids in a local frame: structure functions, axiom checks,
//! section brackets and the tangent/cotangent prolongations.

mod prolong;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cartan::{CartanError, Chart, VField};
use crate::report::Check;
use crate::symexpr::{EqualityMode, Poly, Verdict};
use crate::tanlift::fresh;

pub use prolong::{general_triples, tangent_prolongation, cotangent_prolongation, ProlongKind, Prolongation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebroidError {
    #[error("anchor must be {n}×{r}, found {rows}×{cols}")]
    AnchorShape {
        n: usize,
        r: usize,
        rows: usize,
        cols: usize,
    },
    #[error("structure functions must be {r}×{r}×{r}")]
    StructureShape { r: usize },
    #[error("section has {found} components, rank is {rank}")]
    SectionRank { rank: usize, found: usize },
    #[error("frame has {found} names, rank is {rank}")]
    FrameNames { rank: usize, found: usize },
    #[error(transparent)]
    Cartan(#[from] CartanError),
}

/// Coordinates `(x, u)` on a vector bundle: base chart plus fibre chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleChart {
    base: Chart,
    fibre: Chart,
    total: Chart,
}

impl BundleChart {
    /// Fibre coordinates `prefix1 … prefixR`, suffixed if they clash.
    pub fn new(base: &Chart, prefix: &str, rank: usize) -> BundleChart {
        let mut names: Vec<String> = Vec::new();
        for d in 0..rank {
            let taken = |c: &str| base.contains(c) || names.iter().any(|m| m == c);
            names.push(fresh(format!("{prefix}{}", d + 1), &taken));
        }
        let fibre = Chart::new(&names).expect("generated names are valid");
        BundleChart::with_fibre(base, &fibre).expect("generated names are fresh")
    }

    pub fn with_fibre(base: &Chart, fibre: &Chart) -> Result<BundleChart, CartanError> {
        Ok(BundleChart {
            base: base.clone(),
            fibre: fibre.clone(),
            total: base.product(fibre)?,
        })
    }

    pub fn base(&self) -> &Chart {
        &self.base
    }

    pub fn fibre(&self) -> &Chart {
        &self.fibre
    }

    pub fn total(&self) -> &Chart {
        &self.total
    }

    pub fn rank(&self) -> usize {
        self.fibre.dim()
    }

    /// The tangent chart of the total space with dotted fibre names.
    pub fn tangent(&self) -> crate::tanlift::TangentChart {
        crate::tanlift::TangentChart::new(&self.total)
    }
}

/// A Lie algebroid of rank `r` over an `n`-dimensional chart, given by
/// `ρ(e_a) = ρʲ_a ∂_j` and `[e_a, e_b] = Cᶜ_ab e_c`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebroid {
    base: Chart,
    frame: Vec<String>,
    /// `[j][a]`
    rho: Vec<Vec<Poly>>,
    /// `[a][b][c]` holds `Cᶜ_ab`
    c: Vec<Vec<Vec<Poly>>>,
}

/// A section `uᵃ e_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    comps: Vec<Poly>,
}

impl Section {
    pub fn new(comps: Vec<Poly>) -> Section {
        Section { comps }
    }

    pub fn zero(rank: usize) -> Section {
        Section {
            comps: vec![Poly::zero(); rank],
        }
    }

    /// The frame element `e_a`.
    pub fn basis(rank: usize, a: usize) -> Section {
        let mut s = Section::zero(rank);
        s.comps[a] = Poly::one();
        s
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    pub fn comp(&self, a: usize) -> &Poly {
        &self.comps[a]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    pub fn scale(&self, f: &Poly) -> Section {
        Section::new(self.comps.iter().map(|c| c * f).collect())
    }
}

impl std::ops::Add for &Section {
    type Output = Section;
    fn add(self, o: &Section) -> Section {
        Section::new(self.comps.iter().zip(&o.comps).map(|(a, b)| a + b).collect())
    }
}

impl std::ops::Sub for &Section {
    type Output = Section;
    fn sub(self, o: &Section) -> Section {
        Section::new(self.comps.iter().zip(&o.comps).map(|(a, b)| a - b).collect())
    }
}

/// Outcome of [`LieAlgebroid::check_axioms`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub antisymmetry: Check,
    pub anchor: Check,
    pub jacobi: Check,
}

impl AxiomReport {
    pub fn verdict(&self) -> Verdict {
        Verdict::all([self.antisymmetry.verdict, self.anchor.verdict, self.jacobi.verdict])
    }

    pub fn checks(&self) -> [&Check; 3] {
        [&self.antisymmetry, &self.anchor, &self.jacobi]
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in self.checks() {
            s.push_str(&c.line());
            s.push('\n');
        }
        s
    }
}

impl LieAlgebroid {
    /// Validates shapes and that every coefficient lives on `base`.
    pub fn new(
        base: &Chart,
        frame: Vec<String>,
        rho: Vec<Vec<Poly>>,
        c: Vec<Vec<Vec<Poly>>>,
    ) -> Result<LieAlgebroid, AlgebroidError> {
        let n = base.dim();
        let r = frame.len();
        let cols = rho.first().map_or(r, Vec::len);
        if rho.len() != n || rho.iter().any(|row| row.len() != r) {
            return Err(AlgebroidError::AnchorShape {
                n,
                r,
                rows: rho.len(),
                cols,
            });
        }
        if c.len() != r || c.iter().any(|m| m.len() != r || m.iter().any(|v| v.len() != r)) {
            return Err(AlgebroidError::StructureShape { r });
        }
        let all = rho.iter().flatten().chain(c.iter().flatten().flatten());
        for p in all {
            for v in p.free_vars() {
                if !base.contains(&v) {
                    return Err(CartanError::UnknownVariable(v.to_string()).into());
                }
            }
        }
        Ok(LieAlgebroid {
            base: base.clone(),
            frame,
            rho,
            c,
        })
    }

    /// Frame names `e1 … er`.
    pub fn default_frame(r: usize) -> Vec<String> {
        (1..=r).map(|a| format!("e{a}")).collect()
    }

    /// `TM` with the coordinate frame `∂_j`: `ρ = id`, `C = 0`.
    pub fn tangent_bundle(base: &Chart) -> LieAlgebroid {
        let n = base.dim();
        let rho = (0..n)
            .map(|j| (0..n).map(|a| Poly::int((j == a) as i64)).collect())
            .collect();
        let frame = base.names().iter().map(|x| format!("∂{x}")).collect();
        LieAlgebroid::new(base, frame, rho, zero_structure(n)).expect("well formed")
    }

    /// A Lie algebra over a point, from constants `c[a][b][c] = Cᶜ_ab`.
    pub fn lie_algebra(c: Vec<Vec<Vec<Poly>>>) -> Result<LieAlgebroid, AlgebroidError> {
        let r = c.len();
        LieAlgebroid::new(&Chart::new(Vec::<String>::new())?, Self::default_frame(r), vec![], c)
    }

    /// `so(3)`: `[e_a, e_b] = ε_abc e_c`.
    pub fn so3() -> LieAlgebroid {
        LieAlgebroid::lie_algebra(levi_civita_structure()).expect("well formed")
    }

    /// The cotangent algebroid of a bivector `π` (given as `π^{ij}`, not
    /// checked to be Poisson): frame `dxᵃ`, `ρ(dxᵃ) = π^{aj}∂_j`,
    /// `[dxᵃ, dxᵇ] = dπ^{ab}`.
    pub fn koszul(base: &Chart, pi: &[Vec<Poly>]) -> Result<LieAlgebroid, AlgebroidError> {
        let n = base.dim();
        if pi.len() != n || pi.iter().any(|r| r.len() != n) {
            return Err(AlgebroidError::AnchorShape {
                n,
                r: n,
                rows: pi.len(),
                cols: pi.first().map_or(0, Vec::len),
            });
        }
        let rho = (0..n)
            .map(|j| (0..n).map(|a| pi[a][j].clone()).collect())
            .collect();
        let c = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| (0..n).map(|k| pi[a][b].diff(base.name(k))).collect())
                    .collect()
            })
            .collect();
        let frame = base.names().iter().map(|x| format!("d{x}")).collect();
        LieAlgebroid::new(base, frame, rho, c)
    }

    /// Linear Poisson structure of `so(3)*` on `ℝ³`: `π^{ij} = ε_ijk xᵏ`.
    pub fn so3_koszul() -> LieAlgebroid {
        let base = Chart::standard("x", 3);
        let pi: Vec<Vec<Poly>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| {
                        let mut p = Poly::zero();
                        for k in 0..3 {
                            let e = levi_civita(i, j, k);
                            if e != 0 {
                                p += &base.coordinate(k) * &Poly::int(e);
                            }
                        }
                        p
                    })
                    .collect()
            })
            .collect();
        LieAlgebroid::koszul(&base, &pi).expect("well formed")
    }

    pub fn base(&self) -> &Chart {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn rank(&self) -> usize {
        self.frame.len()
    }

    pub fn frame(&self) -> &[String] {
        &self.frame
    }

    /// `ρʲ_a`.
    pub fn rho(&self, j: usize, a: usize) -> &Poly {
        &self.rho[j][a]
    }

    /// `Cᶜ_ab`.
    pub fn c(&self, a: usize, b: usize, c: usize) -> &Poly {
        &self.c[a][b][c]
    }

    pub fn anchor_matrix(&self) -> &[Vec<Poly>] {
        &self.rho
    }

    pub fn structure(&self) -> &[Vec<Vec<Poly>>] {
        &self.c
    }

    /// `ρ(e_a)` as a vector field.
    pub fn anchor_of_basis(&self, a: usize) -> VField {
        let comps = (0..self.dim()).map(|j| self.rho[j][a].clone()).collect();
        VField::new(&self.base, comps).expect("dimension matches")
    }

    pub fn section(&self, comps: Vec<Poly>) -> Result<Section, AlgebroidError> {
        if comps.len() != self.rank() {
            return Err(AlgebroidError::SectionRank {
                rank: self.rank(),
                found: comps.len(),
            });
        }
        Ok(Section::new(comps))
    }

    fn ensure_rank(&self, u: &Section) -> Result<(), AlgebroidError> {
        if u.comps.len() != self.rank() {
            return Err(AlgebroidError::SectionRank {
                rank: self.rank(),
                found: u.comps.len(),
            });
        }
        Ok(())
    }

    /// `ρ(u) = uᵃ ρʲ_a ∂_j`.
    pub fn anchor(&self, u: &Section) -> Result<VField, AlgebroidError> {
        self.ensure_rank(u)?;
        let comps = (0..self.dim())
            .map(|j| {
                let mut s = Poly::zero();
                for (a, ua) in u.comps.iter().enumerate() {
                    if !ua.is_zero() && !self.rho[j][a].is_zero() {
                        s += ua * &self.rho[j][a];
                    }
                }
                s
            })
            .collect();
        Ok(VField::new(&self.base, comps)?)
    }

    /// `[u, v]ᶜ = uᵃvᵇCᶜ_ab + ρ(u)(vᶜ) − ρ(v)(uᶜ)`.
    pub fn bracket(&self, u: &Section, v: &Section) -> Result<Section, AlgebroidError> {
        self.ensure_rank(u)?;
        self.ensure_rank(v)?;
        let r = self.rank();
        let ru = self.anchor(u)?;
        let rv = self.anchor(v)?;
        let mut out: Vec<Poly> = (0..r).map(|c| &ru.apply(&v.comps[c]) - &rv.apply(&u.comps[c])).collect();
        for (a, ua) in u.comps.iter().enumerate() {
            if ua.is_zero() {
                continue;
            }
            for (b, vb) in v.comps.iter().enumerate() {
                if vb.is_zero() {
                    continue;
                }
                let uv = ua * vb;
                for (c, slot) in out.iter_mut().enumerate() {
                    let k = &self.c[a][b][c];
                    if !k.is_zero() {
                        *slot += &uv * k;
                    }
                }
            }
        }
        Ok(Section::new(out))
    }

    /// `[u,[v,w]] + [v,[w,u]] + [w,[u,v]]`.
    pub fn jacobiator(&self, u: &Section, v: &Section, w: &Section) -> Result<Section, AlgebroidError> {
        let a = self.bracket(u, &self.bracket(v, w)?)?;
        let b = self.bracket(v, &self.bracket(w, u)?)?;
        let c = self.bracket(w, &self.bracket(u, v)?)?;
        Ok(&(&a + &b) + &c)
    }

    /// Checks antisymmetry of `C`, `ρ_c Cᶜ_ab = [ρ_a, ρ_b]` and the
    /// structure-function form of Jacobi,
    /// `Σ_cyc(a,b,c) [Cᵉ_ad Cᵈ_bc + ρᵏ_a ∂_k Cᵉ_bc] = 0`.
    pub fn check_axioms(&self, mode: &EqualityMode) -> AxiomReport {
        let r = self.rank();
        let n = self.dim();
        let f = &self.frame;
        let mut anti = Check::new("antisymmetry", mode);
        for a in 0..r {
            for b in a..r {
                for c in 0..r {
                    let s = &self.c[a][b][c] + &self.c[b][a][c];
                    anti.zero(&s, mode, || format!("C^{}_({},{})", f[c], f[a], f[b]));
                }
            }
        }
        let anchors: Vec<VField> = (0..r).map(|a| self.anchor_of_basis(a)).collect();
        let mut anchor = Check::new("anchor compatibility", mode);
        for a in 0..r {
            for b in a + 1..r {
                let br = anchors[a].bracket(&anchors[b]).expect("same chart");
                for j in 0..n {
                    let mut lhs = Poly::zero();
                    for c in 0..r {
                        lhs += &self.rho[j][c] * &self.c[a][b][c];
                    }
                    anchor.equal(&lhs, br.comp(j), mode, || {
                        format!("(a,b,j) = ({},{},{})", f[a], f[b], self.base.name(j))
                    });
                }
            }
        }
        // with antisymmetry, increasing triples suffice
        let full = !anti.passed();
        let mut jacobi = Check::new("jacobi", mode);
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    if !full && !(a < b && b < c) {
                        continue;
                    }
                    for e in 0..r {
                        let res = self.jacobi_component(a, b, c, e, &anchors);
                        jacobi.zero(&res, mode, || {
                            format!("(a,b,c,e) = ({},{},{},{})", f[a], f[b], f[c], f[e])
                        });
                    }
                }
            }
        }
        AxiomReport {
            antisymmetry: anti,
            anchor,
            jacobi,
        }
    }

    fn jacobi_component(&self, a: usize, b: usize, c: usize, e: usize, anchors: &[VField]) -> Poly {
        let mut s = Poly::zero();
        for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
            for d in 0..self.rank() {
                let (p, q) = (&self.c[x][d][e], &self.c[y][z][d]);
                if !p.is_zero() && !q.is_zero() {
                    s += p * q;
                }
            }
            s += anchors[x].apply(&self.c[y][z][e]);
        }
        s
    }
}

impl fmt::Display for LieAlgebroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rank {} over ({})", self.rank(), self.base)?;
        for a in 0..self.rank() {
            write!(f, "  ρ({}) = ", self.frame[a])?;
            let terms: Vec<String> = (0..self.dim())
                .filter(|&j| !self.rho[j][a].is_zero())
                .map(|j| format!("({})∂{}", self.rho[j][a], self.base.name(j)))
                .collect();
            writeln!(f, "{}", if terms.is_empty() { "0".into() } else { terms.join(" + ") })?;
        }
        for a in 0..self.rank() {
            for b in a + 1..self.rank() {
                let terms: Vec<String> = (0..self.rank())
                    .filter(|&c| !self.c[a][b][c].is_zero())
                    .map(|c| format!("({}){}", self.c[a][b][c], self.frame[c]))
                    .collect();
                if !terms.is_empty() {
                    writeln!(f, "  [{}, {}] = {}", self.frame[a], self.frame[b], terms.join(" + "))?;
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn zero_structure(r: usize) -> Vec<Vec<Vec<Poly>>> {
    vec![vec![vec![Poly::zero(); r]; r]; r]
}

/// `ε_ijk` on `{0,1,2}`.
pub fn levi_civita(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

fn levi_civita_structure() -> Vec<Vec<Vec<Poly>>> {
    (0..3)
        .map(|a| {
            (0..3)
                .map(|b| (0..3).map(|c| Poly::int(levi_civita(a, b, c))).collect())
                .collect()
        })
        .collect()
}
