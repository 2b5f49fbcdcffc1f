//! Tangent and cotangent charts, lifts of forms to the tangent bundle, and
//! the canonical coordinate flips between iterated tangent/cotangent
//! bundles.

mod identities;

use crate::cartan::{CartanError, Chart, ChartMap, KForm, VField};
use crate::symexpr::parse::precomposed_dot;
use crate::symexpr::Poly;

pub use identities::run_lift_suite;

/// Name of the fibre coordinate over `name`: a dot above the first letter.
pub fn dotted(name: &str) -> String {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return String::new();
    };
    let rest: String = chars.collect();
    match precomposed_dot(first) {
        Some(d) => format!("{d}{rest}"),
        None => format!("{first}\u{307}{rest}"),
    }
}

/// Picks `candidate`, or `candidate_2`, `candidate_3`, … if it is taken.
pub(crate) fn fresh(candidate: String, taken: &dyn Fn(&str) -> bool) -> String {
    if !taken(&candidate) {
        return candidate;
    }
    (2..)
        .map(|k| format!("{candidate}_{k}"))
        .find(|c| !taken(c))
        .expect("unbounded search")
}

/// Chart `(xʲ, ẋʲ)` on the tangent bundle of a base chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentChart {
    base: Chart,
    fibre: Chart,
    total: Chart,
}

impl TangentChart {
    /// Fibre coordinates named by dotting the base names.
    pub fn new(base: &Chart) -> TangentChart {
        TangentChart::build(base, dotted)
    }

    /// Fibre coordinates named `prefix` + base name (e.g. `δx1`).
    pub fn with_prefix(base: &Chart, prefix: &str) -> TangentChart {
        TangentChart::build(base, |n| format!("{prefix}{n}"))
    }

    /// Explicit fibre names.
    pub fn with_fibre(base: &Chart, fibre: &Chart) -> Result<TangentChart, CartanError> {
        if fibre.dim() != base.dim() {
            return Err(CartanError::Arity {
                expected: base.dim(),
                found: fibre.dim(),
            });
        }
        let total = base.product(fibre)?;
        Ok(TangentChart {
            base: base.clone(),
            fibre: fibre.clone(),
            total,
        })
    }

    fn build(base: &Chart, name: impl Fn(&str) -> String) -> TangentChart {
        let mut names: Vec<String> = Vec::new();
        for n in base.names() {
            let taken = |c: &str| base.contains(c) || names.iter().any(|m| m == c);
            let f = fresh(name(n), &taken);
            names.push(f);
        }
        let fibre = Chart::new(&names).expect("generated fibre names are valid");
        let total = base.product(&fibre).expect("fibre names are fresh");
        TangentChart {
            base: base.clone(),
            fibre,
            total,
        }
    }

    pub fn base(&self) -> &Chart {
        &self.base
    }

    pub fn fibre(&self) -> &Chart {
        &self.fibre
    }

    /// `(x¹…xⁿ, ẋ¹…ẋⁿ)`.
    pub fn total(&self) -> &Chart {
        &self.total
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Bundle projection `p_M(x, ẋ) = x`.
    pub fn projection(&self) -> ChartMap {
        ChartMap::new(&self.total, &self.base, self.base.coordinates())
            .expect("projection is well formed")
    }

    /// Euler field `V = ẋʲ ∂/∂xʲ`.
    pub fn euler_field(&self) -> VField {
        let n = self.dim();
        let mut comps = vec![Poly::zero(); 2 * n];
        for j in 0..n {
            comps[j] = self.fibre.coordinate(j);
        }
        VField::new(&self.total, comps).expect("dimension matches")
    }

    /// Checks `Tp_M(V) = ẋ`: the pushforward of the Euler field along the
    /// projection, at the point `(x, ẋ)`, has components `ẋʲ`.
    pub fn euler_projects_to_identity(&self) -> bool {
        let pushed = self
            .projection()
            .push_vector(&self.euler_field())
            .expect("same chart");
        pushed == self.fibre.coordinates()
    }
}

/// Chart `(xʲ, p_j)` on the cotangent bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CotangentChart {
    base: Chart,
    momenta: Chart,
    total: Chart,
}

impl CotangentChart {
    /// Momenta named `prefix1 … prefixN`.
    pub fn new(base: &Chart, prefix: &str) -> CotangentChart {
        let mut names: Vec<String> = Vec::new();
        for i in 0..base.dim() {
            let taken = |c: &str| base.contains(c) || names.iter().any(|m| m == c);
            names.push(fresh(format!("{prefix}{}", i + 1), &taken));
        }
        let momenta = Chart::new(&names).expect("generated momentum names are valid");
        let total = base.product(&momenta).expect("momentum names are fresh");
        CotangentChart {
            base: base.clone(),
            momenta,
            total,
        }
    }

    pub fn with_momenta(base: &Chart, momenta: &Chart) -> Result<CotangentChart, CartanError> {
        if momenta.dim() != base.dim() {
            return Err(CartanError::Arity {
                expected: base.dim(),
                found: momenta.dim(),
            });
        }
        Ok(CotangentChart {
            base: base.clone(),
            momenta: momenta.clone(),
            total: base.product(momenta)?,
        })
    }

    pub fn base(&self) -> &Chart {
        &self.base
    }

    pub fn momenta(&self) -> &Chart {
        &self.momenta
    }

    pub fn total(&self) -> &Chart {
        &self.total
    }

    /// `θ_can = p_i dxⁱ`.
    pub fn theta_can(&self) -> KForm {
        let n = self.base.dim();
        let mut out = KForm::zero(&self.total, 1);
        for i in 0..n {
            out.add_term(&[i], self.momenta.coordinate(i));
        }
        out
    }

    /// `ω_can = dxⁱ∧dp_i = −dθ_can`.
    pub fn omega_can(&self) -> KForm {
        let n = self.base.dim();
        let mut out = KForm::zero(&self.total, 2);
        for i in 0..n {
            out.add_term(&[i, n + i], Poly::one());
        }
        out
    }

    /// The bundle map `(x, v) ↦ (x, p_j = Σ_d v^d s_jd(x))` from a vector
    /// bundle chart `(x, v)` whose base is this chart's base; `s` is
    /// indexed `[j][d]`.
    pub fn bundle_map(&self, source: &Chart, s: &[Vec<Poly>]) -> Result<ChartMap, CartanError> {
        let n = self.base.dim();
        let fibre: Vec<Poly> = source.coordinates()[n..].to_vec();
        let mut comps = self.base.coordinates();
        for row in s.iter().take(n) {
            let mut p = Poly::zero();
            for (v, c) in fibre.iter().zip(row) {
                p += v * c;
            }
            comps.push(p);
        }
        ChartMap::new(source, &self.total, comps)
    }
}

/// `β^∨ = p_M^*β`.
pub fn vertical_lift(a: &KForm, tc: &TangentChart) -> Result<KForm, CartanError> {
    tc.projection().pullback(a)
}

/// `τ(α) = i_V p_M^*α`, a `(k−1)`-form on `TM`.
pub fn tau(a: &KForm, tc: &TangentChart) -> Result<KForm, CartanError> {
    if a.degree() == 0 {
        return Err(CartanError::InteriorOfFunction);
    }
    vertical_lift(a, tc)?.interior(&tc.euler_field())
}

/// Complete lift `α_T = L_V p_M^*α`.
pub fn tangent_lift(a: &KForm, tc: &TangentChart) -> Result<KForm, CartanError> {
    vertical_lift(a, tc)?.lie_derivative(&tc.euler_field())
}

/// `α♯: TM → T*M, X ↦ i_Xα` for a 2-form, as a chart map.
pub fn sharp_map(a: &KForm, tc: &TangentChart, cc: &CotangentChart) -> Result<ChartMap, CartanError> {
    tc.base().ensure_same(a.chart())?;
    let n = tc.dim();
    let s: Vec<Vec<Poly>> = (0..n)
        .map(|j| (0..n).map(|i| a.component(&[i, j])).collect())
        .collect();
    cc.bundle_map(tc.total(), &s)
}

/// Tangent map `TF: TS → TT` of a chart map, in the given tangent charts.
pub fn tangent_map(f: &ChartMap, ts: &TangentChart, tt: &TangentChart) -> Result<ChartMap, CartanError> {
    ts.base().ensure_same(f.source())?;
    tt.base().ensure_same(f.target())?;
    let rename: std::collections::BTreeMap<_, _> = f
        .source()
        .names()
        .iter()
        .cloned()
        .zip(ts.base().coordinates())
        .collect();
    let mut comps: Vec<Poly> = f.comps().iter().map(|c| c.subs(&rename)).collect();
    let jac = f.jacobian();
    for row in &jac {
        let mut v = Poly::zero();
        for (k, d) in row.iter().enumerate() {
            v += d * &ts.fibre().coordinate(k);
        }
        comps.push(v);
    }
    ChartMap::new(ts.total(), tt.total(), comps)
}

/// Iterated tangent chart `(xʲ, ẋʲ, δxʲ, δẋʲ)` of `T(TM)`.
pub fn double_tangent(tc: &TangentChart) -> TangentChart {
    TangentChart::with_prefix(tc.total(), "δ")
}

/// Canonical involution `J_M(x, ẋ, δx, δẋ) = (x, δx, ẋ, δẋ)` of `T(TM)`.
pub fn canonical_involution(ttc: &TangentChart) -> Result<ChartMap, CartanError> {
    let total = ttc.total();
    if !total.dim().is_multiple_of(4) {
        return Err(CartanError::Arity {
            expected: 4 * (total.dim() / 4 + 1),
            found: total.dim(),
        });
    }
    let n = total.dim() / 4;
    let perm: Vec<usize> = (0..n)
        .chain(2 * n..3 * n)
        .chain(n..2 * n)
        .chain(3 * n..4 * n)
        .collect();
    ChartMap::permutation(total, total, &perm)
}

/// `Θ_M(x, p, ẋ, ṗ) = (x, ẋ, ṗ, p)` from `T(T*M)` to `T*(TM)`.
pub fn flip_tt_star(source: &Chart, target: &Chart) -> Result<ChartMap, CartanError> {
    swap_pairs(source, target)
}

/// `I(x, ξ, ẋ, ξ̇) = (x, ξ̇, ẋ, ξ)` on `T(A*)` with `A*` of rank `r`
/// over an `n`-dimensional base.
pub fn flip_dual(source: &Chart, target: &Chart, n: usize) -> Result<ChartMap, CartanError> {
    let total = source.dim();
    if target.dim() != total || total < 2 * n || !(total - 2 * n).is_multiple_of(2) {
        return Err(CartanError::Arity {
            expected: total,
            found: target.dim(),
        });
    }
    let r = (total - 2 * n) / 2;
    // source blocks: x [0,n), ξ [n,n+r), ẋ [n+r,2n+r), ξ̇ [2n+r, 2n+2r)
    let perm: Vec<usize> = (0..n)
        .chain(2 * n + r..2 * n + 2 * r)
        .chain(n + r..2 * n + r)
        .chain(n..n + r)
        .collect();
    ChartMap::permutation(source, target, &perm)
}

/// `(x, a, b, c) ↦ (x, b, c, a)` for four equal blocks.
fn swap_pairs(source: &Chart, target: &Chart) -> Result<ChartMap, CartanError> {
    if source.dim() != target.dim() || !source.dim().is_multiple_of(4) {
        return Err(CartanError::Arity {
            expected: source.dim(),
            found: target.dim(),
        });
    }
    let n = source.dim() / 4;
    let perm: Vec<usize> = (0..n)
        .chain(2 * n..3 * n)
        .chain(3 * n..4 * n)
        .chain(n..2 * n)
        .collect();
    ChartMap::permutation(source, target, &perm)
}

/// The lift of a 2-form built from its sharp map:
/// `α_T(U₁, U₂) = ⟨Θ_M ∘ Tα♯ ∘ J_M (U₁), U₂⟩`.
pub fn tangent_lift_via_sharp(a: &KForm, tc: &TangentChart) -> Result<KForm, CartanError> {
    if a.degree() != 2 {
        return Err(CartanError::MixedDegree(2, a.degree()));
    }
    let n = tc.dim();
    let cc = CotangentChart::new(tc.base(), "p");
    let sharp = sharp_map(a, tc, &cc)?;
    let ttm = double_tangent(tc);
    let tcc = TangentChart::new(cc.total());
    let t_sharp = tangent_map(&sharp, &ttm, &tcc)?;
    let star_tm = CotangentChart::new(tc.total(), "π");
    let theta = flip_tt_star(tcc.total(), star_tm.total())?;
    let composite = canonical_involution(&ttm)?.then(&t_sharp)?.then(&theta)?;
    // covector components of (α_T)♯(e_a), a = 0..2n, read off with δ = e_a
    let total = tc.total();
    let rows: Vec<Vec<Poly>> = (0..2 * n)
        .map(|a_idx| {
            let mut sub = std::collections::BTreeMap::new();
            for (k, name) in ttm.fibre().names().iter().enumerate() {
                sub.insert(name.clone(), Poly::int((k == a_idx) as i64));
            }
            composite.comps()[2 * n..]
                .iter()
                .map(|c| c.subs(&sub))
                .collect()
        })
        .collect();
    Ok(KForm::from_components(total, 2, |idx| rows[idx[0]][idx[1]].clone()))
}
