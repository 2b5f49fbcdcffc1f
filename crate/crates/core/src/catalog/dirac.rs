//! Frames of φ-twisted Dirac structures `L ⊂ TM ⊕ T*M` and the IM 2-form
//! given by the projection `L → T*M`.
//!
//! The Courant bracket used here is the twisted Dorfman bracket
//! `[[(X,α),(Y,β)]] = ([X,Y], L_Xβ − i_Y dα + i_Y i_X φ)`. With this sign the
//! graph of `β` is involutive exactly when `φ = −dβ`, matching IM2.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::algebroid::{AlgebroidError, LieAlgebroid};
use crate::cartan::{CartanError, Chart, KForm, VField};
use crate::imform::{check_im, ImData, ImError, ImReport};
use crate::report::Check;
use crate::symexpr::{EqualityMode, NumericOptions, Point, Poly, Sampler, Verdict};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiracError {
    #[error("frame must have {n} sections with {n} components each")]
    Shape { n: usize },
    #[error("not isotropic: ⟨{pair}⟩ = {residual}")]
    NotIsotropic { pair: String, residual: String },
    #[error("frame has rank {rank} < {n} at {point}")]
    RankDeficient { rank: usize, n: usize, point: String },
    #[error("not involutive: {pair} leaves the frame at {point} (residual {residual:.3e})")]
    NotInvolutive { pair: String, point: String, residual: f64 },
    #[error("frame span has no invertible {0}×{0} minor at the sample points")]
    NoMinor(usize),
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
    #[error(transparent)]
    Im(#[from] ImError),
}

/// `n` sections `(X_i, α_i)` of `TM ⊕ T*M`, components `x[i][j] = X_iʲ`,
/// `alpha[i][j] = (α_i)_j`, and a closed twisting 3-form.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracFrame {
    base: Chart,
    x: Vec<Vec<Poly>>,
    alpha: Vec<Vec<Poly>>,
    phi: KForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiracOptions {
    pub numeric: NumericOptions,
    /// Bound on the least-squares residual of each bracket.
    pub involutivity_tol: f64,
}

impl Default for DiracOptions {
    fn default() -> Self {
        DiracOptions {
            numeric: NumericOptions::default(),
            involutivity_tol: 1e-8,
        }
    }
}

impl DiracFrame {
    pub fn new(base: &Chart, x: Vec<Vec<Poly>>, alpha: Vec<Vec<Poly>>, phi: KForm) -> Result<DiracFrame, DiracError> {
        let n = base.dim();
        let ok = |m: &Vec<Vec<Poly>>| m.len() == n && m.iter().all(|r| r.len() == n);
        if !ok(&x) || !ok(&alpha) {
            return Err(DiracError::Shape { n });
        }
        for v in x.iter().chain(&alpha).flatten().flat_map(Poly::free_vars) {
            if !base.contains(&v) {
                return Err(CartanError::UnknownVariable(v.to_string()).into());
            }
        }
        if phi.degree() != 3 {
            return Err(ImError::PhiDegree(phi.degree()).into());
        }
        let phi = phi.embed(base)?;
        Ok(DiracFrame {
            base: base.clone(),
            x,
            alpha,
            phi,
        })
    }

    /// The graph of `β`: sections `(∂_i, i_{∂_i}β)`.
    pub fn graph(beta: &KForm, phi: &KForm) -> Result<DiracFrame, DiracError> {
        let base = beta.chart().clone();
        let n = base.dim();
        let x = (0..n)
            .map(|i| (0..n).map(|j| Poly::int((i == j) as i64)).collect())
            .collect();
        let alpha = (0..n).map(|i| (0..n).map(|j| beta.component(&[i, j])).collect()).collect();
        DiracFrame::new(&base, x, alpha, phi.clone())
    }

    pub fn base(&self) -> &Chart {
        &self.base
    }

    pub fn phi(&self) -> &KForm {
        &self.phi
    }

    pub fn vector_parts(&self) -> &[Vec<Poly>] {
        &self.x
    }

    pub fn form_parts(&self) -> &[Vec<Poly>] {
        &self.alpha
    }

    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn section(&self, i: usize) -> (VField, KForm) {
        let v = VField::new(&self.base, self.x[i].clone()).expect("shape validated");
        let mut a = KForm::zero(&self.base, 1);
        for (j, c) in self.alpha[i].iter().enumerate() {
            a.add_term(&[j], c.clone());
        }
        (v, a)
    }

    /// `⟨e_i, e_j⟩ = α_i(X_j) + α_j(X_i)`.
    pub fn pairing(&self, i: usize, j: usize) -> Poly {
        let mut s = Poly::zero();
        for k in 0..self.dim() {
            s += &self.alpha[i][k] * &self.x[j][k];
            s += &self.alpha[j][k] * &self.x[i][k];
        }
        s
    }

    /// Twisted Dorfman bracket of two frame sections, as `2n` components.
    pub fn courant(&self, i: usize, j: usize) -> Vec<Poly> {
        let (x, a) = self.section(i);
        let (y, b) = self.section(j);
        let v = x.bracket(&y).expect("same chart");
        let f = &(&b.lie_derivative(&x).expect("same chart") - &a.d().interior(&y).expect("same chart"))
            + &self.phi.interior(&x).expect("same chart").interior(&y).expect("same chart");
        let mut out = v.comps().to_vec();
        out.extend((0..self.dim()).map(|k| f.coeff(&[k])));
        out
    }

    /// The frame `e'_i = m_ij e_j` for a constant matrix `m`.
    pub fn transformed(&self, m: &[Vec<i64>]) -> DiracFrame {
        let n = self.dim();
        let mix = |src: &[Vec<Poly>]| -> Vec<Vec<Poly>> {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|k| {
                            let mut s = Poly::zero();
                            for (j, row) in src.iter().enumerate() {
                                if m[i][j] != 0 {
                                    s += &row[k] * &Poly::int(m[i][j]);
                                }
                            }
                            s
                        })
                        .collect()
                })
                .collect()
        };
        DiracFrame {
            base: self.base.clone(),
            x: mix(&self.x),
            alpha: mix(&self.alpha),
            phi: self.phi.clone(),
        }
    }

    /// The `2n × n` matrix with columns `(X_i, α_i)` at a point.
    fn matrix(&self, pt: &Point<f64>) -> Option<DMatrix<f64>> {
        let n = self.dim();
        let mut m = DMatrix::zeros(2 * n, n);
        for i in 0..n {
            for k in 0..n {
                m[(k, i)] = self.x[i][k].eval(pt).ok()?;
                m[(n + k, i)] = self.alpha[i][k].eval(pt).ok()?;
            }
        }
        Some(m)
    }

    /// Row `r` of the frame matrix: the `r`-th component of each section.
    fn row(&self, r: usize) -> Vec<Poly> {
        let n = self.dim();
        (0..n)
            .map(|i| if r < n { self.x[i][r].clone() } else { self.alpha[i][r - n].clone() })
            .collect()
    }
}

fn rank(m: &DMatrix<f64>) -> usize {
    let sv = m.singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > 1e-10 * top.max(1.0)).count()
}

/// Least-squares residual `min_c ‖Fc − b‖`.
fn residual(f: &DMatrix<f64>, b: &[f64]) -> f64 {
    let rhs = DMatrix::from_column_slice(b.len(), 1, b);
    let svd = f.clone().svd(true, true);
    match svd.solve(&rhs, 1e-12) {
        Ok(c) => (f * c - rhs).norm(),
        Err(_) => f64::INFINITY,
    }
}

/// Symbolic Gauss–Jordan inverse; pivots are chosen among entries that
/// are nonzero at `pt`, preferring constants.
fn inverse(m: &[Vec<Poly>], pt: &Point<f64>) -> Option<Vec<Vec<Poly>>> {
    let n = m.len();
    let mut a: Vec<Vec<Poly>> = m.to_vec();
    let mut inv: Vec<Vec<Poly>> = (0..n)
        .map(|i| (0..n).map(|j| Poly::int((i == j) as i64)).collect())
        .collect();
    for col in 0..n {
        let usable = |p: &Poly| !p.is_zero() && p.eval(pt).is_ok_and(|v: f64| v.abs() > 1e-9);
        let piv = (col..n)
            .filter(|&r| usable(&a[r][col]))
            .min_by_key(|&r| (!a[r][col].is_constant(), a[r][col].len()))?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].reciprocal();
        a[col] = a[col].iter().map(|e| e * &p).collect();
        inv[col] = inv[col].iter().map(|e| e * &p).collect();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for k in 0..n {
                let (ak, ik) = (&a[col][k] * &f, &inv[col][k] * &f);
                a[r][k] -= ak;
                inv[r][k] -= ik;
            }
        }
    }
    Some(inv)
}

/// Outcome of [`check_dirac`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiracReport {
    pub verdict: Verdict,
    pub isotropy: Check,
    pub rank: Check,
    pub involutivity: Check,
    /// Present once the frame is accepted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub im: Option<ImReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejection: Option<String>,
    #[serde(skip)]
    pub data: Option<ImData>,
}

impl DiracReport {
    pub fn to_text(&self) -> String {
        let mut s = String::from("Dirac frame\n");
        for c in [&self.isotropy, &self.rank, &self.involutivity] {
            s.push_str(&format!("  {}\n", c.line().replace('\n', "\n  ")));
        }
        if let Some(r) = &self.rejection {
            s.push_str(&format!("rejected: {r}\n"));
        }
        if let Some(im) = &self.im {
            s.push_str("induced IM 2-form (numeric)\n");
            for line in im.to_text().lines() {
                s.push_str(&format!("  {line}\n"));
            }
        }
        s.push_str(&format!("verdict: {}\n", self.verdict));
        s
    }
}

/// Isotropy (symbolic), rank and involutivity (numeric at sample points),
/// then the induced IM 2-form checked numerically.
pub fn check_dirac(frame: &DiracFrame, opts: &DiracOptions) -> DiracReport {
    let n = frame.dim();
    let sym = EqualityMode::Symbolic;
    let num = EqualityMode::Numeric(opts.numeric);
    let mut isotropy = Check::new("isotropy", &sym);
    for i in 0..n {
        for j in i..n {
            isotropy.zero(&frame.pairing(i, j), &sym, || format!("e{}, e{}", i + 1, j + 1));
        }
    }
    let mut sampler = Sampler::from_options(&opts.numeric);
    let names: Vec<&str> = frame.base.names().iter().map(|s| s.as_ref()).collect();
    let points: Vec<Point<f64>> = (0..opts.numeric.samples.max(1))
        .map(|_| sampler.point(names.iter().copied()))
        .collect();
    let mut rank_check = Check::new("rank", &num);
    let mut mats = Vec::with_capacity(points.len());
    for pt in &points {
        let m = frame.matrix(pt);
        let deficit = m.as_ref().map_or(n, |m| n - rank(m));
        rank_check.sample(deficit as f64, 0.0, || format!("rank {} < {n}", n - deficit), pt);
        mats.push(m);
    }
    let mut involutivity = Check::new("involutivity", &num);
    for i in 0..n {
        for j in i + 1..n {
            let b = frame.courant(i, j);
            for (pt, m) in points.iter().zip(&mats) {
                let vals: Option<Vec<f64>> = b.iter().map(|c| c.eval(pt).ok()).collect();
                let r = match (m, vals) {
                    (Some(m), Some(v)) => residual(m, &v),
                    _ => f64::INFINITY,
                };
                involutivity.sample(r, opts.involutivity_tol, || format!("[[e{}, e{}]]", i + 1, j + 1), pt);
            }
        }
    }
    let mut report = DiracReport {
        verdict: Verdict::Fail,
        isotropy,
        rank: rank_check,
        involutivity,
        im: None,
        rejection: None,
        data: None,
    };
    match induced(frame, &points, &report) {
        Ok(data) => {
            let im = check_im(&data, &num);
            report.verdict = Verdict::all([
                report.isotropy.verdict,
                report.rank.verdict,
                report.involutivity.verdict,
                im.verdict(),
            ]);
            report.im = Some(im);
            report.data = Some(data);
        }
        Err(e) => report.rejection = Some(e.to_string()),
    }
    report
}

/// The algebroid `L` in the given frame, with `σ = pr_{T*}`; rejects the
/// frame with the first failing pair or point.
pub fn dirac_to_im(frame: &DiracFrame, opts: &DiracOptions) -> Result<ImData, DiracError> {
    let report = check_dirac(frame, opts);
    match report.data {
        Some(d) => Ok(d),
        None => Err(first_rejection(frame, &report)),
    }
}

fn first_rejection(frame: &DiracFrame, r: &DiracReport) -> DiracError {
    let describe = |c: &Check| {
        let w = c.witness.as_ref().expect("failed checks carry a witness");
        let point = w.point.as_ref().map_or_else(String::new, |p| p.to_string());
        (w.case.clone(), point, w.residual.clone())
    };
    if !r.isotropy.passed() {
        let (pair, _, residual) = describe(&r.isotropy);
        return DiracError::NotIsotropic { pair, residual };
    }
    if !r.rank.passed() {
        let (case, point, _) = describe(&r.rank);
        let rank = case
            .split_whitespace()
            .nth(1)
            .and_then(|s| s.parse().ok())
            .unwrap_or(0);
        return DiracError::RankDeficient {
            rank,
            n: frame.dim(),
            point,
        };
    }
    if !r.involutivity.passed() {
        let (pair, point, _) = describe(&r.involutivity);
        return DiracError::NotInvolutive {
            pair,
            point,
            residual: r.involutivity.max_residual,
        };
    }
    DiracError::NoMinor(frame.dim())
}

fn induced(frame: &DiracFrame, points: &[Point<f64>], report: &DiracReport) -> Result<ImData, DiracError> {
    if !(report.isotropy.passed() && report.rank.passed() && report.involutivity.passed()) {
        return Err(first_rejection(frame, report));
    }
    let n = frame.dim();
    let pt = points.first().ok_or(DiracError::NoMinor(n))?;
    let m = frame.matrix(pt).ok_or(DiracError::NoMinor(n))?;
    // rows of the frame matrix spanning an invertible minor at pt
    let mut rows: Vec<usize> = Vec::new();
    for r in 0..2 * n {
        let mut cand = rows.clone();
        cand.push(r);
        let sub = DMatrix::from_fn(cand.len(), n, |i, j| m[(cand[i], j)]);
        if rank(&sub) == cand.len() {
            rows = cand;
        }
        if rows.len() == n {
            break;
        }
    }
    if rows.len() < n {
        return Err(DiracError::NoMinor(n));
    }
    let minor: Vec<Vec<Poly>> = rows.iter().map(|&r| frame.row(r)).collect();
    let inv = inverse(&minor, pt).ok_or(DiracError::NoMinor(n))?;
    let mut c = vec![vec![vec![Poly::zero(); n]; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let br = frame.courant(a, b);
            for k in 0..n {
                let mut s = Poly::zero();
                for (t, &r) in rows.iter().enumerate() {
                    if !inv[k][t].is_zero() && !br[r].is_zero() {
                        s += &inv[k][t] * &br[r];
                    }
                }
                c[b][a][k] = -s.clone();
                c[a][b][k] = s;
            }
        }
    }
    let rho: Vec<Vec<Poly>> = (0..n).map(|j| (0..n).map(|a| frame.x[a][j].clone()).collect()).collect();
    let sigma: Vec<Vec<Poly>> = (0..n).map(|j| (0..n).map(|a| frame.alpha[a][j].clone()).collect()).collect();
    let names = (1..=n).map(|i| format!("L{i}")).collect();
    let algebroid = LieAlgebroid::new(&frame.base, names, rho, c)?;
    Ok(ImData::new(algebroid, sigma, frame.phi.clone())?)
}
