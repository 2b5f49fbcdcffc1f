//! Problem files: the TOML input format, its validation into domain
//! objects, and export of catalog entries.
//!
//! ```toml
//! kind = "im"
//! [options]
//! mode = "symbolic"
//! [algebroid]
//! builtin = "so3_koszul"
//! [im]
//! sigma = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]
//! phi = "0"
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebroid::{zero_structure, AlgebroidError, BundleChart, LieAlgebroid};
use crate::cartan::{CartanError, Chart, FormSpec, KForm};
use crate::catalog::{self, DiracError, DiracFrame, PairGroupoidModel};
use crate::imform::{ImData, ImError};
use crate::symexpr::{EqualityMode, NumericOptions, Poly};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("invalid TOML: {0}")]
    Toml(String),
    #[error("{0}")]
    Schema(String),
    #[error("unknown built-in `{0}`")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
    #[error(transparent)]
    Im(#[from] ImError),
    #[error(transparent)]
    Dirac(#[from] DiracError),
}

fn schema(msg: impl Into<String>) -> ProblemError {
    ProblemError::Schema(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Algebroid,
    Im,
    LinearForm,
    Dirac,
    PairGroupoid,
    IdentitySuite,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Algebroid => "algebroid",
            Kind::Im => "im",
            Kind::LinearForm => "linear-form",
            Kind::Dirac => "dirac",
            Kind::PairGroupoid => "pair-groupoid",
            Kind::IdentitySuite => "identity-suite",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Symbolic,
    Numeric,
}

/// Run options; anything unset falls back to command-line flags and then
/// to the numeric defaults (100 samples, tolerance 1e-9, seed 42).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeName>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Options {
    fn is_empty(&self) -> bool {
        *self == Options::default()
    }

    /// `self` with unset fields taken from `other`.
    pub fn or(&self, other: &Options) -> Options {
        Options {
            mode: self.mode.or(other.mode),
            samples: self.samples.or(other.samples),
            tolerance: self.tolerance.or(other.tolerance),
            seed: self.seed.or(other.seed),
        }
    }

    pub fn numeric(&self) -> NumericOptions {
        let d = NumericOptions::default();
        NumericOptions {
            samples: self.samples.unwrap_or(d.samples),
            tol: self.tolerance.unwrap_or(d.tol),
            seed: self.seed.unwrap_or(d.seed),
            ..d
        }
    }

    pub fn equality_mode(&self) -> EqualityMode {
        match self.mode.unwrap_or(ModeName::Symbolic) {
            ModeName::Symbolic => EqualityMode::Symbolic,
            ModeName::Numeric => EqualityMode::Numeric(self.numeric()),
        }
    }
}

type Matrix = Vec<Vec<String>>;

/// A built-in name, an inline `(ρ, C)` description, or the cotangent
/// algebroid of a bivector.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebroidSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    /// Comma-separated coordinate names; defaults to `x1,…,xn`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chart: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame: Option<Vec<String>>,
    /// `rho[j][a] = ρʲ_a`, an `n × r` matrix.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<Matrix>,
    /// `C[a][b][c] = Cᶜ_ab`; omitted means zero.
    #[serde(rename = "C", alias = "c", skip_serializing_if = "Option::is_none")]
    pub structure: Option<Vec<Matrix>>,
    /// `poisson[i][j] = π^{ij}`: the Koszul algebroid of `π`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poisson: Option<Matrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImSpec {
    /// `sigma[j][d] = σ_jd`, an `n × r` matrix.
    pub sigma: Matrix,
    /// Closed 3-form on the base; omitted means zero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<FormSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearSpec {
    /// Base coordinates.
    pub chart: String,
    pub rank: usize,
    /// Prefix of the fibre coordinates, default `u`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fibre: Option<String>,
    /// A 2-form on the total chart `(x, u)`.
    pub form: FormSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracSpec {
    pub chart: String,
    /// `vectors[i][j] = X_iʲ`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Matrix>,
    /// `forms[i][j] = (α_i)_j`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forms: Option<Matrix>,
    /// Shorthand for the frame `(∂_i, i_{∂_i}β)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<FormSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<FormSpec>,
    /// Least-squares bound for involutivity, default 1e-8.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub involutivity_tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combine {
    /// `t^*β − s^*β`
    Telescoped,
    /// `t^*β + s^*β`
    Summed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    /// Coordinates of `M`; `M × M` uses the chart printed by
    /// `PairGroupoidModel::groupoid_chart` (`x1,…,y1,…` for `x` names).
    pub chart: String,
    /// A 2-form on `M × M`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<FormSpec>,
    /// Alternatively a 2-form on `M`, combined per `combine`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<FormSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub combine: Option<Combine>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Exterior,
    Lift,
    #[default]
    All,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    #[serde(default)]
    pub suite: SuiteName,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

/// A whole input file, as written.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Options::is_empty")]
    pub options: Options,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebroid: Option<AlgebroidSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub im: Option<ImSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linear_form: Option<LinearSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dirac: Option<DiracSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_groupoid: Option<PairSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity_suite: Option<SuiteSpec>,
}

/// A validated problem.
#[derive(Clone, Debug)]
pub enum Problem {
    Algebroid(LieAlgebroid),
    Im(ImData),
    LinearForm { chart: BundleChart, form: KForm },
    Dirac { frame: DiracFrame, involutivity_tol: f64 },
    PairGroupoid(PairGroupoidModel),
    IdentitySuite { suite: SuiteName, trials: Option<usize> },
}

fn poly(s: &str) -> Result<Poly, ProblemError> {
    Ok(Poly::parse(s).map_err(CartanError::from)?)
}

fn matrix(m: &Matrix, rows: usize, cols: usize, what: &str) -> Result<Vec<Vec<Poly>>, ProblemError> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(schema(format!("{what} must be a {rows}×{cols} matrix")));
    }
    m.iter().map(|r| r.iter().map(|s| poly(s)).collect()).collect()
}

fn strings(m: &[Vec<Poly>]) -> Matrix {
    m.iter().map(|r| r.iter().map(|p| p.to_string()).collect()).collect()
}

fn form_or_zero(spec: &Option<FormSpec>, chart: &Chart, degree: usize) -> Result<KForm, ProblemError> {
    Ok(match spec {
        Some(s) => s.to_form(chart, Some(degree))?,
        None => KForm::zero(chart, degree),
    })
}

impl AlgebroidSpec {
    pub fn resolve(&self) -> Result<LieAlgebroid, ProblemError> {
        if let Some(name) = &self.builtin {
            let inline = self.chart.is_some()
                || self.n.is_some()
                || self.r.is_some()
                || self.rho.is_some()
                || self.structure.is_some()
                || self.poisson.is_some()
                || self.frame.is_some();
            if inline {
                return Err(schema("[algebroid]: `builtin` excludes every other key"));
            }
            return catalog::algebroid(name).ok_or_else(|| ProblemError::UnknownBuiltin(name.clone()));
        }
        let base = match (&self.chart, self.n) {
            (Some(c), n) => {
                let chart = Chart::parse(c)?;
                if n.is_some_and(|n| n != chart.dim()) {
                    return Err(schema("[algebroid]: `n` disagrees with `chart`"));
                }
                chart
            }
            (None, Some(n)) => Chart::standard("x", n),
            (None, None) => return Err(schema("[algebroid]: need `builtin`, `chart` or `n`")),
        };
        let n = base.dim();
        if let Some(pi) = &self.poisson {
            if self.rho.is_some() || self.structure.is_some() || self.r.is_some() {
                return Err(schema("[algebroid]: `poisson` excludes `rho`, `C` and `r`"));
            }
            let pi = matrix(pi, n, n, "poisson")?;
            let a = LieAlgebroid::koszul(&base, &pi)?;
            return match &self.frame {
                Some(f) => Ok(LieAlgebroid::new(&base, f.clone(), a.anchor_matrix().to_vec(), a.structure().to_vec())?),
                None => Ok(a),
            };
        }
        let Some(rho) = &self.rho else {
            return Err(schema("[algebroid]: need `rho` (or `builtin` / `poisson`)"));
        };
        let r = self
            .r
            .or(self.structure.as_ref().map(Vec::len))
            .or(self.frame.as_ref().map(Vec::len))
            .or(rho.first().map(Vec::len))
            .unwrap_or(0);
        let rho = matrix(rho, n, r, "rho")?;
        let c = match &self.structure {
            Some(c) => {
                if c.len() != r {
                    return Err(schema(format!("C must be an {r}×{r}×{r} array")));
                }
                c.iter()
                    .map(|m| matrix(m, r, r, "each C[a]"))
                    .collect::<Result<Vec<_>, _>>()?
            }
            None => zero_structure(r),
        };
        let frame = self.frame.clone().unwrap_or_else(|| LieAlgebroid::default_frame(r));
        if frame.len() != r {
            return Err(schema(format!("frame must name {r} sections")));
        }
        Ok(LieAlgebroid::new(&base, frame, rho, c)?)
    }

    pub fn inline(a: &LieAlgebroid) -> AlgebroidSpec {
        AlgebroidSpec {
            chart: Some(a.base().to_string()),
            r: Some(a.rank()),
            frame: Some(a.frame().to_vec()),
            rho: Some(strings(a.anchor_matrix())),
            structure: Some(a.structure().iter().map(|m| strings(m)).collect()),
            ..AlgebroidSpec::default()
        }
    }
}

impl ProblemFile {
    pub fn from_toml(src: &str) -> Result<ProblemFile, ProblemError> {
        toml::from_str(src).map_err(|e| ProblemError::Toml(e.message().to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("problem files serialize")
    }

    fn sections(&self) -> [(&'static str, bool); 6] {
        [
            ("algebroid", self.algebroid.is_some()),
            ("im", self.im.is_some()),
            ("linear_form", self.linear_form.is_some()),
            ("dirac", self.dirac.is_some()),
            ("pair_groupoid", self.pair_groupoid.is_some()),
            ("identity_suite", self.identity_suite.is_some()),
        ]
    }

    /// Validates the payload against its kind and builds the problem. No
    /// check is run here.
    pub fn resolve(&self) -> Result<Problem, ProblemError> {
        let needed: &[&str] = match self.kind {
            Kind::Algebroid => &["algebroid"],
            Kind::Im => &["algebroid", "im"],
            Kind::LinearForm => &["linear_form"],
            Kind::Dirac => &["dirac"],
            Kind::PairGroupoid => &["pair_groupoid"],
            Kind::IdentitySuite => &["identity_suite"],
        };
        let optional = self.kind == Kind::IdentitySuite;
        for (name, present) in self.sections() {
            if present && !needed.contains(&name) {
                return Err(schema(format!("section [{name}] is not allowed for kind \"{}\"", self.kind.name())));
            }
            if !present && needed.contains(&name) && !optional {
                return Err(schema(format!("kind \"{}\" needs a [{name}] section", self.kind.name())));
            }
        }
        Ok(match self.kind {
            Kind::Algebroid => Problem::Algebroid(self.algebroid.as_ref().expect("checked").resolve()?),
            Kind::Im => {
                let a = self.algebroid.as_ref().expect("checked").resolve()?;
                let im = self.im.as_ref().expect("checked");
                let sigma = matrix(&im.sigma, a.dim(), a.rank(), "sigma")?;
                let phi = form_or_zero(&im.phi, a.base(), 3)?;
                Problem::Im(ImData::new(a, sigma, phi)?)
            }
            Kind::LinearForm => {
                let l = self.linear_form.as_ref().expect("checked");
                let base = Chart::parse(&l.chart)?;
                let chart = BundleChart::new(&base, l.fibre.as_deref().unwrap_or("u"), l.rank);
                let form = l.form.to_form(chart.total(), Some(2))?;
                Problem::LinearForm { chart, form }
            }
            Kind::Dirac => {
                let d = self.dirac.as_ref().expect("checked");
                let base = Chart::parse(&d.chart)?;
                let phi = form_or_zero(&d.phi, &base, 3)?;
                let frame = match (&d.graph, &d.vectors, &d.forms) {
                    (Some(g), None, None) => DiracFrame::graph(&g.to_form(&base, Some(2))?, &phi)?,
                    (None, Some(x), Some(a)) => {
                        let n = base.dim();
                        DiracFrame::new(&base, matrix(x, n, n, "vectors")?, matrix(a, n, n, "forms")?, phi)?
                    }
                    _ => return Err(schema("[dirac]: give either `graph` or both `vectors` and `forms`")),
                };
                Problem::Dirac {
                    frame,
                    involutivity_tol: d.involutivity_tol.unwrap_or(1e-8),
                }
            }
            Kind::PairGroupoid => {
                let p = self.pair_groupoid.as_ref().expect("checked");
                let base = Chart::parse(&p.chart)?;
                let model = match (&p.omega, &p.beta) {
                    (Some(o), None) if p.combine.is_none() => {
                        let g = PairGroupoidModel::groupoid_chart(&base);
                        PairGroupoidModel::new(&base, &o.to_form(&g, Some(2))?)?
                    }
                    (None, Some(b)) => {
                        let beta = b.to_form(&base, Some(2))?;
                        match p.combine.unwrap_or(Combine::Telescoped) {
                            Combine::Telescoped => PairGroupoidModel::telescoped(&beta),
                            Combine::Summed => PairGroupoidModel::summed(&beta),
                        }
                    }
                    _ => return Err(schema("[pair_groupoid]: give either `omega` or `beta` (with optional `combine`)")),
                };
                Problem::PairGroupoid(model)
            }
            Kind::IdentitySuite => {
                let s = self.identity_suite.clone().unwrap_or_default();
                Problem::IdentitySuite {
                    suite: s.suite,
                    trials: s.trials,
                }
            }
        })
    }

    fn empty(kind: Kind) -> ProblemFile {
        ProblemFile {
            kind,
            options: Options::default(),
            algebroid: None,
            im: None,
            linear_form: None,
            dirac: None,
            pair_groupoid: None,
            identity_suite: None,
        }
    }

    pub fn from_algebroid(a: &LieAlgebroid) -> ProblemFile {
        ProblemFile {
            algebroid: Some(AlgebroidSpec::inline(a)),
            ..Self::empty(Kind::Algebroid)
        }
    }

    pub fn from_im(d: &ImData) -> ProblemFile {
        ProblemFile {
            algebroid: Some(AlgebroidSpec::inline(d.algebroid())),
            im: Some(ImSpec {
                sigma: strings(d.sigma()),
                phi: (!d.phi().is_zero()).then(|| FormSpec::records(d.phi())),
            }),
            ..Self::empty(Kind::Im)
        }
    }

    pub fn from_dirac(f: &DiracFrame) -> ProblemFile {
        ProblemFile {
            dirac: Some(DiracSpec {
                chart: f.base().to_string(),
                vectors: Some(strings(f.vector_parts())),
                forms: Some(strings(f.form_parts())),
                graph: None,
                phi: (!f.phi().is_zero()).then(|| FormSpec::records(f.phi())),
                involutivity_tol: None,
            }),
            ..Self::empty(Kind::Dirac)
        }
    }

    pub fn from_pair(m: &PairGroupoidModel) -> ProblemFile {
        ProblemFile {
            pair_groupoid: Some(PairSpec {
                chart: m.base().to_string(),
                omega: Some(FormSpec::records(m.omega())),
                beta: None,
                combine: None,
            }),
            ..Self::empty(Kind::PairGroupoid)
        }
    }

    pub fn from_linear(chart: &BundleChart, form: &KForm) -> ProblemFile {
        let prefix: String = chart
            .fibre()
            .name(0)
            .trim_end_matches(|c: char| c.is_ascii_digit())
            .to_string();
        ProblemFile {
            linear_form: Some(LinearSpec {
                chart: chart.base().to_string(),
                rank: chart.rank(),
                fibre: (prefix != "u").then_some(prefix),
                form: FormSpec::records(form),
            }),
            ..Self::empty(Kind::LinearForm)
        }
    }
}

/// A catalog entry as a problem file, for reproduction.
pub fn export(name: &str) -> Option<ProblemFile> {
    if let Some(d) = catalog::im_example(name) {
        return Some(ProblemFile::from_im(&d));
    }
    if let Some(f) = catalog::dirac_example(name) {
        return Some(ProblemFile::from_dirac(&f));
    }
    if let Some(m) = catalog::pair_example(name) {
        return Some(ProblemFile::from_pair(&m));
    }
    catalog::algebroid(name).map(|a| ProblemFile::from_algebroid(&a))
}

#[cfg(test)]
mod tests;
