//! Report types shared by the identity suites and the checkers.

use serde::Serialize;

use crate::symexpr::{check_zero, EqualityMode, Method, Point, Poly, Verdict};

/// Result of running one identity over a batch of random inputs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityOutcome {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// Human-readable description of the first failing input.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl IdentityOutcome {
    pub fn new(name: &str) -> Self {
        IdentityOutcome {
            name: name.to_string(),
            trials: 0,
            failures: 0,
            first_failure: None,
        }
    }

    /// Records one trial; `residual` is `None` on success.
    pub fn record(&mut self, residual: Option<String>) {
        self.trials += 1;
        if let Some(r) = residual {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(r);
            }
        }
    }

    pub fn verdict(&self) -> Verdict {
        if self.failures == 0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IdentityReport {
    pub suite: String,
    pub seed: u64,
    pub outcomes: Vec<IdentityOutcome>,
}

impl IdentityReport {
    pub fn verdict(&self) -> Verdict {
        Verdict::all(self.outcomes.iter().map(IdentityOutcome::verdict))
    }

    pub fn get(&self, name: &str) -> Option<&IdentityOutcome> {
        self.outcomes.iter().find(|o| o.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} (seed {})\n", self.suite, self.seed);
        for o in &self.outcomes {
            out.push_str(&format!(
                "  {:<44} {:>4} trials  {}\n",
                o.name,
                o.trials,
                if o.failures == 0 {
                    "pass".to_string()
                } else {
                    format!("FAIL ({} failures)", o.failures)
                }
            ));
            if let Some(f) = &o.first_failure {
                out.push_str(&format!("      first failure: {f}\n"));
            }
        }
        out
    }
}

/// Size and seed of a randomized identity suite.
#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    /// Random inputs per identity.
    pub trials: usize,
    pub seed: u64,
    pub shape: crate::random::PolyShape,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            trials: 50,
            seed: 42,
            shape: crate::random::PolyShape::default(),
        }
    }
}

/// Where a check first failed: the case label (index tuple, section pair)
/// and, when available, a point at which the residual is nonzero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub case: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Point<f64>>,
    pub residual: String,
}

/// One named condition tested over many component identities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub method: Method,
    /// Number of scalar identities tested.
    pub cases: usize,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Check {
    pub fn new(name: &str, mode: &EqualityMode) -> Self {
        Check {
            name: name.to_string(),
            verdict: Verdict::Pass,
            method: match mode {
                EqualityMode::Symbolic => Method::Symbolic,
                EqualityMode::Numeric(_) => Method::Numeric,
            },
            cases: 0,
            max_residual: 0.0,
            witness: None,
        }
    }

    /// Tests `residual ≡ 0`; `case` labels the identity for the witness.
    pub fn zero(
        &mut self,
        residual: &Poly,
        mode: &EqualityMode,
        case: impl FnOnce() -> String,
    ) {
        self.cases += 1;
        let t = check_zero(residual, mode);
        if t.method == Method::Numeric {
            self.method = Method::Numeric;
        }
        if t.max_residual.is_finite() {
            self.max_residual = self.max_residual.max(t.max_residual);
        } else {
            self.max_residual = f64::INFINITY;
        }
        let worse = match (self.verdict, t.verdict) {
            (_, Verdict::Pass) => false,
            (Verdict::Pass, _) => true,
            (Verdict::Inconclusive, Verdict::Fail) => true,
            _ => false,
        };
        self.verdict = self.verdict.and(t.verdict);
        if worse {
            self.witness = Some(Witness {
                case: case(),
                point: t.witness,
                residual: residual.to_string(),
            });
        }
    }

    pub fn equal(
        &mut self,
        lhs: &Poly,
        rhs: &Poly,
        mode: &EqualityMode,
        case: impl FnOnce() -> String,
    ) {
        self.zero(&(lhs - rhs), mode, case)
    }

    /// Records a failure found outside the residual machinery.
    pub fn fail(&mut self, case: String, residual: String) {
        self.cases += 1;
        if self.verdict != Verdict::Fail {
            self.witness = Some(Witness {
                case,
                point: None,
                residual,
            });
        }
        self.verdict = Verdict::Fail;
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    /// One-line summary.
    pub fn line(&self) -> String {
        let mut s = format!("{:<28} {:<12} ({} identities", self.name, self.verdict, self.cases);
        if self.method == Method::Numeric {
            s.push_str(&format!(", max residual {:.3e}", self.max_residual));
        }
        s.push(')');
        if let Some(w) = &self.witness {
            s.push_str(&format!("\n    witness: {}", w.case));
            if let Some(p) = &w.point {
                s.push_str(&format!(" at {p}"));
            }
            s.push_str(&format!("\n    residual: {}", w.residual));
        }
        s
    }
}

impl Check {
    /// Records one numeric residual magnitude measured at `point`.
    pub fn sample(&mut self, value: f64, tol: f64, case: impl FnOnce() -> String, point: &Point<f64>) {
        self.cases += 1;
        self.method = Method::Numeric;
        self.max_residual = self.max_residual.max(value);
        if (value.is_nan() || value > tol) && self.verdict != Verdict::Fail {
            self.verdict = Verdict::Fail;
            self.witness = Some(Witness {
                case: case(),
                point: Some(point.clone()),
                residual: format!("{value:.3e}"),
            });
        }
    }
}
