use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use lieform::algebroid::{cotangent_prolongation, tangent_prolongation, AxiomReport, LieAlgebroid};
use lieform::cartan::{parse_form, run_exterior_suite, Chart, FormSpec, KForm};
use lieform::catalog::{self, check_dirac, pair_groupoid_check, DiracOptions};
use lieform::imform::{analyze_linear, build_lambda, check_im, check_morphism, ImData};
use lieform::problem::{export, Kind, ModeName, Options, Problem, ProblemFile, SuiteName};
use lieform::report::{IdentityReport, SuiteOptions};
use lieform::symexpr::Verdict;
use lieform::tanlift::{run_lift_suite, tangent_lift, tau, TangentChart};

const SEED_VAR: &str = "LIEFORM_SEED";

/// Verify linear and IM 2-forms on Lie algebroids.
///
/// Exit status: 0 all checks pass, 1 a check failed, 2 invalid input,
/// 3 a numeric check was inconclusive.
#[derive(Parser)]
#[command(name = "lieform", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Equality test (default: symbolic).
    #[arg(long, value_enum, global = true)]
    mode: Option<Mode>,
    /// Sample points for numeric checks (default 100).
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Relative tolerance for numeric checks (default 1e-9).
    #[arg(long = "tol", global = true)]
    tolerance: Option<f64>,
    /// Seed for sampling and random inputs; falls back to the file, then
    /// to $LIEFORM_SEED, then to 42.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Add wall-clock time to the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Symbolic,
    Numeric,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Exterior,
    Lift,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Lie algebroid axioms.
    CheckAlgebroid { input: String },
    /// The IM conditions for (σ, φ).
    CheckIm { input: String },
    /// Whether Λ♯ is an algebroid morphism, case by case.
    CheckMorphism { input: String },
    /// Print Λ = −(σ^*ω_can + ρ^*τ(φ)).
    BuildLambda { input: String },
    /// Classify a 2-form on A as linear and closed, and try to reconstruct it.
    AnalyzeLinear { input: String },
    /// Print the tangent lift α_T.
    Lift {
        #[arg(long)]
        form: String,
        #[arg(long)]
        chart: String,
    },
    /// Print τ(α).
    Tau {
        #[arg(long)]
        form: String,
        #[arg(long)]
        chart: String,
    },
    /// Accept or reject a Dirac frame, then check its induced IM 2-form.
    CheckDirac { input: String },
    /// Multiplicativity and the Lie-form relation on a pair groupoid.
    CheckPairGroupoid { input: String },
    /// Run a catalog entry end to end.
    Demo { name: String },
    /// Randomized identity suites.
    VerifyIdentities {
        /// Optional identity-suite problem file.
        input: Option<String>,
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        /// Random inputs per identity (default 50).
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Print a catalog entry as a problem file.
    Export { name: String },
    /// List catalog entries.
    List,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CheckAlgebroid { .. } => "check-algebroid",
            Command::CheckIm { .. } => "check-im",
            Command::CheckMorphism { .. } => "check-morphism",
            Command::BuildLambda { .. } => "build-lambda",
            Command::AnalyzeLinear { .. } => "analyze-linear",
            Command::Lift { .. } => "lift",
            Command::Tau { .. } => "tau",
            Command::CheckDirac { .. } => "check-dirac",
            Command::CheckPairGroupoid { .. } => "check-pair-groupoid",
            Command::Demo { .. } => "demo",
            Command::VerifyIdentities { .. } => "verify-identities",
            Command::Export { .. } => "export",
            Command::List => "list",
        }
    }
}

/// Invalid input; maps to exit status 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

/// Result of one command before rendering.
struct Outcome {
    verdict: Option<Verdict>,
    text: String,
    result: Value,
}

impl Outcome {
    fn check(verdict: Verdict, text: String, result: impl Serialize) -> Outcome {
        Outcome {
            verdict: Some(verdict),
            text: if text.contains("\nverdict: ") {
                text
            } else {
                format!("{text}verdict: {verdict}\n")
            },
            result: to_value(result),
        }
    }

    fn output(text: String, result: impl Serialize) -> Outcome {
        Outcome {
            verdict: None,
            text,
            result: to_value(result),
        }
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Effective run options, echoed in JSON reports.
#[derive(Serialize)]
struct Effective {
    mode: ModeName,
    samples: usize,
    tolerance: f64,
    seed: u64,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    options: Option<Effective>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<Verdict>,
    exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<u128>,
}

fn exit_code(v: Option<Verdict>) -> u8 {
    match v {
        None | Some(Verdict::Pass) => 0,
        Some(Verdict::Fail) => 1,
        Some(Verdict::Inconclusive) => 3,
    }
}

struct Runner {
    flags: Options,
    env_seed: Option<u64>,
}

impl Runner {
    fn new(g: &Global) -> Result<Runner, InputError> {
        let env_seed = match std::env::var(SEED_VAR) {
            Ok(s) => Some(
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| InputError(format!("{SEED_VAR} must be an unsigned integer, got `{s}`")))?,
            ),
            Err(_) => None,
        };
        if let Some(t) = g.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(InputError("--tol must be positive".into()));
            }
        }
        if g.samples == Some(0) {
            return Err(InputError("--samples must be positive".into()));
        }
        Ok(Runner {
            flags: Options {
                mode: g.mode.map(|m| match m {
                    Mode::Symbolic => ModeName::Symbolic,
                    Mode::Numeric => ModeName::Numeric,
                }),
                samples: g.samples,
                tolerance: g.tolerance,
                seed: g.seed,
            },
            env_seed,
        })
    }

    /// Flags win over the file; the environment seed only fills a gap.
    fn options(&self, file: &Options) -> Options {
        let mut o = self.flags.or(file);
        o.seed = o.seed.or(self.env_seed);
        o
    }

    fn effective(o: &Options) -> Effective {
        let n = o.numeric();
        Effective {
            mode: o.mode.unwrap_or(ModeName::Symbolic),
            samples: n.samples,
            tolerance: n.tol,
            seed: n.seed,
        }
    }
}

fn load(input: &str) -> Result<ProblemFile, InputError> {
    let path = Path::new(input);
    if path.exists() {
        let src = std::fs::read_to_string(path).map_err(|e| InputError(format!("{input}: {e}")))?;
        return ProblemFile::from_toml(&src).map_err(|e| InputError(format!("{input}: {e}")));
    }
    export(input).ok_or_else(|| InputError(format!("`{input}` is neither a file nor a catalog entry")))
}

fn expect_kind(file: &ProblemFile, kinds: &[Kind]) -> Result<(), InputError> {
    if kinds.contains(&file.kind) {
        return Ok(());
    }
    let want: Vec<&str> = kinds.iter().map(|k| k.name()).collect();
    Err(InputError(format!("expected a problem of kind {}, found \"{}\"", want.join(" or "), file.kind.name())))
}

fn form_output(form: &KForm) -> Outcome {
    Outcome::output(
        format!("{form}\n"),
        json!({ "chart": form.chart().to_string(), "form": form.to_string(), "records": FormSpec::records(form) }),
    )
}

fn axioms(a: &LieAlgebroid, mode: &lieform::symexpr::EqualityMode) -> (AxiomReport, String) {
    let rep = a.check_axioms(mode);
    let text = format!("algebroid of rank {} over ({})\n{}", a.rank(), a.base(), rep.to_text());
    (rep, text)
}

fn im_data(p: Problem) -> ImData {
    match p {
        Problem::Im(d) => d,
        _ => unreachable!("kind checked"),
    }
}

fn identities(suite: SuiteName, opts: SuiteOptions) -> Outcome {
    let mut reports: Vec<IdentityReport> = Vec::new();
    if matches!(suite, SuiteName::Exterior | SuiteName::All) {
        reports.push(run_exterior_suite(&opts));
    }
    if matches!(suite, SuiteName::Lift | SuiteName::All) {
        reports.push(run_lift_suite(&opts));
    }
    let verdict = Verdict::all(reports.iter().map(IdentityReport::verdict));
    let text = reports.iter().map(IdentityReport::to_text).collect::<String>();
    Outcome::check(verdict, text, &reports)
}

fn run(cmd: &Command, runner: &Runner) -> Result<(Outcome, Option<Options>), InputError> {
    let problem = |input: &str, kinds: &[Kind]| -> Result<(Problem, Options), InputError> {
        let file = load(input)?;
        expect_kind(&file, kinds)?;
        let opts = runner.options(&file.options);
        Ok((file.resolve()?, opts))
    };
    let (outcome, opts) = match cmd {
        Command::CheckAlgebroid { input } => {
            let (p, opts) = problem(input, &[Kind::Algebroid, Kind::Im])?;
            let a = match p {
                Problem::Algebroid(a) => a,
                Problem::Im(d) => d.algebroid().clone(),
                _ => unreachable!("kind checked"),
            };
            let (rep, text) = axioms(&a, &opts.equality_mode());
            (Outcome::check(rep.verdict(), text, &rep), opts)
        }
        Command::CheckIm { input } => {
            let (p, opts) = problem(input, &[Kind::Im])?;
            let rep = check_im(&im_data(p), &opts.equality_mode());
            (Outcome::check(rep.verdict(), rep.to_text(), &rep), opts)
        }
        Command::CheckMorphism { input } => {
            let (p, opts) = problem(input, &[Kind::Im])?;
            let rep = check_morphism(&im_data(p), &opts.equality_mode());
            (Outcome::check(rep.verdict, rep.to_text(), &rep), opts)
        }
        Command::BuildLambda { input } => {
            let (p, opts) = problem(input, &[Kind::Im])?;
            (form_output(build_lambda(&im_data(p)).form()), opts)
        }
        Command::AnalyzeLinear { input } => {
            let (p, opts) = problem(input, &[Kind::LinearForm])?;
            let Problem::LinearForm { chart, form } = p else { unreachable!("kind checked") };
            let rep = analyze_linear(&chart, &form)?;
            // the requested check: a linear form obeying closed ⇔ reconstructs
            let verdict = if rep.biconditional_holds() == Some(true) {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            (Outcome::check(verdict, rep.to_text(), &rep), opts)
        }
        Command::Lift { form, chart } | Command::Tau { form, chart } => {
            let base = Chart::parse(chart)?;
            let alpha = parse_form(form, &base)?;
            let tc = TangentChart::new(&base);
            let out = if matches!(cmd, Command::Lift { .. }) {
                tangent_lift(&alpha, &tc)?
            } else {
                if alpha.degree() == 0 {
                    return Err(InputError("τ needs a form of degree at least 1".into()));
                }
                tau(&alpha, &tc)?
            };
            (form_output(&out), runner.options(&Options::default()))
        }
        Command::CheckDirac { input } => {
            let (p, opts) = problem(input, &[Kind::Dirac])?;
            let Problem::Dirac { frame, involutivity_tol } = p else { unreachable!("kind checked") };
            let rep = check_dirac(
                &frame,
                &DiracOptions {
                    numeric: opts.numeric(),
                    involutivity_tol,
                },
            );
            (Outcome::check(rep.verdict, rep.to_text(), &rep), opts)
        }
        Command::CheckPairGroupoid { input } => {
            let (p, opts) = problem(input, &[Kind::PairGroupoid])?;
            let Problem::PairGroupoid(m) = p else { unreachable!("kind checked") };
            let rep = pair_groupoid_check(&m, &opts.equality_mode());
            (Outcome::check(rep.verdict, rep.to_text(), &rep), opts)
        }
        Command::Demo { name } => {
            let file = export(name).ok_or_else(|| InputError(format!("no catalog entry `{name}`")))?;
            let opts = runner.options(&file.options);
            (demo(name, file.resolve()?, &opts), opts)
        }
        Command::VerifyIdentities { input, suite, trials } => {
            let (file_suite, file_trials, file_opts) = match input {
                Some(i) => {
                    let (p, o) = problem(i, &[Kind::IdentitySuite])?;
                    let Problem::IdentitySuite { suite, trials } = p else { unreachable!("kind checked") };
                    (Some(suite), trials, o)
                }
                None => (None, None, runner.options(&Options::default())),
            };
            let suite = suite
                .map(|s| match s {
                    Suite::Exterior => SuiteName::Exterior,
                    Suite::Lift => SuiteName::Lift,
                    Suite::All => SuiteName::All,
                })
                .or(file_suite)
                .unwrap_or_default();
            let mut so = SuiteOptions {
                seed: file_opts.numeric().seed,
                ..SuiteOptions::default()
            };
            so.trials = trials.or(file_trials).unwrap_or(so.trials);
            if so.trials == 0 {
                return Err(InputError("--trials must be positive".into()));
            }
            (identities(suite, so), file_opts)
        }
        Command::Export { name } => {
            let file = export(name).ok_or_else(|| InputError(format!("no catalog entry `{name}`")))?;
            let out = Outcome::output(file.to_toml(), &file);
            return Ok((out, None));
        }
        Command::List => {
            let mut text = String::new();
            let mut entries = Vec::new();
            let described = catalog::builtin_examples()
                .into_iter()
                .map(|e| (e.name, e.summary))
                .chain(catalog::mutations().into_iter().map(|m| (m.name, m.summary)));
            let described: Vec<_> = described.collect();
            for name in catalog::names() {
                let summary = described.iter().find(|(n, _)| *n == name).map_or("", |(_, s)| s);
                let kind = export(name).map(|f| f.kind.name()).unwrap_or("?");
                text.push_str(&format!("{name:<26} {kind:<14} {summary}\n"));
                entries.push(json!({ "name": name, "kind": kind, "summary": summary }));
            }
            return Ok((Outcome::output(text, entries), None));
        }
    };
    Ok((outcome, Some(opts)))
}

fn demo(name: &str, problem: Problem, opts: &Options) -> Outcome {
    let mode = opts.equality_mode();
    match problem {
        Problem::Im(d) => {
            let (ax, mut text) = axioms(d.algebroid(), &mode);
            let im = check_im(&d, &mode);
            let m = check_morphism(&d, &mode);
            let lambda = build_lambda(&d);
            text.push_str(&im.to_text());
            text.push_str(&m.to_text());
            text.push_str(&format!("Λ = {}\n", lambda.form()));
            let verdict = Verdict::all([ax.verdict(), im.verdict(), m.verdict]);
            Outcome::check(
                verdict,
                format!("{name}\n{text}"),
                json!({ "axioms": ax, "im": im, "morphism": m, "lambda": lambda.form().to_string() }),
            )
        }
        Problem::Algebroid(a) => {
            let (ax, mut text) = axioms(&a, &mode);
            let ta = tangent_prolongation(&a).algebroid().check_axioms(&mode);
            let tsa = cotangent_prolongation(&a).algebroid().check_axioms(&mode);
            text.push_str(&format!("TA\n{}T*A\n{}", ta.to_text(), tsa.to_text()));
            let verdict = Verdict::all([ax.verdict(), ta.verdict(), tsa.verdict()]);
            Outcome::check(
                verdict,
                format!("{name}\n{text}"),
                json!({ "axioms": ax, "tangent_prolongation": ta, "cotangent_prolongation": tsa }),
            )
        }
        Problem::Dirac { frame, involutivity_tol } => {
            let rep = check_dirac(
                &frame,
                &DiracOptions {
                    numeric: opts.numeric(),
                    involutivity_tol,
                },
            );
            Outcome::check(rep.verdict, format!("{name}\n{}", rep.to_text()), &rep)
        }
        Problem::PairGroupoid(m) => {
            let rep = pair_groupoid_check(&m, &mode);
            Outcome::check(rep.verdict, format!("{name}\n{}", rep.to_text()), &rep)
        }
        Problem::LinearForm { .. } | Problem::IdentitySuite { .. } => unreachable!("not in the catalog"),
    }
}

fn input_of(cmd: &Command) -> Option<&str> {
    match cmd {
        Command::CheckAlgebroid { input }
        | Command::CheckIm { input }
        | Command::CheckMorphism { input }
        | Command::BuildLambda { input }
        | Command::AnalyzeLinear { input }
        | Command::CheckDirac { input }
        | Command::CheckPairGroupoid { input } => Some(input),
        Command::Demo { name } | Command::Export { name } => Some(name),
        Command::VerifyIdentities { input, .. } => input.as_deref(),
        Command::Lift { .. } | Command::Tau { .. } | Command::List => None,
    }
}

fn json_line(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

/// A closed pipe downstream is not an error worth reporting.
fn emit(s: &str) {
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let command = cli.command.name();
    let result = Runner::new(&cli.global).and_then(|r| run(&cli.command, &r));
    let elapsed = cli.global.timing.then(|| start.elapsed().as_millis());
    let json = cli.global.format == Format::Json;
    let mut report = Report {
        command,
        input: input_of(&cli.command),
        options: None,
        verdict: None,
        exit_code: 2,
        result: None,
        error: None,
        timing_ms: elapsed,
    };
    match result {
        Ok((out, opts)) => {
            report.exit_code = exit_code(out.verdict);
            if json {
                report.options = opts.as_ref().map(Runner::effective);
                report.verdict = out.verdict;
                report.result = Some(out.result);
                emit(&json_line(&report));
            } else {
                let mut text = out.text;
                if let Some(ms) = elapsed {
                    text.push_str(&format!("elapsed: {ms} ms\n"));
                }
                emit(&text);
            }
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            if json {
                report.error = Some(msg);
                emit(&json_line(&report));
            }
        }
    }
    ExitCode::from(report.exit_code)
}
