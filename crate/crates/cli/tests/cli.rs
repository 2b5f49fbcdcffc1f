use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lieform::cartan::{parse_form, Chart};
use lieform::tanlift::{tangent_lift, TangentChart};
use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn problem(name: &str) -> String {
    root().join("problems").join(name).to_string_lossy().into_owned()
}

fn lieform(args: &[&str]) -> Output {
    lieform_env(args, None)
}

fn lieform_env(args: &[&str], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lieform"));
    cmd.args(args).env_remove("LIEFORM_SEED");
    if let Some(s) = seed {
        cmd.env("LIEFORM_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let o = lieform(&full);
    (code(&o), serde_json::from_str(&stdout(&o)).expect("valid JSON"))
}

#[test]
fn tau_prints_coordinate_formula() {
    let o = lieform(&["tau", "--form", "dx1^dx2", "--chart", "x1,x2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "ẋ1·dx2 − ẋ2·dx1\n");
}

#[test]
fn printed_forms_reparse() {
    let base = Chart::parse("x1,x2,x3").unwrap();
    let tc = TangentChart::new(&base);
    for src in ["x2*dx1^dx3", "x1^2*dx2 + sin(x3)*dx1", "dx1^dx2^dx3"] {
        for cmd in ["lift", "tau"] {
            let o = lieform(&[cmd, "--form", src, "--chart", "x1,x2,x3"]);
            assert_eq!(code(&o), 0, "{cmd} {src}");
            let printed = stdout(&o);
            let back = parse_form(printed.trim(), tc.total()).unwrap_or_else(|e| panic!("{printed}: {e}"));
            if cmd == "lift" {
                let alpha = parse_form(src, &base).unwrap();
                assert_eq!(back, tangent_lift(&alpha, &tc).unwrap());
            }
            assert_eq!(back.to_string(), printed.trim());
        }
    }
}

#[test]
fn check_im_on_koszul_file() {
    let o = lieform(&["check-im", &problem("so3_koszul.toml")]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("IM1") && out.contains("IM2"));
    assert_eq!(out.matches(" pass ").count(), 2, "{out}");
}

#[test]
fn morphism_failure_names_core_anchor() {
    let o = lieform(&["check-morphism", &problem("mutated_im1.toml")]);
    assert_eq!(code(&o), 1);
    let (c, v) = json(&["check-morphism", &problem("mutated_im1.toml")]);
    assert_eq!(c, 1);
    assert_eq!(v["verdict"], "fail");
    let core = &v["result"]["anchor_core"];
    assert_eq!(core["name"], "anchor (core sections)");
    assert_eq!(core["verdict"], "fail");
    assert!(core["witness"]["case"].as_str().unwrap().starts_with("ρ("));
    for other in ["covering", "anchor_linear", "bracket_core_core", "bracket_core_linear", "bracket_linear_linear"] {
        assert_eq!(v["result"][other]["verdict"], "pass", "{other}");
    }
}

#[test]
fn im2_mutation_fails_linear_cases() {
    let (c, v) = json(&["check-morphism", &problem("mutated_im2.toml")]);
    assert_eq!(c, 1);
    for (case, verdict) in [("anchor_core", "pass"), ("anchor_linear", "fail"), ("bracket_core_linear", "fail")] {
        assert_eq!(v["result"][case]["verdict"], verdict, "{case}");
    }
}

#[test]
fn invalid_inputs_exit_2() {
    let dir = std::env::temp_dir().join(format!("lieform-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.toml");
    let cases = [
        ("kind = \"im\"\n[algebroid]\nbuiltin = \"so3\"\n", "needs a [im]"),
        ("kind = \"im\"\n[algebroid]\nbuiltin = \"tm_r2\"\n[im]\nsigma = [[\"x1 +\", \"0\"], [\"0\", \"0\"]]\n", "error"),
        ("not toml = = 1", "invalid TOML"),
        ("kind = \"im\"\n[algebroid]\nchart = \"x1,x1\"\nrho = [[\"1\"]]\n[im]\nsigma = []\n", "duplicate"),
    ];
    for (src, needle) in cases {
        std::fs::write(&bad, src).unwrap();
        let o = lieform(&["check-im", bad.to_str().unwrap()]);
        assert_eq!(code(&o), 2, "{src}");
        assert!(String::from_utf8_lossy(&o.stderr).contains(needle), "{src}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(code(&lieform(&["check-im", "no/such/file.toml"])), 2);
    assert_eq!(code(&lieform(&["check-im", &problem("pair_r3.toml")])), 2);
    assert_eq!(code(&lieform(&["tau", "--form", "dy1", "--chart", "x1"])), 2);
    assert_eq!(code(&lieform(&["check-im", "so3_koszul", "--tol", "-1"])), 2);
    assert_eq!(code(&lieform_env(&["check-im", "so3_koszul"], Some("abc"))), 2);
    assert_eq!(code(&lieform(&["no-such-command"])), 2);
    let (c, v) = json(&["check-im", "nope"]);
    assert_eq!((c, v["exit_code"].as_i64()), (2, Some(2)));
    assert!(v["error"].as_str().unwrap().contains("nope"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn inconclusive_exits_3() {
    let (c, v) = json(&["check-im", &problem("inconclusive.toml")]);
    assert_eq!(c, 3);
    assert_eq!(v["verdict"], "inconclusive");
}

#[test]
fn json_is_deterministic() {
    for args in [
        vec!["check-morphism", "so3_koszul_twisted"],
        vec!["check-dirac", "graph_twisted"],
        vec!["check-im", "tm_beta", "--mode", "numeric", "--seed", "5"],
        vec!["verify-identities", "--trials", "3"],
    ] {
        let mut full = vec!["--format", "json"];
        full.extend(args.iter().copied());
        let a = lieform(&full);
        let b = lieform(&full);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!stdout(&a).contains("timing"));
    }
}

#[test]
fn report_keys_follow_declaration_order() {
    let (_, v) = json(&["check-im", "so3_koszul"]);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["command", "input", "options", "verdict", "exit_code", "result"]);
    let inner: Vec<&String> = v["result"].as_object().unwrap().keys().collect();
    assert_eq!(inner, ["im1", "im2"]);
}

#[test]
fn seed_precedence() {
    let seed = |args: &[&str], env: Option<&str>| {
        let mut full = vec!["--format", "json"];
        full.extend_from_slice(args);
        let v: Value = serde_json::from_str(&stdout(&lieform_env(&full, env))).unwrap();
        v["options"]["seed"].as_u64().unwrap()
    };
    let ids = problem("identities.toml");
    assert_eq!(seed(&["check-im", "so3_koszul"], None), 42);
    assert_eq!(seed(&["check-im", "so3_koszul"], Some("9")), 9);
    assert_eq!(seed(&["verify-identities", &ids, "--trials", "1"], Some("9")), 7);
    assert_eq!(seed(&["verify-identities", &ids, "--trials", "1", "--seed", "3"], Some("9")), 3);
}

#[test]
fn problem_files_run() {
    let expected = [
        ("so3_koszul.toml", "check-im", 0),
        ("tm_beta.toml", "check-morphism", 0),
        ("mutated_im1.toml", "check-im", 1),
        ("mutated_im2.toml", "check-im", 1),
        ("so3_poisson.toml", "check-algebroid", 0),
        ("linear_closed.toml", "analyze-linear", 0),
        ("linear_nonclosed.toml", "analyze-linear", 0),
        ("pair_r3.toml", "check-pair-groupoid", 0),
        ("dirac_graph_closed.toml", "check-dirac", 0),
        ("dirac_graph_twisted.toml", "check-dirac", 0),
        ("identities.toml", "verify-identities", 0),
        ("inconclusive.toml", "check-im", 3),
        ("tm_beta.toml", "build-lambda", 0),
    ];
    let listed: Vec<String> = std::fs::read_dir(root().join("problems"))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    for f in &listed {
        assert!(expected.iter().any(|(n, _, _)| n == f), "untested problem file {f}");
    }
    for (file, cmd, want) in expected {
        let o = lieform(&[cmd, &problem(file)]);
        assert_eq!(code(&o), want, "{cmd} {file}\n{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn build_lambda_of_tm_beta() {
    let (c, v) = json(&["build-lambda", &problem("tm_beta.toml")]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["chart"], "x1,x2,x3,u1,u2,u3");
    let printed = v["result"]["form"].as_str().unwrap();
    let chart = Chart::parse("x1,x2,x3,u1,u2,u3").unwrap();
    // Λ = β_T for A = TM with the fibre written as u
    let beta_t = parse_form("x2*du1^dx3 + x2*dx1^du3 + u2*dx1^dx3", &chart).unwrap();
    assert_eq!(parse_form(printed, &chart).unwrap(), beta_t);
}

#[test]
fn demo_and_export_agree() {
    let dir = std::env::temp_dir().join(format!("lieform-export-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let list = stdout(&lieform(&["list"]));
    let names: Vec<&str> = list.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert!(names.len() >= 20);
    for name in names {
        let demo = code(&lieform(&["demo", name]));
        let positive = !(name.contains("sum") || name.starts_with("non_") || name.contains("nonclosed"))
            && lieform::catalog::mutations().iter().all(|m| m.name != name);
        assert_eq!(demo, if positive { 0 } else { 1 }, "{name}");
        let exported = lieform(&["export", name]);
        let path = dir.join(format!("{name}.toml"));
        std::fs::write(&path, &exported.stdout).unwrap();
        let kind = stdout(&exported).lines().next().unwrap().to_string();
        let cmd = match kind.as_str() {
            "kind = \"im\"" => "check-morphism",
            "kind = \"algebroid\"" => "check-algebroid",
            "kind = \"dirac\"" => "check-dirac",
            "kind = \"pair-groupoid\"" => "check-pair-groupoid",
            other => panic!("{other}"),
        };
        assert_eq!(code(&lieform(&[cmd, path.to_str().unwrap()])), demo, "{name}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn schemas_ship_and_match_kinds() {
    let problem: Value =
        serde_json::from_str(&std::fs::read_to_string(root().join("schemas/problem.schema.json")).unwrap()).unwrap();
    let kinds: Vec<&str> = problem["properties"]["kind"]["enum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|k| k.as_str().unwrap())
        .collect();
    assert_eq!(kinds, ["algebroid", "im", "linear-form", "dirac", "pair-groupoid", "identity-suite"]);
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(root().join("schemas/report.schema.json")).unwrap()).unwrap();
    let commands = report["properties"]["command"]["enum"].as_array().unwrap();
    let help = stdout(&lieform(&["--help"]));
    for c in commands {
        assert!(help.contains(c.as_str().unwrap()), "{c}");
    }
}
