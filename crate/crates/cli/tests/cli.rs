use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cpop_core::solver::{read_sdpa, ExportMeta};
use cpop_core::{assemble, complex_to_real, solve, Cpop, RelaxOptions, Rounds, Settings, Sparsity};

fn cpop() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cpop"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn core_data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    cpop().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Pulls `key=value` out of the summary line.
fn field(line: &str, key: &str) -> String {
    line.split_whitespace()
        .find_map(|t| t.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in '{line}'"))
        .to_string()
}

#[test]
fn solve_example_ts_auto() {
    let input = data("toy.json");
    let out = run(&[
        "solve",
        "--input",
        input.to_str().unwrap(),
        "--order",
        "2",
        "--sparsity",
        "ts",
        "--ext",
        "max",
        "--k",
        "auto",
    ]);
    assert!(out.status.success(), "{out:?}");
    let line = stdout(&out);
    let opt: f64 = field(&line, "opt").parse().unwrap();
    assert!((opt + 2.0).abs() < 1e-6, "{line}");
    assert_eq!(field(&line, "mb"), "3");
    assert!(field(&line, "time").ends_with('s'));
}

#[test]
fn solve_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let input = data("toy.json");
    let out = run(&[
        "solve",
        "--input",
        input.to_str().unwrap(),
        "--order",
        "2",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert!((v["opt"].as_f64().unwrap() + 2.0).abs() < 1e-6);
    assert_eq!(v["solver"]["status"], "optimal");
    assert_eq!(v["mb"], 6);
}

#[test]
fn usage_errors_exit_1() {
    let input = data("toy.json");
    let input = input.to_str().unwrap();
    for args in [
        vec!["solve", "--input", input, "--sparsity", "cs", "--k", "1"],
        vec![
            "solve",
            "--input",
            input,
            "--sparsity",
            "cs-ts",
            "--order",
            "min",
        ],
        vec!["solve", "--input", input, "--k", "0", "--sparsity", "ts"],
        vec!["solve", "--input", input, "--ext", "bogus"],
        vec!["solve", "--input", input, "--tol", "2"],
        vec!["solve", "--input", input, "--order", "0"],
        vec!["frobnicate"],
        vec!["random", "--l", "0", "-o", "/dev/null"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {out:?}");
    }
}

#[test]
fn help_exits_0() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let missing = dir.path().join("missing.json");
    let case = dir.path().join("two_gens.m");
    let text = std::fs::read_to_string(core_data("pglib_opf_case14_ieee.m")).unwrap();
    // a second generator on bus 1 violates the one-generator-per-bus rule
    let text = text.replacen(
        "mpc.gen = [\n",
        "mpc.gen = [\n\t1\t 0.0\t 0.0\t 10.0\t -10.0\t 1.0\t 100.0\t 1\t 10.0\t 0.0;\n",
        1,
    );
    std::fs::write(&case, text).unwrap();
    let text = std::fs::read_to_string(&case).unwrap();
    let text = text.replacen(
        "mpc.gencost = [\n",
        "mpc.gencost = [\n\t2\t 0.0\t 0.0\t 3\t 0.0\t 1.0\t 0.0;\n",
        1,
    );
    std::fs::write(&case, text).unwrap();
    for args in [
        vec![
            "solve".to_string(),
            "--input".into(),
            bad.display().to_string(),
        ],
        vec![
            "solve".into(),
            "--input".into(),
            missing.display().to_string(),
        ],
        vec!["acopf".into(), "--case".into(), case.display().to_string()],
    ] {
        let out = cpop().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}: {out:?}");
    }
}

#[test]
fn infeasible_problem_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("infeasible.json");
    let unit =
        |b: u8, g: u8, re: f64| serde_json::json!({"beta": [b], "gamma": [g], "re": re, "im": 0.0});
    // |z|² ≤ −1 has no solution
    let file = serde_json::json!({
        "n": 1,
        "objective": [unit(1, 1, 1.0)],
        "ineq": [[unit(0, 0, -1.0), unit(1, 1, -1.0)]],
        "eq": [],
    });
    std::fs::write(&path, file.to_string()).unwrap();
    let out = run(&["solve", "--input", path.to_str().unwrap(), "--order", "1"]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn random_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<PathBuf> = (0..3)
        .map(|i| dir.path().join(format!("r{i}.json")))
        .collect();
    for (p, seed) in paths.iter().zip(["5", "5", "6"]) {
        let out = run(&[
            "random",
            "--l",
            "3",
            "--seed",
            seed,
            "-o",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{out:?}");
        assert!(stdout(&out).contains(&format!("seed={seed}")));
    }
    let bytes: Vec<Vec<u8>> = paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
    assert_eq!(bytes[0], bytes[1]);
    assert_ne!(bytes[0], bytes[2]);
    let c = Cpop::load(&paths[0]).unwrap();
    assert_eq!(c.nvars(), 20);
    assert_eq!(c.inequalities().len(), 3);
}

#[test]
fn export_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("rand.json");
    let out = run(&[
        "random",
        "--l",
        "1",
        "--seed",
        "3",
        "-o",
        input.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let model = dir.path().join("rand.dat-s");
    let out = run(&[
        "export",
        "--input",
        input.to_str().unwrap(),
        "--order",
        "2",
        "--sparsity",
        "cs-ts",
        "--k",
        "1",
        "--export",
        model.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");

    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("rand.dat-s.json")).unwrap())
            .unwrap();
    let meta: ExportMeta = serde_json::from_value(sidecar["meta"].clone()).unwrap();
    let reread = read_sdpa(&std::fs::read_to_string(&model).unwrap(), Some(&meta)).unwrap();

    let cpop = Cpop::load(&input).unwrap();
    let opts = RelaxOptions::new(Sparsity::CsTs)
        .order(2)
        .rounds(Rounds::Fixed(1));
    let (direct, _) = complex_to_real(&assemble(&cpop, &opts).unwrap().sdp);
    let a = solve(&direct, &Settings::default()).unwrap();
    let b = solve(&reread, &Settings::default()).unwrap();
    assert!(a.status.is_success() && b.status.is_success());
    let rel = (a.objective() - b.objective()).abs() / (1.0 + a.objective().abs());
    assert!(rel < 1e-7, "{} vs {}", a.objective(), b.objective());
}

#[test]
fn stats_reports_cliques() {
    let input = data("toy.json");
    let out = run(&[
        "stats",
        "--input",
        input.to_str().unwrap(),
        "--order",
        "2",
        "--sparsity",
        "ts",
        "--k",
        "auto",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("clique 1: vars [1, 2] order 2"), "{text}");
    assert!(text.lines().last().unwrap().starts_with("mb=3 "), "{text}");
}

#[test]
fn acopf_case14_shor() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("case14.json");
    let case = core_data("pglib_opf_case14_ieee.m");
    let table = core_data("pglib_ac.csv");
    let out = run(&[
        "acopf",
        "--case",
        case.to_str().unwrap(),
        "--order",
        "shor",
        "--ac-table",
        table.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let line = stdout(&out);
    assert_eq!(field(&line, "mb"), "6");
    assert_eq!(field(&line, "gap"), "0.00%");
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["global"], true);
}

#[test]
fn acopf_case_missing_from_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("ac.csv");
    std::fs::write(&table, "case,ac_objective\nother,1.0\n").unwrap();
    let case = core_data("pglib_opf_case14_ieee.m");
    let out = run(&[
        "acopf",
        "--case",
        case.to_str().unwrap(),
        "--ac-table",
        table.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}
