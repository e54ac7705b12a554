use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cantor-dyn"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const DUMBBELLS: &str = "seed = 3\n[map]\nkind = \"P\"\nlevels = [{ depth = 3, q = 2, components = 2 }]\n[grid]\nm = 2\n";
const BALLOON: &str =
    "seed = 3\n[map]\nkind = \"Q\"\nlevels = [{ depth = 2, q = 2, components = 1 }]\n";

#[test]
fn generate_balloon_writes_certified_table() {
    let dir = TempDir::new().unwrap();
    let config = write(dir.path(), "q.toml", BALLOON);
    let out = dir.path().join("out");
    let result = run(&[
        "generate",
        "--config",
        &config,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        result.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    let tower = read_json(&out.join("tower.json"));
    assert_eq!(tower["kind"], "Q");
    assert_eq!(tower["invertible"], false);
    assert_eq!(
        tower["levels"][0]["shapes"],
        serde_json::json!([{ "Balloon": [2, 2] }])
    );
    assert_eq!(read_json(&out.join("map.json"))["kind"], "Q");
}

#[test]
fn generate_dumbbells_is_invertible() {
    let dir = TempDir::new().unwrap();
    let config = write(dir.path(), "p.toml", DUMBBELLS);
    let out = dir.path().join("out");
    assert_eq!(
        run(&[
            "generate",
            "--config",
            &config,
            "--out",
            out.to_str().unwrap()
        ])
        .status
        .code(),
        Some(0)
    );
    let tower = read_json(&out.join("tower.json"));
    assert_eq!(tower["invertible"], true);
    assert_eq!(tower["levels"][0]["shapes"].as_array().unwrap().len(), 2);
    assert!(tower["levels"][0]["shapes"][0].get("Dumbbell").is_some());
}

#[test]
fn bad_depth_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let config = write(
        dir.path(),
        "bad.toml",
        "[map]\nkind = \"Q\"\nlevels = [{ depth = 1, q = 3, components = 1 }]\n",
    );
    let result = run(&[
        "generate",
        "--config",
        &config,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&result.stderr).contains("error"));
}

#[test]
fn malformed_config_and_unknown_suite_exit_3() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.toml", "[map]\nkind = \"P\"\nlevels = 3\n");
    assert_eq!(run(&["analyze", "--config", &bad]).status.code(), Some(3));
    let good = write(dir.path(), "p.toml", DUMBBELLS);
    assert_eq!(
        run(&["analyze", "--config", &good, "--suite", "nope"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(run(&["analyze"]).status.code(), Some(3));
}

#[test]
fn dumbbell_suites_pass_and_report_no_li_yorke_pairs() {
    let dir = TempDir::new().unwrap();
    let config = write(dir.path(), "p.toml", DUMBBELLS);
    let out = dir.path().join("rep");
    let result = run(&[
        "analyze",
        "--config",
        &config,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(0), "{}", stdout(&result));
    let report = read_json(&out.join("report.json"));
    let item = |name: &str| {
        report["items"]
            .as_array()
            .unwrap()
            .iter()
            .find(|i| i["name"] == name)
            .unwrap()
            .clone()
    };
    assert_eq!(
        item("li_yorke_grid")["certificate"]["witnesses"]["li_yorke_pairs"],
        0
    );
    assert_eq!(item("weak_shadowing")["status"], "pass");
    assert_eq!(item("recurrence_certificate")["status"], "pass");
    let csv = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(csv.starts_with("suite,item,status,verdict,quantity,value\n"));
}

#[test]
fn chains_at_three_quarters_use_k0_two() {
    let dir = TempDir::new().unwrap();
    let config = write(
        dir.path(),
        "p.toml",
        &format!("{DUMBBELLS}[chains]\ndelta = \"3/4\"\n"),
    );
    let out = dir.path().join("rep");
    let result = run(&[
        "analyze",
        "--config",
        &config,
        "--suite",
        "chains",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(0));
    let report = read_json(&out.join("report.json"));
    let items = report["items"].as_array().unwrap();
    assert_eq!(items[0]["certificate"]["witnesses"]["k0"], 2);
    assert_eq!(items[1]["certificate"]["verdict"], "AllChainsVerified");
}

#[test]
fn failing_certificate_exits_2_and_report_agrees() {
    let dir = TempDir::new().unwrap();
    // two periodic points can never be 2 apart
    let config = write(
        dir.path(),
        "p.toml",
        &format!("{DUMBBELLS}[chains]\nepsilon = \"1\"\n"),
    );
    let out = dir.path().join("rep");
    let result = run(&[
        "analyze",
        "--config",
        &config,
        "--suite",
        "chains",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(2));
    let summary = run(&["report", out.to_str().unwrap()]);
    assert_eq!(summary.status.code(), Some(2));
    assert!(stdout(&summary).contains("FAIL    chains/chain_continuity: Inconclusive"));
}

#[test]
fn reports_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let config = write(
        dir.path(),
        "q.toml",
        "seed = 5\n[map]\nkind = \"Q\"\nlevels = [{ depth = 2, q = 2, components = 1 }, { depth = 4, q = 2, components = 4 }]\n[liyorke]\nepsilon = \"1/4\"\n[recurrence]\nepsilon = \"1/4\"\n",
    );
    let strip = |dir: &Path| {
        let mut report = read_json(&dir.join("report.json"));
        report.as_object_mut().unwrap().remove("timings_ms");
        (
            report,
            std::fs::read_to_string(dir.join("summary.csv")).unwrap(),
        )
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        assert_eq!(
            run(&[
                "analyze",
                "--config",
                &config,
                "--out",
                out.to_str().unwrap()
            ])
            .status
            .code(),
            Some(0)
        );
    }
    assert_eq!(strip(&a), strip(&b));
    let c = dir.path().join("c");
    run(&[
        "analyze",
        "--config",
        &config,
        "--out",
        c.to_str().unwrap(),
        "--seed",
        "6",
    ]);
    assert_ne!(strip(&a).0, strip(&c).0);
}

#[test]
fn analyze_reads_a_generated_map_file() {
    let dir = TempDir::new().unwrap();
    let config = write(dir.path(), "p.toml", DUMBBELLS);
    let gen = dir.path().join("gen");
    run(&[
        "generate",
        "--config",
        &config,
        "--out",
        gen.to_str().unwrap(),
    ]);
    let from_file = write(
        dir.path(),
        "file.toml",
        "seed = 3\n[map]\nkind = \"P\"\nfile = \"gen/map.json\"\n[grid]\nm = 2\n",
    );
    let (x, y) = (dir.path().join("x"), dir.path().join("y"));
    run(&["analyze", "--config", &config, "--out", x.to_str().unwrap()]);
    let result = run(&[
        "analyze",
        "--config",
        &from_file,
        "--out",
        y.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(x.join("summary.csv")).unwrap(),
        std::fs::read_to_string(y.join("summary.csv")).unwrap()
    );
    let wrong_kind = write(
        dir.path(),
        "wrong.toml",
        "[map]\nkind = \"Q\"\nfile = \"gen/map.json\"\n",
    );
    assert_eq!(
        run(&["analyze", "--config", &wrong_kind]).status.code(),
        Some(3)
    );
}

#[test]
fn prohorov_examples() {
    let dir = TempDir::new().unwrap();
    let zero = write(dir.path(), "zero.txt", "0 1\n");
    let one = write(dir.path(), "one.txt", "# a dirac\n1 1\n");
    let half = write(dir.path(), "half.txt", "0 1/2\n1 1/2\n");
    let first_line = |args: &[&str]| stdout(&run(args)).lines().next().unwrap().to_string();
    assert_eq!(first_line(&["prohorov", &zero, &one]), "1");
    assert_eq!(first_line(&["prohorov", &zero, &zero]), "0");
    assert_eq!(first_line(&["prohorov", &half, &zero]), "1/2");
    let both = run(&["prohorov", &half, &zero, "--backend", "both"]);
    assert_eq!(both.status.code(), Some(0));
    let text = stdout(&both);
    assert!(
        text.contains("Enumeration: 1/2") && text.contains("Flow: 1/2"),
        "{text}"
    );
}

#[test]
fn prohorov_parse_errors_carry_line_numbers() {
    let dir = TempDir::new().unwrap();
    let good = write(dir.path(), "good.txt", "0 1\n");
    let bad = write(dir.path(), "bad.txt", "0 1/2\n1 x\n");
    let result = run(&["prohorov", &good, &bad]);
    assert_eq!(result.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&result.stderr).contains("line 2"));
    assert_eq!(
        run(&["prohorov", &good, &good, "--backend", "magic"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn shipped_configs_generate() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = TempDir::new().unwrap();
    for entry in std::fs::read_dir(configs).unwrap() {
        let path = entry.unwrap().path();
        let result = run(&[
            "generate",
            "--config",
            path.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(result.status.code(), Some(0), "{}", path.display());
    }
}
