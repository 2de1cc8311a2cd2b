use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_spolink");

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Compares against a checked-in golden file; `UPDATE_GOLDEN=1` rewrites it.
fn assert_golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, expected, "output differs from {name}");
}

#[test]
fn validate_reports_counts_and_errors() {
    let out = run(["validate".as_ref(), fixture("empty.nt").as_os_str()]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "0 triples\n");

    let out = run(["validate".as_ref(), fixture("table_one.nt").as_os_str()]);
    assert_eq!((code(&out), stdout(&out)), (0, "3 triples\n".to_string()));

    let out = run(["validate".as_ref(), fixture("malformed.nt").as_os_str()]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 2, "{err}");
    assert!(
        err.contains("line 1, column 23") && err.contains("line 3, column 1"),
        "{err}"
    );
}

#[test]
fn classify_text_and_json() {
    let out = run([
        "classify".as_ref(),
        fixture("accountant.nt").as_os_str(),
        fixture("treasurer.nt").as_os_str(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("SSPP\n"), "{}", stdout(&out));

    let cases = [
        ("accountant.nt", "treasurer.nt", "classify_sspp.json"),
        ("published_85740.nt", "published_85742.nt", "classify_oopp.json"),
        ("accountant.nt", "desig_subject.nt", "classify_sp_backward.json"),
        ("desig_subject.nt", "accountant.nt", "classify_sp_forward.json"),
    ];
    for (a, b, golden) in cases {
        let out = run([
            "classify".as_ref(),
            fixture(a).as_os_str(),
            fixture(b).as_os_str(),
            "--json".as_ref(),
        ]);
        assert_eq!(code(&out), 0);
        let text = stdout(&out);
        serde_json::from_str::<serde_json::Value>(&text).expect("valid JSON");
        assert_golden(golden, &text);
    }
}

#[test]
fn blank_nodes_are_scoped_per_file() {
    let john = fixture("john.nt");
    let out = run([
        "classify".as_ref(),
        john.as_os_str(),
        john.as_os_str(),
        "--json".as_ref(),
    ]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["kind"], "Identical");
    let terms = report["witnesses"][0]["terms"].to_string();
    assert!(terms.contains("http://skolem.invalid/"), "{terms}");

    let custom = run([
        "classify".as_ref(),
        john.as_os_str(),
        fixture("accountant.nt").as_os_str(),
        "--skolem-scheme".as_ref(),
        "urn:sk:".as_ref(),
    ]);
    assert_eq!(code(&custom), 1, "{}", stderr(&custom));
}

#[test]
fn match_prints_verdict_json() {
    let out = run([
        "match".as_ref(),
        fixture("accountant.nt").as_os_str(),
        fixture("treasurer.nt").as_os_str(),
    ]);
    assert_eq!(code(&out), 0);
    assert_golden("match_sspp.json", &stdout(&out));

    let out = run([
        "match".as_ref(),
        fixture("accountant.nt").as_os_str(),
        fixture("accountant.nt").as_os_str(),
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(
        (v["belief"].as_f64(), v["established"].as_bool()),
        (Some(1.0), Some(true))
    );

    let out = run([
        "match".as_ref(),
        fixture("published_85740.nt").as_os_str(),
        fixture("table_one.nt").as_os_str(),
        "--threshold".as_ref(),
        "0.9".as_ref(),
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(
        (v["belief"].as_f64(), v["established"].as_bool()),
        (Some(0.0), Some(false))
    );
    assert_eq!(v["threshold"].as_f64(), Some(0.9));
}

#[test]
fn match_reads_scores_from_json() {
    let dir = tempfile::tempdir().unwrap();
    let scores = dir.path().join("scores.json");
    fs::write(&scores, r#"{"SSPP": 0.75}"#).unwrap();
    let out = run([
        "match".as_ref(),
        fixture("accountant.nt").as_os_str(),
        fixture("treasurer.nt").as_os_str(),
        "--scores".as_ref(),
        scores.as_os_str(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["belief"].as_f64().unwrap() - 0.75).abs() < 1e-9);

    fs::write(&scores, r#"{"Strong": 0.75}"#).unwrap();
    let out = run([
        "match".as_ref(),
        fixture("accountant.nt").as_os_str(),
        fixture("treasurer.nt").as_os_str(),
        "--scores".as_ref(),
        scores.as_os_str(),
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn relate_all_is_order_independent() {
    let dir = tempfile::tempdir().unwrap();
    let names = [
        "accountant.nt",
        "treasurer.nt",
        "desig_subject.nt",
        "published_85742.nt",
        "table_one.nt",
    ];
    let write = |order: &[&str], out: &Path, format: &str| {
        let mut args: Vec<std::ffi::OsString> = vec!["relate-all".into()];
        args.extend(order.iter().map(|n| fixture(n).into_os_string()));
        args.extend([
            "--out".into(),
            out.as_os_str().to_owned(),
            "--format".into(),
            format.into(),
        ]);
        let result = run(&args);
        assert_eq!(code(&result), 0, "{}", stderr(&result));
        fs::read_to_string(out).unwrap()
    };
    let mut reversed = names;
    reversed.reverse();

    let json = write(&names, &dir.path().join("a.json"), "json");
    assert_eq!(json, write(&reversed, &dir.path().join("b.json"), "json"));
    assert_golden("relate_all.json", &json);

    let dot = write(&names, &dir.path().join("a.dot"), "dot");
    assert_eq!(dot, write(&reversed, &dir.path().join("b.dot"), "dot"));
    assert_golden("relate_all.dot", &dot);
}

#[test]
fn mine_carries_pattern_length_into_the_next_session() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store.json");
    let graph = fixture("table_one.nt");
    let mine = || {
        run([
            "mine".as_ref(),
            "--store".as_ref(),
            store.as_os_str(),
            "--add".as_ref(),
            graph.as_os_str(),
        ])
    };

    let first = mine();
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    assert!(stdout(&first).contains("K1 = "), "{}", stdout(&first));
    let second = mine();
    assert_eq!(code(&second), 0, "{}", stderr(&second));

    let persisted: serde_json::Value = serde_json::from_str(&fs::read_to_string(&store).unwrap()).unwrap();
    let patterns = persisted["patterns"].as_array().unwrap();
    assert_eq!(patterns.len(), 2);
    assert_eq!(patterns[0]["K1"], 1);
    assert_eq!(patterns[1]["K1"], patterns[0]["symbols"].as_array().unwrap().len());
    assert_eq!(persisted["state"]["K1"], patterns[1]["x"]);
    assert!(!dir.path().join("store.json.tmp").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    // usage errors
    assert_eq!(code(&run(["bogus"])), 1);
    assert_eq!(code(&run(["classify", "only-one.nt"])), 1);
    assert_eq!(
        code(&run(["validate".as_ref(), dir.path().join("missing.nt").as_os_str()])),
        1
    );
    let threshold = run([
        "match".as_ref(),
        fixture("accountant.nt").as_os_str(),
        fixture("treasurer.nt").as_os_str(),
        "--threshold".as_ref(),
        "1.5".as_ref(),
    ]);
    assert_eq!(code(&threshold), 1);
    assert_eq!(code(&run(["--help"])), 0);
    assert_eq!(code(&run(["--version"])), 0);

    // parse errors
    for args in [
        vec!["classify".into(), fixture("malformed.nt"), fixture("accountant.nt")],
        vec!["match".into(), fixture("accountant.nt"), fixture("malformed.nt")],
    ] {
        assert_eq!(code(&run(&args)), 2);
    }

    // frame too large: 36 + 3 distinct terms
    let big = run([
        "match".as_ref(),
        fixture("big.nt").as_os_str(),
        fixture("accountant.nt").as_os_str(),
    ]);
    assert_eq!(code(&big), 3, "{}", stderr(&big));

    // store corruption
    let store = dir.path().join("store.json");
    fs::write(&store, "{\"symbols\": [").unwrap();
    let out = run([
        "mine".as_ref(),
        "--store".as_ref(),
        store.as_os_str(),
        "--add".as_ref(),
        fixture("accountant.nt").as_os_str(),
    ]);
    assert_eq!(code(&out), 4);
    assert_eq!(
        fs::read_to_string(&store).unwrap(),
        "{\"symbols\": [",
        "a corrupt store is left untouched"
    );

    let ok = run([
        "mine".as_ref(),
        "--store".as_ref(),
        store.as_os_str(),
        "--add".as_ref(),
        fixture("accountant.nt").as_os_str(),
    ]);
    assert_eq!(code(&ok), 4);
    fs::remove_file(&store).unwrap();
    let ok = run([
        "mine".as_ref(),
        "--store".as_ref(),
        store.as_os_str(),
        "--add".as_ref(),
        fixture("accountant.nt").as_os_str(),
    ]);
    assert_eq!(code(&ok), 0);
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&store).unwrap()).unwrap();
    v["patterns"][0]["r"] = 5.into();
    fs::write(&store, v.to_string()).unwrap();
    let out = run([
        "mine".as_ref(),
        "--store".as_ref(),
        store.as_os_str(),
        "--add".as_ref(),
        fixture("accountant.nt").as_os_str(),
    ]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}
