use std::fs;
use std::path::PathBuf;

use assert_cmd::Command;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn qf() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qforensics"))
}

fn stdout(args: &[&str]) -> String {
    let out = qf().args(args).assert().success().get_output().stdout.clone();
    String::from_utf8(out).unwrap()
}

fn path(name: &str) -> String {
    fixture(name).display().to_string()
}

#[test]
fn extract_routed_golden() {
    assert_eq!(stdout(&["extract", &path("routed.qasm")]), "{\"edges\":[[3,4],[3,5],[3,7]]}\n");
}

#[test]
fn extract_empty() {
    assert_eq!(stdout(&["extract", &path("empty.qasm")]), "{\"edges\":[]}\n");
}

#[test]
fn extract_keeps_argument_order() {
    let out = stdout(&["extract", &path("empty.qasm"), &path("routed.qasm"), &path("empty.qasm")]);
    assert_eq!(out, "{\"edges\":[]}\n{\"edges\":[[3,4],[3,5],[3,7]]}\n{\"edges\":[]}\n");
}

#[test]
fn extract_projects_through_sidecar() {
    assert_eq!(stdout(&["extract", "--project", "0,1", &path("routed.qasm")]), "{\"edges\":[[3,4]]}\n");
}

#[test]
fn include_swap_edges_is_a_superset() {
    let edges = |extra: &[&str]| -> Vec<Value> {
        let mut args = vec!["extract"];
        args.extend_from_slice(extra);
        let loop_path = path("loop.qasm");
        args.push(&loop_path);
        let v: Value = serde_json::from_str(&stdout(&args)).unwrap();
        v["edges"].as_array().unwrap().clone()
    };
    let plain = edges(&[]);
    let full = edges(&["--include-swap-edges"]);
    assert!(plain.iter().all(|e| full.contains(e)));
    assert_eq!(full.len(), plain.len() + 2);
}

#[test]
fn hamming_cases() {
    let dir = tempfile::tempdir().unwrap();
    let t = path("tshape.topology.json");
    assert_eq!(stdout(&["hamming", &t, &t]), "0\n");

    let minus_one = dir.path().join("minus_one.json");
    fs::write(&minus_one, r#"{"edges":[[0,1],[1,2],[1,3]]}"#).unwrap();
    assert_eq!(stdout(&["hamming", &t, minus_one.to_str().unwrap()]), "1\n");

    let derived = dir.path().join("loop.derived.json");
    fs::write(&derived, stdout(&["extract", &path("loop.qasm")])).unwrap();
    assert_eq!(stdout(&["hamming", derived.to_str().unwrap(), &path("loop.topology.json")]), "2\n");
}

#[test]
fn assemble_golden_with_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&[
        "assemble",
        "--truth",
        &path("tshape.topology.json"),
        "--out-dir",
        dir.path().to_str().unwrap(),
        &path("t_a.qasm"),
        &path("t_b.qasm"),
        &path("t_c.qasm"),
    ]);
    let golden = concat!(
        r#"{"assembled":{"edges":[[0,1],[1,2],[1,3],[3,4]]},"coverage_curve":[[1,25.0],[2,75.0],[3,100.0]],"#,
        r#""per_circuit":[{"graph":{"edges":[[0,1]]},"source_name":"t_a.qasm"},"#,
        r#"{"graph":{"edges":[[1,2],[1,3]]},"source_name":"t_b.qasm"},"#,
        r#"{"graph":{"edges":[[3,4]]},"source_name":"t_c.qasm"}]}"#,
        "\n"
    );
    assert_eq!(out, golden);
    assert_eq!(fs::read_to_string(dir.path().join("assembly.json")).unwrap(), golden);
    assert_eq!(
        fs::read_to_string(dir.path().join("coverage.csv")).unwrap(),
        "circuits_used,percent\n1,25.0000\n2,75.0000\n3,100.0000\n"
    );
}

#[test]
fn assemble_single_file_and_shuffle() {
    let v: Value = serde_json::from_str(&stdout(&[
        "assemble",
        "--truth",
        &path("tshape.topology.json"),
        &path("t_b.qasm"),
    ]))
    .unwrap();
    assert_eq!(v["coverage_curve"].as_array().unwrap().len(), 1);

    let files = [path("t_a.qasm"), path("t_b.qasm"), path("t_c.qasm"), path("routed.qasm")];
    let assembled = |extra: &[&str]| -> Value {
        let mut args = vec!["assemble"];
        args.extend_from_slice(extra);
        args.extend(files.iter().map(String::as_str));
        serde_json::from_str::<Value>(&stdout(&args)).unwrap()["assembled"].clone()
    };
    assert_eq!(assembled(&[]), assembled(&["--shuffle", "3"]));
    assert_eq!(assembled(&[]), assembled(&["--shuffle", "11"]));
}

#[test]
fn trace_shared_map_is_ambiguous() {
    let v: Value = serde_json::from_str(&stdout(&[
        "trace",
        "--registry",
        &path("shared_t_registry.json"),
        &path("t_b.qasm"),
    ]))
    .unwrap();
    assert_eq!(v["outcomes"][0]["verdict"], "ambiguous");
    assert_eq!(v["outcomes"][0]["backends"], serde_json::json!(["burlington", "vigo"]));
}

#[test]
fn trace_labeled_pool_prints_accuracy() {
    let mut args = vec![
        "trace".to_string(),
        "--registry".into(),
        path("three_backends.json"),
        "--labels".into(),
        path("pool_labels.json"),
    ];
    for b in ["cambridge", "paris", "singapore"] {
        for i in 0..2 {
            args.push(path(&format!("pool_{b}_{i}.qasm")));
        }
    }
    let out = qf().args(&args).assert().success().get_output().stdout.clone();
    let v: Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(v["accuracy_percent"], 100.0);
    assert_eq!(v["per_backend_accuracy"]["paris"], 100.0);

    args.push("--format".into());
    args.push("table".into());
    let table = String::from_utf8(qf().args(&args).assert().success().get_output().stdout.clone()).unwrap();
    assert!(table.contains("accuracy: 100.00%"));
}

#[test]
fn trace_single_backend_registry() {
    let dir = tempfile::tempdir().unwrap();
    let registry = dir.path().join("solo.json");
    fs::write(&registry, r#"[{"name":"solo","num_qubits":8,"edges":[[3,4],[3,5],[3,7]]}]"#).unwrap();
    let out = stdout(&[
        "trace",
        "--registry",
        registry.to_str().unwrap(),
        &path("routed.qasm"),
        &path("t_a.qasm"),
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["outcomes"][0]["verdict"], "unique");
    assert_eq!(v["outcomes"][1]["verdict"], "unmatched");

    qf().args(["trace", "--strict", "--registry", registry.to_str().unwrap(), &path("t_a.qasm")])
        .assert()
        .code(1);
    qf().args(["trace", "--strict", "--registry", registry.to_str().unwrap(), &path("routed.qasm")])
        .assert()
        .code(0);
}

#[test]
fn input_errors_exit_2() {
    qf().args(["extract", "does-not-exist.qasm"]).assert().code(2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.qasm");
    fs::write(&bad, "OPENQASM 2.0;\nqreg q[2];\ncx q[0] q[1];\n").unwrap();
    let err = qf().args(["extract", bad.to_str().unwrap()]).assert().code(2).get_output().stderr.clone();
    assert!(String::from_utf8(err).unwrap().contains("3:"));
    qf().args(["extract", "--tolerance", "-1", &path("routed.qasm")]).assert().code(2);

    let labels = dir.path().join("labels.json");
    fs::write(&labels, r#"{"unknown.qasm":"paris"}"#).unwrap();
    qf().args([
        "trace",
        "--registry",
        &path("three_backends.json"),
        "--labels",
        labels.to_str().unwrap(),
        &path("routed.qasm"),
    ])
    .assert()
    .code(2);
}

#[test]
fn aliases_file() {
    let dir = tempfile::tempdir().unwrap();
    let qasm = dir.path().join("alias.qasm");
    fs::write(
        &qasm,
        "OPENQASM 2.0;\ninclude \"qelib1.inc\";\ngate exch a,b { cz a,b; }\nqreg q[3];\nexch q[0],q[1];\ncx q[0],q[1];\ncx q[1],q[2];\n",
    )
    .unwrap();
    let aliases = dir.path().join("aliases.txt");
    fs::write(&aliases, "# swap-like gates\nEXCH\n").unwrap();
    let q = qasm.to_str().unwrap();
    assert_eq!(stdout(&["extract", q]), "{\"edges\":[[0,1],[1,2]]}\n");
    assert_eq!(stdout(&["extract", "--aliases", aliases.to_str().unwrap(), q]), "{\"edges\":[[1,2]]}\n");
}

#[test]
fn synth_writes_parseable_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let listed = stdout(&[
        "synth",
        "--topology",
        "tshape",
        "--qubits",
        "9",
        "--ops",
        "25",
        "--disguise",
        "direct,three-cnot,iswap-phase,pauli-rotation-triple,named-alias,unitary-match",
        "--seed",
        "5",
        "--layout",
        "random",
        "--enumerate-edges",
        "--name",
        "t9",
        "--out-dir",
        d,
    ]);
    assert_eq!(listed.lines().count(), 3);
    let qasm = dir.path().join("t9.qasm");
    let derived = dir.path().join("t9.derived.json");
    fs::write(&derived, stdout(&["extract", qasm.to_str().unwrap()])).unwrap();
    let topo = dir.path().join("t9.topology.json");
    assert_eq!(stdout(&["hamming", derived.to_str().unwrap(), topo.to_str().unwrap()]), "0\n");

    let runs: Vec<String> = (0..2)
        .map(|_| {
            let out = tempfile::tempdir().unwrap();
            let mut args = vec!["synth", "--topology", "hshape", "--qubits", "12", "--seed", "5", "--name", "h"];
            args.extend(["--layout", "random", "--out-dir", out.path().to_str().unwrap()]);
            qf().args(&args).assert().success();
            fs::read_to_string(out.path().join("h.qasm")).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);

    qf().args(["synth", "--topology", "star", "--qubits", "4", "--out-dir", d]).assert().code(2);
    qf().args(["synth", "--qubits", "4", "--disguise", "teleport", "--out-dir", d]).assert().failure();
}
