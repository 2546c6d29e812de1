//! End-to-end checks of the `orgnet` binary: exit codes, artifact sets,
//! and the simulate / degree-dist / fit / infer chain.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn orgnet() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orgnet"))
}

fn run(args: &[&str]) -> Output {
    orgnet().args(args).output().expect("binary runs")
}

fn assert_code(output: &Output, expected: i32) {
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert_eq!(output.status.code(), Some(expected), "stderr: {stderr}");
}

fn write_fixture(dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let log = dir.join("log.csv");
    std::fs::write(
        &log,
        "timestamp,sender,recipients\n\
         1639958400,alice@lab.test,\"bob@lab.test;carol@lab.test\"\n\
         1639958460,bob@lab.test,alice@lab.test\n\
         1639958520,carol@lab.test,\"dave@lab.test;x@vendor.com\"\n\
         1639958580,y@agency.gov,alice@lab.test\n\
         1639958640,mailer-daemon@lab.test,alice@lab.test\n\
         1640044800,dave@lab.test,\"alice@lab.test;bob@lab.test\"\n",
    )
    .unwrap();
    let chart = dir.join("chart.csv");
    std::fs::write(
        &chart,
        "unit_id,name,parent_id,category\n\
         R,Root,,technical-management\n\
         G1,Group One,R,technical-group\n\
         G2,Group Two,R,operations-group\n",
    )
    .unwrap();
    let directory = dir.join("dir.csv");
    std::fs::write(
        &directory,
        "address,unit_id\n\
         alice@lab.test,G1\n\
         bob@lab.test,G1\n\
         carol@lab.test,G2\n\
         dave@lab.test,G2\n",
    )
    .unwrap();
    (log, chart, directory)
}

#[test]
fn unknown_flag_exits_one() {
    let output = run(&["fit", "--no-such-flag"]);
    assert_code(&output, 1);
}

#[test]
fn unknown_subcommand_exits_one() {
    let output = run(&["frobnicate"]);
    assert_code(&output, 1);
}

#[test]
fn help_exits_zero() {
    let output = run(&["--help"]);
    assert_code(&output, 0);
    let stdout = String::from_utf8_lossy(&output.stdout);
    for subcommand in [
        "ingest",
        "aggregate",
        "stats",
        "communities",
        "layout",
        "tally",
        "degree-dist",
        "fit",
        "infer",
        "simulate",
        "temporal",
        "pipeline",
    ] {
        assert!(stdout.contains(subcommand), "help lacks {subcommand}");
    }
}

#[test]
fn missing_log_is_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let output = run(&["ingest", "--out", tmp.path().to_str().unwrap()]);
    assert_code(&output, 1);
}

#[test]
fn simulate_degree_fit_chain_recovers_exponent() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    assert_code(
        &run(&[
            "simulate", "--N", "4096", "--l", "4", "--a", "4", "--x", "3", "--seed", "7", "--out",
            out,
        ]),
        0,
    );
    assert_code(&run(&["degree-dist", "--out", out]), 0);
    assert_code(&run(&["fit", "--cutoff", "40", "--out", out]), 0);
    let fit: serde_json::Value =
        serde_json::from_slice(&std::fs::read(tmp.path().join("fit.json")).unwrap()).unwrap();
    let beta = fit["beta"].as_f64().unwrap();
    assert!(
        (beta - 2.0).abs() < 1e-6,
        "beta {beta} should be log(16)/log(4) = 2"
    );
    assert_code(&run(&["infer", "--N", "4096", "--l", "4", "--out", out]), 0);
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(tmp.path().join("inference.json")).unwrap()).unwrap();
    assert!((report["a_hat"].as_f64().unwrap() - 4.0).abs() < 1e-6);
}

#[test]
fn fit_below_cutoff_is_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    let degree = tmp.path().join("degree.csv");
    std::fs::write(&degree, "w,n\n2,10\n3,4\n").unwrap();
    let output = run(&[
        "fit",
        "--degree",
        degree.to_str().unwrap(),
        "--cutoff",
        "40",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_code(&output, 2);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("insufficient data"), "{stderr}");
}

#[test]
fn subcommands_write_their_artifacts_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let (log, chart, directory) = write_fixture(tmp.path());
    let out_dir = tmp.path().join("out");
    let out = out_dir.to_str().unwrap();
    let log = log.to_str().unwrap();
    let chart = chart.to_str().unwrap();
    let directory = directory.to_str().unwrap();

    assert_code(
        &run(&[
            "ingest",
            "--log",
            log,
            "--internal-suffix",
            "lab.test",
            "--out",
            out,
        ]),
        0,
    );
    for artifact in [
        "records_clean.csv",
        "records_internal.csv",
        "ingest_report.json",
    ] {
        assert!(out_dir.join(artifact).exists(), "missing {artifact}");
    }
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("ingest_report.json")).unwrap())
            .unwrap();
    assert_eq!(report["parsed"], 6);
    assert_eq!(report["dropped_bounce"], 1);

    assert_code(
        &run(&[
            "aggregate",
            "--log",
            log,
            "--chart",
            chart,
            "--directory",
            directory,
            "--internal-suffix",
            "lab.test",
            "--level",
            "1",
            "--out",
            out,
        ]),
        0,
    );
    for artifact in ["unit_edges.csv", "unit_graph.graphml", "unit_graph.dot"] {
        assert!(out_dir.join(artifact).exists(), "missing {artifact}");
    }

    assert_code(
        &run(&[
            "stats",
            "--log",
            log,
            "--chart",
            chart,
            "--directory",
            directory,
            "--internal-suffix",
            "lab.test",
            "--out",
            out,
        ]),
        0,
    );
    assert!(out_dir.join("betweenness.csv").exists());

    assert_code(
        &run(&[
            "tally",
            "--log",
            log,
            "--chart",
            chart,
            "--directory",
            directory,
            "--internal-suffix",
            "lab.test",
            "--out",
            out,
        ]),
        0,
    );
    let tally: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("tally.json")).unwrap()).unwrap();
    assert_eq!(tally["counts"]["operations-group"]["sent_commercial"], 1);
    assert_eq!(
        tally["counts"]["technical-group"]["received_noncommercial"],
        1
    );

    assert_code(
        &run(&[
            "communities",
            "--log",
            log,
            "--internal-suffix",
            "lab.test",
            "--out",
            out,
        ]),
        0,
    );
    assert!(out_dir.join("communities.csv").exists());
    assert!(out_dir.join("dendrogram.json").exists());

    assert_code(
        &run(&["layout", "--log", log, "--algo", "circular", "--out", out]),
        0,
    );
    for artifact in ["layout.svg", "layout.dot", "layout.graphml"] {
        assert!(out_dir.join(artifact).exists(), "missing {artifact}");
    }

    assert_code(&run(&["temporal", "--log", log, "--out", out]), 0);
    for artifact in ["emails_per_bin.csv", "senders_per_bin.csv", "weekday.json"] {
        assert!(out_dir.join(artifact).exists(), "missing {artifact}");
    }

    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["tool"], "orgnet");
    assert!(manifest["artifacts"]
        .as_array()
        .unwrap()
        .iter()
        .all(|a| { a["sha256"].as_str().unwrap().len() == 64 }));
}

#[test]
fn out_dir_falls_back_to_env() {
    let tmp = tempfile::tempdir().unwrap();
    let (log, _, _) = write_fixture(tmp.path());
    let out_dir = tmp.path().join("env_out");
    let output = orgnet()
        .args(["ingest", "--log", log.to_str().unwrap()])
        .env("ORGNET_OUT", &out_dir)
        .output()
        .unwrap();
    assert_code(&output, 0);
    assert!(out_dir.join("records_clean.csv").exists());
}

#[test]
fn config_paths_resolve_relative_to_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    write_fixture(tmp.path());
    let config = tmp.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"log": "log.csv", "cleaning": {"internal_domain_suffix": "lab.test"}}"#,
    )
    .unwrap();
    let out_dir = tmp.path().join("out");
    let output = run(&[
        "ingest",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_code(&output, 0);
    assert!(out_dir.join("records_internal.csv").exists());
}
