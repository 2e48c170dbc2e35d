use std::path::Path;
use std::process::{Command, Output};

use qfeistel::oracle::{OracleDump, OracleInstance};
use qfeistel_lab::diagnostics::{classical_setup, recount, CLASSICAL_CSV_HEADER};
use qfeistel_lab::ExperimentConfig;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfeistel-lab")).args(args).output().expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = lab(&["run", "--alg", "alg2", "--n", "4", "--q", "3", "--trials", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&read(&out, "report.json")).unwrap();
    assert_eq!(report["q"], 3);
    assert_eq!(report["queries"]["per_trial"], 18);
    assert_eq!(report["queries"]["per_run"], 54);
    let c = &report["confusion"];
    let cells: u64 = ["scheme_as_scheme", "scheme_as_rp", "rp_as_scheme", "rp_as_rp"].iter().map(|k| c[k].as_u64().unwrap()).sum();
    assert_eq!(cells, 4);
    let lines: Vec<serde_json::Value> =
        read(&out, "trials.jsonl").lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 12);
    assert!(lines.iter().all(|l| l["y"].as_array().unwrap().len() == 9));
    assert!(lines[0]["y"][0].as_str().unwrap().starts_with("0x"));
    assert_eq!(read(&out, "summary.csv").lines().count(), 2);
    let cfg = ExperimentConfig::parse(&read(&out, "config.txt")).unwrap();
    assert_eq!(cfg.trials, 2);
}

#[test]
fn reports_are_byte_identical_across_runs_and_schedules() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for (i, extra) in [None, Some("--serial"), None].into_iter().enumerate() {
        let out = dir.path().join(format!("r{i}"));
        let mut args = vec!["run", "--alg", "alg3", "--n", "3", "--epsilon", "1/3", "--trials", "3", "--seed", "7"];
        args.extend(["--out", out.to_str().unwrap()]);
        args.extend(extra);
        assert!(lab(&args).status.success());
        reports.push((read(&out, "report.json"), read(&out, "trials.jsonl")));
    }
    assert!(reports.windows(2).all(|w| w[0] == w[1]));
    assert!(!reports[0].0.contains("time"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("exp.cfg");
    std::fs::write(&file, "alg=alg1\nn=4\nepsilon=1/27\ntrials=2\nseed=3\nmeasure_reg=3\n").unwrap();
    let o = lab(&["run", "--config", file.to_str().unwrap(), "--q", "1", "--n", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["q"], 1);
    assert_eq!(report["config"]["n"], 3);
    assert_eq!(report["measured_register"], 3);
    assert_eq!(report["config_text"], "alg=alg1\nn=3\nq=1\ntrials=2\nseed=3\nmeasure_reg=3\nmode=stacked\n");
}

#[test]
fn config_round_trips_byte_identically() {
    let text = "alg=gk\nn=4\nk=5\nepsilon=0.05\ntrials=10\nseed=18446744073709551615\nmeasure_reg=6\nmode=per-coset\nout=some/dir\n";
    assert_eq!(ExperimentConfig::parse(text).unwrap().to_text(), text);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| lab(args).status.code();
    assert_eq!(code(&["run", "--alg", "alg1", "--n", "4", "--q", "1"]), Some(0));
    assert_eq!(code(&["run", "--alg", "alg1", "--n", "4"]), Some(2));
    assert_eq!(code(&["run", "--alg", "alg5", "--n", "4", "--q", "1"]), Some(2));
    assert_eq!(code(&["run", "--alg", "alg1", "--n", "4", "--q", "1", "--epsilon", "0.1"]), Some(2));
    assert_eq!(code(&["run", "--alg", "gk", "--n", "4", "--k", "3", "--q", "1"]), Some(2));
    assert_eq!(code(&["run", "--alg", "alg1", "--n", "4", "--epsilon", "2"]), Some(2));
    assert_eq!(code(&["run", "--config", "/nonexistent/file", "--q", "1"]), Some(1));
    assert_eq!(code(&["run", "--alg", "gk", "--n", "7", "--k", "4", "--q", "1"]), Some(3));
    assert_eq!(code(&["run", "--alg", "alg3", "--n", "9", "--q", "1"]), Some(3));
    assert_eq!(code(&["census", "--alg", "alg2", "--n", "13", "--q", "1"]), Some(3));
    assert_eq!(code(&["sweep", "--alg", "alg1", "--n", "4", "--q", "1", "--axis", "n", "--values", "4,13"]), Some(3));
    assert_eq!(code(&["sweep", "--alg", "alg1", "--n", "4", "--q", "1", "--axis", "n", "--values"]), Some(2));
}

#[test]
fn sweep_tabulates_linear_query_growth() {
    let o = lab(&["sweep", "--alg", "alg2", "--q", "2", "--n", "4", "--axis", "n", "--values", "4,6,8"]);
    assert!(o.status.success());
    let csv = String::from_utf8(o.stdout).unwrap();
    let per_trial: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(6).unwrap()).collect();
    assert_eq!(per_trial, ["18", "22", "26"]);
    let o = lab(&["sweep", "--alg", "alg1", "--n", "4", "--q", "1", "--axis", "epsilon", "--values", "1/3,1/9,1/27"]);
    let csv = String::from_utf8(o.stdout).unwrap();
    let qs: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(5).unwrap()).collect();
    assert_eq!(qs, ["1", "2", "3"]);
}

#[test]
fn classical_csvs_have_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let o = lab(&["classical", "--alg", "alg2", "--n", "6", "--q", "1", "--trials", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let (_, kind, params) = classical_setup(qfeistel::distinguish::Algorithm::Alg2, 6, None).unwrap();
    for name in ["classical_scheme.csv", "classical_rp.csv"] {
        let csv = read(&out, name);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CLASSICAL_CSV_HEADER));
        let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
        assert_eq!(rows.len(), 5);
        for r in rows {
            assert_eq!(r[0], "fs4");
            assert_eq!(r[4], "64");
            assert!(r[8] == "SCHEME" || r[8] == "RP");
            if name == "classical_scheme.csv" {
                let report = qfeistel::classical::CollisionReport {
                    statistic: qfeistel::classical::Statistic::Fs4,
                    n: 6,
                    k: 2,
                    seed: r[3].parse().unwrap(),
                    m: 64,
                    pairs: 0,
                    expected_rp: 32.0,
                    expected_scheme: 64.0,
                    threshold: 48.0,
                    empirical_std: None,
                    verdict: qfeistel::distinguish::Label::Rp,
                };
                assert_eq!(recount(&report, kind, params).unwrap().to_string(), r[5]);
            }
        }
    }
    let summary: serde_json::Value = serde_json::from_str(&read(&out, "classical_summary.json")).unwrap();
    assert_eq!(summary["m"], 64);
}

#[test]
fn census_writes_histograms() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("census");
    let o = lab(&["census", "--alg", "alg1", "--n", "5", "--q", "1", "--measure-reg", "3", "--trials", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let csv = read(&out, "census.csv");
    let scheme: Vec<&str> = csv.lines().filter(|l| l.starts_with("scheme,")).collect();
    assert_eq!(scheme.len(), 3);
    assert!(scheme.iter().all(|l| l.ends_with(",1,32")));
    assert!(read(&out, "census_summary.csv").contains("scheme,3,1,0"));
}

#[test]
fn gen_oracle_dump_rebuilds() {
    let o = lab(&["gen-oracle", "--alg", "alg3", "--n", "3", "--seed", "12", "--tables"]);
    assert!(o.status.success());
    let dump = OracleDump::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    let rebuilt = OracleInstance::from_dump(&dump).unwrap();
    let fresh = OracleInstance::build(dump.spec.kind, dump.spec.params, 12).unwrap();
    assert_eq!(rebuilt, fresh);
    let o = lab(&["gen-oracle", "--alg", "gk", "--n", "2", "--k", "4", "--class", "rp"]);
    let dump = OracleDump::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert_eq!(dump.spec.params.block_bits(), 8);
}
