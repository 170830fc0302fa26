use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mfplan::bench::{instances_header, summary_header};
use mfplan::pipeline::MAE_HEADER;
use mfplan::Config;

fn mfplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfplan")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    mfplan(args).status.code().unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn shipped_config_is_the_default() {
    let file = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml");
    assert_eq!(Config::load(&file).unwrap(), Config::default());
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&[]), 2);
    assert_eq!(code(&["verify-bounds", "--task", "nope"]), 2);
    assert_eq!(code(&["bench", "--out", &path(dir.path(), "b"), "--methods", "ps_pe"]), 2);
    assert_eq!(code(&["bench", "--out", &path(dir.path(), "b"), "--methods", "fastest"]), 2);
    let cfg = path(dir.path(), "bad.toml");
    fs::write(&cfg, "world.bogus = 1\n").unwrap();
    assert_eq!(code(&["collect", "--config", &cfg, "--out", &path(dir.path(), "x.jsonl")]), 2);
    fs::write(&cfg, "planner.rod_in_box.epsilon = 0.5\n").unwrap();
    assert_eq!(code(&["collect", "--config", &cfg, "--out", &path(dir.path(), "x.jsonl")]), 2);
    assert_eq!(code(&["train", "--logs", &path(dir.path(), "missing.jsonl"), "--out", &path(dir.path(), "w")]), 2);
}

#[test]
fn too_few_solvable_instances_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "tight.toml");
    fs::write(&cfg, "bench.oracle_node_budget = 1\n").unwrap();
    assert_eq!(code(&["verify-bounds", "--config", &cfg, "--instances", "3"]), 1);
}

#[test]
fn bench_report_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "b");
    let args = ["bench", "--out", &out, "--methods", "sim_only,random", "--instances", "2", "--task", "rod_in_box"];
    assert_eq!(code(&args), 0);
    let instances = fs::read_to_string(dir.path().join("b/bench_instances.csv")).unwrap();
    let lines: Vec<&str> = instances.lines().collect();
    assert_eq!(
        lines[0],
        "task,method,instance,seed,status,plan_length,cost,weighted_eval_cost,evals_simulator,\
         evals_analytical_drawer,evals_analytical_pick_place,expansions,wall_time,ps_violations,executed_success"
    );
    assert_eq!(lines[0], instances_header());
    assert_eq!(lines[1], "rod_in_box,sim_only,0,16294208416658607535,found,4,95.9086,5600,28,0,0,8,0,0,1");
    assert_eq!(lines.len(), 5);
    let summary = fs::read_to_string(dir.path().join("b/bench_summary.csv")).unwrap();
    assert_eq!(summary.lines().next().unwrap(), summary_header());
    assert_eq!(summary.lines().count(), 3);
    assert!(dir.path().join("b/bench_table.txt").exists());
}

#[test]
fn collect_and_train_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "small.toml");
    fs::write(&cfg, "mde.episodes_rod_in_box = 8\nmde.episodes_rod_in_drawer = 6\nmde.max_epochs = 30\n").unwrap();
    for run in ["a", "b"] {
        let logs = path(dir.path(), &format!("{run}.jsonl"));
        assert_eq!(code(&["collect", "--config", &cfg, "--seed", "3", "--out", &logs]), 0);
        let w = path(dir.path(), &format!("w_{run}"));
        assert_eq!(code(&["train", "--config", &cfg, "--seed", "3", "--logs", &logs, "--out", &w]), 0);
    }
    assert_eq!(fs::read(dir.path().join("a.jsonl")).unwrap(), fs::read(dir.path().join("b.jsonl")).unwrap());
    let mae = fs::read_to_string(dir.path().join("w_a/mae.csv")).unwrap();
    assert_eq!(mae.lines().next().unwrap(), MAE_HEADER);
    assert_eq!(mae, fs::read_to_string(dir.path().join("w_b/mae.csv")).unwrap());
    for e in fs::read_dir(dir.path().join("w_a")).unwrap() {
        let e = e.unwrap();
        assert_eq!(fs::read(e.path()).unwrap(), fs::read(dir.path().join("w_b").join(e.file_name())).unwrap());
    }
    // a different seed gives different episodes
    let other = path(dir.path(), "c.jsonl");
    assert_eq!(code(&["collect", "--config", &cfg, "--seed", "4", "--out", &other]), 0);
    assert_ne!(fs::read(&other).unwrap(), fs::read(dir.path().join("a.jsonl")).unwrap());
}
