use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bt_synth_core::bt::{is_valid, parse};

fn bt_synth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bt-synth")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn plan_prints_a_valid_tree() {
    let o = bt_synth(&["plan", "task1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let tree = parse(stdout(&o).trim()).unwrap();
    assert!(is_valid(&tree));
    assert_eq!(tree.node_count(), 26);
    assert!(stderr(&o).contains("fitness -2.600000"), "{}", stderr(&o));
}

#[test]
fn plan_dot_output() {
    let o = bt_synth(&["plan", "task2", "--dot"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("digraph"));
}

#[test]
fn saved_plan_renders_and_evaluates() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plan.txt");
    let file = file.to_str().unwrap();
    assert_eq!(bt_synth(&["plan", "task1", "--save", file]).status.code(), Some(0));

    let o = bt_synth(&["render", file]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("digraph"));

    let o = bt_synth(&["eval", "task1", file]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("fitness -2.600000\n"), "{out}");
    assert!(out.contains("end solved"), "{out}");
    assert_eq!(out.lines().filter(|l| l.ends_with("mm from goal")).count(), 3);
}

#[test]
fn config_and_usage_errors_exit_1() {
    assert_eq!(bt_synth(&["plan", "task9"]).status.code(), Some(1));
    assert_eq!(bt_synth(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(bt_synth(&["evolve", "task1", "--variant", "best"]).status.code(), Some(1));
    assert_eq!(bt_synth(&["evolve", "task1", "--generations", "0"]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "s(\"pick blue!\"").unwrap();
    assert_eq!(bt_synth(&["render", bad.to_str().unwrap()]).status.code(), Some(1));
    fs::write(&bad, "s(s(\"pick blue!\"))").unwrap();
    let o = bt_synth(&["render", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("same-kind parent"));

    let task = dir.path().join("task.json");
    fs::write(&task, "{\"name\": 3}").unwrap();
    assert_eq!(bt_synth(&["plan", task.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(bt_synth(&["--help"]).status.code(), Some(0));
    assert_eq!(bt_synth(&["--version"]).status.code(), Some(0));
}

#[test]
fn unwritable_output_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = blocker.join("sub");
    let o = bt_synth(&["evolve", "task1", "--generations", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

fn evolve(out: &Path, jobs: &str) {
    let o = bt_synth(&[
        "evolve",
        "task1",
        "--variant",
        "baseline-boost-all",
        "--seed",
        "4",
        "--generations",
        "15",
        "--jobs",
        jobs,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn evolve_outputs_do_not_depend_on_jobs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    evolve(a.path(), "1");
    evolve(b.path(), "3");
    let names = ["task1_baseline-boost-all_4.csv", "best_task1_baseline-boost-all_4.dot", "planned_task1.dot"];
    for name in names {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let csv = fs::read_to_string(a.path().join(names[0])).unwrap();
    assert_eq!(csv.lines().count(), 1 + 16);
    assert!(csv.starts_with("generation,episodes,best_fitness,mean_fitness,best_tree\n"));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_bt-synth"))
        .args(["evolve", "task1", "--generations", "2"])
        .env("BT_SYNTH_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("task1_scratch_0.csv").exists());
    assert!(!dir.path().join("planned_task1.dot").exists());
}
