use std::fs;
use std::num::NonZeroUsize;
use std::path::Path;
use std::process::Command;

use bt_synth::config::builtin_task;
use bt_synth::harness::{curve_file_name, mean_std, run_experiment, summary_file_name, ExperimentPlan};
use bt_synth_core::gp::Variant;

fn rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(Result::unwrap).collect()
}

fn num(r: &csv::StringRecord, i: usize) -> f64 {
    r[i].parse().unwrap()
}

#[test]
fn summary_is_recomputable_from_run_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut plan =
        ExperimentPlan::for_task(builtin_task("task3").unwrap(), dir.path().into(), NonZeroUsize::new(2).unwrap());
    plan.variants = vec![Variant::Scratch, Variant::BaselineBoostAll];
    plan.seeds = vec![0, 5, 9];
    plan.generations = Some(12);
    plan.boosted_generations = Some(8);
    let records = run_experiment(&plan, |_| {}).unwrap();
    assert_eq!(records.len(), 6);
    assert!(dir.path().join("planned_task3.dot").exists());

    let summary = rows(&dir.path().join(summary_file_name("task3")));
    for variant in &plan.variants {
        let generations = plan.generations_for(*variant) as usize;
        let runs: Vec<Vec<csv::StringRecord>> =
            plan.seeds.iter().map(|&s| rows(&dir.path().join(curve_file_name("task3", *variant, s)))).collect();
        for run in &runs {
            assert_eq!(run.len(), generations + 1);
            for (g, pair) in run.windows(2).enumerate() {
                assert_eq!(num(&pair[0], 0) as usize, g);
                let step = num(&pair[1], 1) - num(&pair[0], 1);
                assert!((0.0..=32.0).contains(&step));
                assert!(num(&pair[1], 2) >= num(&pair[0], 2));
            }
        }
        let lines: Vec<&csv::StringRecord> = summary.iter().filter(|r| &r[0] == variant.as_str()).collect();
        assert_eq!(lines.len(), generations + 1);
        for (g, line) in lines.iter().enumerate() {
            let best: Vec<f64> = runs.iter().map(|r| num(&r[g], 2)).collect();
            let episodes: Vec<f64> = runs.iter().map(|r| num(&r[g], 1)).collect();
            let (mean, std) = mean_std(&best);
            assert_eq!(num(line, 2), 3.0);
            assert!((num(line, 3) - mean_std(&episodes).0).abs() <= 1e-6);
            assert!((num(line, 4) - mean).abs() <= 1e-6);
            assert!((num(line, 5) - std).abs() <= 1e-6);
        }
    }
}

#[test]
fn experiment_command_reads_a_plan_file() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    fs::write(
        &plan,
        r#"{"task": "task1", "variants": ["baseline"], "seeds": [1, 2], "generations": 3, "out_dir": "out"}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = Command::new(env!("CARGO_BIN_EXE_bt-synth"))
        .args(["experiment", plan.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for name in [
        "task1_baseline_1.csv",
        "task1_baseline_2.csv",
        "best_task1_baseline_2.dot",
        "planned_task1.dot",
        "task1_summary.csv",
    ] {
        assert!(out.join(name).exists(), "{name}");
    }

    fs::write(&plan, r#"{"task": "task1", "seeds": [1, 1]}"#).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_bt-synth")).args(["experiment", plan.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));

    fs::write(&plan, r#"{"task": "task1", "colour": "red"}"#).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_bt-synth")).args(["experiment", plan.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}
