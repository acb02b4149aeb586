use std::fs;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bt_synth::config::{load_experiment, resolve_task, ConfigError};
use bt_synth::harness::{
    best_dot_file_name, curve_file_name, default_out_dir, describe_run, evaluate_tree, plan_baseline,
    planned_dot_file_name, run_experiment, run_single, write_curve_csv, ExperimentPlan, HarnessError,
};
use bt_synth::parallel::default_jobs;
use bt_synth_core::bt::{parse, serialize, to_dot, validate};
use bt_synth_core::gp::{GpParams, Variant};
use bt_synth_core::sim::goal_distances;
use bt_synth_core::BehaviorTree;
use clap::{Parser, Subcommand};

/// Behavior tree synthesis for simulated block assembly.
#[derive(Parser, Debug)]
#[command(name = "bt-synth", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the planner tree of a task and its fitness.
    Plan {
        /// task1..task4 or a path to a task file.
        task: String,
        /// Also write the canonical tree text to this file.
        #[arg(long)]
        save: Option<PathBuf>,
        /// Print DOT instead of canonical text.
        #[arg(long)]
        dot: bool,
    },
    /// Run one evolution and write its learning curve and best tree.
    Evolve {
        task: String,
        #[arg(long, default_value = "scratch")]
        variant: Variant,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to the task's generation budget for the variant.
        #[arg(long)]
        generations: Option<u32>,
        /// Defaults to $BT_SYNTH_OUT, else ./results.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Concurrent evaluations; never changes the outputs.
        #[arg(long)]
        jobs: Option<NonZeroUsize>,
    },
    /// Run the variants and seeds listed in an experiment file.
    Experiment {
        plan: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<NonZeroUsize>,
    },
    /// Print a tree file (canonical text) as DOT.
    Render { tree: PathBuf },
    /// Run one episode of a tree file on a task.
    Eval { task: String, tree: PathBuf },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Runtime(#[from] HarnessError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 1,
            CliError::Runtime(
                HarnessError::Io { .. }
                | HarnessError::Csv { .. }
                | HarnessError::Evolution { .. }
                | HarnessError::Sim(_),
            ) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

fn read_tree(path: &Path) -> Result<BehaviorTree, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let tree = parse(text.trim()).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    if let Some(v) = validate(&tree).first() {
        return Err(CliError::Usage(format!("{}: invalid tree: {v}", path.display())));
    }
    Ok(tree)
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| HarnessError::Io { path: path.into(), source }.into())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Plan { task, save, dot } => {
            let task = resolve_task(&task)?;
            let tree = plan_baseline(&task)?;
            let (result, fitness) = evaluate_tree(&task, &tree)?;
            if dot {
                print!("{}", to_dot(&tree));
            } else {
                println!("{}", serialize(&tree));
            }
            eprintln!(
                "nodes {}  end {}  ticks {}  fitness {:.6}",
                tree.node_count(),
                result.end_reason,
                result.ticks_used,
                fitness
            );
            if let Some(path) = save {
                write(&path, &(serialize(&tree) + "\n"))?;
            }
        }
        Command::Evolve { task, variant, seed, generations, out, jobs } => {
            let task = resolve_task(&task)?;
            let generations = generations.unwrap_or_else(|| task.generations_for(variant.is_boosted()));
            if generations == 0 {
                return Err(CliError::Usage("generations must be positive".into()));
            }
            let out = out.unwrap_or_else(default_out_dir);
            fs::create_dir_all(&out).map_err(|source| HarnessError::Io { path: out.clone(), source })?;
            let baseline = if variant.uses_baseline() {
                let tree = plan_baseline(&task)?;
                write(&out.join(planned_dot_file_name(&task.name)), &to_dot(&tree))?;
                Some(tree)
            } else {
                None
            };
            let jobs = jobs.unwrap_or_else(default_jobs);
            let record = run_single(&task, variant, seed, generations, GpParams::default(), baseline.as_ref(), jobs)?;
            write_curve_csv(&out.join(curve_file_name(&task.name, variant, seed)), &record.trace)?;
            write(&out.join(best_dot_file_name(&task.name, variant, seed)), &to_dot(&record.trace.best.tree))?;
            println!("{}", describe_run(&record));
        }
        Command::Experiment { plan, out, jobs } => {
            let file = load_experiment(&plan)?;
            let task = resolve_task(&file.task)?;
            let out = out.or(file.out_dir).unwrap_or_else(default_out_dir);
            let mut plan = ExperimentPlan::for_task(task, out, jobs.unwrap_or_else(default_jobs));
            if let Some(v) = file.variants {
                plan.variants = v;
            }
            if let Some(s) = file.seeds {
                plan.seeds = s;
            }
            plan.generations = file.generations;
            plan.boosted_generations = file.boosted_generations;
            if let Some(p) = file.params {
                plan.params = p;
            }
            run_experiment(&plan, |r| println!("{}", describe_run(r)))?;
            println!("outputs in {}", plan.out_dir.display());
        }
        Command::Render { tree } => print!("{}", to_dot(&read_tree(&tree)?)),
        Command::Eval { task, tree } => {
            let task = resolve_task(&task)?;
            let tree = read_tree(&tree)?;
            let (result, fitness) = evaluate_tree(&task, &tree)?;
            println!("fitness {fitness:.6}");
            println!(
                "end {}  ticks {}  held {}  nodes {}",
                result.end_reason,
                result.ticks_used,
                result.held_at_end,
                tree.node_count()
            );
            for (goal, d) in task.goals.iter().zip(goal_distances(&result.final_world, &task)) {
                let pose = result.final_world.brick(&goal.brick).expect("goal bricks exist").pose;
                println!("{} at [{:.1}, {:.1}, {:.1}], {:.3} mm from goal", goal.brick, pose.x, pose.y, pose.z, d);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
