//! Evaluation of a generation's new trees on several threads.

use std::num::NonZeroUsize;
use std::thread;

use bt_synth_core::gp::{Evaluator, SimEvaluator};
use bt_synth_core::sim::{SimError, Simulator};
use bt_synth_core::BehaviorTree;

/// Splits each batch into contiguous chunks, one per worker. Results come
/// back in input order, so traces do not depend on `jobs`.
#[derive(Clone, Debug)]
pub struct ParallelEvaluator {
    inner: SimEvaluator,
    jobs: NonZeroUsize,
}

impl ParallelEvaluator {
    pub fn new(sim: Simulator, jobs: NonZeroUsize) -> Self {
        ParallelEvaluator { inner: SimEvaluator { sim }, jobs }
    }

    pub fn simulator(&self) -> &Simulator {
        &self.inner.sim
    }

    pub fn jobs(&self) -> NonZeroUsize {
        self.jobs
    }
}

/// Worker count from the machine, used when `--jobs` is absent.
pub fn default_jobs() -> NonZeroUsize {
    thread::available_parallelism().unwrap_or(NonZeroUsize::MIN)
}

impl Evaluator for ParallelEvaluator {
    type Error = SimError;

    fn evaluate(&self, tree: &BehaviorTree) -> Result<f64, SimError> {
        self.inner.evaluate(tree)
    }

    fn evaluate_batch(&self, trees: &[BehaviorTree]) -> Result<Vec<f64>, SimError> {
        let jobs = self.jobs.get().min(trees.len());
        if jobs <= 1 {
            return self.inner.evaluate_batch(trees);
        }
        let chunk = trees.len().div_ceil(jobs);
        thread::scope(|scope| {
            let handles: Vec<_> =
                trees.chunks(chunk).map(|part| scope.spawn(move || self.inner.evaluate_batch(part))).collect();
            let mut out = Vec::with_capacity(trees.len());
            for h in handles {
                out.extend(h.join().expect("evaluation thread panicked")?);
            }
            Ok(out)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::builtin_task;
    use bt_synth_core::gp::{random_tree, GpParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn batch_results_do_not_depend_on_jobs() {
        let task = builtin_task("task1").unwrap();
        let pool = task.behavior_pool.clone();
        let sim = Simulator::new(task).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let trees: Vec<_> = (0..37).map(|_| random_tree(&mut rng, &pool, 8, &GpParams::default()).unwrap()).collect();
        let one = ParallelEvaluator::new(sim.clone(), NonZeroUsize::MIN).evaluate_batch(&trees).unwrap();
        for jobs in [2, 3, 8, 64] {
            let many =
                ParallelEvaluator::new(sim.clone(), NonZeroUsize::new(jobs).unwrap()).evaluate_batch(&trees).unwrap();
            assert_eq!(one, many);
        }
    }
}
