//! Genetic programming over behavior trees.
//!
//! Operators keep every tree valid, selection is linear in rank, and each
//! structurally distinct tree is simulated once per run.

mod cache;
mod evolve;
mod ops;
mod params;
mod select;

pub use cache::FitnessCache;
pub use evolve::{
    run_evolution, Evaluator, Evolution, EvolutionTrace, GenerationRecord, GpError, OperatorStats, SimEvaluator,
    UnknownVariant, Variant,
};
pub use ops::{
    apply_add, apply_change, apply_delete, crossover_insert, mutate, random_tree, sample_node, MutationKind,
    OperatorError, Sampled,
};
pub use params::{GpParams, MutationProbs, ParamsError};
pub use select::{draw_by_rank, rank_order, rank_select, Boost, Individual};
