use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cache::FitnessCache;
use super::ops::{crossover_insert, mutate, random_tree, MutationKind, OperatorError};
use super::params::{GpParams, ParamsError};
use super::select::{draw_by_rank, rank_order, rank_select, Boost, Individual};
use crate::bt::{serialize, structural_hash, validate, BehaviorId, BehaviorTree, TreeKey};
use crate::sim::{compute_fitness, SimError, Simulator};

/// How the planner baseline takes part in the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Scratch,
    Baseline,
    BaselineBoostCrossover,
    BaselineBoostAll,
}

impl Variant {
    pub const ALL: [Variant; 4] =
        [Variant::Scratch, Variant::Baseline, Variant::BaselineBoostCrossover, Variant::BaselineBoostAll];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Scratch => "scratch",
            Variant::Baseline => "baseline",
            Variant::BaselineBoostCrossover => "baseline-boost-crossover",
            Variant::BaselineBoostAll => "baseline-boost-all",
        }
    }

    pub fn uses_baseline(self) -> bool {
        self != Variant::Scratch
    }

    pub fn is_boosted(self) -> bool {
        matches!(self, Variant::BaselineBoostCrossover | Variant::BaselineBoostAll)
    }

    fn mutation_boost(self) -> Boost {
        if self == Variant::BaselineBoostAll {
            Boost::Baseline
        } else {
            Boost::None
        }
    }

    fn crossover_boost(self) -> Boost {
        if self.is_boosted() {
            Boost::Baseline
        } else {
            Boost::None
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown variant {0:?} (expected scratch, baseline, baseline-boost-crossover or baseline-boost-all)")]
pub struct UnknownVariant(pub String);

impl FromStr for Variant {
    type Err = UnknownVariant;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL.into_iter().find(|v| v.as_str() == s).ok_or_else(|| UnknownVariant(s.into()))
    }
}

/// Scores trees. Implementations must be pure: the same tree always gets
/// the same fitness.
pub trait Evaluator {
    type Error;

    fn evaluate(&self, tree: &BehaviorTree) -> Result<f64, Self::Error>;

    /// Scores independent trees, returning results in input order.
    fn evaluate_batch(&self, trees: &[BehaviorTree]) -> Result<Vec<f64>, Self::Error> {
        trees.iter().map(|t| self.evaluate(t)).collect()
    }
}

/// Runs one episode per tree and applies the task's fitness function.
#[derive(Clone, Debug)]
pub struct SimEvaluator {
    pub sim: Simulator,
}

impl Evaluator for SimEvaluator {
    type Error = SimError;

    fn evaluate(&self, tree: &BehaviorTree) -> Result<f64, SimError> {
        let result = self.sim.run_episode(tree)?;
        Ok(compute_fitness(&result, tree, self.sim.task()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GpError<E> {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error("initial population: {0}")]
    Operator(OperatorError),
    #[error("variant {0} needs a baseline tree")]
    MissingBaseline(Variant),
    #[error("baseline tree is invalid: {0}")]
    InvalidBaseline(String),
    #[error("evaluation failed: {0}")]
    Evaluation(E),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorStats {
    /// Applied mutations by type: add, delete, change.
    pub mutations: [u64; 3],
    /// Mutations that found no valid result; the parent was copied.
    pub mutation_failures: u64,
    /// Crossovers that found no valid result; the recipient was copied.
    pub crossover_failures: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: u32,
    /// Unique episodes simulated so far.
    pub episodes: u64,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_tree: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionTrace {
    pub records: Vec<GenerationRecord>,
    pub best: Individual,
    pub stats: OperatorStats,
    pub cache_misses: u64,
    pub cache_hits: u64,
}

impl EvolutionTrace {
    /// Unique episodes after generation 0 relative to the maximum possible.
    pub fn unique_episode_ratio(&self, params: &GpParams) -> f64 {
        let (Some(first), Some(last)) = (self.records.first(), self.records.last()) else {
            return 0.0;
        };
        let generations = last.generation as f64;
        if generations == 0.0 {
            return 0.0;
        }
        (last.episodes - first.episodes) as f64 / (params.offspring_per_generation() as f64 * generations)
    }
}

/// A running GP search.
///
/// Random draws per generation, in order: mutation parents, the mutations,
/// crossover parents, the crossovers, survivors. Evaluation draws nothing.
pub struct Evolution<'a, E: Evaluator> {
    params: GpParams,
    variant: Variant,
    pool: &'a [BehaviorId],
    evaluator: &'a E,
    baseline: Option<Individual>,
    cache: FitnessCache,
    rng: ChaCha8Rng,
    population: Vec<Individual>,
    generation: u32,
    next_birth: u64,
    stats: OperatorStats,
    records: Vec<GenerationRecord>,
}

impl<'a, E: Evaluator> Evolution<'a, E> {
    /// Builds and evaluates the initial population: random trees, with the
    /// baseline replacing a random one for non-scratch variants.
    pub fn new(
        params: GpParams,
        variant: Variant,
        pool: &'a [BehaviorId],
        baseline: Option<&BehaviorTree>,
        evaluator: &'a E,
        seed: u64,
    ) -> Result<Self, GpError<E::Error>> {
        params.validate()?;
        let baseline = if variant.uses_baseline() {
            let tree = baseline.ok_or(GpError::MissingBaseline(variant))?;
            if let Some(v) = validate(tree).first() {
                return Err(GpError::InvalidBaseline(alloc::format!("{v}")));
            }
            Some(tree.clone())
        } else {
            None
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut population = Vec::with_capacity(params.population_size);
        for birth in 0..params.population_size as u64 {
            let tree = random_tree(&mut rng, pool, params.initial_tree_size, &params).map_err(GpError::Operator)?;
            population.push(Individual { tree, fitness: None, is_baseline: false, birth });
        }
        let baseline = baseline.map(|tree| {
            let slot = rng.random_range(0..population.len());
            let ind = Individual { tree, fitness: None, is_baseline: true, birth: population[slot].birth };
            population[slot] = ind.clone();
            ind
        });
        let mut evo = Evolution {
            next_birth: params.population_size as u64,
            params,
            variant,
            pool,
            evaluator,
            baseline,
            cache: FitnessCache::new(),
            rng,
            population: Vec::new(),
            generation: 0,
            stats: OperatorStats::default(),
            records: Vec::new(),
        };
        evo.evaluate_all(&mut population)?;
        if let Some(b) = &mut evo.baseline {
            b.fitness = population.iter().find(|i| i.is_baseline).and_then(|i| i.fitness);
        }
        evo.population = evo.sorted(population);
        evo.record();
        Ok(evo)
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn records(&self) -> &[GenerationRecord] {
        &self.records
    }

    pub fn cache(&self) -> &FitnessCache {
        &self.cache
    }

    pub fn stats(&self) -> &OperatorStats {
        &self.stats
    }

    pub fn generation(&self) -> u32 {
        self.generation
    }

    /// Runs one generation and returns its record.
    pub fn step(&mut self) -> Result<&GenerationRecord, GpError<E::Error>> {
        let p = self.params;
        let mut offspring = Vec::with_capacity(p.offspring_per_generation());

        let parents = rank_select(&self.population, p.mutation_parents, &mut self.rng, self.variant.mutation_boost());
        for &i in &parents {
            for _ in 0..p.mutation_offspring_per_parent {
                let parent = &self.population[i].tree;
                let tree = match mutate(parent, &mut self.rng, self.pool, &p) {
                    Ok((t, kind)) => {
                        self.stats.mutations[kind_index(kind)] += 1;
                        t
                    }
                    Err(_) => {
                        self.stats.mutation_failures += 1;
                        parent.clone()
                    }
                };
                offspring.push(tree);
            }
        }

        let parents = rank_select(&self.population, p.crossover_parents, &mut self.rng, self.variant.crossover_boost());
        for pair in parents.chunks_exact(2) {
            for (recipient, donor) in [(pair[0], pair[1]), (pair[1], pair[0])] {
                for _ in 0..p.crossover_offspring_per_parent {
                    let (r, d) = (&self.population[recipient].tree, &self.population[donor].tree);
                    let tree = crossover_insert(r, d, &mut self.rng, &p).unwrap_or_else(|_| {
                        self.stats.crossover_failures += 1;
                        r.clone()
                    });
                    offspring.push(tree);
                }
            }
        }

        let mut offspring: Vec<Individual> = offspring
            .into_iter()
            .map(|tree| {
                let birth = self.next_birth;
                self.next_birth += 1;
                Individual { tree, fitness: None, is_baseline: false, birth }
            })
            .collect();
        self.evaluate_all(&mut offspring)?;

        let mut seen = BTreeSet::new();
        let combined: Vec<Individual> =
            self.population.drain(..).chain(offspring).filter(|ind| seen.insert(structural_hash(&ind.tree))).collect();
        let order = rank_order(&combined, Boost::None);
        let elites = p.elites.min(order.len());
        let rest = &order[elites..];
        let fill = (p.population_size - elites).min(rest.len());
        let mut chosen: Vec<usize> = order[..elites].to_vec();
        chosen.extend(draw_by_rank(rest, fill, &mut self.rng));
        let mut next: Vec<Individual> = chosen.into_iter().map(|i| combined[i].clone()).collect();

        if let Some(baseline) = &self.baseline {
            match next.iter_mut().find(|i| i.tree == baseline.tree) {
                Some(present) => present.is_baseline = true,
                None => {
                    next = self.sorted(next);
                    if next.len() < p.population_size {
                        next.push(baseline.clone());
                    } else {
                        *next.last_mut().expect("population is not empty") = baseline.clone();
                    }
                }
            }
        }
        self.population = self.sorted(next);
        self.generation += 1;
        self.record();
        Ok(self.records.last().expect("just recorded"))
    }

    /// Runs `generations` more generations and returns the trace so far.
    pub fn run(mut self, generations: u32) -> Result<EvolutionTrace, GpError<E::Error>> {
        for _ in 0..generations {
            self.step()?;
        }
        Ok(self.finish())
    }

    pub fn finish(self) -> EvolutionTrace {
        EvolutionTrace {
            best: self.population[0].clone(),
            records: self.records,
            stats: self.stats,
            cache_misses: self.cache.misses(),
            cache_hits: self.cache.hits(),
        }
    }

    fn sorted(&self, population: Vec<Individual>) -> Vec<Individual> {
        let order = rank_order(&population, Boost::None);
        let mut slots: Vec<Option<Individual>> = population.into_iter().map(Some).collect();
        order.into_iter().map(|i| slots[i].take().expect("each index once")).collect()
    }

    fn record(&mut self) {
        let best = &self.population[0];
        let mean = self.population.iter().map(Individual::fitness).sum::<f64>() / self.population.len() as f64;
        self.records.push(GenerationRecord {
            generation: self.generation,
            episodes: self.cache.misses(),
            best_fitness: best.fitness(),
            mean_fitness: mean,
            best_tree: serialize(&best.tree),
        });
    }

    /// Fills in fitness, simulating each previously unseen tree once.
    fn evaluate_all(&mut self, individuals: &mut [Individual]) -> Result<(), GpError<E::Error>> {
        let keys: Vec<TreeKey> = individuals.iter().map(|i| structural_hash(&i.tree)).collect();
        let mut pending = Vec::new();
        let mut queued = BTreeSet::new();
        for (k, key) in keys.iter().enumerate() {
            if !self.cache.contains(key) && queued.insert(*key) {
                pending.push(k);
            }
        }
        let trees: Vec<BehaviorTree> = pending.iter().map(|&k| individuals[k].tree.clone()).collect();
        let values = self.evaluator.evaluate_batch(&trees).map_err(GpError::Evaluation)?;
        for (&k, v) in pending.iter().zip(values) {
            self.cache.insert(keys[k], v);
        }
        let fresh: BTreeSet<usize> = pending.into_iter().collect();
        for (k, (ind, key)) in individuals.iter_mut().zip(&keys).enumerate() {
            ind.fitness = if fresh.contains(&k) { self.cache.peek(key) } else { self.cache.get(key) };
        }
        Ok(())
    }
}

fn kind_index(kind: MutationKind) -> usize {
    match kind {
        MutationKind::Add => 0,
        MutationKind::Delete => 1,
        MutationKind::Change => 2,
    }
}

/// Runs a complete search and returns its trace.
pub fn run_evolution<E: Evaluator>(
    params: GpParams,
    pool: &[BehaviorId],
    baseline: Option<&BehaviorTree>,
    variant: Variant,
    seed: u64,
    generations: u32,
    evaluator: &E,
) -> Result<EvolutionTrace, GpError<E::Error>> {
    Evolution::new(params, variant, pool, baseline, evaluator, seed)?.run(generations)
}
