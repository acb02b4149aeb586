use serde::{Deserialize, Serialize};

/// Probabilities of the three mutation types.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutationProbs {
    pub add: f64,
    pub delete: f64,
    pub change: f64,
}

impl Default for MutationProbs {
    fn default() -> Self {
        MutationProbs { add: 0.40, delete: 0.30, change: 0.30 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GpParams {
    pub population_size: usize,
    pub initial_tree_size: usize,
    pub mutation_parents: usize,
    pub mutation_offspring_per_parent: usize,
    pub mutation_probs: MutationProbs,
    pub crossover_parents: usize,
    pub crossover_offspring_per_parent: usize,
    pub elites: usize,
    /// Probability that a sampled node is a control node.
    pub control_node_prob: f64,
    /// Attempts per operator application before giving up.
    pub max_resample_attempts: usize,
}

impl Default for GpParams {
    fn default() -> Self {
        GpParams {
            population_size: 16,
            initial_tree_size: 8,
            mutation_parents: 8,
            mutation_offspring_per_parent: 2,
            mutation_probs: MutationProbs::default(),
            crossover_parents: 8,
            crossover_offspring_per_parent: 2,
            elites: 2,
            control_node_prob: 0.5,
            max_resample_attempts: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("invalid GP parameters: {0}")]
pub struct ParamsError(pub &'static str);

impl GpParams {
    pub fn validate(&self) -> Result<(), ParamsError> {
        let p = self.mutation_probs;
        if [p.add, p.delete, p.change].iter().any(|v| !(0.0..=1.0).contains(v))
            || ((p.add + p.delete + p.change) - 1.0).abs() > 1e-9
        {
            return Err(ParamsError("mutation probabilities must be in [0, 1] and sum to 1"));
        }
        if !(0.0..=1.0).contains(&self.control_node_prob) {
            return Err(ParamsError("control_node_prob must be in [0, 1]"));
        }
        if self.population_size < 2 {
            return Err(ParamsError("population_size must be at least 2"));
        }
        if self.elites >= self.population_size {
            return Err(ParamsError("elites must be fewer than population_size"));
        }
        if self.mutation_parents > self.population_size || self.crossover_parents > self.population_size {
            return Err(ParamsError("parent counts cannot exceed population_size"));
        }
        if !self.crossover_parents.is_multiple_of(2) {
            return Err(ParamsError("crossover_parents must be even"));
        }
        if self.initial_tree_size < 2 {
            return Err(ParamsError("initial_tree_size must be at least 2"));
        }
        if self.max_resample_attempts == 0 {
            return Err(ParamsError("max_resample_attempts must be positive"));
        }
        Ok(())
    }

    /// Offspring created per generation, an upper bound on new episodes.
    pub fn offspring_per_generation(&self) -> usize {
        self.mutation_parents * self.mutation_offspring_per_parent
            + self.crossover_parents * self.crossover_offspring_per_parent
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = GpParams::default();
        p.validate().unwrap();
        assert_eq!(p.offspring_per_generation(), 32);
    }

    #[test]
    fn rejects_bad_values() {
        let mut p = GpParams::default();
        p.mutation_probs.add = 0.5;
        assert!(p.validate().is_err());
        let p = GpParams { elites: 16, ..GpParams::default() };
        assert!(p.validate().is_err());
        let p = GpParams { crossover_parents: 7, ..GpParams::default() };
        assert!(p.validate().is_err());
    }
}
