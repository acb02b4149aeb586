use alloc::collections::BTreeMap;

use crate::bt::{structural_hash, BehaviorTree, TreeKey};

/// Fitness per structural hash. Each miss stands for one simulated episode.
#[derive(Clone, Debug, Default)]
pub struct FitnessCache {
    entries: BTreeMap<TreeKey, f64>,
    misses: u64,
    hits: u64,
}

impl FitnessCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Looks up a tree, counting the hit.
    pub fn get(&mut self, key: &TreeKey) -> Option<f64> {
        let v = self.entries.get(key).copied();
        if v.is_some() {
            self.hits += 1;
        }
        v
    }

    /// Looks up a tree without counting.
    pub fn peek(&self, key: &TreeKey) -> Option<f64> {
        self.entries.get(key).copied()
    }

    pub fn contains(&self, key: &TreeKey) -> bool {
        self.entries.contains_key(key)
    }

    /// Stores a freshly simulated fitness, counting the miss.
    pub fn insert(&mut self, key: TreeKey, fitness: f64) {
        if self.entries.insert(key, fitness).is_none() {
            self.misses += 1;
        }
    }

    /// Unique episodes simulated so far.
    pub fn misses(&self) -> u64 {
        self.misses
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Returns the cached fitness or evaluates and stores it.
    pub fn evaluate<E>(
        &mut self,
        tree: &BehaviorTree,
        eval: impl FnOnce(&BehaviorTree) -> Result<f64, E>,
    ) -> Result<f64, E> {
        let key = structural_hash(tree);
        if let Some(v) = self.get(&key) {
            return Ok(v);
        }
        let v = eval(tree)?;
        self.insert(key, v);
        Ok(v)
    }
}
