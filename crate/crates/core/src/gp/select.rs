use alloc::vec::Vec;

use rand::Rng;

use crate::bt::BehaviorTree;

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub tree: BehaviorTree,
    pub fitness: Option<f64>,
    pub is_baseline: bool,
    /// Creation order; lower is older.
    pub birth: u64,
}

impl Individual {
    pub fn fitness(&self) -> f64 {
        self.fitness.expect("individual evaluated before ranking")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boost {
    None,
    /// Rank the baseline as if its fitness equalled the best of the others.
    Baseline,
}

/// Indices of `population` from best to worst: by fitness, then older first.
///
/// With [`Boost::Baseline`] a baseline that is not strictly the best is
/// moved to rank 1, right behind the best of the others.
pub fn rank_order(population: &[Individual], boost: Boost) -> Vec<usize> {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&population[a], &population[b]);
        y.fitness().total_cmp(&x.fitness()).then(x.birth.cmp(&y.birth)).then(a.cmp(&b))
    });
    if boost == Boost::Baseline && order.len() > 1 {
        if let Some(pos) = order.iter().position(|&i| population[i].is_baseline) {
            let baseline = order.remove(pos);
            let strictly_best = population[baseline].fitness() > population[order[0]].fitness();
            order.insert(if strictly_best { 0 } else { 1 }, baseline);
        }
    }
    order
}

/// Draws `count` distinct individuals, each draw with probability
/// proportional to the linear rank weight `N - rank` among those left.
pub fn rank_select<R: Rng + ?Sized>(population: &[Individual], count: usize, rng: &mut R, boost: Boost) -> Vec<usize> {
    let order = rank_order(population, boost);
    draw_by_rank(&order, count, rng)
}

/// Draws from `order` (best first) without replacement using linear rank
/// weights.
pub fn draw_by_rank<R: Rng + ?Sized>(order: &[usize], count: usize, rng: &mut R) -> Vec<usize> {
    let n = order.len();
    assert!(count <= n, "cannot select {count} of {n}");
    let mut weights: Vec<u64> = (0..n as u64).map(|i| n as u64 - i).collect();
    let mut total: u64 = weights.iter().sum();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut r = rng.random_range(0..total);
        let mut k = 0;
        while r >= weights[k] {
            r -= weights[k];
            k += 1;
        }
        out.push(order[k]);
        total -= weights[k];
        weights[k] = 0;
    }
    out
}
