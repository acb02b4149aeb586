//! Constrained tree operators.
//!
//! Every operator samples its random choices, applies them to a copy and
//! keeps the result only if it passes `validate`; otherwise it samples
//! again, up to `max_resample_attempts` times.

use alloc::vec::Vec;

use rand::Rng;

use super::params::GpParams;
use crate::bt::{is_valid, BehaviorId, BehaviorTree, ControlKind, NodeKind, TreeNode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MutationKind {
    Add,
    Delete,
    Change,
}

impl MutationKind {
    pub const ALL: [MutationKind; 3] = [MutationKind::Add, MutationKind::Delete, MutationKind::Change];
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OperatorError {
    #[error("behavior pool is empty")]
    EmptyPool,
    #[error("tree size {0} is below the minimum of 2")]
    SizeTooSmall(usize),
    #[error("no valid {0} found within the attempt limit")]
    Exhausted(&'static str),
}

/// A freshly sampled node. Control nodes come with their two new children.
#[derive(Clone, Debug, PartialEq)]
pub enum Sampled {
    Control(ControlKind, BehaviorId, BehaviorId),
    Leaf(BehaviorId),
}

impl Sampled {
    pub fn to_node(&self) -> TreeNode {
        match self {
            Sampled::Control(kind, a, b) => {
                TreeNode::Control(*kind, alloc::vec![TreeNode::leaf(a.clone()), TreeNode::leaf(b.clone())])
            }
            Sampled::Leaf(b) => TreeNode::leaf(b.clone()),
        }
    }
}

fn pick<'a, T, R: Rng + ?Sized>(rng: &mut R, items: &'a [T]) -> &'a T {
    &items[rng.random_range(0..items.len())]
}

fn random_kind<R: Rng + ?Sized>(rng: &mut R) -> ControlKind {
    if rng.random_bool(0.5) {
        ControlKind::Fallback
    } else {
        ControlKind::Sequence
    }
}

/// Samples a control node with probability `control_prob`, else a leaf
/// uniformly from `pool`.
pub fn sample_node<R: Rng + ?Sized>(rng: &mut R, pool: &[BehaviorId], control_prob: f64) -> Sampled {
    if rng.random_bool(control_prob) {
        let kind = random_kind(rng);
        let a = pick(rng, pool).clone();
        let b = pick(rng, pool).clone();
        Sampled::Control(kind, a, b)
    } else {
        Sampled::Leaf(pick(rng, pool).clone())
    }
}

/// Inserts `node` at child `position` of the control node `parent`.
pub fn apply_add(tree: &BehaviorTree, parent: usize, position: usize, node: &Sampled) -> BehaviorTree {
    tree.with_inserted(parent, position, &node.to_node())
}

/// Removes the subtree at `index`, then any control node left without
/// children. Returns `None` when that would remove the root.
pub fn apply_delete(tree: &BehaviorTree, index: usize) -> Option<BehaviorTree> {
    if index == BehaviorTree::ROOT {
        return None;
    }
    let mut parent = tree.parent(index)?;
    let mut out = tree.with_removed(index);
    while out.children(parent).is_empty() {
        if parent == BehaviorTree::ROOT {
            return None;
        }
        let up = out.parent(parent)?;
        out = out.with_removed(parent);
        parent = up;
    }
    Some(out)
}

/// Replaces the node at `index` with `node`. Control to control keeps the
/// children; anything else replaces the whole subtree. Returns `None` for
/// a change that leaves the tree as it was.
pub fn apply_change(tree: &BehaviorTree, index: usize, node: &Sampled) -> Option<BehaviorTree> {
    match (tree.kind(index), node) {
        (NodeKind::Control(old), Sampled::Control(new, ..)) => {
            (old != new).then(|| tree.with_control_kind(index, *new))
        }
        (NodeKind::Leaf(old), Sampled::Leaf(new)) if old == new => None,
        _ => Some(tree.with_replaced(index, &node.to_node())),
    }
}

/// Builds a valid tree of exactly `size` nodes by random insertion,
/// starting from a control root with one leaf.
pub fn random_tree<R: Rng + ?Sized>(
    rng: &mut R,
    pool: &[BehaviorId],
    size: usize,
    params: &GpParams,
) -> Result<BehaviorTree, OperatorError> {
    if pool.is_empty() {
        return Err(OperatorError::EmptyPool);
    }
    if size < 2 {
        return Err(OperatorError::SizeTooSmall(size));
    }
    let kind = random_kind(rng);
    let mut tree = BehaviorTree::new(&TreeNode::Control(kind, alloc::vec![TreeNode::leaf(pick(rng, pool).clone())]));
    while tree.node_count() < size {
        let slots: Vec<(usize, usize)> = tree.slots().collect();
        let mut grown = None;
        for _ in 0..params.max_resample_attempts {
            let node = sample_node(rng, pool, params.control_node_prob);
            let &(parent, position) = pick(rng, &slots);
            let candidate = apply_add(&tree, parent, position, &node);
            if candidate.node_count() <= size && is_valid(&candidate) {
                grown = Some(candidate);
                break;
            }
        }
        tree = grown.ok_or(OperatorError::Exhausted("insertion"))?;
    }
    Ok(tree)
}

/// Draws a mutation type, then applies it. The input is not modified.
pub fn mutate<R: Rng + ?Sized>(
    tree: &BehaviorTree,
    rng: &mut R,
    pool: &[BehaviorId],
    params: &GpParams,
) -> Result<(BehaviorTree, MutationKind), (OperatorError, MutationKind)> {
    if pool.is_empty() {
        return Err((OperatorError::EmptyPool, MutationKind::Add));
    }
    let p = params.mutation_probs;
    let u: f64 = rng.random();
    let kind = if u < p.add {
        MutationKind::Add
    } else if u < p.add + p.delete {
        MutationKind::Delete
    } else {
        MutationKind::Change
    };
    let n = tree.node_count();
    let slots: Vec<(usize, usize)> = tree.slots().collect();
    for _ in 0..params.max_resample_attempts {
        let candidate = match kind {
            MutationKind::Add => {
                let node = sample_node(rng, pool, params.control_node_prob);
                let &(parent, position) = pick(rng, &slots);
                Some(apply_add(tree, parent, position, &node))
            }
            MutationKind::Delete => apply_delete(tree, rng.random_range(1..n)),
            MutationKind::Change => {
                let index = rng.random_range(0..n);
                let node = sample_node(rng, pool, params.control_node_prob);
                apply_change(tree, index, &node)
            }
        };
        if let Some(c) = candidate.filter(is_valid) {
            return Ok((c, kind));
        }
    }
    Err((OperatorError::Exhausted("mutation"), kind))
}

/// Inserts a copy of a random donor subtree at a random slot of the
/// recipient. All recipient nodes are kept.
pub fn crossover_insert<R: Rng + ?Sized>(
    recipient: &BehaviorTree,
    donor: &BehaviorTree,
    rng: &mut R,
    params: &GpParams,
) -> Result<BehaviorTree, OperatorError> {
    let slots: Vec<(usize, usize)> = recipient.slots().collect();
    for _ in 0..params.max_resample_attempts {
        let subtree = donor.subtree(rng.random_range(0..donor.node_count()));
        let &(parent, position) = pick(rng, &slots);
        let candidate = recipient.with_inserted(parent, position, &subtree);
        if is_valid(&candidate) {
            return Ok(candidate);
        }
    }
    Err(OperatorError::Exhausted("crossover"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bt::{parse, serialize, validate};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pool() -> Vec<BehaviorId> {
        ["a at pos A?", "picked a?", "pick a!", "put a at pos A!", "place on b!"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect()
    }

    #[test]
    fn random_trees_have_exact_size() {
        let params = GpParams::default();
        for seed in 0..2000 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_tree(&mut rng, &pool(), 8, &params).unwrap();
            assert_eq!(t.node_count(), 8);
            assert!(validate(&t).is_empty(), "{t}");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = random_tree(&mut rng, &pool(), 2, &params).unwrap();
        assert!(t.kind(0).is_control());
        assert_eq!(t.children(0).len(), 1);
        assert_eq!(random_tree(&mut rng, &pool(), 1, &params), Err(OperatorError::SizeTooSmall(1)));
        assert_eq!(random_tree(&mut rng, &[], 4, &params), Err(OperatorError::EmptyPool));
    }

    #[test]
    fn same_seed_same_tree() {
        let params = GpParams::default();
        let a = random_tree(&mut ChaCha8Rng::seed_from_u64(9), &pool(), 8, &params).unwrap();
        let b = random_tree(&mut ChaCha8Rng::seed_from_u64(9), &pool(), 8, &params).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn adding_a_control_node_adds_three() {
        let t = parse(r#"s("picked a?","pick a!")"#).unwrap();
        let node =
            Sampled::Control(ControlKind::Fallback, "a at pos A?".parse().unwrap(), "put a at pos A!".parse().unwrap());
        let out = apply_add(&t, 0, 1, &node);
        assert_eq!(out.node_count(), t.node_count() + 3);
        assert_eq!(serialize(&out), r#"s("picked a?",f("a at pos A?","put a at pos A!"),"pick a!")"#);
    }

    #[test]
    fn deleting_an_only_child_cascades() {
        let t = parse(r#"s("picked a?",f("pick a!"))"#).unwrap();
        let out = apply_delete(&t, 3).unwrap();
        assert_eq!(serialize(&out), r#"s("picked a?")"#);
        assert!(t.node_count() - out.node_count() >= 2);
        // Emptying the root is not allowed.
        let t = parse(r#"s(f("pick a!"))"#).unwrap();
        assert_eq!(apply_delete(&t, 2), None);
        assert_eq!(apply_delete(&t, 0), None);
    }

    #[test]
    fn change_cases() {
        let t = parse(r#"s("picked a?",f("pick a!","place on b!"))"#).unwrap();
        let to_seq = Sampled::Control(ControlKind::Sequence, "pick a!".parse().unwrap(), "pick a!".parse().unwrap());
        // Control to control keeps children.
        assert_eq!(serialize(&apply_change(&t, 2, &to_seq).unwrap()), r#"s("picked a?",s("pick a!","place on b!"))"#);
        assert_eq!(apply_change(&t, 0, &to_seq), None);
        // Control to leaf drops the subtree.
        let leaf = Sampled::Leaf("a at pos A?".parse().unwrap());
        assert_eq!(serialize(&apply_change(&t, 2, &leaf).unwrap()), r#"s("picked a?","a at pos A?")"#);
        // Leaf to control gains two children.
        let out = apply_change(&t, 1, &to_seq).unwrap();
        assert_eq!(serialize(&out), r#"s(s("pick a!","pick a!"),f("pick a!","place on b!"))"#);
        assert_eq!(apply_change(&t, 1, &Sampled::Leaf("picked a?".parse().unwrap())), None);
    }

    #[test]
    fn crossover_keeps_recipient_and_adds_donor_subtree() {
        let params = GpParams::default();
        let recipient = parse(r#"s("picked a?",f("pick a!","place on b!"))"#).unwrap();
        let donor = parse(r#"f("a at pos A?","put a at pos A!")"#).unwrap();
        for seed in 0..200 {
            let out = crossover_insert(&recipient, &donor, &mut ChaCha8Rng::seed_from_u64(seed), &params).unwrap();
            assert!(validate(&out).is_empty());
            let added = out.node_count() - recipient.node_count();
            assert!(added == 1 || added == 3);
            let again = crossover_insert(&recipient, &donor, &mut ChaCha8Rng::seed_from_u64(seed), &params).unwrap();
            assert_eq!(out, again);
        }
    }

    #[test]
    fn crossover_resamples_adjacent_duplicates() {
        let params = GpParams { max_resample_attempts: 50, ..GpParams::default() };
        let recipient = parse(r#"s("picked a?")"#).unwrap();
        // Inserting the donor's leaf next to the equal recipient leaf is
        // never accepted; only the whole Fallback goes in.
        let donor = parse(r#"f("picked a?")"#).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let out = crossover_insert(&recipient, &donor, &mut rng, &params).unwrap();
            assert_eq!(out.node_count(), 4);
        }
        // Here neither donor subtree fits anywhere.
        let donor = parse(r#"s("picked a?")"#).unwrap();
        assert_eq!(crossover_insert(&recipient, &donor, &mut rng, &params), Err(OperatorError::Exhausted("crossover")));
    }

    #[test]
    fn mutation_keeps_input_and_validity() {
        let params = GpParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = random_tree(&mut rng, &pool(), 8, &params).unwrap();
        let copy = t.clone();
        for _ in 0..500 {
            let (m, _) = mutate(&t, &mut rng, &pool(), &params).unwrap();
            assert!(validate(&m).is_empty());
            assert_ne!(m, t);
        }
        assert_eq!(t, copy);
    }
}
