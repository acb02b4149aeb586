use super::{BehaviorId, BehaviorTree, ControlKind, NodeKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Status {
    Success,
    Failure,
    Running,
}

/// Executes leaves on behalf of [`tick`].
///
/// `node` is the arena index of the leaf being ticked, so implementations can
/// pre-resolve leaves or instrument evaluation order.
pub trait LeafExecutor<W: ?Sized> {
    type Error;

    fn tick_leaf(&mut self, node: usize, behavior: &BehaviorId, world: &mut W) -> Result<Status, Self::Error>;
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TickError<E> {
    #[error("leaf execution failed: {0}")]
    Leaf(E),
    #[error("condition at node {node} returned Running")]
    ConditionRunning { node: usize },
}

/// Ticks the tree once from the root.
///
/// Control nodes have no memory: every tick starts at the first child. A
/// Sequence stops at the first child that is not Success, a Fallback at the
/// first child that is not Failure; later siblings are not ticked.
pub fn tick<W: ?Sized, L: LeafExecutor<W>>(
    tree: &BehaviorTree,
    world: &mut W,
    leaves: &mut L,
) -> Result<Status, TickError<L::Error>> {
    tick_node(tree, BehaviorTree::ROOT, world, leaves)
}

fn tick_node<W: ?Sized, L: LeafExecutor<W>>(
    tree: &BehaviorTree,
    index: usize,
    world: &mut W,
    leaves: &mut L,
) -> Result<Status, TickError<L::Error>> {
    match tree.kind(index) {
        NodeKind::Leaf(b) => {
            let status = leaves.tick_leaf(index, b, world).map_err(TickError::Leaf)?;
            if status == Status::Running && b.is_condition() {
                return Err(TickError::ConditionRunning { node: index });
            }
            Ok(status)
        }
        NodeKind::Control(kind) => {
            let (continue_on, exhausted) = match kind {
                ControlKind::Sequence => (Status::Success, Status::Success),
                ControlKind::Fallback => (Status::Failure, Status::Failure),
            };
            for &child in tree.children(index) {
                let s = tick_node(tree, child, world, leaves)?;
                if s != continue_on {
                    return Ok(s);
                }
            }
            Ok(exhausted)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bt::TreeNode;
    use alloc::collections::BTreeMap;
    use alloc::string::{String, ToString};
    use alloc::vec;
    use alloc::vec::Vec;

    /// Scripted leaves that record the order in which nodes are ticked.
    struct Script {
        results: BTreeMap<String, Status>,
        log: Vec<usize>,
    }

    impl Script {
        fn new(results: &[(&str, Status)]) -> Self {
            Script { results: results.iter().map(|(k, v)| (k.to_string(), *v)).collect(), log: Vec::new() }
        }
    }

    impl LeafExecutor<()> for Script {
        type Error = String;

        fn tick_leaf(&mut self, node: usize, behavior: &BehaviorId, _: &mut ()) -> Result<Status, String> {
            self.log.push(node);
            self.results.get(&behavior.to_string()).copied().ok_or_else(|| behavior.to_string())
        }
    }

    fn l(name: &str) -> TreeNode {
        TreeNode::leaf(name.parse().unwrap())
    }

    #[test]
    fn fallback_short_circuits_on_success() {
        let t = BehaviorTree::new(&TreeNode::fallback(vec![l("picked a?"), l("pick a!")]));
        let mut s = Script::new(&[("picked a?", Status::Success), ("pick a!", Status::Running)]);
        assert_eq!(tick(&t, &mut (), &mut s), Ok(Status::Success));
        assert_eq!(s.log, vec![1]);
    }

    #[test]
    fn sequence_short_circuits_on_failure() {
        let t = BehaviorTree::new(&TreeNode::sequence(vec![l("picked a?"), l("pick a!")]));
        let mut s = Script::new(&[("picked a?", Status::Failure), ("pick a!", Status::Running)]);
        assert_eq!(tick(&t, &mut (), &mut s), Ok(Status::Failure));
        assert_eq!(s.log, vec![1]);
    }

    #[test]
    fn memoryless_sequence_reticks_conditions() {
        let t = BehaviorTree::new(&TreeNode::sequence(vec![l("picked a?"), l("place at pos p!")]));
        let mut s = Script::new(&[("picked a?", Status::Success), ("place at pos p!", Status::Running)]);
        assert_eq!(tick(&t, &mut (), &mut s), Ok(Status::Running));
        assert_eq!(tick(&t, &mut (), &mut s), Ok(Status::Running));
        assert_eq!(s.log, vec![1, 2, 1, 2]);
    }

    #[test]
    fn exhausted_children() {
        let t = BehaviorTree::new(&TreeNode::fallback(vec![l("picked a?"), l("a on b?")]));
        let mut s = Script::new(&[("picked a?", Status::Failure), ("a on b?", Status::Failure)]);
        assert_eq!(tick(&t, &mut (), &mut s), Ok(Status::Failure));
        let t = BehaviorTree::new(&TreeNode::sequence(vec![l("picked a?"), l("a on b?")]));
        let mut s = Script::new(&[("picked a?", Status::Success), ("a on b?", Status::Success)]);
        assert_eq!(tick(&t, &mut (), &mut s), Ok(Status::Success));
    }

    #[test]
    fn running_condition_is_rejected() {
        let t = BehaviorTree::new(&TreeNode::sequence(vec![l("picked a?")]));
        let mut s = Script::new(&[("picked a?", Status::Running)]);
        assert_eq!(tick(&t, &mut (), &mut s), Err(TickError::ConditionRunning { node: 1 }));
    }

    #[test]
    fn unknown_leaf_aborts() {
        let t = BehaviorTree::new(&TreeNode::sequence(vec![l("pick z!")]));
        let mut s = Script::new(&[]);
        assert_eq!(tick(&t, &mut (), &mut s), Err(TickError::Leaf("pick z!".to_string())));
    }
}
