use alloc::vec::Vec;
use core::fmt;

use super::{BehaviorTree, NodeKind};

/// A broken structural constraint. Node indices refer to the offending node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Violation {
    /// The root is a leaf; it must be a Fallback or Sequence.
    LeafRoot,
    /// A control node without children.
    ChildlessControl { node: usize },
    /// A control node whose parent is a control node of the same kind.
    SameKindParent { node: usize },
    /// A condition identical to its immediate left sibling.
    AdjacentIdenticalConditions { node: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LeafRoot => f.write_str("leaf root"),
            Violation::ChildlessControl { node } => write!(f, "childless control (node {node})"),
            Violation::SameKindParent { node } => write!(f, "same-kind parent (node {node})"),
            Violation::AdjacentIdenticalConditions { node } => {
                write!(f, "adjacent identical conditions (node {node})")
            }
        }
    }
}

/// Lists every constraint violation; an empty list means the tree is valid.
pub fn validate(tree: &BehaviorTree) -> Vec<Violation> {
    let mut out = Vec::new();
    if !tree.kind(BehaviorTree::ROOT).is_control() {
        out.push(Violation::LeafRoot);
    }
    for (i, node) in tree.nodes().iter().enumerate() {
        let NodeKind::Control(kind) = node.kind() else { continue };
        if node.children().is_empty() {
            out.push(Violation::ChildlessControl { node: i });
        }
        if let Some(p) = node.parent() {
            if tree.kind(p).control() == Some(*kind) {
                out.push(Violation::SameKindParent { node: i });
            }
        }
        for pair in node.children().windows(2) {
            let (a, b) = (tree.kind(pair[0]), tree.kind(pair[1]));
            if a.is_condition() && a == b {
                out.push(Violation::AdjacentIdenticalConditions { node: pair[1] });
            }
        }
    }
    out
}

pub fn is_valid(tree: &BehaviorTree) -> bool {
    validate(tree).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bt::TreeNode;
    use alloc::vec;

    fn l(name: &str) -> TreeNode {
        TreeNode::leaf(name.parse().unwrap())
    }

    #[test]
    fn same_kind_parent() {
        let t = BehaviorTree::new(&TreeNode::fallback(vec![TreeNode::fallback(vec![l("pick a!")])]));
        assert_eq!(validate(&t), vec![Violation::SameKindParent { node: 1 }]);
        assert_eq!(alloc::format!("{}", validate(&t)[0]), "same-kind parent (node 1)");
    }

    #[test]
    fn adjacent_identical_conditions() {
        let t = BehaviorTree::new(&TreeNode::sequence(vec![l("a at pos p?"), l("a at pos p?")]));
        assert_eq!(validate(&t), vec![Violation::AdjacentIdenticalConditions { node: 2 }]);
    }

    #[test]
    fn valid_sequence() {
        let t = BehaviorTree::new(&TreeNode::sequence(vec![l("picked a?"), l("place at pos p!")]));
        assert!(validate(&t).is_empty());
    }

    #[test]
    fn identical_actions_may_repeat_and_cousins_are_fine() {
        let t = BehaviorTree::new(&TreeNode::sequence(vec![l("pick a!"), l("pick a!")]));
        assert!(is_valid(&t));
        let t = BehaviorTree::new(&TreeNode::sequence(vec![TreeNode::fallback(vec![l("picked a?")]), l("picked a?")]));
        assert!(is_valid(&t));
        let t = BehaviorTree::new(&TreeNode::sequence(vec![l("picked a?"), l("pick a!"), l("picked a?")]));
        assert!(is_valid(&t));
    }

    #[test]
    fn leaf_root_and_childless_control() {
        let t = BehaviorTree::new(&l("picked a?"));
        assert_eq!(validate(&t), vec![Violation::LeafRoot]);
        let t = BehaviorTree::new(&TreeNode::sequence(vec![]));
        assert_eq!(validate(&t), vec![Violation::ChildlessControl { node: 0 }]);
        let t = BehaviorTree::new(&TreeNode::sequence(vec![l("pick a!"), TreeNode::fallback(vec![])]));
        assert_eq!(validate(&t), vec![Violation::ChildlessControl { node: 2 }]);
    }
}
