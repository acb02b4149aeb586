use alloc::vec::Vec;
use core::ops::Range;

use super::BehaviorId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ControlKind {
    /// Returns the first non-Failure child status.
    Fallback,
    /// Returns the first non-Success child status.
    Sequence,
}

impl ControlKind {
    pub fn other(self) -> Self {
        match self {
            ControlKind::Fallback => ControlKind::Sequence,
            ControlKind::Sequence => ControlKind::Fallback,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Control(ControlKind),
    Leaf(BehaviorId),
}

impl NodeKind {
    pub fn is_control(&self) -> bool {
        matches!(self, NodeKind::Control(_))
    }

    pub fn behavior(&self) -> Option<&BehaviorId> {
        match self {
            NodeKind::Leaf(b) => Some(b),
            NodeKind::Control(_) => None,
        }
    }

    pub fn control(&self) -> Option<ControlKind> {
        match self {
            NodeKind::Control(k) => Some(*k),
            NodeKind::Leaf(_) => None,
        }
    }

    pub fn is_condition(&self) -> bool {
        self.behavior().is_some_and(BehaviorId::is_condition)
    }
}

/// Owned recursive form, used to build trees and subtrees.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TreeNode {
    Control(ControlKind, Vec<TreeNode>),
    Leaf(BehaviorId),
}

impl TreeNode {
    pub fn fallback(children: Vec<TreeNode>) -> Self {
        TreeNode::Control(ControlKind::Fallback, children)
    }

    pub fn sequence(children: Vec<TreeNode>) -> Self {
        TreeNode::Control(ControlKind::Sequence, children)
    }

    pub fn leaf(behavior: BehaviorId) -> Self {
        TreeNode::Leaf(behavior)
    }

    pub fn node_count(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 1,
            TreeNode::Control(_, children) => 1 + children.iter().map(TreeNode::node_count).sum::<usize>(),
        }
    }

    fn flatten_into(&self, out: &mut Vec<(NodeKind, usize)>) {
        match self {
            TreeNode::Leaf(b) => out.push((NodeKind::Leaf(b.clone()), 0)),
            TreeNode::Control(k, children) => {
                out.push((NodeKind::Control(*k), children.len()));
                for c in children {
                    c.flatten_into(out);
                }
            }
        }
    }

    pub(crate) fn flatten(&self) -> Vec<(NodeKind, usize)> {
        let mut out = Vec::with_capacity(self.node_count());
        self.flatten_into(&mut out);
        out
    }
}

/// One arena slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Node {
    kind: NodeKind,
    children: Vec<usize>,
    parent: Option<usize>,
    end: usize,
}

impl Node {
    pub fn kind(&self) -> &NodeKind {
        &self.kind
    }

    pub fn children(&self) -> &[usize] {
        &self.children
    }

    pub fn parent(&self) -> Option<usize> {
        self.parent
    }
}

/// An immutable behavior tree stored as an arena in preorder.
///
/// The root is always index 0 and every subtree occupies a contiguous index
/// range, so two trees are equal iff they are equal node for node. The arena
/// may hold trees that violate the GP constraints (for example after parsing);
/// use [`validate`](super::validate) before executing them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BehaviorTree {
    nodes: Vec<Node>,
}

impl BehaviorTree {
    pub const ROOT: usize = 0;

    pub fn new(root: &TreeNode) -> Self {
        Self::from_flat(&root.flatten())
    }

    /// Builds the arena from `(kind, child count)` pairs in preorder.
    ///
    /// Panics if the sequence does not describe exactly one tree; callers in
    /// this crate only pass sequences produced by flattening a tree.
    pub(crate) fn from_flat(flat: &[(NodeKind, usize)]) -> Self {
        fn build(flat: &[(NodeKind, usize)], pos: &mut usize, parent: Option<usize>, nodes: &mut Vec<Node>) -> usize {
            let me = *pos;
            let (kind, arity) = &flat[me];
            nodes.push(Node { kind: kind.clone(), children: Vec::with_capacity(*arity), parent, end: 0 });
            *pos += 1;
            for _ in 0..*arity {
                let child = build(flat, pos, Some(me), nodes);
                nodes[me].children.push(child);
            }
            nodes[me].end = *pos;
            me
        }
        assert!(!flat.is_empty(), "a tree has at least one node");
        let mut nodes = Vec::with_capacity(flat.len());
        let mut pos = 0;
        build(flat, &mut pos, None, &mut nodes);
        assert_eq!(pos, flat.len(), "trailing nodes after the root subtree");
        BehaviorTree { nodes }
    }

    pub(crate) fn flatten(&self) -> Vec<(NodeKind, usize)> {
        self.nodes.iter().map(|n| (n.kind.clone(), n.children.len())).collect()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, index: usize) -> &Node {
        &self.nodes[index]
    }

    pub fn kind(&self, index: usize) -> &NodeKind {
        &self.nodes[index].kind
    }

    pub fn children(&self, index: usize) -> &[usize] {
        &self.nodes[index].children
    }

    pub fn parent(&self, index: usize) -> Option<usize> {
        self.nodes[index].parent
    }

    /// Total number of nodes, control and leaf.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Preorder index range covered by the subtree rooted at `index`.
    pub fn subtree_range(&self, index: usize) -> Range<usize> {
        index..self.nodes[index].end
    }

    pub fn subtree_size(&self, index: usize) -> usize {
        self.nodes[index].end - index
    }

    /// Copies the subtree rooted at `index` into its recursive form.
    pub fn subtree(&self, index: usize) -> TreeNode {
        let n = &self.nodes[index];
        match &n.kind {
            NodeKind::Leaf(b) => TreeNode::Leaf(b.clone()),
            NodeKind::Control(k) => TreeNode::Control(*k, n.children.iter().map(|&c| self.subtree(c)).collect()),
        }
    }

    pub fn to_node(&self) -> TreeNode {
        self.subtree(Self::ROOT)
    }

    pub fn leaves(&self) -> impl Iterator<Item = (usize, &BehaviorId)> {
        self.nodes.iter().enumerate().filter_map(|(i, n)| n.kind.behavior().map(|b| (i, b)))
    }

    /// Every `(control parent, child position)` insertion slot, in preorder.
    pub fn slots(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.kind.is_control())
            .flat_map(|(i, n)| (0..=n.children.len()).map(move |pos| (i, pos)))
    }

    /// Returns a copy with `subtree` inserted as child number `position` of
    /// the control node `parent`.
    pub fn with_inserted(&self, parent: usize, position: usize, subtree: &TreeNode) -> BehaviorTree {
        let p = &self.nodes[parent];
        assert!(p.kind.is_control(), "insertion parent must be a control node");
        assert!(position <= p.children.len());
        let at = p.children.get(position).copied().unwrap_or(p.end);
        let mut flat = self.flatten();
        flat[parent].1 += 1;
        flat.splice(at..at, subtree.flatten());
        Self::from_flat(&flat)
    }

    /// Returns a copy with the subtree at `index` removed. The root cannot be
    /// removed.
    pub fn with_removed(&self, index: usize) -> BehaviorTree {
        let parent = self.nodes[index].parent.expect("cannot remove the root");
        let mut flat = self.flatten();
        flat[parent].1 -= 1;
        flat.drain(self.subtree_range(index));
        Self::from_flat(&flat)
    }

    /// Returns a copy with the subtree at `index` replaced by `subtree`.
    pub fn with_replaced(&self, index: usize, subtree: &TreeNode) -> BehaviorTree {
        let mut flat = self.flatten();
        flat.splice(self.subtree_range(index), subtree.flatten());
        Self::from_flat(&flat)
    }

    /// Returns a copy with the control node at `index` switched to `kind`,
    /// keeping its children.
    pub fn with_control_kind(&self, index: usize, kind: ControlKind) -> BehaviorTree {
        assert!(self.nodes[index].kind.is_control());
        let mut t = self.clone();
        t.nodes[index].kind = NodeKind::Control(kind);
        t
    }
}

impl From<TreeNode> for BehaviorTree {
    fn from(node: TreeNode) -> Self {
        BehaviorTree::new(&node)
    }
}

impl From<&TreeNode> for BehaviorTree {
    fn from(node: &TreeNode) -> Self {
        BehaviorTree::new(node)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(name: &str) -> TreeNode {
        TreeNode::leaf(name.parse().unwrap())
    }

    #[test]
    fn arena_is_preorder_with_parents() {
        let t = BehaviorTree::new(&TreeNode::sequence(vec![
            TreeNode::fallback(vec![c("picked a?"), c("pick a!")]),
            c("place on b!"),
        ]));
        assert_eq!(t.node_count(), 5);
        assert_eq!(t.children(0), &[1, 4]);
        assert_eq!(t.children(1), &[2, 3]);
        assert_eq!(t.parent(3), Some(1));
        assert_eq!(t.subtree_range(1), 1..4);
        assert_eq!(t.slots().count(), 3 + 3);
    }

    #[test]
    fn node_count_of_fallback_with_two_leaves() {
        let t = BehaviorTree::new(&TreeNode::fallback(vec![c("a at pos A?"), c("put a at pos A!")]));
        assert_eq!(t.node_count(), 3);
    }

    #[test]
    fn edits_preserve_structure() {
        let t = BehaviorTree::new(&TreeNode::sequence(vec![c("picked a?"), c("place on b!")]));
        let ins = t.with_inserted(0, 1, &TreeNode::fallback(vec![c("a on b?")]));
        assert_eq!(
            ins.to_node(),
            TreeNode::sequence(vec![c("picked a?"), TreeNode::fallback(vec![c("a on b?")]), c("place on b!")])
        );
        let appended = ins.with_inserted(2, 1, &c("pick a!"));
        assert_eq!(appended.children(2), &[3, 4]);
        let removed = ins.with_removed(2);
        assert_eq!(removed.to_node(), TreeNode::sequence(vec![c("picked a?"), c("place on b!")]));
        let replaced = ins.with_replaced(2, &c("pick a!"));
        assert_eq!(replaced.node_count(), 4);
        let flipped = t.with_control_kind(0, ControlKind::Fallback);
        assert_eq!(flipped.kind(0), &NodeKind::Control(ControlKind::Fallback));
    }

    #[test]
    fn round_trip_through_recursive_form() {
        let n = TreeNode::fallback(vec![TreeNode::sequence(vec![c("gripper empty?"), c("pick a!")]), c("picked a?")]);
        assert_eq!(BehaviorTree::new(&n).to_node(), n);
    }
}
