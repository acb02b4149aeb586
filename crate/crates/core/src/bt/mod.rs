//! Behavior trees with memory-less Fallback and Sequence nodes.

mod behavior;
mod dot;
mod hash;
mod text;
mod tick;
mod tree;
mod validate;

pub use behavior::{is_valid_identifier, BehaviorId, BehaviorParseError, LeafKind};
pub use dot::to_dot;
pub use hash::{structural_hash, TreeKey};
pub use text::{parse, serialize, ParseError};
pub use tick::{tick, LeafExecutor, Status, TickError};
pub use tree::{BehaviorTree, ControlKind, Node, NodeKind, TreeNode};
pub use validate::{is_valid, validate, Violation};

/// Number of nodes, control and leaf.
pub fn node_count(tree: &BehaviorTree) -> usize {
    tree.node_count()
}
