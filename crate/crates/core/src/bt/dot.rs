use alloc::string::String;
use core::fmt::Write;

use super::{BehaviorTree, ControlKind, NodeKind};

/// Renders the tree in Graphviz DOT.
///
/// One node statement per tree node (`?` for Fallback, `→` for Sequence,
/// the behavior name for leaves) and one edge per parent/child pair,
/// labelled with the 1-based child position.
pub fn to_dot(tree: &BehaviorTree) -> String {
    let mut out = String::new();
    out.push_str("digraph bt {\n");
    out.push_str("  ordering=out;\n");
    for (i, node) in tree.nodes().iter().enumerate() {
        let (label, shape) = match node.kind() {
            NodeKind::Control(ControlKind::Fallback) => (String::from("?"), "box"),
            NodeKind::Control(ControlKind::Sequence) => (String::from("→"), "box"),
            NodeKind::Leaf(b) => {
                (alloc::format!("{b}"), if b.is_condition() { "ellipse" } else { "box, style=rounded" })
            }
        };
        let _ = writeln!(out, "  n{i} [label=\"{label}\", shape={shape}];");
    }
    for (i, node) in tree.nodes().iter().enumerate() {
        for (pos, c) in node.children().iter().enumerate() {
            let _ = writeln!(out, "  n{i} -> n{c} [label=\"{}\"];", pos + 1);
        }
    }
    out.push_str("}\n");
    out
}
