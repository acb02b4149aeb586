//! Canonical text form.
//!
//! ```text
//! tree    := control | leaf
//! control := ("f" | "s") "(" [tree ("," tree)*] ")"
//! leaf    := '"' behavior-name '"'
//! ```
//!
//! `f` is a Fallback and `s` a Sequence. [`serialize`] never emits
//! whitespace; [`parse`] tolerates ASCII whitespace between tokens.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};
use core::str::FromStr;

use super::{BehaviorId, BehaviorTree, ControlKind, NodeKind, TreeNode};

pub fn serialize(tree: &BehaviorTree) -> String {
    let mut out = String::with_capacity(tree.node_count() * 16);
    write_node(tree, BehaviorTree::ROOT, &mut out).expect("writing to a String cannot fail");
    out
}

fn write_node(tree: &BehaviorTree, index: usize, out: &mut impl Write) -> fmt::Result {
    match tree.kind(index) {
        NodeKind::Leaf(b) => write!(out, "\"{b}\""),
        NodeKind::Control(k) => {
            out.write_str(match k {
                ControlKind::Fallback => "f(",
                ControlKind::Sequence => "s(",
            })?;
            for (n, &c) in tree.children(index).iter().enumerate() {
                if n > 0 {
                    out.write_char(',')?;
                }
                write_node(tree, c, out)?;
            }
            out.write_char(')')
        }
    }
}

impl fmt::Display for BehaviorTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(self, BehaviorTree::ROOT, f)
    }
}

/// A grammar violation at byte offset `position`.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

/// Parses the canonical form. Constraint violations (for example a
/// same-kind parent) are not grammar errors; run `validate` on the result.
pub fn parse(text: &str) -> Result<BehaviorTree, ParseError> {
    let mut p = Parser { src: text.as_bytes(), text, pos: 0 };
    p.skip_ws();
    let root = p.tree()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(BehaviorTree::new(&root))
}

impl FromStr for BehaviorTree {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { position: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), ParseError> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(alloc::format!("expected '{}'", byte as char)))
        }
    }

    fn tree(&mut self) -> Result<TreeNode, ParseError> {
        self.skip_ws();
        match self.src.get(self.pos) {
            Some(b'"') => self.leaf(),
            Some(b'f') => {
                self.pos += 1;
                self.children().map(TreeNode::fallback)
            }
            Some(b's') => {
                self.pos += 1;
                self.children().map(TreeNode::sequence)
            }
            Some(_) => Err(self.error("expected 'f(', 's(' or a quoted behavior")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn children(&mut self) -> Result<Vec<TreeNode>, ParseError> {
        self.expect(b'(')?;
        let mut out = Vec::new();
        self.skip_ws();
        if self.src.get(self.pos) == Some(&b')') {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(self.tree()?);
            self.skip_ws();
            match self.src.get(self.pos) {
                Some(b',') => self.pos += 1,
                Some(b')') => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return Err(self.error("expected ',' or ')'")),
            }
        }
    }

    fn leaf(&mut self) -> Result<TreeNode, ParseError> {
        let start = self.pos;
        self.pos += 1;
        let Some(len) = self.src[self.pos..].iter().position(|&b| b == b'"') else {
            return Err(ParseError { position: start, message: "unterminated behavior name".into() });
        };
        let name = &self.text[self.pos..self.pos + len];
        let behavior: BehaviorId =
            name.parse().map_err(|e| ParseError { position: start, message: alloc::format!("{e}") })?;
        self.pos += len + 1;
        Ok(TreeNode::leaf(behavior))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bt::{validate, Violation};
    use alloc::string::ToString;
    use alloc::vec;

    fn l(name: &str) -> TreeNode {
        TreeNode::leaf(name.parse().unwrap())
    }

    #[test]
    fn serializes_canonically() {
        let t = BehaviorTree::new(&TreeNode::fallback(vec![l("a at pos A?"), l("put a at pos A!")]));
        assert_eq!(serialize(&t), r#"f("a at pos A?","put a at pos A!")"#);
        assert_eq!(t.to_string(), serialize(&t));
    }

    #[test]
    fn parses_nested() {
        let t = parse(r#"s(f("picked a?"),"place on b!")"#).unwrap();
        assert_eq!(t.to_node(), TreeNode::sequence(vec![TreeNode::fallback(vec![l("picked a?")]), l("place on b!")]));
    }

    #[test]
    fn parse_then_validate_flags_constraints() {
        let t = parse(r#"s(s("picked x?"))"#).unwrap();
        assert_eq!(validate(&t), vec![Violation::SameKindParent { node: 1 }]);
    }

    #[test]
    fn tolerates_whitespace() {
        let t = parse(" s( \"picked a?\" ,\n \"pick a!\" )\n").unwrap();
        assert_eq!(serialize(&t), r#"s("picked a?","pick a!")"#);
    }

    #[test]
    fn reports_first_violation_position() {
        assert_eq!(parse(r#"s("picked a?""#).unwrap_err().position, 13);
        assert_eq!(parse(r#"x("picked a?")"#).unwrap_err().position, 0);
        assert_eq!(parse(r#"s("picked a?") junk"#).unwrap_err().position, 15);
        assert_eq!(parse(r#"s("x")"#).unwrap_err().position, 2);
        assert_eq!(parse(r#"s("picked a?)"#).unwrap_err().position, 2);
        assert_eq!(parse("").unwrap_err().position, 0);
    }

    #[test]
    fn empty_control_parses_structurally() {
        let t = parse("f()").unwrap();
        assert_eq!(validate(&t), vec![Violation::ChildlessControl { node: 0 }]);
    }
}
