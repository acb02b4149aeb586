use core::fmt;

use sha2::{Digest, Sha256};

use super::{text, BehaviorTree};

/// Evaluation-cache key: SHA-256 of the canonical text form.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeKey([u8; 32]);

impl TreeKey {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }
}

impl fmt::Display for TreeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for TreeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TreeKey({self})")
    }
}

pub fn structural_hash(tree: &BehaviorTree) -> TreeKey {
    TreeKey(Sha256::digest(text::serialize(tree).as_bytes()).into())
}
