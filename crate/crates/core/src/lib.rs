//! Behavior tree synthesis for simulated block assembly.
//!
//! The crate is `no_std` (it needs `alloc`) and contains everything that is
//! pure computation:
//!
//! * [`bt`]: behavior tree representation, validation, memory-less ticking,
//!   canonical text form, structural hashing and DOT export.
//! * [`sim`]: a deterministic rule-based block world implementing the leaf
//!   behaviors, episode execution and the fitness function.
//! * [`planner`]: a backchaining pre/post-condition planner producing a
//!   baseline tree.
//! * [`gp`]: genetic programming over behavior trees with constrained
//!   operators, rank-proportional selection, elitism, memoized evaluation
//!   and planner-baseline seeding.
//!
//! File formats, the experiment harness and the command line live in the
//! `bt-synth` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bt;
pub mod gp;
pub mod planner;
pub mod sim;

pub use bt::{BehaviorId, BehaviorTree, ControlKind, NodeKind, Status, TreeNode};
