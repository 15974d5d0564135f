//! Sets described by their finite approximations.
//!
//! [`hf_kernel`] handles hereditarily finite sets as canonical brace words,
//! [`universal_tree`] enumerates the tree of all approximations,
//! [`set_rep`] represents infinite sets by finite tree quotients,
//! [`topology`] and [`cardinality`] answer questions about them, and
//! [`expr`] parses the textual expression language.

pub mod cardinality;
pub mod expr;
pub mod hf_kernel;
pub mod set_rep;
pub mod topology;
pub mod universal_tree;

pub use hf_kernel::{Hf, NOrdinal, ZNat};
pub use set_rep::{Builtin, Mode, SetRef, Truth, Universe};
