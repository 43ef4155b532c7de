//! Backward reachability for root rewriting systems on ranked trees.
//!
//! Configurations are trees rooted by a control symbol over stack-sorted
//! children. A [`rewrite::RootRewriteSystem`] rewrites configurations at the
//! root only. Given a recognizable target set, saturation extends the
//! accepting automaton until it recognizes every configuration that can reach
//! the target, and every positive answer can be certified by an explicit
//! rewrite trace.
//!
//! Pushdown systems, ordered multi-pushdown systems, and annotated pushdown
//! systems are provided as front ends that compile into this tree setting.

pub mod alphabet;
pub mod automata;
pub mod encodings;
pub mod oracle;
pub mod parse;
pub mod rewrite;
pub mod saturation;
pub mod term;
