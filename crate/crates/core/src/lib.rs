//! Conjunctive queries with self-joins: structural classification,
//! enumeration engines with tick-counted delay, and hardness gadgets.

pub mod fixtures;
pub mod qmodel;
pub mod structure;
pub mod engines;
pub mod reductions;
