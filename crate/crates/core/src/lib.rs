pub mod engine;
pub mod error;
pub mod format;
pub mod greedy;
pub mod harness;
pub mod reductions;
pub mod set_problems;
pub mod source_problems;
