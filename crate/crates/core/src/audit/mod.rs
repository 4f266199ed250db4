//! Axiom audits, option sets, manipulation detection, and rule-table search.

pub mod axioms;
pub mod domain;
pub mod efficiency;
pub mod manipulation;
pub mod option_set;
pub mod report;
pub mod search;
