//! Exact-arithmetic machinery for division problems: a fixed social endowment
//! is split among agents whose preferences over amounts have a unique global
//! maximum (the peak) but are otherwise unrestricted.
//!
//! The crate provides:
//!
//! - [`prefcore`] — rational outcome grids, preferences with a unique peak
//!   (possibly beyond the endowment), profiles, feasible allocations, and the
//!   canonical preference catalogs audits quantify over;
//! - [`coalitions`] — agreeable coalitions (member peaks summing to the
//!   members' share of the endowment), coalition selections, and the checks
//!   a selection must pass before it may back a rule;
//! - [`rules`] — the rule catalogue: selection-induced agreeable rules, the
//!   uniform rule, equal division, boundary and conditional-zero examples,
//!   and reallocation rules for economies with individual endowments;
//! - [`audit`] — option sets, manipulation and obvious-manipulation
//!   detection, the full axiom suite with replayable witnesses, robust
//!   efficiency, and exhaustive rule-table searches over small grids.
//!
//! Everything is exact: the only numeric type in the math core is an
//! arbitrary-precision rational, so audits and searches are decidable and
//! reproducible bit-for-bit. The crate is `no_std` (it allocates but performs
//! no IO); the companion CLI crate carries file formats and reporting.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod audit;
pub mod coalitions;
pub mod prefcore;
pub mod rules;

pub use prefcore::catalog::{CatalogFamily, CatalogId};
pub use prefcore::grid::Grid;
pub use prefcore::preference::{BeyondPeak, Peak, Preference};
pub use prefcore::profile::{Allocation, EndowmentProfile, Profile};
pub use prefcore::rational::Rational;
