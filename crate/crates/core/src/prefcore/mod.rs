//! Outcome grids, unique-peak preferences, profiles, allocations, and the
//! finite preference catalogs that audits quantify over.

pub mod catalog;
pub mod grid;
pub mod preference;
pub mod profile;
pub mod rational;
