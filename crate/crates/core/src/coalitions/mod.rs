//! Agreeable coalitions and coalition selections.

pub mod checks;
pub mod coalition;
pub mod selection;

pub use coalition::{enumerate_agreeable, is_agreeable, omega_admissible, Coalition, CoalitionError};
pub use selection::{AgreeableSelection, NestedChain, OmegaSelection, SelectionError};
