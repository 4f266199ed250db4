//! Profiles (a grid plus one preference per agent), feasible allocations, and
//! individual endowment profiles for the reallocation setting.

use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use super::grid::Grid;
use super::preference::{Peak, Preference};
use super::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProfileError {
    /// Profiles need at least two agents.
    TooFewAgents,
    /// The grid resolution must be divisible by the number of agents so the
    /// equal share is a grid point.
    ResolutionNotDivisible { q: usize, n: usize },
    /// A preference's utility vector does not match the grid.
    MismatchedPreference { agent: usize },
    /// Allocation amounts must lie in `[0, omega]` and sum exactly to omega.
    Infeasible,
    /// Endowments must be nonnegative and sum exactly to the endowment.
    BadEndowments,
}

impl fmt::Display for ProfileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileError::TooFewAgents => write!(f, "a profile needs at least two agents"),
            ProfileError::ResolutionNotDivisible { q, n } => {
                write!(f, "grid resolution {q} is not divisible by n = {n}")
            }
            ProfileError::MismatchedPreference { agent } => {
                write!(f, "preference of agent {} does not match the grid", agent + 1)
            }
            ProfileError::Infeasible => {
                write!(f, "amounts must lie in [0, omega] and sum exactly to omega")
            }
            ProfileError::BadEndowments => {
                write!(f, "endowments must be nonnegative and sum exactly to omega")
            }
        }
    }
}

/// Individual endowments, one per agent, summing exactly to the economy's
/// total endowment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndowmentProfile {
    endowments: Vec<Rational>,
}

impl EndowmentProfile {
    /// Validates nonnegativity and the exact total.
    pub fn new(total: &Rational, endowments: Vec<Rational>) -> Result<Self, ProfileError> {
        if endowments.iter().any(|w| w < &Rational::zero()) {
            return Err(ProfileError::BadEndowments);
        }
        let sum: Rational = endowments.iter().sum();
        if &sum != total {
            return Err(ProfileError::BadEndowments);
        }
        Ok(EndowmentProfile { endowments })
    }

    /// The equal-split endowment profile `(omega/n, ..., omega/n)`.
    pub fn equal_split(grid: &Grid, n: usize) -> Self {
        let share = grid.equal_share(n);
        EndowmentProfile {
            endowments: alloc::vec![share; n],
        }
    }

    pub fn endowments(&self) -> &[Rational] {
        &self.endowments
    }

    pub fn endowment(&self, agent: usize) -> &Rational {
        &self.endowments[agent]
    }

    pub fn len(&self) -> usize {
        self.endowments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.endowments.is_empty()
    }
}

/// A division problem instance: the grid, one preference per agent, and
/// (in the reallocation setting) the individual endowments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    grid: Grid,
    preferences: Vec<Preference>,
    endowments: Option<EndowmentProfile>,
}

impl Profile {
    pub fn new(grid: Grid, preferences: Vec<Preference>) -> Result<Self, ProfileError> {
        let n = preferences.len();
        if n < 2 {
            return Err(ProfileError::TooFewAgents);
        }
        if grid.resolution() % n != 0 {
            return Err(ProfileError::ResolutionNotDivisible {
                q: grid.resolution(),
                n,
            });
        }
        for (agent, pref) in preferences.iter().enumerate() {
            if pref.utilities().len() != grid.resolution() + 1 {
                return Err(ProfileError::MismatchedPreference { agent });
            }
        }
        Ok(Profile {
            grid,
            preferences,
            endowments: None,
        })
    }

    /// Attaches individual endowments (validated against the grid's omega).
    pub fn with_endowments(mut self, endowments: EndowmentProfile) -> Result<Self, ProfileError> {
        if endowments.len() != self.n() {
            return Err(ProfileError::BadEndowments);
        }
        let sum: Rational = endowments.endowments().iter().sum();
        if &sum != self.grid.omega() {
            return Err(ProfileError::BadEndowments);
        }
        self.endowments = Some(endowments);
        Ok(self)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.preferences.len()
    }

    pub fn preferences(&self) -> &[Preference] {
        &self.preferences
    }

    pub fn preference(&self, agent: usize) -> &Preference {
        &self.preferences[agent]
    }

    pub fn endowments(&self) -> Option<&EndowmentProfile> {
        self.endowments.as_ref()
    }

    pub fn peaks(&self) -> Vec<&Peak> {
        self.preferences.iter().map(|p| p.peak()).collect()
    }

    /// Replaces agent `i`'s preference, keeping everything else.
    pub fn replace_preference(&self, agent: usize, pref: Preference) -> Profile {
        let mut preferences = self.preferences.clone();
        preferences[agent] = pref;
        Profile {
            grid: self.grid.clone(),
            preferences,
            endowments: self.endowments.clone(),
        }
    }

    /// In-place variant for enumeration loops.
    pub(crate) fn set_preference(&mut self, agent: usize, pref: Preference) {
        debug_assert_eq!(pref.utilities().len(), self.grid.resolution() + 1);
        self.preferences[agent] = pref;
    }
}

/// A feasible division of the endowment: `n` nonnegative amounts summing
/// exactly to omega.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Allocation {
    amounts: Vec<Rational>,
}

impl Allocation {
    pub fn new(omega: &Rational, amounts: Vec<Rational>) -> Result<Self, ProfileError> {
        if amounts
            .iter()
            .any(|x| x < &Rational::zero() || x > omega)
        {
            return Err(ProfileError::Infeasible);
        }
        let sum: Rational = amounts.iter().sum();
        if &sum != omega {
            return Err(ProfileError::Infeasible);
        }
        Ok(Allocation { amounts })
    }

    pub fn amounts(&self) -> &[Rational] {
        &self.amounts
    }

    pub fn amount(&self, agent: usize) -> &Rational {
        &self.amounts[agent]
    }

    pub fn len(&self) -> usize {
        self.amounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amounts.is_empty()
    }

    /// True when every amount is a grid point.
    pub fn on_grid(&self, grid: &Grid) -> bool {
        self.amounts.iter().all(|x| grid.contains(x))
    }
}
