//! Discretized outcome space: `q + 1` equally spaced rational points on
//! `[0, omega]`. Rules and audits only ever allocate grid amounts (the
//! uniform rule's water level is the one exception, and comparisons against
//! off-grid amounts go through utility interpolation).

use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use super::rational::{rat_int, Rational};

/// Error constructing a [`Grid`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GridError {
    /// The endowment must be strictly positive.
    NonPositiveOmega,
    /// The resolution must be at least one.
    ZeroResolution,
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::NonPositiveOmega => write!(f, "endowment must be strictly positive"),
            GridError::ZeroResolution => write!(f, "grid resolution must be at least 1"),
        }
    }
}

/// Uniform rational grid `{k * omega / q : k = 0..=q}` on `[0, omega]`.
///
/// For a profile of `n` agents the resolution `q` must be divisible by `n`,
/// so that the equal share `omega / n` is itself a grid point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    omega: Rational,
    resolution: usize,
    points: Vec<Rational>,
}

impl Grid {
    /// Builds the grid with `q + 1` equally spaced points, first `0`, last
    /// `omega`, strictly increasing.
    pub fn new(omega: Rational, q: usize) -> Result<Self, GridError> {
        if omega <= Rational::zero() {
            return Err(GridError::NonPositiveOmega);
        }
        if q == 0 {
            return Err(GridError::ZeroResolution);
        }
        let step = &omega / rat_int(q as i64);
        let points = (0..=q).map(|k| rat_int(k as i64) * &step).collect();
        Ok(Grid {
            omega,
            resolution: q,
            points,
        })
    }

    pub fn omega(&self) -> &Rational {
        &self.omega
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn point(&self, k: usize) -> &Rational {
        &self.points[k]
    }

    /// Index of `x` among the grid points, if it is one.
    pub fn index_of(&self, x: &Rational) -> Option<usize> {
        // points are sorted; binary search keeps this exact
        self.points.binary_search(x).ok()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.index_of(x).is_some()
    }

    /// True when `x` lies in `[0, omega]` (not necessarily on the grid).
    pub fn in_domain(&self, x: &Rational) -> bool {
        x >= &Rational::zero() && x <= &self.omega
    }

    /// The equal share `omega / n`.
    pub fn equal_share(&self, n: usize) -> Rational {
        &self.omega / rat_int(n as i64)
    }

    /// Grid index of the equal share, when `n` divides the resolution.
    pub fn equal_share_index(&self, n: usize) -> Option<usize> {
        if n != 0 && self.resolution % n == 0 {
            Some(self.resolution / n)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prefcore::rational::rat;

    #[test]
    fn unit_grid_resolution_two() {
        let g = Grid::new(rat_int(1), 2).unwrap();
        assert_eq!(g.points(), &[rat_int(0), rat(1, 2), rat_int(1)]);
    }

    #[test]
    fn unit_grid_resolution_four() {
        let g = Grid::new(rat_int(1), 4).unwrap();
        assert_eq!(
            g.points(),
            &[rat_int(0), rat(1, 4), rat(1, 2), rat(3, 4), rat_int(1)]
        );
    }

    #[test]
    fn integer_omega_grid() {
        let g = Grid::new(rat_int(3), 3).unwrap();
        assert_eq!(g.points(), &[rat_int(0), rat_int(1), rat_int(2), rat_int(3)]);
    }

    #[test]
    fn invalid_arguments_rejected() {
        assert_eq!(
            Grid::new(rat_int(0), 2).unwrap_err(),
            GridError::NonPositiveOmega
        );
        assert_eq!(
            Grid::new(rat(-1, 2), 2).unwrap_err(),
            GridError::NonPositiveOmega
        );
        assert_eq!(
            Grid::new(rat_int(1), 0).unwrap_err(),
            GridError::ZeroResolution
        );
    }

    #[test]
    fn index_lookup() {
        let g = Grid::new(rat_int(1), 4).unwrap();
        assert_eq!(g.index_of(&rat(3, 4)), Some(3));
        assert_eq!(g.index_of(&rat(1, 3)), None);
        assert_eq!(g.equal_share_index(2), Some(2));
        assert_eq!(g.equal_share_index(3), None);
    }
}
