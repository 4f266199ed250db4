//! Preferences over amounts with a unique global maximum.
//!
//! A preference is represented by its utility at every grid point, extended
//! to `[0, omega]` by piecewise-linear interpolation. Only comparisons ever
//! matter downstream, so any order-isomorphic utility encoding is equivalent.
//!
//! The peak may also lie strictly beyond the endowment (`beyond_peak`), in
//! which case the restricted utilities on `[0, omega]` carry no uniqueness
//! constraint; the only fact rules ever use about such a peak is that it
//! exceeds every feasible amount.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use super::grid::Grid;
use super::rational::{rat_int, Rational};

/// A peak strictly above the endowment: either a concrete rational value or
/// the distinguished infinite marker.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BeyondPeak {
    Finite(Rational),
    Infinite,
}

/// Location of a preference's unique global maximum.
///
/// The derived ordering (any `Within` below any `Beyond`, `Infinite` above
/// every finite value) agrees with the numeric order because a beyond peak is
/// by construction strictly greater than the endowment.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Peak {
    /// Peak on the grid, in `[0, omega]`.
    Within(Rational),
    /// Peak strictly above the endowment.
    Beyond(BeyondPeak),
}

impl Peak {
    /// The peak's numeric value when finite (a beyond peak with a concrete
    /// value is still summable); `None` for the infinite marker.
    pub fn finite_value(&self) -> Option<&Rational> {
        match self {
            Peak::Within(v) => Some(v),
            Peak::Beyond(BeyondPeak::Finite(v)) => Some(v),
            Peak::Beyond(BeyondPeak::Infinite) => None,
        }
    }

    /// The peak's value when it lies within `[0, omega]`.
    pub fn within_omega(&self) -> Option<&Rational> {
        match self {
            Peak::Within(v) => Some(v),
            Peak::Beyond(_) => None,
        }
    }

    pub fn is_beyond(&self) -> bool {
        matches!(self, Peak::Beyond(_))
    }
}

impl fmt::Display for Peak {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Peak::Within(v) => write!(f, "{}", super::rational::format_rational(v)),
            Peak::Beyond(BeyondPeak::Finite(v)) => {
                write!(f, "{}", super::rational::format_rational(v))
            }
            Peak::Beyond(BeyondPeak::Infinite) => write!(f, "inf"),
        }
    }
}

/// Errors from preference construction and comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PreferenceError {
    /// Utility vector length does not match the grid.
    WrongUtilityCount { expected: usize, got: usize },
    /// No `beyond_peak` flag and the maximum utility is attained at two grid
    /// points, so there is no unique peak.
    ViolatesUniquePeak { first: usize, second: usize },
    /// A `beyond_peak` value that does not exceed the endowment.
    BeyondPeakNotBeyond,
    /// Comparison argument outside `[0, omega]`.
    OutOfDomain,
    /// Generator argument off the grid or degenerate (`x == y`).
    InvalidArgument,
    /// Reflection is only defined for peaks within `[0, omega]`.
    UnsupportedReflection,
}

impl fmt::Display for PreferenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PreferenceError::WrongUtilityCount { expected, got } => {
                write!(f, "expected {expected} utilities, got {got}")
            }
            PreferenceError::ViolatesUniquePeak { first, second } => write!(
                f,
                "maximum utility tied at grid indices {first} and {second}; peak must be unique"
            ),
            PreferenceError::BeyondPeakNotBeyond => {
                write!(f, "beyond_peak must be strictly greater than the endowment")
            }
            PreferenceError::OutOfDomain => write!(f, "amount outside [0, omega]"),
            PreferenceError::InvalidArgument => write!(f, "invalid generator argument"),
            PreferenceError::UnsupportedReflection => {
                write!(f, "cannot reflect a preference whose peak lies beyond the endowment")
            }
        }
    }
}

/// A preference relation over `[0, omega]` with a unique global maximum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Preference {
    utilities: Vec<Rational>,
    peak: Peak,
    peak_index: Option<usize>,
}

impl Preference {
    /// Validates and builds a preference; computes and caches the peak.
    ///
    /// Without `beyond_peak`, exactly one grid point must attain the maximum
    /// utility. With it, ties are allowed anywhere on the grid and the peak
    /// is the flag's value, which must exceed the endowment.
    pub fn new(
        grid: &Grid,
        utilities: Vec<Rational>,
        beyond_peak: Option<BeyondPeak>,
    ) -> Result<Self, PreferenceError> {
        let expected = grid.resolution() + 1;
        if utilities.len() != expected {
            return Err(PreferenceError::WrongUtilityCount {
                expected,
                got: utilities.len(),
            });
        }
        match beyond_peak {
            Some(BeyondPeak::Finite(v)) => {
                if v <= *grid.omega() {
                    return Err(PreferenceError::BeyondPeakNotBeyond);
                }
                Ok(Preference {
                    utilities,
                    peak: Peak::Beyond(BeyondPeak::Finite(v)),
                    peak_index: None,
                })
            }
            Some(BeyondPeak::Infinite) => Ok(Preference {
                utilities,
                peak: Peak::Beyond(BeyondPeak::Infinite),
                peak_index: None,
            }),
            None => {
                let mut top = 0usize;
                let mut tie: Option<usize> = None;
                for (k, u) in utilities.iter().enumerate().skip(1) {
                    match u.cmp(&utilities[top]) {
                        Ordering::Greater => {
                            top = k;
                            tie = None;
                        }
                        Ordering::Equal => {
                            if tie.is_none() {
                                tie = Some(k);
                            }
                        }
                        Ordering::Less => {}
                    }
                }
                if let Some(second) = tie {
                    return Err(PreferenceError::ViolatesUniquePeak {
                        first: top,
                        second,
                    });
                }
                let peak = Peak::Within(grid.point(top).clone());
                Ok(Preference {
                    utilities,
                    peak,
                    peak_index: Some(top),
                })
            }
        }
    }

    pub fn peak(&self) -> &Peak {
        &self.peak
    }

    /// Grid index of the peak when it lies within `[0, omega]`.
    pub fn peak_index(&self) -> Option<usize> {
        self.peak_index
    }

    pub fn is_beyond(&self) -> bool {
        self.peak_index.is_none()
    }

    pub fn utilities(&self) -> &[Rational] {
        &self.utilities
    }

    /// Utility at grid index `k`.
    pub fn utility(&self, k: usize) -> &Rational {
        &self.utilities[k]
    }

    /// Interpolated utility at any `x` in `[0, omega]`.
    pub fn utility_at(&self, grid: &Grid, x: &Rational) -> Result<Rational, PreferenceError> {
        if !grid.in_domain(x) {
            return Err(PreferenceError::OutOfDomain);
        }
        let points = grid.points();
        match points.binary_search(x) {
            Ok(k) => Ok(self.utilities[k].clone()),
            Err(hi) => {
                // hi is the first index with points[hi] > x; x is interior
                let lo = hi - 1;
                let span = points[hi].clone() - &points[lo];
                let offset = x.clone() - &points[lo];
                let rise = self.utilities[hi].clone() - &self.utilities[lo];
                Ok(self.utilities[lo].clone() + rise * offset / span)
            }
        }
    }

    /// Exact comparison of two amounts under this preference:
    /// `Greater` means `x` is strictly better than `y`, `Equal` indifferent.
    pub fn compare(
        &self,
        grid: &Grid,
        x: &Rational,
        y: &Rational,
    ) -> Result<Ordering, PreferenceError> {
        let ux = self.utility_at(grid, x)?;
        let uy = self.utility_at(grid, y)?;
        Ok(ux.cmp(&uy))
    }

    /// Comparison of two grid points by index (no interpolation).
    pub fn compare_indices(&self, i: usize, j: usize) -> Ordering {
        self.utilities[i].cmp(&self.utilities[j])
    }

    /// A preference with unique top `x` and unique bottom `y`: `x` is ranked
    /// above every other grid point and every grid point above `y`. The
    /// canonical utilities are `q + 1` at `x`, `0` at `y`, and `1..=q-1` on
    /// the remaining points in grid order.
    pub fn peak_dip(grid: &Grid, x: &Rational, y: &Rational) -> Result<Self, PreferenceError> {
        let q = grid.resolution();
        let xi = grid.index_of(x).ok_or(PreferenceError::InvalidArgument)?;
        let yi = grid.index_of(y).ok_or(PreferenceError::InvalidArgument)?;
        if xi == yi {
            return Err(PreferenceError::InvalidArgument);
        }
        let mut utilities = alloc::vec![rat_int(0); q + 1];
        utilities[xi] = rat_int(q as i64 + 1);
        let mut next = 1i64;
        for k in 0..=q {
            if k != xi && k != yi {
                utilities[k] = rat_int(next);
                next += 1;
            }
        }
        Preference::new(grid, utilities, None)
    }

    /// A preference with top `peak` that ranks every other grid point
    /// strictly above `worst`. Canonical utilities: `0` at `worst`, `q` at
    /// `peak`, and `1..=q-1` on the remaining points in grid order.
    pub fn spite(grid: &Grid, peak: &Rational, worst: &Rational) -> Result<Self, PreferenceError> {
        let q = grid.resolution();
        let pi = grid.index_of(peak).ok_or(PreferenceError::InvalidArgument)?;
        let wi = grid.index_of(worst).ok_or(PreferenceError::InvalidArgument)?;
        if pi == wi {
            return Err(PreferenceError::InvalidArgument);
        }
        let mut utilities = alloc::vec![rat_int(0); q + 1];
        utilities[pi] = rat_int(q as i64);
        let mut next = 1i64;
        for k in 0..=q {
            if k != pi && k != wi {
                utilities[k] = rat_int(next);
                next += 1;
            }
        }
        Preference::new(grid, utilities, None)
    }

    /// The mirrored preference: `x` is weakly preferred to `y` under the
    /// result exactly when `omega - x` is weakly preferred to `omega - y`
    /// under `self`. Implemented by reversing the utility vector; the peak
    /// maps to `omega - t`.
    pub fn reflected(&self, grid: &Grid) -> Result<Self, PreferenceError> {
        if self.is_beyond() {
            return Err(PreferenceError::UnsupportedReflection);
        }
        let mut utilities = self.utilities.clone();
        utilities.reverse();
        Preference::new(grid, utilities, None)
    }

    /// True when both preferences induce the same ordering of grid points.
    pub fn same_grid_ordering(&self, other: &Preference) -> bool {
        if self.utilities.len() != other.utilities.len() {
            return false;
        }
        let m = self.utilities.len();
        for i in 0..m {
            for j in (i + 1)..m {
                if self.compare_indices(i, j) != other.compare_indices(i, j) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prefcore::rational::rat;

    fn grid12() -> Grid {
        Grid::new(rat_int(1), 2).unwrap()
    }

    fn prefs(grid: &Grid, u: &[i64]) -> Preference {
        Preference::new(grid, u.iter().map(|&v| rat_int(v)).collect(), None).unwrap()
    }

    #[test]
    fn unique_argmax_is_peak() {
        let g = grid12();
        let p = prefs(&g, &[0, 2, 1]);
        assert_eq!(p.peak(), &Peak::Within(rat(1, 2)));
        assert_eq!(p.peak_index(), Some(1));
    }

    #[test]
    fn tied_top_rejected() {
        let g = grid12();
        let err = Preference::new(&g, alloc::vec![rat_int(1), rat_int(1), rat_int(0)], None)
            .unwrap_err();
        assert_eq!(err, PreferenceError::ViolatesUniquePeak { first: 0, second: 1 });
    }

    #[test]
    fn beyond_flag_overrides_ties() {
        let g = grid12();
        let p = Preference::new(
            &g,
            alloc::vec![rat_int(1), rat_int(0), rat_int(1)],
            Some(BeyondPeak::Finite(rat_int(2))),
        )
        .unwrap();
        assert_eq!(p.peak(), &Peak::Beyond(BeyondPeak::Finite(rat_int(2))));
        // 0 and 1 are indifferent on the grid
        assert_eq!(p.compare(&g, &rat_int(0), &rat_int(1)).unwrap(), Ordering::Equal);
    }

    #[test]
    fn beyond_peak_must_exceed_omega() {
        let g = grid12();
        let err = Preference::new(
            &g,
            alloc::vec![rat_int(0), rat_int(1), rat_int(2)],
            Some(BeyondPeak::Finite(rat(1, 2))),
        )
        .unwrap_err();
        assert_eq!(err, PreferenceError::BeyondPeakNotBeyond);
    }

    #[test]
    fn comparisons_interpolate_exactly() {
        let g = grid12();
        let p = prefs(&g, &[0, 2, 1]);
        assert_eq!(
            p.compare(&g, &rat(1, 2), &rat_int(1)).unwrap(),
            Ordering::Greater
        );
        assert_eq!(p.compare(&g, &rat(1, 4), &rat(1, 4)).unwrap(), Ordering::Equal);
        // u(1/4) = 1 on the rising segment, u(3/4) = 3/2 on the falling one
        assert_eq!(p.utility_at(&g, &rat(1, 4)).unwrap(), rat_int(1));
        assert_eq!(p.utility_at(&g, &rat(3, 4)).unwrap(), rat(3, 2));
        assert_eq!(
            p.compare(&g, &rat(1, 4), &rat(3, 4)).unwrap(),
            Ordering::Less
        );
    }

    #[test]
    fn out_of_domain_rejected() {
        let g = grid12();
        let p = prefs(&g, &[0, 2, 1]);
        assert_eq!(
            p.compare(&g, &rat(3, 2), &rat_int(0)).unwrap_err(),
            PreferenceError::OutOfDomain
        );
        assert_eq!(
            p.compare(&g, &rat_int(0), &rat(-1, 2)).unwrap_err(),
            PreferenceError::OutOfDomain
        );
    }

    #[test]
    fn peak_dip_canonical_vectors() {
        let g = grid12();
        let p = Preference::peak_dip(&g, &rat_int(0), &rat_int(1)).unwrap();
        assert_eq!(p.utilities(), &[rat_int(3), rat_int(1), rat_int(0)]);
        let p = Preference::peak_dip(&g, &rat_int(1), &rat_int(0)).unwrap();
        assert_eq!(p.utilities(), &[rat_int(0), rat_int(1), rat_int(3)]);
    }

    #[test]
    fn peak_dip_middle_ranks_strict() {
        let g = Grid::new(rat_int(1), 4).unwrap();
        let p = Preference::peak_dip(&g, &rat(1, 2), &rat_int(1)).unwrap();
        assert_eq!(p.peak(), &Peak::Within(rat(1, 2)));
        // dip strictly below everything, top strictly above everything,
        // middle ranks pairwise strict
        let m = g.resolution() + 1;
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    assert_ne!(p.compare_indices(i, j), Ordering::Equal);
                }
            }
        }
        for k in 0..m {
            if g.point(k) != &rat_int(1) {
                assert_eq!(
                    p.compare(&g, g.point(k), &rat_int(1)).unwrap(),
                    Ordering::Greater
                );
            }
        }
    }

    #[test]
    fn peak_dip_rejects_degenerate() {
        let g = grid12();
        assert_eq!(
            Preference::peak_dip(&g, &rat_int(0), &rat_int(0)).unwrap_err(),
            PreferenceError::InvalidArgument
        );
        assert_eq!(
            Preference::peak_dip(&g, &rat(1, 3), &rat_int(0)).unwrap_err(),
            PreferenceError::InvalidArgument
        );
    }

    #[test]
    fn spite_canonical_vector() {
        let g = grid12();
        let p = Preference::spite(&g, &rat(1, 2), &rat_int(0)).unwrap();
        assert_eq!(p.utilities(), &[rat_int(0), rat_int(2), rat_int(1)]);
    }

    #[test]
    fn spite_coincides_with_peak_dip_ordering() {
        let g = grid12();
        let s = Preference::spite(&g, &rat_int(0), &rat_int(1)).unwrap();
        let d = Preference::peak_dip(&g, &rat_int(0), &rat_int(1)).unwrap();
        assert!(s.same_grid_ordering(&d));
    }

    #[test]
    fn spite_worst_below_all_others() {
        let g = Grid::new(rat_int(1), 4).unwrap();
        let p = Preference::spite(&g, &rat(1, 4), &rat(3, 4)).unwrap();
        let wi = g.index_of(&rat(3, 4)).unwrap();
        for k in 0..=g.resolution() {
            if k != wi {
                assert_eq!(p.compare_indices(k, wi), Ordering::Greater);
            }
        }
        assert_eq!(p.peak(), &Peak::Within(rat(1, 4)));
    }

    #[test]
    fn reflection_examples() {
        let g = grid12();
        let p = prefs(&g, &[0, 2, 1]);
        let r = p.reflected(&g).unwrap();
        assert_eq!(r.utilities(), &[rat_int(1), rat_int(2), rat_int(0)]);
        assert_eq!(r.peak(), &Peak::Within(rat(1, 2)));

        let p = prefs(&g, &[3, 1, 0]);
        let r = p.reflected(&g).unwrap();
        assert_eq!(r.utilities(), &[rat_int(0), rat_int(1), rat_int(3)]);
        assert_eq!(r.peak(), &Peak::Within(rat_int(1)));
    }

    #[test]
    fn reflection_is_involution() {
        let g = Grid::new(rat_int(1), 4).unwrap();
        let p = Preference::peak_dip(&g, &rat(1, 4), &rat_int(1)).unwrap();
        assert_eq!(p.reflected(&g).unwrap().reflected(&g).unwrap(), p);
    }

    #[test]
    fn reflection_rejects_beyond_peaks() {
        let g = grid12();
        let p = Preference::new(
            &g,
            alloc::vec![rat_int(0), rat_int(1), rat_int(2)],
            Some(BeyondPeak::Infinite),
        )
        .unwrap();
        assert_eq!(
            p.reflected(&g).unwrap_err(),
            PreferenceError::UnsupportedReflection
        );
    }

    #[test]
    fn peak_ordering_places_beyond_above_grid() {
        let within = Peak::Within(rat_int(1));
        let beyond = Peak::Beyond(BeyondPeak::Finite(rat_int(2)));
        let inf = Peak::Beyond(BeyondPeak::Infinite);
        assert!(within < beyond);
        assert!(beyond < inf);
    }
}
