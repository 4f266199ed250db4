//! Robust efficiency: an allocation survives when no feasible grid
//! allocation Pareto-dominates it under *any* catalog completion of the
//! fixed peak vector.
//!
//! For the weak-order catalog there is a direct combinatorial criterion.
//! Any agent sitting at their unique peak blocks every change to their
//! amount, while an agent away from their peak can be completed to strictly
//! prefer any other amount. So an allocation is robustly efficient exactly
//! when the amounts of the off-peak agents are pinned by feasibility: at
//! most one agent off peak, or every off-peak agent at zero. The
//! completion-enumeration oracle below checks the same property literally
//! and guards the shortcut in tests and acceptance runs.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::Zero;

use crate::prefcore::catalog::{
    enumerate_preferences, feasible_allocations, CatalogError, CatalogFamily,
};
use crate::prefcore::grid::Grid;
use crate::prefcore::profile::{Allocation, Profile};
use crate::prefcore::rational::Rational;

/// Direct combinatorial test, exact over the weak-order completions.
///
/// `peaks` are grid points (one per agent); `allocation` is grid-valued.
pub fn robust_efficiency(grid: &Grid, peaks: &[Rational], allocation: &Allocation) -> bool {
    debug_assert_eq!(peaks.len(), allocation.len());
    let mut off_peak = 0usize;
    let mut off_peak_total = Rational::zero();
    for (peak, amount) in peaks.iter().zip(allocation.amounts()) {
        debug_assert!(grid.contains(peak), "peaks must be grid points");
        if amount != peak {
            off_peak += 1;
            off_peak_total += amount;
        }
    }
    off_peak <= 1 || off_peak_total.is_zero()
}

/// Completion-enumeration oracle: enumerates every catalog completion with
/// the given peaks and every feasible grid allocation, and reports whether
/// any completion admits a Pareto improvement. Exponential in `n`; intended
/// for small grids and as the independent check on [`robust_efficiency`].
pub fn robust_efficiency_oracle(
    grid: &Grid,
    peaks: &[Rational],
    allocation: &Allocation,
    family: CatalogFamily,
) -> Result<bool, CatalogError> {
    let n = peaks.len();
    let catalog = enumerate_preferences(grid, family)?;
    let per_agent: Vec<Vec<usize>> = peaks
        .iter()
        .map(|peak| {
            catalog
                .iter()
                .enumerate()
                .filter(|(_, p)| p.peak().within_omega() == Some(peak))
                .map(|(k, _)| k)
                .collect()
        })
        .collect();
    let candidates = feasible_allocations(grid, n)?;

    let mut completion = alloc::vec![0usize; n];
    Ok(!dominated_by_some_completion(
        grid,
        &catalog,
        &per_agent,
        &candidates,
        allocation,
        &mut completion,
        0,
    ))
}

fn dominated_by_some_completion(
    grid: &Grid,
    catalog: &[crate::prefcore::preference::Preference],
    per_agent: &[Vec<usize>],
    candidates: &[Allocation],
    allocation: &Allocation,
    completion: &mut Vec<usize>,
    agent: usize,
) -> bool {
    if agent == per_agent.len() {
        let prefs: Vec<_> = completion
            .iter()
            .map(|&k| catalog[k].clone())
            .collect();
        let profile = Profile::new(grid.clone(), prefs)
            .expect("completion preferences fit the grid");
        return candidates
            .iter()
            .any(|candidate| pareto_dominates(&profile, candidate, allocation));
    }
    per_agent[agent].iter().any(|&k| {
        completion[agent] = k;
        dominated_by_some_completion(
            grid,
            catalog,
            per_agent,
            candidates,
            allocation,
            completion,
            agent + 1,
        )
    })
}

/// True when `candidate` weakly improves on `allocation` for every agent and
/// strictly for at least one, under the profile's actual preferences.
pub fn pareto_dominates(profile: &Profile, candidate: &Allocation, allocation: &Allocation) -> bool {
    let grid = profile.grid();
    let mut some_strict = false;
    for i in 0..profile.n() {
        match profile
            .preference(i)
            .compare(grid, candidate.amount(i), allocation.amount(i))
            .expect("allocations lie in [0, omega]")
        {
            Ordering::Greater => some_strict = true,
            Ordering::Equal => {}
            Ordering::Less => return false,
        }
    }
    some_strict
}

/// All robustly efficient grid allocations at a peak vector.
pub fn robust_efficient_allocations(
    grid: &Grid,
    peaks: &[Rational],
) -> Result<Vec<Allocation>, CatalogError> {
    let candidates = feasible_allocations(grid, peaks.len())?;
    Ok(candidates
        .into_iter()
        .filter(|a| robust_efficiency(grid, peaks, a))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prefcore::rational::{rat, rat_int};

    fn grid(q: usize) -> Grid {
        Grid::new(rat_int(1), q).unwrap()
    }

    fn alloc_of(omega: i64, amounts: &[Rational]) -> Allocation {
        Allocation::new(&rat_int(omega), amounts.to_vec()).unwrap()
    }

    #[test]
    fn equal_split_at_all_top_peaks_is_dominated() {
        let g = grid(3);
        let peaks = alloc::vec![rat_int(1), rat_int(1), rat_int(1)];
        let a = alloc_of(1, &[rat(1, 3), rat(1, 3), rat(1, 3)]);
        assert!(!robust_efficiency(&g, &peaks, &a));
    }

    #[test]
    fn corner_at_all_top_peaks_is_robust() {
        // one agent absorbs the endowment; the other two are pinned at zero
        let g = grid(3);
        let peaks = alloc::vec![rat_int(1), rat_int(1), rat_int(1)];
        let a = alloc_of(1, &[rat_int(1), rat_int(0), rat_int(0)]);
        assert!(robust_efficiency(&g, &peaks, &a));
        assert!(robust_efficiency_oracle(&g, &peaks, &a, CatalogFamily::WeakOrders).unwrap());
    }

    #[test]
    fn unanimity_allocation_is_robust() {
        let g = grid(3);
        let peaks = alloc::vec![rat_int(0), rat(1, 3), rat(2, 3)];
        let a = alloc_of(1, &[rat_int(0), rat(1, 3), rat(2, 3)]);
        assert!(robust_efficiency(&g, &peaks, &a));
    }

    #[test]
    fn reversed_corner_is_dominated() {
        let g = grid(2);
        let peaks = alloc::vec![rat_int(0), rat_int(1)];
        let a = alloc_of(1, &[rat_int(1), rat_int(0)]);
        assert!(!robust_efficiency(&g, &peaks, &a));
        assert!(
            !robust_efficiency_oracle(&g, &peaks, &a, CatalogFamily::WeakOrders).unwrap()
        );
    }

    #[test]
    fn oracle_agrees_with_shortcut_exhaustively_small() {
        // every peak vector and every feasible allocation at q=2, n=2
        let g = grid(2);
        for p0 in 0..=2usize {
            for p1 in 0..=2usize {
                let peaks = alloc::vec![g.point(p0).clone(), g.point(p1).clone()];
                for a in feasible_allocations(&g, 2).unwrap() {
                    let fast = robust_efficiency(&g, &peaks, &a);
                    let slow =
                        robust_efficiency_oracle(&g, &peaks, &a, CatalogFamily::WeakOrders)
                            .unwrap();
                    assert_eq!(fast, slow, "peaks {peaks:?} allocation {a:?}");
                }
            }
        }
    }

    #[test]
    fn middle_peaks_admit_no_robust_allocation() {
        // at peaks (2/3, 2/3, 2/3) no grid allocation is robustly efficient:
        // at most one agent can sit at the peak and the remaining third
        // cannot be pinned
        let g = grid(3);
        let peaks = alloc::vec![rat(2, 3), rat(2, 3), rat(2, 3)];
        assert!(robust_efficient_allocations(&g, &peaks).unwrap().is_empty());
    }

    #[test]
    fn all_top_peaks_admit_exactly_the_corners() {
        let g = grid(3);
        let peaks = alloc::vec![rat_int(1), rat_int(1), rat_int(1)];
        let robust = robust_efficient_allocations(&g, &peaks).unwrap();
        assert_eq!(robust.len(), 3);
        for a in &robust {
            assert!(a.amounts().contains(&rat_int(1)));
        }
    }
}
