//! Coalitions of agents and the agreeability test: a coalition is agreeable
//! for a profile when its members' peaks sum exactly to the members' share
//! `|S| / n * omega` of the endowment. The empty coalition is always
//! agreeable; a coalition containing a peak beyond the endowment never is
//! (its peak sum alone would exceed the coalition's share).

use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::prefcore::profile::{EndowmentProfile, Profile};
use crate::prefcore::rational::{rat_int, Rational};

/// Default cap on subset enumeration (`2^n` subsets).
pub const DEFAULT_SUBSET_BOUND: usize = 20;

/// An agent subset, stored as a bitmask over 0-indexed agents. Displayed
/// 1-indexed (`{1,3}`) to match report conventions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition(u32);

impl Coalition {
    pub fn empty() -> Self {
        Coalition(0)
    }

    pub fn grand(n: usize) -> Self {
        debug_assert!(n <= 32);
        Coalition(((1u64 << n) - 1) as u32)
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(members: I) -> Self {
        let mut mask = 0u32;
        for m in members {
            debug_assert!(m < 32);
            mask |= 1 << m;
        }
        Coalition(mask)
    }

    pub fn from_mask(mask: u32) -> Self {
        Coalition(mask)
    }

    pub fn mask(&self) -> u32 {
        self.0
    }

    pub fn contains(&self, agent: usize) -> bool {
        agent < 32 && self.0 & (1 << agent) != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(&self, other: &Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset_of(&self, other: &Coalition) -> bool {
        self.0 != other.0 && self.is_subset_of(other)
    }

    pub fn without(&self, agent: usize) -> Coalition {
        Coalition(self.0 & !(1 << agent))
    }

    pub fn members(&self) -> Vec<usize> {
        (0..32).filter(|&a| self.contains(a)).collect()
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for a in self.members() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{}", a + 1)?;
            first = false;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoalitionError {
    /// Subset enumeration over more agents than the configured bound.
    TooLarge { n: usize, bound: usize },
}

impl fmt::Display for CoalitionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoalitionError::TooLarge { n, bound } => {
                write!(f, "subset enumeration over n = {n} agents exceeds the bound {bound}")
            }
        }
    }
}

/// Exact test of the defining equation `sum of member peaks = |S|/n * omega`.
///
/// A member whose peak is the infinite marker makes the result false; a
/// finite beyond-the-endowment peak enters the sum exactly (and can never
/// satisfy the equation, since the coalition's share is at most omega).
pub fn is_agreeable(profile: &Profile, coalition: Coalition) -> bool {
    let n = profile.n();
    let mut sum = Rational::zero();
    for agent in 0..n {
        if coalition.contains(agent) {
            match profile.preference(agent).peak().finite_value() {
                Some(v) => sum += v,
                None => return false,
            }
        }
    }
    let share = profile.grid().omega() * rat_int(coalition.len() as i64) / rat_int(n as i64);
    sum == share
}

/// Exact test of the endowment analogue `sum of member peaks = sum of member
/// endowments`.
pub fn omega_admissible(
    profile: &Profile,
    endowments: &EndowmentProfile,
    coalition: Coalition,
) -> bool {
    let n = profile.n();
    let mut peak_sum = Rational::zero();
    let mut endowment_sum = Rational::zero();
    for agent in 0..n {
        if coalition.contains(agent) {
            match profile.preference(agent).peak().finite_value() {
                Some(v) => peak_sum += v,
                None => return false,
            }
            endowment_sum += endowments.endowment(agent);
        }
    }
    peak_sum == endowment_sum
}

/// The set of all agreeable coalitions, by subset enumeration with
/// prefix-sum pruning, in ascending bitmask order.
pub fn enumerate_agreeable(profile: &Profile) -> Result<Vec<Coalition>, CoalitionError> {
    enumerate_agreeable_with_bound(profile, DEFAULT_SUBSET_BOUND)
}

pub fn enumerate_agreeable_with_bound(
    profile: &Profile,
    bound: usize,
) -> Result<Vec<Coalition>, CoalitionError> {
    let n = profile.n();
    if n > bound || n > 32 {
        return Err(CoalitionError::TooLarge { n, bound });
    }
    let share = profile.grid().omega() / rat_int(n as i64);
    // agents with a peak beyond the endowment can never join an agreeable
    // coalition, so they are excluded from the search up front
    let peaks: Vec<Option<&Rational>> = (0..n)
        .map(|a| {
            let peak = profile.preference(a).peak();
            if peak.is_beyond() {
                None
            } else {
                peak.finite_value()
            }
        })
        .collect();
    let mut found = Vec::new();
    let mut stack: Vec<(usize, u32, usize, Rational)> = alloc::vec![(0, 0, 0, Rational::zero())];
    while let Some((agent, mask, count, sum)) = stack.pop() {
        if agent == n {
            if sum == &share * rat_int(count as i64) {
                found.push(Coalition::from_mask(mask));
            }
            continue;
        }
        let remaining = n - agent - 1;
        // largest share still reachable from here caps the admissible sum
        let max_share = &share * rat_int((count + remaining + 1) as i64);
        if let Some(peak) = peaks[agent] {
            let with_sum = sum.clone() + peak;
            if with_sum <= max_share {
                stack.push((agent + 1, mask | (1 << agent), count + 1, with_sum));
            }
        }
        if sum <= max_share {
            stack.push((agent + 1, mask, count, sum));
        }
    }
    found.sort_unstable();
    Ok(found)
}
