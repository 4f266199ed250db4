//! Coalition selections: maps from profiles to agreeable coalitions.
//!
//! A selection must (i) always pick an agreeable coalition, (ii) keep an
//! agent's membership invariant under own same-peak preference changes, and
//! (iii) pick the grand coalition whenever it is agreeable. The checks live
//! in [`crate::coalitions::checks`]; rule constructors assume they pass for
//! the shipped selections and verify them for custom ones.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::Zero;

use super::coalition::{
    enumerate_agreeable_with_bound, is_agreeable, omega_admissible, Coalition,
    DEFAULT_SUBSET_BOUND,
};
use crate::prefcore::grid::Grid;
use crate::prefcore::profile::{EndowmentProfile, Profile};
use crate::prefcore::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SelectionError {
    /// A nested chain must start at the grand coalition.
    ChainMustStartAtGrand,
    /// A nested chain must end at the empty coalition.
    ChainMustEndEmpty,
    /// Chain elements must strictly decrease.
    ChainNotStrictlyDecreasing { position: usize },
    /// Chain members must be agents of the profile.
    MemberOutOfRange { position: usize },
}

impl fmt::Display for SelectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionError::ChainMustStartAtGrand => {
                write!(f, "nested chain must start at the grand coalition")
            }
            SelectionError::ChainMustEndEmpty => {
                write!(f, "nested chain must end at the empty coalition")
            }
            SelectionError::ChainNotStrictlyDecreasing { position } => {
                write!(f, "chain element {position} is not a proper subset of its predecessor")
            }
            SelectionError::MemberOutOfRange { position } => {
                write!(f, "chain element {position} names an agent outside the profile")
            }
        }
    }
}

/// A strictly decreasing family `N = C_1 ⊋ C_2 ⊋ ... ⊋ C_T = ∅`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedChain {
    n: usize,
    coalitions: Vec<Coalition>,
}

impl NestedChain {
    pub fn new(n: usize, coalitions: Vec<Coalition>) -> Result<Self, SelectionError> {
        let grand = Coalition::grand(n);
        match coalitions.first() {
            Some(first) if *first == grand => {}
            _ => return Err(SelectionError::ChainMustStartAtGrand),
        }
        match coalitions.last() {
            Some(last) if last.is_empty() => {}
            _ => return Err(SelectionError::ChainMustEndEmpty),
        }
        for (position, pair) in coalitions.windows(2).enumerate() {
            if !pair[1].is_proper_subset_of(&pair[0]) {
                return Err(SelectionError::ChainNotStrictlyDecreasing {
                    position: position + 1,
                });
            }
        }
        for (position, c) in coalitions.iter().enumerate() {
            if !c.is_subset_of(&grand) {
                return Err(SelectionError::MemberOutOfRange { position });
            }
        }
        Ok(NestedChain { n, coalitions })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coalitions(&self) -> &[Coalition] {
        &self.coalitions
    }
}

impl fmt::Display for NestedChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in &self.coalitions {
            if !first {
                write!(f, "|")?;
            }
            let members = c.members();
            if members.is_empty() {
                write!(f, "~")?;
            }
            for (k, m) in members.iter().enumerate() {
                if k > 0 {
                    write!(f, ".")?;
                }
                write!(f, "{}", m + 1)?;
            }
            first = false;
        }
        Ok(())
    }
}

/// A peaks-only selection given by an explicit table from peak vectors to
/// coalitions, falling back to status-quo behavior off the table. Used for
/// hand-built examples; the table must pass the selection conditions before
/// it may back a rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CustomSelection {
    entries: alloc::collections::BTreeMap<Vec<crate::prefcore::preference::Peak>, Coalition>,
}

impl CustomSelection {
    pub fn new(
        entries: alloc::collections::BTreeMap<Vec<crate::prefcore::preference::Peak>, Coalition>,
    ) -> Self {
        CustomSelection { entries }
    }

    pub fn entries(
        &self,
    ) -> &alloc::collections::BTreeMap<Vec<crate::prefcore::preference::Peak>, Coalition> {
        &self.entries
    }

    fn select(&self, profile: &Profile) -> Coalition {
        let peaks: Vec<crate::prefcore::preference::Peak> = profile
            .preferences()
            .iter()
            .map(|p| p.peak().clone())
            .collect();
        if let Some(&c) = self.entries.get(&peaks) {
            return c;
        }
        let grand = Coalition::grand(profile.n());
        if is_agreeable(profile, grand) {
            grand
        } else {
            Coalition::empty()
        }
    }
}

/// The shipped agreeable selections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AgreeableSelection {
    /// The grand coalition when it is agreeable, the empty coalition
    /// otherwise (induces the egalitarian status quo rule).
    StatusQuo,
    /// The largest agreeable coalition of a nested chain; terminates because
    /// the empty coalition is always agreeable.
    NestedChain(NestedChain),
    /// A deliberately bossy example: at profiles whose agreeable set is
    /// exactly `{∅, {1,2}, {1,3}}` it picks `{1,2}` when agent 1 strictly
    /// prefers 0 to the endowment and `{1,3}` otherwise; elsewhere it behaves
    /// as the status quo. Satisfies the selection conditions but reads agent
    /// 1's preference shape, so the induced rule is bossy for n >= 3.
    ShapeDependent,
    /// An explicit peak-vector table with status-quo fallback.
    Custom(CustomSelection),
}

impl AgreeableSelection {
    pub fn name(&self) -> alloc::string::String {
        use alloc::string::ToString;
        match self {
            AgreeableSelection::StatusQuo => "status-quo".to_string(),
            AgreeableSelection::NestedChain(chain) => {
                let mut s = alloc::string::String::from("nested:");
                s.push_str(&chain.to_string());
                s
            }
            AgreeableSelection::ShapeDependent => "shape-bossy".to_string(),
            AgreeableSelection::Custom(_) => "custom".to_string(),
        }
    }

    /// The chosen agreeable coalition for `profile`.
    pub fn select(&self, profile: &Profile) -> Coalition {
        let n = profile.n();
        let grand = Coalition::grand(n);
        match self {
            AgreeableSelection::StatusQuo => {
                if is_agreeable(profile, grand) {
                    grand
                } else {
                    Coalition::empty()
                }
            }
            AgreeableSelection::NestedChain(chain) => chain
                .coalitions()
                .iter()
                .copied()
                .find(|c| is_agreeable(profile, *c))
                .unwrap_or_else(Coalition::empty),
            AgreeableSelection::ShapeDependent => {
                if n >= 3 && n <= DEFAULT_SUBSET_BOUND {
                    let pattern = [
                        Coalition::empty(),
                        Coalition::from_members([0, 1]),
                        Coalition::from_members([0, 2]),
                    ];
                    let agreeable = enumerate_agreeable_with_bound(profile, DEFAULT_SUBSET_BOUND)
                        .expect("bound checked above");
                    if agreeable == pattern {
                        let grid = profile.grid();
                        let zero = Rational::zero();
                        let cmp = profile
                            .preference(0)
                            .compare(grid, &zero, grid.omega())
                            .expect("0 and omega lie in the domain");
                        return if cmp == Ordering::Greater {
                            Coalition::from_members([0, 1])
                        } else {
                            Coalition::from_members([0, 2])
                        };
                    }
                }
                if is_agreeable(profile, grand) {
                    grand
                } else {
                    Coalition::empty()
                }
            }
            AgreeableSelection::Custom(custom) => custom.select(profile),
        }
    }

    /// Preference information the selection reads beyond peaks, as pairs of
    /// amounts whose comparison it consults.
    pub fn comparisons(&self, grid: &Grid) -> Vec<(Rational, Rational)> {
        match self {
            AgreeableSelection::ShapeDependent => {
                alloc::vec![(Rational::zero(), grid.omega().clone())]
            }
            _ => Vec::new(),
        }
    }
}

/// Selections for the reallocation setting: the defining equation compares
/// member peak sums against member endowment sums, and the grand coalition is
/// forced whenever it satisfies the equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OmegaSelection {
    StatusQuo,
    NestedChain(NestedChain),
}

impl OmegaSelection {
    pub fn name(&self) -> alloc::string::String {
        use alloc::string::ToString;
        match self {
            OmegaSelection::StatusQuo => "status-quo".to_string(),
            OmegaSelection::NestedChain(chain) => {
                let mut s = alloc::string::String::from("nested:");
                s.push_str(&chain.to_string());
                s
            }
        }
    }

    pub fn select(&self, profile: &Profile, endowments: &EndowmentProfile) -> Coalition {
        let grand = Coalition::grand(profile.n());
        match self {
            OmegaSelection::StatusQuo => {
                if omega_admissible(profile, endowments, grand) {
                    grand
                } else {
                    Coalition::empty()
                }
            }
            OmegaSelection::NestedChain(chain) => chain
                .coalitions()
                .iter()
                .copied()
                .find(|c| omega_admissible(profile, endowments, *c))
                .unwrap_or_else(Coalition::empty),
        }
    }
}

/// The refined selection: members of `selected` whose peak differs from the
/// equal share `omega / n`.
pub fn refine_selection(profile: &Profile, selected: Coalition) -> Coalition {
    let share = profile.grid().equal_share(profile.n());
    let mut refined = selected;
    for agent in 0..profile.n() {
        if selected.contains(agent) {
            if let Some(peak) = profile.preference(agent).peak().within_omega() {
                if *peak == share {
                    refined = refined.without(agent);
                }
            }
        }
    }
    refined
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prefcore::grid::Grid;
    use crate::prefcore::preference::Preference;
    use crate::prefcore::rational::{rat, rat_int};

    fn peaked_profile(q: usize, peaks: &[Rational]) -> Profile {
        let grid = Grid::new(rat_int(1), q).unwrap();
        let prefs = peaks
            .iter()
            .map(|t| {
                let drop = if t == grid.point(0) {
                    grid.point(grid.resolution())
                } else {
                    grid.point(0)
                };
                Preference::peak_dip(&grid, t, drop).unwrap()
            })
            .collect();
        Profile::new(grid, prefs).unwrap()
    }

    #[test]
    fn status_quo_examples() {
        let p = peaked_profile(3, &[rat(1, 3), rat(1, 3), rat(1, 3)]);
        assert_eq!(AgreeableSelection::StatusQuo.select(&p), Coalition::grand(3));
        let p = peaked_profile(3, &[rat_int(0), rat_int(1), rat_int(1)]);
        assert_eq!(AgreeableSelection::StatusQuo.select(&p), Coalition::empty());
        let p = peaked_profile(4, &[rat(1, 4), rat(1, 4)]);
        assert_eq!(AgreeableSelection::StatusQuo.select(&p), Coalition::empty());
    }

    #[test]
    fn chain_validation() {
        let n = 3;
        assert!(NestedChain::new(
            n,
            alloc::vec![
                Coalition::grand(3),
                Coalition::from_members([1, 2]),
                Coalition::empty()
            ]
        )
        .is_ok());
        assert_eq!(
            NestedChain::new(n, alloc::vec![Coalition::from_members([0]), Coalition::empty()])
                .unwrap_err(),
            SelectionError::ChainMustStartAtGrand
        );
        assert_eq!(
            NestedChain::new(n, alloc::vec![Coalition::grand(3)]).unwrap_err(),
            SelectionError::ChainMustEndEmpty
        );
        assert_eq!(
            NestedChain::new(
                n,
                alloc::vec![
                    Coalition::grand(3),
                    Coalition::from_members([0, 1]),
                    Coalition::from_members([1, 2]),
                    Coalition::empty()
                ]
            )
            .unwrap_err(),
            SelectionError::ChainNotStrictlyDecreasing { position: 2 }
        );
    }

    #[test]
    fn two_element_chain_equals_status_quo() {
        let chain = NestedChain::new(2, alloc::vec![Coalition::grand(2), Coalition::empty()])
            .unwrap();
        let nested = AgreeableSelection::NestedChain(chain);
        for peaks in [
            [rat_int(0), rat_int(1)],
            [rat(1, 2), rat(1, 2)],
            [rat(1, 2), rat_int(1)],
            [rat_int(0), rat(1, 2)],
        ] {
            let p = peaked_profile(2, &peaks);
            assert_eq!(nested.select(&p), AgreeableSelection::StatusQuo.select(&p));
        }
    }

    #[test]
    fn chain_picks_first_agreeable() {
        let chain = NestedChain::new(
            3,
            alloc::vec![
                Coalition::grand(3),
                Coalition::from_members([1, 2]),
                Coalition::empty(),
            ],
        )
        .unwrap();
        let nested = AgreeableSelection::NestedChain(chain);
        let p = peaked_profile(6, &[rat(1, 2), rat(1, 2), rat(1, 6)]);
        assert_eq!(nested.select(&p), Coalition::from_members([1, 2]));
        let p = peaked_profile(6, &[rat(1, 3), rat(1, 3), rat(1, 3)]);
        assert_eq!(nested.select(&p), Coalition::grand(3));
    }

    #[test]
    fn refine_drops_equal_share_peaks() {
        let p = peaked_profile(3, &[rat(1, 3), rat(1, 3), rat(1, 3)]);
        assert_eq!(
            refine_selection(&p, Coalition::grand(3)),
            Coalition::empty()
        );
        let p = peaked_profile(6, &[rat(1, 2), rat(1, 2), rat(1, 6)]);
        assert_eq!(
            refine_selection(&p, Coalition::from_members([1, 2])),
            Coalition::from_members([1, 2])
        );
        let p = peaked_profile(3, &[rat(1, 3), rat(2, 3), rat_int(0)]);
        assert_eq!(
            refine_selection(&p, Coalition::from_members([0, 1])),
            Coalition::from_members([1])
        );
    }

    #[test]
    fn shape_dependent_reads_agent_one() {
        let grid = Grid::new(rat_int(1), 6).unwrap();
        // peaks (1/6, 1/2, 1/2): the agreeable set is exactly {∅, {1,2}, {1,3}}
        let hater = Preference::peak_dip(&grid, &rat(1, 6), &rat_int(1)).unwrap();
        let lover = Preference::peak_dip(&grid, &rat(1, 6), &rat_int(0)).unwrap();
        let mid = Preference::peak_dip(&grid, &rat(1, 2), &rat_int(0)).unwrap();
        let p = Profile::new(grid, alloc::vec![hater.clone(), mid.clone(), mid.clone()]).unwrap();
        // agent 1 ranks 0 above omega: picks {1,2}
        assert_eq!(
            AgreeableSelection::ShapeDependent.select(&p),
            Coalition::from_members([0, 1])
        );
        let p = p.replace_preference(0, lover);
        assert_eq!(
            AgreeableSelection::ShapeDependent.select(&p),
            Coalition::from_members([0, 2])
        );
    }

    #[test]
    fn shape_dependent_elsewhere_status_quo() {
        let p = peaked_profile(6, &[rat(1, 3), rat(1, 3), rat(1, 3)]);
        assert_eq!(
            AgreeableSelection::ShapeDependent.select(&p),
            Coalition::grand(3)
        );
        let p = peaked_profile(2, &[rat_int(0), rat_int(1)]);
        assert_eq!(
            AgreeableSelection::ShapeDependent.select(&p),
            Coalition::grand(2)
        );
    }

    #[test]
    fn omega_status_quo_examples() {
        let grid = Grid::new(rat_int(1), 4).unwrap();
        let w = EndowmentProfile::new(&rat_int(1), alloc::vec![rat(1, 2), rat(1, 2)]).unwrap();
        let mk = |peaks: &[Rational]| peaked_profile(4, peaks);
        let p = mk(&[rat(1, 4), rat(3, 4)]);
        assert_eq!(
            OmegaSelection::StatusQuo.select(&p, &w),
            Coalition::grand(2)
        );
        let p = mk(&[rat(1, 4), rat(1, 4)]);
        assert_eq!(
            OmegaSelection::StatusQuo.select(&p, &w),
            Coalition::empty()
        );
        // peaks equal to endowments: the grand coalition qualifies
        let p = mk(&[rat(1, 2), rat(1, 2)]);
        assert_eq!(
            OmegaSelection::StatusQuo.select(&p, &w),
            Coalition::grand(2)
        );
        let _ = grid;
    }

    #[test]
    fn omega_with_equal_split_matches_agreeable() {
        let w = EndowmentProfile::new(&rat_int(1), alloc::vec![rat(1, 2), rat(1, 2)]).unwrap();
        for peaks in [
            [rat_int(0), rat_int(1)],
            [rat(1, 2), rat(1, 2)],
            [rat(1, 4), rat(1, 4)],
            [rat(3, 4), rat(1, 2)],
        ] {
            let p = peaked_profile(4, &peaks);
            assert_eq!(
                OmegaSelection::StatusQuo.select(&p, &w),
                AgreeableSelection::StatusQuo.select(&p)
            );
        }
    }
}
