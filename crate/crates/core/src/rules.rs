//! The rule catalogue.
//!
//! A rule maps every profile to a feasible allocation. Selection-induced
//! agreeable rules give selected members their peaks and everyone else the
//! equal share; reallocation rules do the same against individual endowments.
//! The uniform rule water-fills exactly; the equal-division, boundary and
//! conditional-zero rules are small examples that each give up exactly one
//! of the axioms characterizing agreeable rules.
//!
//! Metadata flags (`own_peak_only`, `peaks_only`) are claims: the audit
//! module verifies them, it does not trust them.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::Zero;

use crate::audit::search::RuleTable;
use crate::coalitions::coalition::Coalition;
use crate::coalitions::selection::{AgreeableSelection, OmegaSelection};
use crate::prefcore::grid::Grid;
use crate::prefcore::preference::Peak;
use crate::prefcore::profile::{Allocation, Profile};
use crate::prefcore::rational::{rat_int, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleError {
    /// Reallocation rules need a profile with individual endowments.
    NeedsEndowments,
    /// Rule tables are defined only for peaks on the grid.
    OutsideTableDomain { agent: usize },
    /// A custom selection failed the selection conditions.
    InvalidSelection(String),
}

impl fmt::Display for RuleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleError::NeedsEndowments => {
                write!(f, "this rule needs a profile with individual endowments")
            }
            RuleError::OutsideTableDomain { agent } => write!(
                f,
                "rule table undefined: peak of agent {} is off the grid",
                agent + 1
            ),
            RuleError::InvalidSelection(why) => write!(f, "invalid selection: {why}"),
        }
    }
}

/// Claims about a rule, verified (not trusted) by audits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleMetadata {
    pub own_peak_only: bool,
    pub peaks_only: bool,
    pub needs_endowments: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleKind {
    /// Selected members get their peaks, everyone else the equal share.
    Agreeable(AgreeableSelection),
    /// Water-filling: `min(t_i, lambda)` under excess demand,
    /// `max(t_i, lambda)` under excess supply.
    Uniform,
    /// Everyone gets the equal share, regardless of peaks.
    EqualDivision,
    /// Peaks at unanimity, otherwise everything to agent 1.
    Boundary,
    /// Peaks at unanimity; zero to agent 1 when the others' peaks exhaust
    /// the endowment and agent 1 strictly prefers 0 to the equal share;
    /// otherwise equal division. Reads agent 1's preference shape.
    ConditionalZero,
    /// Selected members get peaks, everyone else their endowment.
    Reallocation(OmegaSelection),
    /// A finite peaks-only rule encoded as a table (search witness replay).
    Table(RuleTable),
}

/// An allotment rule with a registry name and verifiable metadata claims.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    name: String,
    kind: RuleKind,
}

impl Rule {
    /// The rule induced by an agreeable selection. The shipped selections
    /// satisfy the selection conditions by construction; validate custom
    /// ones with [`crate::coalitions::checks::check_selection_axioms`]
    /// before wrapping them.
    pub fn agreeable(selection: AgreeableSelection) -> Rule {
        Rule {
            name: selection.name(),
            kind: RuleKind::Agreeable(selection),
        }
    }

    pub fn uniform() -> Rule {
        Rule {
            name: String::from("uniform"),
            kind: RuleKind::Uniform,
        }
    }

    pub fn equal_division() -> Rule {
        Rule {
            name: String::from("equal-division"),
            kind: RuleKind::EqualDivision,
        }
    }

    pub fn boundary() -> Rule {
        Rule {
            name: String::from("phi-star"),
            kind: RuleKind::Boundary,
        }
    }

    pub fn conditional_zero() -> Rule {
        Rule {
            name: String::from("phi-hat"),
            kind: RuleKind::ConditionalZero,
        }
    }

    pub fn reallocation(selection: OmegaSelection) -> Rule {
        let mut name = String::from("realloc:");
        name.push_str(&selection.name());
        Rule {
            name,
            kind: RuleKind::Reallocation(selection),
        }
    }

    pub fn from_table(table: RuleTable) -> Rule {
        Rule {
            name: String::from("rule-table"),
            kind: RuleKind::Table(table),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &RuleKind {
        &self.kind
    }

    pub fn metadata(&self) -> RuleMetadata {
        match &self.kind {
            RuleKind::Agreeable(sel) => RuleMetadata {
                own_peak_only: true,
                peaks_only: !matches!(sel, AgreeableSelection::ShapeDependent),
                needs_endowments: false,
            },
            RuleKind::Uniform | RuleKind::EqualDivision | RuleKind::Boundary => RuleMetadata {
                own_peak_only: true,
                peaks_only: true,
                needs_endowments: false,
            },
            RuleKind::ConditionalZero => RuleMetadata {
                own_peak_only: false,
                peaks_only: false,
                needs_endowments: false,
            },
            RuleKind::Reallocation(_) => RuleMetadata {
                own_peak_only: true,
                peaks_only: true,
                needs_endowments: true,
            },
            RuleKind::Table(_) => RuleMetadata {
                own_peak_only: true,
                peaks_only: true,
                needs_endowments: false,
            },
        }
    }

    /// Pairs of amounts whose preference comparison the rule may consult
    /// beyond peaks. Audits partition the catalog by peak plus exactly these
    /// comparisons; the partition's soundness is itself verified.
    pub fn comparisons(&self, grid: &Grid, n: usize) -> Vec<(Rational, Rational)> {
        match &self.kind {
            RuleKind::Agreeable(sel) => sel.comparisons(grid),
            RuleKind::ConditionalZero => {
                alloc::vec![(Rational::zero(), grid.equal_share(n))]
            }
            _ => Vec::new(),
        }
    }

    /// Evaluates the rule; the output always sums exactly to the endowment.
    pub fn evaluate(&self, profile: &Profile) -> Result<Allocation, RuleError> {
        let grid = profile.grid();
        let n = profile.n();
        let omega = grid.omega();
        let amounts: Vec<Rational> = match &self.kind {
            RuleKind::Agreeable(sel) => {
                let selected = sel.select(profile);
                peaks_or_fill(profile, selected, &grid.equal_share(n))
            }
            RuleKind::Uniform => uniform_allocation(profile),
            RuleKind::EqualDivision => alloc::vec![grid.equal_share(n); n],
            RuleKind::Boundary => {
                if unanimity_holds(profile) {
                    peak_vector(profile)
                } else {
                    let mut v = alloc::vec![Rational::zero(); n];
                    v[0] = omega.clone();
                    v
                }
            }
            RuleKind::ConditionalZero => {
                if unanimity_holds(profile) {
                    peak_vector(profile)
                } else if others_exhaust_endowment(profile)
                    && prefers_zero_to_share(profile)
                {
                    let mut v = peak_vector_or_zero(profile);
                    v[0] = Rational::zero();
                    v
                } else {
                    alloc::vec![grid.equal_share(n); n]
                }
            }
            RuleKind::Reallocation(sel) => {
                let endowments = profile.endowments().ok_or(RuleError::NeedsEndowments)?;
                let selected = sel.select(profile, endowments);
                (0..n)
                    .map(|i| {
                        if selected.contains(i) {
                            profile
                                .preference(i)
                                .peak()
                                .finite_value()
                                .expect("selected members have finite peaks")
                                .clone()
                        } else {
                            endowments.endowment(i).clone()
                        }
                    })
                    .collect()
            }
            RuleKind::Table(table) => {
                let mut indices = Vec::with_capacity(n);
                for (agent, pref) in profile.preferences().iter().enumerate() {
                    let index = pref
                        .peak_index()
                        .ok_or(RuleError::OutsideTableDomain { agent })?;
                    indices.push(index);
                }
                table.allocation_at(&indices)
            }
        };
        Ok(Allocation::new(omega, amounts).expect("rules produce feasible allocations"))
    }
}

fn peak_vector(profile: &Profile) -> Vec<Rational> {
    profile
        .preferences()
        .iter()
        .map(|p| {
            p.peak()
                .finite_value()
                .expect("unanimity profiles have finite peaks")
                .clone()
        })
        .collect()
}

/// Peak vector with beyond peaks mapped to zero; only used for positions
/// that are overwritten or known finite.
fn peak_vector_or_zero(profile: &Profile) -> Vec<Rational> {
    profile
        .preferences()
        .iter()
        .map(|p| match p.peak().within_omega() {
            Some(v) => v.clone(),
            None => Rational::zero(),
        })
        .collect()
}

fn peaks_or_fill(profile: &Profile, selected: Coalition, fill: &Rational) -> Vec<Rational> {
    (0..profile.n())
        .map(|i| {
            if selected.contains(i) {
                profile
                    .preference(i)
                    .peak()
                    .finite_value()
                    .expect("agreeable coalition members have finite peaks")
                    .clone()
            } else {
                fill.clone()
            }
        })
        .collect()
}

/// True when the peaks are all finite and sum exactly to the endowment.
fn unanimity_holds(profile: &Profile) -> bool {
    let mut sum = Rational::zero();
    for pref in profile.preferences() {
        match pref.peak() {
            Peak::Within(v) => sum += v,
            // a beyond peak exceeds the endowment on its own
            Peak::Beyond(_) => return false,
        }
    }
    sum == *profile.grid().omega()
}

/// True when the peaks of agents 2..n are finite and sum exactly to omega.
fn others_exhaust_endowment(profile: &Profile) -> bool {
    let mut sum = Rational::zero();
    for pref in &profile.preferences()[1..] {
        match pref.peak().within_omega() {
            Some(v) => sum += v,
            None => return false,
        }
    }
    sum == *profile.grid().omega()
}

fn prefers_zero_to_share(profile: &Profile) -> bool {
    let grid = profile.grid();
    let share = grid.equal_share(profile.n());
    profile
        .preference(0)
        .compare(grid, &Rational::zero(), &share)
        .expect("0 and the equal share lie in the domain")
        == Ordering::Greater
}

/// Exact water-filling. Any peak beyond the endowment (finite or infinite)
/// forces the excess-demand side and is never clipped, because the water
/// level cannot exceed the endowment.
fn uniform_allocation(profile: &Profile) -> Vec<Rational> {
    let grid = profile.grid();
    let omega = grid.omega();
    let n = profile.n();

    let mut finite_sum = Rational::zero();
    let mut any_beyond = false;
    let mut finite_peaks: Vec<Option<Rational>> = Vec::with_capacity(n);
    for pref in profile.preferences() {
        match pref.peak() {
            Peak::Within(v) => {
                finite_sum += v;
                finite_peaks.push(Some(v.clone()));
            }
            Peak::Beyond(_) => {
                any_beyond = true;
                finite_peaks.push(None);
            }
        }
    }

    let excess_demand = any_beyond || finite_sum >= *omega;
    if excess_demand {
        // candidates that can clip below the level, ascending
        let mut clippable: Vec<Rational> = finite_peaks
            .iter()
            .flatten()
            .filter(|v| *v <= omega)
            .cloned()
            .collect();
        clippable.sort_unstable();
        let unclippable = n - clippable.len();
        let lambda = demand_level(omega, &clippable, unclippable, n);
        finite_peaks
            .iter()
            .map(|peak| match peak {
                Some(t) if *t <= lambda => t.clone(),
                _ => lambda.clone(),
            })
            .collect()
    } else {
        let mut peaks: Vec<Rational> = finite_peaks
            .into_iter()
            .map(|p| p.expect("supply side has finite peaks"))
            .collect();
        let original = peaks.clone();
        peaks.sort_unstable_by(|a, b| b.cmp(a));
        let lambda = supply_level(omega, &peaks, n);
        original
            .into_iter()
            .map(|t| if t >= lambda { t } else { lambda.clone() })
            .collect()
    }
}

/// Solves `sum_i min(t_i, lambda) = omega` for the unique nonnegative level.
fn demand_level(omega: &Rational, ascending: &[Rational], unclippable: usize, n: usize) -> Rational {
    let mut prefix = Rational::zero();
    // m peaks lie at or below the level and keep their own value
    for m in 0..=ascending.len() {
        let receivers = n - m;
        if receivers == 0 {
            break;
        }
        let lambda = (omega - &prefix) / rat_int(receivers as i64);
        let lower_ok = m == 0 || ascending[m - 1] <= lambda;
        let upper_ok = m == ascending.len() || lambda <= ascending[m];
        if lower_ok && upper_ok && lambda >= Rational::zero() {
            return lambda;
        }
        if m < ascending.len() {
            prefix += &ascending[m];
        }
    }
    let _ = unclippable;
    unreachable!("excess demand always admits a water level in [0, omega]")
}

/// Solves `sum_i max(t_i, lambda) = omega` for the unique nonnegative level.
fn supply_level(omega: &Rational, descending: &[Rational], n: usize) -> Rational {
    let mut prefix = Rational::zero();
    // m peaks lie at or above the level and keep their own value
    for m in 0..n {
        let receivers = n - m;
        let lambda = (omega - &prefix) / rat_int(receivers as i64);
        let lower_ok = m == 0 || descending[m - 1] >= lambda;
        let upper_ok = lambda >= descending[m];
        if lower_ok && upper_ok {
            return lambda;
        }
        prefix += &descending[m];
    }
    unreachable!("excess supply always admits a water level in (0, omega]")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalitions::selection::NestedChain;
    use crate::prefcore::preference::{BeyondPeak, Preference};
    use crate::prefcore::rational::rat;

    fn grid(q: usize) -> Grid {
        Grid::new(rat_int(1), q).unwrap()
    }

    fn peaked(q: usize, peaks: &[Rational]) -> Profile {
        let g = grid(q);
        let prefs = peaks
            .iter()
            .map(|t| {
                let drop = if t == g.point(0) {
                    g.point(g.resolution())
                } else {
                    g.point(0)
                };
                Preference::peak_dip(&g, t, drop).unwrap()
            })
            .collect();
        Profile::new(g, prefs).unwrap()
    }

    fn amounts(a: &Allocation) -> Vec<Rational> {
        a.amounts().to_vec()
    }

    #[test]
    fn status_quo_unanimity_echoes_peaks() {
        let rule = Rule::agreeable(AgreeableSelection::StatusQuo);
        let p = peaked(6, &[rat(1, 3), rat(1, 2), rat(1, 6)]);
        assert_eq!(
            amounts(&rule.evaluate(&p).unwrap()),
            alloc::vec![rat(1, 3), rat(1, 2), rat(1, 6)]
        );
    }

    #[test]
    fn status_quo_disagreement_gives_equal_division() {
        let rule = Rule::agreeable(AgreeableSelection::StatusQuo);
        let p = peaked(3, &[rat_int(0), rat_int(1), rat_int(1)]);
        assert_eq!(
            amounts(&rule.evaluate(&p).unwrap()),
            alloc::vec![rat(1, 3), rat(1, 3), rat(1, 3)]
        );
    }

    #[test]
    fn nested_chain_rule_example() {
        let chain = NestedChain::new(
            3,
            alloc::vec![
                Coalition::grand(3),
                Coalition::from_members([1, 2]),
                Coalition::empty(),
            ],
        )
        .unwrap();
        let rule = Rule::agreeable(AgreeableSelection::NestedChain(chain));
        let p = peaked(6, &[rat(1, 2), rat(1, 2), rat(1, 6)]);
        assert_eq!(
            amounts(&rule.evaluate(&p).unwrap()),
            alloc::vec![rat(1, 3), rat(1, 2), rat(1, 6)]
        );
    }

    #[test]
    fn uniform_examples() {
        let u = Rule::uniform();
        let p = peaked(3, &[rat_int(0), rat_int(1), rat_int(1)]);
        assert_eq!(
            amounts(&u.evaluate(&p).unwrap()),
            alloc::vec![rat_int(0), rat(1, 2), rat(1, 2)]
        );
        // unanimity: peaks echoed
        let p = peaked(6, &[rat(1, 3), rat(1, 2), rat(1, 6)]);
        assert_eq!(
            amounts(&u.evaluate(&p).unwrap()),
            alloc::vec![rat(1, 3), rat(1, 2), rat(1, 6)]
        );
        // excess demand split between two high peaks
        let p = peaked(4, &[rat(3, 4), rat(3, 4)]);
        assert_eq!(
            amounts(&u.evaluate(&p).unwrap()),
            alloc::vec![rat(1, 2), rat(1, 2)]
        );
    }

    #[test]
    fn uniform_off_grid_level() {
        // peaks (2/3, 1, 0) at q=3: the level is 1/2, off the grid
        let p = peaked(3, &[rat(2, 3), rat_int(1), rat_int(0)]);
        let u = Rule::uniform();
        assert_eq!(
            amounts(&u.evaluate(&p).unwrap()),
            alloc::vec![rat(1, 2), rat(1, 2), rat_int(0)]
        );
    }

    #[test]
    fn uniform_beyond_peaks_force_demand_side() {
        let g = grid(2);
        let beyond = Preference::new(
            &g,
            alloc::vec![rat_int(0), rat_int(1), rat_int(2)],
            Some(BeyondPeak::Finite(rat_int(2))),
        )
        .unwrap();
        let zero = Preference::peak_dip(&g, &rat_int(0), &rat_int(1)).unwrap();
        let p = Profile::new(g, alloc::vec![beyond, zero]).unwrap();
        let u = Rule::uniform();
        assert_eq!(
            amounts(&u.evaluate(&p).unwrap()),
            alloc::vec![rat_int(1), rat_int(0)]
        );
    }

    #[test]
    fn uniform_order_preserving_in_peaks() {
        let u = Rule::uniform();
        for peaks in [
            [rat_int(0), rat(1, 4), rat(3, 4), rat_int(1)],
            [rat(1, 4), rat(1, 4), rat(1, 2), rat_int(1)],
            [rat_int(1), rat(3, 4), rat(1, 2), rat(1, 4)],
        ] {
            let p = peaked(4, &peaks);
            let x = u.evaluate(&p).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    if peaks[i] <= peaks[j] {
                        assert!(x.amount(i) <= x.amount(j));
                    }
                }
            }
        }
    }

    #[test]
    fn equal_division_ignores_peaks() {
        let rule = Rule::equal_division();
        let p = peaked(2, &[rat_int(0), rat_int(1)]);
        assert_eq!(
            amounts(&rule.evaluate(&p).unwrap()),
            alloc::vec![rat(1, 2), rat(1, 2)]
        );
        let p = peaked(4, &[rat(1, 4), rat(3, 4), rat(1, 2), rat(1, 2)]);
        assert_eq!(
            amounts(&rule.evaluate(&p).unwrap()),
            alloc::vec![rat(1, 4); 4]
        );
    }

    #[test]
    fn boundary_rule_examples() {
        let rule = Rule::boundary();
        let p = peaked(3, &[rat(1, 3), rat(1, 3), rat(1, 3)]);
        assert_eq!(
            amounts(&rule.evaluate(&p).unwrap()),
            alloc::vec![rat(1, 3); 3]
        );
        let p = peaked(3, &[rat_int(0), rat_int(1), rat_int(1)]);
        assert_eq!(
            amounts(&rule.evaluate(&p).unwrap()),
            alloc::vec![rat_int(1), rat_int(0), rat_int(0)]
        );
        let p = peaked(4, &[rat(1, 2), rat(1, 4)]);
        assert_eq!(
            amounts(&rule.evaluate(&p).unwrap()),
            alloc::vec![rat_int(1), rat_int(0)]
        );
    }

    #[test]
    fn conditional_zero_branches() {
        let g = grid(2);
        let rule = Rule::conditional_zero();
        // unanimity branch
        let p = peaked(4, &[rat(1, 4), rat(3, 4)]);
        assert_eq!(
            amounts(&rule.evaluate(&p).unwrap()),
            alloc::vec![rat(1, 4), rat(3, 4)]
        );
        // second branch: t_2 = omega and agent 1 strictly prefers 0 to 1/2
        let hater = Preference::new(
            &g,
            alloc::vec![rat_int(1), rat_int(0), rat_int(2)],
            None,
        )
        .unwrap();
        let top = Preference::peak_dip(&g, &rat_int(1), &rat_int(0)).unwrap();
        let p = Profile::new(g.clone(), alloc::vec![hater, top.clone()]).unwrap();
        assert_eq!(
            amounts(&rule.evaluate(&p).unwrap()),
            alloc::vec![rat_int(0), rat_int(1)]
        );
        // third branch: same peaks, agent 1 prefers 1/2 to 0
        let liker = Preference::new(
            &g,
            alloc::vec![rat_int(0), rat_int(1), rat_int(2)],
            None,
        )
        .unwrap();
        let p = Profile::new(g, alloc::vec![liker, top]).unwrap();
        assert_eq!(
            amounts(&rule.evaluate(&p).unwrap()),
            alloc::vec![rat(1, 2), rat(1, 2)]
        );
    }

    #[test]
    fn reallocation_examples() {
        use crate::prefcore::profile::EndowmentProfile;
        let rule = Rule::reallocation(OmegaSelection::StatusQuo);
        let w = EndowmentProfile::new(&rat_int(1), alloc::vec![rat(1, 2), rat(1, 2)]).unwrap();
        // peaks equal endowments
        let p = peaked(4, &[rat(1, 2), rat(1, 2)])
            .with_endowments(w.clone())
            .unwrap();
        assert_eq!(
            amounts(&rule.evaluate(&p).unwrap()),
            alloc::vec![rat(1, 2), rat(1, 2)]
        );
        // peak sums match endowment sums: peaks granted
        let p = peaked(4, &[rat(1, 4), rat(3, 4)])
            .with_endowments(w.clone())
            .unwrap();
        assert_eq!(
            amounts(&rule.evaluate(&p).unwrap()),
            alloc::vec![rat(1, 4), rat(3, 4)]
        );
        // only the empty coalition qualifies: endowments returned
        let p = peaked(4, &[rat(1, 4), rat(1, 4)])
            .with_endowments(w)
            .unwrap();
        assert_eq!(
            amounts(&rule.evaluate(&p).unwrap()),
            alloc::vec![rat(1, 2), rat(1, 2)]
        );
    }

    #[test]
    fn reallocation_requires_endowments() {
        let rule = Rule::reallocation(OmegaSelection::StatusQuo);
        let p = peaked(4, &[rat(1, 4), rat(1, 4)]);
        assert_eq!(rule.evaluate(&p).unwrap_err(), RuleError::NeedsEndowments);
    }

    #[test]
    fn all_rules_feasible_on_small_profiles() {
        use crate::prefcore::profile::EndowmentProfile;
        let rules = [
            Rule::agreeable(AgreeableSelection::StatusQuo),
            Rule::agreeable(AgreeableSelection::ShapeDependent),
            Rule::uniform(),
            Rule::equal_division(),
            Rule::boundary(),
            Rule::conditional_zero(),
        ];
        for peaks in [
            [rat_int(0), rat_int(0)],
            [rat_int(0), rat_int(1)],
            [rat(1, 2), rat_int(1)],
            [rat_int(1), rat_int(1)],
        ] {
            let g = grid(2);
            let p = peaked(2, &peaks)
                .with_endowments(EndowmentProfile::equal_split(&g, 2))
                .unwrap();
            for rule in &rules {
                let x = rule.evaluate(&p).unwrap();
                let sum: Rational = x.amounts().iter().sum();
                assert_eq!(sum, rat_int(1), "rule {} infeasible", rule.name());
            }
        }
    }

    #[test]
    fn equal_split_reallocation_matches_agreeable() {
        use crate::prefcore::profile::EndowmentProfile;
        let realloc = Rule::reallocation(OmegaSelection::StatusQuo);
        let agreeable = Rule::agreeable(AgreeableSelection::StatusQuo);
        for peaks in [
            [rat_int(0), rat_int(1)],
            [rat(1, 2), rat(1, 2)],
            [rat(1, 4), rat(3, 4)],
            [rat(3, 4), rat(3, 4)],
        ] {
            let g = grid(4);
            let p = peaked(4, &peaks)
                .with_endowments(EndowmentProfile::equal_split(&g, 2))
                .unwrap();
            assert_eq!(
                realloc.evaluate(&p).unwrap(),
                agreeable.evaluate(&p).unwrap()
            );
        }
    }
}
