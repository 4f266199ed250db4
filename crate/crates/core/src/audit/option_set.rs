//! Option sets: every amount an agent can receive under a fixed report as
//! the opponents range over the catalog.
//!
//! Two routes are provided. The brute-force route evaluates the rule against
//! opponent combinations — over preference classes when the rule's verified
//! signature permits, or over the raw catalog. The closed-form route is the
//! two-point formula for selection-induced rules: the own peak and the equal
//! share when the peak is feasible, the equal share alone otherwise. Audits
//! assert exact set equality between the two.

use alloc::vec::Vec;
use core::fmt;

use crate::prefcore::preference::Preference;
use crate::prefcore::profile::Profile;
use crate::prefcore::rational::{rat_int, Rational};
use crate::rules::{Rule, RuleError};

use super::domain::{AuditDomain, ClassIndex, Odometer};

/// A sorted, duplicate-free set of receivable amounts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptionSet {
    values: Vec<Rational>,
}

impl OptionSet {
    pub fn from_values<I: IntoIterator<Item = Rational>>(values: I) -> Self {
        let mut values: Vec<Rational> = values.into_iter().collect();
        values.sort_unstable();
        values.dedup();
        OptionSet { values }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.values.binary_search(x).is_ok()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl fmt::Display for OptionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.values.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", crate::prefcore::rational::format_rational(v))?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OptionSetError {
    /// The opponent space exceeds the bound.
    TooLarge { combinations: u128, bound: u128 },
    Rule(RuleError),
}

impl fmt::Display for OptionSetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptionSetError::TooLarge { combinations, bound } => write!(
                f,
                "option-set enumeration over {combinations} opponent combinations exceeds {bound}"
            ),
            OptionSetError::Rule(e) => write!(f, "{e}"),
        }
    }
}

/// Default cap on opponent combinations.
pub const DEFAULT_OPPONENT_BOUND: u128 = 5_000_000;

/// Brute-force option set over opponent preference classes. Exact for any
/// rule whose profile signature has been verified for this domain; the raw
/// variant below checks the reduction itself at small sizes.
pub fn option_set_bruteforce(
    rule: &Rule,
    agent: usize,
    pref: &Preference,
    domain: &AuditDomain,
) -> Result<OptionSet, OptionSetError> {
    let classes = ClassIndex::build(domain, &rule.comparisons(domain.grid(), domain.n()));
    option_set_over_classes(rule, agent, pref, domain, &classes, DEFAULT_OPPONENT_BOUND)
}

pub fn option_set_over_classes(
    rule: &Rule,
    agent: usize,
    pref: &Preference,
    domain: &AuditDomain,
    classes: &ClassIndex,
    bound: u128,
) -> Result<OptionSet, OptionSetError> {
    let n = domain.n();
    let combos = (classes.class_count() as u128).pow((n - 1) as u32);
    if combos > bound {
        return Err(OptionSetError::TooLarge {
            combinations: combos,
            bound,
        });
    }
    let mut values = Vec::new();
    for tuple in Odometer::new(classes.class_count(), n - 1) {
        let profile = profile_with_agent(domain, agent, pref, |slot| {
            classes.representative(tuple[slot])
        });
        let allocation = rule.evaluate(&profile).map_err(OptionSetError::Rule)?;
        values.push(allocation.amount(agent).clone());
    }
    Ok(OptionSet::from_values(values))
}

/// Literal enumeration of `catalog^(n-1)` opponent profiles, no class
/// reduction. The independent check on the classed route.
pub fn option_set_bruteforce_raw(
    rule: &Rule,
    agent: usize,
    pref: &Preference,
    domain: &AuditDomain,
    bound: u128,
) -> Result<OptionSet, OptionSetError> {
    let n = domain.n();
    let m = domain.preferences().len();
    let combos = (m as u128).pow((n - 1) as u32);
    if combos > bound {
        return Err(OptionSetError::TooLarge {
            combinations: combos,
            bound,
        });
    }
    let mut values = Vec::new();
    for tuple in Odometer::new(m, n - 1) {
        let profile = profile_with_agent(domain, agent, pref, |slot| tuple[slot]);
        let allocation = rule.evaluate(&profile).map_err(OptionSetError::Rule)?;
        values.push(allocation.amount(agent).clone());
    }
    Ok(OptionSet::from_values(values))
}

/// Builds a profile with `pref` in the agent's slot and catalog preferences
/// (chosen by `opponent`, indexed by opponent slot) everywhere else.
pub(crate) fn profile_with_agent<F: Fn(usize) -> usize>(
    domain: &AuditDomain,
    agent: usize,
    pref: &Preference,
    opponent: F,
) -> Profile {
    let n = domain.n();
    let mut prefs = Vec::with_capacity(n);
    let mut slot = 0usize;
    for position in 0..n {
        if position == agent {
            prefs.push(pref.clone());
        } else {
            prefs.push(domain.preferences()[opponent(slot)].clone());
            slot += 1;
        }
    }
    let profile =
        Profile::new(domain.grid().clone(), prefs).expect("catalog preferences fit the grid");
    match domain.endowments() {
        Some(w) => profile
            .with_endowments(w.clone())
            .expect("endowments validated at domain construction"),
        None => profile,
    }
}

/// The two-point option-set formula for selection-induced agreeable rules:
/// `{t, omega/n}` when the peak is within the endowment, `{omega/n}` alone
/// otherwise.
pub fn option_set_agreeable_closed_form(
    pref: &Preference,
    omega: &Rational,
    n: usize,
) -> OptionSet {
    let share = omega / rat_int(n as i64);
    match pref.peak().within_omega() {
        Some(t) => OptionSet::from_values([t.clone(), share]),
        None => OptionSet::from_values([share]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalitions::selection::AgreeableSelection;
    use crate::prefcore::catalog::CatalogFamily;
    use crate::prefcore::grid::Grid;
    use crate::prefcore::preference::BeyondPeak;
    use crate::prefcore::rational::rat;

    fn domain22() -> AuditDomain {
        let grid = Grid::new(rat_int(1), 2).unwrap();
        AuditDomain::new(grid, 2, CatalogFamily::WeakOrders).unwrap()
    }

    #[test]
    fn status_quo_option_set_peak_zero() {
        let d = domain22();
        let rule = Rule::agreeable(AgreeableSelection::StatusQuo);
        let pref = Preference::peak_dip(d.grid(), &rat_int(0), &rat_int(1)).unwrap();
        let set = option_set_bruteforce(&rule, 0, &pref, &d).unwrap();
        assert_eq!(set.values(), &[rat_int(0), rat(1, 2)]);
    }

    #[test]
    fn status_quo_option_set_beyond_peak() {
        let grid = Grid::new(rat_int(1), 2).unwrap();
        let d = AuditDomain::new(grid.clone(), 2, CatalogFamily::WeakOrdersBeyond).unwrap();
        let rule = Rule::agreeable(AgreeableSelection::StatusQuo);
        let pref = Preference::new(
            &grid,
            alloc::vec![rat_int(0), rat_int(1), rat_int(2)],
            Some(BeyondPeak::Finite(rat_int(2))),
        )
        .unwrap();
        let set = option_set_bruteforce(&rule, 0, &pref, &d).unwrap();
        assert_eq!(set.values(), &[rat(1, 2)]);
    }

    #[test]
    fn equal_division_option_set_is_singleton() {
        let d = domain22();
        let rule = Rule::equal_division();
        for pref in d.preferences() {
            let set = option_set_bruteforce(&rule, 1, pref, &d).unwrap();
            assert_eq!(set.values(), &[rat(1, 2)]);
        }
    }

    #[test]
    fn classed_matches_raw_enumeration() {
        let d = domain22();
        let rules = [
            Rule::agreeable(AgreeableSelection::StatusQuo),
            Rule::uniform(),
            Rule::boundary(),
            Rule::conditional_zero(),
        ];
        for rule in &rules {
            for (k, pref) in d.preferences().iter().enumerate() {
                for agent in 0..2 {
                    let classed = option_set_bruteforce(rule, agent, pref, &d).unwrap();
                    let raw =
                        option_set_bruteforce_raw(rule, agent, pref, &d, 1_000_000).unwrap();
                    assert_eq!(classed, raw, "rule {} pref {k} agent {agent}", rule.name());
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let grid = Grid::new(rat_int(1), 4).unwrap();
        let pref = Preference::peak_dip(&grid, &rat(1, 4), &rat_int(1)).unwrap();
        let set = option_set_agreeable_closed_form(&pref, &rat_int(1), 2);
        assert_eq!(set.values(), &[rat(1, 4), rat(1, 2)]);

        let pref = Preference::peak_dip(&grid, &rat(1, 2), &rat_int(1)).unwrap();
        let set = option_set_agreeable_closed_form(&pref, &rat_int(1), 2);
        assert_eq!(set.values(), &[rat(1, 2)]);

        let pref = Preference::new(
            &grid,
            alloc::vec![rat_int(0); 5],
            Some(BeyondPeak::Finite(rat_int(2))),
        )
        .unwrap();
        let set = option_set_agreeable_closed_form(&pref, &rat_int(1), 3);
        assert_eq!(set.values(), &[rat(1, 3)]);
    }

    #[test]
    fn bound_is_enforced() {
        let d = domain22();
        let rule = Rule::uniform();
        let pref = d.preferences()[0].clone();
        assert!(matches!(
            option_set_bruteforce_raw(&rule, 0, &pref, &d, 2),
            Err(OptionSetError::TooLarge { .. })
        ));
    }
}
