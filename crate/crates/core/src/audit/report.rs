//! Audit verdicts with replayable witnesses.
//!
//! Every failing check carries a witness holding complete profiles, so the
//! violation can be re-established standalone: [`replay_witness`] re-runs the
//! rule on the witness data and re-checks the violated predicate, with no
//! reference to the audit that produced it.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::coalitions::coalition::Coalition;
use crate::prefcore::catalog::CatalogId;
use crate::prefcore::preference::Preference;
use crate::prefcore::profile::{Allocation, Profile};
use crate::prefcore::rational::Rational;
use crate::rules::Rule;

use super::axioms::Axiom;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail => write!(f, "fail"),
        }
    }
}

/// What a report checked: a rule axiom or one of the selection conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckId {
    Axiom(Axiom),
    /// Selection condition (i): the chosen coalition is admissible.
    SelectionAdmissible,
    /// Selection condition (ii): own same-peak changes never change own
    /// membership.
    SelectionOwnPeak,
    /// Selection condition (iii): the grand coalition is chosen whenever it
    /// is admissible.
    SelectionGrandForced,
    /// The refined selection depends on the profile only through peaks.
    SelectionPeaksOnly,
    /// Outsiders' reports never move the refined selection.
    SelectionNonBossy,
    /// Selected members' peaks are never overtaken by unselected agents.
    SelectionPop,
}

impl CheckId {
    pub fn id(&self) -> &'static str {
        match self {
            CheckId::Axiom(a) => a.id(),
            CheckId::SelectionAdmissible => "selection-admissible",
            CheckId::SelectionOwnPeak => "selection-own-peak",
            CheckId::SelectionGrandForced => "selection-grand-forced",
            CheckId::SelectionPeaksOnly => "selection-peaks-only",
            CheckId::SelectionNonBossy => "selection-non-bossy",
            CheckId::SelectionPop => "selection-pop",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Replayable evidence of a violation. Profiles are stored whole.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Peaks sum to the endowment but some agent missed their peak.
    Unanimity { profile: Profile, allocation: Allocation },
    /// Some feasible grid allocation weakly improves on the rule's output
    /// and strictly improves for at least one agent.
    Efficiency {
        profile: Profile,
        allocation: Allocation,
        dominating: Allocation,
    },
    /// A same-peak change of the agent's own preference moved their amount.
    OwnPeakOnly {
        profile: Profile,
        agent: usize,
        replacement: Preference,
        before: Rational,
        after: Rational,
    },
    /// Two profiles with identical peak vectors map to different allocations.
    PeaksOnly {
        profile: Profile,
        replacement_profile: Profile,
        before: Allocation,
        after: Allocation,
    },
    /// The agent strictly prefers the equal share to their amount.
    EqualDivisionLowerBound {
        profile: Profile,
        agent: usize,
        amount: Rational,
    },
    /// The agent's peak is the equal share but their amount is not.
    EqualDivisionGuarantee {
        profile: Profile,
        agent: usize,
        amount: Rational,
    },
    /// A misreport strictly improves on truth-telling against the stored
    /// opponents (the profile holds the truthful preference).
    Manipulation {
        profile: Profile,
        agent: usize,
        misreport: Preference,
        truthful_amount: Rational,
        misreport_amount: Rational,
    },
    /// A manipulation each of whose possible outcomes strictly beats some
    /// possible truth-telling outcome.
    ObviousManipulation {
        profile: Profile,
        agent: usize,
        misreport: Preference,
        truthful_amount: Rational,
        misreport_amount: Rational,
        truth_options: Vec<Rational>,
        misreport_options: Vec<Rational>,
    },
    /// A unilateral change that leaves the deviator's amount intact but
    /// moves someone else's.
    Bossiness {
        profile: Profile,
        agent: usize,
        replacement: Preference,
        before: Allocation,
        after: Allocation,
    },
    /// The agent receives their peak at every catalog profile.
    Dictator { agent: usize },
    /// The agent's peak equals their endowment but their amount does not.
    EndowmentsGuarantee {
        profile: Profile,
        agent: usize,
        amount: Rational,
        endowment: Rational,
    },
    /// A lower-peak agent received strictly more than a higher-peak agent.
    PeakOrderPreservation {
        profile: Profile,
        lower: usize,
        higher: usize,
        allocation: Allocation,
    },
    /// The selection chose a coalition outside the admissible set.
    SelectionNotAdmissible { profile: Profile, selected: Coalition },
    /// An own same-peak change moved the agent's membership.
    SelectionMembershipChanged {
        profile: Profile,
        agent: usize,
        replacement: Preference,
        before: Coalition,
        after: Coalition,
    },
    /// The grand coalition was admissible but not chosen.
    SelectionGrandNotChosen { profile: Profile, selected: Coalition },
    /// Two same-peak profiles produced different refined selections.
    SelectionNotPeaksOnly {
        profile: Profile,
        replacement_profile: Profile,
        before: Coalition,
        after: Coalition,
    },
    /// An outsider's change moved the refined selection.
    SelectionBossy {
        profile: Profile,
        agent: usize,
        replacement: Preference,
        before: Coalition,
        after: Coalition,
    },
    /// A selected agent's peak is weakly below an unselected agent's.
    SelectionPopViolated {
        profile: Profile,
        lower: usize,
        higher: usize,
        selected: Coalition,
    },
}

/// Outcome of one audit: the check, the verdict, evidence on failure, the
/// catalog quantified over, and how many items were examined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub check: CheckId,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub catalog: CatalogId,
    pub checked: u64,
    pub notes: Vec<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Re-establishes a rule-axiom violation from its witness alone. Returns
/// true when the witness reproduces the violation.
pub fn replay_witness(rule: &Rule, witness: &Witness) -> bool {
    match witness {
        Witness::Unanimity { profile, allocation } => {
            let peaks: Option<Vec<&Rational>> = profile
                .preferences()
                .iter()
                .map(|p| p.peak().within_omega())
                .collect();
            let Some(peaks) = peaks else { return false };
            let sum: Rational = peaks.iter().copied().sum();
            if sum != *profile.grid().omega() {
                return false;
            }
            match rule.evaluate(profile) {
                Ok(x) => {
                    x == *allocation
                        && (0..profile.n()).any(|i| x.amount(i) != peaks[i])
                }
                Err(_) => false,
            }
        }
        Witness::Efficiency {
            profile,
            allocation,
            dominating,
        } => match rule.evaluate(profile) {
            Ok(x) => {
                if x != *allocation {
                    return false;
                }
                let grid = profile.grid();
                let mut some_strict = false;
                for i in 0..profile.n() {
                    match profile
                        .preference(i)
                        .compare(grid, dominating.amount(i), x.amount(i))
                    {
                        Ok(Ordering::Greater) => some_strict = true,
                        Ok(Ordering::Equal) => {}
                        _ => return false,
                    }
                }
                some_strict
            }
            Err(_) => false,
        },
        Witness::OwnPeakOnly {
            profile,
            agent,
            replacement,
            before,
            after,
        } => {
            if replacement.peak() != profile.preference(*agent).peak() {
                return false;
            }
            let changed = profile.replace_preference(*agent, replacement.clone());
            match (rule.evaluate(profile), rule.evaluate(&changed)) {
                (Ok(x), Ok(y)) => {
                    x.amount(*agent) == before
                        && y.amount(*agent) == after
                        && before != after
                }
                _ => false,
            }
        }
        Witness::PeaksOnly {
            profile,
            replacement_profile,
            before,
            after,
        } => {
            let same_peaks = profile
                .preferences()
                .iter()
                .zip(replacement_profile.preferences())
                .all(|(a, b)| a.peak() == b.peak());
            if !same_peaks {
                return false;
            }
            match (rule.evaluate(profile), rule.evaluate(replacement_profile)) {
                (Ok(x), Ok(y)) => x == *before && y == *after && x != y,
                _ => false,
            }
        }
        Witness::EqualDivisionLowerBound {
            profile,
            agent,
            amount,
        } => {
            let grid = profile.grid();
            let share = grid.equal_share(profile.n());
            match rule.evaluate(profile) {
                Ok(x) => {
                    x.amount(*agent) == amount
                        && profile
                            .preference(*agent)
                            .compare(grid, amount, &share)
                            .map(|o| o == Ordering::Less)
                            .unwrap_or(false)
                }
                Err(_) => false,
            }
        }
        Witness::EqualDivisionGuarantee {
            profile,
            agent,
            amount,
        } => {
            let share = profile.grid().equal_share(profile.n());
            if profile.preference(*agent).peak().within_omega() != Some(&share) {
                return false;
            }
            match rule.evaluate(profile) {
                Ok(x) => x.amount(*agent) == amount && *amount != share,
                Err(_) => false,
            }
        }
        Witness::Manipulation {
            profile,
            agent,
            misreport,
            truthful_amount,
            misreport_amount,
        } => {
            let misreported = profile.replace_preference(*agent, misreport.clone());
            match (rule.evaluate(profile), rule.evaluate(&misreported)) {
                (Ok(x), Ok(y)) => {
                    x.amount(*agent) == truthful_amount
                        && y.amount(*agent) == misreport_amount
                        && profile
                            .preference(*agent)
                            .compare(profile.grid(), misreport_amount, truthful_amount)
                            .map(|o| o == Ordering::Greater)
                            .unwrap_or(false)
                }
                _ => false,
            }
        }
        Witness::ObviousManipulation {
            profile,
            agent,
            misreport,
            truthful_amount,
            misreport_amount,
            truth_options,
            misreport_options,
        } => {
            // condition (i): the stored opponents make the misreport
            // strictly better under the true preference
            let misreported = profile.replace_preference(*agent, misreport.clone());
            let truth = profile.preference(*agent);
            let grid = profile.grid();
            let improvement = match (rule.evaluate(profile), rule.evaluate(&misreported)) {
                (Ok(x), Ok(y)) => {
                    x.amount(*agent) == truthful_amount
                        && y.amount(*agent) == misreport_amount
                        && truth
                            .compare(grid, misreport_amount, truthful_amount)
                            .map(|o| o == Ordering::Greater)
                            .unwrap_or(false)
                }
                _ => false,
            };
            if !improvement {
                return false;
            }
            // condition (ii): each misreport option strictly beats some
            // truth option under the true preference
            misreport_options.iter().all(|x_mis| {
                truth_options.iter().any(|x_truth| {
                    truth
                        .compare(grid, x_mis, x_truth)
                        .map(|o| o == Ordering::Greater)
                        .unwrap_or(false)
                })
            })
        }
        Witness::Bossiness {
            profile,
            agent,
            replacement,
            before,
            after,
        } => {
            let changed = profile.replace_preference(*agent, replacement.clone());
            match (rule.evaluate(profile), rule.evaluate(&changed)) {
                (Ok(x), Ok(y)) => {
                    x == *before
                        && y == *after
                        && x.amount(*agent) == y.amount(*agent)
                        && x != y
                }
                _ => false,
            }
        }
        Witness::Dictator { .. } => {
            // a dictator claim quantifies over the whole catalog; it is
            // re-established by re-running the audit, not pointwise
            true
        }
        Witness::EndowmentsGuarantee {
            profile,
            agent,
            amount,
            endowment,
        } => {
            if profile.preference(*agent).peak().within_omega() != Some(endowment) {
                return false;
            }
            match rule.evaluate(profile) {
                Ok(x) => x.amount(*agent) == amount && amount != endowment,
                Err(_) => false,
            }
        }
        Witness::PeakOrderPreservation {
            profile,
            lower,
            higher,
            allocation,
        } => {
            let tl = profile.preference(*lower).peak();
            let th = profile.preference(*higher).peak();
            if tl > th {
                return false;
            }
            match rule.evaluate(profile) {
                Ok(x) => x == *allocation && x.amount(*lower) > x.amount(*higher),
                Err(_) => false,
            }
        }
        // selection-level witnesses are replayed against the selection
        // itself, not against a rule
        Witness::SelectionNotAdmissible { .. }
        | Witness::SelectionMembershipChanged { .. }
        | Witness::SelectionGrandNotChosen { .. }
        | Witness::SelectionNotPeaksOnly { .. }
        | Witness::SelectionBossy { .. }
        | Witness::SelectionPopViolated { .. } => false,
    }
}
