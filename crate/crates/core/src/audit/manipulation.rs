//! Manipulation and obvious-manipulation detection.
//!
//! A misreport is a manipulation when some opponent combination makes it
//! strictly better than truth-telling under the true preference. It is an
//! obvious manipulation when, in addition, every amount receivable under the
//! misreport strictly beats some amount receivable under truth-telling —
//! again judged by the true preference.

use core::cmp::Ordering;

use crate::prefcore::preference::Preference;
use crate::rules::Rule;

use super::domain::{AuditDomain, ClassIndex, Odometer};
use super::option_set::{
    option_set_over_classes, profile_with_agent, OptionSetError, DEFAULT_OPPONENT_BOUND,
};
use super::report::Witness;

/// Scans opponent classes for a profile at which `misreport` strictly beats
/// truth-telling under `truth`. Returns the first witness in deterministic
/// order, or `None` when the misreport never helps.
pub fn is_manipulation(
    rule: &Rule,
    agent: usize,
    truth: &Preference,
    misreport: &Preference,
    domain: &AuditDomain,
) -> Result<Option<Witness>, OptionSetError> {
    let classes = ClassIndex::build(domain, &rule.comparisons(domain.grid(), domain.n()));
    is_manipulation_over_classes(rule, agent, truth, misreport, domain, &classes)
}

pub(crate) fn is_manipulation_over_classes(
    rule: &Rule,
    agent: usize,
    truth: &Preference,
    misreport: &Preference,
    domain: &AuditDomain,
    classes: &ClassIndex,
) -> Result<Option<Witness>, OptionSetError> {
    let n = domain.n();
    let grid = domain.grid();
    for tuple in Odometer::new(classes.class_count(), n - 1) {
        let truthful =
            profile_with_agent(domain, agent, truth, |slot| classes.representative(tuple[slot]));
        let misreported = truthful.replace_preference(agent, misreport.clone());
        let x_truth = rule.evaluate(&truthful).map_err(OptionSetError::Rule)?;
        let x_mis = rule.evaluate(&misreported).map_err(OptionSetError::Rule)?;
        let truth_amount = x_truth.amount(agent);
        let mis_amount = x_mis.amount(agent);
        let better = truth
            .compare(grid, mis_amount, truth_amount)
            .expect("allocations lie in [0, omega]");
        if better == Ordering::Greater {
            return Ok(Some(Witness::Manipulation {
                profile: truthful,
                agent,
                misreport: misreport.clone(),
                truthful_amount: truth_amount.clone(),
                misreport_amount: mis_amount.clone(),
            }));
        }
    }
    Ok(None)
}

/// Detects an obvious manipulation: a manipulation (condition (i)) each of
/// whose option-set amounts strictly beats some truth-telling option-set
/// amount (condition (ii)).
pub fn is_obvious_manipulation(
    rule: &Rule,
    agent: usize,
    truth: &Preference,
    misreport: &Preference,
    domain: &AuditDomain,
) -> Result<Option<Witness>, OptionSetError> {
    let classes = ClassIndex::build(domain, &rule.comparisons(domain.grid(), domain.n()));
    is_obvious_manipulation_over_classes(rule, agent, truth, misreport, domain, &classes)
}

pub(crate) fn is_obvious_manipulation_over_classes(
    rule: &Rule,
    agent: usize,
    truth: &Preference,
    misreport: &Preference,
    domain: &AuditDomain,
    classes: &ClassIndex,
) -> Result<Option<Witness>, OptionSetError> {
    let manipulation =
        is_manipulation_over_classes(rule, agent, truth, misreport, domain, classes)?;
    let Some(Witness::Manipulation {
        profile,
        truthful_amount,
        misreport_amount,
        ..
    }) = manipulation
    else {
        return Ok(None);
    };
    let truth_options =
        option_set_over_classes(rule, agent, truth, domain, classes, DEFAULT_OPPONENT_BOUND)?;
    let mis_options = option_set_over_classes(
        rule,
        agent,
        misreport,
        domain,
        classes,
        DEFAULT_OPPONENT_BOUND,
    )?;
    let grid = domain.grid();
    let obvious = mis_options.values().iter().all(|x_mis| {
        truth_options.values().iter().any(|x_truth| {
            truth
                .compare(grid, x_mis, x_truth)
                .expect("option amounts lie in [0, omega]")
                == Ordering::Greater
        })
    });
    if obvious {
        Ok(Some(Witness::ObviousManipulation {
            profile,
            agent,
            misreport: misreport.clone(),
            truthful_amount,
            misreport_amount,
            truth_options: truth_options.values().to_vec(),
            misreport_options: mis_options.values().to_vec(),
        }))
    } else {
        Ok(None)
    }
}
