//! Checks a coalition selection must pass: the three defining conditions,
//! the non-bossiness condition on the refined selection, and peak order
//! preservation. All quantify over verified preference classes of a finite
//! domain; the test suite cross-checks against raw profile enumeration at
//! small sizes.

use alloc::string::String;
use alloc::vec::Vec;

use alloc::collections::BTreeMap;

use crate::audit::domain::{AuditDomain, ClassIndex};
use crate::audit::report::{AxiomReport, CheckId, Verdict, Witness};
use crate::prefcore::preference::Peak;
use crate::prefcore::profile::Profile;
use crate::prefcore::rational::Rational;

use super::coalition::{is_agreeable, omega_admissible, Coalition};
use super::selection::{refine_selection, AgreeableSelection, OmegaSelection};

/// Internal view over the two selection families.
enum SelectionRef<'a> {
    Agreeable(&'a AgreeableSelection),
    Omega(&'a OmegaSelection),
}

#[derive(Clone, Debug)]
pub enum CheckError {
    /// Omega selections need a domain with endowments.
    EndowmentsRequired,
    /// The class-tuple space exceeds the safety bound.
    TooLarge { size: u128, bound: u128 },
}

const CLASS_TUPLE_BOUND: u128 = 2_000_000;

impl<'a> SelectionRef<'a> {
    fn select(&self, profile: &Profile) -> Coalition {
        match self {
            SelectionRef::Agreeable(sel) => sel.select(profile),
            SelectionRef::Omega(sel) => {
                let endowments = profile
                    .endowments()
                    .expect("omega selections run on endowment domains");
                sel.select(profile, endowments)
            }
        }
    }

    fn admissible(&self, profile: &Profile, c: Coalition) -> bool {
        match self {
            SelectionRef::Agreeable(_) => is_agreeable(profile, c),
            SelectionRef::Omega(_) => {
                let endowments = profile
                    .endowments()
                    .expect("omega selections run on endowment domains");
                omega_admissible(profile, endowments, c)
            }
        }
    }

    fn comparisons(&self, grid: &crate::prefcore::grid::Grid) -> Vec<(Rational, Rational)> {
        match self {
            SelectionRef::Agreeable(sel) => sel.comparisons(grid),
            SelectionRef::Omega(_) => Vec::new(),
        }
    }
}

struct SelectionCtx<'a> {
    selection: SelectionRef<'a>,
    domain: &'a AuditDomain,
    classes: ClassIndex,
    selected: Vec<Coalition>,
    refined: Vec<Coalition>,
}

impl<'a> SelectionCtx<'a> {
    fn new(selection: SelectionRef<'a>, domain: &'a AuditDomain) -> Result<Self, CheckError> {
        if matches!(selection, SelectionRef::Omega(_)) && domain.endowments().is_none() {
            return Err(CheckError::EndowmentsRequired);
        }
        let classes = ClassIndex::build(domain, &selection.comparisons(domain.grid()));
        let tuple_count = (classes.class_count() as u128).pow(domain.n() as u32);
        if tuple_count > CLASS_TUPLE_BOUND {
            return Err(CheckError::TooLarge {
                size: tuple_count,
                bound: CLASS_TUPLE_BOUND,
            });
        }
        let mut selected = Vec::with_capacity(tuple_count as usize);
        let mut refined = Vec::with_capacity(tuple_count as usize);
        for tuple in classes.class_tuples(domain.n()) {
            let profile = rep_profile(domain, &classes, &tuple);
            let s = selection.select(&profile);
            selected.push(s);
            refined.push(refine_selection(&profile, s));
        }
        Ok(SelectionCtx {
            selection,
            domain,
            classes,
            selected,
            refined,
        })
    }

    fn tuple_id(&self, tuple: &[usize]) -> usize {
        let base = self.classes.class_count();
        tuple.iter().fold(0usize, |acc, &c| acc * base + c)
    }

    fn report(&self, check: CheckId, witness: Option<Witness>, checked: u64) -> AxiomReport {
        AxiomReport {
            check,
            verdict: if witness.is_some() {
                Verdict::Fail
            } else {
                Verdict::Pass
            },
            witness,
            catalog: self.domain.id(),
            checked,
            notes: alloc::vec![String::from("mode=classes")],
        }
    }

    /// Condition (i): the chosen coalition is admissible at every profile.
    fn admissible_everywhere(&self) -> AxiomReport {
        let mut checked = 0u64;
        for tuple in self.classes.class_tuples(self.domain.n()) {
            checked += 1;
            let s = self.selected[self.tuple_id(&tuple)];
            let profile = rep_profile(self.domain, &self.classes, &tuple);
            if !self.selection.admissible(&profile, s) {
                return self.report(
                    CheckId::SelectionAdmissible,
                    Some(Witness::SelectionNotAdmissible {
                        profile,
                        selected: s,
                    }),
                    checked,
                );
            }
        }
        self.report(CheckId::SelectionAdmissible, None, checked)
    }

    /// Condition (ii): own same-peak changes never move own membership.
    fn own_peak_membership(&self) -> AxiomReport {
        let n = self.domain.n();
        let mut checked = 0u64;
        for tuple in self.classes.class_tuples(n) {
            let s = self.selected[self.tuple_id(&tuple)];
            for agent in 0..n {
                for replacement in self.classes.same_peak_classes(tuple[agent]) {
                    if replacement == tuple[agent] {
                        continue;
                    }
                    checked += 1;
                    let mut changed = tuple.clone();
                    changed[agent] = replacement;
                    let s_after = self.selected[self.tuple_id(&changed)];
                    if s.contains(agent) != s_after.contains(agent) {
                        let profile = rep_profile(self.domain, &self.classes, &tuple);
                        let rep = self.classes.representative(replacement);
                        return self.report(
                            CheckId::SelectionOwnPeak,
                            Some(Witness::SelectionMembershipChanged {
                                profile,
                                agent,
                                replacement: self.domain.preferences()[rep].clone(),
                                before: s,
                                after: s_after,
                            }),
                            checked,
                        );
                    }
                }
            }
        }
        self.report(CheckId::SelectionOwnPeak, None, checked)
    }

    /// Condition (iii): the grand coalition is chosen whenever admissible.
    fn grand_forced(&self) -> AxiomReport {
        let n = self.domain.n();
        let grand = Coalition::grand(n);
        let mut checked = 0u64;
        for tuple in self.classes.class_tuples(n) {
            let profile = rep_profile(self.domain, &self.classes, &tuple);
            if !self.selection.admissible(&profile, grand) {
                continue;
            }
            checked += 1;
            let s = self.selected[self.tuple_id(&tuple)];
            if s != grand {
                return self.report(
                    CheckId::SelectionGrandForced,
                    Some(Witness::SelectionGrandNotChosen {
                        profile,
                        selected: s,
                    }),
                    checked,
                );
            }
        }
        self.report(CheckId::SelectionGrandForced, None, checked)
    }

    /// The refined selection depends only on the peak vector.
    fn refined_peaks_only(&self) -> AxiomReport {
        let n = self.domain.n();
        let mut tuples: Vec<Vec<usize>> = Vec::new();
        let mut by_peaks: BTreeMap<Vec<Peak>, Vec<usize>> = BTreeMap::new();
        for tuple in self.classes.class_tuples(n) {
            let peaks: Vec<Peak> = tuple
                .iter()
                .map(|&c| self.classes.key(c).peak.clone())
                .collect();
            by_peaks.entry(peaks).or_default().push(tuples.len());
            tuples.push(tuple);
        }
        let mut checked = 0u64;
        for group in by_peaks.values() {
            let first = &tuples[group[0]];
            let s = self.refined[self.tuple_id(first)];
            for &other in &group[1..] {
                checked += 1;
                let s_other = self.refined[self.tuple_id(&tuples[other])];
                if s != s_other {
                    return self.report(
                        CheckId::SelectionPeaksOnly,
                        Some(Witness::SelectionNotPeaksOnly {
                            profile: rep_profile(self.domain, &self.classes, first),
                            replacement_profile: rep_profile(
                                self.domain,
                                &self.classes,
                                &tuples[other],
                            ),
                            before: s,
                            after: s_other,
                        }),
                        checked,
                    );
                }
            }
        }
        self.report(CheckId::SelectionPeaksOnly, None, checked)
    }

    /// Outsiders cannot move the refined selection: whenever agent `i` sits
    /// outside both refined selections of a unilateral change, the two
    /// refined selections must coincide.
    fn refined_non_bossy(&self) -> AxiomReport {
        let n = self.domain.n();
        let mut checked = 0u64;
        for tuple in self.classes.class_tuples(n) {
            let s = self.refined[self.tuple_id(&tuple)];
            for agent in 0..n {
                for replacement in 0..self.classes.class_count() {
                    if replacement == tuple[agent] {
                        continue;
                    }
                    checked += 1;
                    let mut changed = tuple.clone();
                    changed[agent] = replacement;
                    let s_after = self.refined[self.tuple_id(&changed)];
                    if !s.contains(agent) && !s_after.contains(agent) && s != s_after {
                        let profile = rep_profile(self.domain, &self.classes, &tuple);
                        let rep = self.classes.representative(replacement);
                        return self.report(
                            CheckId::SelectionNonBossy,
                            Some(Witness::SelectionBossy {
                                profile,
                                agent,
                                replacement: self.domain.preferences()[rep].clone(),
                                before: s,
                                after: s_after,
                            }),
                            checked,
                        );
                    }
                }
            }
        }
        self.report(CheckId::SelectionNonBossy, None, checked)
    }

    /// Peak order preservation at the selection level: a selected agent's
    /// peak is never weakly below an unselected agent's.
    fn pop(&self) -> AxiomReport {
        let n = self.domain.n();
        let mut checked = 0u64;
        for tuple in self.classes.class_tuples(n) {
            let s = self.selected[self.tuple_id(&tuple)];
            for i in 0..n {
                if !s.contains(i) {
                    continue;
                }
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let ti = &self.classes.key(tuple[i]).peak;
                    let tj = &self.classes.key(tuple[j]).peak;
                    if ti > tj {
                        continue;
                    }
                    checked += 1;
                    if !s.contains(j) {
                        let profile = rep_profile(self.domain, &self.classes, &tuple);
                        return self.report(
                            CheckId::SelectionPop,
                            Some(Witness::SelectionPopViolated {
                                profile,
                                lower: i,
                                higher: j,
                                selected: s,
                            }),
                            checked,
                        );
                    }
                }
            }
        }
        self.report(CheckId::SelectionPop, None, checked)
    }
}

fn rep_profile(domain: &AuditDomain, classes: &ClassIndex, tuple: &[usize]) -> Profile {
    let indices: Vec<usize> = tuple.iter().map(|&c| classes.representative(c)).collect();
    domain.profile(&indices)
}

/// Verifies the three defining conditions of an agreeable selection.
pub fn check_selection_axioms(
    selection: &AgreeableSelection,
    domain: &AuditDomain,
) -> Result<Vec<AxiomReport>, CheckError> {
    let ctx = SelectionCtx::new(SelectionRef::Agreeable(selection), domain)?;
    Ok(alloc::vec![
        ctx.admissible_everywhere(),
        ctx.own_peak_membership(),
        ctx.grand_forced(),
    ])
}

/// The same three conditions for an omega selection (the domain must carry
/// endowments; admissibility is the endowment-sum equation).
pub fn check_omega_selection_axioms(
    selection: &OmegaSelection,
    domain: &AuditDomain,
) -> Result<Vec<AxiomReport>, CheckError> {
    let ctx = SelectionCtx::new(SelectionRef::Omega(selection), domain)?;
    Ok(alloc::vec![
        ctx.admissible_everywhere(),
        ctx.own_peak_membership(),
        ctx.grand_forced(),
    ])
}

/// Verifies that the refined selection is peaks-only and immune to outsider
/// moves — together equivalent to non-bossiness of the induced rule.
pub fn check_nonbossy_condition(
    selection: &AgreeableSelection,
    domain: &AuditDomain,
) -> Result<Vec<AxiomReport>, CheckError> {
    let ctx = SelectionCtx::new(SelectionRef::Agreeable(selection), domain)?;
    Ok(alloc::vec![ctx.refined_peaks_only(), ctx.refined_non_bossy()])
}

/// Verifies peak order preservation of the selection.
pub fn check_pop_selection(
    selection: &AgreeableSelection,
    domain: &AuditDomain,
) -> Result<AxiomReport, CheckError> {
    let ctx = SelectionCtx::new(SelectionRef::Agreeable(selection), domain)?;
    Ok(ctx.pop())
}

/// Re-establishes a selection-condition violation from its witness alone.
pub fn replay_selection_witness(selection: &AgreeableSelection, witness: &Witness) -> bool {
    match witness {
        Witness::SelectionNotAdmissible { profile, selected } => {
            selection.select(profile) == *selected && !is_agreeable(profile, *selected)
        }
        Witness::SelectionMembershipChanged {
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
            selection.select(profile) == *before
                && selection.select(&changed) == *after
                && before.contains(*agent) != after.contains(*agent)
        }
        Witness::SelectionGrandNotChosen { profile, selected } => {
            let grand = Coalition::grand(profile.n());
            selection.select(profile) == *selected
                && is_agreeable(profile, grand)
                && *selected != grand
        }
        Witness::SelectionNotPeaksOnly {
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
            same_peaks
                && refine_selection(profile, selection.select(profile)) == *before
                && refine_selection(
                    replacement_profile,
                    selection.select(replacement_profile),
                ) == *after
                && before != after
        }
        Witness::SelectionBossy {
            profile,
            agent,
            replacement,
            before,
            after,
        } => {
            let changed = profile.replace_preference(*agent, replacement.clone());
            let s = refine_selection(profile, selection.select(profile));
            let s_after = refine_selection(&changed, selection.select(&changed));
            s == *before
                && s_after == *after
                && !s.contains(*agent)
                && !s_after.contains(*agent)
                && s != s_after
        }
        Witness::SelectionPopViolated {
            profile,
            lower,
            higher,
            selected,
        } => {
            let s = selection.select(profile);
            s == *selected
                && profile.preference(*lower).peak() <= profile.preference(*higher).peak()
                && s.contains(*lower)
                && !s.contains(*higher)
        }
        _ => false,
    }
}
