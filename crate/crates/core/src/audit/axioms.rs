//! The axiom suite. Each audit quantifies a predicate over a declared
//! finite catalog of profiles and returns a pass/fail verdict with a
//! replayable witness on failure.
//!
//! Two quantification modes are provided. `Exhaustive` iterates raw
//! profiles; it assumes nothing about the rule and is the reference route.
//! `Classes` iterates verified preference classes (peak plus the rule's
//! declared comparisons) and is exact for rules whose profile signature
//! holds — which [`super::domain::verify_profile_signature`] certifies and
//! the test suite cross-checks against the exhaustive route at small sizes.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::prefcore::catalog::{feasible_allocations, CatalogError};
use crate::prefcore::preference::Peak;
use crate::prefcore::profile::{Allocation, Profile};
use crate::prefcore::rational::Rational;
use crate::rules::{Rule, RuleError};

use super::domain::{AuditDomain, ClassIndex, Odometer};
use super::option_set::{option_set_bruteforce_raw, OptionSet, OptionSetError};
use super::report::{AxiomReport, CheckId, Verdict, Witness};

/// The twelve audited axioms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    Efficiency,
    Unanimity,
    StrategyProofness,
    NonObviousManipulability,
    PeaksOnly,
    OwnPeakOnly,
    EqualDivisionLowerBound,
    EqualDivisionGuarantee,
    NonBossiness,
    NonDictatorship,
    EndowmentsGuarantee,
    PeakOrderPreservation,
}

pub const ALL_AXIOMS: [Axiom; 12] = [
    Axiom::Efficiency,
    Axiom::Unanimity,
    Axiom::StrategyProofness,
    Axiom::NonObviousManipulability,
    Axiom::PeaksOnly,
    Axiom::OwnPeakOnly,
    Axiom::EqualDivisionLowerBound,
    Axiom::EqualDivisionGuarantee,
    Axiom::NonBossiness,
    Axiom::NonDictatorship,
    Axiom::EndowmentsGuarantee,
    Axiom::PeakOrderPreservation,
];

impl Axiom {
    pub fn id(&self) -> &'static str {
        match self {
            Axiom::Efficiency => "efficiency",
            Axiom::Unanimity => "unanimity",
            Axiom::StrategyProofness => "sp",
            Axiom::NonObviousManipulability => "nom",
            Axiom::PeaksOnly => "peaks-only",
            Axiom::OwnPeakOnly => "opo",
            Axiom::EqualDivisionLowerBound => "edlb",
            Axiom::EqualDivisionGuarantee => "edg",
            Axiom::NonBossiness => "non-bossiness",
            Axiom::NonDictatorship => "non-dictatorship",
            Axiom::EndowmentsGuarantee => "endowments-guarantee",
            Axiom::PeakOrderPreservation => "pop",
        }
    }

    pub fn parse(s: &str) -> Option<Axiom> {
        ALL_AXIOMS.iter().copied().find(|a| a.id() == s)
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditMode {
    /// Quantify over verified preference classes.
    Classes,
    /// Quantify over raw catalog profiles.
    Exhaustive,
}

#[derive(Clone, Debug)]
pub enum AuditError {
    Catalog(CatalogError),
    Rule(RuleError),
    OptionSet(OptionSetError),
    /// The quantification space exceeds the safety bound.
    TooLarge { size: u128, bound: u128 },
    /// The endowments-guarantee audit needs a domain with endowments.
    EndowmentsRequired,
}

impl fmt::Display for AuditError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuditError::Catalog(e) => write!(f, "{e}"),
            AuditError::Rule(e) => write!(f, "{e}"),
            AuditError::OptionSet(e) => write!(f, "{e}"),
            AuditError::TooLarge { size, bound } => {
                write!(f, "audit space of {size} items exceeds the bound {bound}")
            }
            AuditError::EndowmentsRequired => {
                write!(f, "endowments-guarantee audits need a domain with endowments")
            }
        }
    }
}

impl From<CatalogError> for AuditError {
    fn from(e: CatalogError) -> Self {
        AuditError::Catalog(e)
    }
}

impl From<RuleError> for AuditError {
    fn from(e: RuleError) -> Self {
        AuditError::Rule(e)
    }
}

impl From<OptionSetError> for AuditError {
    fn from(e: OptionSetError) -> Self {
        AuditError::OptionSet(e)
    }
}

const CLASS_TUPLE_BOUND: u128 = 2_000_000;
const EXHAUSTIVE_OP_BOUND: u128 = 50_000_000;

/// Runs one axiom audit for a rule over a domain.
pub fn audit_axiom(
    rule: &Rule,
    axiom: Axiom,
    domain: &AuditDomain,
    mode: AuditMode,
) -> Result<AxiomReport, AuditError> {
    match mode {
        AuditMode::Classes => {
            let ctx = ClassCtx::new(rule, domain)?;
            ctx.audit(axiom)
        }
        AuditMode::Exhaustive => exhaustive_audit(rule, axiom, domain),
    }
}

/// Runs several axioms, reusing the class context.
pub fn audit_axioms(
    rule: &Rule,
    axioms: &[Axiom],
    domain: &AuditDomain,
    mode: AuditMode,
) -> Result<Vec<AxiomReport>, AuditError> {
    match mode {
        AuditMode::Classes => {
            let ctx = ClassCtx::new(rule, domain)?;
            axioms.iter().map(|&a| ctx.audit(a)).collect()
        }
        AuditMode::Exhaustive => axioms
            .iter()
            .map(|&a| exhaustive_audit(rule, a, domain))
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// class-mode audits
// ---------------------------------------------------------------------------

struct ClassCtx<'a> {
    domain: &'a AuditDomain,
    classes: ClassIndex,
    /// allocation per class tuple, indexed by mixed-radix tuple id
    outputs: Vec<Allocation>,
    off_grid_outputs: u64,
}

impl<'a> ClassCtx<'a> {
    fn new(rule: &'a Rule, domain: &'a AuditDomain) -> Result<Self, AuditError> {
        let classes = ClassIndex::build(domain, &rule.comparisons(domain.grid(), domain.n()));
        let tuple_count = (classes.class_count() as u128).pow(domain.n() as u32);
        if tuple_count > CLASS_TUPLE_BOUND {
            return Err(AuditError::TooLarge {
                size: tuple_count,
                bound: CLASS_TUPLE_BOUND,
            });
        }
        let mut outputs = Vec::with_capacity(tuple_count as usize);
        let mut off_grid_outputs = 0u64;
        for tuple in classes.class_tuples(domain.n()) {
            let profile = rep_profile(domain, &classes, &tuple);
            let allocation = rule.evaluate(&profile)?;
            if !allocation.on_grid(domain.grid()) {
                off_grid_outputs += 1;
            }
            outputs.push(allocation);
        }
        Ok(ClassCtx {
            domain,
            classes,
            outputs,
            off_grid_outputs,
        })
    }

    fn tuple_id(&self, tuple: &[usize]) -> usize {
        let base = self.classes.class_count();
        tuple.iter().fold(0usize, |acc, &c| acc * base + c)
    }

    fn output(&self, tuple: &[usize]) -> &Allocation {
        &self.outputs[self.tuple_id(tuple)]
    }

    fn report(
        &self,
        axiom: Axiom,
        witness: Option<Witness>,
        checked: u64,
        mut notes: Vec<String>,
    ) -> AxiomReport {
        notes.insert(0, String::from("mode=classes"));
        AxiomReport {
            check: CheckId::Axiom(axiom),
            verdict: if witness.is_some() {
                Verdict::Fail
            } else {
                Verdict::Pass
            },
            witness,
            catalog: self.domain.id(),
            checked,
            notes,
        }
    }

    fn audit(&self, axiom: Axiom) -> Result<AxiomReport, AuditError> {
        match axiom {
            Axiom::Unanimity => self.unanimity(),
            Axiom::Efficiency => self.efficiency(),
            Axiom::StrategyProofness => self.strategy_proofness(),
            Axiom::NonObviousManipulability => self.non_obvious_manipulability(),
            Axiom::PeaksOnly => self.peaks_only(),
            Axiom::OwnPeakOnly => self.own_peak_only(),
            Axiom::EqualDivisionLowerBound => self.equal_division_lower_bound(),
            Axiom::EqualDivisionGuarantee => self.equal_division_guarantee(),
            Axiom::NonBossiness => self.non_bossiness(),
            Axiom::NonDictatorship => self.non_dictatorship(),
            Axiom::EndowmentsGuarantee => self.endowments_guarantee(),
            Axiom::PeakOrderPreservation => self.peak_order_preservation(),
        }
    }

    fn unanimity(&self) -> Result<AxiomReport, AuditError> {
        let n = self.domain.n();
        let omega = self.domain.grid().omega();
        let mut checked = 0u64;
        for tuple in self.classes.class_tuples(n) {
            checked += 1;
            let peaks: Option<Vec<&Rational>> = tuple
                .iter()
                .map(|&c| self.classes.key(c).peak.within_omega())
                .collect();
            let Some(peaks) = peaks else { continue };
            let sum: Rational = peaks.iter().copied().sum();
            if sum != *omega {
                continue;
            }
            let x = self.output(&tuple);
            if (0..n).any(|i| x.amount(i) != peaks[i]) {
                let profile = rep_profile(self.domain, &self.classes, &tuple);
                return Ok(self.report(
                    Axiom::Unanimity,
                    Some(Witness::Unanimity {
                        profile,
                        allocation: x.clone(),
                    }),
                    checked,
                    Vec::new(),
                ));
            }
        }
        Ok(self.report(Axiom::Unanimity, None, checked, Vec::new()))
    }

    fn efficiency(&self) -> Result<AxiomReport, AuditError> {
        let n = self.domain.n();
        let grid = self.domain.grid();
        let candidates = feasible_allocations(grid, n)?;
        // (class, candidate amount, current amount) -> (weak, strict) member
        let mut memo: BTreeMap<(usize, Rational, Rational), (Option<usize>, Option<usize>)> =
            BTreeMap::new();
        let mut checked = 0u64;
        for tuple in self.classes.class_tuples(n) {
            let x = self.output(&tuple);
            for candidate in &candidates {
                if candidate == x {
                    continue;
                }
                checked += 1;
                let mut weak_members: Vec<Option<usize>> = Vec::with_capacity(n);
                let mut strict_members: Vec<Option<usize>> = Vec::with_capacity(n);
                let mut all_weak = true;
                for i in 0..n {
                    let key = (
                        tuple[i],
                        candidate.amount(i).clone(),
                        x.amount(i).clone(),
                    );
                    let (weak, strict) = match memo.get(&key) {
                        Some(&entry) => entry,
                        None => {
                            let entry = self.improvement_members(tuple[i], &key.1, &key.2);
                            memo.insert(key, entry);
                            entry
                        }
                    };
                    if weak.is_none() {
                        all_weak = false;
                        break;
                    }
                    weak_members.push(weak);
                    strict_members.push(strict);
                }
                if !all_weak {
                    continue;
                }
                let Some(strict_agent) = (0..n).find(|&i| strict_members[i].is_some()) else {
                    continue;
                };
                // assemble the dominated completion
                let prefs: Vec<usize> = (0..n)
                    .map(|i| {
                        if i == strict_agent {
                            strict_members[i].unwrap()
                        } else {
                            weak_members[i].unwrap()
                        }
                    })
                    .collect();
                let profile = self.domain.profile(&prefs);
                return Ok(self.report(
                    Axiom::Efficiency,
                    Some(Witness::Efficiency {
                        profile,
                        allocation: x.clone(),
                        dominating: candidate.clone(),
                    }),
                    checked,
                    self.off_grid_notes(),
                ));
            }
        }
        Ok(self.report(Axiom::Efficiency, None, checked, self.off_grid_notes()))
    }

    /// Members of a class weakly (resp. strictly) preferring `a` to `b`.
    fn improvement_members(
        &self,
        class: usize,
        a: &Rational,
        b: &Rational,
    ) -> (Option<usize>, Option<usize>) {
        let grid = self.domain.grid();
        let mut weak = None;
        let mut strict = None;
        for &member in self.classes.members(class) {
            let pref = &self.domain.preferences()[member];
            match pref.compare(grid, a, b).expect("amounts lie in the domain") {
                Ordering::Greater => {
                    if strict.is_none() {
                        strict = Some(member);
                    }
                    if weak.is_none() {
                        weak = Some(member);
                    }
                }
                Ordering::Equal => {
                    if weak.is_none() {
                        weak = Some(member);
                    }
                }
                Ordering::Less => {}
            }
            if weak.is_some() && strict.is_some() {
                break;
            }
        }
        (weak, strict)
    }

    fn off_grid_notes(&self) -> Vec<String> {
        if self.off_grid_outputs > 0 {
            let mut s = String::from("off-grid-outputs=");
            s.push_str(&format_u64(self.off_grid_outputs));
            alloc::vec![s]
        } else {
            Vec::new()
        }
    }

    fn own_peak_only(&self) -> Result<AxiomReport, AuditError> {
        let n = self.domain.n();
        let mut checked = 0u64;
        for tuple in self.classes.class_tuples(n) {
            let x = self.output(&tuple);
            for agent in 0..n {
                for replacement in self.classes.same_peak_classes(tuple[agent]) {
                    if replacement == tuple[agent] {
                        continue;
                    }
                    checked += 1;
                    let mut changed = tuple.clone();
                    changed[agent] = replacement;
                    let y = self.output(&changed);
                    if x.amount(agent) != y.amount(agent) {
                        let profile = rep_profile(self.domain, &self.classes, &tuple);
                        let rep = self.classes.representative(replacement);
                        return Ok(self.report(
                            Axiom::OwnPeakOnly,
                            Some(Witness::OwnPeakOnly {
                                profile,
                                agent,
                                replacement: self.domain.preferences()[rep].clone(),
                                before: x.amount(agent).clone(),
                                after: y.amount(agent).clone(),
                            }),
                            checked,
                            Vec::new(),
                        ));
                    }
                }
            }
        }
        Ok(self.report(Axiom::OwnPeakOnly, None, checked, Vec::new()))
    }

    fn peaks_only(&self) -> Result<AxiomReport, AuditError> {
        let n = self.domain.n();
        let mut by_peaks: BTreeMap<Vec<Peak>, Vec<usize>> = BTreeMap::new();
        let mut tuples: Vec<Vec<usize>> = Vec::new();
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
            let x = self.output(first);
            for &other in &group[1..] {
                checked += 1;
                let y = self.output(&tuples[other]);
                if x != y {
                    return Ok(self.report(
                        Axiom::PeaksOnly,
                        Some(Witness::PeaksOnly {
                            profile: rep_profile(self.domain, &self.classes, first),
                            replacement_profile: rep_profile(
                                self.domain,
                                &self.classes,
                                &tuples[other],
                            ),
                            before: x.clone(),
                            after: y.clone(),
                        }),
                        checked,
                        Vec::new(),
                    ));
                }
            }
        }
        Ok(self.report(Axiom::PeaksOnly, None, checked, Vec::new()))
    }

    fn equal_division_lower_bound(&self) -> Result<AxiomReport, AuditError> {
        let n = self.domain.n();
        let grid = self.domain.grid();
        let share = grid.equal_share(n);
        let mut checked = 0u64;
        for tuple in self.classes.class_tuples(n) {
            let x = self.output(&tuple);
            for agent in 0..n {
                for &member in self.classes.members(tuple[agent]) {
                    checked += 1;
                    let pref = &self.domain.preferences()[member];
                    let cmp = pref
                        .compare(grid, &share, x.amount(agent))
                        .expect("amounts lie in the domain");
                    if cmp == Ordering::Greater {
                        let profile = rep_profile(self.domain, &self.classes, &tuple)
                            .replace_preference(agent, pref.clone());
                        return Ok(self.report(
                            Axiom::EqualDivisionLowerBound,
                            Some(Witness::EqualDivisionLowerBound {
                                profile,
                                agent,
                                amount: x.amount(agent).clone(),
                            }),
                            checked,
                            Vec::new(),
                        ));
                    }
                }
            }
        }
        Ok(self.report(Axiom::EqualDivisionLowerBound, None, checked, Vec::new()))
    }

    fn equal_division_guarantee(&self) -> Result<AxiomReport, AuditError> {
        let n = self.domain.n();
        let share = self.domain.grid().equal_share(n);
        let mut checked = 0u64;
        for tuple in self.classes.class_tuples(n) {
            let x = self.output(&tuple);
            for agent in 0..n {
                if self.classes.key(tuple[agent]).peak.within_omega() != Some(&share) {
                    continue;
                }
                checked += 1;
                if x.amount(agent) != &share {
                    let profile = rep_profile(self.domain, &self.classes, &tuple);
                    return Ok(self.report(
                        Axiom::EqualDivisionGuarantee,
                        Some(Witness::EqualDivisionGuarantee {
                            profile,
                            agent,
                            amount: x.amount(agent).clone(),
                        }),
                        checked,
                        Vec::new(),
                    ));
                }
            }
        }
        Ok(self.report(Axiom::EqualDivisionGuarantee, None, checked, Vec::new()))
    }

    fn strategy_proofness(&self) -> Result<AxiomReport, AuditError> {
        self.manipulation_scan(false)
    }

    fn non_obvious_manipulability(&self) -> Result<AxiomReport, AuditError> {
        self.manipulation_scan(true)
    }

    /// Shared scan over (agent, truth, misreport class, opponents). With
    /// `require_obvious`, a manipulation fails the audit only when every
    /// misreport option strictly beats some truth option.
    fn manipulation_scan(&self, require_obvious: bool) -> Result<AxiomReport, AuditError> {
        let n = self.domain.n();
        let grid = self.domain.grid();
        let option_sets = self.option_sets_by_class();
        let axiom = if require_obvious {
            Axiom::NonObviousManipulability
        } else {
            Axiom::StrategyProofness
        };
        let mut checked = 0u64;
        for agent in 0..n {
            for (truth_index, truth) in self.domain.preferences().iter().enumerate() {
                let truth_class = self.classes.class_of(truth_index);
                for mis_class in 0..self.classes.class_count() {
                    if mis_class == truth_class {
                        // identical outcomes, never a strict improvement
                        continue;
                    }
                    // condition (ii) screens cheaply, so test it first for
                    // the obviousness scan
                    if require_obvious {
                        let obvious = option_sets[agent][mis_class].values().iter().all(|x_mis| {
                            option_sets[agent][truth_class].values().iter().any(|x_truth| {
                                truth
                                    .compare(grid, x_mis, x_truth)
                                    .expect("options lie in the domain")
                                    == Ordering::Greater
                            })
                        });
                        if !obvious {
                            checked += 1;
                            continue;
                        }
                    }
                    for opp in Odometer::new(self.classes.class_count(), n - 1) {
                        checked += 1;
                        let truth_tuple = insert_at(&opp, agent, truth_class);
                        let mis_tuple = insert_at(&opp, agent, mis_class);
                        let x_truth = self.output(&truth_tuple);
                        let x_mis = self.output(&mis_tuple);
                        let better = truth
                            .compare(grid, x_mis.amount(agent), x_truth.amount(agent))
                            .expect("amounts lie in the domain");
                        if better != Ordering::Greater {
                            continue;
                        }
                        // a manipulation; assemble the witness profile with
                        // the true preference in the agent's slot
                        let mut indices: Vec<usize> = truth_tuple
                            .iter()
                            .map(|&c| self.classes.representative(c))
                            .collect();
                        indices[agent] = truth_index;
                        let profile = self.domain.profile(&indices);
                        let misreport =
                            self.domain.preferences()[self.classes.representative(mis_class)].clone();
                        let witness = if require_obvious {
                            Witness::ObviousManipulation {
                                profile,
                                agent,
                                misreport,
                                truthful_amount: x_truth.amount(agent).clone(),
                                misreport_amount: x_mis.amount(agent).clone(),
                                truth_options: option_sets[agent][truth_class]
                                    .values()
                                    .to_vec(),
                                misreport_options: option_sets[agent][mis_class]
                                    .values()
                                    .to_vec(),
                            }
                        } else {
                            Witness::Manipulation {
                                profile,
                                agent,
                                misreport,
                                truthful_amount: x_truth.amount(agent).clone(),
                                misreport_amount: x_mis.amount(agent).clone(),
                            }
                        };
                        return Ok(self.report(axiom, Some(witness), checked, Vec::new()));
                    }
                }
            }
        }
        Ok(self.report(axiom, None, checked, Vec::new()))
    }

    /// Option set per (agent, own class): all amounts over opponent tuples.
    fn option_sets_by_class(&self) -> Vec<Vec<OptionSet>> {
        let n = self.domain.n();
        let mut raw: Vec<Vec<Vec<Rational>>> =
            alloc::vec![alloc::vec![Vec::new(); self.classes.class_count()]; n];
        for tuple in self.classes.class_tuples(n) {
            let x = self.output(&tuple);
            for agent in 0..n {
                raw[agent][tuple[agent]].push(x.amount(agent).clone());
            }
        }
        raw.into_iter()
            .map(|per_class| {
                per_class
                    .into_iter()
                    .map(OptionSet::from_values)
                    .collect()
            })
            .collect()
    }

    fn non_bossiness(&self) -> Result<AxiomReport, AuditError> {
        let n = self.domain.n();
        let mut checked = 0u64;
        for tuple in self.classes.class_tuples(n) {
            let x = self.output(&tuple);
            for agent in 0..n {
                for replacement in 0..self.classes.class_count() {
                    if replacement == tuple[agent] {
                        continue;
                    }
                    checked += 1;
                    let mut changed = tuple.clone();
                    changed[agent] = replacement;
                    let y = self.output(&changed);
                    if x.amount(agent) == y.amount(agent) && x != y {
                        let profile = rep_profile(self.domain, &self.classes, &tuple);
                        let rep = self.classes.representative(replacement);
                        return Ok(self.report(
                            Axiom::NonBossiness,
                            Some(Witness::Bossiness {
                                profile,
                                agent,
                                replacement: self.domain.preferences()[rep].clone(),
                                before: x.clone(),
                                after: y.clone(),
                            }),
                            checked,
                            Vec::new(),
                        ));
                    }
                }
            }
        }
        Ok(self.report(Axiom::NonBossiness, None, checked, Vec::new()))
    }

    fn non_dictatorship(&self) -> Result<AxiomReport, AuditError> {
        let n = self.domain.n();
        let notes = alloc::vec![String::from(
            "dictatorship quantified over profiles where the candidate's peak is within the endowment",
        )];
        let mut checked = 0u64;
        for agent in 0..n {
            let mut dictator = true;
            for tuple in self.classes.class_tuples(n) {
                let Some(peak) = self.classes.key(tuple[agent]).peak.within_omega() else {
                    continue;
                };
                checked += 1;
                if self.output(&tuple).amount(agent) != peak {
                    dictator = false;
                    break;
                }
            }
            if dictator {
                return Ok(self.report(
                    Axiom::NonDictatorship,
                    Some(Witness::Dictator { agent }),
                    checked,
                    notes,
                ));
            }
        }
        Ok(self.report(Axiom::NonDictatorship, None, checked, notes))
    }

    fn endowments_guarantee(&self) -> Result<AxiomReport, AuditError> {
        let n = self.domain.n();
        let endowments = self
            .domain
            .endowments()
            .ok_or(AuditError::EndowmentsRequired)?;
        let grid = self.domain.grid();
        let mut notes = Vec::new();
        for (agent, w) in endowments.endowments().iter().enumerate() {
            if !grid.contains(w) {
                let mut s = String::from("endowment of agent ");
                s.push_str(&format_u64(agent as u64 + 1));
                s.push_str(" is off the grid; its guarantee instances are vacuous");
                notes.push(s);
            }
        }
        let mut checked = 0u64;
        for tuple in self.classes.class_tuples(n) {
            let x = self.output(&tuple);
            for agent in 0..n {
                let w = endowments.endowment(agent);
                if self.classes.key(tuple[agent]).peak.within_omega() != Some(w) {
                    continue;
                }
                checked += 1;
                if x.amount(agent) != w {
                    let profile = rep_profile(self.domain, &self.classes, &tuple);
                    return Ok(self.report(
                        Axiom::EndowmentsGuarantee,
                        Some(Witness::EndowmentsGuarantee {
                            profile,
                            agent,
                            amount: x.amount(agent).clone(),
                            endowment: w.clone(),
                        }),
                        checked,
                        notes,
                    ));
                }
            }
        }
        Ok(self.report(Axiom::EndowmentsGuarantee, None, checked, notes))
    }

    fn peak_order_preservation(&self) -> Result<AxiomReport, AuditError> {
        let n = self.domain.n();
        let mut checked = 0u64;
        for tuple in self.classes.class_tuples(n) {
            let x = self.output(&tuple);
            for i in 0..n {
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
                    if x.amount(i) > x.amount(j) {
                        let profile = rep_profile(self.domain, &self.classes, &tuple);
                        return Ok(self.report(
                            Axiom::PeakOrderPreservation,
                            Some(Witness::PeakOrderPreservation {
                                profile,
                                lower: i,
                                higher: j,
                                allocation: x.clone(),
                            }),
                            checked,
                            Vec::new(),
                        ));
                    }
                }
            }
        }
        Ok(self.report(Axiom::PeakOrderPreservation, None, checked, Vec::new()))
    }
}

fn rep_profile(domain: &AuditDomain, classes: &ClassIndex, tuple: &[usize]) -> Profile {
    let indices: Vec<usize> = tuple.iter().map(|&c| classes.representative(c)).collect();
    domain.profile(&indices)
}

fn insert_at(opponents: &[usize], agent: usize, own: usize) -> Vec<usize> {
    let mut tuple = Vec::with_capacity(opponents.len() + 1);
    tuple.extend_from_slice(&opponents[..agent]);
    tuple.push(own);
    tuple.extend_from_slice(&opponents[agent..]);
    tuple
}

fn format_u64(v: u64) -> String {
    let mut s = String::new();
    core::fmt::write(&mut s, format_args!("{v}")).expect("formatting never fails");
    s
}

// ---------------------------------------------------------------------------
// exhaustive-mode audits (the reference route; no class assumptions)
// ---------------------------------------------------------------------------

fn exhaustive_audit(
    rule: &Rule,
    axiom: Axiom,
    domain: &AuditDomain,
) -> Result<AxiomReport, AuditError> {
    let n = domain.n();
    let m = domain.preferences().len() as u128;
    let profiles = m.pow(n as u32);
    let ops = match axiom {
        Axiom::StrategyProofness | Axiom::NonObviousManipulability => {
            (n as u128) * m * m * m.pow((n - 1) as u32)
        }
        Axiom::OwnPeakOnly | Axiom::NonBossiness => profiles * (n as u128) * m,
        Axiom::Efficiency => profiles * 32,
        _ => profiles,
    };
    if ops > EXHAUSTIVE_OP_BOUND {
        return Err(AuditError::TooLarge {
            size: ops,
            bound: EXHAUSTIVE_OP_BOUND,
        });
    }

    let grid = domain.grid();
    let share = grid.equal_share(n);
    let omega = grid.omega();
    let mut checked = 0u64;
    let mut witness: Option<Witness> = None;
    let notes = alloc::vec![String::from("mode=exhaustive")];

    match axiom {
        Axiom::Unanimity => {
            'outer: for tuple in domain.index_tuples() {
                checked += 1;
                let profile = domain.profile(&tuple);
                let peaks: Option<Vec<Rational>> = profile
                    .preferences()
                    .iter()
                    .map(|p| p.peak().within_omega().cloned())
                    .collect();
                let Some(peaks) = peaks else { continue };
                let sum: Rational = peaks.iter().sum();
                if sum != *omega {
                    continue;
                }
                let x = rule.evaluate(&profile)?;
                for i in 0..n {
                    if x.amount(i) != &peaks[i] {
                        witness = Some(Witness::Unanimity {
                            profile,
                            allocation: x,
                        });
                        break 'outer;
                    }
                }
            }
        }
        Axiom::Efficiency => {
            let candidates = feasible_allocations(grid, n)?;
            'outer_eff: for tuple in domain.index_tuples() {
                checked += 1;
                let profile = domain.profile(&tuple);
                let x = rule.evaluate(&profile)?;
                for candidate in &candidates {
                    if candidate != &x
                        && super::efficiency::pareto_dominates(&profile, candidate, &x)
                    {
                        witness = Some(Witness::Efficiency {
                            profile,
                            allocation: x,
                            dominating: candidate.clone(),
                        });
                        break 'outer_eff;
                    }
                }
            }
        }
        Axiom::PeaksOnly => {
            let mut seen: BTreeMap<Vec<Peak>, (Profile, Allocation)> = BTreeMap::new();
            for tuple in domain.index_tuples() {
                checked += 1;
                let profile = domain.profile(&tuple);
                let x = rule.evaluate(&profile)?;
                let peaks: Vec<Peak> = profile
                    .preferences()
                    .iter()
                    .map(|p| p.peak().clone())
                    .collect();
                match seen.get(&peaks) {
                    Some((first, y)) => {
                        if &x != y {
                            witness = Some(Witness::PeaksOnly {
                                profile: first.clone(),
                                replacement_profile: profile,
                                before: y.clone(),
                                after: x,
                            });
                            break;
                        }
                    }
                    None => {
                        seen.insert(peaks, (profile, x));
                    }
                }
            }
        }
        Axiom::OwnPeakOnly => {
            'outer_opo: for tuple in domain.index_tuples() {
                let profile = domain.profile(&tuple);
                let x = rule.evaluate(&profile)?;
                for agent in 0..n {
                    let peak = profile.preference(agent).peak().clone();
                    for replacement in domain.preferences() {
                        if replacement.peak() != &peak
                            || replacement == profile.preference(agent)
                        {
                            continue;
                        }
                        checked += 1;
                        let changed = profile.replace_preference(agent, replacement.clone());
                        let y = rule.evaluate(&changed)?;
                        if x.amount(agent) != y.amount(agent) {
                            witness = Some(Witness::OwnPeakOnly {
                                profile,
                                agent,
                                replacement: replacement.clone(),
                                before: x.amount(agent).clone(),
                                after: y.amount(agent).clone(),
                            });
                            break 'outer_opo;
                        }
                    }
                }
            }
        }
        Axiom::EqualDivisionLowerBound => {
            'outer_edlb: for tuple in domain.index_tuples() {
                checked += 1;
                let profile = domain.profile(&tuple);
                let x = rule.evaluate(&profile)?;
                for agent in 0..n {
                    let cmp = profile
                        .preference(agent)
                        .compare(grid, &share, x.amount(agent))
                        .expect("amounts lie in the domain");
                    if cmp == Ordering::Greater {
                        witness = Some(Witness::EqualDivisionLowerBound {
                            profile,
                            agent,
                            amount: x.amount(agent).clone(),
                        });
                        break 'outer_edlb;
                    }
                }
            }
        }
        Axiom::EqualDivisionGuarantee => {
            'outer_edg: for tuple in domain.index_tuples() {
                checked += 1;
                let profile = domain.profile(&tuple);
                let x = rule.evaluate(&profile)?;
                for agent in 0..n {
                    if profile.preference(agent).peak().within_omega() == Some(&share)
                        && x.amount(agent) != &share
                    {
                        witness = Some(Witness::EqualDivisionGuarantee {
                            profile,
                            agent,
                            amount: x.amount(agent).clone(),
                        });
                        break 'outer_edg;
                    }
                }
            }
        }
        Axiom::StrategyProofness | Axiom::NonObviousManipulability => {
            let obvious = axiom == Axiom::NonObviousManipulability;
            'outer_sp: for agent in 0..n {
                for truth in domain.preferences() {
                    for misreport in domain.preferences() {
                        if misreport == truth {
                            continue;
                        }
                        checked += 1;
                        let found = if obvious {
                            exhaustive_obvious_manipulation(
                                rule, agent, truth, misreport, domain,
                            )?
                        } else {
                            exhaustive_manipulation(rule, agent, truth, misreport, domain)?
                        };
                        if found.is_some() {
                            witness = found;
                            break 'outer_sp;
                        }
                    }
                }
            }
        }
        Axiom::NonBossiness => {
            'outer_nb: for tuple in domain.index_tuples() {
                let profile = domain.profile(&tuple);
                let x = rule.evaluate(&profile)?;
                for agent in 0..n {
                    for replacement in domain.preferences() {
                        if replacement == profile.preference(agent) {
                            continue;
                        }
                        checked += 1;
                        let changed = profile.replace_preference(agent, replacement.clone());
                        let y = rule.evaluate(&changed)?;
                        if x.amount(agent) == y.amount(agent) && x != y {
                            witness = Some(Witness::Bossiness {
                                profile,
                                agent,
                                replacement: replacement.clone(),
                                before: x,
                                after: y,
                            });
                            break 'outer_nb;
                        }
                    }
                }
            }
        }
        Axiom::NonDictatorship => {
            for agent in 0..n {
                let mut dictator = true;
                for tuple in domain.index_tuples() {
                    let profile = domain.profile(&tuple);
                    let Some(peak) = profile.preference(agent).peak().within_omega().cloned()
                    else {
                        continue;
                    };
                    checked += 1;
                    let x = rule.evaluate(&profile)?;
                    if x.amount(agent) != &peak {
                        dictator = false;
                        break;
                    }
                }
                if dictator {
                    witness = Some(Witness::Dictator { agent });
                    break;
                }
            }
        }
        Axiom::EndowmentsGuarantee => {
            let endowments = domain
                .endowments()
                .ok_or(AuditError::EndowmentsRequired)?
                .clone();
            'outer_eg: for tuple in domain.index_tuples() {
                checked += 1;
                let profile = domain.profile(&tuple);
                let x = rule.evaluate(&profile)?;
                for agent in 0..n {
                    let w = endowments.endowment(agent);
                    if profile.preference(agent).peak().within_omega() == Some(w)
                        && x.amount(agent) != w
                    {
                        witness = Some(Witness::EndowmentsGuarantee {
                            profile,
                            agent,
                            amount: x.amount(agent).clone(),
                            endowment: w.clone(),
                        });
                        break 'outer_eg;
                    }
                }
            }
        }
        Axiom::PeakOrderPreservation => {
            'outer_pop: for tuple in domain.index_tuples() {
                checked += 1;
                let profile = domain.profile(&tuple);
                let x = rule.evaluate(&profile)?;
                for i in 0..n {
                    for j in 0..n {
                        if i != j
                            && profile.preference(i).peak() <= profile.preference(j).peak()
                            && x.amount(i) > x.amount(j)
                        {
                            witness = Some(Witness::PeakOrderPreservation {
                                profile,
                                lower: i,
                                higher: j,
                                allocation: x,
                            });
                            break 'outer_pop;
                        }
                    }
                }
            }
        }
    }

    Ok(AxiomReport {
        check: CheckId::Axiom(axiom),
        verdict: if witness.is_some() {
            Verdict::Fail
        } else {
            Verdict::Pass
        },
        witness,
        catalog: domain.id(),
        checked,
        notes,
    })
}

fn exhaustive_manipulation(
    rule: &Rule,
    agent: usize,
    truth: &crate::prefcore::preference::Preference,
    misreport: &crate::prefcore::preference::Preference,
    domain: &AuditDomain,
) -> Result<Option<Witness>, AuditError> {
    let n = domain.n();
    let grid = domain.grid();
    for opp in Odometer::new(domain.preferences().len(), n - 1) {
        let profile =
            super::option_set::profile_with_agent(domain, agent, truth, |slot| opp[slot]);
        let misreported = profile.replace_preference(agent, misreport.clone());
        let x = rule.evaluate(&profile)?;
        let y = rule.evaluate(&misreported)?;
        if truth
            .compare(grid, y.amount(agent), x.amount(agent))
            .expect("amounts lie in the domain")
            == Ordering::Greater
        {
            return Ok(Some(Witness::Manipulation {
                profile,
                agent,
                misreport: misreport.clone(),
                truthful_amount: x.amount(agent).clone(),
                misreport_amount: y.amount(agent).clone(),
            }));
        }
    }
    Ok(None)
}

fn exhaustive_obvious_manipulation(
    rule: &Rule,
    agent: usize,
    truth: &crate::prefcore::preference::Preference,
    misreport: &crate::prefcore::preference::Preference,
    domain: &AuditDomain,
) -> Result<Option<Witness>, AuditError> {
    let Some(Witness::Manipulation {
        profile,
        truthful_amount,
        misreport_amount,
        ..
    }) = exhaustive_manipulation(rule, agent, truth, misreport, domain)?
    else {
        return Ok(None);
    };
    let grid = domain.grid();
    let truth_options = option_set_bruteforce_raw(rule, agent, truth, domain, u128::MAX)?;
    let mis_options = option_set_bruteforce_raw(rule, agent, misreport, domain, u128::MAX)?;
    let obvious = mis_options.values().iter().all(|x_mis| {
        truth_options.values().iter().any(|x_truth| {
            truth
                .compare(grid, x_mis, x_truth)
                .expect("options lie in the domain")
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
