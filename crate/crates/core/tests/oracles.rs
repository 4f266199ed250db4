//! Dual-route checks: every fast path in the audit machinery is held against
//! an independent reference route at sizes where the reference is exhaustive.

use std::cmp::Ordering;

use allot_core::audit::axioms::{audit_axiom, AuditMode, Axiom, ALL_AXIOMS};
use allot_core::audit::domain::{verify_profile_signature, AuditDomain};
use allot_core::audit::efficiency::{
    robust_efficiency, robust_efficiency_oracle, robust_efficient_allocations,
};
use allot_core::audit::option_set::{
    option_set_agreeable_closed_form, option_set_bruteforce, option_set_bruteforce_raw,
};
use allot_core::audit::report::replay_witness;
use allot_core::audit::search::robust_efficient_indices;
use allot_core::coalitions::coalition::Coalition;
use allot_core::coalitions::selection::{AgreeableSelection, NestedChain, OmegaSelection};
use allot_core::prefcore::catalog::{feasible_allocations, CatalogFamily};
use allot_core::prefcore::grid::Grid;
use allot_core::prefcore::profile::EndowmentProfile;
use allot_core::prefcore::rational::{rat, rat_int};
use allot_core::rules::Rule;

fn grid(q: usize) -> Grid {
    Grid::new(rat_int(1), q).unwrap()
}

fn chain_rule(n: usize, coalitions: Vec<Coalition>) -> Rule {
    Rule::agreeable(AgreeableSelection::NestedChain(
        NestedChain::new(n, coalitions).unwrap(),
    ))
}

fn shipped_rules(n: usize) -> Vec<Rule> {
    let grand = Coalition::grand(n);
    let tail = Coalition::from_members(1..n);
    vec![
        Rule::agreeable(AgreeableSelection::StatusQuo),
        chain_rule(n, vec![grand, tail, Coalition::empty()]),
        Rule::agreeable(AgreeableSelection::ShapeDependent),
        Rule::uniform(),
        Rule::equal_division(),
        Rule::boundary(),
        Rule::conditional_zero(),
        Rule::reallocation(OmegaSelection::StatusQuo),
    ]
}

/// Class-mode audits agree with raw exhaustive audits for every shipped rule
/// and every axiom on the full beyond catalog at q=2, n=2.
#[test]
fn class_mode_matches_exhaustive_mode() {
    let g = grid(2);
    let domain = AuditDomain::new(g.clone(), 2, CatalogFamily::WeakOrdersBeyond)
        .unwrap()
        .with_endowments(EndowmentProfile::equal_split(&g, 2))
        .unwrap();
    for rule in shipped_rules(2) {
        for axiom in ALL_AXIOMS {
            let classed = audit_axiom(&rule, axiom, &domain, AuditMode::Classes).unwrap();
            let raw = audit_axiom(&rule, axiom, &domain, AuditMode::Exhaustive).unwrap();
            assert_eq!(
                classed.verdict,
                raw.verdict,
                "rule {} axiom {axiom}: classes={:?} exhaustive={:?}",
                rule.name(),
                classed.verdict,
                raw.verdict,
            );
            // failing witnesses from either route must replay
            for report in [&classed, &raw] {
                if let Some(witness) = &report.witness {
                    assert!(
                        replay_witness(&rule, witness),
                        "witness replay failed: rule {} axiom {axiom}",
                        rule.name(),
                    );
                }
            }
        }
    }
}

/// The verified signatures behind class-mode audits hold exhaustively.
#[test]
fn profile_signatures_hold() {
    let g = grid(2);
    let domain = AuditDomain::new(g.clone(), 2, CatalogFamily::WeakOrdersBeyond)
        .unwrap()
        .with_endowments(EndowmentProfile::equal_split(&g, 2))
        .unwrap();
    for rule in shipped_rules(2) {
        let checked = verify_profile_signature(&rule, &domain).unwrap_or_else(|e| {
            panic!("signature violated for {}: {e:?}", rule.name())
        });
        assert_eq!(checked, 22 * 22);
    }
}

/// Three-agent signature verification for each distinct information path: a
/// peak-sum selection, the shape-reading selection, the comparison-reading
/// rule, and the endowment path. The remaining rules reuse these paths and
/// are verified exhaustively at two agents above.
#[test]
fn profile_signatures_hold_three_agents() {
    let g = grid(3);
    let domain = AuditDomain::new(g.clone(), 3, CatalogFamily::WeakOrdersBeyond)
        .unwrap()
        .with_endowments(EndowmentProfile::equal_split(&g, 3))
        .unwrap();
    let rules = [
        Rule::agreeable(AgreeableSelection::StatusQuo),
        Rule::agreeable(AgreeableSelection::ShapeDependent),
        Rule::conditional_zero(),
        Rule::reallocation(OmegaSelection::StatusQuo),
    ];
    for rule in rules {
        verify_profile_signature(&rule, &domain).unwrap_or_else(|e| {
            panic!("signature violated for {}: {e:?}", rule.name())
        });
    }
}

/// Closed-form option sets equal brute force for selection-induced rules;
/// brute force over classes equals brute force over the raw catalog.
#[test]
fn option_set_routes_agree() {
    let g = grid(2);
    let domain = AuditDomain::new(g.clone(), 2, CatalogFamily::WeakOrdersBeyond).unwrap();
    let rules = [
        Rule::agreeable(AgreeableSelection::StatusQuo),
        chain_rule(2, vec![Coalition::grand(2), Coalition::from_members([1]), Coalition::empty()]),
        chain_rule(2, vec![Coalition::grand(2), Coalition::from_members([0]), Coalition::empty()]),
    ];
    for rule in &rules {
        for pref in domain.preferences() {
            for agent in 0..2 {
                let brute = option_set_bruteforce(rule, agent, pref, &domain).unwrap();
                let raw = option_set_bruteforce_raw(rule, agent, pref, &domain, 1_000_000)
                    .unwrap();
                let closed = option_set_agreeable_closed_form(pref, g.omega(), 2);
                assert_eq!(brute, raw, "class reduction differs for {}", rule.name());
                assert_eq!(brute, closed, "closed form differs for {}", rule.name());
            }
        }
    }
}

/// The combinatorial robust-efficiency test agrees with literal completion
/// enumeration on every (peak vector, allocation) pair at q=2, n=2 and
/// q=3, n=3.
#[test]
fn robust_efficiency_matches_completion_oracle() {
    for (q, n) in [(2usize, 2usize), (3, 3)] {
        let g = grid(q);
        let allocations = feasible_allocations(&g, n).unwrap();
        let cells: Vec<Vec<usize>> =
            allot_core::audit::domain::Odometer::new(q + 1, n).collect();
        for cell in &cells {
            let peaks: Vec<_> = cell.iter().map(|&k| g.point(k).clone()).collect();
            for allocation in &allocations {
                let fast = robust_efficiency(&g, &peaks, allocation);
                let slow =
                    robust_efficiency_oracle(&g, &peaks, allocation, CatalogFamily::WeakOrders)
                        .unwrap();
                assert_eq!(fast, slow, "q={q} n={n} peaks={peaks:?}");
                // the integer-index variant used inside the table search
                let indices: Vec<usize> = allocation
                    .amounts()
                    .iter()
                    .map(|a| g.index_of(a).unwrap())
                    .collect();
                assert_eq!(fast, robust_efficient_indices(cell, &indices));
            }
        }
    }
}

/// Spec'd robust-efficiency endpoints.
#[test]
fn robust_efficiency_fixed_points() {
    let g3 = grid(3);
    let all_top = vec![rat_int(1), rat_int(1), rat_int(1)];
    // equal split among all-top peaks is dominated
    let equal = allot_core::prefcore::profile::Allocation::new(
        &rat_int(1),
        vec![rat(1, 3), rat(1, 3), rat(1, 3)],
    )
    .unwrap();
    assert!(!robust_efficiency(&g3, &all_top, &equal));
    // peaks summing to omega: the peak allocation survives
    let peaks = vec![rat_int(0), rat(1, 3), rat(2, 3)];
    let at_peaks = allot_core::prefcore::profile::Allocation::new(
        &rat_int(1),
        vec![rat_int(0), rat(1, 3), rat(2, 3)],
    )
    .unwrap();
    assert!(robust_efficiency(&g3, &peaks, &at_peaks));
    // n=2 reversal is dominated under every completion
    let g2 = grid(2);
    let reversed = allot_core::prefcore::profile::Allocation::new(
        &rat_int(1),
        vec![rat_int(1), rat_int(0)],
    )
    .unwrap();
    assert!(!robust_efficiency(&g2, &[rat_int(0), rat_int(1)], &reversed));
}

/// The all-top-peaks cell keeps its corner allocations while the interior
/// middle-peaks cell at q=3, n=3 empties entirely.
#[test]
fn robust_sets_at_the_two_contested_cells() {
    let g = grid(3);
    let corners = robust_efficient_allocations(&g, &[rat_int(1), rat_int(1), rat_int(1)]).unwrap();
    assert_eq!(corners.len(), 3);
    for a in &corners {
        assert!(a.amounts().contains(&rat_int(1)));
        // confirmed against the completion oracle
        assert!(robust_efficiency_oracle(
            &g,
            &[rat_int(1), rat_int(1), rat_int(1)],
            a,
            CatalogFamily::WeakOrders
        )
        .unwrap());
    }
    let middle = robust_efficient_allocations(&g, &[rat(2, 3), rat(2, 3), rat(2, 3)]).unwrap();
    assert!(middle.is_empty());
    for a in feasible_allocations(&g, 3).unwrap() {
        assert!(!robust_efficiency_oracle(
            &g,
            &[rat(2, 3), rat(2, 3), rat(2, 3)],
            &a,
            CatalogFamily::WeakOrders
        )
        .unwrap());
    }
}

/// Efficiency audits over the single-peaked sub-catalog: the uniform rule
/// passes there and fails on the general catalog.
#[test]
fn uniform_efficiency_depends_on_the_catalog() {
    let g = grid(2);
    let single_peaked = AuditDomain::new(g.clone(), 2, CatalogFamily::SinglePeaked).unwrap();
    let general = AuditDomain::new(g, 2, CatalogFamily::WeakOrdersBeyond).unwrap();
    let uniform = Rule::uniform();
    let sp_report =
        audit_axiom(&uniform, Axiom::Efficiency, &single_peaked, AuditMode::Exhaustive).unwrap();
    assert!(sp_report.passed());
    let general_report =
        audit_axiom(&uniform, Axiom::Efficiency, &general, AuditMode::Classes).unwrap();
    assert!(!general_report.passed());
    assert!(replay_witness(&uniform, general_report.witness.as_ref().unwrap()));
}

/// Strategy-proofness implies non-obvious manipulability on every catalog:
/// whenever the SP audit passes, the NOM audit must pass too.
#[test]
fn sp_implies_nom() {
    let g = grid(2);
    let domain = AuditDomain::new(g, 2, CatalogFamily::WeakOrdersBeyond).unwrap();
    for rule in shipped_rules(2) {
        if rule.metadata().needs_endowments {
            continue;
        }
        let sp = audit_axiom(&rule, Axiom::StrategyProofness, &domain, AuditMode::Classes)
            .unwrap();
        let nom = audit_axiom(
            &rule,
            Axiom::NonObviousManipulability,
            &domain,
            AuditMode::Classes,
        )
        .unwrap();
        if sp.passed() {
            assert!(nom.passed(), "{} passes SP but fails NOM", rule.name());
        }
        if !nom.passed() {
            assert!(!sp.passed(), "{} fails NOM but passes SP", rule.name());
        }
    }
}

/// The exact fixed points the audits are expected to hit on the beyond
/// catalog at q=2, n=2 (pass/fail per rule for the characterizing axioms).
#[test]
fn characterizing_axiom_fixed_points() {
    let g = grid(2);
    let domain = AuditDomain::new(g, 2, CatalogFamily::WeakOrdersBeyond).unwrap();
    let cases: Vec<(Rule, [bool; 4])> = vec![
        // unanimity, nom, opo, edg
        (Rule::agreeable(AgreeableSelection::StatusQuo), [true, true, true, true]),
        (Rule::equal_division(), [false, true, true, true]),
        (Rule::boundary(), [true, true, true, false]),
        (Rule::uniform(), [true, false, true, true]),
        (Rule::conditional_zero(), [true, true, false, true]),
    ];
    let axioms = [
        Axiom::Unanimity,
        Axiom::NonObviousManipulability,
        Axiom::OwnPeakOnly,
        Axiom::EqualDivisionGuarantee,
    ];
    for (rule, expected) in &cases {
        for (axiom, expect_pass) in axioms.iter().zip(expected) {
            let report = audit_axiom(rule, *axiom, &domain, AuditMode::Classes).unwrap();
            assert_eq!(
                report.passed(),
                *expect_pass,
                "rule {} axiom {axiom}",
                rule.name()
            );
            if let Some(witness) = &report.witness {
                assert!(replay_witness(rule, witness));
            }
        }
    }
}

/// Agreeable-rule option sets pin down both manipulation detectors on a
/// hand-checked uniform-rule instance: exaggerating toward the top is not a
/// manipulation for a 3/4-peak truth-teller.
#[test]
fn uniform_exaggeration_verdict_is_frozen() {
    use allot_core::audit::manipulation::is_manipulation;
    use allot_core::prefcore::preference::Preference;
    let g = grid(4);
    let domain = AuditDomain::new(g.clone(), 2, CatalogFamily::WeakOrdersBeyond).unwrap();
    let rule = Rule::uniform();
    let truth = Preference::peak_dip(&g, &rat(3, 4), &rat_int(0)).unwrap();
    let misreport = Preference::peak_dip(&g, &rat_int(1), &rat_int(0)).unwrap();
    assert!(is_manipulation(&rule, 0, &truth, &misreport, &domain)
        .unwrap()
        .is_none());
    // sanity: the comparison machinery is alive — the same misreport against
    // the truthful outcome ordering is well defined
    assert_eq!(
        truth.compare(&g, &rat(3, 4), &rat(1, 2)).unwrap(),
        Ordering::Greater
    );
}
