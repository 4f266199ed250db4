//! Finite audit domains and the preference-class machinery.
//!
//! An [`AuditDomain`] is a catalog of preferences for a fixed grid and agent
//! count (plus optional endowments); audits quantify over all `|catalog|^n`
//! profiles. Exhaustive iteration is exact but only affordable at the
//! smallest sizes, so audits can instead partition the catalog by the
//! information a rule actually reads — the peak plus a declared list of
//! pairwise comparisons — and quantify over one representative per class
//! tuple. [`verify_profile_signature`] certifies the partition for a given
//! rule by exhaustively comparing against representatives; the equivalence
//! of the two audit modes is itself under test at small sizes.

use alloc::vec::Vec;
use core::cmp::Ordering;

use alloc::collections::BTreeMap;

use crate::prefcore::catalog::{enumerate_preferences, CatalogError, CatalogFamily, CatalogId};
use crate::prefcore::grid::Grid;
use crate::prefcore::preference::{Peak, Preference};
use crate::prefcore::profile::{Allocation, EndowmentProfile, Profile, ProfileError};
use crate::prefcore::rational::Rational;
use crate::rules::{Rule, RuleError};

/// A named finite profile domain: every combination of catalog preferences
/// across `n` agents, optionally with fixed individual endowments.
#[derive(Clone, Debug)]
pub struct AuditDomain {
    grid: Grid,
    n: usize,
    family: CatalogFamily,
    preferences: Vec<Preference>,
    endowments: Option<EndowmentProfile>,
}

impl AuditDomain {
    pub fn new(grid: Grid, n: usize, family: CatalogFamily) -> Result<Self, CatalogError> {
        if n < 2 || grid.resolution() % n != 0 {
            return Err(CatalogError::ResolutionNotDivisible {
                q: grid.resolution(),
                n,
            });
        }
        let preferences = enumerate_preferences(&grid, family)?;
        Ok(AuditDomain {
            grid,
            n,
            family,
            preferences,
            endowments: None,
        })
    }

    pub fn with_endowments(mut self, endowments: EndowmentProfile) -> Result<Self, ProfileError> {
        if endowments.len() != self.n {
            return Err(ProfileError::BadEndowments);
        }
        let sum: Rational = endowments.endowments().iter().sum();
        if &sum != self.grid.omega() {
            return Err(ProfileError::BadEndowments);
        }
        self.endowments = Some(endowments);
        Ok(self)
    }

    pub fn id(&self) -> CatalogId {
        CatalogId::new(
            self.family,
            self.grid.resolution(),
            self.n,
            self.grid.omega().clone(),
        )
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> CatalogFamily {
        self.family
    }

    pub fn preferences(&self) -> &[Preference] {
        &self.preferences
    }

    pub fn endowments(&self) -> Option<&EndowmentProfile> {
        self.endowments.as_ref()
    }

    /// Builds the profile whose agent `i` holds catalog preference
    /// `indices[i]`, with the domain's endowments attached if any.
    pub fn profile(&self, indices: &[usize]) -> Profile {
        debug_assert_eq!(indices.len(), self.n);
        let prefs = indices
            .iter()
            .map(|&k| self.preferences[k].clone())
            .collect();
        let profile =
            Profile::new(self.grid.clone(), prefs).expect("catalog preferences fit the grid");
        match &self.endowments {
            Some(w) => profile
                .with_endowments(w.clone())
                .expect("endowments validated at domain construction"),
            None => profile,
        }
    }

    pub fn profile_count(&self) -> u128 {
        (self.preferences.len() as u128).pow(self.n as u32)
    }

    /// Iterates all profiles as index tuples, lexicographically.
    pub fn index_tuples(&self) -> Odometer {
        Odometer::new(self.preferences.len(), self.n)
    }
}

/// Mixed-radix counter over `radix^len` tuples in lexicographic order.
pub struct Odometer {
    radix: usize,
    digits: Vec<usize>,
    started: bool,
    done: bool,
}

impl Odometer {
    pub fn new(radix: usize, len: usize) -> Self {
        Odometer {
            radix,
            digits: alloc::vec![0; len],
            started: false,
            done: radix == 0,
        }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.digits.clone());
        }
        // increment from the last digit so tuples ascend lexicographically
        let mut pos = self.digits.len();
        loop {
            if pos == 0 {
                self.done = true;
                return None;
            }
            pos -= 1;
            if self.digits[pos] + 1 < self.radix {
                self.digits[pos] += 1;
                for d in self.digits.iter_mut().skip(pos + 1) {
                    *d = 0;
                }
                return Some(self.digits.clone());
            }
        }
    }
}

/// Classification key: the peak plus the outcomes of the declared
/// comparisons. Two preferences with the same key are indistinguishable to
/// any rule that reads only that information.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PrefKey {
    pub peak: Peak,
    pub comparisons: Vec<Ordering>,
}

/// Partition of a domain's catalog by [`PrefKey`].
#[derive(Clone, Debug)]
pub struct ClassIndex {
    keys: Vec<PrefKey>,
    members: Vec<Vec<usize>>,
    key_of: Vec<usize>,
}

impl ClassIndex {
    pub fn build(domain: &AuditDomain, comparisons: &[(Rational, Rational)]) -> Self {
        let grid = domain.grid();
        let mut by_key: BTreeMap<PrefKey, Vec<usize>> = BTreeMap::new();
        let mut raw_keys = Vec::with_capacity(domain.preferences().len());
        for (idx, pref) in domain.preferences().iter().enumerate() {
            let cmp_values = comparisons
                .iter()
                .map(|(a, b)| {
                    pref.compare(grid, a, b)
                        .expect("comparison points lie in the domain")
                })
                .collect();
            let key = PrefKey {
                peak: pref.peak().clone(),
                comparisons: cmp_values,
            };
            raw_keys.push(key.clone());
            by_key.entry(key).or_default().push(idx);
        }
        let keys: Vec<PrefKey> = by_key.keys().cloned().collect();
        let members: Vec<Vec<usize>> = by_key.values().cloned().collect();
        let mut key_of = alloc::vec![0usize; domain.preferences().len()];
        for (pos, key) in keys.iter().enumerate() {
            for &m in &members[pos] {
                debug_assert_eq!(&raw_keys[m], key);
                key_of[m] = pos;
            }
        }
        ClassIndex {
            keys,
            members,
            key_of,
        }
    }

    pub fn class_count(&self) -> usize {
        self.keys.len()
    }

    pub fn key(&self, class: usize) -> &PrefKey {
        &self.keys[class]
    }

    pub fn members(&self, class: usize) -> &[usize] {
        &self.members[class]
    }

    /// The canonical representative: the first catalog preference in the
    /// class (catalog order is deterministic, so reports are too).
    pub fn representative(&self, class: usize) -> usize {
        self.members[class][0]
    }

    pub fn class_of(&self, pref_index: usize) -> usize {
        self.key_of[pref_index]
    }

    /// Classes whose peak equals the given class's peak (used for own-peak
    /// deviations).
    pub fn same_peak_classes(&self, class: usize) -> Vec<usize> {
        let peak = &self.keys[class].peak;
        (0..self.keys.len())
            .filter(|&c| &self.keys[c].peak == peak)
            .collect()
    }

    /// Iterates class tuples for `n` agents, lexicographically.
    pub fn class_tuples(&self, n: usize) -> Odometer {
        Odometer::new(self.keys.len(), n)
    }
}

/// Exhaustively certifies that a rule's output depends on the profile only
/// through the per-agent [`PrefKey`]s declared by `rule.comparisons(..)`:
/// every full profile must map to the same allocation as the representative
/// profile of its class tuple. Returns the number of profiles checked.
pub fn verify_profile_signature(rule: &Rule, domain: &AuditDomain) -> Result<u64, SignatureError> {
    let n = domain.n();
    let m = domain.preferences().len();
    let classes = ClassIndex::build(domain, &rule.comparisons(domain.grid(), n));
    let base = classes.class_count();
    let mut rep_outputs: Vec<Option<Allocation>> = alloc::vec![None; base.pow(n as u32)];
    let mut checked = 0u64;
    let mut tuple = alloc::vec![0usize; n];
    let mut profile = domain.profile(&tuple);
    loop {
        let class_id = tuple
            .iter()
            .fold(0usize, |acc, &p| acc * base + classes.class_of(p));
        let output = rule.evaluate(&profile).map_err(SignatureError::Rule)?;
        checked += 1;
        match &rep_outputs[class_id] {
            Some(expected) => {
                if expected != &output {
                    return Err(SignatureError::Mismatch {
                        indices: tuple,
                        expected: expected.clone(),
                        got: output,
                    });
                }
            }
            None => rep_outputs[class_id] = Some(output),
        }
        // advance the odometer, patching only the changed slots
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(checked);
            }
            pos -= 1;
            if tuple[pos] + 1 < m {
                tuple[pos] += 1;
                profile.set_preference(pos, domain.preferences()[tuple[pos]].clone());
                for slot in pos + 1..n {
                    tuple[slot] = 0;
                    profile.set_preference(slot, domain.preferences()[0].clone());
                }
                break;
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum SignatureError {
    Rule(RuleError),
    Mismatch {
        indices: Vec<usize>,
        expected: Allocation,
        got: Allocation,
    },
}
