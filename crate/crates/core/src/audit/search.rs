//! Desk-scale impossibility search over peaks-only rule tables.
//!
//! A [`RuleTable`] fixes one feasible grid allocation per peak vector
//! (peaks within the endowment). The search space is every such table; the
//! searched axioms are checked exactly against the unique-top weak-order
//! catalog, entirely in grid-index arithmetic.
//!
//! The restriction to peaks-only tables is part of every report: with two
//! agents, own-peak-onliness and feasibility force peaks-onliness, and with
//! more agents own-peak-onliness plus non-bossiness do; searches over sets
//! lacking those axioms state the restriction rather than claim the full
//! rule space.
//!
//! Strategy: when the full table space fits the enumeration budget, every
//! table is examined. Otherwise per-cell domains are pruned by the
//! cell-local axioms first — an emptied cell is an immediate unsatisfiability
//! certificate — and the remainder is covered by backtracking with fail-first
//! cell ordering (ties broken by lexicographic peak vector).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::prefcore::catalog::{
    weak_order_levels, CatalogError, CatalogFamily, CatalogId,
};
use crate::prefcore::grid::Grid;
use crate::prefcore::rational::Rational;

use super::axioms::Axiom;
use super::domain::Odometer;

/// A peaks-only rule as a finite table: one feasible grid allocation per
/// peak vector over the grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleTable {
    q: usize,
    n: usize,
    omega: Rational,
    /// canonical feasible allocations (grid indices), lexicographic
    allocations: Vec<Vec<usize>>,
    /// per peak-vector cell (lexicographic), an index into `allocations`
    cells: Vec<u16>,
}

impl RuleTable {
    pub fn new(
        q: usize,
        n: usize,
        omega: Rational,
        allocations: Vec<Vec<usize>>,
        cells: Vec<u16>,
    ) -> Self {
        debug_assert_eq!(cells.len(), (q + 1).pow(n as u32));
        RuleTable {
            q,
            n,
            omega,
            allocations,
            cells,
        }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> &Rational {
        &self.omega
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Mixed-radix cell id, agent 0 most significant.
    pub fn cell_index(&self, peaks: &[usize]) -> usize {
        peaks.iter().fold(0usize, |acc, &k| acc * (self.q + 1) + k)
    }

    pub fn peaks_of_cell(&self, mut cell: usize) -> Vec<usize> {
        let mut peaks = alloc::vec![0usize; self.n];
        for slot in (0..self.n).rev() {
            peaks[slot] = cell % (self.q + 1);
            cell /= self.q + 1;
        }
        peaks
    }

    /// Grid-index allocation at a peak vector.
    pub fn allocation_indices(&self, peaks: &[usize]) -> &[usize] {
        &self.allocations[self.cells[self.cell_index(peaks)] as usize]
    }

    /// Rational amounts at a peak vector.
    pub fn allocation_at(&self, peaks: &[usize]) -> Vec<Rational> {
        let step = &self.omega / crate::prefcore::rational::rat_int(self.q as i64);
        self.allocation_indices(peaks)
            .iter()
            .map(|&k| crate::prefcore::rational::rat_int(k as i64) * &step)
            .collect()
    }

    pub fn assignments(&self) -> &[u16] {
        &self.cells
    }

    /// True when some agent receives their peak at every cell.
    pub fn is_dictatorial(&self) -> bool {
        self.dictator().is_some()
    }

    pub fn dictator(&self) -> Option<usize> {
        (0..self.n).find(|&agent| {
            (0..self.cells.len()).all(|cell| {
                let peaks = self.peaks_of_cell(cell);
                self.allocations[self.cells[cell] as usize][agent] == peaks[agent]
            })
        })
    }
}

#[derive(Clone, Debug)]
pub enum SearchError {
    /// Axiom not expressible over endowment-free rule tables.
    UnsupportedAxiom(Axiom),
    /// Node budget exhausted; progress statistics attached.
    BudgetExceeded {
        nodes: u64,
        tables_examined: u64,
        progress: String,
    },
    Catalog(CatalogError),
}

impl fmt::Display for SearchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchError::UnsupportedAxiom(a) => {
                write!(f, "axiom `{a}` is not supported in table search")
            }
            SearchError::BudgetExceeded {
                nodes,
                tables_examined,
                progress,
            } => write!(
                f,
                "search budget exceeded after {nodes} nodes / {tables_examined} tables ({progress})"
            ),
            SearchError::Catalog(e) => write!(f, "{e}"),
        }
    }
}

impl From<CatalogError> for SearchError {
    fn from(e: CatalogError) -> Self {
        SearchError::Catalog(e)
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub axioms: Vec<Axiom>,
    /// Full-enumeration ceiling (number of tables).
    pub enumerate_budget: u64,
    /// Backtracking node ceiling.
    pub node_budget: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            axioms: Vec::new(),
            enumerate_budget: 20_000_000,
            node_budget: 50_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnsatCertificate {
    /// Cell-local pruning left this peak vector with no allocation.
    EmptyCell {
        peaks: Vec<Rational>,
        axioms: Vec<Axiom>,
    },
    /// The whole (possibly pruned) space was covered without a survivor.
    Exhausted { tables_examined: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Unsat { certificate: UnsatCertificate },
    Survivors { tables: Vec<RuleTable> },
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub q: usize,
    pub n: usize,
    pub omega: Rational,
    pub axioms: Vec<Axiom>,
    pub catalog: CatalogId,
    pub restriction: String,
    pub outcome: SearchOutcome,
    pub tables_examined: u64,
    pub nodes: u64,
    pub notes: Vec<String>,
}

/// Integer-level search context: peak cells, feasible allocations, and the
/// unique-top weak orders grouped by peak, all as grid indices and ranks.
struct SearchSpace {
    q: usize,
    n: usize,
    equal_index: usize,
    cells: Vec<Vec<usize>>,
    allocations: Vec<Vec<usize>>,
    prefs_by_peak: Vec<Vec<Vec<u8>>>,
}

impl SearchSpace {
    fn build(q: usize, n: usize) -> SearchSpace {
        let m = q + 1;
        let cells = Odometer::new(m, n).collect();
        let mut allocations = Vec::new();
        collect_compositions(q, n, &mut allocations);
        let mut prefs_by_peak = alloc::vec![Vec::new(); m];
        for levels in weak_order_levels(m) {
            let max = levels.iter().max().copied().unwrap_or(0);
            let tops: Vec<usize> = (0..m).filter(|&k| levels[k] == max).collect();
            if tops.len() == 1 {
                prefs_by_peak[tops[0]].push(levels);
            }
        }
        SearchSpace {
            q,
            n,
            equal_index: q / n,
            cells,
            allocations,
            prefs_by_peak,
        }
    }

    /// Cell-local admissibility of an allocation under the cell-local
    /// axioms of the set.
    fn cell_allows(&self, axioms: &[Axiom], peaks: &[usize], alloc_ix: &[usize]) -> bool {
        for &axiom in axioms {
            let ok = match axiom {
                Axiom::Unanimity => {
                    let total: usize = peaks.iter().sum();
                    total != self.q || alloc_ix == peaks
                }
                Axiom::EqualDivisionGuarantee => (0..self.n)
                    .all(|i| peaks[i] != self.equal_index || alloc_ix[i] == self.equal_index),
                Axiom::EqualDivisionLowerBound => (0..self.n)
                    .all(|i| alloc_ix[i] == peaks[i] || alloc_ix[i] == self.equal_index),
                Axiom::Efficiency => robust_efficient_indices(peaks, alloc_ix),
                Axiom::PeakOrderPreservation => (0..self.n).all(|i| {
                    (0..self.n).all(|j| peaks[i] > peaks[j] || alloc_ix[i] <= alloc_ix[j])
                }),
                _ => true,
            };
            if !ok {
                return false;
            }
        }
        true
    }

    /// Full-table check of one axiom.
    fn table_satisfies(&self, cells: &[u16], axiom: Axiom) -> bool {
        match axiom {
            Axiom::Unanimity
            | Axiom::EqualDivisionGuarantee
            | Axiom::EqualDivisionLowerBound
            | Axiom::Efficiency
            | Axiom::PeakOrderPreservation => self.cells.iter().enumerate().all(|(id, peaks)| {
                self.cell_allows(
                    core::slice::from_ref(&axiom),
                    peaks,
                    &self.allocations[cells[id] as usize],
                )
            }),
            // tables are peaks-only by construction
            Axiom::OwnPeakOnly | Axiom::PeaksOnly => true,
            Axiom::NonBossiness => self.non_bossy(cells),
            Axiom::StrategyProofness => !self.has_manipulation(cells),
            Axiom::NonObviousManipulability => !self.has_obvious_manipulation(cells),
            Axiom::NonDictatorship => !self.dictatorial(cells),
            Axiom::EndowmentsGuarantee => true,
        }
    }

    fn amount(&self, cells: &[u16], cell_id: usize, agent: usize) -> usize {
        self.allocations[cells[cell_id] as usize][agent]
    }

    fn non_bossy(&self, cells: &[u16]) -> bool {
        let m = self.q + 1;
        for (id, peaks) in self.cells.iter().enumerate() {
            for agent in 0..self.n {
                let stride = m.pow((self.n - 1 - agent) as u32);
                for other in 0..m {
                    if other == peaks[agent] {
                        continue;
                    }
                    let oid =
                        (id as isize + (other as isize - peaks[agent] as isize) * stride as isize)
                            as usize;
                    if self.amount(cells, id, agent) == self.amount(cells, oid, agent)
                        && cells[id] != cells[oid]
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn dictatorial(&self, cells: &[u16]) -> bool {
        (0..self.n).any(|agent| {
            self.cells
                .iter()
                .enumerate()
                .all(|(id, peaks)| self.amount(cells, id, agent) == peaks[agent])
        })
    }

    /// Outcomes an agent reporting peak `k` can get, over opponent cells.
    fn option_sets(&self, cells: &[u16], agent: usize) -> Vec<Vec<usize>> {
        let m = self.q + 1;
        let mut sets = alloc::vec![Vec::new(); m];
        for (id, peaks) in self.cells.iter().enumerate() {
            let amount = self.amount(cells, id, agent);
            let set = &mut sets[peaks[agent]];
            if !set.contains(&amount) {
                set.push(amount);
            }
        }
        for set in &mut sets {
            set.sort_unstable();
        }
        sets
    }

    fn has_manipulation(&self, cells: &[u16]) -> bool {
        self.some_manipulation(cells, |_, _, _| true)
    }

    fn has_obvious_manipulation(&self, cells: &[u16]) -> bool {
        for agent in 0..self.n {
            let options = self.option_sets(cells, agent);
            if self.some_manipulation_for_agent(cells, agent, |truth_levels, k_truth, k_mis| {
                options[k_mis].iter().all(|&x_mis| {
                    options[k_truth]
                        .iter()
                        .any(|&x_truth| truth_levels[x_mis] > truth_levels[x_truth])
                })
            }) {
                return true;
            }
        }
        false
    }

    fn some_manipulation<F>(&self, cells: &[u16], extra: F) -> bool
    where
        F: Fn(&[u8], usize, usize) -> bool,
    {
        (0..self.n).any(|agent| self.some_manipulation_for_agent(cells, agent, &extra))
    }

    /// Scans (truth peak, truth preference, misreport peak, opponents) for a
    /// strict improvement; `extra` filters candidate (truth, misreport)
    /// pairs (used for the obviousness condition).
    fn some_manipulation_for_agent<F>(&self, cells: &[u16], agent: usize, extra: F) -> bool
    where
        F: Fn(&[u8], usize, usize) -> bool,
    {
        let m = self.q + 1;
        let stride = m.pow((self.n - 1 - agent) as u32);
        for k_truth in 0..m {
            for truth_levels in &self.prefs_by_peak[k_truth] {
                for k_mis in 0..m {
                    if k_mis == k_truth {
                        continue;
                    }
                    if !extra(truth_levels, k_truth, k_mis) {
                        continue;
                    }
                    // iterate cells whose own coordinate equals k_truth
                    for (id, peaks) in self.cells.iter().enumerate() {
                        if peaks[agent] != k_truth {
                            continue;
                        }
                        let mis_id = (id as isize
                            + (k_mis as isize - k_truth as isize) * stride as isize)
                            as usize;
                        let x_truth = self.amount(cells, id, agent);
                        let x_mis = self.amount(cells, mis_id, agent);
                        if truth_levels[x_mis] > truth_levels[x_truth] {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

/// Robust efficiency in grid indices: at most one agent off peak, or all
/// off-peak agents at zero.
pub fn robust_efficient_indices(peaks: &[usize], allocation: &[usize]) -> bool {
    let mut off_peak = 0usize;
    let mut off_total = 0usize;
    for (k, x) in peaks.iter().zip(allocation) {
        if x != k {
            off_peak += 1;
            off_total += x;
        }
    }
    off_peak <= 1 || off_total == 0
}

fn collect_compositions(q: usize, n: usize, out: &mut Vec<Vec<usize>>) {
    let mut parts = alloc::vec![0usize; n];
    fn rec(q: usize, pos: usize, remaining: usize, parts: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos + 1 == parts.len() {
            if remaining <= q {
                parts[pos] = remaining;
                out.push(parts.clone());
            }
            return;
        }
        for k in 0..=remaining.min(q) {
            parts[pos] = k;
            rec(q, pos + 1, remaining - k, parts, out);
        }
    }
    rec(q, 0, q, &mut parts, out);
}

/// Searches all peaks-only rule tables on the grid for the axiom set.
pub fn impossibility_search(
    grid: &Grid,
    n: usize,
    config: &SearchConfig,
) -> Result<SearchReport, SearchError> {
    for &axiom in &config.axioms {
        if axiom == Axiom::EndowmentsGuarantee {
            return Err(SearchError::UnsupportedAxiom(axiom));
        }
    }
    let q = grid.resolution();
    let space = SearchSpace::build(q, n);
    let cell_count = space.cells.len();
    let alloc_count = space.allocations.len();
    let catalog = CatalogId::new(CatalogFamily::WeakOrders, q, n, grid.omega().clone());
    let restriction = String::from(
        "search restricted to peaks-only rule tables over grid peaks within the endowment",
    );
    let mut notes = Vec::new();
    if config
        .axioms
        .iter()
        .any(|a| matches!(a, Axiom::OwnPeakOnly | Axiom::PeaksOnly))
    {
        notes.push(String::from(
            "own-peak-onliness and peaks-onliness hold by construction for rule tables",
        ));
    }

    let full_space = (alloc_count as u128).pow(cell_count as u32);
    let mut tables_examined = 0u64;
    let mut nodes = 0u64;

    if full_space <= config.enumerate_budget as u128 {
        // cover the complete table space, no pruning
        let mut survivors = Vec::new();
        for assignment in Odometer::new(alloc_count, cell_count) {
            tables_examined += 1;
            let cells: Vec<u16> = assignment.iter().map(|&a| a as u16).collect();
            if config
                .axioms
                .iter()
                .all(|&axiom| space.table_satisfies(&cells, axiom))
            {
                survivors.push(RuleTable::new(
                    q,
                    n,
                    grid.omega().clone(),
                    space.allocations.clone(),
                    cells,
                ));
            }
        }
        let outcome = if survivors.is_empty() {
            SearchOutcome::Unsat {
                certificate: UnsatCertificate::Exhausted { tables_examined },
            }
        } else {
            SearchOutcome::Survivors { tables: survivors }
        };
        return Ok(SearchReport {
            q,
            n,
            omega: grid.omega().clone(),
            axioms: config.axioms.clone(),
            catalog,
            restriction,
            outcome,
            tables_examined,
            nodes,
            notes,
        });
    }

    // per-cell pruning by the cell-local axioms
    let mut domains: Vec<Vec<u16>> = Vec::with_capacity(cell_count);
    for peaks in &space.cells {
        let allowed: Vec<u16> = (0..alloc_count)
            .filter(|&a| space.cell_allows(&config.axioms, peaks, &space.allocations[a]))
            .map(|a| a as u16)
            .collect();
        if allowed.is_empty() {
            let peak_values: Vec<Rational> =
                peaks.iter().map(|&k| grid.point(k).clone()).collect();
            notes.push(String::from(
                "per-cell pruning emptied a cell; the axiom set is unsatisfiable",
            ));
            return Ok(SearchReport {
                q,
                n,
                omega: grid.omega().clone(),
                axioms: config.axioms.clone(),
                catalog,
                restriction,
                outcome: SearchOutcome::Unsat {
                    certificate: UnsatCertificate::EmptyCell {
                        peaks: peak_values,
                        axioms: config.axioms.clone(),
                    },
                },
                tables_examined,
                nodes,
                notes,
            });
        }
        domains.push(allowed);
    }
    notes.push(String::from(
        "table space over budget; cell domains pruned by the cell-local axioms",
    ));

    let pruned_space: u128 = domains.iter().map(|d| d.len() as u128).product();
    if pruned_space <= config.enumerate_budget as u128 {
        // enumerate the pruned product space
        let mut survivors = Vec::new();
        let radices: Vec<usize> = domains.iter().map(|d| d.len()).collect();
        let mut digits = alloc::vec![0usize; cell_count];
        loop {
            tables_examined += 1;
            let cells: Vec<u16> = digits
                .iter()
                .enumerate()
                .map(|(c, &d)| domains[c][d])
                .collect();
            if config
                .axioms
                .iter()
                .all(|&axiom| space.table_satisfies(&cells, axiom))
            {
                survivors.push(RuleTable::new(
                    q,
                    n,
                    grid.omega().clone(),
                    space.allocations.clone(),
                    cells,
                ));
            }
            let mut pos = cell_count;
            loop {
                if pos == 0 {
                    let outcome = if survivors.is_empty() {
                        SearchOutcome::Unsat {
                            certificate: UnsatCertificate::Exhausted { tables_examined },
                        }
                    } else {
                        SearchOutcome::Survivors { tables: survivors }
                    };
                    return Ok(SearchReport {
                        q,
                        n,
                        omega: grid.omega().clone(),
                        axioms: config.axioms.clone(),
                        catalog,
                        restriction,
                        outcome,
                        tables_examined,
                        nodes,
                        notes,
                    });
                }
                pos -= 1;
                if digits[pos] + 1 < radices[pos] {
                    digits[pos] += 1;
                    for d in digits.iter_mut().skip(pos + 1) {
                        *d = 0;
                    }
                    break;
                }
            }
        }
    }

    // backtracking, fail-first cell order, first satisfying table wins
    notes.push(String::from(
        "pruned space over budget; backtracking search, first satisfying table reported",
    ));
    let mut order: Vec<usize> = (0..cell_count).collect();
    order.sort_by_key(|&c| (domains[c].len(), space.cells[c].clone()));
    let mut assignment: Vec<Option<u16>> = alloc::vec![None; cell_count];
    let found = backtrack(
        &space,
        &config.axioms,
        &domains,
        &order,
        0,
        &mut assignment,
        &mut nodes,
        config.node_budget,
    )?;
    let outcome = match found {
        Some(cells) => {
            tables_examined += 1;
            SearchOutcome::Survivors {
                tables: alloc::vec![RuleTable::new(
                    q,
                    n,
                    grid.omega().clone(),
                    space.allocations.clone(),
                    cells,
                )],
            }
        }
        None => SearchOutcome::Unsat {
            certificate: UnsatCertificate::Exhausted {
                tables_examined: nodes,
            },
        },
    };
    Ok(SearchReport {
        q,
        n,
        omega: grid.omega().clone(),
        axioms: config.axioms.clone(),
        catalog,
        restriction,
        outcome,
        tables_examined,
        nodes,
        notes,
    })
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    space: &SearchSpace,
    axioms: &[Axiom],
    domains: &[Vec<u16>],
    order: &[usize],
    depth: usize,
    assignment: &mut Vec<Option<u16>>,
    nodes: &mut u64,
    node_budget: u64,
) -> Result<Option<Vec<u16>>, SearchError> {
    if depth == order.len() {
        let cells: Vec<u16> = assignment.iter().map(|a| a.unwrap()).collect();
        if axioms.iter().all(|&ax| space.table_satisfies(&cells, ax)) {
            return Ok(Some(cells));
        }
        return Ok(None);
    }
    let cell = order[depth];
    for &candidate in &domains[cell] {
        *nodes += 1;
        if *nodes > node_budget {
            return Err(SearchError::BudgetExceeded {
                nodes: *nodes,
                tables_examined: 0,
                progress: {
                    let mut s = String::from("depth ");
                    core::fmt::write(&mut s, format_args!("{depth}/{}", order.len()))
                        .expect("formatting never fails");
                    s
                },
            });
        }
        assignment[cell] = Some(candidate);
        if partial_non_bossy_ok(space, axioms, assignment, cell) {
            if let Some(found) = backtrack(
                space,
                axioms,
                domains,
                order,
                depth + 1,
                assignment,
                nodes,
                node_budget,
            )? {
                return Ok(Some(found));
            }
        }
        assignment[cell] = None;
    }
    Ok(None)
}

/// Non-bossiness between the newly assigned cell and its assigned
/// one-coordinate neighbors.
fn partial_non_bossy_ok(
    space: &SearchSpace,
    axioms: &[Axiom],
    assignment: &[Option<u16>],
    cell: usize,
) -> bool {
    if !axioms.contains(&Axiom::NonBossiness) {
        return true;
    }
    let m = space.q + 1;
    let peaks = &space.cells[cell];
    let own = assignment[cell].unwrap() as usize;
    for agent in 0..space.n {
        let stride = m.pow((space.n - 1 - agent) as u32);
        for other in 0..m {
            if other == peaks[agent] {
                continue;
            }
            let oid = (cell as isize + (other as isize - peaks[agent] as isize) * stride as isize)
                as usize;
            let Some(theirs) = assignment[oid] else {
                continue;
            };
            let theirs = theirs as usize;
            if space.allocations[own][agent] == space.allocations[theirs][agent]
                && own != theirs
            {
                return false;
            }
        }
    }
    true
}
