//! Canonical finite preference catalogs and the feasible-allocation stream.
//!
//! Audits quantify over a declared catalog so results are reproducible
//! bit-for-bit. Three families are shipped:
//!
//! - `weak-orders`: every weak order on the grid points with a unique top
//!   (peaks within `[0, omega]`), encoded with utility levels `0..=q`;
//! - `weak-orders+beyond`: the above plus every weak order on the grid points
//!   (no top constraint) flagged with peak `2 * omega`;
//! - `single-peaked`: the sub-family of `weak-orders` whose utilities rise
//!   strictly up to the peak and fall strictly after it.
//!
//! Preferences are emitted in a fixed order: by peak index, then
//! lexicographically by utility-level vector; the beyond block follows in
//! level-vector order. The beyond peak value `2 * omega` is a convention and
//! is recorded in every report that names a `+beyond` catalog.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::grid::Grid;
use super::preference::{BeyondPeak, Preference};
use super::profile::Allocation;
use super::rational::{format_rational, rat_int, Rational};

/// Guard against accidentally enormous enumerations: the level-vector scan
/// walks `(q+1)^(q+1)` candidates.
const MAX_LEVEL_CANDIDATES: u64 = 200_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CatalogFamily {
    WeakOrders,
    WeakOrdersBeyond,
    SinglePeaked,
}

impl CatalogFamily {
    pub fn id(&self) -> &'static str {
        match self {
            CatalogFamily::WeakOrders => "weak-orders",
            CatalogFamily::WeakOrdersBeyond => "weak-orders+beyond",
            CatalogFamily::SinglePeaked => "single-peaked",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "weak-orders" => Some(CatalogFamily::WeakOrders),
            "weak-orders+beyond" => Some(CatalogFamily::WeakOrdersBeyond),
            "single-peaked" => Some(CatalogFamily::SinglePeaked),
            _ => None,
        }
    }

    pub fn includes_beyond(&self) -> bool {
        matches!(self, CatalogFamily::WeakOrdersBeyond)
    }
}

impl fmt::Display for CatalogFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Self-describing catalog identifier: family, grid resolution, number of
/// agents, and the endowment, e.g. `weak-orders@q=2,n=2,omega=1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogId {
    pub family: CatalogFamily,
    pub q: usize,
    pub n: usize,
    pub omega: Rational,
}

impl CatalogId {
    pub fn new(family: CatalogFamily, q: usize, n: usize, omega: Rational) -> Self {
        CatalogId { family, q, n, omega }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let (family, rest) = s.split_once('@')?;
        let family = CatalogFamily::parse(family)?;
        let mut q = None;
        let mut n = None;
        let mut omega = None;
        for part in rest.split(',') {
            let (key, value) = part.split_once('=')?;
            match key {
                "q" => q = value.parse().ok(),
                "n" => n = value.parse().ok(),
                "omega" => omega = super::rational::parse_rational(value).ok(),
                _ => return None,
            }
        }
        Some(CatalogId {
            family,
            q: q?,
            n: n?,
            omega: omega?,
        })
    }
}

impl fmt::Display for CatalogId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}@q={},n={},omega={}",
            self.family,
            self.q,
            self.n,
            format_rational(&self.omega)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatalogError {
    UnknownCatalog(String),
    TooLarge { candidates: u64, bound: u64 },
    ResolutionNotDivisible { q: usize, n: usize },
}

impl fmt::Display for CatalogError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogError::UnknownCatalog(name) => write!(f, "unknown catalog `{name}`"),
            CatalogError::TooLarge { candidates, bound } => write!(
                f,
                "catalog enumeration of {candidates} candidates exceeds the bound {bound}"
            ),
            CatalogError::ResolutionNotDivisible { q, n } => {
                write!(f, "grid resolution {q} is not divisible by n = {n}")
            }
        }
    }
}

/// All dense level vectors on `m` points: entries in `0..m` whose value set
/// is exactly `{0, ..., max}`. These are the weak orders on the grid points,
/// in lexicographic order.
pub fn weak_order_levels(m: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut current = alloc::vec![0u8; m];
    loop {
        if is_dense(&current) {
            out.push(current.clone());
        }
        // odometer over {0..m-1}^m
        let mut k = m;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if (current[k] as usize) + 1 < m {
                current[k] += 1;
                for v in current.iter_mut().skip(k + 1) {
                    *v = 0;
                }
                break;
            }
        }
    }
}

fn is_dense(levels: &[u8]) -> bool {
    let mut seen = 0u64;
    let mut max = 0u8;
    for &v in levels {
        seen |= 1 << v;
        if v > max {
            max = v;
        }
    }
    seen == (1u64 << (max as u64 + 1)) - 1
}

fn has_unique_top(levels: &[u8]) -> bool {
    let max = levels.iter().max().copied().unwrap_or(0);
    levels.iter().filter(|&&v| v == max).count() == 1
}

fn is_single_peaked(levels: &[u8]) -> bool {
    if !has_unique_top(levels) {
        return false;
    }
    let top = levels
        .iter()
        .enumerate()
        .max_by_key(|(_, &v)| v)
        .map(|(k, _)| k)
        .unwrap();
    levels[..=top].windows(2).all(|w| w[0] < w[1])
        && levels[top..].windows(2).all(|w| w[0] > w[1])
}

fn levels_to_preference(grid: &Grid, levels: &[u8], beyond: Option<BeyondPeak>) -> Preference {
    let utilities = levels.iter().map(|&v| rat_int(v as i64)).collect();
    Preference::new(grid, utilities, beyond).expect("catalog levels are valid by construction")
}

/// The canonical beyond-the-endowment peak used by `+beyond` catalogs.
pub fn canonical_beyond_peak(grid: &Grid) -> Rational {
    grid.omega() * rat_int(2)
}

/// Enumerates the named catalog on `grid`: deterministic, duplicate-free.
pub fn enumerate_preferences(
    grid: &Grid,
    family: CatalogFamily,
) -> Result<Vec<Preference>, CatalogError> {
    let m = grid.resolution() + 1;
    let candidates = (m as u64).checked_pow(m as u32).unwrap_or(u64::MAX);
    if candidates > MAX_LEVEL_CANDIDATES {
        return Err(CatalogError::TooLarge {
            candidates,
            bound: MAX_LEVEL_CANDIDATES,
        });
    }
    let all = weak_order_levels(m);
    let mut prefs: Vec<Preference> = Vec::new();

    let unique_top: Vec<&Vec<u8>> = all.iter().filter(|l| has_unique_top(l)).collect();
    match family {
        CatalogFamily::WeakOrders | CatalogFamily::WeakOrdersBeyond => {
            // peaks within the grid, ordered by peak index then level vector
            for peak_index in 0..m {
                for levels in &unique_top {
                    let top = levels
                        .iter()
                        .enumerate()
                        .max_by_key(|(_, &v)| v)
                        .map(|(k, _)| k)
                        .unwrap();
                    if top == peak_index {
                        prefs.push(levels_to_preference(grid, levels, None));
                    }
                }
            }
            if family == CatalogFamily::WeakOrdersBeyond {
                let beyond = canonical_beyond_peak(grid);
                for levels in &all {
                    prefs.push(levels_to_preference(
                        grid,
                        levels,
                        Some(BeyondPeak::Finite(beyond.clone())),
                    ));
                }
            }
        }
        CatalogFamily::SinglePeaked => {
            for peak_index in 0..m {
                for levels in &all {
                    if is_single_peaked(levels) {
                        let top = levels
                            .iter()
                            .enumerate()
                            .max_by_key(|(_, &v)| v)
                            .map(|(k, _)| k)
                            .unwrap();
                        if top == peak_index {
                            prefs.push(levels_to_preference(grid, levels, None));
                        }
                    }
                }
            }
        }
    }
    Ok(prefs)
}

/// Looks a catalog up by name (`weak-orders`, `weak-orders+beyond`,
/// `single-peaked`).
pub fn enumerate_preferences_by_name(
    grid: &Grid,
    name: &str,
) -> Result<Vec<Preference>, CatalogError> {
    let family = CatalogFamily::parse(name)
        .ok_or_else(|| CatalogError::UnknownCatalog(String::from(name)))?;
    enumerate_preferences(grid, family)
}

/// All grid-valued feasible allocations for `n` agents, in lexicographic
/// order: every `n`-tuple of grid points summing exactly to omega.
pub fn feasible_allocations(grid: &Grid, n: usize) -> Result<Vec<Allocation>, CatalogError> {
    if n == 0 {
        return Err(CatalogError::ResolutionNotDivisible {
            q: grid.resolution(),
            n,
        });
    }
    let q = grid.resolution();
    let mut out = Vec::new();
    let mut parts = alloc::vec![0usize; n];
    compositions(q, 0, q, &mut parts, &mut |parts| {
        let amounts = parts.iter().map(|&k| grid.point(k).clone()).collect();
        out.push(
            Allocation::new(grid.omega(), amounts).expect("compositions sum to omega exactly"),
        );
    });
    Ok(out)
}

/// Grid-index compositions: fills `parts[pos..]` with values summing to
/// `remaining`, each at most `q`, invoking `emit` per completed tuple.
fn compositions<F: FnMut(&[usize])>(
    q: usize,
    pos: usize,
    remaining: usize,
    parts: &mut Vec<usize>,
    emit: &mut F,
) {
    if pos + 1 == parts.len() {
        if remaining <= q {
            parts[pos] = remaining;
            emit(parts);
        }
        return;
    }
    for k in 0..=remaining.min(q) {
        parts[pos] = k;
        compositions(q, pos + 1, remaining - k, parts, emit);
    }
}
