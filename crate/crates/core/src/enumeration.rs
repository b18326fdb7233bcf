//! Shapes and admissible colorings of trees with bounded branching, their
//! counts, and ratio sequences between families.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::{binomial, multinomial};
use crate::diagram::{BifurcationKind, OrbitIndex};
use crate::laws::LawTable;
use crate::tree::{free_canonical, ColoredTree, PlaneTree};

/// How trees are told apart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeMode {
    /// Every node has `k+1` numbered child slots; trees differ when any
    /// slot differs. The family counted by `count_kary_formula(k+1, n)`.
    Plane,
    /// Children form an ordered list of length at most `k+1`.
    Ordered,
    /// Unrooted, unordered trees up to isomorphism (colors respected).
    FreeCanonical,
}

impl fmt::Display for TreeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeMode::Plane => "plane",
            TreeMode::Ordered => "ordered",
            TreeMode::FreeCanonical => "free",
        })
    }
}

impl FromStr for TreeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plane" => Ok(TreeMode::Plane),
            "ordered" => Ok(TreeMode::Ordered),
            "free" | "free_canonical" => Ok(TreeMode::FreeCanonical),
            other => Err(format!(
                "unknown tree mode {other:?} (plane, ordered, free)"
            )),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumError {
    #[error("enumeration would produce {needed} items, above the limit of {limit}")]
    LimitExceeded { needed: String, limit: usize },
    #[error("enumeration cancelled")]
    Cancelled,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type ProgressFn = Arc<dyn Fn(usize, usize) + Send + Sync>;

/// Resource controls for explicit enumeration.
#[derive(Clone)]
pub struct Limits {
    pub max_items: usize,
    pub cancel: Option<Arc<AtomicBool>>,
    /// Called with (finished, total) work units.
    pub progress: Option<ProgressFn>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_items: Limits::DEFAULT_MAX,
            cancel: None,
            progress: None,
        }
    }
}

impl fmt::Debug for Limits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Limits")
            .field("max_items", &self.max_items)
            .finish_non_exhaustive()
    }
}

impl Limits {
    pub const DEFAULT_MAX: usize = 2_000_000;
    pub const ENV_VAR: &'static str = "BIFGRAPH_LIMIT";

    pub fn with_max(max_items: usize) -> Self {
        Limits {
            max_items,
            ..Limits::default()
        }
    }

    /// Default limit, overridden by the `BIFGRAPH_LIMIT` environment variable.
    pub fn from_env() -> Self {
        let max = std::env::var(Limits::ENV_VAR)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(Limits::DEFAULT_MAX);
        Limits::with_max(max)
    }

    fn check(&self, needed: &BigUint) -> Result<(), EnumError> {
        if *needed > BigUint::from(self.max_items) {
            return Err(EnumError::LimitExceeded {
                needed: needed.to_string(),
                limit: self.max_items,
            });
        }
        Ok(())
    }

    fn cancelled(&self) -> bool {
        self.cancel
            .as_ref()
            .is_some_and(|c| c.load(Ordering::Relaxed))
    }
}

/// One family of colored trees: branching bound `k` (at most `k+1`
/// children per node), `n` nodes, laws from `table`.
#[derive(Clone, Debug)]
pub struct EnumerationSpec {
    pub k: u32,
    pub n: usize,
    pub mode: TreeMode,
    pub table: LawTable,
}

fn check_kn(k: u32, n: usize) -> Result<(), EnumError> {
    if k == 0 {
        return Err(EnumError::InvalidArgument("k must be at least 1".into()));
    }
    if n == 0 {
        return Err(EnumError::InvalidArgument("n must be at least 1".into()));
    }
    Ok(())
}

/// Number of `k`-ary plane trees with `n` nodes, `C(kn, n) / ((k-1)n + 1)`.
pub fn count_kary_formula(k: u64, n: u64) -> Result<BigUint, EnumError> {
    if k < 2 || n < 1 {
        return Err(EnumError::InvalidArgument("need k >= 2 and n >= 1".into()));
    }
    Ok(binomial(k * n, n) / ((k - 1) * n + 1))
}

/// Root masks available to a node in the given mode.
fn root_masks(k: u32, mode: TreeMode) -> Vec<u32> {
    let slots = k + 1;
    match mode {
        TreeMode::Plane => (1..1u32 << slots).collect(),
        TreeMode::Ordered | TreeMode::FreeCanonical => {
            (1..=slots).map(|c| (1u32 << c) - 1).collect()
        }
    }
}

/// Weight of root masks by child count: how many masks have `j` children.
fn mask_weights(k: u32, mode: TreeMode) -> Vec<BigUint> {
    let slots = u64::from(k) + 1;
    (0..=slots)
        .map(|j| match (mode, j) {
            (_, 0) => BigUint::one(),
            (TreeMode::Plane, j) => binomial(slots, j),
            (_, _) => BigUint::one(),
        })
        .collect()
}

/// Number of uncolored shapes; free trees are counted by enumeration.
pub fn count_shapes(
    k: u32,
    n: usize,
    mode: TreeMode,
    limits: &Limits,
) -> Result<BigUint, EnumError> {
    check_kn(k, n)?;
    match mode {
        TreeMode::FreeCanonical => Ok(BigUint::from(enumerate_shapes(k, n, mode, limits)?.len())),
        _ => {
            let weights = mask_weights(k, mode);
            // S(x) = x * sum_j w_j S(x)^j, truncated at degree n.
            let mut s = vec![BigUint::zero(); n + 1];
            for m in 1..=n {
                let mut power = unit_poly(n);
                let mut total = BigUint::zero();
                for w in &weights {
                    total += w * &power[m - 1];
                    power = poly_mul(&power, &s, m - 1);
                }
                s[m] = total;
            }
            Ok(s[n].clone())
        }
    }
}

fn unit_poly(n: usize) -> Vec<BigUint> {
    let mut p = vec![BigUint::zero(); n + 1];
    p[0] = BigUint::one();
    p
}

// Product truncated at degree `deg` (entries above are left zero).
fn poly_mul(a: &[BigUint], b: &[BigUint], deg: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); a.len()];
    for i in 0..=deg.min(a.len() - 1) {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..=(deg - i).min(b.len() - 1) {
            if !b[j].is_zero() {
                out[i + j] += &a[i] * &b[j];
            }
        }
    }
    out
}

/// All shapes with `n` nodes and at most `k+1` children per node.
pub fn enumerate_shapes(
    k: u32,
    n: usize,
    mode: TreeMode,
    limits: &Limits,
) -> Result<Vec<PlaneTree>, EnumError> {
    check_kn(k, n)?;
    let base = if mode == TreeMode::FreeCanonical {
        TreeMode::Ordered
    } else {
        mode
    };
    limits.check(&count_shapes(k, n, base, limits)?)?;
    let masks = shape_masks(k, n, base, limits)?;
    let trees: Vec<PlaneTree> = masks
        .into_iter()
        .map(|m| PlaneTree::from_masks(m).expect("generated masks"))
        .collect();
    if mode != TreeMode::FreeCanonical {
        return Ok(trees);
    }
    let mut seen = BTreeMap::new();
    for t in trees {
        let (code, rep, _) = free_canonical(&t.to_graph()).expect("shapes are trees");
        seen.entry(code).or_insert(rep);
    }
    Ok(seen.into_values().collect())
}

fn shape_masks(
    k: u32,
    n: usize,
    mode: TreeMode,
    limits: &Limits,
) -> Result<Vec<Vec<u32>>, EnumError> {
    let roots = root_masks(k, mode);
    let mut by_size: Vec<Vec<Vec<u32>>> = vec![Vec::new(), vec![vec![0]]];
    for m in 2..=n {
        if limits.cancelled() {
            return Err(EnumError::Cancelled);
        }
        let mut out = Vec::new();
        for &mask in &roots {
            let j = mask.count_ones() as usize;
            for sizes in compositions(m - 1, j) {
                let mut partial: Vec<Vec<u32>> = vec![vec![mask]];
                for &s in &sizes {
                    let mut next = Vec::with_capacity(partial.len() * by_size[s].len());
                    for p in &partial {
                        for sub in &by_size[s] {
                            let mut q = p.clone();
                            q.extend_from_slice(sub);
                            next.push(q);
                        }
                    }
                    partial = next;
                }
                out.extend(partial);
            }
        }
        by_size.push(out);
    }
    Ok(by_size.swap_remove(n))
}

/// Ordered ways to write `total` as `parts` positive integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if total < parts {
        return vec![];
    }
    let mut out = Vec::new();
    for first in 1..=total - (parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Admissible child-color multisets for a hub with `j` children, each with
/// its number of distinct orderings.
fn child_multisets(table: &LawTable, hub: OrbitIndex, j: usize) -> Vec<(Vec<OrbitIndex>, BigUint)> {
    let multisets: BTreeSet<Vec<OrbitIndex>> = match BifurcationKind::for_tree_children(j) {
        None => [vec![]].into_iter().collect(),
        Some(BifurcationKind::SaddleNode) => table
            .allowed_children(BifurcationKind::SaddleNode, OrbitIndex::Zero)
            .into_iter()
            .filter_map(|pair| {
                let i = pair.iter().position(|&c| c == hub)?;
                Some(vec![pair[1 - i]])
            })
            .collect(),
        Some(kind) => table.allowed_children(kind, hub),
    };
    multisets
        .into_iter()
        .map(|m| {
            let mut counts: BTreeMap<OrbitIndex, usize> = BTreeMap::new();
            for &c in &m {
                *counts.entry(c).or_default() += 1;
            }
            let mult: Vec<usize> = counts.into_values().collect();
            (m, multinomial(&mult))
        })
        .collect()
}

/// Distinct orderings of a sorted multiset.
fn permutations(sorted: &[OrbitIndex]) -> Vec<Vec<OrbitIndex>> {
    let mut out = Vec::new();
    let mut current = sorted.to_vec();
    loop {
        out.push(current.clone());
        // Next lexicographic permutation.
        let Some(i) = (1..current.len())
            .rev()
            .find(|&i| current[i - 1] < current[i])
        else {
            break;
        };
        let j = (i..current.len())
            .rev()
            .find(|&j| current[j] > current[i - 1])
            .unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}

/// Ordered child color sequences per (hub color, child count).
struct StarCatalog {
    sequences: HashMap<(OrbitIndex, usize), Vec<Vec<OrbitIndex>>>,
}

impl StarCatalog {
    fn new(table: &LawTable, max_children: usize) -> Self {
        let mut sequences = HashMap::new();
        for hub in OrbitIndex::ALL {
            for j in 0..=max_children {
                let seqs: Vec<Vec<OrbitIndex>> = child_multisets(table, hub, j)
                    .into_iter()
                    .flat_map(|(m, _)| permutations(&m))
                    .collect();
                sequences.insert((hub, j), seqs);
            }
        }
        StarCatalog { sequences }
    }

    fn get(&self, hub: OrbitIndex, j: usize) -> &[Vec<OrbitIndex>] {
        &self.sequences[&(hub, j)]
    }
}

/// Exact number of admissible colored trees. Plane and ordered families are
/// counted by a generating-function recursion; free trees by enumeration.
pub fn count_colored(spec: &EnumerationSpec, limits: &Limits) -> Result<BigUint, EnumError> {
    check_kn(spec.k, spec.n)?;
    if spec.mode == TreeMode::FreeCanonical {
        return Ok(BigUint::from(enumerate_colored(spec, limits)?.len()));
    }
    Ok(
        colored_counts_by_root(spec.k, spec.n, spec.mode, &spec.table)
            .into_iter()
            .sum(),
    )
}

/// Child count with its admissible colorings (color positions, arrangements).
type ChildRule = (usize, Vec<(Vec<usize>, BigUint)>);

/// Counts of admissible colored trees with `n` nodes, split by root color
/// (order of `OrbitIndex::ALL`).
pub fn colored_counts_by_root(k: u32, n: usize, mode: TreeMode, table: &LawTable) -> [BigUint; 3] {
    let weights = mask_weights(k, mode);
    let slots = k as usize + 1;
    // rules[hub] lists, per child count, the admissible child colorings.
    let rules: Vec<Vec<ChildRule>> = OrbitIndex::ALL
        .iter()
        .map(|&hub| {
            (0..=slots)
                .map(|j| {
                    let ms = child_multisets(table, hub, j)
                        .into_iter()
                        .map(|(m, arr)| (m.iter().map(|&c| color_pos(c)).collect(), arr))
                        .collect();
                    (j, ms)
                })
                .collect()
        })
        .collect();
    let mut t: [Vec<BigUint>; 3] = std::array::from_fn(|_| vec![BigUint::zero(); n + 1]);
    for m in 1..=n {
        let mut next: [BigUint; 3] = std::array::from_fn(|_| BigUint::zero());
        for (hub, per_j) in rules.iter().enumerate() {
            let mut total = BigUint::zero();
            for (j, multisets) in per_j {
                let mut sum = BigUint::zero();
                for (colors, arr) in multisets {
                    let mut prod = unit_poly(n);
                    for &c in colors {
                        prod = poly_mul(&prod, &t[c], m - 1);
                    }
                    sum += arr * &prod[m - 1];
                }
                total += &weights[*j] * sum;
            }
            next[hub] = total;
        }
        for c in 0..3 {
            t[c][m] = next[c].clone();
        }
    }
    std::array::from_fn(|c| t[c][n].clone())
}

fn color_pos(c: OrbitIndex) -> usize {
    OrbitIndex::ALL.iter().position(|&x| x == c).unwrap()
}

/// All admissible colorings of all shapes of the family.
pub fn enumerate_colored(
    spec: &EnumerationSpec,
    limits: &Limits,
) -> Result<Vec<ColoredTree>, EnumError> {
    check_kn(spec.k, spec.n)?;
    let base = if spec.mode == TreeMode::FreeCanonical {
        TreeMode::Ordered
    } else {
        spec.mode
    };
    let total: BigUint = colored_counts_by_root(spec.k, spec.n, base, &spec.table)
        .into_iter()
        .sum();
    limits.check(&total)?;
    let shapes = enumerate_shapes(spec.k, spec.n, base, limits)?;
    let catalog = StarCatalog::new(&spec.table, spec.k as usize + 1);
    let done = AtomicUsize::new(0);
    let cancelled = AtomicBool::new(false);
    let per_shape: Vec<Vec<ColoredTree>> = shapes
        .par_iter()
        .map(|shape| {
            if cancelled.load(Ordering::Relaxed) || limits.cancelled() {
                cancelled.store(true, Ordering::Relaxed);
                return Vec::new();
            }
            let trees = colorings(shape, &catalog);
            let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
            if let Some(p) = &limits.progress {
                p(finished, shapes.len());
            }
            trees
        })
        .collect();
    if cancelled.load(Ordering::Relaxed) {
        return Err(EnumError::Cancelled);
    }
    let all = per_shape.into_iter().flatten();
    if spec.mode != TreeMode::FreeCanonical {
        return Ok(all.collect());
    }
    let mut seen = BTreeMap::new();
    for t in all {
        let (code, rep, colors) = free_canonical(&t.to_graph()).expect("colored trees are trees");
        seen.entry(code).or_insert_with(|| ColoredTree {
            shape: rep,
            colors: colors.expect("colored input"),
        });
    }
    Ok(seen.into_values().collect())
}

fn colorings(shape: &PlaneTree, catalog: &StarCatalog) -> Vec<ColoredTree> {
    let mut out = Vec::new();
    let mut colors = vec![OrbitIndex::Zero; shape.len()];
    for root in OrbitIndex::ALL {
        colors[0] = root;
        assign(shape, catalog, 0, &mut colors, &mut out);
    }
    out
}

// Nodes before `v` in preorder have their children colored already, so `v`
// itself is colored; choose colors for its children and move on.
fn assign(
    shape: &PlaneTree,
    catalog: &StarCatalog,
    v: usize,
    colors: &mut Vec<OrbitIndex>,
    out: &mut Vec<ColoredTree>,
) {
    if v == shape.len() {
        out.push(ColoredTree {
            shape: shape.clone(),
            colors: colors.clone(),
        });
        return;
    }
    let children = shape.children(v);
    for seq in catalog.get(colors[v], children.len()) {
        for (&c, &color) in children.iter().zip(seq) {
            colors[c] = color;
        }
        assign(shape, catalog, v + 1, colors, out);
    }
}

/// Distinct shapes of the given trees.
pub fn project_uncolored<'a>(
    trees: impl IntoIterator<Item = &'a ColoredTree>,
) -> BTreeSet<PlaneTree> {
    trees.into_iter().map(|t| t.shape.clone()).collect()
}

/// Whether some admissible coloring of `shape` exists.
pub fn has_admissible_coloring(shape: &PlaneTree, table: &LawTable) -> bool {
    let catalog = StarCatalog::new(table, shape.max_children());
    let n = shape.len();
    let mut feasible = vec![[false; 3]; n];
    for v in (0..n).rev() {
        let children = shape.children(v);
        for (ci, &hub) in OrbitIndex::ALL.iter().enumerate() {
            feasible[v][ci] = catalog.get(hub, children.len()).iter().any(|seq| {
                children
                    .iter()
                    .zip(seq)
                    .all(|(&c, &col)| feasible[c][color_pos(col)])
            });
        }
    }
    feasible[0].iter().any(|&f| f)
}

/// Shapes of size `n` with and without an admissible coloring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverageRow {
    pub n: usize,
    pub shapes: usize,
    pub covered: usize,
    /// Slot masks of the first shape without an admissible coloring.
    pub first_missing: Option<Vec<u32>>,
}

impl CoverageRow {
    pub fn complete(&self) -> bool {
        self.shapes == self.covered
    }
}

/// Reports, for each size up to `n_max`, whether every shape of the family
/// carries at least one admissible coloring.
pub fn coverage_report(
    k: u32,
    n_max: usize,
    mode: TreeMode,
    table: &LawTable,
    limits: &Limits,
) -> Result<Vec<CoverageRow>, EnumError> {
    (1..=n_max)
        .map(|n| {
            let shapes = enumerate_shapes(k, n, mode, limits)?;
            let flags: Vec<bool> = shapes
                .par_iter()
                .map(|s| has_admissible_coloring(s, table))
                .collect();
            let first_missing = flags
                .iter()
                .position(|&f| !f)
                .map(|i| shapes[i].masks().to_vec());
            Ok(CoverageRow {
                n,
                shapes: shapes.len(),
                covered: flags.iter().filter(|&&f| f).count(),
                first_missing,
            })
        })
        .collect()
}

/// `None` marks a zero denominator.
pub type RatioEntry = Option<BigRational>;

fn ratio(num: BigUint, den: BigUint) -> RatioEntry {
    if den.is_zero() {
        None
    } else {
        Some(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
}

fn family_count(
    k: u32,
    n: usize,
    mode: TreeMode,
    table: &LawTable,
    limits: &Limits,
) -> Result<BigUint, EnumError> {
    count_colored(
        &EnumerationSpec {
            k,
            n,
            mode,
            table: table.clone(),
        },
        limits,
    )
}

/// `count(k_high) / count(k_low)` in the same dimension, for n = 1..=n_max.
pub fn ratio_sequence(
    k_low: u32,
    k_high: u32,
    table: &LawTable,
    n_max: usize,
    mode: TreeMode,
    limits: &Limits,
) -> Result<Vec<RatioEntry>, EnumError> {
    if k_low > k_high {
        return Err(EnumError::InvalidArgument(
            "k_low must not exceed k_high".into(),
        ));
    }
    (1..=n_max)
        .map(|n| {
            Ok(ratio(
                family_count(k_high, n, mode, table, limits)?,
                family_count(k_low, n, mode, table, limits)?,
            ))
        })
        .collect()
}

/// `count(low table) / count(high table)` at fixed `k`, for n = 1..=n_max.
pub fn share_sequence(
    k: u32,
    low: &LawTable,
    high: &LawTable,
    n_max: usize,
    mode: TreeMode,
    limits: &Limits,
) -> Result<Vec<RatioEntry>, EnumError> {
    if low.dimension() > high.dimension() {
        return Err(EnumError::InvalidArgument(
            "low dimension must not exceed high".into(),
        ));
    }
    (1..=n_max)
        .map(|n| {
            Ok(ratio(
                family_count(k, n, mode, low, limits)?,
                family_count(k, n, mode, high, limits)?,
            ))
        })
        .collect()
}

/// `N(k+1) / (3^n N(k))` with `N` the k-ary tree count.
pub fn treeth_lower_bound(k: u64, n: u64) -> Result<BigRational, EnumError> {
    if k < 2 {
        return Err(EnumError::InvalidArgument("k must be at least 2".into()));
    }
    let num = count_kary_formula(k + 1, n)?;
    let den = count_kary_formula(k, n)? * BigUint::from(3u32).pow(n as u32);
    Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Key of a recorded count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountKey {
    pub k: u32,
    pub d: u32,
    pub n: usize,
    pub mode: TreeMode,
}

#[derive(Debug, Error)]
pub enum CountTableError {
    #[error("count for {0:?} already recorded with a different value")]
    Conflict(CountKey),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
}

/// Recorded family sizes with a note on how each was obtained.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CountTable {
    entries: BTreeMap<CountKey, (BigUint, String)>,
}

#[derive(Serialize, Deserialize)]
struct CountRow {
    k: u32,
    d: u32,
    n: usize,
    mode: String,
    count: String,
}

impl CountTable {
    pub fn new() -> Self {
        CountTable::default()
    }

    /// Records a count; recording the same value twice is a no-op.
    pub fn record(
        &mut self,
        key: CountKey,
        count: BigUint,
        note: &str,
    ) -> Result<(), CountTableError> {
        match self.entries.get(&key) {
            Some((existing, _)) if *existing != count => Err(CountTableError::Conflict(key)),
            Some(_) => Ok(()),
            None => {
                self.entries.insert(key, (count, note.to_string()));
                Ok(())
            }
        }
    }

    pub fn get(&self, key: &CountKey) -> Option<&BigUint> {
        self.entries.get(key).map(|(c, _)| c)
    }

    pub fn note(&self, key: &CountKey) -> Option<&str> {
        self.entries.get(key).map(|(_, n)| n.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CountKey, &BigUint)> {
        self.entries.iter().map(|(k, (c, _))| (k, c))
    }

    /// Writes `k,d,n,mode,count` rows in key order.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<(), CountTableError> {
        let mut w = csv::Writer::from_writer(writer);
        for (key, (count, _)) in &self.entries {
            w.serialize(CountRow {
                k: key.k,
                d: key.d,
                n: key.n,
                mode: key.mode.to_string(),
                count: count.to_string(),
            })?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_csv<R: io::Read>(reader: R) -> Result<Self, CountTableError> {
        let mut table = CountTable::new();
        for (i, row) in csv::Reader::from_reader(reader)
            .deserialize::<CountRow>()
            .enumerate()
        {
            let row = row?;
            let bad = |message: String| CountTableError::Row {
                row: i + 1,
                message,
            };
            let mode = row.mode.parse().map_err(bad)?;
            let count = row
                .count
                .parse::<BigUint>()
                .map_err(|e| bad(e.to_string()))?;
            table.record(
                CountKey {
                    k: row.k,
                    d: row.d,
                    n: row.n,
                    mode,
                },
                count,
                "read from csv",
            )?;
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::builtin_table;
    use OrbitIndex::*;

    fn spec(k: u32, d: u32, n: usize, mode: TreeMode) -> EnumerationSpec {
        EnumerationSpec {
            k,
            n,
            mode,
            table: builtin_table(d).unwrap(),
        }
    }

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn kary_formula_values() {
        assert_eq!(count_kary_formula(2, 4).unwrap(), BigUint::from(14u32));
        assert_eq!(count_kary_formula(3, 2).unwrap(), BigUint::from(3u32));
        assert_eq!(count_kary_formula(2, 1).unwrap(), BigUint::one());
        assert!(count_kary_formula(1, 3).is_err());
    }

    #[test]
    fn shape_examples() {
        assert_eq!(
            enumerate_shapes(1, 3, TreeMode::Plane, &lim())
                .unwrap()
                .len(),
            5
        );
        assert_eq!(
            enumerate_shapes(2, 2, TreeMode::Plane, &lim())
                .unwrap()
                .len(),
            3
        );
        for k in 1..4 {
            for mode in [TreeMode::Plane, TreeMode::Ordered, TreeMode::FreeCanonical] {
                assert_eq!(enumerate_shapes(k, 1, mode, &lim()).unwrap().len(), 1);
            }
        }
    }

    #[test]
    fn shape_counts_agree_with_enumeration() {
        for mode in [TreeMode::Plane, TreeMode::Ordered] {
            for k in 1..4 {
                for n in 1..7 {
                    let listed = enumerate_shapes(k, n, mode, &lim()).unwrap();
                    let distinct: BTreeSet<_> = listed.iter().cloned().collect();
                    assert_eq!(distinct.len(), listed.len());
                    assert_eq!(
                        count_shapes(k, n, mode, &lim()).unwrap(),
                        BigUint::from(listed.len())
                    );
                }
            }
        }
    }

    #[test]
    fn free_shapes_match_known_tree_counts() {
        // Unlabeled free trees on n nodes: 1, 1, 1, 2, 3, 6, 11, 23.
        let expected = [1usize, 1, 1, 2, 3, 6, 11, 23];
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(
                enumerate_shapes(8, i + 1, TreeMode::FreeCanonical, &lim())
                    .unwrap()
                    .len(),
                e
            );
        }
        // Max degree 3 cuts the star on 5 nodes.
        assert_eq!(
            enumerate_shapes(1, 5, TreeMode::FreeCanonical, &lim())
                .unwrap()
                .len(),
            2
        );
    }

    #[test]
    fn ordered_saddle_node_pairs() {
        let trees = enumerate_colored(&spec(1, 4, 2, TreeMode::Ordered), &lim()).unwrap();
        let pairs: BTreeSet<_> = trees.iter().map(|t| (t.colors[0], t.colors[1])).collect();
        assert_eq!(
            pairs,
            [(Plus, Minus), (Minus, Plus), (Zero, Zero)]
                .into_iter()
                .collect()
        );
        let trees = enumerate_colored(&spec(1, 2, 2, TreeMode::Ordered), &lim()).unwrap();
        assert_eq!(trees.len(), 2);
    }

    #[test]
    fn plane_mode_counts_each_slot() {
        let trees = enumerate_colored(&spec(1, 4, 2, TreeMode::Plane), &lim()).unwrap();
        assert_eq!(trees.len(), 6);
    }

    #[test]
    fn dp_matches_enumeration() {
        for mode in [TreeMode::Plane, TreeMode::Ordered] {
            for d in 1..=4 {
                for k in 1..=3 {
                    for n in 1..=6 {
                        let s = spec(k, d, n, mode);
                        let listed = enumerate_colored(&s, &lim()).unwrap();
                        let admissible = listed.iter().all(|t| t.is_admissible(&s.table));
                        assert!(admissible);
                        assert_eq!(
                            count_colored(&s, &lim()).unwrap(),
                            BigUint::from(listed.len())
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn ratio_examples() {
        let t4 = builtin_table(4).unwrap();
        let r = ratio_sequence(1, 2, &t4, 2, TreeMode::Ordered, &lim()).unwrap();
        assert_eq!(r[1], Some(BigRational::one()));
        let same = ratio_sequence(1, 1, &t4, 5, TreeMode::Plane, &lim()).unwrap();
        assert!(same.iter().all(|x| *x == Some(BigRational::one())));
    }

    #[test]
    fn share_examples() {
        let (t1, t2, t3) = (
            builtin_table(1).unwrap(),
            builtin_table(2).unwrap(),
            builtin_table(3).unwrap(),
        );
        for mode in [TreeMode::Plane, TreeMode::Ordered] {
            let s = share_sequence(1, &t1, &t2, 6, mode, &lim()).unwrap();
            assert!(s.iter().all(|x| *x == Some(BigRational::one())));
            let s = share_sequence(1, &t2, &t3, 2, mode, &lim()).unwrap();
            assert_eq!(s[1], Some(BigRational::new(2.into(), 3.into())));
        }
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(
            treeth_lower_bound(2, 2).unwrap(),
            BigRational::new(1.into(), 6.into())
        );
        assert_eq!(
            treeth_lower_bound(2, 1).unwrap(),
            BigRational::new(1.into(), 3.into())
        );
        assert!(treeth_lower_bound(1, 3).is_err());
    }

    #[test]
    fn limit_and_cancel() {
        let s = spec(2, 4, 7, TreeMode::Plane);
        assert!(matches!(
            enumerate_colored(&s, &Limits::with_max(10)),
            Err(EnumError::LimitExceeded { .. })
        ));
        let cancel = Arc::new(AtomicBool::new(true));
        let limits = Limits {
            cancel: Some(cancel),
            ..Limits::default()
        };
        assert_eq!(
            enumerate_colored(&s, &limits).unwrap_err(),
            EnumError::Cancelled
        );
    }

    #[test]
    fn count_table_csv_round_trip() {
        let mut t = CountTable::new();
        let key = CountKey {
            k: 1,
            d: 4,
            n: 3,
            mode: TreeMode::Plane,
        };
        t.record(key, BigUint::from(42u32), "dp").unwrap();
        assert!(t.record(key, BigUint::from(41u32), "dp").is_err());
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "k,d,n,mode,count\n1,4,3,plane,42\n");
        assert_eq!(
            CountTable::read_csv(&buf[..]).unwrap().get(&key),
            Some(&BigUint::from(42u32))
        );
    }

    #[test]
    fn permutations_are_distinct() {
        assert_eq!(permutations(&[Minus, Plus, Plus]).len(), 3);
        assert_eq!(permutations(&[Zero, Zero, Zero]).len(), 1);
        assert_eq!(permutations(&[Minus, Zero, Plus]).len(), 6);
    }
}
