//! Matroids given by independence oracles: graphic, tabulated by bases, and
//! minors of either; plus the Vámos matroid and a brute-force minor test.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{SimpleGraph, UnionFind};

/// Subsets of the ground set as bit masks.
pub type Subset = u64;

pub const MAX_ELEMENTS: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatroidError {
    #[error("ground set has {0} elements; at most {MAX_ELEMENTS} supported")]
    TooLarge(usize),
    #[error("no bases given")]
    NoBases,
    #[error("bases have different sizes")]
    UnequalBases,
    #[error("basis exchange fails between bases {0:?} and {1:?}")]
    Exchange(Vec<String>, Vec<String>),
    #[error("element {0:?} is not in the ground set")]
    UnknownElement(String),
    #[error("duplicate ground set element {0:?}")]
    DuplicateElement(String),
    #[error("delete and contract sets overlap")]
    Overlap,
    #[error("ground set has {got} elements; the minor search supports at most {limit}")]
    SearchTooLarge { got: usize, limit: usize },
    #[error("unsupported schemaVersion {0:?}")]
    SchemaVersion(String),
}

#[derive(Clone, Debug)]
enum Oracle {
    /// Edges of a multigraph on `n` vertices; loops allowed.
    Graphic {
        n: usize,
        edges: Vec<(usize, usize)>,
    },
    Bases(BTreeSet<Subset>),
    /// Elements `keep[i]` of `base`, with `contract` (independent in `base`)
    /// contracted.
    Minor {
        base: Arc<Matroid>,
        keep: Vec<usize>,
        contract: Subset,
    },
}

#[derive(Clone, Debug)]
pub struct Matroid {
    labels: Vec<String>,
    oracle: Oracle,
    rank: usize,
}

fn bits(mask: Subset) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(i)
    })
}

fn full(n: usize) -> Subset {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl Matroid {
    fn with_oracle(labels: Vec<String>, oracle: Oracle) -> Self {
        let mut m = Matroid {
            labels,
            oracle,
            rank: 0,
        };
        m.rank = m.rank_of(full(m.len()));
        m
    }

    /// Matroid from its bases; checks the exchange axiom.
    pub fn from_bases(labels: Vec<String>, bases: &[Vec<usize>]) -> Result<Self, MatroidError> {
        if labels.len() > MAX_ELEMENTS {
            return Err(MatroidError::TooLarge(labels.len()));
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(MatroidError::DuplicateElement(l.clone()));
            }
        }
        let mut set = BTreeSet::new();
        for b in bases {
            let mut mask: Subset = 0;
            for &e in b {
                if e >= labels.len() {
                    return Err(MatroidError::UnknownElement(e.to_string()));
                }
                mask |= 1 << e;
            }
            set.insert(mask);
        }
        let Some(&first) = set.iter().next() else {
            return Err(MatroidError::NoBases);
        };
        if set
            .iter()
            .any(|b: &Subset| b.count_ones() != first.count_ones())
        {
            return Err(MatroidError::UnequalBases);
        }
        let m = Matroid::with_oracle(labels, Oracle::Bases(set.clone()));
        for &b1 in &set {
            for &b2 in &set {
                for x in bits(b1 & !b2) {
                    let ok = bits(b2 & !b1).any(|y| set.contains(&((b1 & !(1 << x)) | 1 << y)));
                    if !ok {
                        return Err(MatroidError::Exchange(m.names(b1), m.names(b2)));
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ground(&self) -> Subset {
        full(self.len())
    }

    pub fn names(&self, set: Subset) -> Vec<String> {
        bits(set).map(|i| self.labels[i].clone()).collect()
    }

    pub fn subset_of(&self, names: &[&str]) -> Result<Subset, MatroidError> {
        names.iter().try_fold(0, |acc, name| {
            let i = self
                .labels
                .iter()
                .position(|l| l == name)
                .ok_or_else(|| MatroidError::UnknownElement(name.to_string()))?;
            Ok(acc | 1 << i)
        })
    }

    pub fn is_independent(&self, set: Subset) -> bool {
        match &self.oracle {
            Oracle::Graphic { n, edges } => {
                let mut uf = UnionFind::new(*n);
                bits(set).all(|i| uf.union(edges[i].0, edges[i].1))
            }
            Oracle::Bases(bases) => bases.iter().any(|b| set & !b == 0),
            Oracle::Minor {
                base,
                keep,
                contract,
            } => {
                let lifted = bits(set).fold(*contract, |acc, i| acc | 1 << keep[i]);
                base.is_independent(lifted)
            }
        }
    }

    /// Size of a maximal independent subset, built greedily.
    pub fn rank_of(&self, set: Subset) -> usize {
        let mut independent = 0;
        for i in bits(set) {
            if self.is_independent(independent | 1 << i) {
                independent |= 1 << i;
            }
        }
        independent.count_ones() as usize
    }

    /// Minimal dependent sets, by increasing size. Exhaustive over subsets.
    pub fn circuits(&self) -> Vec<Subset> {
        let mut by_size: Vec<Subset> = (0..=self.ground())
            .filter(|&s| !self.is_independent(s))
            .collect();
        by_size.sort_by_key(|s| (s.count_ones(), *s));
        let mut circuits: Vec<Subset> = Vec::new();
        for s in by_size {
            if circuits.iter().all(|&c| c & !s != 0) {
                circuits.push(s);
            }
        }
        circuits
    }

    pub fn bases(&self) -> Vec<Subset> {
        (0..=self.ground())
            .filter(|&s| s.count_ones() as usize == self.rank && self.is_independent(s))
            .collect()
    }

    /// Checks the independence axioms over every subset: the empty set is
    /// independent, subsets of independent sets are independent, and a
    /// smaller independent set extends from any larger one.
    pub fn check_axioms(&self) -> Result<(), String> {
        if !self.is_independent(0) {
            return Err("empty set is dependent".into());
        }
        let independent: Vec<Subset> = (0..=self.ground())
            .filter(|&s| self.is_independent(s))
            .collect();
        let lookup: BTreeSet<Subset> = independent.iter().copied().collect();
        for &s in &independent {
            for i in bits(s) {
                if !lookup.contains(&(s & !(1 << i))) {
                    return Err(format!(
                        "{:?} independent but a subset is not",
                        self.names(s)
                    ));
                }
            }
        }
        for &a in &independent {
            for &b in &independent {
                if a.count_ones() < b.count_ones()
                    && !bits(b & !a).any(|x| lookup.contains(&(a | 1 << x)))
                {
                    return Err(format!(
                        "{:?} cannot be extended from {:?}",
                        self.names(a),
                        self.names(b)
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Edges of `g` as a matroid whose independent sets are forests.
pub fn graphic_matroid(g: &SimpleGraph) -> Matroid {
    let edges = g.edge_list();
    assert!(
        edges.len() <= MAX_ELEMENTS,
        "too many edges for a bit-mask matroid"
    );
    let labels = edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
    Matroid::with_oracle(
        labels,
        Oracle::Graphic {
            n: g.vertex_count(),
            edges,
        },
    )
}

const VAMOS_LABELS: [&str; 8] = ["a1", "a2", "b1", "b2", "c1", "c2", "d1", "d2"];

/// Pairs of the Vámos matroid whose unions are the dependent 4-sets; the
/// pair (c, d) is left out.
const VAMOS_DEPENDENT_PAIRS: [(usize, usize); 5] = [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)];

fn vamos_dependent_sets() -> BTreeSet<Subset> {
    VAMOS_DEPENDENT_PAIRS
        .iter()
        .map(|&(p, q)| 0b11u64 << (2 * p) | 0b11u64 << (2 * q))
        .collect()
}

/// The Vámos matroid: rank 4 on eight elements, with exactly five dependent
/// 4-sets.
pub fn vamos() -> Matroid {
    let dependent = vamos_dependent_sets();
    let bases: Vec<Vec<usize>> = (0u64..256)
        .filter(|s| s.count_ones() == 4 && !dependent.contains(s))
        .map(|s| bits(s).collect())
        .collect();
    Matroid::from_bases(VAMOS_LABELS.iter().map(|s| s.to_string()).collect(), &bases)
        .expect("the Vámos bases satisfy the exchange axiom")
}

/// `m / contract \ delete`, indices into `m`'s ground set. A dependent
/// contract set is reduced to one of its bases, the rest of it deleted.
pub fn matroid_minor(
    m: &Matroid,
    delete: &[usize],
    contract: &[usize],
) -> Result<Matroid, MatroidError> {
    let mask = |xs: &[usize]| -> Result<Subset, MatroidError> {
        xs.iter().try_fold(0, |acc, &x| {
            if x >= m.len() {
                Err(MatroidError::UnknownElement(x.to_string()))
            } else {
                Ok(acc | 1 << x)
            }
        })
    };
    let (d, c) = (mask(delete)?, mask(contract)?);
    if d & c != 0 {
        return Err(MatroidError::Overlap);
    }
    let mut independent = 0;
    for i in bits(c) {
        if m.is_independent(independent | 1 << i) {
            independent |= 1 << i;
        }
    }
    Ok(minor_unchecked(m, m.ground() & !d & !c, independent))
}

fn minor_unchecked(m: &Matroid, keep_mask: Subset, contract: Subset) -> Matroid {
    let keep: Vec<usize> = bits(keep_mask).collect();
    let labels = keep.iter().map(|&i| m.labels[i].clone()).collect();
    Matroid::with_oracle(
        labels,
        Oracle::Minor {
            base: Arc::new(m.clone()),
            keep,
            contract,
        },
    )
}

/// Whether some minor of `m` is isomorphic to the Vámos matroid.
pub fn has_vamos_minor(m: &Matroid) -> Result<bool, MatroidError> {
    const LIMIT: usize = 16;
    if m.len() > LIMIT {
        return Err(MatroidError::SearchTooLarge {
            got: m.len(),
            limit: LIMIT,
        });
    }
    if m.len() < 8 || m.rank() < 4 {
        return Ok(false);
    }
    // A rank-4 minor on eight elements is M / C restricted to S with C
    // independent of size r - 4.
    let c_size = m.rank() - 4;
    let contract_sets: Vec<Subset> = (0..=m.ground())
        .filter(|&c| c.count_ones() as usize == c_size && m.is_independent(c))
        .collect();
    let target = vamos_dependent_sets();
    Ok(contract_sets.par_iter().any(|&c| {
        let rest = m.ground() & !c;
        subsets_of_size(rest, 8).into_iter().any(|s| {
            let elems: Vec<usize> = bits(s).collect();
            restriction_matches_vamos(m, c, &elems, &target)
        })
    }))
}

fn subsets_of_size(mask: Subset, size: usize) -> Vec<Subset> {
    let elems: Vec<usize> = bits(mask).collect();
    let mut out = Vec::new();
    let mut pick = |chosen: Subset| out.push(chosen);
    fn go(
        elems: &[usize],
        size: usize,
        start: usize,
        acc: Subset,
        count: usize,
        f: &mut dyn FnMut(Subset),
    ) {
        if count == size {
            f(acc);
            return;
        }
        for i in start..elems.len() {
            if elems.len() - i < size - count {
                break;
            }
            go(elems, size, i + 1, acc | 1 << elems[i], count + 1, f);
        }
    }
    go(&elems, size, 0, 0, 0, &mut pick);
    out
}

/// Compares `(M / c)|elems` with Vámos: both must be paving of rank 4 with
/// five dependent 4-sets placed the same way.
fn restriction_matches_vamos(
    m: &Matroid,
    c: Subset,
    elems: &[usize],
    target: &BTreeSet<Subset>,
) -> bool {
    let independent =
        |local: Subset| m.is_independent(bits(local).fold(c, |acc, i| acc | 1 << elems[i]));
    for s in 1u64..256 {
        if s.count_ones() <= 3 && !independent(s) {
            return false;
        }
    }
    let mut dependent = Vec::new();
    for s in 0u64..256 {
        if s.count_ones() == 4 && !independent(s) {
            dependent.push(s);
            if dependent.len() > target.len() {
                return false;
            }
        }
    }
    if dependent.len() != target.len() {
        return false;
    }
    let dependent: BTreeSet<Subset> = dependent.into_iter().collect();
    let mut image = [usize::MAX; 8];
    let mut used = [false; 8];
    map_elements(0, &mut image, &mut used, &dependent, target)
}

// Assigns images element by element, checking every 4-set whose elements
// are all assigned.
fn map_elements(
    next: usize,
    image: &mut [usize; 8],
    used: &mut [bool; 8],
    source: &BTreeSet<Subset>,
    target: &BTreeSet<Subset>,
) -> bool {
    if next == 8 {
        return true;
    }
    for t in 0..8 {
        if used[t] {
            continue;
        }
        image[next] = t;
        used[t] = true;
        let assigned = full(next + 1);
        let consistent = (0u64..256)
            .filter(|&s| s.count_ones() == 4 && s & !assigned == 0 && s >> next & 1 == 1)
            .all(|s| {
                let mapped = bits(s).fold(0, |acc, i| acc | 1 << image[i]);
                source.contains(&s) == target.contains(&mapped)
            });
        if consistent && map_elements(next + 1, image, used, source, target) {
            return true;
        }
        used[t] = false;
    }
    image[next] = usize::MAX;
    false
}

/// Ground set element written as a string or an integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementLabel {
    Name(String),
    Number(u64),
}

impl ElementLabel {
    fn text(&self) -> String {
        match self {
            ElementLabel::Name(s) => s.clone(),
            ElementLabel::Number(n) => n.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatroidDocument {
    #[serde(rename = "schemaVersion")]
    pub schema_version: String,
    #[serde(rename = "groundSet")]
    pub ground_set: Vec<ElementLabel>,
    pub bases: Vec<Vec<ElementLabel>>,
}

impl MatroidDocument {
    pub fn into_matroid(self) -> Result<Matroid, MatroidError> {
        if self.schema_version != "1" {
            return Err(MatroidError::SchemaVersion(self.schema_version));
        }
        let labels: Vec<String> = self.ground_set.iter().map(ElementLabel::text).collect();
        let position: BTreeMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let bases = self
            .bases
            .iter()
            .map(|b| {
                b.iter()
                    .map(|e| {
                        let t = e.text();
                        position
                            .get(t.as_str())
                            .copied()
                            .ok_or(MatroidError::UnknownElement(t))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Matroid::from_bases(labels, &bases)
    }

    pub fn from_matroid(m: &Matroid) -> Self {
        MatroidDocument {
            schema_version: "1".into(),
            ground_set: m.labels.iter().cloned().map(ElementLabel::Name).collect(),
            bases: m
                .bases()
                .into_iter()
                .map(|b| m.names(b).into_iter().map(ElementLabel::Name).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_matroid_is_free() {
        let m = graphic_matroid(&SimpleGraph::path(5));
        assert_eq!(m.rank(), 4);
        assert!(m.is_independent(m.ground()));
        assert!(m.circuits().is_empty());
    }

    #[test]
    fn triangle_has_one_circuit() {
        let m = graphic_matroid(&SimpleGraph::complete(3));
        assert_eq!(m.rank(), 2);
        assert_eq!(m.circuits(), vec![0b111]);
    }

    #[test]
    fn k4_circuits() {
        let m = graphic_matroid(&SimpleGraph::complete(4));
        assert_eq!(m.rank(), 3);
        let circuits = m.circuits();
        assert_eq!(circuits.len(), 7);
        assert_eq!(circuits.iter().filter(|c| c.count_ones() == 3).count(), 4);
    }

    #[test]
    fn vamos_structure() {
        let v = vamos();
        assert_eq!((v.len(), v.rank()), (8, 4));
        assert!(!v.is_independent(v.subset_of(&["a1", "a2", "b1", "b2"]).unwrap()));
        assert!(v.is_independent(v.subset_of(&["c1", "c2", "d1", "d2"]).unwrap()));
        assert!((0u64..256)
            .filter(|s| s.count_ones() == 3)
            .all(|s| v.is_independent(s)));
        v.check_axioms().unwrap();
    }

    #[test]
    fn minor_examples() {
        let v = vamos();
        let same = matroid_minor(&v, &[], &[]).unwrap();
        assert_eq!((same.len(), same.rank()), (8, 4));
        let tri = graphic_matroid(&SimpleGraph::complete(3));
        let c2 = matroid_minor(&tri, &[], &[0]).unwrap();
        assert_eq!((c2.len(), c2.rank()), (2, 1));
        assert!(!c2.is_independent(0b11));
        let seven = matroid_minor(&v, &[3], &[]).unwrap();
        assert_eq!((seven.len(), seven.rank()), (7, 4));
        assert_eq!(
            matroid_minor(&v, &[1], &[1]).unwrap_err(),
            MatroidError::Overlap
        );
    }

    #[test]
    fn dependent_contraction_reduces_to_a_basis() {
        let k4 = graphic_matroid(&SimpleGraph::complete(4));
        let triangle = k4.subset_of(&["0-1", "0-2", "1-2"]).unwrap();
        let idx: Vec<usize> = bits(triangle).collect();
        let m = matroid_minor(&k4, &[], &idx).unwrap();
        assert_eq!((m.len(), m.rank()), (3, 1));
    }

    #[test]
    fn vamos_minor_search() {
        assert!(has_vamos_minor(&vamos()).unwrap());
        assert!(!has_vamos_minor(&graphic_matroid(&SimpleGraph::complete(5))).unwrap());
        assert!(!has_vamos_minor(&graphic_matroid(&SimpleGraph::path(9))).unwrap());
    }

    #[test]
    fn relabeled_vamos_is_found_inside_a_larger_matroid() {
        // Vámos plus a coloop, with elements shuffled.
        let v = vamos();
        let order = [5usize, 0, 7, 2, 4, 1, 6, 3];
        let mut labels: Vec<String> = order.iter().map(|&i| v.labels()[i].clone()).collect();
        labels.push("x".into());
        let bases: Vec<Vec<usize>> = v
            .bases()
            .into_iter()
            .map(|b| {
                let mut out: Vec<usize> = bits(b)
                    .map(|i| order.iter().position(|&o| o == i).unwrap())
                    .collect();
                out.push(8);
                out
            })
            .collect();
        let m = Matroid::from_bases(labels, &bases).unwrap();
        assert!(has_vamos_minor(&m).unwrap());
    }

    #[test]
    fn exchange_violation_is_rejected() {
        let labels = vec!["a".into(), "b".into(), "c".into(), "d".into()];
        let err = Matroid::from_bases(labels, &[vec![0, 1], vec![2, 3]]).unwrap_err();
        assert!(matches!(err, MatroidError::Exchange(..)));
    }

    #[test]
    fn document_round_trip() {
        let text = r#"{"schemaVersion":"1","groundSet":["x","y","z"],"bases":[["x","y"],["x","z"],["y","z"]]}"#;
        let doc: MatroidDocument = serde_json::from_str(text).unwrap();
        let m = doc.into_matroid().unwrap();
        assert_eq!(m.rank(), 2);
        let back = MatroidDocument::from_matroid(&m).into_matroid().unwrap();
        assert_eq!(back.bases(), m.bases());
    }
}
