//! Dimension-indexed admissibility laws for bifurcations, stored as data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{index_sum, BifurcationKind, OrbitIndex};

/// Period of a child branch relative to its parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Multiplier {
    Fixed(u64),
    /// The `m` of a type-m bifurcation (or of any step in a type-m cascade).
    Symbol(MSymbol),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MSymbol {
    #[serde(rename = "m")]
    M,
}

impl Multiplier {
    pub const ONE: Multiplier = Multiplier::Fixed(1);
    pub const TWO: Multiplier = Multiplier::Fixed(2);
    pub const M: Multiplier = Multiplier::Symbol(MSymbol::M);
}

impl fmt::Display for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplier::Fixed(x) => write!(f, "x{x}"),
            Multiplier::Symbol(_) => f.write_str("xm"),
        }
    }
}

/// One admissible transition `parent -> children`. Children are kept sorted,
/// each paired with its period multiplier.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Split {
    children: Vec<(OrbitIndex, Multiplier)>,
}

impl Split {
    pub fn new(mut children: Vec<(OrbitIndex, Multiplier)>) -> Self {
        children.sort();
        Split { children }
    }

    /// Children with every multiplier equal to 1.
    pub fn unit(children: &[OrbitIndex]) -> Self {
        Split::new(children.iter().map(|&c| (c, Multiplier::ONE)).collect())
    }

    pub fn children(&self) -> Vec<OrbitIndex> {
        self.children.iter().map(|&(c, _)| c).collect()
    }

    pub fn entries(&self) -> &[(OrbitIndex, Multiplier)] {
        &self.children
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn index_sum(&self) -> i64 {
        index_sum(self.children.iter().map(|&(c, _)| c))
    }

    pub fn distinct_indices(&self) -> usize {
        self.children
            .iter()
            .map(|&(c, _)| c)
            .collect::<BTreeSet<_>>()
            .len()
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, (c, m)) in self.children.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}@{m}")?;
        }
        f.write_str(")")
    }
}

/// Law lookup key kind. Type-m laws do not depend on `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LawKind {
    SaddleNode,
    PeriodDoubling,
    TypeM,
    Junction(u32),
}

impl From<BifurcationKind> for LawKind {
    fn from(kind: BifurcationKind) -> Self {
        match kind {
            BifurcationKind::SaddleNode => LawKind::SaddleNode,
            BifurcationKind::PeriodDoubling => LawKind::PeriodDoubling,
            BifurcationKind::TypeM(_) => LawKind::TypeM,
            BifurcationKind::Junction(n) => LawKind::Junction(n),
        }
    }
}

impl LawKind {
    fn arity(self) -> usize {
        match self {
            LawKind::SaddleNode | LawKind::PeriodDoubling => 2,
            LawKind::TypeM => 3,
            LawKind::Junction(n) => n as usize,
        }
    }
}

/// Saddle-node laws live under parent index 0: the pair of branches on one
/// side sums to the empty other side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LawKey {
    pub kind: LawKind,
    pub parent: OrbitIndex,
}

/// Generators for `n`-junction laws, built from repeated elementary events.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum JunctionRule {
    /// `parent -> (parent, 0 x (n-1))`: period-doublings along one branch.
    PdCascade { parent: OrbitIndex },
    /// `parent -> (parent x (k+1), -parent x k)` with `n = 2k+1`: type-m
    /// events along one branch.
    TypeMCascade { parent: OrbitIndex },
    /// `0 -> (0 x n)` when 3 divides `n`.
    ZeroMultipleOfThree,
}

impl JunctionRule {
    pub fn split(self, n: u32, parent: OrbitIndex) -> Option<Split> {
        use OrbitIndex::*;
        if n < 4 {
            return None;
        }
        match self {
            JunctionRule::PdCascade { parent: p } if p == parent => {
                let mut children: Vec<_> = (0..n - 1)
                    .map(|i| (Zero, Multiplier::Fixed(1 << i.min(62))))
                    .collect();
                children.push((p, Multiplier::Fixed(1 << (n - 1).min(62))));
                Some(Split::new(children))
            }
            JunctionRule::TypeMCascade { parent: p } if p == parent && n % 2 == 1 => {
                let k = (n - 1) / 2;
                let mut children = vec![(p, Multiplier::ONE)];
                children.extend((0..k).map(|_| (p, Multiplier::M)));
                children.extend((0..k).map(|_| (p.negated(), Multiplier::M)));
                Some(Split::new(children))
            }
            JunctionRule::ZeroMultipleOfThree if parent == Zero && n.is_multiple_of(3) => {
                let mut children = vec![(Zero, Multiplier::ONE)];
                children.extend((1..n).map(|_| (Zero, Multiplier::M)));
                Some(Split::new(children))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LawError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("{kind:?} law {parent} -> {split} does not conserve the orbit index")]
    NotConserved {
        kind: LawKind,
        parent: OrbitIndex,
        split: String,
    },
    #[error("{kind:?} law has {got} children, expected {expected}")]
    Arity {
        kind: LawKind,
        expected: usize,
        got: usize,
    },
    #[error("a 0-index orbit cannot period-double into two 0-index orbits")]
    ZeroPeriodDoubling,
    #[error("type-m law {0} -> (0, {0}, 0) is not admissible")]
    ForbiddenTypeM(OrbitIndex),
    #[error("junction law {0} uses more than two distinct indices")]
    JunctionIndices(String),
    #[error("saddle-node laws must be keyed under parent index 0")]
    SaddleNodeParent,
    #[error("junction rule {0:?} is not admissible")]
    BadJunctionRule(JunctionRule),
    #[error("multiplier list has {got} entries for {expected} children")]
    MultiplierCount { expected: usize, got: usize },
    #[error("invalid bifurcation kind {0:?}")]
    InvalidKind(BifurcationKind),
    #[error("unsupported schemaVersion {0:?}")]
    SchemaVersion(String),
    #[error("law table document: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawTable {
    dimension: u32,
    entries: BTreeMap<LawKey, BTreeSet<Split>>,
    junction_rules: BTreeSet<JunctionRule>,
}

impl LawTable {
    pub fn new(
        dimension: u32,
        laws: impl IntoIterator<Item = (LawKey, Split)>,
        junction_rules: impl IntoIterator<Item = JunctionRule>,
    ) -> Result<Self, LawError> {
        if dimension == 0 {
            return Err(LawError::ZeroDimension);
        }
        let mut entries: BTreeMap<LawKey, BTreeSet<Split>> = BTreeMap::new();
        for (key, split) in laws {
            check_law(key, &split)?;
            entries.entry(key).or_default().insert(split);
        }
        let junction_rules: BTreeSet<JunctionRule> = junction_rules.into_iter().collect();
        for &rule in &junction_rules {
            match rule {
                JunctionRule::PdCascade {
                    parent: OrbitIndex::Zero,
                }
                | JunctionRule::TypeMCascade {
                    parent: OrbitIndex::Zero,
                } => return Err(LawError::BadJunctionRule(rule)),
                _ => {}
            }
        }
        Ok(LawTable {
            dimension,
            entries,
            junction_rules,
        })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn entries(&self) -> &BTreeMap<LawKey, BTreeSet<Split>> {
        &self.entries
    }

    pub fn junction_rules(&self) -> &BTreeSet<JunctionRule> {
        &self.junction_rules
    }

    /// All admissible splits of a `parent` orbit through `kind`. For a
    /// saddle-node pass `OrbitIndex::Zero`. Empty means impossible.
    pub fn allowed_splits(&self, kind: BifurcationKind, parent: OrbitIndex) -> BTreeSet<Split> {
        let law_kind = LawKind::from(kind);
        let mut out = self
            .entries
            .get(&LawKey {
                kind: law_kind,
                parent,
            })
            .cloned()
            .unwrap_or_default();
        if let LawKind::Junction(n) = law_kind {
            out.extend(
                self.junction_rules
                    .iter()
                    .filter_map(|r| r.split(n, parent)),
            );
        }
        out
    }

    /// Child index multisets (sorted) admissible for `kind` from `parent`.
    pub fn allowed_children(
        &self,
        kind: BifurcationKind,
        parent: OrbitIndex,
    ) -> BTreeSet<Vec<OrbitIndex>> {
        self.allowed_splits(kind, parent)
            .iter()
            .map(Split::children)
            .collect()
    }

    pub fn is_admissible_star(
        &self,
        kind: BifurcationKind,
        parent: OrbitIndex,
        children: &[OrbitIndex],
    ) -> Result<bool, LawError> {
        let expected = kind.child_count();
        if children.len() != expected {
            return Err(LawError::Arity {
                kind: kind.into(),
                expected,
                got: children.len(),
            });
        }
        let mut sorted = children.to_vec();
        sorted.sort();
        Ok(self
            .allowed_splits(kind, parent)
            .iter()
            .any(|s| s.children() == sorted))
    }

    /// Union of two tables of the same dimension.
    pub fn extended(&self, other: &LawTable) -> LawTable {
        let mut out = self.clone();
        for (k, v) in &other.entries {
            out.entries.entry(*k).or_default().extend(v.iter().cloned());
        }
        out.junction_rules
            .extend(other.junction_rules.iter().copied());
        out
    }
}

fn check_law(key: LawKey, split: &Split) -> Result<(), LawError> {
    use OrbitIndex::*;
    let expected = key.kind.arity();
    if split.len() != expected {
        return Err(LawError::Arity {
            kind: key.kind,
            expected,
            got: split.len(),
        });
    }
    if key.kind == LawKind::SaddleNode && key.parent != Zero {
        return Err(LawError::SaddleNodeParent);
    }
    if split.index_sum() != i64::from(key.parent.value()) {
        return Err(LawError::NotConserved {
            kind: key.kind,
            parent: key.parent,
            split: split.to_string(),
        });
    }
    let children = split.children();
    if key.kind == LawKind::PeriodDoubling && key.parent == Zero && children == [Zero, Zero] {
        return Err(LawError::ZeroPeriodDoubling);
    }
    if key.kind == LawKind::TypeM && key.parent != Zero {
        let mut forbidden = vec![Zero, key.parent, Zero];
        forbidden.sort();
        if children == forbidden {
            return Err(LawError::ForbiddenTypeM(key.parent));
        }
    }
    if matches!(key.kind, LawKind::Junction(_)) && split.distinct_indices() > 2 {
        return Err(LawError::JunctionIndices(split.to_string()));
    }
    Ok(())
}

/// The builtin laws for dimension `d`. Dimensions above 4 share the
/// four-dimensional table.
pub fn builtin_table(d: u32) -> Result<LawTable, LawError> {
    use OrbitIndex::*;
    if d == 0 {
        return Err(LawError::ZeroDimension);
    }
    let (one, two, m) = (Multiplier::ONE, Multiplier::TWO, Multiplier::M);
    let sn = |a, b| {
        (
            LawKey {
                kind: LawKind::SaddleNode,
                parent: Zero,
            },
            Split::new(vec![(a, one), (b, one)]),
        )
    };
    let law = |kind, parent, children: Vec<(OrbitIndex, Multiplier)>| {
        (LawKey { kind, parent }, Split::new(children))
    };
    let mut laws = vec![
        sn(Plus, Minus),
        law(
            LawKind::PeriodDoubling,
            Plus,
            vec![(Zero, one), (Plus, two)],
        ),
    ];
    let mut rules = vec![JunctionRule::PdCascade { parent: Plus }];
    if d >= 2 {
        laws.push(law(
            LawKind::TypeM,
            Plus,
            vec![(Plus, one), (Minus, m), (Plus, m)],
        ));
        rules.push(JunctionRule::TypeMCascade { parent: Plus });
    }
    if d >= 3 {
        laws.push(sn(Zero, Zero));
        laws.push(law(
            LawKind::PeriodDoubling,
            Zero,
            vec![(Minus, one), (Plus, two)],
        ));
        laws.push(law(
            LawKind::PeriodDoubling,
            Minus,
            vec![(Zero, one), (Minus, two)],
        ));
        laws.push(law(
            LawKind::TypeM,
            Minus,
            vec![(Minus, one), (Plus, m), (Minus, m)],
        ));
        rules.push(JunctionRule::PdCascade { parent: Minus });
        rules.push(JunctionRule::TypeMCascade { parent: Minus });
    }
    if d >= 4 {
        laws.push(law(
            LawKind::TypeM,
            Zero,
            vec![(Zero, one), (Zero, m), (Zero, m)],
        ));
        laws.push(law(
            LawKind::TypeM,
            Zero,
            vec![(Zero, one), (Minus, m), (Plus, m)],
        ));
        rules.push(JunctionRule::ZeroMultipleOfThree);
    }
    LawTable::new(d, laws, rules)
}

/// JSON override document for law tables.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawTableDocument {
    #[serde(rename = "schemaVersion")]
    pub schema_version: String,
    pub dimension: u32,
    /// Start from the builtin table of `dimension` (default) or from nothing.
    #[serde(rename = "extendsBuiltin", default = "default_true")]
    pub extends_builtin: bool,
    #[serde(default)]
    pub entries: Vec<LawEntryDocument>,
    #[serde(rename = "junctionRules", default)]
    pub junction_rules: Vec<JunctionRule>,
}

fn default_true() -> bool {
    true
}

/// One law. An entry applies to every table whose dimension is at least
/// the entry's `dimension`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawEntryDocument {
    pub dimension: u32,
    pub kind: EntryKind,
    pub parent: OrbitIndex,
    pub children: Vec<OrbitIndex>,
    /// Same length as `children`; omitted means all 1.
    #[serde(default)]
    pub multipliers: Vec<Multiplier>,
}

/// Kind as written in a law entry; `"type_m"` may omit `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryKind {
    Kind(BifurcationKind),
    Named(NamedKind),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedKind {
    TypeM,
}

impl EntryKind {
    fn law_kind(self) -> Result<LawKind, LawError> {
        match self {
            EntryKind::Kind(k) => {
                k.check().map_err(|_| LawError::InvalidKind(k))?;
                Ok(k.into())
            }
            EntryKind::Named(NamedKind::TypeM) => Ok(LawKind::TypeM),
        }
    }
}

impl LawTableDocument {
    pub fn into_table(self) -> Result<LawTable, LawError> {
        if self.schema_version != "1" {
            return Err(LawError::SchemaVersion(self.schema_version));
        }
        let mut laws = Vec::new();
        for e in self
            .entries
            .iter()
            .filter(|e| e.dimension <= self.dimension)
        {
            let kind = e.kind.law_kind()?;
            let multipliers = if e.multipliers.is_empty() {
                vec![Multiplier::ONE; e.children.len()]
            } else {
                e.multipliers.clone()
            };
            if multipliers.len() != e.children.len() {
                return Err(LawError::MultiplierCount {
                    expected: e.children.len(),
                    got: multipliers.len(),
                });
            }
            let split = Split::new(e.children.iter().copied().zip(multipliers).collect());
            laws.push((
                LawKey {
                    kind,
                    parent: e.parent,
                },
                split,
            ));
        }
        let own = LawTable::new(self.dimension, laws, self.junction_rules)?;
        if self.extends_builtin {
            Ok(builtin_table(self.dimension)?.extended(&own))
        } else {
            Ok(own)
        }
    }
}

/// Parses a law table override document.
pub fn parse_law_table(text: &str) -> Result<LawTable, LawError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: LawTableDocument = serde_path_to_error::deserialize(de)
        .map_err(|e| LawError::Parse(format!("at {}: {}", e.path(), e.inner())))?;
    doc.into_table()
}

#[cfg(test)]
mod tests {
    use super::*;
    use BifurcationKind as K;
    use OrbitIndex::*;

    fn children(table: &LawTable, kind: K, parent: OrbitIndex) -> BTreeSet<Vec<OrbitIndex>> {
        table.allowed_children(kind, parent)
    }

    fn set(items: &[&[OrbitIndex]]) -> BTreeSet<Vec<OrbitIndex>> {
        items
            .iter()
            .map(|c| {
                let mut v = c.to_vec();
                v.sort();
                v
            })
            .collect()
    }

    #[test]
    fn two_dimensional_saddle_nodes_pair_opposite_indices() {
        let t = builtin_table(2).unwrap();
        assert_eq!(children(&t, K::SaddleNode, Zero), set(&[&[Plus, Minus]]));
    }

    #[test]
    fn three_dimensional_zero_orbit_period_doubles_into_opposite_pair() {
        let t = builtin_table(3).unwrap();
        assert_eq!(
            children(&t, K::PeriodDoubling, Zero),
            set(&[&[Minus, Plus]])
        );
    }

    #[test]
    fn tables_saturate_at_four() {
        let t4 = builtin_table(4).unwrap();
        let t5 = builtin_table(5).unwrap();
        assert_eq!(t4.entries(), t5.entries());
        assert_eq!(t4.junction_rules(), t5.junction_rules());
    }

    #[test]
    fn allowed_splits_examples() {
        let t2 = builtin_table(2).unwrap();
        assert!(t2.allowed_splits(K::PeriodDoubling, Minus).is_empty());
        let t4 = builtin_table(4).unwrap();
        assert_eq!(
            children(&t4, K::TypeM(3), Zero),
            set(&[&[Zero, Zero, Zero], &[Zero, Minus, Plus]])
        );
        assert_eq!(children(&t4, K::Junction(6), Zero), set(&[&[Zero; 6]]));
    }

    #[test]
    fn admissible_star_examples() {
        let t3 = builtin_table(3).unwrap();
        assert!(t3
            .is_admissible_star(K::TypeM(5), Minus, &[Minus, Plus, Minus])
            .unwrap());
        let t4 = builtin_table(4).unwrap();
        assert!(!t4
            .is_admissible_star(K::PeriodDoubling, Zero, &[Zero, Zero])
            .unwrap());
        let t2 = builtin_table(2).unwrap();
        assert!(t2
            .is_admissible_star(K::Junction(4), Plus, &[Plus, Zero, Zero, Zero])
            .unwrap());
        assert!(matches!(
            t2.is_admissible_star(K::PeriodDoubling, Plus, &[Plus]),
            Err(LawError::Arity { .. })
        ));
    }

    #[test]
    fn type_m_cascade_conserves_index() {
        let t = builtin_table(2).unwrap();
        let five = children(&t, K::Junction(5), Plus);
        assert!(five.contains(&vec![Minus, Minus, Plus, Plus, Plus]));
        assert!(children(&t, K::Junction(5), Minus).is_empty());
    }

    #[test]
    fn forbidden_laws_are_rejected() {
        let pd00 = (
            LawKey {
                kind: LawKind::PeriodDoubling,
                parent: Zero,
            },
            Split::unit(&[Zero, Zero]),
        );
        assert_eq!(
            LawTable::new(4, [pd00], []),
            Err(LawError::ZeroPeriodDoubling)
        );
        let m = (
            LawKey {
                kind: LawKind::TypeM,
                parent: Plus,
            },
            Split::unit(&[Zero, Plus, Zero]),
        );
        assert_eq!(
            LawTable::new(4, [m], []),
            Err(LawError::ForbiddenTypeM(Plus))
        );
        let bad = (
            LawKey {
                kind: LawKind::PeriodDoubling,
                parent: Plus,
            },
            Split::unit(&[Plus, Plus]),
        );
        assert!(matches!(
            LawTable::new(4, [bad], []),
            Err(LawError::NotConserved { .. })
        ));
        let j = (
            LawKey {
                kind: LawKind::Junction(4),
                parent: Zero,
            },
            Split::unit(&[Minus, Zero, Plus, Zero]),
        );
        assert!(matches!(
            LawTable::new(4, [j], []),
            Err(LawError::JunctionIndices(_))
        ));
    }

    #[test]
    fn override_document_extends_builtin() {
        let text = r#"{
            "schemaVersion": "1",
            "dimension": 2,
            "entries": [
                {"dimension": 2, "kind": "period_doubling", "parent": 0,
                 "children": [-1, 1], "multipliers": [1, 2]}
            ]
        }"#;
        let t = parse_law_table(text).unwrap();
        assert!(t
            .is_admissible_star(K::PeriodDoubling, Zero, &[Plus, Minus])
            .unwrap());
        assert!(t
            .is_admissible_star(K::PeriodDoubling, Plus, &[Zero, Plus])
            .unwrap());
    }

    #[test]
    fn override_document_can_restrict() {
        let text = r#"{"schemaVersion": "1", "dimension": 3, "extendsBuiltin": false,
            "entries": [{"dimension": 1, "kind": "type_m", "parent": 1,
                         "children": [1, -1, 1], "multipliers": [1, "m", "m"]}]}"#;
        let t = parse_law_table(text).unwrap();
        assert!(t.allowed_splits(K::SaddleNode, Zero).is_empty());
        assert_eq!(t.allowed_splits(K::TypeM(4), Plus).len(), 1);
    }

    #[test]
    fn override_errors_name_the_path() {
        let text = r#"{"schemaVersion": "1", "dimension": 3,
            "entries": [{"dimension": 1, "kind": "hopf", "parent": 1, "children": []}]}"#;
        let err = parse_law_table(text).unwrap_err().to_string();
        assert!(err.contains("entries[0]"), "{err}");
    }
}
