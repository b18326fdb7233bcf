//! Rooted plane trees stored as preorder slot masks, and their colorings.

use std::fmt;

use thiserror::Error;

use crate::diagram::{BifurcationKind, OrbitIndex};
use crate::graph::SimpleGraph;
use crate::laws::LawTable;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("slot masks do not describe exactly one tree")]
    MalformedMasks,
    #[error("color list has {got} entries for {expected} nodes")]
    ColorCount { expected: usize, got: usize },
    #[error("graph is not a tree")]
    NotATree,
}

/// A rooted tree whose children occupy numbered slots. Node ids are preorder
/// positions; `masks[v]` has bit `i` set when slot `i` of `v` holds a child.
/// Ordered (non-positional) trees use contiguous masks `0b1..1`.
#[derive(Clone)]
pub struct PlaneTree {
    masks: Vec<u32>,
    children: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
}

impl PartialEq for PlaneTree {
    fn eq(&self, other: &Self) -> bool {
        self.masks == other.masks
    }
}

impl Eq for PlaneTree {}

impl std::hash::Hash for PlaneTree {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.masks.hash(state);
    }
}

impl PartialOrd for PlaneTree {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PlaneTree {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.masks.len(), &self.masks).cmp(&(other.masks.len(), &other.masks))
    }
}

impl fmt::Debug for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlaneTree{:?}", self.masks)
    }
}

impl PlaneTree {
    pub fn single() -> Self {
        PlaneTree {
            masks: vec![0],
            children: vec![vec![]],
            parent: vec![None],
        }
    }

    pub fn from_masks(masks: Vec<u32>) -> Result<Self, TreeError> {
        let n = masks.len();
        if n == 0 {
            return Err(TreeError::MalformedMasks);
        }
        let mut children = vec![Vec::new(); n];
        let mut parent = vec![None; n];
        // Stack of (node, remaining child slots).
        let mut stack: Vec<(usize, u32)> = vec![(0, masks[0])];
        let mut next = 1;
        while let Some((v, rest)) = stack.pop() {
            if rest == 0 {
                continue;
            }
            if next >= n {
                return Err(TreeError::MalformedMasks);
            }
            let low = rest & rest.wrapping_neg();
            stack.push((v, rest & !low));
            children[v].push(next);
            parent[next] = Some(v);
            stack.push((next, masks[next]));
            next += 1;
        }
        if next != n {
            return Err(TreeError::MalformedMasks);
        }
        Ok(PlaneTree {
            masks,
            children,
            parent,
        })
    }

    /// Ordered tree from preorder child counts.
    pub fn from_child_counts(counts: &[usize]) -> Result<Self, TreeError> {
        PlaneTree::from_masks(counts.iter().map(|&c| contiguous(c)).collect())
    }

    /// Ordered tree from explicit child lists; node 0 is the root. Nodes are
    /// renumbered in preorder.
    pub fn from_children_lists(lists: &[Vec<usize>]) -> Result<Self, TreeError> {
        let mut counts = Vec::with_capacity(lists.len());
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            if v >= lists.len() || counts.len() > lists.len() {
                return Err(TreeError::MalformedMasks);
            }
            counts.push(lists[v].len());
            stack.extend(lists[v].iter().rev());
        }
        if counts.len() != lists.len() {
            return Err(TreeError::MalformedMasks);
        }
        PlaneTree::from_child_counts(&counts)
    }

    pub fn masks(&self) -> &[u32] {
        &self.masks
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn child_count(&self, v: usize) -> usize {
        self.children[v].len()
    }

    pub fn max_children(&self) -> usize {
        self.children.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Same tree with slot positions forgotten.
    pub fn to_ordered(&self) -> PlaneTree {
        let counts: Vec<usize> = self.children.iter().map(Vec::len).collect();
        PlaneTree::from_child_counts(&counts).expect("child counts of a tree")
    }

    /// Underlying undirected tree, vertices numbered in preorder.
    pub fn to_graph(&self) -> SimpleGraph {
        let edges = (1..self.len()).map(|v| (self.parent[v].unwrap(), v));
        SimpleGraph::new(self.len(), edges).expect("tree edges are simple")
    }

    /// Every node has at most two slots, slot 0 = left, slot 1 = right.
    pub fn is_binary(&self) -> bool {
        self.masks.iter().all(|&m| m < 4)
    }
}

fn contiguous(c: usize) -> u32 {
    if c >= 32 {
        u32::MAX
    } else {
        (1u32 << c) - 1
    }
}

/// Left-child/right-sibling encoding: a node's first child becomes its left
/// child, each later child becomes the right child of its previous sibling.
/// Slot positions of the input are ignored; node ids (preorder) are kept.
pub fn mary_to_binary(tree: &PlaneTree) -> PlaneTree {
    let mut masks = vec![0u32; tree.len()];
    for v in 0..tree.len() {
        let ch = tree.children(v);
        if !ch.is_empty() {
            masks[v] |= 1;
        }
        for pair in ch.windows(2) {
            masks[pair[0]] |= 2;
        }
    }
    PlaneTree::from_masks(masks).expect("sibling encoding of a tree is a tree")
}

/// A plane tree with one orbit index per node: the star picture of an
/// acyclic diagram, each internal node the hub of its children.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredTree {
    pub shape: PlaneTree,
    pub colors: Vec<OrbitIndex>,
}

impl ColoredTree {
    pub fn new(shape: PlaneTree, colors: Vec<OrbitIndex>) -> Result<Self, TreeError> {
        if colors.len() != shape.len() {
            return Err(TreeError::ColorCount {
                expected: shape.len(),
                got: colors.len(),
            });
        }
        Ok(ColoredTree { shape, colors })
    }

    /// Bifurcation the node stands for, read off its child count.
    pub fn kind(&self, v: usize) -> Option<BifurcationKind> {
        BifurcationKind::for_tree_children(self.shape.child_count(v))
    }

    pub fn node_is_admissible(&self, table: &LawTable, v: usize) -> bool {
        let children: Vec<OrbitIndex> = self
            .shape
            .children(v)
            .iter()
            .map(|&c| self.colors[c])
            .collect();
        star_is_admissible(table, self.colors[v], &children)
    }

    pub fn is_admissible(&self, table: &LawTable) -> bool {
        (0..self.shape.len()).all(|v| self.node_is_admissible(table, v))
    }

    pub fn to_graph(&self) -> SimpleGraph {
        self.shape
            .to_graph()
            .with_colors(self.colors.clone())
            .expect("one color per node")
    }
}

/// Law check for a hub colored `hub` with the given child colors. One child
/// means a saddle-node pairing of hub and child.
pub fn star_is_admissible(table: &LawTable, hub: OrbitIndex, children: &[OrbitIndex]) -> bool {
    match BifurcationKind::for_tree_children(children.len()) {
        None => true,
        Some(BifurcationKind::SaddleNode) => table
            .is_admissible_star(
                BifurcationKind::SaddleNode,
                OrbitIndex::Zero,
                &[hub, children[0]],
            )
            .unwrap_or(false),
        Some(kind) => table
            .is_admissible_star(kind, hub, children)
            .unwrap_or(false),
    }
}

/// Canonical code, centered representative and its colors.
pub type FreeCanonical = (Vec<u8>, PlaneTree, Option<Vec<OrbitIndex>>);

/// Canonical form of an unrooted tree, optionally vertex-colored. Returns the
/// canonical code and a representative rooted at a center with children in
/// code order, plus the colors moved onto the representative.
pub fn free_canonical(graph: &SimpleGraph) -> Result<FreeCanonical, TreeError> {
    if !graph.is_tree() {
        return Err(TreeError::NotATree);
    }
    let adj = graph.adjacency();
    let colors = graph.colors();
    let mut best: Option<(Vec<u8>, usize)> = None;
    for c in tree_centers(&adj) {
        let code = ahu_code(&adj, colors, c, usize::MAX);
        if best.as_ref().is_none_or(|(b, _)| code < *b) {
            best = Some((code, c));
        }
    }
    let (code, root) = best.expect("a tree has a center");
    // Rebuild the representative in code order.
    let mut lists: Vec<Vec<usize>> = Vec::new();
    let mut old_of_new: Vec<usize> = Vec::new();
    let mut queue = vec![(root, usize::MAX)];
    let mut new_of_old = vec![usize::MAX; graph.vertex_count()];
    new_of_old[root] = 0;
    old_of_new.push(root);
    lists.push(Vec::new());
    let mut i = 0;
    while i < queue.len() {
        let (v, parent) = queue[i];
        let mut kids: Vec<(Vec<u8>, usize)> = adj[v]
            .iter()
            .filter(|&&w| w != parent)
            .map(|&w| (ahu_code(&adj, colors, w, v), w))
            .collect();
        kids.sort();
        for (_, w) in kids {
            new_of_old[w] = old_of_new.len();
            old_of_new.push(w);
            lists.push(Vec::new());
            lists[new_of_old[v]].push(new_of_old[w]);
            queue.push((w, v));
        }
        i += 1;
    }
    let shape = PlaneTree::from_children_lists(&lists)?;
    // `from_children_lists` renumbers in preorder; map colors along.
    let recolored = colors.map(|cs| {
        let mut preorder = Vec::with_capacity(lists.len());
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            preorder.push(cs[old_of_new[v]]);
            stack.extend(lists[v].iter().rev());
        }
        preorder
    });
    Ok((code, shape, recolored))
}

fn tree_centers(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut leaves: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= leaves.len();
        let mut next = Vec::new();
        for &leaf in &leaves {
            for &w in &adj[leaf] {
                degree[w] -= 1;
                if degree[w] == 1 {
                    next.push(w);
                }
            }
        }
        leaves = next;
    }
    leaves.sort_unstable();
    leaves
}

fn ahu_code(adj: &[Vec<usize>], colors: Option<&[OrbitIndex]>, v: usize, parent: usize) -> Vec<u8> {
    let mut kids: Vec<Vec<u8>> = adj[v]
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| ahu_code(adj, colors, w, v))
        .collect();
    kids.sort();
    let mut code = vec![b'('];
    if let Some(cs) = colors {
        code.push(match cs[v] {
            OrbitIndex::Minus => b'r',
            OrbitIndex::Zero => b'g',
            OrbitIndex::Plus => b'b',
        });
    }
    for k in kids {
        code.extend(k);
    }
    code.push(b')');
    code
}
