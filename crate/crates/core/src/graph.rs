//! Simple undirected graphs with optional vertex colors.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::OrbitIndex;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({0}, {1}) is a self-loop")]
    SelfLoop(usize, usize),
    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    OutOfRange(usize, usize, usize),
    #[error("color list has {got} entries for {expected} vertices")]
    ColorCount { expected: usize, got: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph has {got} vertices; at most {limit} supported here")]
    TooLarge { got: usize, limit: usize },
}

/// Undirected graph on vertices `0..n` without loops or parallel edges.
/// Edges are stored as `(min, max)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    colors: Option<Vec<OrbitIndex>>,
}

impl SimpleGraph {
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a, b));
            }
            if a >= n || b >= n {
                return Err(GraphError::OutOfRange(a, b, n));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(SimpleGraph {
            n,
            edges: set,
            colors: None,
        })
    }

    pub fn with_colors(mut self, colors: Vec<OrbitIndex>) -> Result<Self, GraphError> {
        if colors.len() != self.n {
            return Err(GraphError::ColorCount {
                expected: self.n,
                got: colors.len(),
            });
        }
        self.colors = Some(colors);
        Ok(self)
    }

    pub fn without_colors(&self) -> Self {
        SimpleGraph {
            colors: None,
            ..self.clone()
        }
    }

    pub fn empty(n: usize) -> Self {
        SimpleGraph {
            n,
            edges: BTreeSet::new(),
            colors: None,
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        SimpleGraph {
            n,
            edges,
            colors: None,
        }
    }

    pub fn path(n: usize) -> Self {
        let edges = (1..n).map(|i| (i - 1, i)).collect();
        SimpleGraph {
            n,
            edges,
            colors: None,
        }
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = SimpleGraph::path(n);
        if n >= 3 {
            g.edges.insert((0, n - 1));
        }
        g
    }

    pub fn star(leaves: usize) -> Self {
        let edges = (1..=leaves).map(|i| (0, i)).collect();
        SimpleGraph {
            n: leaves + 1,
            edges,
            colors: None,
        }
    }

    /// Tree from a parent array (`parents[i]` is the parent of `i + 1`).
    pub fn from_parents(parents: &[usize]) -> Result<Self, GraphError> {
        SimpleGraph::new(
            parents.len() + 1,
            parents.iter().enumerate().map(|(i, &p)| (p, i + 1)),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        self.edges.iter().copied().collect()
    }

    pub fn colors(&self) -> Option<&[OrbitIndex]> {
        self.colors.as_deref()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Adjacency rows as bit masks; needs at most 64 vertices.
    pub fn adjacency_bits(&self) -> Vec<u64> {
        assert!(self.n <= 64, "bit adjacency needs at most 64 vertices");
        let mut adj = vec![0u64; self.n];
        for &(a, b) in &self.edges {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Component label per vertex, labels numbered by first appearance.
    pub fn components(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.n);
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut out = vec![0; self.n];
        for v in 0..self.n {
            let r = uf.find(v);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
            out[v] = label[r];
        }
        out
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |m| m + 1)
    }

    /// Connected with at least one vertex.
    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.component_count() == 1
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edges.len() + 1 == self.n
    }

    pub fn is_forest(&self) -> bool {
        self.edges.len() + self.component_count() == self.n
    }

    /// Subgraph induced by `vertices`, relabeled in the given order.
    pub fn induced(&self, vertices: &[usize]) -> SimpleGraph {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| pos[a] != usize::MAX && pos[b] != usize::MAX)
            .map(|&(a, b)| (pos[a], pos[b]))
            .collect::<Vec<_>>();
        let mut g = SimpleGraph::new(vertices.len(), edges).expect("induced subgraph is simple");
        if let Some(c) = &self.colors {
            g.colors = Some(vertices.iter().map(|&v| c[v]).collect());
        }
        g
    }

    /// Same graph with vertex `v` renamed to `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> SimpleGraph {
        let edges = self.edges.iter().map(|&(a, b)| (perm[a], perm[b]));
        let mut g = SimpleGraph::new(self.n, edges).expect("relabeling keeps the graph simple");
        if let Some(c) = &self.colors {
            let mut colors = c.clone();
            for v in 0..self.n {
                colors[perm[v]] = c[v];
            }
            g.colors = Some(colors);
        }
        g
    }

    /// Disjoint union, `other`'s vertices shifted after `self`'s.
    pub fn disjoint_union(&self, other: &SimpleGraph) -> SimpleGraph {
        let shift = self.n;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(a, b)| (a + shift, b + shift)));
        SimpleGraph::new(self.n + other.n, edges).expect("union of simple graphs")
    }

    pub fn with_edge_removed(&self, a: usize, b: usize) -> SimpleGraph {
        let mut g = self.clone();
        g.edges.remove(&(a.min(b), a.max(b)));
        g
    }
}

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Merges the classes of `a` and `b`; false if they were already merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Serialized graph document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    #[serde(rename = "schemaVersion")]
    pub schema_version: String,
    #[serde(rename = "vertexCount")]
    pub vertex_count: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<Vec<OrbitIndex>>,
}

impl From<&SimpleGraph> for GraphDocument {
    fn from(g: &SimpleGraph) -> Self {
        GraphDocument {
            schema_version: "1".into(),
            vertex_count: g.n,
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
            colors: g.colors.clone(),
        }
    }
}
