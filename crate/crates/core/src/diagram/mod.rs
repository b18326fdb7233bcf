//! Bifurcation diagrams: multigraphs whose edges are orbit branches colored by
//! orbit index and whose vertices are bifurcation events.

mod index;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use index::{
    index_from_eigenvalues, index_sum, EigenvalueError, EigenvalueSpec, IndexComputation,
    OrbitIndex,
};
pub use validate::{
    check_cycle_parity, check_index_conservation, check_period_consistency, validate_diagram,
    ConservationReport, CycleParityResult, PeriodCheck, ValidationReport, Violation,
};

pub type EdgeId = u32;
pub type VertexId = u32;

/// The bifurcation event a diagram vertex stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BifurcationKind {
    SaddleNode,
    PeriodDoubling,
    /// Period multiplied by `m >= 3`.
    TypeM(u32),
    /// One orbit splitting into `n >= 4` orbits.
    Junction(u32),
}

impl BifurcationKind {
    /// Checks the parameter ranges (`m >= 3`, `n >= 4`).
    pub fn check(self) -> Result<Self, DiagramError> {
        match self {
            BifurcationKind::TypeM(m) if m < 3 => Err(DiagramError::InvalidKind(self)),
            BifurcationKind::Junction(n) if n < 4 => Err(DiagramError::InvalidKind(self)),
            _ => Ok(self),
        }
    }

    /// Number of branches on the far side of the event: both branches for a
    /// saddle-node, the children otherwise.
    pub fn child_count(self) -> usize {
        match self {
            BifurcationKind::SaddleNode | BifurcationKind::PeriodDoubling => 2,
            BifurcationKind::TypeM(_) => 3,
            BifurcationKind::Junction(n) => n as usize,
        }
    }

    /// Degree of the diagram vertex.
    pub fn degree(self) -> usize {
        match self {
            BifurcationKind::SaddleNode => 2,
            other => other.child_count() + 1,
        }
    }

    pub fn has_parent(self) -> bool {
        !matches!(self, BifurcationKind::SaddleNode)
    }

    /// Kind of a star whose hub has `children` children in the tree picture.
    /// Arity 3 is reported as `TypeM(3)`; laws do not depend on `m`.
    pub fn for_tree_children(children: usize) -> Option<Self> {
        match children {
            0 => None,
            1 => Some(BifurcationKind::SaddleNode),
            2 => Some(BifurcationKind::PeriodDoubling),
            3 => Some(BifurcationKind::TypeM(3)),
            n => Some(BifurcationKind::Junction(n as u32)),
        }
    }
}

impl fmt::Display for BifurcationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BifurcationKind::SaddleNode => f.write_str("saddle-node"),
            BifurcationKind::PeriodDoubling => f.write_str("period-doubling"),
            BifurcationKind::TypeM(m) => write!(f, "type-{m}"),
            BifurcationKind::Junction(n) => write!(f, "{n}-junction"),
        }
    }
}

/// One end of an orbit branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    Vertex(VertexId),
    /// The branch reaches the boundary of the isotopy interval.
    Terminal,
}

impl Endpoint {
    pub fn vertex(self) -> Option<VertexId> {
        match self {
            Endpoint::Vertex(v) => Some(v),
            Endpoint::Terminal => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub index: OrbitIndex,
    pub period: Option<u64>,
    pub endpoints: [Endpoint; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: VertexId,
    pub kind: BifurcationKind,
    pub parent_edge: Option<EdgeId>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("invalid bifurcation kind {0:?}")]
    InvalidKind(BifurcationKind),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("edge {edge} references unknown vertex {vertex}")]
    DanglingEndpoint { edge: EdgeId, vertex: VertexId },
    #[error("edge {0} is a self-loop")]
    SelfLoop(EdgeId),
    #[error("edge {0} has period 0")]
    ZeroPeriod(EdgeId),
    #[error("vertex {0} is not incident to any edge")]
    IsolatedVertex(VertexId),
    #[error("vertex {vertex} names parent edge {edge}, which is not incident to it")]
    ParentNotIncident { vertex: VertexId, edge: EdgeId },
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("vertex {0} ({1}) has no parent edge designated")]
    MissingParent(VertexId, BifurcationKind),
    #[error("only some edges carry period labels; the labeling is ambiguous")]
    PartialPeriods,
    #[error("law table is for dimension {table}, diagram has dimension {diagram}")]
    DimensionMismatch { table: u32, diagram: u32 },
}

/// A finite bifurcation diagram. Immutable once built; edges and vertices are
/// kept sorted by id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    dimension: u32,
    edges: Vec<Edge>,
    vertices: Vec<Vertex>,
    incidence: BTreeMap<VertexId, Vec<EdgeId>>,
}

impl Diagram {
    pub fn new(
        dimension: u32,
        mut edges: Vec<Edge>,
        mut vertices: Vec<Vertex>,
    ) -> Result<Self, DiagramError> {
        if dimension == 0 {
            return Err(DiagramError::ZeroDimension);
        }
        edges.sort_by_key(|e| e.id);
        vertices.sort_by_key(|v| v.id);
        for pair in edges.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(DiagramError::DuplicateEdge(pair[0].id));
            }
        }
        for pair in vertices.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(DiagramError::DuplicateVertex(pair[0].id));
            }
        }
        let mut incidence: BTreeMap<VertexId, Vec<EdgeId>> =
            vertices.iter().map(|v| (v.id, Vec::new())).collect();
        for v in &vertices {
            v.kind.check()?;
        }
        for e in &edges {
            if e.period == Some(0) {
                return Err(DiagramError::ZeroPeriod(e.id));
            }
            if let [Endpoint::Vertex(a), Endpoint::Vertex(b)] = e.endpoints {
                if a == b {
                    return Err(DiagramError::SelfLoop(e.id));
                }
            }
            for end in e.endpoints {
                if let Endpoint::Vertex(v) = end {
                    incidence
                        .get_mut(&v)
                        .ok_or(DiagramError::DanglingEndpoint {
                            edge: e.id,
                            vertex: v,
                        })?
                        .push(e.id);
                }
            }
        }
        for v in &vertices {
            let incident = &incidence[&v.id];
            if incident.is_empty() {
                return Err(DiagramError::IsolatedVertex(v.id));
            }
            if let Some(p) = v.parent_edge {
                if !incident.contains(&p) {
                    return Err(DiagramError::ParentNotIncident {
                        vertex: v.id,
                        edge: p,
                    });
                }
            }
        }
        Ok(Diagram {
            dimension,
            edges,
            vertices,
            incidence,
        })
    }

    pub fn empty(dimension: u32) -> Result<Self, DiagramError> {
        Diagram::new(dimension, vec![], vec![])
    }

    /// A diagram holding a single bifurcation whose branches all end at
    /// terminals. The parent branch gets edge id 0, children follow in order.
    /// For a saddle-node `parent` is ignored and `children` are the two branches.
    pub fn single_bifurcation(
        dimension: u32,
        kind: BifurcationKind,
        parent: OrbitIndex,
        children: &[OrbitIndex],
    ) -> Result<Self, DiagramError> {
        let v = Endpoint::Vertex(0);
        let t = Endpoint::Terminal;
        let mut edges = Vec::new();
        if kind.has_parent() {
            edges.push(Edge {
                id: 0,
                index: parent,
                period: None,
                endpoints: [t, v],
            });
        }
        for &c in children {
            let id = edges.len() as EdgeId;
            edges.push(Edge {
                id,
                index: c,
                period: None,
                endpoints: [v, t],
            });
        }
        let parent_edge = kind.has_parent().then_some(0);
        Diagram::new(
            dimension,
            edges,
            vec![Vertex {
                id: 0,
                kind,
                parent_edge,
            }],
        )
    }

    /// Same diagram, reinterpreted in another dimension.
    pub fn with_dimension(&self, dimension: u32) -> Result<Self, DiagramError> {
        if dimension == 0 {
            return Err(DiagramError::ZeroDimension);
        }
        Ok(Diagram {
            dimension,
            ..self.clone()
        })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn edge_position(&self, id: EdgeId) -> Option<usize> {
        self.edges.binary_search_by_key(&id, |e| e.id).ok()
    }

    pub fn vertex(&self, id: VertexId) -> Option<&Vertex> {
        self.vertices
            .binary_search_by_key(&id, |v| v.id)
            .ok()
            .map(|i| &self.vertices[i])
    }

    /// Edge ids incident to `vertex`, in edge-id order.
    pub fn incident_edges(&self, vertex: VertexId) -> &[EdgeId] {
        self.incidence
            .get(&vertex)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn degree(&self, vertex: VertexId) -> usize {
        self.incident_edges(vertex).len()
    }

    /// Incident edges other than the parent edge.
    pub fn child_edges(&self, vertex: &Vertex) -> Vec<EdgeId> {
        self.incident_edges(vertex.id)
            .iter()
            .copied()
            .filter(|&e| Some(e) != vertex.parent_edge)
            .collect()
    }

    /// True when the underlying multigraph (terminals as distinct leaves) has
    /// no cycle.
    pub fn is_acyclic(&self) -> bool {
        let mut uf = crate::graph::UnionFind::new(self.vertices.len());
        for e in &self.edges {
            if let [Endpoint::Vertex(a), Endpoint::Vertex(b)] = e.endpoints {
                let pa = self.vertices.binary_search_by_key(&a, |v| v.id).unwrap();
                let pb = self.vertices.binary_search_by_key(&b, |v| v.id).unwrap();
                if !uf.union(pa, pb) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_period_labeled(&self) -> bool {
        !self.edges.is_empty() && self.edges.iter().all(|e| e.period.is_some())
    }

    pub(crate) fn period_labels(&self) -> Result<Option<()>, DiagramError> {
        let labeled = self.edges.iter().filter(|e| e.period.is_some()).count();
        if labeled == 0 {
            Ok(None)
        } else if labeled == self.edges.len() {
            Ok(Some(()))
        } else {
            Err(DiagramError::PartialPeriods)
        }
    }
}
