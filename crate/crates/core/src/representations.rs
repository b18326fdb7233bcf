//! Graph representations of diagrams (star and clique), line graphs and
//! block-intersection graphs.

use std::collections::BTreeSet;

pub use crate::canon::graphs_isomorphic;
use crate::classes::block_decomposition;
use crate::diagram::{Diagram, DiagramError, Edge, EdgeId, Endpoint, Vertex};
use crate::graph::{GraphError, SimpleGraph};
use crate::tree::ColoredTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Representation {
    Star,
    Clique,
    /// Line graph of the diagram itself: branches adjacent when they meet
    /// at a bifurcation. Terminals are distinct ends, so this equals the
    /// clique representation.
    Line,
}

impl std::str::FromStr for Representation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "star" => Ok(Representation::Star),
            "clique" => Ok(Representation::Clique),
            "line" => Ok(Representation::Line),
            other => Err(format!(
                "unknown representation {other:?} (expected star, clique or line)"
            )),
        }
    }
}

fn branch_graph(
    diagram: &Diagram,
    blocks: impl Fn(&[usize], Option<usize>) -> Vec<(usize, usize)>,
) -> SimpleGraph {
    let pos = |e: EdgeId| diagram.edge_position(e).expect("incident edge exists");
    let mut edges = BTreeSet::new();
    for v in diagram.vertices() {
        let incident: Vec<usize> = diagram
            .incident_edges(v.id)
            .iter()
            .map(|&e| pos(e))
            .collect();
        let hub = v.parent_edge.map(pos);
        edges.extend(blocks(&incident, hub));
    }
    let colors = diagram.edges().iter().map(|e| e.index).collect();
    SimpleGraph::new(diagram.edges().len(), edges)
        .expect("distinct branches of a vertex")
        .with_colors(colors)
        .expect("one color per branch")
}

/// One vertex per branch (edge id order), colored by index; each bifurcation
/// becomes a star from its parent branch to its child branches. Without a
/// parent branch the lowest-id incident branch is the hub. Parallel
/// contributions merge into one edge.
pub fn to_star(diagram: &Diagram) -> SimpleGraph {
    branch_graph(diagram, |incident, hub| {
        let hub = hub.unwrap_or(incident[0]);
        incident
            .iter()
            .filter(|&&b| b != hub)
            .map(|&b| (hub.min(b), hub.max(b)))
            .collect()
    })
}

/// Same vertices as [`to_star`]; each bifurcation becomes a complete graph on
/// its branches.
pub fn to_clique(diagram: &Diagram) -> SimpleGraph {
    branch_graph(diagram, |incident, _| {
        let mut out = Vec::new();
        for (i, &a) in incident.iter().enumerate() {
            for &b in &incident[i + 1..] {
                out.push((a.min(b), a.max(b)));
            }
        }
        out
    })
}

/// Vertices are the edges of `g` in sorted order, adjacent when they share an
/// endpoint.
pub fn line_graph(g: &SimpleGraph) -> SimpleGraph {
    let edges = g.edge_list();
    let mut at_vertex: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    for (i, &(a, b)) in edges.iter().enumerate() {
        at_vertex[a].push(i);
        at_vertex[b].push(i);
    }
    let mut out = BTreeSet::new();
    for list in &at_vertex {
        for (i, &x) in list.iter().enumerate() {
            for &y in &list[i + 1..] {
                out.insert((x.min(y), x.max(y)));
            }
        }
    }
    SimpleGraph::new(edges.len(), out).expect("distinct edges")
}

/// One vertex per block of a connected graph, adjacent when two blocks share
/// a cut vertex.
pub fn block_intersection_graph(g: &SimpleGraph) -> Result<SimpleGraph, GraphError> {
    let dec = block_decomposition(g)?;
    let mut out = BTreeSet::new();
    for &cut in &dec.cut_vertices {
        let holding: Vec<usize> = (0..dec.blocks.len())
            .filter(|&b| dec.blocks[b].binary_search(&cut).is_ok())
            .collect();
        for (i, &x) in holding.iter().enumerate() {
            for &y in &holding[i + 1..] {
                out.insert((x, y));
            }
        }
    }
    SimpleGraph::new(dec.blocks.len(), out)
}

/// The acyclic diagram whose star representation is `tree`: node `v` becomes
/// branch `v`, each internal node a bifurcation (vertex `v`) fed by its own
/// branch, or a saddle-node when it has one child. Loose ends are terminals.
pub fn diagram_from_tree(tree: &ColoredTree, dimension: u32) -> Result<Diagram, DiagramError> {
    let shape = &tree.shape;
    let end = |v: usize| {
        if shape.child_count(v) > 0 {
            Endpoint::Vertex(v as u32)
        } else {
            Endpoint::Terminal
        }
    };
    let edges = (0..shape.len())
        .map(|v| {
            let up = shape
                .parent(v)
                .map_or(Endpoint::Terminal, |p| Endpoint::Vertex(p as u32));
            Edge {
                id: v as EdgeId,
                index: tree.colors[v],
                period: None,
                endpoints: [up, end(v)],
            }
        })
        .collect();
    let vertices = (0..shape.len())
        .filter_map(|v| {
            let kind = tree.kind(v)?;
            let parent_edge = kind.has_parent().then_some(v as EdgeId);
            Some(Vertex {
                id: v as u32,
                kind,
                parent_edge,
            })
        })
        .collect();
    Diagram::new(dimension, edges, vertices)
}

pub fn represent(diagram: &Diagram, kind: Representation) -> SimpleGraph {
    match kind {
        Representation::Star => to_star(diagram),
        Representation::Clique | Representation::Line => to_clique(diagram),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{is_block_graph, is_claw_free};
    use crate::diagram::{BifurcationKind, Edge, Endpoint, OrbitIndex, Vertex};
    use OrbitIndex::*;

    #[test]
    fn saddle_node_is_one_edge() {
        let d = Diagram::single_bifurcation(2, BifurcationKind::SaddleNode, Zero, &[Plus, Minus])
            .unwrap();
        let s = to_star(&d);
        assert_eq!(s.edge_list(), vec![(0, 1)]);
        assert_eq!(s.colors().unwrap(), &[Plus, Minus]);
        assert_eq!(to_clique(&d), s);
    }

    #[test]
    fn period_doubling_is_a_three_star() {
        let d =
            Diagram::single_bifurcation(2, BifurcationKind::PeriodDoubling, Plus, &[Zero, Plus])
                .unwrap();
        let s = to_star(&d);
        assert_eq!(s.edge_list(), vec![(0, 1), (0, 2)]);
        assert_eq!(s.colors().unwrap(), &[Plus, Zero, Plus]);
        assert!(graphs_isomorphic(
            &to_clique(&d),
            &SimpleGraph::complete(3),
            false
        ));
    }

    #[test]
    fn type_m_clique_is_k4() {
        let d =
            Diagram::single_bifurcation(3, BifurcationKind::TypeM(3), Plus, &[Plus, Minus, Minus])
                .unwrap();
        assert!(graphs_isomorphic(
            &to_clique(&d),
            &SimpleGraph::complete(4),
            false
        ));
        assert!(graphs_isomorphic(
            &to_star(&d),
            &SimpleGraph::star(3),
            false
        ));
    }

    #[test]
    fn glued_stars_share_branch_vertices() {
        // A PD whose +1 child period-doubles again: two 3-stars glued at
        // the shared branch.
        let v = |i| Endpoint::Vertex(i);
        let t = Endpoint::Terminal;
        let e = |id, index, endpoints| Edge {
            id,
            index,
            period: None,
            endpoints,
        };
        let d = Diagram::new(
            2,
            vec![
                e(0, Plus, [t, v(0)]),
                e(1, Zero, [v(0), t]),
                e(2, Plus, [v(0), v(1)]),
                e(3, Zero, [v(1), t]),
                e(4, Plus, [v(1), t]),
            ],
            vec![
                Vertex {
                    id: 0,
                    kind: BifurcationKind::PeriodDoubling,
                    parent_edge: Some(0),
                },
                Vertex {
                    id: 1,
                    kind: BifurcationKind::PeriodDoubling,
                    parent_edge: Some(2),
                },
            ],
        )
        .unwrap();
        let s = to_star(&d);
        assert_eq!(s.edge_list(), vec![(0, 1), (0, 2), (2, 3), (2, 4)]);
        assert!(s.is_tree());
        let c = to_clique(&d);
        assert_eq!(c.edge_count(), 6);
        assert!(graphs_isomorphic(
            &represent(&d, Representation::Line),
            &c,
            true
        ));
    }

    #[test]
    fn tree_round_trips_through_a_diagram() {
        use crate::tree::PlaneTree;
        let shape = PlaneTree::from_child_counts(&[2, 1, 0, 0]).unwrap();
        let tree = ColoredTree::new(shape, vec![Plus, Zero, Minus, Plus]).unwrap();
        let d = diagram_from_tree(&tree, 2).unwrap();
        assert_eq!(d.vertices().len(), 2);
        assert_eq!(d.vertices()[1].kind, BifurcationKind::SaddleNode);
        assert!(d.is_acyclic());
        assert_eq!(to_star(&d), tree.to_graph());
    }

    #[test]
    fn line_graph_examples() {
        assert_eq!(line_graph(&SimpleGraph::path(3)), SimpleGraph::path(2));
        assert!(graphs_isomorphic(
            &line_graph(&SimpleGraph::star(3)),
            &SimpleGraph::complete(3),
            false
        ));
        let tree = SimpleGraph::from_parents(&[0, 0, 1, 1, 2, 4]).unwrap();
        let l = line_graph(&tree);
        assert!(is_block_graph(&l).unwrap());
        assert!(is_claw_free(&l));
    }

    #[test]
    fn block_intersection_examples() {
        assert_eq!(
            block_intersection_graph(&SimpleGraph::complete(3)).unwrap(),
            SimpleGraph::empty(1)
        );
        let bowtie = SimpleGraph::new(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        assert_eq!(
            block_intersection_graph(&bowtie).unwrap(),
            SimpleGraph::path(2)
        );
        let tree = SimpleGraph::path(5);
        let b = block_intersection_graph(&tree).unwrap();
        assert_eq!(b.vertex_count(), 4);
        assert!(b.is_connected());
        assert!(block_intersection_graph(&SimpleGraph::empty(2)).is_err());
    }
}
