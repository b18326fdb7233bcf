use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::{
    BifurcationKind, Diagram, DiagramError, EdgeId, Endpoint, OrbitIndex, Vertex, VertexId,
};
use crate::laws::LawTable;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConservationReport {
    pub vertex: VertexId,
    /// Parent index, or the sum of both branches for a saddle-node.
    pub left: i64,
    /// Sum of the child indices, or 0 for a saddle-node.
    pub right: i64,
    pub pass: bool,
}

/// Compares index sums on both sides of one bifurcation.
pub fn check_index_conservation(
    diagram: &Diagram,
    vertex: VertexId,
) -> Result<ConservationReport, DiagramError> {
    let v = diagram
        .vertex(vertex)
        .ok_or(DiagramError::UnknownVertex(vertex))?;
    let index_of =
        |e: EdgeId| i64::from(diagram.edge(e).expect("incident edge exists").index.value());
    let (left, right) = if v.kind == BifurcationKind::SaddleNode {
        (
            diagram
                .incident_edges(vertex)
                .iter()
                .map(|&e| index_of(e))
                .sum(),
            0,
        )
    } else {
        let parent = v
            .parent_edge
            .ok_or(DiagramError::MissingParent(vertex, v.kind))?;
        (
            index_of(parent),
            diagram.child_edges(v).into_iter().map(index_of).sum(),
        )
    };
    Ok(ConservationReport {
        vertex,
        left,
        right,
        pass: left == right,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleCheck {
    pub edges: Vec<EdgeId>,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CycleParityResult {
    pub cycles: Vec<CycleCheck>,
}

impl CycleParityResult {
    pub fn passes(&self) -> bool {
        self.cycles.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CycleCheck> {
        self.cycles.iter().filter(|c| !c.pass)
    }
}

/// Checks every simple cycle made only of saddle-node vertices. Such a cycle
/// is fine when its indices alternate between +1 and -1 (even length), or,
/// from dimension 3 on, when every index is 0.
pub fn check_cycle_parity(diagram: &Diagram) -> CycleParityResult {
    let sn: BTreeSet<VertexId> = diagram
        .vertices()
        .iter()
        .filter(|v| v.kind == BifurcationKind::SaddleNode)
        .map(|v| v.id)
        .collect();
    let mut adjacency: BTreeMap<VertexId, Vec<(VertexId, EdgeId)>> = BTreeMap::new();
    for e in diagram.edges() {
        if let [Endpoint::Vertex(a), Endpoint::Vertex(b)] = e.endpoints {
            if sn.contains(&a) && sn.contains(&b) {
                adjacency.entry(a).or_default().push((b, e.id));
                adjacency.entry(b).or_default().push((a, e.id));
            }
        }
    }
    let mut found: BTreeSet<Vec<EdgeId>> = BTreeSet::new();
    let mut cycles = Vec::new();
    for &start in adjacency.keys() {
        let mut path_vertices = vec![start];
        let mut path_edges = Vec::new();
        extend_cycles(
            &adjacency,
            start,
            &mut path_vertices,
            &mut path_edges,
            &mut |edges| {
                let mut key = edges.to_vec();
                key.sort_unstable();
                if found.insert(key) {
                    cycles.push(edges.to_vec());
                }
            },
        );
    }
    let cycles = cycles
        .into_iter()
        .map(|edges| {
            let indices: Vec<OrbitIndex> = edges
                .iter()
                .map(|&e| diagram.edge(e).unwrap().index)
                .collect();
            let pass = cycle_coloring_passes(diagram.dimension(), &indices);
            CycleCheck { edges, pass }
        })
        .collect();
    CycleParityResult { cycles }
}

fn cycle_coloring_passes(dimension: u32, indices: &[OrbitIndex]) -> bool {
    let alternating = indices.len().is_multiple_of(2)
        && indices.iter().all(|&i| i != OrbitIndex::Zero)
        && (0..indices.len()).all(|i| indices[i] != indices[(i + 1) % indices.len()]);
    let all_zero = dimension >= 3 && indices.iter().all(|&i| i == OrbitIndex::Zero);
    alternating || all_zero
}

// Simple cycles through `start` using only vertices with larger ids.
fn extend_cycles(
    adjacency: &BTreeMap<VertexId, Vec<(VertexId, EdgeId)>>,
    start: VertexId,
    path_vertices: &mut Vec<VertexId>,
    path_edges: &mut Vec<EdgeId>,
    emit: &mut dyn FnMut(&[EdgeId]),
) {
    let here = *path_vertices.last().unwrap();
    for &(next, edge) in &adjacency[&here] {
        if path_edges.contains(&edge) {
            continue;
        }
        if next == start {
            path_edges.push(edge);
            emit(path_edges);
            path_edges.pop();
        } else if next > start && !path_vertices.contains(&next) {
            path_vertices.push(next);
            path_edges.push(edge);
            extend_cycles(adjacency, start, path_vertices, path_edges, emit);
            path_edges.pop();
            path_vertices.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PeriodCheck {
    NotApplicable,
    Pass,
    Fail {
        vertex: VertexId,
        edges: (EdgeId, EdgeId),
        detail: String,
    },
}

impl PeriodCheck {
    pub fn is_fail(&self) -> bool {
        matches!(self, PeriodCheck::Fail { .. })
    }
}

/// Checks that period labels are compatible with every bifurcation:
/// saddle-nodes keep the period, period-doubling gives `{p, 2p}`, type-m
/// gives `{p, mp, mp}`, and junctions must decompose into one of those
/// cascades.
pub fn check_period_consistency(diagram: &Diagram) -> Result<PeriodCheck, DiagramError> {
    if diagram.period_labels()?.is_none() {
        return Ok(PeriodCheck::NotApplicable);
    }
    let period = |e: EdgeId| diagram.edge(e).unwrap().period.unwrap();
    for v in diagram.vertices() {
        let incident = diagram.incident_edges(v.id);
        if v.kind == BifurcationKind::SaddleNode {
            for &e in &incident[1..] {
                if period(e) != period(incident[0]) {
                    return Ok(PeriodCheck::Fail {
                        vertex: v.id,
                        edges: (incident[0], e),
                        detail: format!(
                            "saddle-node joins periods {} and {}",
                            period(incident[0]),
                            period(e)
                        ),
                    });
                }
            }
            continue;
        }
        let Some(parent) = v.parent_edge else {
            continue;
        };
        let p = period(parent);
        let child_edges = diagram.child_edges(v);
        let mut children: Vec<u64> = child_edges.iter().map(|&e| period(e)).collect();
        children.sort_unstable();
        let ok = match v.kind {
            BifurcationKind::SaddleNode => unreachable!(),
            BifurcationKind::PeriodDoubling => children == sorted(vec![p, 2 * p]),
            BifurcationKind::TypeM(m) => {
                let mp = u64::from(m) * p;
                children == sorted(vec![p, mp, mp])
            }
            BifurcationKind::Junction(_) => junction_periods_decompose(p, &children),
        };
        if !ok {
            let culprit = child_edges
                .iter()
                .copied()
                .find(|&e| period(e) % p != 0)
                .or_else(|| child_edges.first().copied())
                .unwrap_or(parent);
            return Ok(PeriodCheck::Fail {
                vertex: v.id,
                edges: (parent, culprit),
                detail: format!("{} from period {p} gives periods {children:?}", v.kind),
            });
        }
    }
    Ok(PeriodCheck::Pass)
}

fn sorted(mut v: Vec<u64>) -> Vec<u64> {
    v.sort_unstable();
    v
}

/// Whether `children` can arise from a parent of period `parent` through a
/// cascade of period-doublings, or through a cascade of type-m events.
pub fn junction_periods_decompose(parent: u64, children: &[u64]) -> bool {
    let mut start = children.to_vec();
    start.sort_unstable();
    let mut memo = HashMap::new();
    reduce(parent, start.clone(), Scheme::PeriodDoubling, &mut memo) || {
        memo.clear();
        reduce(parent, start, Scheme::TypeM, &mut memo)
    }
}

#[derive(Clone, Copy)]
enum Scheme {
    PeriodDoubling,
    TypeM,
}

// Undo one event at a time until only the parent orbit is left.
fn reduce(
    parent: u64,
    periods: Vec<u64>,
    scheme: Scheme,
    memo: &mut HashMap<Vec<u64>, bool>,
) -> bool {
    if periods == [parent] {
        return true;
    }
    if periods.len() < 2 {
        return false;
    }
    if let Some(&known) = memo.get(&periods) {
        return known;
    }
    let mut result = false;
    let distinct: BTreeSet<u64> = periods.iter().copied().collect();
    'outer: for &q in &distinct {
        match scheme {
            Scheme::PeriodDoubling => {
                if let Some(j) = periods.iter().position(|&x| x == 2 * q) {
                    let mut next = periods.clone();
                    next.remove(j);
                    if reduce(parent, next, scheme, memo) {
                        result = true;
                        break 'outer;
                    }
                }
            }
            Scheme::TypeM => {
                for &big in distinct.iter().filter(|&&b| b >= 3 * q && b % q == 0) {
                    if periods.iter().filter(|&&x| x == big).count() >= 2 {
                        let mut next = periods.clone();
                        for _ in 0..2 {
                            let j = next.iter().position(|&x| x == big).unwrap();
                            next.remove(j);
                        }
                        if reduce(parent, next, scheme, memo) {
                            result = true;
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    memo.insert(periods, result);
    result
}

/// A reason a diagram is not an admissible member of its class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    DegreeExceeded {
        vertex: VertexId,
        degree: usize,
        bound: usize,
    },
    ArityMismatch {
        vertex: VertexId,
        kind: String,
        degree: usize,
        expected: usize,
    },
    MissingParent {
        vertex: VertexId,
    },
    UnexpectedParent {
        vertex: VertexId,
        edge: EdgeId,
    },
    ConservationFailed {
        vertex: VertexId,
        left: i64,
        right: i64,
    },
    InadmissibleLaw {
        vertex: VertexId,
        kind: String,
        parent: i8,
        children: Vec<i8>,
    },
    JunctionIndexCount {
        vertex: VertexId,
        distinct: usize,
    },
    CycleParity {
        edges: Vec<EdgeId>,
    },
    PeriodMismatch {
        vertex: VertexId,
        edges: (EdgeId, EdgeId),
        detail: String,
    },
    PartialPeriodLabels,
}

impl Violation {
    /// True for violations that only concern period labels.
    pub fn is_period(&self) -> bool {
        matches!(
            self,
            Violation::PeriodMismatch { .. } | Violation::PartialPeriodLabels
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs every membership check for the class of diagrams with vertex degree
/// at most `k + 2` obeying `table`.
pub fn validate_diagram(
    diagram: &Diagram,
    k: u32,
    table: &LawTable,
) -> Result<ValidationReport, DiagramError> {
    if table.dimension() != diagram.dimension() {
        return Err(DiagramError::DimensionMismatch {
            table: table.dimension(),
            diagram: diagram.dimension(),
        });
    }
    let mut violations = Vec::new();
    let bound = k as usize + 2;
    for v in diagram.vertices() {
        let degree = diagram.degree(v.id);
        if degree > bound {
            violations.push(Violation::DegreeExceeded {
                vertex: v.id,
                degree,
                bound,
            });
        }
        check_vertex_laws(diagram, v, degree, table, &mut violations);
    }
    for cycle in check_cycle_parity(diagram).failures() {
        violations.push(Violation::CycleParity {
            edges: cycle.edges.clone(),
        });
    }
    match check_period_consistency(diagram) {
        Ok(PeriodCheck::Fail {
            vertex,
            edges,
            detail,
        }) => violations.push(Violation::PeriodMismatch {
            vertex,
            edges,
            detail,
        }),
        Ok(_) => {}
        Err(DiagramError::PartialPeriods) => violations.push(Violation::PartialPeriodLabels),
        Err(e) => return Err(e),
    }
    Ok(ValidationReport { violations })
}

fn check_vertex_laws(
    diagram: &Diagram,
    v: &Vertex,
    degree: usize,
    table: &LawTable,
    out: &mut Vec<Violation>,
) {
    let expected = v.kind.degree();
    if degree != expected {
        out.push(Violation::ArityMismatch {
            vertex: v.id,
            kind: v.kind.to_string(),
            degree,
            expected,
        });
    }
    match (v.kind.has_parent(), v.parent_edge) {
        (true, None) => {
            out.push(Violation::MissingParent { vertex: v.id });
            return;
        }
        (false, Some(edge)) => {
            out.push(Violation::UnexpectedParent { vertex: v.id, edge });
            return;
        }
        _ => {}
    }
    let report = check_index_conservation(diagram, v.id).expect("parent designation checked");
    if !report.pass {
        out.push(Violation::ConservationFailed {
            vertex: v.id,
            left: report.left,
            right: report.right,
        });
    }
    if degree != expected {
        return;
    }
    let index = |e: EdgeId| diagram.edge(e).unwrap().index;
    let (parent, children): (OrbitIndex, Vec<OrbitIndex>) = match v.parent_edge {
        Some(p) => (
            index(p),
            diagram.child_edges(v).into_iter().map(index).collect(),
        ),
        None => (
            OrbitIndex::Zero,
            diagram
                .incident_edges(v.id)
                .iter()
                .map(|&e| index(e))
                .collect(),
        ),
    };
    let admissible = table
        .is_admissible_star(v.kind, parent, &children)
        .unwrap_or(false);
    if !admissible {
        let mut sorted_children: Vec<i8> = children.iter().map(|c| c.value()).collect();
        sorted_children.sort_unstable();
        out.push(Violation::InadmissibleLaw {
            vertex: v.id,
            kind: v.kind.to_string(),
            parent: parent.value(),
            children: sorted_children,
        });
    }
    if let BifurcationKind::Junction(_) = v.kind {
        let distinct = children.iter().collect::<BTreeSet<_>>().len();
        if distinct > 2 {
            out.push(Violation::JunctionIndexCount {
                vertex: v.id,
                distinct,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Edge, Endpoint as End};
    use crate::laws::builtin_table;
    use OrbitIndex::*;

    fn sn(id: VertexId) -> Vertex {
        Vertex {
            id,
            kind: BifurcationKind::SaddleNode,
            parent_edge: None,
        }
    }

    fn cycle(dimension: u32, indices: &[OrbitIndex]) -> Diagram {
        let n = indices.len() as u32;
        let edges = indices
            .iter()
            .enumerate()
            .map(|(i, &index)| Edge {
                id: i as u32,
                index,
                period: None,
                endpoints: [End::Vertex(i as u32), End::Vertex((i as u32 + 1) % n)],
            })
            .collect();
        Diagram::new(dimension, edges, (0..n).map(sn).collect()).unwrap()
    }

    #[test]
    fn period_doubling_conserves() {
        let d =
            Diagram::single_bifurcation(2, BifurcationKind::PeriodDoubling, Plus, &[Zero, Plus])
                .unwrap();
        let r = check_index_conservation(&d, 0).unwrap();
        assert!(r.pass);
        assert_eq!((r.left, r.right), (1, 1));
    }

    #[test]
    fn saddle_node_pair_sums_to_zero() {
        let d = Diagram::single_bifurcation(2, BifurcationKind::SaddleNode, Zero, &[Plus, Minus])
            .unwrap();
        assert!(check_index_conservation(&d, 0).unwrap().pass);
    }

    #[test]
    fn zero_period_doubling_conserves_but_is_inadmissible() {
        let d =
            Diagram::single_bifurcation(4, BifurcationKind::PeriodDoubling, Zero, &[Zero, Zero])
                .unwrap();
        assert!(check_index_conservation(&d, 0).unwrap().pass);
        let report = validate_diagram(&d, 1, &builtin_table(4).unwrap()).unwrap();
        assert!(matches!(
            report.violations[..],
            [Violation::InadmissibleLaw { .. }]
        ));
    }

    #[test]
    fn missing_parent_is_an_error() {
        let d = Diagram::new(
            2,
            vec![
                Edge {
                    id: 0,
                    index: Plus,
                    period: None,
                    endpoints: [End::Terminal, End::Vertex(0)],
                },
                Edge {
                    id: 1,
                    index: Plus,
                    period: None,
                    endpoints: [End::Vertex(0), End::Terminal],
                },
                Edge {
                    id: 2,
                    index: Zero,
                    period: None,
                    endpoints: [End::Vertex(0), End::Terminal],
                },
            ],
            vec![Vertex {
                id: 0,
                kind: BifurcationKind::PeriodDoubling,
                parent_edge: None,
            }],
        )
        .unwrap();
        assert_eq!(
            check_index_conservation(&d, 0),
            Err(DiagramError::MissingParent(
                0,
                BifurcationKind::PeriodDoubling
            ))
        );
    }

    #[test]
    fn saddle_node_triangle_fails_in_two_dimensions() {
        let r = check_cycle_parity(&cycle(2, &[Plus, Minus, Plus]));
        assert_eq!(r.cycles.len(), 1);
        assert!(!r.passes());
    }

    #[test]
    fn zero_triangle_passes_in_three_dimensions() {
        assert!(check_cycle_parity(&cycle(3, &[Zero, Zero, Zero])).passes());
        assert!(!check_cycle_parity(&cycle(2, &[Zero, Zero, Zero])).passes());
    }

    #[test]
    fn alternating_square_passes() {
        let d = cycle(2, &[Plus, Minus, Plus, Minus]);
        assert!(check_cycle_parity(&d).passes());
        assert!(validate_diagram(&d, 0, &builtin_table(2).unwrap())
            .unwrap()
            .is_valid());
    }

    #[test]
    fn parallel_pair_is_a_two_cycle() {
        let d = cycle(2, &[Plus, Minus]);
        let r = check_cycle_parity(&d);
        assert_eq!(r.cycles.len(), 1);
        assert!(r.passes());
    }

    fn pd_with_periods(parent: u64, a: u64, b: u64) -> Diagram {
        let v = End::Vertex(0);
        Diagram::new(
            2,
            vec![
                Edge {
                    id: 0,
                    index: Plus,
                    period: Some(parent),
                    endpoints: [End::Terminal, v],
                },
                Edge {
                    id: 1,
                    index: Zero,
                    period: Some(a),
                    endpoints: [v, End::Terminal],
                },
                Edge {
                    id: 2,
                    index: Plus,
                    period: Some(b),
                    endpoints: [v, End::Terminal],
                },
            ],
            vec![Vertex {
                id: 0,
                kind: BifurcationKind::PeriodDoubling,
                parent_edge: Some(0),
            }],
        )
        .unwrap()
    }

    #[test]
    fn period_doubling_periods() {
        assert_eq!(
            check_period_consistency(&pd_with_periods(3, 3, 6)).unwrap(),
            PeriodCheck::Pass
        );
        assert!(check_period_consistency(&pd_with_periods(3, 3, 9))
            .unwrap()
            .is_fail());
    }

    #[test]
    fn saddle_node_keeps_period() {
        let v = End::Vertex(0);
        let d = Diagram::new(
            2,
            vec![
                Edge {
                    id: 0,
                    index: Plus,
                    period: Some(2),
                    endpoints: [End::Terminal, v],
                },
                Edge {
                    id: 1,
                    index: Minus,
                    period: Some(4),
                    endpoints: [v, End::Terminal],
                },
            ],
            vec![sn(0)],
        )
        .unwrap();
        assert!(matches!(
            check_period_consistency(&d).unwrap(),
            PeriodCheck::Fail {
                vertex: 0,
                edges: (0, 1),
                ..
            }
        ));
    }

    #[test]
    fn unlabeled_and_partial() {
        let d =
            Diagram::single_bifurcation(2, BifurcationKind::PeriodDoubling, Plus, &[Zero, Plus])
                .unwrap();
        assert_eq!(
            check_period_consistency(&d).unwrap(),
            PeriodCheck::NotApplicable
        );
        let mut edges = pd_with_periods(1, 1, 2).edges().to_vec();
        edges[1].period = None;
        let partial = Diagram::new(2, edges, pd_with_periods(1, 1, 2).vertices().to_vec()).unwrap();
        assert_eq!(
            check_period_consistency(&partial),
            Err(DiagramError::PartialPeriods)
        );
    }

    #[test]
    fn junction_decompositions() {
        assert!(junction_periods_decompose(1, &[1, 2, 4, 8]));
        assert!(junction_periods_decompose(1, &[1, 2, 2, 4]));
        assert!(junction_periods_decompose(2, &[2, 6, 6, 10, 10]));
        assert!(junction_periods_decompose(1, &[1, 3, 3, 9, 9]));
        assert!(!junction_periods_decompose(1, &[1, 2, 3, 3]));
        assert!(!junction_periods_decompose(1, &[1, 1, 2, 2]));
    }

    #[test]
    fn validate_examples() {
        let t4 = builtin_table(4).unwrap();
        let d =
            Diagram::single_bifurcation(4, BifurcationKind::TypeM(3), Zero, &[Zero, Minus, Plus])
                .unwrap();
        assert!(validate_diagram(&d, 2, &t4).unwrap().is_valid());

        let t2 = builtin_table(2).unwrap();
        let d =
            Diagram::single_bifurcation(2, BifurcationKind::PeriodDoubling, Minus, &[Zero, Minus])
                .unwrap();
        assert!(!validate_diagram(&d, 1, &t2).unwrap().is_valid());

        let empty = Diagram::empty(3).unwrap();
        assert!(validate_diagram(&empty, 1, &builtin_table(3).unwrap())
            .unwrap()
            .is_valid());
    }

    #[test]
    fn degree_bound_is_enforced() {
        let t4 = builtin_table(4).unwrap();
        let d =
            Diagram::single_bifurcation(4, BifurcationKind::TypeM(3), Zero, &[Zero, Zero, Zero])
                .unwrap();
        let report = validate_diagram(&d, 1, &t4).unwrap();
        assert_eq!(
            report.violations,
            vec![Violation::DegreeExceeded {
                vertex: 0,
                degree: 4,
                bound: 3
            }]
        );
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let d = Diagram::empty(3).unwrap();
        assert!(validate_diagram(&d, 1, &builtin_table(2).unwrap()).is_err());
    }
}
