//! JSON documents for diagrams, graphs and matroids, and DOT export.

use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{
    BifurcationKind, Diagram, DiagramError, Edge, EdgeId, Endpoint, OrbitIndex, Vertex, VertexId,
};
use crate::graph::{GraphDocument, GraphError, SimpleGraph};
use crate::matroid::{Matroid, MatroidDocument, MatroidError};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("unsupported schemaVersion {0:?} (expected \"1\")")]
    SchemaVersion(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
}

/// Deserializes `text`, reporting failures with the JSON path of the
/// offending value.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, IoError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        IoError::Schema {
            path,
            message: e.into_inner().to_string(),
        }
    })
}

fn check_version(v: &str) -> Result<(), IoError> {
    if v == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(IoError::SchemaVersion(v.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum TerminalWord {
    Terminal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum EndpointDocument {
    Vertex(VertexId),
    Terminal(TerminalWord),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDocument {
    id: EdgeId,
    index: OrbitIndex,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    period: Option<u64>,
    endpoints: [EndpointDocument; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexDocument {
    id: VertexId,
    kind: BifurcationKind,
    #[serde(
        rename = "parentEdge",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    parent_edge: Option<EdgeId>,
}

/// Serialized diagram. Field order here is the emitted key order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramDocument {
    #[serde(rename = "schemaVersion")]
    schema_version: String,
    dimension: u32,
    edges: Vec<EdgeDocument>,
    vertices: Vec<VertexDocument>,
}

impl DiagramDocument {
    pub fn into_diagram(self) -> Result<Diagram, IoError> {
        check_version(&self.schema_version)?;
        let endpoint = |e: EndpointDocument| match e {
            EndpointDocument::Vertex(v) => Endpoint::Vertex(v),
            EndpointDocument::Terminal(_) => Endpoint::Terminal,
        };
        let edges = self
            .edges
            .into_iter()
            .map(|e| Edge {
                id: e.id,
                index: e.index,
                period: e.period,
                endpoints: e.endpoints.map(endpoint),
            })
            .collect();
        let vertices = self
            .vertices
            .into_iter()
            .map(|v| Vertex {
                id: v.id,
                kind: v.kind,
                parent_edge: v.parent_edge,
            })
            .collect();
        Ok(Diagram::new(self.dimension, edges, vertices)?)
    }
}

impl From<&Diagram> for DiagramDocument {
    fn from(d: &Diagram) -> Self {
        let endpoint = |e: Endpoint| match e {
            Endpoint::Vertex(v) => EndpointDocument::Vertex(v),
            Endpoint::Terminal => EndpointDocument::Terminal(TerminalWord::Terminal),
        };
        DiagramDocument {
            schema_version: SCHEMA_VERSION.into(),
            dimension: d.dimension(),
            edges: d
                .edges()
                .iter()
                .map(|e| EdgeDocument {
                    id: e.id,
                    index: e.index,
                    period: e.period,
                    endpoints: e.endpoints.map(endpoint),
                })
                .collect(),
            vertices: d
                .vertices()
                .iter()
                .map(|v| VertexDocument {
                    id: v.id,
                    kind: v.kind,
                    parent_edge: v.parent_edge,
                })
                .collect(),
        }
    }
}

pub fn parse_diagram(text: &str) -> Result<Diagram, IoError> {
    from_json::<DiagramDocument>(text)?.into_diagram()
}

/// Pretty JSON with edges and vertices sorted by id and a trailing newline.
pub fn emit_diagram(d: &Diagram) -> String {
    to_pretty(&DiagramDocument::from(d))
}

pub fn parse_graph(text: &str) -> Result<SimpleGraph, IoError> {
    let doc: GraphDocument = from_json(text)?;
    check_version(&doc.schema_version)?;
    let g = SimpleGraph::new(doc.vertex_count, doc.edges.iter().map(|&[a, b]| (a, b)))?;
    Ok(match doc.colors {
        Some(c) => g.with_colors(c)?,
        None => g,
    })
}

pub fn emit_graph(g: &SimpleGraph) -> String {
    to_pretty(&GraphDocument::from(g))
}

pub fn parse_matroid(text: &str) -> Result<Matroid, IoError> {
    let doc: MatroidDocument = from_json(text)?;
    check_version(&doc.schema_version)?;
    Ok(doc.into_matroid()?)
}

pub fn emit_matroid(m: &Matroid) -> String {
    to_pretty(&MatroidDocument::from_matroid(m))
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

pub fn dot_color(index: OrbitIndex) -> &'static str {
    match index {
        OrbitIndex::Minus => "red",
        OrbitIndex::Zero => "green",
        OrbitIndex::Plus => "blue",
    }
}

/// DOT for a graph; vertices in numeric order, then edges in sorted order.
pub fn emit_graph_dot(g: &SimpleGraph) -> String {
    let mut out = String::from("graph G {\n");
    for v in 0..g.vertex_count() {
        match g.colors() {
            Some(c) => writeln!(
                out,
                "  {v} [color={}, label=\"{}\"];",
                dot_color(c[v]),
                c[v]
            ),
            None => writeln!(out, "  {v};"),
        }
        .unwrap();
    }
    for (a, b) in g.edges() {
        writeln!(out, "  {a} -- {b};").unwrap();
    }
    out.push_str("}\n");
    out
}

/// DOT for a diagram: bifurcations as labeled nodes, each terminal end as
/// its own point node, branches as edges colored by index.
pub fn emit_diagram_dot(d: &Diagram) -> String {
    let mut out = String::from("graph diagram {\n");
    for v in d.vertices() {
        writeln!(out, "  v{} [label=\"{}\"];", v.id, v.kind).unwrap();
    }
    let name = |e: &Edge, slot: usize| match e.endpoints[slot] {
        Endpoint::Vertex(v) => format!("v{v}"),
        Endpoint::Terminal => format!("t{}_{slot}", e.id),
    };
    for e in d.edges() {
        for slot in 0..2 {
            if e.endpoints[slot] == Endpoint::Terminal {
                writeln!(out, "  {} [shape=point];", name(e, slot)).unwrap();
            }
        }
    }
    for e in d.edges() {
        let mut label = format!("e{} {}", e.id, e.index);
        if let Some(p) = e.period {
            write!(label, " p{p}").unwrap();
        }
        writeln!(
            out,
            "  {} -- {} [color={}, label=\"{label}\"];",
            name(e, 0),
            name(e, 1),
            dot_color(e.index)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representations::to_star;

    const MINIMAL: &str = r#"{"vertices": [], "edges": [{"endpoints": ["terminal", "terminal"], "index": 1, "id": 7}], "dimension": 2, "schemaVersion": "1"}"#;

    #[test]
    fn minimal_document_round_trips() {
        let d = parse_diagram(MINIMAL).unwrap();
        let text = emit_diagram(&d);
        assert!(text.starts_with("{\n  \"schemaVersion\": \"1\",\n  \"dimension\": 2,"));
        assert_eq!(emit_diagram(&parse_diagram(&text).unwrap()), text);
    }

    #[test]
    fn unknown_kind_names_the_path() {
        let text = r#"{"schemaVersion":"1","dimension":2,"edges":[{"id":0,"index":1,"endpoints":[0,"terminal"]}],
            "vertices":[{"id":0,"kind":"pitchfork"}]}"#;
        match parse_diagram(text).unwrap_err() {
            IoError::Schema { path, .. } => assert_eq!(path, "vertices[0].kind"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn bad_index_and_version() {
        let text = MINIMAL.replace("\"index\": 1", "\"index\": 2");
        assert!(
            matches!(parse_diagram(&text), Err(IoError::Schema { path, .. }) if path == "edges[0].index")
        );
        let text = MINIMAL.replace("\"schemaVersion\": \"1\"", "\"schemaVersion\": \"2\"");
        assert!(matches!(
            parse_diagram(&text),
            Err(IoError::SchemaVersion(_))
        ));
    }

    #[test]
    fn kinds_serialize_in_snake_case() {
        let text = r#"{"schemaVersion":"1","dimension":3,"edges":[
            {"id":0,"index":1,"endpoints":["terminal",0]},
            {"id":1,"index":1,"endpoints":[0,"terminal"]},
            {"id":2,"index":-1,"endpoints":[0,"terminal"]},
            {"id":3,"index":-1,"endpoints":[0,"terminal"]}],
            "vertices":[{"id":0,"kind":{"type_m":3},"parentEdge":0}]}"#;
        let d = parse_diagram(text).unwrap();
        assert_eq!(d.vertices()[0].kind, BifurcationKind::TypeM(3));
        assert!(emit_diagram(&d).contains("\"type_m\": 3"));
        assert!(emit_diagram(&d).contains("\"parentEdge\": 0"));
    }

    #[test]
    fn dot_single_blue_edge() {
        let dot = emit_diagram_dot(&parse_diagram(MINIMAL).unwrap());
        assert_eq!(dot.matches("blue").count(), 1);
    }

    #[test]
    fn dot_empty_diagram() {
        assert_eq!(
            emit_diagram_dot(&Diagram::empty(2).unwrap()),
            "graph diagram {\n}\n"
        );
    }

    #[test]
    fn dot_star_of_period_doubling() {
        use OrbitIndex::*;
        let d =
            Diagram::single_bifurcation(2, BifurcationKind::PeriodDoubling, Plus, &[Zero, Plus])
                .unwrap();
        let dot = emit_graph_dot(&to_star(&d));
        let lines: Vec<&str> = dot.lines().collect();
        assert_eq!(lines[1], "  0 [color=blue, label=\"+1\"];");
        assert_eq!(dot.matches(" -- ").count(), 2);
        assert_eq!(dot.matches("[color=").count(), 3);
    }

    #[test]
    fn graph_and_matroid_documents() {
        let g = SimpleGraph::cycle(4)
            .with_colors(vec![OrbitIndex::Plus; 4])
            .unwrap();
        assert_eq!(parse_graph(&emit_graph(&g)).unwrap(), g);
        let m = crate::matroid::vamos();
        let back = parse_matroid(&emit_matroid(&m)).unwrap();
        assert_eq!(back.bases(), m.bases());
        assert!(matches!(
            parse_graph(r#"{"schemaVersion":"1","vertexCount":2,"edges":[[0,5]]}"#),
            Err(IoError::Graph(_))
        ));
    }
}
