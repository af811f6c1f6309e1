use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{Cell, PeriodicGraphSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    #[default]
    Dirichlet,
    Neumann,
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(Self::Dirichlet),
            "neumann" => Ok(Self::Neumann),
            _ => Err(Error::InvalidParams(format!("unknown boundary condition `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphVertex {
    pub id: String,
    /// Cell vertex this is a copy of; `None` for half-line proxy ends.
    pub spec_vertex: Option<usize>,
    pub cell: Cell,
    pub degree: usize,
    pub boundary: bool,
    pub pos: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphEdge {
    pub id: String,
    pub spec_edge: Option<usize>,
    pub cell: Cell,
    pub from: usize,
    pub to: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub spec: String,
    pub radius: Option<usize>,
    pub bc: BoundaryCondition,
}

/// A finite metric graph, usually a truncation of a periodic one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricGraph {
    pub vertices: Vec<GraphVertex>,
    pub edges: Vec<GraphEdge>,
    pub provenance: Provenance,
}

/// A point at arclength `offset` from the `from` end of an edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphPoint {
    pub edge: usize,
    pub offset: f64,
}

fn cell_label(z: Cell, dim: usize) -> String {
    match dim {
        0 => String::new(),
        1 => format!("@{}", z[0]),
        _ => format!("@{}:{}", z[0], z[1]),
    }
}

pub(super) fn truncate(spec: &PeriodicGraphSpec, n: usize, bc: BoundaryCondition, halfline_length: f64) -> Result<MetricGraph> {
    if spec.dim > 0 && !spec.is_canonical() {
        return Err(Error::NotCanonical(spec.name.clone()));
    }
    if !(halfline_length.is_finite() && halfline_length > 0.0) {
        return Err(Error::InvalidParams("half-line proxy length must be positive".into()));
    }
    let n = n as i64;
    let cells: Vec<Cell> = match spec.dim {
        0 => vec![[0, 0]],
        1 => (-n..=n).map(|a| [a, 0]).collect(),
        _ => (-n..=n).flat_map(|a| (-n..=n).map(move |b| [a, b])).collect(),
    };
    let full_degree = spec.vertex_degrees();
    let mut index: HashMap<(usize, Cell), usize> = HashMap::new();
    let mut vertices: Vec<GraphVertex> = Vec::new();
    let mut edges = Vec::new();
    let mut vertex = |v: usize, z: Cell, vertices: &mut Vec<GraphVertex>| -> usize {
        *index.entry((v, z)).or_insert_with(|| {
            let cv = &spec.vertices[v];
            vertices.push(GraphVertex {
                id: format!("{}{}", cv.id, cell_label(z, spec.dim)),
                spec_vertex: Some(v),
                cell: z,
                degree: 0,
                boundary: false,
                pos: cv.pos.map(|p| [p[0] + z[0] as f64, p[1] + z[1] as f64]),
            });
            vertices.len() - 1
        })
    };
    for &z in &cells {
        for v in 0..spec.vertices.len() {
            vertex(v, z, &mut vertices);
        }
    }
    for &z in &cells {
        for (k, e) in spec.edges.iter().enumerate() {
            let a = vertex(e.from, z, &mut vertices);
            let (b, length) = match e.to {
                Some(t) => (vertex(t, [z[0] + e.shift[0], z[1] + e.shift[1]], &mut vertices), e.length),
                None => {
                    let pos = vertices[a].pos;
                    vertices.push(GraphVertex {
                        id: format!("{}#end", e.id),
                        spec_vertex: None,
                        cell: z,
                        degree: 0,
                        boundary: true,
                        pos,
                    });
                    (vertices.len() - 1, halfline_length)
                }
            };
            edges.push(GraphEdge {
                id: format!("{}{}", e.id, cell_label(z, spec.dim)),
                spec_edge: Some(k),
                cell: z,
                from: a,
                to: b,
                length,
            });
        }
    }
    for e in &edges {
        vertices[e.from].degree += 1;
        vertices[e.to].degree += 1;
    }
    for v in &mut vertices {
        if let Some(sv) = v.spec_vertex {
            v.boundary = v.degree < full_degree[sv];
        }
    }
    Ok(MetricGraph {
        vertices,
        edges,
        provenance: Provenance { spec: spec.name.clone(), radius: (spec.dim > 0).then_some(n as usize), bc },
    })
}

#[derive(PartialEq)]
struct Item(f64, usize);
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl MetricGraph {
    /// A single edge `[0, length]` with both ends on the boundary.
    pub fn interval(length: f64, bc: BoundaryCondition) -> Self {
        let v = |id: &str, x: f64| GraphVertex {
            id: id.into(),
            spec_vertex: None,
            cell: [0, 0],
            degree: 1,
            boundary: true,
            pos: Some([x, 0.0]),
        };
        Self {
            vertices: vec![v("left", 0.0), v("right", length)],
            edges: vec![GraphEdge { id: "e".into(), spec_edge: None, cell: [0, 0], from: 0, to: 1, length }],
            provenance: Provenance { spec: "interval".into(), radius: None, bc },
        }
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.provenance.bc
    }

    pub fn boundary_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.boundary).count()
    }

    /// Incident `(edge, other endpoint)` pairs per vertex; loops appear twice.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (k, e) in self.edges.iter().enumerate() {
            adj[e.from].push((k, e.to));
            adj[e.to].push((k, e.from));
        }
        adj
    }

    pub fn find_vertex(&self, spec_vertex: usize, cell: Cell) -> Option<usize> {
        self.vertices.iter().position(|v| v.spec_vertex == Some(spec_vertex) && v.cell == cell)
    }

    pub fn find_edge(&self, spec_edge: usize, cell: Cell) -> Option<usize> {
        self.edges.iter().position(|e| e.spec_edge == Some(spec_edge) && e.cell == cell)
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertices.len()];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for &(_, w) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Whether `start` reaches a boundary vertex once edge `removed` is deleted.
    pub fn reaches_boundary_without(&self, start: usize, removed: usize) -> bool {
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertices.len()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            if self.vertices[v].boundary {
                return true;
            }
            for &(k, w) in &adj[v] {
                if k != removed && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        false
    }

    /// Shortest-path distances of all vertices from weighted sources.
    pub fn vertex_distances(&self, sources: &[(usize, f64)]) -> Vec<f64> {
        let adj = self.adjacency();
        let mut dist = vec![f64::INFINITY; self.vertices.len()];
        let mut heap = BinaryHeap::new();
        for &(v, d) in sources {
            if d < dist[v] {
                dist[v] = d;
                heap.push(Item(d, v));
            }
        }
        while let Some(Item(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(k, w) in &adj[v] {
                let nd = d + self.edges[k].length;
                if nd < dist[w] {
                    dist[w] = nd;
                    heap.push(Item(nd, w));
                }
            }
        }
        dist
    }

    /// Vertex distances to the boundary set (infinite if there is none).
    pub fn boundary_distances(&self) -> Vec<f64> {
        let sources: Vec<_> = (0..self.vertices.len()).filter(|&v| self.vertices[v].boundary).map(|v| (v, 0.0)).collect();
        self.vertex_distances(&sources)
    }

    /// Distance along the graph from a point to the boundary vertices.
    pub fn distance_to_complement(&self, x: GraphPoint) -> Result<f64> {
        let e = self.edges.get(x.edge).ok_or_else(|| Error::InvalidParams(format!("no edge {}", x.edge)))?;
        if !(0.0..=e.length).contains(&x.offset) {
            return Err(Error::OffsetOutOfRange { offset: x.offset, length: e.length });
        }
        let d = self.boundary_distances();
        Ok((d[e.from] + x.offset).min(d[e.to] + e.length - x.offset))
    }

    /// Vertex distances from a point on the graph.
    pub fn distances_from_point(&self, x: GraphPoint) -> Vec<f64> {
        let e = &self.edges[x.edge];
        self.vertex_distances(&[(e.from, x.offset), (e.to, e.length - x.offset)])
    }
}
