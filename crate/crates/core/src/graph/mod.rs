//! Periodic metric graphs described by a fundamental cell with shift-labelled edges.
//!
//! Copy `z` of cell vertex `v` is written `(z, v)`. A cell edge `from -> to` with
//! shift `g` joins `(z, from)` to `(z + g, to)` for every `z` in the lattice.

mod truncate;

pub use truncate::{BoundaryCondition, GraphEdge, GraphPoint, GraphVertex, MetricGraph, Provenance};

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lattice cell index, padded with zeros beyond the spec dimension.
pub type Cell = [i64; 2];

/// Critical mass on the real line, `sqrt(3) * pi / 2`.
pub const MU_LINE: f64 = 2.720_699_046_351_326_5;
/// Critical mass on the half-line, `sqrt(3) * pi / 4`.
pub const MU_HALFLINE: f64 = MU_LINE / 2.0;

/// Default length of the finite edge standing in for a half-line.
pub const DEFAULT_HALFLINE_LENGTH: f64 = 50.0;

/// Spec as it appears on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSpec {
    pub name: String,
    pub dim: usize,
    pub vertices: Vec<RawVertex>,
    pub edges: Vec<RawEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawVertex {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawEdge {
    pub id: String,
    pub from: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shift: Vec<i64>,
    pub length: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub halfline: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellVertex {
    pub id: String,
    pub pos: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellEdge {
    pub id: String,
    pub from: usize,
    /// `None` for half-lines.
    pub to: Option<usize>,
    pub shift: Cell,
    /// Ignored for half-lines, which take the proxy length at truncation.
    pub length: f64,
}

impl CellEdge {
    pub fn is_halfline(&self) -> bool {
        self.to.is_none()
    }
}

/// A validated periodic graph spec.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicGraphSpec {
    pub name: String,
    pub dim: usize,
    pub vertices: Vec<CellVertex>,
    pub edges: Vec<CellEdge>,
    canonical: bool,
}

const BUNDLED: &[(&str, &str)] = &[
    ("line", include_str!("../../specs/line.json")),
    ("ladder", include_str!("../../specs/ladder.json")),
    ("comb", include_str!("../../specs/comb.json")),
    ("square_grid", include_str!("../../specs/square_grid.json")),
    ("honeycomb", include_str!("../../specs/honeycomb.json")),
    ("star3", include_str!("../../specs/star3.json")),
    ("grid_with_chord", include_str!("../../specs/grid_with_chord.json")),
];

/// Names of the specs shipped with the crate.
pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

fn cell_norm(z: Cell) -> i64 {
    z[0].abs().max(z[1].abs())
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Validates a raw spec.
pub fn validate_spec(raw: RawSpec) -> Result<PeriodicGraphSpec> {
    let dim = raw.dim;
    if dim > 2 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if raw.vertices.is_empty() {
        return Err(Error::EmptySpec);
    }
    let mut index = HashMap::new();
    let mut vertices = Vec::with_capacity(raw.vertices.len());
    for v in raw.vertices {
        if index.insert(v.id.clone(), vertices.len()).is_some() {
            return Err(Error::DuplicateVertex(v.id));
        }
        vertices.push(CellVertex { id: v.id, pos: v.pos });
    }
    let lookup = |id: &str| index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_string()));

    let mut seen = HashMap::new();
    let mut edges = Vec::with_capacity(raw.edges.len());
    for e in raw.edges {
        if seen.insert(e.id.clone(), ()).is_some() {
            return Err(Error::DuplicateEdge(e.id));
        }
        if !(e.length.is_finite() && e.length > 0.0) {
            return Err(Error::InvalidLength { edge: e.id, length: e.length });
        }
        let from = lookup(&e.from)?;
        let to = if e.halfline {
            if dim > 0 {
                return Err(Error::HalflineInPeriodic(e.id));
            }
            if let Some(t) = &e.to {
                lookup(t)?;
            }
            None
        } else {
            let t = e.to.as_deref().ok_or_else(|| Error::MissingEndpoint(e.id.clone()))?;
            Some(lookup(t)?)
        };
        let mut shift = [0i64; 2];
        if dim == 0 {
            if e.shift.iter().any(|&g| g != 0) {
                return Err(Error::ShiftDimension { edge: e.id, got: e.shift.len(), dim });
            }
        } else if !e.shift.is_empty() {
            if e.shift.len() != dim {
                return Err(Error::ShiftDimension { edge: e.id, got: e.shift.len(), dim });
            }
            shift[..dim].copy_from_slice(&e.shift);
        }
        edges.push(CellEdge { id: e.id, from, to, shift, length: e.length });
    }

    let canonical = edges.iter().all(|e| cell_norm(e.shift) <= 1);
    let spec = PeriodicGraphSpec { name: raw.name, dim, vertices, edges, canonical };
    if !spec.generates_connected_graph() {
        return Err(Error::Disconnected);
    }
    Ok(spec)
}

impl PeriodicGraphSpec {
    pub fn from_json_str(s: &str) -> Result<Self> {
        validate_spec(serde_json::from_str(s)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// One of the bundled specs; `-` and `_` are interchangeable in the name.
    pub fn bundled(name: &str) -> Result<Self> {
        let key = name.replace('-', "_");
        let text = BUNDLED
            .iter()
            .find(|(n, _)| *n == key)
            .map(|(_, t)| *t)
            .ok_or_else(|| Error::UnknownSpec(name.to_string()))?;
        Self::from_json_str(text)
    }

    /// Bundled spec by name, otherwise a JSON file path.
    pub fn load(name_or_path: &str) -> Result<Self> {
        match Self::bundled(name_or_path) {
            Err(Error::UnknownSpec(_)) => Self::from_path(Path::new(name_or_path)),
            other => other,
        }
    }

    pub fn to_raw(&self) -> RawSpec {
        RawSpec {
            name: self.name.clone(),
            dim: self.dim,
            vertices: self
                .vertices
                .iter()
                .map(|v| RawVertex { id: v.id.clone(), pos: v.pos })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| RawEdge {
                    id: e.id.clone(),
                    from: self.vertices[e.from].id.clone(),
                    to: e.to.map(|t| self.vertices[t].id.clone()),
                    shift: e.shift[..self.dim].to_vec(),
                    length: e.length,
                    halfline: e.is_halfline(),
                })
                .collect(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn is_periodic(&self) -> bool {
        self.dim > 0
    }

    /// Total edge length of the cell, half-lines excluded.
    pub fn cell_length(&self) -> f64 {
        self.edges.iter().filter(|e| !e.is_halfline()).map(|e| e.length).sum()
    }

    pub fn max_shift_norm(&self) -> i64 {
        self.edges.iter().map(|e| cell_norm(e.shift)).max().unwrap_or(0)
    }

    /// Rebase factor that always yields a canonical spec.
    pub fn s_k(&self) -> usize {
        self.max_shift_norm() as usize + 1
    }

    /// Degrees of the cell vertices in the infinite graph.
    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for e in &self.edges {
            deg[e.from] += 1;
            if let Some(t) = e.to {
                deg[t] += 1;
            }
        }
        deg
    }

    /// Number of distinct vertices touched by the edges of one cell copy,
    /// counting endpoints that live in neighbouring cells.
    pub fn closed_cell_vertex_count(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        for (i, _) in self.vertices.iter().enumerate() {
            seen.insert(([0, 0], i));
        }
        for e in &self.edges {
            if let Some(t) = e.to {
                seen.insert((e.shift, t));
            }
        }
        seen.len()
    }

    pub fn has_terminal_point(&self) -> bool {
        self.vertex_degrees().iter().any(|&d| d == 1)
    }

    /// Mass threshold for boundedness from below at the critical power.
    pub fn tilde_mu(&self) -> f64 {
        if self.has_terminal_point() {
            MU_HALFLINE
        } else {
            MU_LINE
        }
    }

    /// Connectivity of the infinite graph: the quotient must be connected and the
    /// cycle shifts must generate the whole lattice.
    fn generates_connected_graph(&self) -> bool {
        let nv = self.vertices.len();
        let mut adj: Vec<Vec<(usize, Cell)>> = vec![Vec::new(); nv];
        for e in &self.edges {
            if let Some(t) = e.to {
                adj[e.from].push((t, e.shift));
                adj[t].push((e.from, [-e.shift[0], -e.shift[1]]));
            }
        }
        let mut pot: Vec<Option<Cell>> = vec![None; nv];
        pot[0] = Some([0, 0]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            let pv = pot[v].unwrap();
            for &(w, g) in &adj[v] {
                if pot[w].is_none() {
                    pot[w] = Some([pv[0] + g[0], pv[1] + g[1]]);
                    queue.push_back(w);
                }
            }
        }
        if pot.iter().any(Option::is_none) {
            return false;
        }
        if self.dim == 0 {
            return true;
        }
        let voltages: Vec<Cell> = self
            .edges
            .iter()
            .filter_map(|e| {
                let t = e.to?;
                let (pf, pt) = (pot[e.from].unwrap(), pot[t].unwrap());
                Some([pf[0] + e.shift[0] - pt[0], pf[1] + e.shift[1] - pt[1]])
            })
            .collect();
        if self.dim == 1 {
            voltages.iter().fold(0, |g, v| gcd(g, v[0])) == 1
        } else {
            let mut g = 0;
            for (i, a) in voltages.iter().enumerate() {
                for b in &voltages[i + 1..] {
                    g = gcd(g, a[0] * b[1] - a[1] * b[0]);
                }
            }
            g == 1
        }
    }

    /// Equivalent spec whose cell is the union of `s^dim` copies of this one.
    pub fn rebase(&self, s: usize) -> Result<Self> {
        if s < 1 {
            return Err(Error::InvalidRebaseFactor);
        }
        if self.dim == 0 {
            return Err(Error::InvalidParams("rebase needs a periodic spec".into()));
        }
        if s == 1 {
            return Ok(self.clone());
        }
        let s = s as i64;
        let offsets: Vec<Cell> = if self.dim == 1 {
            (0..s).map(|t| [t, 0]).collect()
        } else {
            (0..s).flat_map(|a| (0..s).map(move |b| [a, b])).collect()
        };
        let label = |t: Cell| {
            if self.dim == 1 {
                format!("{}", t[0])
            } else {
                format!("{}:{}", t[0], t[1])
            }
        };
        let slot: HashMap<Cell, usize> = offsets.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        let nv = self.vertices.len();
        let mut vertices = Vec::with_capacity(offsets.len() * nv);
        for &t in &offsets {
            for v in &self.vertices {
                vertices.push(CellVertex {
                    id: format!("{}@{}", v.id, label(t)),
                    pos: v.pos.map(|p| [p[0] + t[0] as f64, p[1] + t[1] as f64]),
                });
            }
        }
        let mut edges = Vec::with_capacity(offsets.len() * self.edges.len());
        for &t in &offsets {
            for e in &self.edges {
                let to = e.to.expect("periodic specs have no half-lines");
                let target = [t[0] + e.shift[0], t[1] + e.shift[1]];
                let shift = [target[0].div_euclid(s), target[1].div_euclid(s)];
                let rest = [target[0].rem_euclid(s), target[1].rem_euclid(s)];
                edges.push(CellEdge {
                    id: format!("{}@{}", e.id, label(t)),
                    from: slot[&t] * nv + e.from,
                    to: Some(slot[&rest] * nv + to),
                    shift,
                    length: e.length,
                });
            }
        }
        let canonical = edges.iter().all(|e| cell_norm(e.shift) <= 1);
        Ok(Self { name: format!("{}x{}", self.name, s), dim: self.dim, vertices, edges, canonical })
    }

    /// This spec if canonical, otherwise its rebase by `s_k`.
    pub fn canonicalized(&self) -> Result<Self> {
        if self.dim == 0 || self.canonical {
            Ok(self.clone())
        } else {
            self.rebase(self.s_k())
        }
    }

    pub fn truncate(&self, n: usize, bc: BoundaryCondition) -> Result<MetricGraph> {
        self.truncate_with(n, bc, DEFAULT_HALFLINE_LENGTH)
    }

    pub fn truncate_with(&self, n: usize, bc: BoundaryCondition, halfline_length: f64) -> Result<MetricGraph> {
        truncate::truncate(self, n, bc, halfline_length)
    }

    /// Checks that removing any edge leaves only non-compact components, probing on `B_{2n}`.
    pub fn check_assumption_h(&self, n: usize) -> Result<AssumptionH> {
        let graph = self.truncate(2 * n, BoundaryCondition::Dirichlet)?;
        let mut per_edge = BTreeMap::new();
        for (k, e) in self.edges.iter().enumerate() {
            let idx = graph
                .find_edge(k, [0, 0])
                .ok_or_else(|| Error::InvalidParams(format!("edge `{}` missing from truncation", e.id)))?;
            let ge = &graph.edges[idx];
            let ok = graph.reaches_boundary_without(ge.from, idx) && graph.reaches_boundary_without(ge.to, idx);
            per_edge.insert(e.id.clone(), ok);
        }
        Ok(AssumptionH { holds: per_edge.values().all(|&b| b), per_edge })
    }
}

/// Outcome of the edge-removal test, one entry per edge orbit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionH {
    pub holds: bool,
    pub per_edge: BTreeMap<String, bool>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(dim: usize, vertices: &[&str], edges: &[(&str, &str, &str, Vec<i64>, f64)]) -> RawSpec {
        RawSpec {
            name: "t".into(),
            dim,
            vertices: vertices.iter().map(|v| RawVertex { id: v.to_string(), pos: None }).collect(),
            edges: edges
                .iter()
                .map(|(id, f, t, g, l)| RawEdge {
                    id: id.to_string(),
                    from: f.to_string(),
                    to: Some(t.to_string()),
                    shift: g.clone(),
                    length: *l,
                    halfline: false,
                })
                .collect(),
        }
    }

    #[test]
    fn minimal_line_is_valid_and_canonical() {
        let s = validate_spec(raw(1, &["v"], &[("e", "v", "v", vec![1], 1.0)])).unwrap();
        assert!(s.is_canonical());
        assert_eq!(s.cell_length(), 1.0);
    }

    #[test]
    fn long_shift_is_not_canonical() {
        let s = validate_spec(raw(
            2,
            &["v"],
            &[("a", "v", "v", vec![2, 0], 1.0), ("b", "v", "v", vec![1, 0], 1.0), ("c", "v", "v", vec![0, 1], 1.0)],
        ))
        .unwrap();
        assert!(!s.is_canonical());
        assert_eq!(s.s_k(), 3);
    }

    #[test]
    fn malformed_specs_are_rejected() {
        let e = validate_spec(raw(1, &["v"], &[("e", "v", "w", vec![1], 1.0)])).unwrap_err();
        assert!(matches!(e, Error::UnknownVertex(ref w) if w == "w"));
        let e = validate_spec(raw(1, &["v"], &[("e", "v", "v", vec![1], 0.0)])).unwrap_err();
        assert!(matches!(e, Error::InvalidLength { .. }));
        let mut r = raw(1, &["v"], &[("e", "v", "v", vec![1], 1.0)]);
        r.edges[0].halfline = true;
        assert!(matches!(validate_spec(r).unwrap_err(), Error::HalflineInPeriodic(_)));
    }

    #[test]
    fn disconnected_lifts_are_rejected() {
        // Shift 2 only reaches even cells.
        let e = validate_spec(raw(1, &["v"], &[("e", "v", "v", vec![2], 1.0)])).unwrap_err();
        assert!(matches!(e, Error::Disconnected));
        // Quotient itself disconnected.
        let e = validate_spec(raw(1, &["v", "w"], &[("e", "v", "v", vec![1], 1.0)])).unwrap_err();
        assert!(matches!(e, Error::Disconnected));
        // A 2-periodic spec with only one independent direction.
        let e = validate_spec(raw(2, &["v"], &[("e", "v", "v", vec![1, 1], 1.0)])).unwrap_err();
        assert!(matches!(e, Error::Disconnected));
    }

    #[test]
    fn all_bundled_specs_validate() {
        for name in bundled_names() {
            let s = PeriodicGraphSpec::bundled(name).unwrap();
            assert_eq!(s.name, name);
        }
        assert!(PeriodicGraphSpec::bundled("square-grid").is_ok());
    }

    #[test]
    fn raw_round_trip() {
        for name in bundled_names() {
            let s = PeriodicGraphSpec::bundled(name).unwrap();
            let again = validate_spec(s.to_raw()).unwrap();
            assert_eq!(s, again);
        }
    }

    #[test]
    fn terminal_points_and_tilde_mu() {
        let line = PeriodicGraphSpec::bundled("line").unwrap();
        assert!(!line.has_terminal_point());
        assert!((line.tilde_mu() - 3f64.sqrt() * std::f64::consts::PI / 2.0).abs() < 1e-15);
        let comb = PeriodicGraphSpec::bundled("comb").unwrap();
        assert!(comb.has_terminal_point());
        assert!((comb.tilde_mu() - 1.360350).abs() < 1e-6);
        let grid = PeriodicGraphSpec::bundled("square_grid").unwrap();
        assert_eq!(grid.vertex_degrees(), vec![4]);
        assert!(!grid.has_terminal_point());
    }

    #[test]
    fn rebase_identity() {
        let s = PeriodicGraphSpec::bundled("ladder").unwrap();
        assert_eq!(s.rebase(1).unwrap(), s);
        assert!(matches!(s.rebase(0).unwrap_err(), Error::InvalidRebaseFactor));
    }

    #[test]
    fn rebase_line_by_four() {
        let s = PeriodicGraphSpec::bundled("line").unwrap().rebase(4).unwrap();
        assert!(s.is_canonical());
        assert_eq!(s.cell_length(), 4.0);
        assert_eq!(s.vertices.len(), 4);
        assert_eq!(s.closed_cell_vertex_count(), 5);
        assert!(s.edges.iter().all(|e| e.shift[0] >= -1 && e.shift[0] <= 1));
    }

    #[test]
    fn rebase_chords_by_s_k() {
        let s = PeriodicGraphSpec::bundled("grid_with_chord").unwrap();
        assert!(!s.is_canonical());
        assert_eq!(s.s_k(), 3);
        let r = s.rebase(3).unwrap();
        assert!(r.is_canonical());
        assert_eq!(r.vertices.len(), 9 * s.vertices.len());
        assert_eq!(r.edges.len(), 9 * s.edges.len());
        assert!((r.cell_length() - 9.0 * s.cell_length()).abs() < 1e-12);
        assert_eq!(r.vertex_degrees(), s.vertex_degrees().repeat(9));
    }

    #[test]
    fn assumption_h_examples() {
        let line = PeriodicGraphSpec::bundled("line").unwrap();
        assert!(line.check_assumption_h(3).unwrap().holds);
        let comb = PeriodicGraphSpec::bundled("comb").unwrap();
        let h = comb.check_assumption_h(3).unwrap();
        assert!(!h.holds);
        assert!(!h.per_edge["tooth"]);
        assert!(h.per_edge["spine"]);
        let grid = PeriodicGraphSpec::bundled("square_grid").unwrap();
        assert!(grid.check_assumption_h(3).unwrap().per_edge.values().all(|&b| b));
        let star = PeriodicGraphSpec::bundled("star3").unwrap();
        assert!(star.check_assumption_h(3).unwrap().holds);
    }
}
