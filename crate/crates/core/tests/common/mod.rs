#![allow(dead_code)]

use std::sync::Arc;

use graphnls_core::graph::{BoundaryCondition, MetricGraph, PeriodicGraphSpec};
use graphnls_core::mesh::{GraphFunction, Mesh};

pub const PERIODIC: [&str; 6] = ["line", "ladder", "comb", "square_grid", "honeycomb", "grid_with_chord"];

pub fn spec(name: &str) -> PeriodicGraphSpec {
    PeriodicGraphSpec::bundled(name).unwrap()
}

pub fn truncation(name: &str, n: usize, bc: BoundaryCondition) -> MetricGraph {
    spec(name).canonicalized().unwrap().truncate(n, bc).unwrap()
}

pub fn mesh(name: &str, n: usize, h: f64) -> Arc<Mesh> {
    Arc::new(Mesh::new(truncation(name, n, BoundaryCondition::Dirichlet), h).unwrap())
}

pub fn line_mesh(len: f64, h: f64) -> Arc<Mesh> {
    Arc::new(Mesh::new(MetricGraph::interval(len, BoundaryCondition::Dirichlet), h).unwrap())
}

/// Nodal values from a list of `[-1, 1]` coefficients, cycled over the nodes.
pub fn from_coeffs(mesh: &Arc<Mesh>, coeffs: &[f64]) -> GraphFunction {
    let mut values: Vec<f64> = (0..mesh.node_count()).map(|i| coeffs[i % coeffs.len()] + 0.1 * (i as f64).sin()).collect();
    for (v, &f) in values.iter_mut().zip(mesh.fixed()) {
        if f {
            *v = 0.0;
        }
    }
    GraphFunction::new(mesh.clone(), values).unwrap()
}

/// Gaussian bump in the graph distance from vertex 0 of cell 0.
pub fn bump(mesh: &Arc<Mesh>, width: f64) -> GraphFunction {
    let g = mesh.graph();
    let center = g.find_vertex(0, [0, 0]).unwrap_or(0);
    let d = mesh.node_distances(&g.vertex_distances(&[(center, 0.0)]));
    let mut values: Vec<f64> = d.iter().map(|x| (-0.5 * (x / width).powi(2)).exp()).collect();
    for (v, &f) in values.iter_mut().zip(mesh.fixed()) {
        if f {
            *v = 0.0;
        }
    }
    GraphFunction::new(mesh.clone(), values).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Smooth random function: Gaussians in graph distance around vertices picked by `seeds`.
pub fn smooth(mesh: &Arc<Mesh>, seeds: &[f64]) -> GraphFunction {
    let g = mesh.graph();
    let nv = g.vertices.len();
    let mut values = vec![0.0; mesh.node_count()];
    for (k, s) in seeds.iter().enumerate() {
        let center = ((s.abs() * 7919.0) as usize + 31 * k) % nv;
        let width = 0.6 + 0.8 * s.abs();
        let amp = if k % 2 == 0 { 1.0 } else { -0.6 } * (0.5 + s.abs());
        let d = mesh.node_distances(&g.vertex_distances(&[(center, 0.0)]));
        for (v, x) in values.iter_mut().zip(d) {
            *v += amp * (-0.5 * (x / width).powi(2)).exp();
        }
    }
    for (v, &f) in values.iter_mut().zip(mesh.fixed()) {
        if f {
            *v = 0.0;
        }
    }
    GraphFunction::new(mesh.clone(), values).unwrap()
}
