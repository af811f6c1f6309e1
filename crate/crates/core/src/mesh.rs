//! Piecewise-linear finite elements on a metric graph.
//!
//! Nodes `0..V` are the graph vertices, so continuity and the natural Kirchhoff
//! condition come for free. Every integral of a discrete function is exact for
//! P1 data (powers use 4-point Gauss per interval), which makes each discrete
//! state an honest element of H¹ of the graph.

use std::io::{BufRead, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sprs::{CsMat, TriMat};

use crate::error::{Error, Result};
use crate::graph::{BoundaryCondition, MetricGraph};
use crate::linsolve::{ChainSolver, ChainSpec};

/// Gauss-Legendre nodes and weights mapped to `[0, 1]`.
const GAUSS: [(f64, f64); 4] = [
    (0.069_431_844_202_973_71, 0.173_927_422_568_726_93),
    (0.330_009_478_207_571_9, 0.326_072_577_431_273_07),
    (0.669_990_521_792_428_1, 0.326_072_577_431_273_07),
    (0.930_568_155_797_026_3, 0.173_927_422_568_726_93),
];

/// `|x|^r` with fast paths for integer and half-integer exponents.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Power {
    r: f64,
    int: Option<i32>,
    half: bool,
}

impl Power {
    pub(crate) fn new(r: f64) -> Self {
        let twice = 2.0 * r;
        if twice.fract() == 0.0 && twice.abs() < 64.0 {
            let t = twice as i32;
            Self { r, int: Some(t.div_euclid(2)), half: t % 2 != 0 }
        } else {
            Self { r, int: None, half: false }
        }
    }

    #[inline]
    pub(crate) fn abs_pow(&self, x: f64) -> f64 {
        let a = x.abs();
        match self.int {
            Some(k) if self.half => a.powi(k) * a.sqrt(),
            Some(k) => a.powi(k),
            None => a.powf(self.r),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Elem {
    i: usize,
    j: usize,
    h: f64,
}

/// The nodes of one graph edge in order from its `from` vertex.
#[derive(Debug, Clone)]
pub struct EdgeChain {
    pub edge: usize,
    pub from: usize,
    pub to: usize,
    pub first_interior: usize,
    pub intervals: usize,
    pub h: f64,
}

impl EdgeChain {
    pub fn node(&self, k: usize) -> usize {
        if k == 0 {
            self.from
        } else if k == self.intervals {
            self.to
        } else {
            self.first_interior + k - 1
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..=self.intervals).map(|k| self.node(k))
    }
}

pub struct Mesh {
    graph: MetricGraph,
    chains: Vec<EdgeChain>,
    elems: Vec<Elem>,
    nodes: usize,
    fixed: Vec<bool>,
    h_min: f64,
    solver: ChainSolver,
}

impl std::fmt::Debug for Mesh {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Mesh").field("nodes", &self.nodes).field("edges", &self.chains.len()).finish()
    }
}

impl Mesh {
    /// Uniform subdivision of every edge with spacing at most `h`.
    pub fn new(graph: MetricGraph, h: f64) -> Result<Self> {
        Self::with_spacing(graph, |_| h)
    }

    /// Subdivision with a per-edge target spacing.
    pub fn with_spacing(graph: MetricGraph, spacing: impl Fn(usize) -> f64) -> Result<Self> {
        let nv = graph.vertices.len();
        let mut chains = Vec::with_capacity(graph.edges.len());
        let mut next = nv;
        let mut h_min = f64::INFINITY;
        for (k, e) in graph.edges.iter().enumerate() {
            let target = spacing(k);
            if !(target.is_finite() && target > 0.0) {
                return Err(Error::InvalidParams(format!("mesh spacing must be positive, got {target}")));
            }
            let intervals = ((e.length / target).ceil() as usize).max(4);
            let h = e.length / intervals as f64;
            h_min = h_min.min(h);
            chains.push(EdgeChain { edge: k, from: e.from, to: e.to, first_interior: next, intervals, h });
            next += intervals - 1;
        }
        let nodes = next;
        let mut fixed = vec![false; nodes];
        if graph.bc() == BoundaryCondition::Dirichlet {
            for (v, vert) in graph.vertices.iter().enumerate() {
                fixed[v] = vert.boundary;
            }
        }
        let elems = chains
            .iter()
            .flat_map(|c| (0..c.intervals).map(move |k| Elem { i: c.node(k), j: c.node(k + 1), h: c.h }))
            .collect();
        let specs: Vec<ChainSpec> = chains
            .iter()
            .map(|c| ChainSpec { a: c.from, b: c.to, first: c.first_interior, intervals: c.intervals, h: c.h })
            .collect();
        let solver = ChainSolver::new(nv, nodes, &specs, &fixed, 1.0)?;
        Ok(Self { graph, chains, elems, nodes, fixed, h_min, solver })
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn chains(&self) -> &[EdgeChain] {
        &self.chains
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn is_fixed(&self, node: usize) -> bool {
        self.fixed[node]
    }

    pub fn fixed(&self) -> &[bool] {
        &self.fixed
    }

    pub fn h_min(&self) -> f64 {
        self.h_min
    }

    pub fn h_max(&self) -> f64 {
        self.chains.iter().map(|c| c.h).fold(0.0, f64::max)
    }

    pub fn total_length(&self) -> f64 {
        self.graph.total_length()
    }

    /// Solver for `K + M` with pinned Dirichlet nodes.
    pub fn preconditioner(&self) -> &ChainSolver {
        &self.solver
    }

    /// Solver for `K + sigma M`.
    pub fn shifted_solver(&self, sigma: f64) -> Result<ChainSolver> {
        let specs: Vec<ChainSpec> = self
            .chains
            .iter()
            .map(|c| ChainSpec { a: c.from, b: c.to, first: c.first_interior, intervals: c.intervals, h: c.h })
            .collect();
        ChainSolver::new(self.graph.vertices.len(), self.nodes, &specs, &self.fixed, sigma)
    }

    /// Assembled stiffness matrix `∫ φ_i' φ_j'`.
    pub fn stiffness(&self) -> CsMat<f64> {
        let mut t = TriMat::new((self.nodes, self.nodes));
        for e in &self.elems {
            let k = 1.0 / e.h;
            t.add_triplet(e.i, e.i, k);
            t.add_triplet(e.j, e.j, k);
            t.add_triplet(e.i, e.j, -k);
            t.add_triplet(e.j, e.i, -k);
        }
        t.to_csr()
    }

    /// Assembled consistent mass matrix `∫ φ_i φ_j`.
    pub fn mass(&self) -> CsMat<f64> {
        let mut t = TriMat::new((self.nodes, self.nodes));
        for e in &self.elems {
            t.add_triplet(e.i, e.i, e.h / 3.0);
            t.add_triplet(e.j, e.j, e.h / 3.0);
            t.add_triplet(e.i, e.j, e.h / 6.0);
            t.add_triplet(e.j, e.i, e.h / 6.0);
        }
        t.to_csr()
    }

    /// Row sums of the mass matrix.
    pub fn lumped_mass(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.nodes];
        for e in &self.elems {
            m[e.i] += e.h / 2.0;
            m[e.j] += e.h / 2.0;
        }
        m
    }

    pub(crate) fn mass_form(&self, u: &[f64]) -> f64 {
        self.elems.iter().map(|e| e.h * (u[e.i] * u[e.i] + u[e.i] * u[e.j] + u[e.j] * u[e.j]) / 3.0).sum()
    }

    pub(crate) fn stiff_form(&self, u: &[f64]) -> f64 {
        self.elems.iter().map(|e| (u[e.j] - u[e.i]).powi(2) / e.h).sum()
    }

    pub(crate) fn mass_apply(&self, u: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for e in &self.elems {
            out[e.i] += e.h * (2.0 * u[e.i] + u[e.j]) / 6.0;
            out[e.j] += e.h * (u[e.i] + 2.0 * u[e.j]) / 6.0;
        }
    }

    pub(crate) fn stiff_apply(&self, u: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for e in &self.elems {
            let f = (u[e.j] - u[e.i]) / e.h;
            out[e.i] -= f;
            out[e.j] += f;
        }
    }

    /// `∫|u|^r`, and if `load` is given adds `scale * ∫ |u|^{r-2} u φ_i` to it.
    pub(crate) fn power(&self, u: &[f64], r: f64, load: Option<(&mut [f64], f64)>) -> f64 {
        let pw = Power::new(r);
        let mut total = 0.0;
        match load {
            None => {
                for e in &self.elems {
                    let (a, b) = (u[e.i], u[e.j]);
                    let s: f64 = GAUSS.iter().map(|&(t, w)| w * pw.abs_pow(a + (b - a) * t)).sum();
                    total += e.h * s;
                }
            }
            Some((out, scale)) => {
                for e in &self.elems {
                    let (a, b) = (u[e.i], u[e.j]);
                    let (mut s, mut gi, mut gj) = (0.0, 0.0, 0.0);
                    for &(t, w) in &GAUSS {
                        let v = a + (b - a) * t;
                        let p = pw.abs_pow(v);
                        s += w * p;
                        // |v|^{r-2} v = |v|^r / v, and 0 at v = 0.
                        let n = if v != 0.0 { w * p / v } else { 0.0 };
                        gi += n * (1.0 - t);
                        gj += n * t;
                    }
                    total += e.h * s;
                    out[e.i] += scale * e.h * gi;
                    out[e.j] += scale * e.h * gj;
                }
            }
        }
        total
    }

    /// Zeroes pinned entries of a dual vector.
    pub(crate) fn pin(&self, v: &mut [f64]) {
        for (x, &f) in v.iter_mut().zip(&self.fixed) {
            if f {
                *x = 0.0;
            }
        }
    }

    /// `(edge, offset)` of every node, vertices reported on their first incident edge.
    pub fn node_location(&self, node: usize) -> (usize, f64) {
        if node >= self.graph.vertices.len() {
            let c = self
                .chains
                .iter()
                .find(|c| node >= c.first_interior && node < c.first_interior + c.intervals - 1)
                .expect("interior node belongs to a chain");
            return (c.edge, (node - c.first_interior + 1) as f64 * c.h);
        }
        let c = self.chains.iter().find(|c| c.from == node || c.to == node).expect("vertex has an edge");
        (c.edge, if c.from == node { 0.0 } else { self.graph.edges[c.edge].length })
    }

    /// Value at `(edge, offset)` of a nodal vector on this mesh.
    pub fn evaluate(&self, u: &[f64], edge: usize, offset: f64) -> f64 {
        let c = &self.chains[edge];
        let s = (offset / c.h).clamp(0.0, c.intervals as f64);
        let k = (s.floor() as usize).min(c.intervals - 1);
        let t = s - k as f64;
        u[c.node(k)] * (1.0 - t) + u[c.node(k + 1)] * t
    }

    /// Nodal values sampled from a function of `(edge, offset)`; pinned nodes get 0.
    pub fn sample(&self, f: impl Fn(usize, f64) -> f64) -> Vec<f64> {
        let mut u = vec![0.0; self.nodes];
        for c in &self.chains {
            for k in 0..=c.intervals {
                u[c.node(k)] = f(c.edge, k as f64 * c.h);
            }
        }
        self.pin(&mut u);
        u
    }

    /// Vertex and interior-node distances along the graph from given vertex distances.
    pub fn node_distances(&self, vertex_dist: &[f64]) -> Vec<f64> {
        let mut d = vec![0.0; self.nodes];
        d[..vertex_dist.len()].copy_from_slice(vertex_dist);
        for c in &self.chains {
            let len = self.graph.edges[c.edge].length;
            for k in 1..c.intervals {
                let x = k as f64 * c.h;
                d[c.node(k)] = (vertex_dist[c.from] + x).min(vertex_dist[c.to] + len - x);
            }
        }
        d
    }
}

/// Parameters of the energy `½‖u'‖² − (1/p)‖u‖_p^p − (α/q)‖u‖_q^q` at mass `μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub mu: f64,
}

impl EnergyParams {
    pub fn new(p: f64, q: f64, alpha: f64, mu: f64) -> Result<Self> {
        if !(p > 2.0 && p <= 6.0) {
            return Err(Error::InvalidParams(format!("p = {p} must lie in (2, 6]")));
        }
        if !(q > 2.0 && q < p) {
            return Err(Error::InvalidParams(format!("q = {q} must lie in (2, p)")));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidParams("alpha must be finite".into()));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParams(format!("mu = {mu} must be positive")));
        }
        Ok(Self { p, q, alpha, mu })
    }

    /// Pure power `p`; `q` is a placeholder with zero weight.
    pub fn homogeneous(p: f64, mu: f64) -> Result<Self> {
        Self::new(p, 0.5 * (2.0 + p), 0.0, mu)
    }

    pub fn with_mu(self, mu: f64) -> Self {
        Self { mu, ..self }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    /// `|u|^{p-2}u + α|u|^{q-2}u`.
    pub fn nonlinearity(&self, u: f64) -> f64 {
        let a = u.abs();
        let g = a.powf(self.p - 2.0) * u;
        if self.alpha == 0.0 {
            g
        } else {
            g + self.alpha * a.powf(self.q - 2.0) * u
        }
    }
}

/// Pieces of the energy at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct EnergyParts {
    pub kinetic: f64,
    pub lp: f64,
    pub lq: f64,
}

impl EnergyParts {
    pub(crate) fn energy(&self, params: &EnergyParams) -> f64 {
        0.5 * self.kinetic - self.lp / params.p - params.alpha * self.lq / params.q
    }
}

pub(crate) fn energy_parts(mesh: &Mesh, u: &[f64], params: &EnergyParams) -> EnergyParts {
    EnergyParts {
        kinetic: mesh.stiff_form(u),
        lp: mesh.power(u, params.p, None),
        lq: if params.alpha == 0.0 { 0.0 } else { mesh.power(u, params.q, None) },
    }
}

/// Euclidean energy gradient `K u − ∫ N(u) φ_i`, pinned entries zeroed. Returns the energy.
pub(crate) fn energy_gradient(mesh: &Mesh, u: &[f64], params: &EnergyParams, grad: &mut [f64]) -> f64 {
    mesh.stiff_apply(u, grad);
    let kinetic = dot(grad, u);
    let lp = mesh.power(u, params.p, Some((grad, -1.0)));
    let lq = if params.alpha == 0.0 { 0.0 } else { mesh.power(u, params.q, Some((grad, -params.alpha))) };
    mesh.pin(grad);
    EnergyParts { kinetic, lp, lq }.energy(params)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Nodal values of a function on a mesh.
#[derive(Debug, Clone)]
pub struct GraphFunction {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
}

/// Metric in which a gradient is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    L2,
    H1,
}

/// Euler-Lagrange residuals of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub edge: f64,
    pub kirchhoff: f64,
}

impl GraphFunction {
    pub fn new(mesh: Arc<Mesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.node_count() {
            return Err(Error::InvalidParams(format!(
                "expected {} nodal values, got {}",
                mesh.node_count(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("nodal values must be finite".into()));
        }
        if values.iter().zip(mesh.fixed()).any(|(v, &f)| f && *v != 0.0) {
            return Err(Error::InvalidParams("Dirichlet nodes must be zero".into()));
        }
        Ok(Self { mesh, values })
    }

    pub fn zeros(mesh: Arc<Mesh>) -> Self {
        let n = mesh.node_count();
        Self { mesh, values: vec![0.0; n] }
    }

    /// Samples `f(edge, offset)`; Dirichlet nodes are set to zero.
    pub fn from_fn(mesh: Arc<Mesh>, f: impl Fn(usize, f64) -> f64) -> Self {
        let values = mesh.sample(f);
        Self { mesh, values }
    }

    pub(crate) fn from_raw(mesh: Arc<Mesh>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), mesh.node_count());
        Self { mesh, values }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { mesh: self.mesh.clone(), values: self.values.iter().map(|v| c * v).collect() }
    }

    /// Rescaled to `‖u‖₂² = mu`.
    pub fn normalized(&self, mu: f64) -> Result<Self> {
        let m = self.norm_l2sq();
        if m <= 0.0 {
            return Err(Error::ZeroDenominator("normalization"));
        }
        Ok(self.scaled((mu / m).sqrt()))
    }

    pub fn norm_l2sq(&self) -> f64 {
        self.mesh.mass_form(&self.values)
    }

    /// `‖u‖_r^r`.
    pub fn lp_pow(&self, r: f64) -> Result<f64> {
        if !(r >= 1.0) {
            return Err(Error::InvalidParams(format!("exponent r = {r} must be at least 1")));
        }
        Ok(self.mesh.power(&self.values, r, None))
    }

    /// `‖u‖_r`.
    pub fn norm_lp(&self, r: f64) -> Result<f64> {
        Ok(self.lp_pow(r)?.powf(1.0 / r))
    }

    pub fn norm_linf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn seminorm_h1sq(&self) -> f64 {
        self.mesh.stiff_form(&self.values)
    }

    /// Participation length `(∫u²)² / ∫u⁴`, a measure of how spread out `u` is.
    pub fn participation_length(&self) -> f64 {
        let l4 = self.mesh.power(&self.values, 4.0, None);
        if l4 == 0.0 {
            return 0.0;
        }
        self.norm_l2sq().powi(2) / l4
    }

    pub fn energy(&self, params: &EnergyParams) -> f64 {
        energy_parts(&self.mesh, &self.values, params).energy(params)
    }

    /// Multiplier of the stationary equation, from testing it against `u`.
    pub fn lambda(&self, params: &EnergyParams) -> f64 {
        let parts = energy_parts(&self.mesh, &self.values, params);
        (parts.lp + params.alpha * parts.lq - parts.kinetic) / self.norm_l2sq()
    }

    pub fn grad_energy(&self, params: &EnergyParams, metric: Metric) -> Result<GraphFunction> {
        let mut g = vec![0.0; self.values.len()];
        energy_gradient(&self.mesh, &self.values, params, &mut g);
        if metric == Metric::H1 {
            g = self.mesh.preconditioner().solve(&g);
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::LinearSolve("non-finite gradient".into()));
        }
        Ok(Self { mesh: self.mesh.clone(), values: g })
    }

    /// Residuals of `−u'' + λu = N(u)` on edge interiors (second differences,
    /// discrete L² norm) and of the Kirchhoff sum at non-boundary vertices.
    ///
    /// Vertex slopes use the first interval corrected by the equation itself,
    /// `u'(0) ≈ (u₁ − u₀)/h − (h/2)(λu₀ − N(u₀))`, which is second order.
    pub fn residual(&self, lambda: f64, params: &EnergyParams) -> Residual {
        let mesh = &self.mesh;
        let u = &self.values;
        let mut edge_sq = 0.0;
        let mut flux = vec![0.0; mesh.graph().vertices.len()];
        for c in mesh.chains() {
            let h = c.h;
            for k in 1..c.intervals {
                let (a, b, d) = (u[c.node(k - 1)], u[c.node(k)], u[c.node(k + 1)]);
                let r = -(a - 2.0 * b + d) / (h * h) + lambda * b - params.nonlinearity(b);
                edge_sq += h * r * r;
            }
            for (end, next) in [(c.from, c.node(1)), (c.to, c.node(c.intervals - 1))] {
                let u0 = u[end];
                flux[end] += (u[next] - u0) / h - 0.5 * h * (lambda * u0 - params.nonlinearity(u0));
            }
        }
        let kirchhoff = mesh
            .graph()
            .vertices
            .iter()
            .zip(&flux)
            .filter(|(v, _)| !v.boundary)
            .fold(0.0f64, |m, (_, f)| m.max(f.abs()));
        Residual { edge: edge_sq.sqrt(), kirchhoff }
    }

    /// Interpolates onto another mesh of the same graph.
    pub fn transfer(&self, target: Arc<Mesh>) -> Result<GraphFunction> {
        let same = target.graph().edges.len() == self.mesh.graph().edges.len()
            && target.graph().edges.iter().zip(&self.mesh.graph().edges).all(|(a, b)| a.length == b.length);
        if !same {
            return Err(Error::InvalidParams("meshes belong to different graphs".into()));
        }
        let src = &self.mesh;
        let values = target.sample(|e, x| src.evaluate(&self.values, e, x));
        Ok(Self { mesh: target, values })
    }

    /// Writes `edge,offset,value` rows under a versioned header carrying `h` per edge.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        let g = self.mesh.graph();
        writeln!(w, "# graphnls function v1")?;
        writeln!(w, "# bc,{}", if g.bc() == BoundaryCondition::Dirichlet { "dirichlet" } else { "neumann" })?;
        for c in self.mesh.chains() {
            writeln!(w, "# h,{},{}", g.edges[c.edge].id, c.h)?;
        }
        writeln!(w, "edge,offset,value")?;
        for c in self.mesh.chains() {
            let id = &g.edges[c.edge].id;
            for k in 0..=c.intervals {
                writeln!(w, "{},{},{}", id, k as f64 * c.h, self.values[c.node(k)])?;
            }
        }
        Ok(())
    }

    /// Reads rows written by [`GraphFunction::write_csv`] onto a mesh of the same graph.
    pub fn read_csv(mesh: Arc<Mesh>, r: impl BufRead) -> Result<GraphFunction> {
        let ids: std::collections::HashMap<&str, usize> =
            mesh.graph().edges.iter().enumerate().map(|(k, e)| (e.id.as_str(), k)).collect();
        let mut values = vec![0.0; mesh.node_count()];
        let mut header = false;
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !header {
                if line != "edge,offset,value" {
                    return Err(Error::Format(format!("unexpected header `{line}`")));
                }
                header = true;
                continue;
            }
            // Edge ids from user specs may contain commas; the numbers never do.
            let mut parts = line.rsplitn(3, ',');
            let (Some(val), Some(off), Some(id)) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Format(format!("bad row `{line}`")));
            };
            let edge = *ids.get(id).ok_or_else(|| Error::Format(format!("unknown edge `{id}`")))?;
            let parse = |s: &str| s.parse::<f64>().map_err(|_| Error::Format(format!("bad number `{s}`")));
            let (off, val) = (parse(off)?, parse(val)?);
            let c = &mesh.chains()[edge];
            let k = (off / c.h).round();
            if k < 0.0 || k > c.intervals as f64 || (off - k * c.h).abs() > 1e-9 * c.h.max(1.0) {
                return Err(Error::Format(format!("offset {off} is not a node of edge `{id}`")));
            }
            values[c.node(k as usize)] = val;
        }
        mesh.pin(&mut values);
        GraphFunction::new(mesh, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphEdge, GraphVertex, PeriodicGraphSpec, Provenance};

    fn interval(len: f64, bc: BoundaryCondition) -> MetricGraph {
        MetricGraph::interval(len, bc)
    }

    fn star(bc: BoundaryCondition) -> MetricGraph {
        let v = |id: &str, b: bool, d: usize| GraphVertex {
            id: id.into(),
            spec_vertex: None,
            cell: [0, 0],
            degree: d,
            boundary: b,
            pos: None,
        };
        let e = |id: &str, to: usize| GraphEdge { id: id.into(), spec_edge: None, cell: [0, 0], from: 0, to, length: 1.0 };
        MetricGraph {
            vertices: vec![v("c", false, 3), v("a", true, 1), v("b", true, 1), v("d", true, 1)],
            edges: vec![e("ea", 1), e("eb", 2), e("ed", 3)],
            provenance: Provenance { spec: "star".into(), radius: None, bc },
        }
    }

    #[test]
    fn single_edge_matrices() {
        let mesh = Mesh::new(interval(1.0, BoundaryCondition::Neumann), 0.25).unwrap();
        assert_eq!(mesh.node_count(), 5);
        let k = mesh.stiffness().to_dense();
        // Path order: left, interior 2..5, right.
        let order = [0usize, 2, 3, 4, 1];
        for (a, &i) in order.iter().enumerate() {
            for (b, &j) in order.iter().enumerate() {
                let expect = match (a as i64 - b as i64).abs() {
                    0 if a == 0 || a == 4 => 4.0,
                    0 => 8.0,
                    1 => -4.0,
                    _ => 0.0,
                };
                assert!((k[[i, j]] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn star_center_is_shared() {
        let mesh = Mesh::new(star(BoundaryCondition::Dirichlet), 0.25).unwrap();
        let k = mesh.stiffness();
        let row = k.outer_view(0).unwrap();
        // Center couples to itself and one node per edge.
        assert_eq!(row.nnz(), 4);
        let total: f64 = mesh.mass().data().iter().sum();
        assert!((total - 3.0).abs() < 1e-12);
    }

    #[test]
    fn stiffness_kernel_and_symmetry() {
        let g = PeriodicGraphSpec::bundled("ladder").unwrap().truncate(2, BoundaryCondition::Neumann).unwrap();
        let mesh = Arc::new(Mesh::new(g, 0.1).unwrap());
        let one = GraphFunction::from_fn(mesh.clone(), |_, _| 1.0);
        assert!(one.seminorm_h1sq().abs() < 1e-14);
        let k = mesh.stiffness();
        let kt = k.transpose_view().to_csr();
        assert_eq!(k, kt);
    }

    #[test]
    fn constant_powers_are_exact() {
        let g = PeriodicGraphSpec::bundled("comb").unwrap().truncate(2, BoundaryCondition::Neumann).unwrap();
        let len = g.total_length();
        let mesh = Arc::new(Mesh::new(g, 0.3).unwrap());
        let c = -1.7;
        let u = GraphFunction::from_fn(mesh, |_, _| c);
        for r in [1.0, 2.5, 3.0, 4.5, 6.0] {
            let v = u.lp_pow(r).unwrap();
            assert!((v - c.abs().powf(r) * len).abs() < 1e-12 * v);
        }
        assert!(matches!(u.lp_pow(0.5), Err(Error::InvalidParams(_))));
        let params = EnergyParams::new(5.0, 3.0, 0.7, 1.0).unwrap();
        let expect = -(c.abs().powi(5) / 5.0) * len - 0.7 * (c.abs().powi(3) / 3.0) * len;
        assert!((u.energy(&params) - expect).abs() < 1e-12 * expect.abs());
    }

    #[test]
    fn hat_seminorm() {
        let mesh = Arc::new(Mesh::with_spacing(interval(1.0, BoundaryCondition::Dirichlet), |_| 0.25).unwrap());
        let u = GraphFunction::from_fn(mesh, |_, x| 1.0 - (2.0 * x - 1.0).abs());
        assert!((u.seminorm_h1sq() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn sine_mass() {
        let mesh = Arc::new(Mesh::new(interval(1.0, BoundaryCondition::Dirichlet), 1.0 / 64.0).unwrap());
        let u = GraphFunction::from_fn(mesh, |_, x| (std::f64::consts::PI * x).sin());
        assert!((u.norm_l2sq() - 0.5).abs() < 1e-3);
        assert!((u.norm_l2sq() - u.lp_pow(2.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn preconditioner_inverts_shifted_operator() {
        for name in ["ladder", "square_grid", "comb"] {
            let g = PeriodicGraphSpec::bundled(name).unwrap().truncate(2, BoundaryCondition::Dirichlet).unwrap();
            let mesh = Mesh::new(g, 0.2).unwrap();
            let n = mesh.node_count();
            let mut r: Vec<f64> = (0..n).map(|i| ((i * 7919) % 113) as f64 / 113.0 - 0.5).collect();
            mesh.pin(&mut r);
            let x = mesh.preconditioner().solve(&r);
            let mut kx = vec![0.0; n];
            let mut mx = vec![0.0; n];
            mesh.stiff_apply(&x, &mut kx);
            mesh.mass_apply(&x, &mut mx);
            for i in 0..n {
                if mesh.is_fixed(i) {
                    assert_eq!(x[i], 0.0);
                } else {
                    assert!((kx[i] + mx[i] - r[i]).abs() < 1e-10, "{name} node {i}");
                }
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        for name in ["ladder", "square_grid"] {
            let g = PeriodicGraphSpec::bundled(name).unwrap().truncate(2, BoundaryCondition::Dirichlet).unwrap();
            let mesh = Arc::new(Mesh::new(g, 0.2).unwrap());
            let u = GraphFunction::from_fn(mesh.clone(), |e, x| (e as f64 + 1.0) * x.sin() + 0.1);
            let mut buf = Vec::new();
            u.write_csv(&mut buf).unwrap();
            let back = GraphFunction::read_csv(mesh, buf.as_slice()).unwrap();
            assert_eq!(back.values(), u.values(), "{name}");
        }
    }

    #[test]
    fn transfer_preserves_linear_functions() {
        let g = interval(2.0, BoundaryCondition::Neumann);
        let coarse = Arc::new(Mesh::new(g.clone(), 0.5).unwrap());
        let fine = Arc::new(Mesh::new(g, 0.1).unwrap());
        let u = GraphFunction::from_fn(coarse, |_, x| 3.0 * x - 1.0);
        let v = u.transfer(fine).unwrap();
        let w = GraphFunction::from_fn(v.mesh().clone(), |_, x| 3.0 * x - 1.0);
        for (a, b) in v.values().iter().zip(w.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
