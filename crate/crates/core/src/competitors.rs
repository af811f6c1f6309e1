//! Explicit trial functions: line solitons, boundary-distance tents and
//! solitons squeezed onto a single edge.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::graph::{BoundaryCondition, MetricGraph, PeriodicGraphSpec};
use crate::mesh::{EnergyParams, GraphFunction, Mesh};

/// How a soliton is pinned down: by its mass or by its frequency `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolitonScale {
    Mass(f64),
    Frequency(f64),
}

/// Positive even solution of `−φ'' + λφ = φ^{p−1}` on the line,
/// `φ(x) = a sech^{2/(p−2)}(b x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Soliton {
    pub p: f64,
    pub lambda: f64,
    pub amplitude: f64,
    pub rate: f64,
}

/// `m(λ) = c_p λ^{2/(p−2) − 1/2}`; returns `c_p`.
fn mass_coefficient(p: f64) -> f64 {
    let s = 2.0 / (p - 2.0);
    // ∫ sech^{2s}(y) dy = B(s, 1/2).
    let beta = (ln_gamma(s) + ln_gamma(0.5) - ln_gamma(s + 0.5)).exp();
    (p / 2.0).powf(s) * 2.0 / (p - 2.0) * beta
}

impl Soliton {
    pub fn new(p: f64, scale: SolitonScale) -> Result<Self> {
        if !(p > 2.0 && p <= 6.0) {
            return Err(Error::InvalidParams(format!("soliton exponent p = {p} must lie in (2, 6]")));
        }
        let lambda = match scale {
            SolitonScale::Frequency(l) if l > 0.0 && l.is_finite() => l,
            SolitonScale::Mass(m) if m > 0.0 && m.is_finite() => {
                let exponent = 2.0 / (p - 2.0) - 0.5;
                let c = mass_coefficient(p);
                if exponent.abs() < 1e-12 {
                    if (m - c).abs() > 1e-9 * c {
                        return Err(Error::InvalidParams(format!(
                            "at p = 6 every soliton has mass {c}, not {m}"
                        )));
                    }
                    1.0
                } else {
                    (m / c).powf(1.0 / exponent)
                }
            }
            _ => return Err(Error::InvalidParams("soliton scale must be positive".into())),
        };
        Ok(Self {
            p,
            lambda,
            amplitude: (p * lambda / 2.0).powf(1.0 / (p - 2.0)),
            rate: (p - 2.0) * lambda.sqrt() / 2.0,
        })
    }

    pub fn value(&self, x: f64) -> f64 {
        self.amplitude * (1.0 / (self.rate * x).cosh()).powf(2.0 / (self.p - 2.0))
    }

    pub fn mass(&self) -> f64 {
        mass_coefficient(self.p) * self.lambda.powf(2.0 / (self.p - 2.0) - 0.5)
    }

    /// Samples the soliton centred on a Dirichlet interval of the given length.
    pub fn on_line(&self, length: f64, h: f64) -> Result<GraphFunction> {
        let mesh = Arc::new(Mesh::new(MetricGraph::interval(length, BoundaryCondition::Dirichlet), h)?);
        Ok(GraphFunction::from_fn(mesh, |_, x| self.value(x - 0.5 * length)))
    }
}

/// Soliton on a line proxy together with its frequency.
pub fn soliton(p: f64, scale: SolitonScale, length: f64, h: f64) -> Result<(GraphFunction, f64)> {
    let s = Soliton::new(p, scale)?;
    Ok((s.on_line(length, h)?, s.lambda))
}

/// Boundary-distance tent with its normalization data.
#[derive(Debug, Clone)]
pub struct Tent {
    pub function: GraphFunction,
    pub n: usize,
    /// Sup of the normalized tent.
    pub epsilon: f64,
    pub max_distance: f64,
}

/// `u_n = ε_n d(x) / max d` on `B_{2n}`, where `d` is the distance to the
/// boundary of the truncation and `ε_n` fixes the mass.
pub fn tent_competitor(spec: &PeriodicGraphSpec, n: usize, mu: f64, h: f64) -> Result<Tent> {
    if spec.dim == 0 {
        return Err(Error::InvalidParams("tents need a periodic spec".into()));
    }
    if !spec.is_canonical() {
        return Err(Error::NotCanonical(spec.name.clone()));
    }
    if n < 1 {
        return Err(Error::InvalidParams("tent radius must be at least 1".into()));
    }
    if !(mu > 0.0) {
        return Err(Error::InvalidParams("mass must be positive".into()));
    }
    let graph = spec.truncate(2 * n, BoundaryCondition::Dirichlet)?;
    let vd = graph.boundary_distances();
    let mesh = Arc::new(Mesh::new(graph, h)?);
    let d = mesh.node_distances(&vd);
    let max_distance = d.iter().cloned().fold(0.0, f64::max);
    let unit = GraphFunction::new(mesh, d.iter().map(|x| x / max_distance).collect())?;
    let m = unit.norm_l2sq();
    let epsilon = (mu / m).sqrt();
    Ok(Tent { function: unit.scaled(epsilon), n, epsilon, max_distance })
}

/// Critical soliton `√λ φ(λx)` centred on one edge, with its endpoint value
/// subtracted so that it vanishes at both ends, normalized to `mass`.
pub fn edge_soliton_competitor(mesh: &Arc<Mesh>, edge: usize, lambda: f64, mass: f64) -> Result<GraphFunction> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParams(format!("lambda = {lambda} must be positive")));
    }
    let e = mesh.graph().edges.get(edge).ok_or_else(|| Error::InvalidParams(format!("no edge {edge}")))?;
    let len = e.length;
    let phi = Soliton::new(6.0, SolitonScale::Frequency(1.0))?;
    let scaled = |x: f64| lambda.sqrt() * phi.value(lambda * x);
    let floor = scaled(0.5 * len);
    let mut values = vec![0.0; mesh.node_count()];
    let c = &mesh.chains()[edge];
    for k in 1..c.intervals {
        values[c.node(k)] = (scaled(k as f64 * c.h - 0.5 * len) - floor).max(0.0);
    }
    GraphFunction::new(mesh.clone(), values)?.normalized(mass)
}

/// Energies of edge solitons on an isolated edge for a list of frequencies.
/// Each uses a mesh resolving the soliton width.
pub fn edge_soliton_energies(length: f64, lambdas: &[f64], mass: f64, params: &EnergyParams) -> Result<Vec<(f64, f64)>> {
    lambdas
        .iter()
        .map(|&l| {
            let h = (length / 64.0).min(1.0 / (40.0 * l));
            let mesh = Arc::new(Mesh::new(MetricGraph::interval(length, BoundaryCondition::Dirichlet), h)?);
            let u = edge_soliton_competitor(&mesh, 0, l, mass)?;
            Ok((l, u.energy(params)))
        })
        .collect()
}
