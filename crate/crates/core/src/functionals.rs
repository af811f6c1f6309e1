//! Gagliardo-Nirenberg type quotients, their numerical suprema and the
//! critical masses derived from them.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BoundaryCondition, GraphPoint, PeriodicGraphSpec, DEFAULT_HALFLINE_LENGTH};
use crate::mesh::{GraphFunction, Mesh};
use crate::optim::{Objective, Settings, SphereDescent, Status};


#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "r", rename_all = "snake_case")]
pub enum QuotientKind {
    /// `‖u‖_q^q / (‖u‖₂^{(q+2)/2} ‖u'‖₂^{(q−2)/2})`.
    Gn1d(f64),
    /// `‖u‖_∞ / (‖u‖₂^{1/2} ‖u'‖₂^{1/2})`.
    GnInf,
    /// `‖u‖_r^r / (‖u'‖₂² ‖u‖₂^{r−2})`.
    Interdim(f64),
}

impl QuotientKind {
    fn validate(&self) -> Result<()> {
        match *self {
            QuotientKind::Gn1d(r) | QuotientKind::Interdim(r) if !(r > 2.0 && r.is_finite()) => {
                Err(Error::InvalidParams(format!("quotient exponent {r} must exceed 2")))
            }
            _ => Ok(()),
        }
    }
}

fn sup_node(u: &[f64]) -> (usize, f64) {
    u.iter()
        .enumerate()
        .fold((0, 0.0f64), |(bi, bv), (i, x)| if x.abs() > bv { (i, x.abs()) } else { (bi, bv) })
}

/// `log Q` and optionally its Euclidean gradient.
pub(crate) fn log_quotient(mesh: &Mesh, u: &[f64], kind: QuotientKind, grad: Option<&mut [f64]>) -> f64 {
    let (r, m_pow, s_pow) = match kind {
        QuotientKind::Gn1d(q) => (Some(q), (q + 2.0) / 4.0, (q - 2.0) / 4.0),
        QuotientKind::GnInf => (None, 0.25, 0.25),
        QuotientKind::Interdim(r) => (Some(r), (r - 2.0) / 2.0, 1.0),
    };
    let mass = mesh.mass_form(u);
    let kinetic = mesh.stiff_form(u);
    let top = match grad {
        None => match r {
            Some(r) => mesh.power(u, r, None),
            None => sup_node(u).1,
        },
        Some(g) => {
            g.fill(0.0);
            let top = match r {
                Some(r) => {
                    let a = mesh.power(u, r, Some((&mut *g, r)));
                    g.iter_mut().for_each(|x| *x /= a);
                    a
                }
                None => {
                    let (i, v) = sup_node(u);
                    g[i] = 1.0 / u[i];
                    v
                }
            };
            let mut tmp = vec![0.0; u.len()];
            mesh.mass_apply(u, &mut tmp);
            for (x, t) in g.iter_mut().zip(&tmp) {
                *x -= m_pow * 2.0 * t / mass;
            }
            mesh.stiff_apply(u, &mut tmp);
            for (x, t) in g.iter_mut().zip(&tmp) {
                *x -= s_pow * 2.0 * t / kinetic;
            }
            top
        }
    };
    top.ln() - m_pow * mass.ln() - s_pow * kinetic.ln()
}

fn quotient(u: &GraphFunction, kind: QuotientKind) -> Result<f64> {
    kind.validate()?;
    let mesh = u.mesh();
    if mesh.mass_form(u.values()) <= 0.0 || mesh.stiff_form(u.values()) <= 0.0 {
        return Err(Error::ZeroDenominator("quotient"));
    }
    Ok(log_quotient(mesh, u.values(), kind, None).exp())
}

pub fn quotient_gn1d(u: &GraphFunction, q: f64) -> Result<f64> {
    quotient(u, QuotientKind::Gn1d(q))
}

pub fn quotient_gn_inf(u: &GraphFunction) -> Result<f64> {
    quotient(u, QuotientKind::GnInf)
}

pub fn quotient_interdim(u: &GraphFunction, r: f64) -> Result<f64> {
    quotient(u, QuotientKind::Interdim(r))
}

struct NegLogQuotient<'a> {
    mesh: &'a Mesh,
    kind: QuotientKind,
}

impl Objective for NegLogQuotient<'_> {
    fn eval(&self, u: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let v = match grad {
            Some(g) => {
                let v = log_quotient(self.mesh, u, self.kind, Some(&mut *g));
                g.iter_mut().for_each(|x| *x = -*x);
                v
            }
            None => log_quotient(self.mesh, u, self.kind, None),
        };
        if v.is_nan() {
            f64::INFINITY
        } else {
            -v
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnOptions {
    pub radius: usize,
    pub h: f64,
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub tol: f64,
    pub bc: BoundaryCondition,
    pub init_width: f64,
    pub noise: f64,
    /// Rounds of local refinement around the peak (spacing divided by 4 each round).
    pub refine_rounds: usize,
    /// Re-runs the best restart at radius `n + n/2` and spacing `h/2` and reports the changes.
    pub convergence_check: bool,
    pub halfline_length: f64,
}

impl Default for GnOptions {
    fn default() -> Self {
        Self {
            radius: 8,
            h: 0.05,
            restarts: 5,
            seed: 0,
            max_iters: 20_000,
            tol: 1e-7,
            bc: BoundaryCondition::Dirichlet,
            init_width: 0.5,
            noise: 1e-3,
            refine_rounds: 0,
            convergence_check: false,
            halfline_length: DEFAULT_HALFLINE_LENGTH,
        }
    }
}

/// Where a restart starts: a cell vertex or the midpoint of a cell edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Seed {
    Vertex(usize),
    EdgeMidpoint(usize),
}

/// Restart locations cycling through vertex classes, then edge classes.
pub fn seeds(spec: &PeriodicGraphSpec, count: usize) -> Vec<Seed> {
    let all: Vec<Seed> = (0..spec.vertices.len())
        .map(Seed::Vertex)
        .chain((0..spec.edges.len()).map(Seed::EdgeMidpoint))
        .collect();
    (0..count).map(|i| all[i % all.len()]).collect()
}

pub(crate) fn seed_point(mesh: &Mesh, seed: Seed) -> Result<GraphPoint> {
    let g = mesh.graph();
    match seed {
        Seed::Vertex(v) => {
            let gv = g.find_vertex(v, [0, 0]).ok_or_else(|| Error::InvalidParams("seed vertex outside truncation".into()))?;
            let (edge, offset) = mesh.node_location(gv);
            Ok(GraphPoint { edge, offset })
        }
        Seed::EdgeMidpoint(e) => {
            let ge = g.find_edge(e, [0, 0]).ok_or_else(|| Error::InvalidParams("seed edge outside truncation".into()))?;
            Ok(GraphPoint { edge: ge, offset: 0.5 * g.edges[ge].length })
        }
    }
}

/// Gaussian bump around a point with seeded multiplicative noise.
pub(crate) fn bump(mesh: &Mesh, at: GraphPoint, width: f64, noise: f64, seed: u64) -> Vec<f64> {
    let g = mesh.graph();
    let vd = g.distances_from_point(at);
    let mut d = mesh.node_distances(&vd);
    let c = &mesh.chains()[at.edge];
    for k in 1..c.intervals {
        let x = k as f64 * c.h;
        let i = c.node(k);
        d[i] = d[i].min((x - at.offset).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u: Vec<f64> = d
        .iter()
        .map(|x| (-0.5 * (x / width).powi(2)).exp() * (1.0 + noise * rng.gen_range(-1.0..1.0)))
        .collect();
    mesh.pin(&mut u);
    u
}

const PLATEAU_WINDOW: usize = 200;

pub(crate) struct Descent {
    pub u: Vec<f64>,
    pub value: f64,
    pub status: Status,
    pub iterations: usize,
}

/// Descent on the sphere `uᵀMu = mass`, stopped once the value stalls.
pub(crate) fn descend_to_plateau(
    mesh: &Mesh,
    mass: f64,
    obj: &impl Objective,
    u0: Vec<f64>,
    max_iters: usize,
    tol: f64,
) -> Descent {
    let settings = Settings { mass, max_iters, value_tol: tol * 1e-3, grad_tol: tol };
    let descent = SphereDescent::new(mesh, mesh.preconditioner(), settings);
    // Scale-free quotients are dilation invariant on long edges, so the flow can
    // creep along a nearly flat valley; a stalled value over a window counts as converged.
    let mut anchor = f64::INFINITY;
    let out = descent.run(obj, u0, |step| {
        if step.iter % PLATEAU_WINDOW != 0 {
            return false;
        }
        let flat = anchor - step.value <= tol * step.value.abs().max(1.0);
        anchor = step.value;
        flat
    });
    let status = if out.status == Status::Stopped { Status::Converged } else { out.status };
    Descent { u: out.u, value: out.value, status, iterations: out.iterations }
}

/// Ascent of a scale-free objective from one start.
pub(crate) struct Ascent {
    pub u: GraphFunction,
    pub log_value: f64,
    pub status: Status,
    pub iterations: usize,
}

pub(crate) fn ascend(mesh: &Arc<Mesh>, kind: QuotientKind, u0: Vec<f64>, max_iters: usize, tol: f64) -> Ascent {
    let obj = NegLogQuotient { mesh, kind };
    let d = descend_to_plateau(mesh, 1.0, &obj, u0, max_iters, tol);
    Ascent { log_value: -d.value, status: d.status, iterations: d.iterations, u: GraphFunction::from_raw(mesh.clone(), d.u) }
}

/// Mesh with edges near the peak of `u` refined by 4.
fn refine_around_peak(u: &GraphFunction) -> Result<Arc<Mesh>> {
    let mesh = u.mesh();
    let sup = u.norm_linf();
    let hot: Vec<bool> = mesh
        .chains()
        .iter()
        .map(|c| c.nodes().any(|i| u.values()[i].abs() >= 0.05 * sup))
        .collect();
    let graph = mesh.graph().clone();
    let hs: Vec<f64> = mesh.chains().iter().map(|c| if hot[c.edge] { c.h / 4.0 } else { c.h }).collect();
    Ok(Arc::new(Mesh::with_spacing(graph, |e| hs[e] * (1.0 + 1e-9))?))
}

fn ascend_refined(mesh: &Arc<Mesh>, kind: QuotientKind, u0: Vec<f64>, opts: &GnOptions) -> Result<Ascent> {
    let mut best = ascend(mesh, kind, u0, opts.max_iters, opts.tol);
    for _ in 0..opts.refine_rounds {
        let fine = refine_around_peak(&best.u)?;
        let start = best.u.transfer(fine.clone())?.into_values();
        let next = ascend(&fine, kind, start, opts.max_iters, opts.tol);
        let iterations = best.iterations + next.iterations;
        best = Ascent { iterations, ..next };
    }
    Ok(best)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaximizerSnapshot {
    pub sup: f64,
    pub peak_edge: String,
    pub peak_offset: f64,
    pub participation_length: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GnProvenance {
    pub spec: String,
    pub radius: usize,
    pub h: f64,
    pub h_min: f64,
    pub bc: BoundaryCondition,
    pub nodes: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GnReport {
    pub schema_version: u32,
    pub kind: QuotientKind,
    /// Best value found; a lower bound for the supremum.
    pub constant: f64,
    pub restart_values: Vec<f64>,
    pub restart_iterations: Vec<usize>,
    pub best_restart: usize,
    pub all_converged: bool,
    pub critical_mass: Option<f64>,
    pub maximizer: MaximizerSnapshot,
    pub provenance: GnProvenance,
    pub delta_radius: Option<f64>,
    pub delta_h: Option<f64>,
    pub note: String,
    #[serde(skip)]
    pub maximizer_function: Option<GraphFunction>,
}

/// Critical mass implied by a constant: `sqrt(3/C)` for the sextic 1-d quotient,
/// `(r / 2K)^{2/(r−2)}` for the inter-dimensional one.
pub fn critical_mass_from_constant(kind: QuotientKind, constant: f64) -> Option<f64> {
    match kind {
        QuotientKind::Gn1d(q) if q == 6.0 => Some((3.0 / constant).sqrt()),
        QuotientKind::Interdim(r) => Some((r / (2.0 * constant)).powf(2.0 / (r - 2.0))),
        _ => None,
    }
}

fn snapshot(u: &GraphFunction) -> MaximizerSnapshot {
    let (i, sup) = sup_node(u.values());
    let (edge, offset) = u.mesh().node_location(i);
    MaximizerSnapshot {
        sup,
        peak_edge: u.mesh().graph().edges[edge].id.clone(),
        peak_offset: offset,
        participation_length: u.participation_length(),
    }
}

/// Best ascent from all restart seeds on an existing mesh of a truncation of `spec`.
pub(crate) fn maximize_on_mesh(
    spec: &PeriodicGraphSpec,
    mesh: &Arc<Mesh>,
    kind: QuotientKind,
    opts: &GnOptions,
) -> Result<(Vec<Ascent>, usize)> {
    let starts = seeds(spec, opts.restarts.max(1));
    let runs: Vec<Result<Ascent>> = starts
        .par_iter()
        .enumerate()
        .map(|(i, &s)| {
            let at = seed_point(mesh, s)?;
            let u0 = bump(mesh, at, opts.init_width, opts.noise, opts.seed.wrapping_add(i as u64));
            ascend_refined(mesh, kind, u0, opts)
        })
        .collect();
    let runs: Vec<Ascent> = runs.into_iter().collect::<Result<_>>()?;
    let best = (0..runs.len())
        .max_by(|&a, &b| runs[a].log_value.total_cmp(&runs[b].log_value).then(b.cmp(&a)))
        .expect("at least one restart");
    Ok((runs, best))
}

/// Maximizes a quotient over functions on a truncation of `spec`.
pub fn maximize_quotient(spec: &PeriodicGraphSpec, kind: QuotientKind, opts: &GnOptions) -> Result<GnReport> {
    kind.validate()?;
    if !(opts.h > 0.0) {
        return Err(Error::InvalidParams("h must be positive".into()));
    }
    let spec = spec.canonicalized()?;
    let graph = spec.truncate_with(opts.radius, opts.bc, opts.halfline_length)?;
    let mesh = Arc::new(Mesh::new(graph, opts.h)?);
    let (runs, best) = maximize_on_mesh(&spec, &mesh, kind, opts)?;
    let constant = runs[best].log_value.exp();
    let starts = seeds(&spec, opts.restarts.max(1));

    let (mut delta_radius, mut delta_h) = (None, None);
    if opts.convergence_check {
        let rerun = |radius: usize, h: f64| -> Result<f64> {
            let g = spec.truncate_with(radius, opts.bc, opts.halfline_length)?;
            let m = Arc::new(Mesh::new(g, h)?);
            let at = seed_point(&m, starts[best])?;
            let u0 = bump(&m, at, opts.init_width, opts.noise, opts.seed.wrapping_add(best as u64));
            Ok(ascend_refined(&m, kind, u0, opts)?.log_value.exp())
        };
        delta_radius = Some(rerun(opts.radius + (opts.radius / 2).max(1), opts.h)? - constant);
        delta_h = Some(rerun(opts.radius, opts.h / 2.0)? - constant);
    }
    let u = &runs[best].u;
    Ok(GnReport {
        schema_version: 1,
        kind,
        constant,
        restart_values: runs.iter().map(|r| r.log_value.exp()).collect(),
        restart_iterations: runs.iter().map(|r| r.iterations).collect(),
        best_restart: best,
        all_converged: runs.iter().all(|r| r.status == Status::Converged),
        critical_mass: critical_mass_from_constant(kind, constant),
        maximizer: snapshot(u),
        provenance: GnProvenance {
            spec: spec.name.clone(),
            radius: opts.radius,
            h: opts.h,
            h_min: u.mesh().h_min(),
            bc: opts.bc,
            nodes: u.mesh().node_count(),
            seed: opts.seed,
        },
        delta_radius,
        delta_h,
        note: "constant is the best value found, a lower bound for the supremum; no upper bound is certified".into(),
        maximizer_function: Some(u.clone()),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalMass {
    pub r: f64,
    pub mass: f64,
    pub constant: f64,
    /// `[mass from constant + |deltas|, mass]`; the constant is a lower bound,
    /// so the mass is an upper-side estimate.
    pub bracket: [f64; 2],
    pub report: GnReport,
}

/// `μ_6 = sqrt(3/C_6)` for `r = 6`, `μ_r = (r/2K_r)^{2/(r−2)}` for `r ∈ [4, 6)`.
pub fn critical_mass_homogeneous(spec: &PeriodicGraphSpec, r: f64, opts: &GnOptions) -> Result<CriticalMass> {
    if !(4.0..=6.0).contains(&r) {
        return Err(Error::InvalidParams(format!("r = {r} must lie in [4, 6]")));
    }
    let kind = if r == 6.0 {
        QuotientKind::Gn1d(6.0)
    } else {
        if spec.dim != 2 {
            return Err(Error::InvalidParams("r < 6 needs a 2-periodic spec".into()));
        }
        QuotientKind::Interdim(r)
    };
    let report = maximize_quotient(spec, kind, opts)?;
    let constant = report.constant;
    let mass = critical_mass_from_constant(kind, constant).expect("kind has a critical mass");
    let slack = report.delta_radius.unwrap_or(0.0).abs() + report.delta_h.unwrap_or(0.0).abs();
    let lo = critical_mass_from_constant(kind, constant + slack).expect("kind has a critical mass");
    Ok(CriticalMass { r, mass, constant, bracket: [lo, mass], report })
}
