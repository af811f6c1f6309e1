//! Mass-constrained energy minimization and regime classification.

use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::competitors::{edge_soliton_energies, tent_competitor};
use crate::error::{Error, Result};
use crate::graph::{BoundaryCondition, MetricGraph, PeriodicGraphSpec, DEFAULT_HALFLINE_LENGTH};
use crate::mesh::{energy_gradient, EnergyParams, GraphFunction, Mesh, Residual};
use crate::optim::{Objective, Settings, SphereDescent, Status};
use crate::thresholds::{estimate_big_f_inf, ThresholdOptions};

/// Starting point of a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InitialGuess {
    /// `exp(−d²/2w²)` in graph distance `d` from a vertex copy.
    Gaussian {
        /// Cell vertex id; defaults to the first vertex.
        #[serde(default)]
        center: Option<String>,
        #[serde(default)]
        cell: [i64; 2],
        /// Defaults to twice the mean cell edge length.
        #[serde(default)]
        width: Option<f64>,
    },
    /// Distance to the truncation boundary.
    Tent,
    /// Nodal values from a function CSV written on the same graph.
    File { path: PathBuf },
}

impl Default for InitialGuess {
    fn default() -> Self {
        Self::Gaussian { center: None, cell: [0, 0], width: None }
    }
}

/// Truncation radii used for periodic specs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadiusSchedule {
    Fixed(usize),
    /// Doubling from `start` up to `max`; `max = None` means 64 in one dimension and 16 in two.
    Doubling { start: usize, max: Option<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub max_iters: usize,
    pub energy_tol: f64,
    pub residual_tol: f64,
    pub vanish_sup_ratio: f64,
    pub blowup_grad_ratio: f64,
    /// Blow-up is also declared once the concentration length `‖u‖₂/‖u'‖₂`
    /// drops below this many mesh spacings with negative energy.
    pub collapse_mesh_factor: f64,
    /// A state whose participation length exceeds this fraction of the graph
    /// length counts as spread over the whole truncation.
    pub delocalized_fraction: f64,
    pub seed: u64,
    /// Relative amplitude of the seeded multiplicative perturbation of the initial guess.
    pub noise: f64,
    pub initial: InitialGuess,
    pub h: f64,
    /// Spacing for a final warm-started solve on the chosen truncation.
    pub refine_h: Option<f64>,
    pub bc: BoundaryCondition,
    pub radius: RadiusSchedule,
    /// Relative energy change between consecutive radii that ends the schedule.
    pub radius_tol: f64,
    pub halfline_length: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            energy_tol: 1e-10,
            residual_tol: 1e-6,
            vanish_sup_ratio: 1e-3,
            blowup_grad_ratio: 1e4,
            collapse_mesh_factor: 4.0,
            delocalized_fraction: 0.2,
            seed: 0,
            noise: 1e-3,
            initial: InitialGuess::default(),
            h: 0.05,
            refine_h: None,
            bc: BoundaryCondition::Dirichlet,
            radius: RadiusSchedule::Doubling { start: 4, max: None },
            radius_tol: 1e-9,
            halfline_length: DEFAULT_HALFLINE_LENGTH,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("energy_tol", self.energy_tol),
            ("residual_tol", self.residual_tol),
            ("vanish_sup_ratio", self.vanish_sup_ratio),
            ("blowup_grad_ratio", self.blowup_grad_ratio),
            ("h", self.h),
            ("radius_tol", self.radius_tol),
            ("halfline_length", self.halfline_length),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} must be positive")));
            }
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidParams("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Converged,
    Vanishing,
    Blowup,
    Maxiter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupHistory {
    pub initial: f64,
    pub last: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusRecord {
    pub radius: usize,
    pub energy: f64,
    pub classification: Classification,
    pub iterations: usize,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveProvenance {
    pub graph: String,
    pub radius: Option<usize>,
    pub h: f64,
    pub bc: BoundaryCondition,
    pub nodes: usize,
    pub total_length: f64,
    pub schedule: Vec<RadiusRecord>,
    pub radius_converged: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveResult {
    pub classification: Classification,
    pub energy: f64,
    pub lambda: f64,
    pub residual: Residual,
    /// Relative dual norm of the discrete constrained gradient.
    pub stationarity: f64,
    pub iterations: usize,
    pub mass: f64,
    pub kinetic: f64,
    pub participation_length: f64,
    pub sup: SupHistory,
    /// The converged state fills a sizeable part of the truncation.
    pub truncation_limited: bool,
    pub flags: Vec<String>,
    pub provenance: SolveProvenance,
    #[serde(skip)]
    pub function: GraphFunction,
}

/// Where to solve: a periodic spec (truncated per the schedule) or a finite graph.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Spec(&'a PeriodicGraphSpec),
    Graph(&'a MetricGraph),
}

impl<'a> From<&'a PeriodicGraphSpec> for Target<'a> {
    fn from(s: &'a PeriodicGraphSpec) -> Self {
        Target::Spec(s)
    }
}

impl<'a> From<&'a MetricGraph> for Target<'a> {
    fn from(g: &'a MetricGraph) -> Self {
        Target::Graph(g)
    }
}

pub(crate) struct EnergyObjective<'a> {
    pub mesh: &'a Mesh,
    pub params: EnergyParams,
}

impl Objective for EnergyObjective<'_> {
    fn eval(&self, u: &[f64], grad: Option<&mut [f64]>) -> f64 {
        match grad {
            Some(g) => energy_gradient(self.mesh, u, &self.params, g),
            None => crate::mesh::energy_parts(self.mesh, u, &self.params).energy(&self.params),
        }
    }
}

/// Flags for masses at the edge of what a finite discretization can decide.
fn borderline_flags(params: &EnergyParams, tilde_mu: Option<f64>) -> Vec<String> {
    let mut flags = Vec::new();
    if params.p == 6.0 {
        let near = [crate::graph::MU_LINE]
            .iter()
            .chain(tilde_mu.as_ref())
            .any(|t| (params.mu - t).abs() <= 1e-2 * t);
        if near {
            flags.push("borderline_critical_mass_beyond_resolution".to_string());
        }
    }
    flags
}

/// Gaussian in graph distance from a mesh node.
fn gaussian(mesh: &Mesh, center: usize, width: f64) -> Vec<f64> {
    let graph = mesh.graph();
    let nv = graph.vertices.len();
    let d = if center < nv {
        mesh.node_distances(&graph.vertex_distances(&[(center, 0.0)]))
    } else {
        let (edge, t) = mesh.node_location(center);
        let e = &graph.edges[edge];
        let mut d = mesh.node_distances(&graph.vertex_distances(&[(e.from, t), (e.to, e.length - t)]));
        let c = &mesh.chains()[edge];
        for k in 1..c.intervals {
            let x = k as f64 * c.h;
            let i = c.node(k);
            d[i] = d[i].min((x - t).abs());
        }
        d
    };
    let mut u: Vec<f64> = d.iter().map(|x| (-0.5 * (x / width).powi(2)).exp()).collect();
    mesh.pin(&mut u);
    u
}

fn default_center(mesh: &Mesh) -> usize {
    let graph = mesh.graph();
    graph.find_vertex(0, [0, 0]).unwrap_or_else(|| {
        // Plain graphs: the mesh node farthest from the boundary.
        let far = mesh.node_distances(&graph.boundary_distances());
        (0..far.len()).max_by(|&a, &b| far[a].total_cmp(&far[b]).then(b.cmp(&a))).unwrap_or(0)
    })
}

fn initial_values(
    mesh: &Arc<Mesh>,
    spec: Option<&PeriodicGraphSpec>,
    opts: &SolveOptions,
) -> Result<Vec<f64>> {
    let graph = mesh.graph();
    let mut u = match &opts.initial {
        InitialGuess::Gaussian { center, cell, width } => {
            let c = match (center, spec) {
                (Some(id), Some(spec)) => {
                    let k = spec.vertices.iter().position(|v| &v.id == id).ok_or_else(|| Error::UnknownVertex(id.clone()))?;
                    graph
                        .find_vertex(k, *cell)
                        .ok_or_else(|| Error::InvalidParams(format!("vertex `{id}` in cell {cell:?} is outside the truncation")))?
                }
                (Some(id), None) => graph
                    .vertices
                    .iter()
                    .position(|v| &v.id == id)
                    .ok_or_else(|| Error::UnknownVertex(id.clone()))?,
                (None, Some(spec)) => graph.find_vertex(0, *cell).ok_or_else(|| {
                    Error::InvalidParams(format!("cell {cell:?} is outside the truncation of `{}`", spec.name))
                })?,
                (None, None) => default_center(mesh),
            };
            let w = width.unwrap_or_else(|| {
                let lens: Vec<f64> = match spec {
                    Some(s) => s.edges.iter().filter(|e| !e.is_halfline()).map(|e| e.length).collect(),
                    None => graph.edges.iter().map(|e| e.length).collect(),
                };
                if lens.is_empty() {
                    2.0
                } else {
                    (2.0 * lens.iter().sum::<f64>() / lens.len() as f64).min(0.25 * graph.total_length())
                }
            });
            gaussian(mesh, c, w)
        }
        InitialGuess::Tent => {
            let vd = graph.boundary_distances();
            let mut u = mesh.node_distances(&vd);
            if u.iter().any(|x| !x.is_finite()) {
                u = vec![1.0; mesh.node_count()];
            }
            mesh.pin(&mut u);
            u
        }
        InitialGuess::File { path } => {
            let f = std::fs::File::open(path)?;
            GraphFunction::read_csv(mesh.clone(), std::io::BufReader::new(f))?.into_values()
        }
    };
    if opts.noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for x in &mut u {
            *x *= 1.0 + opts.noise * rng.gen_range(-1.0..1.0);
        }
    }
    if mesh.mass_form(&u) <= 0.0 {
        return Err(Error::InvalidParams("initial guess vanishes".into()));
    }
    Ok(u)
}

struct Run {
    classification: Classification,
    function: GraphFunction,
    energy: f64,
    iterations: usize,
    stationarity: f64,
    sup: SupHistory,
    truncation_limited: bool,
}

const STATIONARITY_FACTOR: f64 = 1e-2;

fn run_flow(mesh: &Arc<Mesh>, u0: Vec<f64>, params: &EnergyParams, opts: &SolveOptions) -> Run {
    let settings = Settings {
        mass: params.mu,
        max_iters: opts.max_iters,
        value_tol: opts.energy_tol,
        // Stationarity is measured in the dual H¹ norm, which the strong-form
        // edge residual can exceed by orders of magnitude.
        grad_tol: STATIONARITY_FACTOR * opts.residual_tol,
    };
    let solver = mesh.preconditioner();
    let descent = SphereDescent::new(mesh, solver, settings);
    let obj = EnergyObjective { mesh, params: *params };
    let scale = params.mu / mesh.mass_form(&u0);
    let sup0 = u0.iter().fold(0.0f64, |m, x| m.max(x.abs())) * scale.sqrt();
    let kinetic0 = mesh.stiff_form(&u0) * scale;
    let mut sup = SupHistory { initial: sup0, last: sup0, min: sup0, max: sup0 };
    let mut blowup = false;
    let armed = params.p == 6.0;
    let ratio_sq = opts.blowup_grad_ratio.powi(2);
    let collapse = opts.collapse_mesh_factor * mesh.h_min();
    let outcome = descent.run(&obj, u0, |step| {
        let s = step.u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        sup.last = s;
        sup.min = sup.min.min(s);
        sup.max = sup.max.max(s);
        if armed && step.value < 0.0 {
            let kinetic = mesh.stiff_form(step.u);
            if kinetic >= ratio_sq * kinetic0 || (params.mu / kinetic).sqrt() <= collapse {
                blowup = true;
            }
        }
        blowup
    });
    let function = GraphFunction::from_raw(mesh.clone(), outcome.u);
    let energy = outcome.value;
    let delocalized = function.participation_length() >= opts.delocalized_fraction * mesh.total_length();
    let dropped = sup.last <= opts.vanish_sup_ratio * sup.initial;
    let negative = energy < -10.0 * opts.energy_tol;
    let classification = if blowup {
        Classification::Blowup
    } else if negative {
        if outcome.status == Status::Converged {
            Classification::Converged
        } else {
            Classification::Maxiter
        }
    } else if delocalized || dropped {
        Classification::Vanishing
    } else {
        Classification::Maxiter
    };
    Run {
        classification,
        function,
        energy,
        iterations: outcome.iterations,
        stationarity: outcome.stationarity,
        sup,
        truncation_limited: classification == Classification::Converged && delocalized,
    }
}

fn finish(run: Run, params: &EnergyParams, opts: &SolveOptions, mut provenance: SolveProvenance, flags: Vec<String>) -> SolveResult {
    let f = run.function;
    let lambda = f.lambda(params);
    provenance.nodes = f.mesh().node_count();
    provenance.total_length = f.mesh().total_length();
    provenance.h = f.mesh().h_max();
    provenance.seed = opts.seed;
    SolveResult {
        classification: run.classification,
        energy: run.energy,
        lambda,
        residual: f.residual(lambda, params),
        stationarity: run.stationarity,
        iterations: run.iterations,
        mass: f.norm_l2sq(),
        kinetic: f.seminorm_h1sq(),
        participation_length: f.participation_length(),
        sup: run.sup,
        truncation_limited: run.truncation_limited,
        flags,
        provenance,
        function: f,
    }
}

/// Minimizes the energy on the sphere `‖u‖₂² = μ`.
///
/// Periodic specs are truncated with Dirichlet (default) or Neumann boundary
/// conditions at growing radii until the energy settles, the state vanishes on
/// two consecutive radii, or the flow blows up.
pub fn solve_ground_state<'a>(target: impl Into<Target<'a>>, params: &EnergyParams, opts: &SolveOptions) -> Result<SolveResult> {
    opts.validate()?;
    match target.into() {
        Target::Graph(graph) => {
            let mesh = Arc::new(Mesh::new(graph.clone(), opts.h)?);
            let u0 = initial_values(&mesh, None, opts)?;
            let mut run = run_flow(&mesh, u0, params, opts);
            if let Some(h) = opts.refine_h {
                run = refine(run, h, params, opts)?;
            }
            let provenance = SolveProvenance {
                graph: graph.provenance.spec.clone(),
                radius: graph.provenance.radius,
                h: opts.h,
                bc: graph.bc(),
                nodes: 0,
                total_length: 0.0,
                schedule: Vec::new(),
                radius_converged: true,
                seed: opts.seed,
            };
            Ok(finish(run, params, opts, provenance, borderline_flags(params, None)))
        }
        Target::Spec(spec) => solve_spec(spec, params, opts),
    }
}

fn refine(run: Run, h: f64, params: &EnergyParams, opts: &SolveOptions) -> Result<Run> {
    if run.classification != Classification::Converged {
        return Ok(run);
    }
    let mesh = Arc::new(Mesh::new(run.function.mesh().graph().clone(), h)?);
    let u0 = run.function.transfer(mesh.clone())?.into_values();
    let mut next = run_flow(&mesh, u0, params, opts);
    next.iterations += run.iterations;
    next.sup.initial = run.sup.initial;
    Ok(next)
}

fn solve_spec(spec: &PeriodicGraphSpec, params: &EnergyParams, opts: &SolveOptions) -> Result<SolveResult> {
    let spec = spec.canonicalized()?;
    let flags = borderline_flags(params, Some(spec.tilde_mu()));
    let radii: Vec<usize> = match (spec.dim, opts.radius) {
        (0, _) => vec![0],
        (_, RadiusSchedule::Fixed(n)) => vec![n],
        (d, RadiusSchedule::Doubling { start, max }) => {
            let max = max.unwrap_or(if d == 1 { 64 } else { 16 });
            let mut v = vec![start.max(1)];
            while v.last().unwrap() * 2 <= max {
                v.push(v.last().unwrap() * 2);
            }
            v
        }
    };
    let mut schedule: Vec<RadiusRecord> = Vec::new();
    let mut best: Option<(Run, usize)> = None;
    let mut settled = false;
    for &n in &radii {
        let graph = spec.truncate_with(n, opts.bc, opts.halfline_length)?;
        let mesh = Arc::new(Mesh::new(graph, opts.h)?);
        let u0 = initial_values(&mesh, Some(&spec), opts)?;
        let run = run_flow(&mesh, u0, params, opts);
        let record = RadiusRecord {
            radius: n,
            energy: run.energy,
            classification: run.classification,
            iterations: run.iterations,
            nodes: mesh.node_count(),
        };
        let prev = schedule.last().cloned();
        schedule.push(record.clone());
        best = Some((run, n));
        match record.classification {
            Classification::Blowup => {
                settled = true;
                break;
            }
            Classification::Converged => {
                let limited = best.as_ref().map(|(r, _)| r.truncation_limited).unwrap_or(false);
                if let Some(p) = prev {
                    let change = (p.energy - record.energy).abs() / record.energy.abs().max(f64::MIN_POSITIVE);
                    if p.classification == Classification::Converged && !limited && change <= opts.radius_tol {
                        settled = true;
                        break;
                    }
                }
            }
            // Wide ground states spread out in small boxes, so vanishing never
            // ends the schedule early.
            Classification::Vanishing | Classification::Maxiter => {}
        }
    }
    if !settled {
        let last: Vec<_> = schedule.iter().rev().take(2).collect();
        settled = last.len() == 2 && last.iter().all(|r| r.classification == Classification::Vanishing);
    }
    let (mut run, n) = best.expect("at least one radius");
    if let Some(h) = opts.refine_h {
        run = refine(run, h, params, opts)?;
    }
    let provenance = SolveProvenance {
        graph: spec.name.clone(),
        radius: (spec.dim > 0).then_some(n),
        h: opts.h,
        bc: opts.bc,
        nodes: 0,
        total_length: 0.0,
        schedule,
        radius_converged: settled || spec.dim == 0,
        seed: opts.seed,
    };
    Ok(finish(run, params, opts, provenance, flags))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    NegativeEnergyGroundState,
    ZeroLevelVanishing,
    UnboundedBelow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: String,
    pub parameter: f64,
    pub energy: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    pub regime: Regime,
    pub solve: SolveResult,
    pub certificates: Vec<Certificate>,
    pub flags: Vec<String>,
}

/// Energies of admissible trial functions at mass `μ`: distance tents over
/// growing radii and, at the critical power, edge solitons of growing frequency.
pub fn competitor_certificates(spec: &PeriodicGraphSpec, params: &EnergyParams, h: f64) -> Result<Vec<Certificate>> {
    let mut out = Vec::new();
    if spec.dim > 0 {
        let spec = spec.canonicalized()?;
        let radii: &[usize] = if spec.dim == 1 { &[1, 2, 4, 8, 16, 32] } else { &[1, 2, 4, 8, 16] };
        for &n in radii {
            let t = tent_competitor(&spec, n, params.mu, h.max(0.05))?;
            let mass = t.function.norm_l2sq();
            debug_assert!((mass - params.mu).abs() <= 1e-10 * params.mu);
            out.push(Certificate { kind: "tent".into(), parameter: n as f64, energy: t.function.energy(params), mass });
        }
    }
    if params.p == 6.0 {
        let len = spec.edges.iter().filter(|e| !e.is_halfline()).map(|e| e.length).fold(f64::INFINITY, f64::min);
        let len = if len.is_finite() { len } else { 1.0 };
        for (l, e) in edge_soliton_energies(len, &[1.0, 4.0, 16.0, 64.0, 256.0], params.mu, params)? {
            out.push(Certificate { kind: "edge_soliton".into(), parameter: l, energy: e, mass: params.mu });
        }
    }
    Ok(out)
}

/// Flow result combined with competitor certificates.
///
/// In two dimensions below the critical power a spread-out start can settle on
/// the zero-level branch while a concentrated state of negative energy exists.
/// When the flow does not reach a negative level, `inf F` is minimized on the
/// same truncation; a negative value is recorded as a certificate and the flow
/// is restarted from that minimizer.
pub fn classify_regime(spec: &PeriodicGraphSpec, params: &EnergyParams, opts: &SolveOptions) -> Result<RegimeReport> {
    let mut solve = solve_ground_state(spec, params, opts)?;
    let mut certificates = competitor_certificates(spec, params, opts.h)?;
    let neg = -10.0 * opts.energy_tol;
    let reached = solve.classification == Classification::Converged && solve.energy < neg;
    if spec.dim > 0 && params.p < 6.0 && !reached && solve.classification != Classification::Blowup {
        if let Some(radius) = solve.provenance.radius {
            concentrated_restart(spec, params, opts, radius, &mut solve, &mut certificates)?;
        }
    }
    let solitons: Vec<f64> = certificates.iter().filter(|c| c.kind == "edge_soliton").map(|c| c.energy).collect();
    let soliton_diverges = solitons.len() > 1
        && solitons.windows(2).all(|w| w[1] < w[0])
        && solitons.last().map(|&e| e < -1e3).unwrap_or(false);
    let regime = if params.p == 6.0 && (solve.classification == Classification::Blowup || soliton_diverges) {
        Regime::UnboundedBelow
    } else if (solve.classification == Classification::Converged && solve.energy < neg)
        || certificates.iter().any(|c| c.energy < neg)
    {
        Regime::NegativeEnergyGroundState
    } else {
        Regime::ZeroLevelVanishing
    };
    let flags = solve.flags.clone();
    Ok(RegimeReport { regime, solve, certificates, flags })
}

fn concentrated_restart(
    spec: &PeriodicGraphSpec,
    params: &EnergyParams,
    opts: &SolveOptions,
    radius: usize,
    solve: &mut SolveResult,
    certificates: &mut Vec<Certificate>,
) -> Result<()> {
    let topts = ThresholdOptions {
        radius,
        h: opts.h,
        bc: opts.bc,
        seed: opts.seed,
        halfline_length: opts.halfline_length,
        solve: opts.clone(),
        ..Default::default()
    };
    let est = estimate_big_f_inf(spec, params.mu, params, &topts)?;
    if !(est.value < 0.0) {
        return Ok(());
    }
    let u = est.function.normalized(params.mu)?;
    certificates.push(Certificate {
        kind: "big_f_minimizer".into(),
        parameter: est.value,
        energy: u.energy(params),
        mass: u.norm_l2sq(),
    });
    let mesh = u.mesh().clone();
    let run = run_flow(&mesh, u.into_values(), params, opts);
    if run.energy < solve.energy && run.classification != Classification::Maxiter {
        let mut flags = solve.flags.clone();
        flags.push("concentrated_restart".into());
        let mut provenance = solve.provenance.clone();
        provenance.radius = Some(radius);
        *solve = finish(run, params, opts, provenance, flags);
    }
    Ok(())
}
