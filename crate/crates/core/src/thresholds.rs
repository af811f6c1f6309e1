//! Critical mass of the combined problem and the defocusing threshold.
//!
//! With `Q_r` the inter-dimensional quotient, the energy factors as
//! `E(u) = ½‖u'‖² F(u, ‖u‖₂²)` where
//! `F(u, μ) = 1 − (2/p) Q_p(u) μ^{(p−2)/2} − (2α/q) Q_q(u) μ^{(q−2)/2}`,
//! so the sign of `inf_u F(·, μ)` decides whether the ground state level is negative.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{
    bump, critical_mass_from_constant, descend_to_plateau, log_quotient, maximize_on_mesh, seed_point, seeds, Ascent,
    GnOptions, QuotientKind,
};
use crate::graph::{BoundaryCondition, PeriodicGraphSpec, DEFAULT_HALFLINE_LENGTH};
use crate::mesh::{dot, EnergyParams, GraphFunction, Mesh};
use crate::minimize::{classify_regime, Classification, Regime, SolveOptions};
use crate::optim::{Objective, Status};

/// `F(u, μ)`; `u` must have positive mass and seminorm.
pub fn big_f(u: &GraphFunction, mu: f64, params: &EnergyParams) -> Result<f64> {
    let (a, b) = f_weights(mu, params);
    let qp = crate::functionals::quotient_interdim(u, params.p)?;
    let qq = if b == 0.0 { 0.0 } else { crate::functionals::quotient_interdim(u, params.q)? };
    Ok(1.0 - a * qp - b * qq)
}

/// Coefficients of `Q_p` and `Q_q` in `F`.
fn f_weights(mu: f64, params: &EnergyParams) -> (f64, f64) {
    let a = 2.0 / params.p * mu.powf((params.p - 2.0) / 2.0);
    let b = 2.0 * params.alpha / params.q * mu.powf((params.q - 2.0) / 2.0);
    (a, b)
}

struct BigF<'a> {
    mesh: &'a Mesh,
    p: f64,
    q: f64,
    a: f64,
    b: f64,
}

impl Objective for BigF<'_> {
    fn eval(&self, u: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let n = u.len();
        let v = match grad {
            None => {
                let qp = log_quotient(self.mesh, u, QuotientKind::Interdim(self.p), None).exp();
                let qq = if self.b == 0.0 { 0.0 } else { log_quotient(self.mesh, u, QuotientKind::Interdim(self.q), None).exp() };
                1.0 - self.a * qp - self.b * qq
            }
            Some(g) => {
                let qp = log_quotient(self.mesh, u, QuotientKind::Interdim(self.p), Some(&mut *g)).exp();
                g.iter_mut().for_each(|x| *x *= -self.a * qp);
                let mut qq = 0.0;
                if self.b != 0.0 {
                    let mut gq = vec![0.0; n];
                    qq = log_quotient(self.mesh, u, QuotientKind::Interdim(self.q), Some(&mut gq)).exp();
                    for (x, y) in g.iter_mut().zip(&gq) {
                        *x -= self.b * qq * y;
                    }
                }
                1.0 - self.a * qp - self.b * qq
            }
        };
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

/// Root of `1 − (t/μ_p)^{(p−2)/2} − α (t/μ_q)^{(q−2)/2}` on `(0, μ_p]`.
pub fn mu_lower_bound(mu_p: f64, mu_q: f64, p: f64, q: f64, alpha: f64) -> Result<f64> {
    if !(mu_p > 0.0 && mu_q > 0.0 && mu_p.is_finite() && mu_q.is_finite()) {
        return Err(Error::InvalidParams("critical masses must be positive".into()));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParams(format!("alpha = {alpha} must be non-negative")));
    }
    if !(q > 2.0 && p > 2.0) {
        return Err(Error::InvalidParams("exponents must exceed 2".into()));
    }
    if alpha == 0.0 {
        return Ok(mu_p);
    }
    let f = |t: f64| 1.0 - (t / mu_p).powf((p - 2.0) / 2.0) - alpha * (t / mu_q).powf((q - 2.0) / 2.0);
    let (mut lo, mut hi) = (0.0, mu_p);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `(½‖u'‖² − ‖u‖_p^p/p) / (‖u‖_q^q/q)`.
pub fn quotient_defocusing(u: &GraphFunction, p: f64, q: f64) -> Result<f64> {
    let d = u.lp_pow(q)? / q;
    if !(d > 0.0) {
        return Err(Error::ZeroDenominator("defocusing quotient"));
    }
    Ok((0.5 * u.seminorm_h1sq() - u.lp_pow(p)? / p) / d)
}

struct Defocusing<'a> {
    mesh: &'a Mesh,
    p: f64,
    q: f64,
}

impl Objective for Defocusing<'_> {
    fn eval(&self, u: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let (p, q) = (self.p, self.q);
        let v = match grad {
            None => {
                let num = 0.5 * self.mesh.stiff_form(u) - self.mesh.power(u, p, None) / p;
                num / (self.mesh.power(u, q, None) / q)
            }
            Some(g) => {
                let n = u.len();
                // g ← ∇N = Ku − load_p, dq ← ∇D = load_q.
                self.mesh.stiff_apply(u, g);
                let kinetic = dot(g, u);
                let ap = self.mesh.power(u, p, Some((&mut *g, -1.0)));
                let mut dq = vec![0.0; n];
                let aq = self.mesh.power(u, q, Some((&mut dq, 1.0)));
                let den = aq / q;
                let val = (0.5 * kinetic - ap / p) / den;
                for (x, y) in g.iter_mut().zip(&dq) {
                    *x = (*x - val * y) / den;
                }
                val
            }
        };
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOptions {
    pub radius: usize,
    pub h: f64,
    pub bc: BoundaryCondition,
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Stationarity and plateau tolerance of the inner descents.
    pub tol: f64,
    /// Relative width at which the critical-mass bisection stops.
    pub rel_tol: f64,
    pub max_probes: usize,
    /// Width of the bumps seeding the inner descents.
    pub init_width: f64,
    pub noise: f64,
    /// Also classify every bisection probe with the energy solver.
    pub solver_check: bool,
    /// Multiples of the defocusing threshold at which the full problem is re-solved.
    pub cross_factors: Vec<f64>,
    pub solve: SolveOptions,
    pub halfline_length: f64,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self {
            radius: 8,
            h: 0.05,
            bc: BoundaryCondition::Dirichlet,
            restarts: 5,
            seed: 0,
            max_iters: 20_000,
            tol: 1e-7,
            rel_tol: 0.02,
            max_probes: 60,
            init_width: 0.5,
            noise: 1e-3,
            solver_check: false,
            cross_factors: vec![0.9, 1.1],
            solve: SolveOptions::default(),
            halfline_length: DEFAULT_HALFLINE_LENGTH,
        }
    }
}

impl ThresholdOptions {
    /// Options for the constant estimates that bound the thresholds.
    pub fn gn(&self) -> GnOptions {
        GnOptions {
            radius: self.radius,
            h: self.h,
            restarts: self.restarts,
            seed: self.seed,
            max_iters: self.max_iters,
            tol: self.tol,
            bc: self.bc,
            init_width: self.init_width,
            noise: self.noise,
            refine_rounds: 0,
            convergence_check: false,
            halfline_length: self.halfline_length,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.tol > 0.0 && self.rel_tol > 0.0 && self.init_width > 0.0) {
            return Err(Error::InvalidParams("h, tol, rel_tol and init_width must be positive".into()));
        }
        self.solve.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdTarget {
    MuCrit,
    AlphaBar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdStatus {
    Ok,
    /// The analytic bracket ends did not have the expected signs.
    BracketFailure,
    /// The `F` sign and the solver disagreed; bisection stopped there.
    ProbeDisagreement,
    CrossValidationMismatch,
    Maxiter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticBounds {
    pub mu_bar: f64,
    pub mu_p: f64,
    pub mu_q: f64,
    /// `α^{−2/(q−2)} μ_q`.
    pub scaled_mu_q: f64,
    pub upper: f64,
    pub k_p: f64,
    pub k_q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub mu: f64,
    pub f_inf: f64,
    pub negative: bool,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub factor: f64,
    pub alpha: f64,
    pub expected: Regime,
    pub regime: Regime,
    pub classification: Classification,
    pub energy: f64,
    /// Energy of the quotient minimizer at this `α`.
    pub minimizer_energy: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdProvenance {
    pub spec: String,
    pub radius: usize,
    pub h: f64,
    pub bc: BoundaryCondition,
    pub nodes: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub schema_version: u32,
    pub target: ThresholdTarget,
    pub p: f64,
    pub q: f64,
    /// Fixed `α` for the critical mass, fixed `μ` for the defocusing threshold.
    pub fixed: f64,
    pub estimate: f64,
    pub bracket: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic: Option<AnalyticBounds>,
    pub probes: Vec<Probe>,
    pub cross_checks: Vec<CrossCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound_diagnostic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub homogeneous_energy: Option<f64>,
    pub status: ThresholdStatus,
    pub flags: Vec<String>,
    pub provenance: ThresholdProvenance,
}

/// Estimate of `inf_u F(u, μ)` with the best function found.
#[derive(Debug, Clone)]
pub struct BigFEstimate {
    pub value: f64,
    pub converged: bool,
    pub function: GraphFunction,
}

fn provenance(spec: &PeriodicGraphSpec, mesh: &Mesh, opts: &ThresholdOptions) -> ThresholdProvenance {
    ThresholdProvenance {
        spec: spec.name.clone(),
        radius: opts.radius,
        h: opts.h,
        bc: opts.bc,
        nodes: mesh.node_count(),
        seed: opts.seed,
    }
}

fn bump_starts(spec: &PeriodicGraphSpec, mesh: &Mesh, opts: &ThresholdOptions, width: f64) -> Result<Vec<Vec<f64>>> {
    seeds(spec, opts.restarts.max(1))
        .into_iter()
        .enumerate()
        .map(|(i, s)| Ok(bump(mesh, seed_point(mesh, s)?, width, opts.noise, opts.seed.wrapping_add(i as u64))))
        .collect()
}

fn big_f_inf_on_mesh(
    mesh: &Arc<Mesh>,
    starts: &[Vec<f64>],
    mu: f64,
    params: &EnergyParams,
    opts: &ThresholdOptions,
) -> BigFEstimate {
    let (a, b) = f_weights(mu, params);
    let obj = BigF { mesh, p: params.p, q: params.q, a, b };
    let runs: Vec<_> = starts
        .par_iter()
        .map(|u0| descend_to_plateau(mesh, 1.0, &obj, u0.clone(), opts.max_iters, opts.tol))
        .collect();
    let best = runs.into_iter().min_by(|x, y| x.value.total_cmp(&y.value)).expect("at least one start");
    BigFEstimate {
        value: best.value,
        converged: best.status == Status::Converged,
        function: GraphFunction::from_raw(mesh.clone(), best.u),
    }
}

fn check_exponents(p: f64, q: f64) -> Result<()> {
    if !(2.0 < q && q < p && p <= 6.0) {
        return Err(Error::InvalidParams(format!("need 2 < q < p <= 6, got p = {p}, q = {q}")));
    }
    Ok(())
}

/// Minimizes `F(·, μ)` over functions on a truncation of a 2-periodic spec.
pub fn estimate_big_f_inf(spec: &PeriodicGraphSpec, mu: f64, params: &EnergyParams, opts: &ThresholdOptions) -> Result<BigFEstimate> {
    opts.validate()?;
    check_exponents(params.p, params.q)?;
    if !(mu > 0.0) {
        return Err(Error::InvalidParams("mass must be positive".into()));
    }
    let spec = spec.canonicalized()?;
    let graph = spec.truncate_with(opts.radius, opts.bc, opts.halfline_length)?;
    let mesh = Arc::new(Mesh::new(graph, opts.h)?);
    let starts = bump_starts(&spec, &mesh, opts, opts.init_width)?;
    Ok(big_f_inf_on_mesh(&mesh, &starts, mu, params, opts))
}

/// Best ascent of `Q_r`, optionally also started from extra functions.
fn k_estimate(spec: &PeriodicGraphSpec, mesh: &Arc<Mesh>, r: f64, opts: &ThresholdOptions, extra: &[Vec<f64>]) -> Result<Ascent> {
    let kind = QuotientKind::Interdim(r);
    let (mut runs, best) = maximize_on_mesh(spec, mesh, kind, &opts.gn())?;
    let mut best = runs.swap_remove(best);
    for u0 in extra {
        let a = crate::functionals::ascend(mesh, kind, u0.clone(), opts.max_iters, opts.tol);
        if a.log_value > best.log_value {
            best = a;
        }
    }
    Ok(best)
}

fn analytic(k_p: f64, k_q: f64, p: f64, q: f64, alpha: f64) -> Result<AnalyticBounds> {
    let mu_p = critical_mass_from_constant(QuotientKind::Interdim(p), k_p).expect("interdim mass");
    let mu_q = critical_mass_from_constant(QuotientKind::Interdim(q), k_q).expect("interdim mass");
    let scaled_mu_q = alpha.powf(-2.0 / (q - 2.0)) * mu_q;
    Ok(AnalyticBounds {
        mu_bar: mu_lower_bound(mu_p, mu_q, p, q, alpha)?,
        mu_p,
        mu_q,
        scaled_mu_q,
        upper: mu_p.min(scaled_mu_q),
        k_p,
        k_q,
    })
}

fn threshold_flags(q: f64) -> Vec<String> {
    if q == 4.0 {
        vec!["open_case_q4_at_threshold".into()]
    } else if q > 4.0 {
        vec!["existence_at_threshold_beyond_resolution".into()]
    } else {
        Vec::new()
    }
}

/// Brackets the mass at which the ground state level of the combined focusing
/// problem turns negative on a 2-periodic graph.
///
/// Probes are signs of the estimated `inf F`. All quotient constants come from
/// the same mesh, so the bracket starts from the discrete analytic bounds.
pub fn estimate_mu_crit(spec: &PeriodicGraphSpec, p: f64, q: f64, alpha: f64, opts: &ThresholdOptions) -> Result<ThresholdReport> {
    opts.validate()?;
    check_exponents(p, q)?;
    if q < 4.0 {
        return Err(Error::InvalidParams(format!("q = {q} must be at least 4")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParams(format!("alpha = {alpha} must be positive")));
    }
    if spec.dim != 2 {
        return Err(Error::InvalidParams("the critical mass needs a 2-periodic spec".into()));
    }
    let spec = spec.canonicalized()?;
    let graph = spec.truncate_with(opts.radius, opts.bc, opts.halfline_length)?;
    let mesh = Arc::new(Mesh::new(graph, opts.h)?);
    let base = EnergyParams::new(p, q, alpha, 1.0)?;

    let mut kp = k_estimate(&spec, &mesh, p, opts, &[])?;
    let mut kq = k_estimate(&spec, &mesh, q, opts, &[])?;
    let mut bounds = analytic(kp.log_value.exp(), kq.log_value.exp(), p, q, alpha)?;
    let mut starts = bump_starts(&spec, &mesh, opts, opts.init_width)?;
    starts.push(kp.u.values().to_vec());
    starts.push(kq.u.values().to_vec());

    let mut probes = Vec::new();
    let probe = |mu: f64, starts: &[Vec<f64>], probes: &mut Vec<Probe>| -> Result<BigFEstimate> {
        let est = big_f_inf_on_mesh(&mesh, starts, mu, &base, opts);
        let mut pr = Probe { mu, f_inf: est.value, negative: est.value < 0.0, converged: est.converged, regime: None, energy: None };
        if opts.solver_check {
            let rep = classify_regime(&spec, &base.with_mu(mu), &opts.solve)?;
            pr.regime = Some(rep.regime);
            pr.energy = Some(rep.solve.energy);
        }
        probes.push(pr);
        Ok(est)
    };

    // An `F` below zero at μ̄ means the quotient constants were underestimated:
    // re-ascend from the `F` minimizer once and rebuild the bounds.
    let lo_probe = probe(bounds.mu_bar, &starts, &mut probes)?;
    if lo_probe.value < 0.0 {
        let extra = [lo_probe.function.values().to_vec()];
        kp = k_estimate(&spec, &mesh, p, opts, &extra)?;
        kq = k_estimate(&spec, &mesh, q, opts, &extra)?;
        bounds = analytic(kp.log_value.exp(), kq.log_value.exp(), p, q, alpha)?;
        starts.push(kp.u.values().to_vec());
        starts.push(kq.u.values().to_vec());
        probe(bounds.mu_bar, &starts, &mut probes)?;
    }
    let hi_probe = probe(bounds.upper, &starts, &mut probes)?;
    starts.push(hi_probe.function.values().to_vec());

    let (mut lo, mut hi) = (bounds.mu_bar, bounds.upper);
    let first_two = &probes[probes.len() - 2..];
    let mut status = if first_two[0].negative || !first_two[1].negative {
        ThresholdStatus::BracketFailure
    } else {
        ThresholdStatus::Ok
    };
    let disagrees = |pr: &Probe| pr.regime.map(|r| (r == Regime::NegativeEnergyGroundState) != pr.negative).unwrap_or(false);
    if probes.iter().any(disagrees) {
        status = ThresholdStatus::ProbeDisagreement;
    }
    let mut count = 0;
    while status == ThresholdStatus::Ok && (hi - lo) > opts.rel_tol * 0.5 * (hi + lo) {
        if count >= opts.max_probes {
            status = ThresholdStatus::Maxiter;
            break;
        }
        count += 1;
        let mid = 0.5 * (lo + hi);
        let est = probe(mid, &starts, &mut probes)?;
        let last = probes.last().expect("probe recorded");
        if disagrees(last) {
            status = ThresholdStatus::ProbeDisagreement;
            break;
        }
        if last.negative {
            hi = mid;
            // Warm start later probes from the best negative state.
            starts.push(est.function.into_values());
        } else {
            lo = mid;
        }
    }
    Ok(ThresholdReport {
        schema_version: 1,
        target: ThresholdTarget::MuCrit,
        p,
        q,
        fixed: alpha,
        estimate: 0.5 * (lo + hi),
        bracket: [lo, hi],
        analytic: Some(bounds),
        probes,
        cross_checks: Vec::new(),
        lower_bound_diagnostic: None,
        homogeneous_energy: None,
        status,
        flags: threshold_flags(q),
        provenance: provenance(&spec, &mesh, opts),
    })
}

/// Infimum of the defocusing quotient over functions of mass `μ`: the most
/// negative `α` for which the combined problem still has a negative level.
///
/// Returns zero without any descent when the purely focusing level at `μ` is zero.
pub fn estimate_alpha_bar(spec: &PeriodicGraphSpec, p: f64, q: f64, mu: f64, opts: &ThresholdOptions) -> Result<ThresholdReport> {
    opts.validate()?;
    check_exponents(p, q)?;
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParams("mass must be positive".into()));
    }
    let spec = spec.canonicalized()?;
    let homogeneous = EnergyParams::new(p, q, 0.0, mu)?;
    let base = classify_regime(&spec, &homogeneous, &opts.solve)?;
    let graph = spec.truncate_with(opts.radius, opts.bc, opts.halfline_length)?;
    let mesh = Arc::new(Mesh::new(graph, opts.h)?);
    let mut report = ThresholdReport {
        schema_version: 1,
        target: ThresholdTarget::AlphaBar,
        p,
        q,
        fixed: mu,
        estimate: 0.0,
        bracket: [0.0, 0.0],
        analytic: None,
        probes: Vec::new(),
        cross_checks: Vec::new(),
        lower_bound_diagnostic: None,
        homogeneous_energy: Some(base.solve.energy),
        status: ThresholdStatus::Ok,
        flags: base.flags.clone(),
        provenance: provenance(&spec, &mesh, opts),
    };
    if base.regime != Regime::NegativeEnergyGroundState {
        return Ok(report);
    }

    let obj = Defocusing { mesh: &mesh, p, q };
    let starts = bump_starts(&spec, &mesh, opts, opts.init_width)?;
    let runs: Vec<_> = starts
        .into_par_iter()
        .map(|u0| descend_to_plateau(&mesh, mu, &obj, u0, opts.max_iters, opts.tol))
        .collect();
    let best = runs.iter().min_by(|x, y| x.value.total_cmp(&y.value)).expect("at least one start");
    let alpha_bar = best.value;
    let min_aq = runs.iter().map(|r| mesh.power(&r.u, q, None)).fold(f64::INFINITY, f64::min);
    let diagnostic = base.solve.energy / (min_aq / q);
    report.estimate = alpha_bar;
    report.bracket = [diagnostic.min(alpha_bar), alpha_bar];
    report.lower_bound_diagnostic = Some(diagnostic);
    if runs.iter().all(|r| r.status != Status::Converged) {
        report.status = ThresholdStatus::Maxiter;
    }

    for &factor in &opts.cross_factors {
        let alpha = factor * alpha_bar;
        let params = EnergyParams::new(p, q, alpha, mu)?;
        let rep = classify_regime(&spec, &params, &opts.solve)?;
        // The quotient minimizer is itself a competitor: its energy is
        // `(‖u‖_q^q/q)(ᾱ − α)`, negative whenever α lies above the estimate.
        let minimizer_energy = crate::mesh::energy_parts(&mesh, &best.u, &params).energy(&params);
        let regime = if minimizer_energy < -10.0 * opts.solve.energy_tol {
            Regime::NegativeEnergyGroundState
        } else {
            rep.regime
        };
        // Larger factors are more defocusing than the threshold.
        let expected = if factor < 1.0 { Regime::NegativeEnergyGroundState } else { Regime::ZeroLevelVanishing };
        let agrees = regime == expected;
        if !agrees && report.status == ThresholdStatus::Ok {
            report.status = ThresholdStatus::CrossValidationMismatch;
        }
        report.cross_checks.push(CrossCheck {
            factor,
            alpha,
            expected,
            regime,
            classification: rep.solve.classification,
            energy: rep.solve.energy,
            minimizer_energy,
            agrees,
        });
    }
    Ok(report)
}
