//! Preconditioned descent on the mass sphere `uᵀMu = μ`.
//!
//! Search directions are Riemannian gradients in the `P = K + σM` inner product,
//! step lengths are Barzilai-Borwein with halving until the objective does not
//! increase, and the retraction rescales back onto the sphere.

use crate::linsolve::ChainSolver;
use crate::mesh::{dot, Mesh};

/// Objective on nodal vectors. `eval` returns the value and, if asked, writes the
/// Euclidean gradient (a dual vector).
pub(crate) trait Objective {
    fn eval(&self, u: &[f64], grad: Option<&mut [f64]>) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Status {
    Converged,
    Stalled,
    MaxIter,
    Stopped,
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub u: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub status: Status,
    /// Relative stationarity `grad_norm / max(1, ‖u‖_P)`.
    pub stationarity: f64,
}

/// State handed to the monitor after every accepted step.
pub(crate) struct Step<'a> {
    pub iter: usize,
    pub u: &'a [f64],
    pub value: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Settings {
    pub mass: f64,
    pub max_iters: usize,
    /// Relative change of the objective over one accepted step.
    pub value_tol: f64,
    /// Bound on the relative stationarity.
    pub grad_tol: f64,
}

pub(crate) struct SphereDescent<'a> {
    mesh: &'a Mesh,
    solver: &'a ChainSolver,
    settings: Settings,
}

struct Point {
    u: Vec<f64>,
    value: f64,
    /// Dual residual `g − c M u`.
    r: Vec<f64>,
    /// Primal direction `P⁻¹ r`.
    d: Vec<f64>,
    grad_norm: f64,
    p_norm: f64,
}

impl<'a> SphereDescent<'a> {
    pub(crate) fn new(mesh: &'a Mesh, solver: &'a ChainSolver, settings: Settings) -> Self {
        Self { mesh, solver, settings }
    }

    fn retract(&self, u: &mut [f64]) -> bool {
        self.mesh.pin(u);
        let m = self.mesh.mass_form(u);
        if !(m > 0.0 && m.is_finite()) {
            return false;
        }
        let s = (self.settings.mass / m).sqrt();
        u.iter_mut().for_each(|x| *x *= s);
        true
    }

    fn point(&self, obj: &impl Objective, u: Vec<f64>) -> Point {
        let n = u.len();
        let mut g = vec![0.0; n];
        let value = obj.eval(&u, Some(&mut g));
        self.mesh.pin(&mut g);
        let mut mu = vec![0.0; n];
        self.mesh.mass_apply(&u, &mut mu);
        self.mesh.pin(&mut mu);
        let xi = self.solver.solve(&g);
        let v = self.solver.solve(&mu);
        let c = dot(&xi, &mu) / dot(&v, &mu);
        let d: Vec<f64> = xi.iter().zip(&v).map(|(a, b)| a - c * b).collect();
        let r: Vec<f64> = g.iter().zip(&mu).map(|(a, b)| a - c * b).collect();
        let grad_norm = dot(&d, &r).max(0.0).sqrt();
        let mut ku = vec![0.0; n];
        self.mesh.stiff_apply(&u, &mut ku);
        let p_norm = (dot(&ku, &u) + self.solver.sigma() * self.settings.mass).sqrt();
        Point { u, value, r, d, grad_norm, p_norm }
    }

    fn stationarity(&self, p: &Point) -> f64 {
        p.grad_norm / p.p_norm.max(1.0)
    }

    pub(crate) fn run(
        &self,
        obj: &impl Objective,
        u0: Vec<f64>,
        mut monitor: impl FnMut(&Step) -> bool,
    ) -> Outcome {
        let mut u0 = u0;
        assert!(self.retract(&mut u0), "initial guess has zero mass");
        let mut cur = self.point(obj, u0);
        let mut tau = 1.0;
        let mut last_change = f64::INFINITY;
        let mut status = Status::MaxIter;
        let mut iter = 0;
        while iter < self.settings.max_iters {
            if self.stationarity(&cur) <= self.settings.grad_tol && last_change <= self.settings.value_tol {
                status = Status::Converged;
                break;
            }
            let mut accepted = None;
            let mut t = tau;
            for _ in 0..60 {
                let mut w: Vec<f64> = cur.u.iter().zip(&cur.d).map(|(a, b)| a - t * b).collect();
                if self.retract(&mut w) {
                    let f = obj.eval(&w, None);
                    if f.is_finite() && f <= cur.value {
                        accepted = Some((w, t, f));
                        break;
                    }
                }
                t *= 0.5;
            }
            let Some((w, t, f)) = accepted else {
                status = if self.stationarity(&cur) <= 1e3 * self.settings.grad_tol {
                    Status::Converged
                } else {
                    Status::Stalled
                };
                break;
            };
            iter += 1;
            let mut next = self.point(obj, w);
            // The gradient pass sums in a different order; keep the value the
            // line search accepted so recorded values never increase.
            next.value = f;
            last_change = (cur.value - next.value).abs() / next.value.abs().max(f64::MIN_POSITIVE);
            let s: Vec<f64> = next.u.iter().zip(&cur.u).map(|(a, b)| a - b).collect();
            let yr: Vec<f64> = next.r.iter().zip(&cur.r).map(|(a, b)| a - b).collect();
            let yd: Vec<f64> = next.d.iter().zip(&cur.d).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &yr);
            let yy = dot(&yd, &yr);
            tau = if sy > 0.0 && yy > 0.0 { (sy / yy).clamp(1e-8, 1e8) } else { (2.0 * t).min(1e8) };
            cur = next;
            if monitor(&Step { iter, u: &cur.u, value: cur.value }) {
                status = Status::Stopped;
                break;
            }
        }
        let stationarity = self.stationarity(&cur);
        Outcome { value: cur.value, iterations: iter, status, stationarity, u: cur.u }
    }
}
