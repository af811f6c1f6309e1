//! Solver for `(K + sigma M) x = r` on a graph mesh with pinned nodes.
//!
//! Interior nodes of every edge form a tridiagonal block that only couples to the
//! two endpoint vertices, so they are eliminated exactly (static condensation).
//! The remaining vertex Schur complement is small and goes to a sparse LDL.

use sprs::{FillInReduction, TriMat};
use sprs_ldl::{Ldl, LdlNumeric};

use crate::error::{Error, Result};

/// Interior block of one edge: `k` nodes, constant diagonal `d`, off-diagonal `o`.
struct Chain {
    a: usize,
    b: usize,
    first: usize,
    off: f64,
    /// Forward-sweep multipliers and inverse pivots of the Thomas algorithm.
    cp: Vec<f64>,
    inv: Vec<f64>,
    /// `T^{-1}` applied to the couplings with `a` and `b`.
    za: Vec<f64>,
    zb: Vec<f64>,
}

impl Chain {
    fn new(a: usize, b: usize, first: usize, k: usize, h: f64, sigma: f64) -> Self {
        let d = 2.0 / h + sigma * 2.0 * h / 3.0;
        let off = -1.0 / h + sigma * h / 6.0;
        let mut cp = vec![0.0; k];
        let mut inv = vec![0.0; k];
        for i in 0..k {
            let denom = if i == 0 { d } else { d - off * cp[i - 1] };
            inv[i] = 1.0 / denom;
            cp[i] = off * inv[i];
        }
        let mut chain = Self { a, b, first, off, cp, inv, za: vec![0.0; k], zb: vec![0.0; k] };
        let mut e = vec![0.0; k];
        e[0] = off;
        chain.za = chain.solve(&e);
        e[0] = 0.0;
        e[k - 1] = off;
        chain.zb = chain.solve(&e);
        chain
    }

    fn solve(&self, f: &[f64]) -> Vec<f64> {
        let k = f.len();
        let mut y = vec![0.0; k];
        y[0] = f[0] * self.inv[0];
        for i in 1..k {
            y[i] = (f[i] - self.off * y[i - 1]) * self.inv[i];
        }
        for i in (0..k - 1).rev() {
            y[i] -= self.cp[i] * y[i + 1];
        }
        y
    }
}

pub struct ChainSolver {
    vertices: usize,
    nodes: usize,
    fixed: Vec<bool>,
    chains: Vec<Chain>,
    schur: LdlNumeric<f64, usize>,
    sigma: f64,
}

/// Description of one edge for the solver: endpoints, first interior node,
/// number of intervals and spacing.
pub(crate) struct ChainSpec {
    pub a: usize,
    pub b: usize,
    pub first: usize,
    pub intervals: usize,
    pub h: f64,
}

impl ChainSolver {
    pub(crate) fn new(vertices: usize, nodes: usize, specs: &[ChainSpec], fixed: &[bool], sigma: f64) -> Result<Self> {
        let mut tri = TriMat::new((vertices, vertices));
        let mut chains = Vec::with_capacity(specs.len());
        for s in specs {
            let c = Chain::new(s.a, s.b, s.first, s.intervals - 1, s.h, sigma);
            let end = 1.0 / s.h + sigma * s.h / 3.0;
            let k = c.za.len();
            let (fa, fb) = (fixed[s.a], fixed[s.b]);
            if !fa {
                tri.add_triplet(s.a, s.a, end - c.off * c.za[0]);
            }
            if !fb {
                tri.add_triplet(s.b, s.b, end - c.off * c.zb[k - 1]);
            }
            if !fa && !fb {
                // Equal in exact arithmetic; averaged so the matrix is bitwise symmetric.
                let x = -c.off * 0.5 * (c.zb[0] + c.za[k - 1]);
                tri.add_triplet(s.a, s.b, x);
                tri.add_triplet(s.b, s.a, x);
            }
            chains.push(c);
        }
        for (v, &f) in fixed.iter().enumerate().take(vertices) {
            if f {
                tri.add_triplet(v, v, 1.0);
            }
        }
        let mat = tri.to_csc::<usize>();
        let schur = Ldl::new()
            .fill_in_reduction(FillInReduction::ReverseCuthillMcKee)
            .numeric(mat.view())
            .map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
        Ok(Self { vertices, nodes, fixed: fixed.to_vec(), chains, schur, sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Solves the pinned system; pinned entries of the result equal those of `r`.
    pub fn solve(&self, r: &[f64]) -> Vec<f64> {
        assert_eq!(r.len(), self.nodes);
        let mut rhs = r[..self.vertices].to_vec();
        let mut partial = Vec::with_capacity(self.chains.len());
        for c in &self.chains {
            let k = c.za.len();
            let y = c.solve(&r[c.first..c.first + k]);
            if !self.fixed[c.a] {
                rhs[c.a] -= c.off * y[0];
            }
            if !self.fixed[c.b] {
                rhs[c.b] -= c.off * y[k - 1];
            }
            partial.push(y);
        }
        let xv: Vec<f64> = self.schur.solve(&rhs);
        let mut x = vec![0.0; self.nodes];
        x[..self.vertices].copy_from_slice(&xv);
        for (c, y) in self.chains.iter().zip(partial) {
            let xa = if self.fixed[c.a] { 0.0 } else { xv[c.a] };
            let xb = if self.fixed[c.b] { 0.0 } else { xv[c.b] };
            for (i, yi) in y.into_iter().enumerate() {
                x[c.first + i] = yi - c.za[i] * xa - c.zb[i] * xb;
            }
        }
        x
    }
}
