mod common;

use std::sync::Arc;

use common::*;
use graphnls_core::competitors::{edge_soliton_competitor, edge_soliton_energies, soliton, tent_competitor, Soliton, SolitonScale};
use graphnls_core::graph::{BoundaryCondition, MetricGraph, MU_LINE};
use graphnls_core::mesh::{EnergyParams, Mesh};

#[test]
fn tent_mass_is_exact() {
    let line = spec("line");
    for n in [2, 4, 8] {
        let t = tent_competitor(&line, n, 1.3, 0.05).unwrap();
        assert!(rel(t.function.norm_l2sq(), 1.3) <= 1e-12);
    }
}

#[test]
fn tents_on_the_line_turn_negative() {
    let params = EnergyParams::new(4.0, 3.0, 1.0, 1.0).unwrap();
    let e: Vec<f64> = [2, 4, 8, 16]
        .iter()
        .map(|&n| tent_competitor(&spec("line"), n, 1.0, 0.05).unwrap().function.energy(&params))
        .collect();
    let first = e.iter().position(|&x| x < 0.0).expect("some tent is negative");
    assert!(e[first..].iter().all(|&x| x < 0.0), "{e:?}");
}

#[test]
fn tent_scaling_exponents() {
    let ns = [4usize, 8, 16, 32];
    let logn: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let kin: Vec<f64> = ns
        .iter()
        .map(|&n| tent_competitor(&spec("line"), n, 1.0, 0.1).unwrap().function.seminorm_h1sq().ln())
        .collect();
    let s = slope(&logn, &kin);
    assert!((s + 2.0).abs() <= 0.3, "kinetic slope {s}");
    let eps: Vec<f64> = ns[..3]
        .iter()
        .map(|&n| tent_competitor(&spec("square_grid"), n, 1.0, 0.25).unwrap().epsilon.ln())
        .collect();
    let s = slope(&logn[..3], &eps);
    assert!((s + 1.0).abs() <= 0.2, "epsilon slope {s}");
}

#[test]
fn tent_shape() {
    for name in ["line", "square_grid", "comb"] {
        let s = spec(name);
        let t = tent_competitor(&s, 2, 1.0, 0.05).unwrap();
        let mesh = t.function.mesh();
        let unit: Vec<f64> = t.function.values().iter().map(|v| v / t.epsilon * t.max_distance).collect();
        for c in mesh.chains() {
            let nodes: Vec<usize> = c.nodes().collect();
            for w in nodes.windows(2) {
                assert!((unit[w[1]] - unit[w[0]]).abs() / c.h <= 1.0 + 2.0 * c.h, "{name}");
            }
        }
        for (v, gv) in t.function.values().iter().zip(&mesh.graph().vertices) {
            if gv.boundary {
                assert_eq!(*v, 0.0);
            } else {
                assert!(*v > 0.0, "{name}");
            }
        }
        let sup = t.function.norm_linf();
        assert!((sup - t.epsilon).abs() <= 1e-12 * sup);
    }
}

#[test]
fn tent_lower_bound_on_inner_ball() {
    // On B_n the tent of radius 2n stays above δ ε_n with one δ for all n.
    let s = spec("square_grid");
    let mut ratios = Vec::new();
    for n in [4usize, 8, 16] {
        let t = tent_competitor(&s, n, 1.0, 0.25).unwrap();
        let mesh = t.function.mesh();
        let g = mesh.graph();
        let inner = g
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.cell[0].abs().max(e.cell[1].abs()) <= n as i64)
            .flat_map(|(k, _)| mesh.chains()[k].nodes().collect::<Vec<_>>());
        let min = inner.map(|i| t.function.values()[i]).fold(f64::INFINITY, f64::min);
        ratios.push(min / t.epsilon);
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    assert!(lo > 0.2 && hi / lo < 1.5, "{ratios:?}");
}

#[test]
fn soliton_is_even() {
    let (u, _) = soliton(5.0, SolitonScale::Mass(1.5), 30.0, 0.01).unwrap();
    let v = u.values();
    let c = &u.mesh().chains()[0];
    let nodes: Vec<usize> = c.nodes().collect();
    for k in 0..nodes.len() {
        assert!((v[nodes[k]] - v[nodes[nodes.len() - 1 - k]]).abs() <= 1e-14);
    }
}

#[test]
fn soliton_solves_its_ode() {
    // Fourth-order central second derivative against the equation, pointwise.
    for p in [3.0, 4.0, 5.0, 6.0] {
        let s = Soliton::new(p, SolitonScale::Frequency(1.3)).unwrap();
        let h = 2.5e-3;
        let mut worst: f64 = 0.0;
        for k in -400..=400 {
            let x = k as f64 * 0.01;
            let f = |t: f64| s.value(t);
            let d2 = (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h)) / (12.0 * h * h);
            let r = -d2 + s.lambda * f(x) - f(x).powf(p - 1.0);
            worst = worst.max(r.abs());
        }
        assert!(worst <= 1e-8, "p = {p}: {worst}");
    }
}

#[test]
fn soliton_residual_operation() {
    // The sextic tail decays like e^{-|x|}, so the proxy must be long enough
    // that pinning it to zero stays below roundoff.
    let s = Soliton::new(6.0, SolitonScale::Frequency(1.0)).unwrap();
    let params = EnergyParams::homogeneous(6.0, 1.0).unwrap();
    let r: Vec<f64> = [2e-3, 1e-3, 5e-4]
        .iter()
        .map(|&h| s.on_line(80.0, h).unwrap().residual(s.lambda, &params).edge)
        .collect();
    for w in r.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..4.5).contains(&ratio), "{r:?}");
    }
    // Second differences carry an h²/12 u'''' truncation error.
    assert!(r[1] <= 2.5e-6, "{r:?}");
}

#[test]
fn critical_soliton_has_zero_energy() {
    let (u, lambda) = soliton(6.0, SolitonScale::Mass(MU_LINE), 80.0, 0.01).unwrap();
    let params = EnergyParams::homogeneous(6.0, MU_LINE).unwrap();
    assert!((lambda - 1.0).abs() < 1e-9);
    assert!(u.energy(&params).abs() <= 1e-3);
}

#[test]
fn rescaled_solitons_keep_their_mass() {
    // √l φ(l x) is the sextic soliton of frequency l², which has the same mass.
    let base = Soliton::new(6.0, SolitonScale::Frequency(1.0)).unwrap();
    for l in [0.3f64, 2.0, 10.0] {
        let s = Soliton::new(6.0, SolitonScale::Frequency(l * l)).unwrap();
        assert!(rel(s.mass(), base.mass()) <= 1e-12, "λ = {l}");
        for x in [-1.7, -0.2, 0.0, 0.4, 3.1] {
            assert!(rel(s.value(x), l.sqrt() * base.value(l * x)) <= 1e-12, "λ = {l}, x = {x}");
        }
    }
    // Sampled masses agree to quadrature accuracy.
    let m: Vec<f64> = [1.0, 4.0].iter().map(|&f| {
        Soliton::new(6.0, SolitonScale::Frequency(f)).unwrap().on_line(80.0, 2e-3).unwrap().norm_l2sq()
    }).collect();
    assert!(rel(m[0], m[1]) <= 1e-4, "{m:?}");
}

#[test]
fn edge_solitons_diverge_at_the_critical_power() {
    // Focusing quartic term: the sextic part vanishes at mass μ_ℝ, the quartic
    // part grows like λ, so reaching −10³ takes λ in the thousands.
    let plus = EnergyParams::new(6.0, 4.0, 1.0, MU_LINE).unwrap();
    let lambdas = [1.0, 4.0, 16.0, 64.0, 256.0, 1024.0, 4096.0];
    let e: Vec<f64> = edge_soliton_energies(1.0, &lambdas, MU_LINE, &plus).unwrap().into_iter().map(|x| x.1).collect();
    assert!(e.windows(2).all(|w| w[1] < w[0]), "{e:?}");
    assert!(*e.last().unwrap() < -1e3, "{e:?}");
    // Defocusing quartic term: needs mass above μ_ℝ for the sextic term to win.
    let mu = 1.2 * MU_LINE;
    let minus = EnergyParams::new(6.0, 4.0, -1.0, mu).unwrap();
    let e: Vec<f64> = edge_soliton_energies(1.0, &[1.0, 4.0, 16.0, 64.0], mu, &minus).unwrap().into_iter().map(|x| x.1).collect();
    assert!(e.windows(2).all(|w| w[1] < w[0]), "{e:?}");
    assert!(*e.last().unwrap() < -1e3, "{e:?}");
}

#[test]
fn edge_soliton_energy_two_ways() {
    let mesh = Arc::new(Mesh::new(MetricGraph::interval(1.0, BoundaryCondition::Dirichlet), 1.0 / 64.0).unwrap());
    let params = EnergyParams::new(6.0, 4.0, 1.0, MU_LINE).unwrap();
    let u = edge_soliton_competitor(&mesh, 0, 1.0, MU_LINE).unwrap();
    assert!(rel(u.norm_l2sq(), MU_LINE) <= 1e-10);
    let direct = 0.5 * u.seminorm_h1sq() - u.lp_pow(6.0).unwrap() / 6.0 - u.lp_pow(4.0).unwrap() / 4.0;
    let e = u.energy(&params);
    assert!(e.is_finite());
    assert!((e - direct).abs() <= 1e-10 * e.abs().max(1.0));
}
