use std::fs;
use std::path::{Path, PathBuf};

use graphnls_core::competitors::{edge_soliton_energies, tent_competitor, Soliton, SolitonScale};
use graphnls_core::functionals::{maximize_quotient, GnOptions, QuotientKind};
use graphnls_core::graph::{BoundaryCondition, PeriodicGraphSpec};
use graphnls_core::mesh::{EnergyParams, GraphFunction};
use graphnls_core::minimize::{classify_regime, solve_ground_state, Classification, RadiusSchedule, SolveOptions};
use graphnls_core::thresholds::{estimate_alpha_bar, estimate_mu_crit, ThresholdOptions, ThresholdStatus};
use rayon::prelude::*;
use serde::Serialize;

use crate::{svg, CompetitorKind, Failure, GnKind, JobArgs, Target};

/// Version of the JSON reports written by the CLI.
const SCHEMA_VERSION: u32 = 1;
const SWEEP_HEADER: &str = "# graphnls sweep v1";
const COMPETITOR_HEADER: &str = "# graphnls energies v1";
/// Radius used by `check` to probe assumption (H).
const CHECK_RADIUS: usize = 3;
const DEFAULT_LAMBDAS: [f64; 4] = [1.0, 4.0, 16.0, 64.0];
/// Line length for the soliton table, in units of the soliton width.
const SOLITON_WIDTHS: f64 = 80.0;

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Config(format!("missing --{flag}")))
}

fn load_spec(job: &JobArgs) -> Result<PeriodicGraphSpec, Failure> {
    let name = job.spec.as_deref().ok_or_else(|| Failure::Config("missing --spec".into()))?;
    PeriodicGraphSpec::load(name).map_err(|e| Failure::Spec(format!("{name}: {e}")))
}

fn bc(job: &JobArgs) -> BoundaryCondition {
    job.bc.map(Into::into).unwrap_or_default()
}

/// Energy parameters at mass `mu`; a pure power when `α = 0` and no `q` is given.
fn params(job: &JobArgs, alpha: f64, mu: f64) -> Result<EnergyParams, Failure> {
    let p = need(job.p, "p")?;
    let e = match job.q {
        None if alpha == 0.0 => EnergyParams::homogeneous(p, mu),
        None => return Err(Failure::Config("--q is required when --alpha is nonzero".into())),
        Some(q) => EnergyParams::new(p, q, alpha, mu),
    };
    Ok(e?)
}

fn solve_options(job: &JobArgs) -> SolveOptions {
    let mut o = SolveOptions { bc: bc(job), ..Default::default() };
    if let Some(h) = job.h {
        o.h = h;
    }
    if let Some(n) = job.n {
        o.radius = RadiusSchedule::Fixed(n);
    }
    if let Some(s) = job.seed {
        o.seed = s;
    }
    if let Some(t) = job.tol {
        o.energy_tol = t;
    }
    o
}

fn out_dir(job: &JobArgs) -> Result<PathBuf, Failure> {
    let dir = job.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| Failure::Config(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Config(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn write_function(dir: &Path, stem: &str, u: &GraphFunction, emit_svg: bool) -> Result<(), Failure> {
    let path = dir.join(format!("{stem}.csv"));
    let file = fs::File::create(&path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    u.write_csv(std::io::BufWriter::new(file))?;
    if emit_svg {
        let path = dir.join(format!("{stem}.svg"));
        fs::write(&path, svg::profile(u)).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

/// `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_range(s: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Config(format!("invalid range `{s}`"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, step] = parts[..] else { return Err(bad()) };
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if !(step > 0.0 && b >= a && a.is_finite() && b.is_finite()) {
            return Err(bad());
        }
        let count = ((b - a) / step + 1e-9).floor() as usize + 1;
        // Round away the drift of repeated additions so values print cleanly.
        (0..count).map(|i| ((a + i as f64 * step) * 1e12).round() / 1e12).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(values)
}

pub fn check(job: &JobArgs) -> Result<(), Failure> {
    let spec = load_spec(job)?;
    let h = if spec.dim == 0 { None } else { Some(spec.check_assumption_h(job.n.unwrap_or(CHECK_RADIUS))?) };
    let report = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "spec": spec.name,
        "dim": spec.dim,
        "terminal": spec.has_terminal_point(),
        "tilde_mu": spec.tilde_mu(),
        "H": h.as_ref().map(|h| h.holds),
        "H_per_edge": h.map(|h| h.per_edge),
    });
    println!("{}", serde_json::to_string_pretty(&report).map_err(|e| Failure::Config(e.to_string()))?);
    Ok(())
}

pub fn solve(job: &JobArgs) -> Result<(), Failure> {
    let spec = load_spec(job)?;
    let params = params(job, job.alpha.unwrap_or(0.0), need(job.mu, "mu")?)?;
    let opts = solve_options(job);
    let dir = out_dir(job)?;
    let result = solve_ground_state(&spec, &params, &opts)?;
    let report = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "command": "solve",
        "params": params,
        "options": opts,
        "result": result,
    });
    write_json(&dir.join("solve.json"), &report)?;
    write_function(&dir, "solution", &result.function, job.emit_svg)?;
    println!("{}", serde_json::to_string(&result.classification).unwrap_or_default());
    if result.classification == Classification::Maxiter {
        return Err(Failure::Maxiter(format!("no classification after {} iterations", result.iterations)));
    }
    Ok(())
}

pub fn gn(job: &JobArgs, kind: GnKind, restarts: Option<usize>, refine_rounds: Option<usize>) -> Result<(), Failure> {
    let spec = load_spec(job)?;
    let r = job.p.unwrap_or(6.0);
    let kind = match kind {
        GnKind::Gn1d => QuotientKind::Gn1d(r),
        GnKind::GnInf => QuotientKind::GnInf,
        GnKind::Interdim => QuotientKind::Interdim(r),
    };
    let d = GnOptions::default();
    let opts = GnOptions {
        radius: job.n.unwrap_or(d.radius),
        h: job.h.unwrap_or(d.h),
        restarts: restarts.unwrap_or(d.restarts),
        seed: job.seed.unwrap_or(d.seed),
        tol: job.tol.unwrap_or(d.tol),
        bc: bc(job),
        refine_rounds: refine_rounds.unwrap_or(d.refine_rounds),
        ..d
    };
    let dir = out_dir(job)?;
    let report = maximize_quotient(&spec, kind, &opts)?;
    write_json(&dir.join("gn.json"), &report)?;
    if let Some(u) = &report.maximizer_function {
        write_function(&dir, "maximizer", u, job.emit_svg)?;
    }
    println!("{}", report.constant);
    if !report.all_converged {
        return Err(Failure::Maxiter("a restart hit the iteration limit".into()));
    }
    Ok(())
}

pub fn threshold(job: &JobArgs, target: Target, solver_check: bool) -> Result<(), Failure> {
    let spec = load_spec(job)?;
    let p = need(job.p, "p")?;
    let q = need(job.q, "q")?;
    let d = ThresholdOptions::default();
    let opts = ThresholdOptions {
        radius: job.n.unwrap_or(d.radius),
        h: job.h.unwrap_or(d.h),
        bc: bc(job),
        seed: job.seed.unwrap_or(d.seed),
        rel_tol: job.tol.unwrap_or(d.rel_tol),
        solver_check,
        solve: SolveOptions { bc: bc(job), seed: job.seed.unwrap_or(0), ..d.solve.clone() },
        ..d
    };
    let dir = out_dir(job)?;
    let report = match target {
        Target::MuCrit => estimate_mu_crit(&spec, p, q, need(job.alpha, "alpha")?, &opts)?,
        Target::AlphaBar => estimate_alpha_bar(&spec, p, q, need(job.mu, "mu")?, &opts)?,
    };
    write_json(&dir.join("threshold.json"), &report)?;
    println!("{}", report.estimate);
    if report.status == ThresholdStatus::Maxiter {
        return Err(Failure::Maxiter("threshold search hit the iteration limit".into()));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SweepRow {
    mu: f64,
    alpha: f64,
    seed: u64,
    regime: String,
    classification: String,
    energy: f64,
    lambda: f64,
    iterations: usize,
    radius: Option<usize>,
}

fn tag(v: &impl Serialize) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

pub fn sweep(job: &JobArgs) -> Result<(), Failure> {
    let spec = load_spec(job)?;
    let mus = match (&job.mu_range, job.mu) {
        (Some(r), _) => parse_range(r)?,
        (None, Some(mu)) => vec![mu],
        (None, None) => return Err(Failure::Config("missing --mu-range".into())),
    };
    let alphas = match &job.alpha_range {
        Some(r) => parse_range(r)?,
        None => vec![job.alpha.unwrap_or(0.0)],
    };
    let tasks: Vec<(f64, f64)> = mus.iter().flat_map(|&m| alphas.iter().map(move |&a| (m, a))).collect();
    let base = solve_options(job);
    let dir = out_dir(job)?;
    let rows = tasks
        .par_iter()
        .enumerate()
        .map(|(i, &(mu, alpha))| {
            let params = params(job, alpha, mu)?;
            let seed = base.seed.wrapping_add(i as u64);
            let opts = SolveOptions { seed, ..base.clone() };
            let r = classify_regime(&spec, &params, &opts)?;
            Ok(SweepRow {
                mu,
                alpha,
                seed,
                regime: tag(&r.regime),
                classification: tag(&r.solve.classification),
                energy: r.solve.energy,
                lambda: r.solve.lambda,
                iterations: r.solve.iterations,
                radius: r.solve.provenance.radius,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;

    let path = dir.join("sweep.csv");
    let mut buf = format!("{SWEEP_HEADER}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for row in &rows {
            w.serialize(row).map_err(|e| Failure::Config(e.to_string()))?;
        }
        w.flush()?;
    }
    fs::write(&path, buf).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    println!("{} rows", rows.len());
    let stuck = rows.iter().filter(|r| r.classification == "maxiter").count();
    if stuck > 0 {
        return Err(Failure::Maxiter(format!("{stuck} sweep points hit the iteration limit")));
    }
    Ok(())
}

fn write_table(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), Failure> {
    let mut buf = format!("{COMPETITOR_HEADER}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header).map_err(|e| Failure::Config(e.to_string()))?;
        for row in rows {
            w.write_record(row.iter().map(|v| v.to_string())).map_err(|e| Failure::Config(e.to_string()))?;
        }
        w.flush()?;
    }
    fs::write(path, buf).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

pub fn competitor(job: &JobArgs, kind: CompetitorKind, lambdas: Option<&str>) -> Result<(), Failure> {
    let mu = need(job.mu, "mu")?;
    let params = params(job, job.alpha.unwrap_or(0.0), mu)?;
    let lambdas = lambdas.map(parse_range).transpose()?.unwrap_or_else(|| DEFAULT_LAMBDAS.to_vec());
    if lambdas.iter().any(|&l| !(l > 0.0)) {
        return Err(Failure::Config("frequencies must be positive".into()));
    }
    let dir = out_dir(job)?;
    let table = dir.join("energies.csv");
    match kind {
        CompetitorKind::Tent => {
            let spec = load_spec(job)?;
            let h = job.h.unwrap_or(0.1);
            let mut rows = Vec::new();
            let mut last = None;
            for n in 1..=job.n.unwrap_or(4) {
                let t = tent_competitor(&spec, n, mu, h)?;
                rows.push(vec![n as f64, t.epsilon, t.max_distance, t.function.energy(&params)]);
                last = Some(t.function);
            }
            write_table(&table, &["n", "epsilon", "max_distance", "energy"], &rows)?;
            if let Some(u) = last {
                write_function(&dir, "competitor", &u, job.emit_svg)?;
            }
        }
        CompetitorKind::EdgeSoliton => {
            let spec = load_spec(job)?;
            let len = spec
                .edges
                .iter()
                .find(|e| !e.is_halfline())
                .map(|e| e.length)
                .ok_or_else(|| Failure::Spec(format!("spec `{}` has no bounded edge", spec.name)))?;
            let rows: Vec<Vec<f64>> =
                edge_soliton_energies(len, &lambdas, mu, &params)?.into_iter().map(|(l, e)| vec![l, e]).collect();
            write_table(&table, &["lambda", "energy"], &rows)?;
        }
        CompetitorKind::Soliton => {
            let h = job.h.unwrap_or(0.01);
            let mut rows = Vec::new();
            let mut first = None;
            for &l in &lambdas {
                let s = Soliton::new(params.p, SolitonScale::Frequency(l))?;
                let u = s.on_line(SOLITON_WIDTHS / l.sqrt(), h / l.sqrt())?;
                rows.push(vec![l, s.mass(), u.energy(&params.with_mu(s.mass()))]);
                first.get_or_insert(u);
            }
            write_table(&table, &["lambda", "mass", "energy"], &rows)?;
            if let Some(u) = first {
                write_function(&dir, "competitor", &u, job.emit_svg)?;
            }
        }
    }
    println!("{}", table.display());
    Ok(())
}
