//! `stcmc run <config.toml>` and `stcmc plots <run_dir>`.
//!
//! Exit codes: 0 success, 1 I/O, 2 configuration or input, 3 precondition,
//! 4 non-convergence or failed check, 5 hypothesis violation.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::background::{make_minkowski, make_perturbed_axisymmetric, make_schwarzschild, BaseFamily, NullConeModel, Perturbation};
use crate::barriers;
use crate::base::BaseGrid;
use crate::config::{Command, ConstantsSource, RunConfig};
use crate::error::{Error, Result};
use crate::flow::{self, FlowOptions, Prescription};
use crate::foliation::{self, FoliationOptions, Termination};
use crate::graph::GraphSurface;
use crate::io;
use crate::stability::{self, EigenOptions};
use crate::validate::{self, GraphFamily, ResidualReport};

pub const OUTPUT_ROOT_ENV: &str = "STCMC_OUTPUT_ROOT";
pub const DEFAULT_OUTPUT_ROOT: &str = "runs";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;
pub const EXIT_HYPOTHESIS: i32 = 5;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Config(_) | Error::Parameter(_) | Error::Input(_) => EXIT_CONFIG,
        Error::Precondition(_) | Error::Domain(_) | Error::FocalPoint { .. } => EXIT_PRECONDITION,
        Error::Solver(_) | Error::Eigen { .. } | Error::Discretization(_) => EXIT_NONCONVERGENCE,
        Error::Hypothesis(_) | Error::Interval { .. } => EXIT_HYPOTHESIS,
    }
}

/// Output root from the flag, then the environment, then the default.
pub fn output_root(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_ROOT))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub run_dir: Option<PathBuf>,
    pub summary: Vec<String>,
}

struct Report {
    code: i32,
    files: Vec<String>,
    summary: Vec<String>,
    details: Value,
}

impl Report {
    fn new() -> Self {
        Self {
            code: EXIT_OK,
            files: Vec::new(),
            summary: Vec::new(),
            details: Value::Null,
        }
    }

    fn fail(&mut self, code: i32) {
        if self.code == EXIT_OK {
            self.code = code;
        }
    }
}

/// Loads, runs and records one configuration. Configuration errors are
/// reported before anything is written.
pub fn run_file(path: &Path, root: &Path) -> Outcome {
    match RunConfig::load(path) {
        Ok(cfg) => execute(&cfg, root),
        Err(e) => Outcome {
            exit_code: exit_code(&e),
            run_dir: None,
            summary: vec![e.to_string()],
        },
    }
}

pub fn execute(cfg: &RunConfig, root: &Path) -> Outcome {
    let fail = |e: Error| Outcome {
        exit_code: exit_code(&e),
        run_dir: None,
        summary: vec![e.to_string()],
    };
    let model = match cfg.model.build() {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let grid = match cfg.grid.build(model.dim()) {
        Ok(g) => g,
        Err(e) => return fail(e),
    };
    if cfg.command == Command::Flow {
        if let Err(e) = cfg.flow.prescription() {
            return fail(e);
        }
    }
    let dir = root.join(cfg.run_dir_name());
    if let Err(e) = fs::create_dir_all(&dir) {
        return fail(Error::from(e));
    }
    let result = match cfg.command {
        Command::Flow => run_flow(cfg, &model, &grid, &dir),
        Command::Foliate => run_foliate(cfg, &model, &grid, &dir),
        Command::Stability => run_stability(cfg, &model, &grid, &dir),
        Command::Barriers => run_barriers(cfg, &model, &grid, &dir),
        Command::Verify => run_verify(cfg, &dir),
    };
    let rep = result.unwrap_or_else(|e| Report {
        code: exit_code(&e),
        files: Vec::new(),
        summary: vec![format!("error: {e}")],
        details: json!({ "error": e.to_string() }),
    });
    if let Err(e) = write_manifest(cfg, &dir, &rep) {
        return fail(e);
    }
    Outcome {
        exit_code: rep.code,
        run_dir: Some(dir),
        summary: rep.summary,
    }
}

fn write_manifest(cfg: &RunConfig, dir: &Path, rep: &Report) -> Result<()> {
    let mut files = rep.files.clone();
    files.extend(["config.toml".to_string(), "summary.txt".to_string()]);
    let manifest = json!({
        "tool": "stcmc",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cfg.command.name(),
        "seed": cfg.seed,
        "exit_code": rep.code,
        "config": cfg,
        "outputs": files,
        "results": rep.details,
    });
    io::write_json(&dir.join("manifest.json"), &manifest)?;
    fs::write(dir.join("config.toml"), cfg.to_toml()?)?;
    let mut text = rep.summary.join("\n");
    text.push('\n');
    fs::write(dir.join("summary.txt"), text)?;
    Ok(())
}

fn surface_rows(s: &GraphSurface, extra: &[&[f64]]) -> Vec<Vec<f64>> {
    (0..s.len())
        .map(|j| {
            let mut row = vec![
                s.grid().nodes()[j],
                s.omega()[j],
                s.u()[j],
                s.mean_curvature()[j],
                s.hvec2()[j],
            ];
            row.extend(extra.iter().map(|c| c[j]));
            row
        })
        .collect()
}

fn run_flow(cfg: &RunConfig, model: &NullConeModel, grid: &BaseGrid, dir: &Path) -> Result<Report> {
    let presc = cfg.flow.prescription()?;
    let omega0 = cfg.flow.initial.sample(grid);
    let run = flow::run_to_stationary(model, grid, &presc, &omega0, &cfg.flow.options)?;
    let mut rep = Report::new();
    let s = &run.state.surface;
    io::write_table(
        &dir.join("omega.csv"),
        &["theta", "omega", "u", "mean_curvature", "hvec2", "speed"],
        surface_rows(s, &[&run.state.speed]),
    )?;
    io::write_records(&dir.join("history.csv"), &run.state.history)?;
    rep.files.extend(["omega.csv".into(), "history.csv".into()]);
    let sign = flow::speed_sign_monitor(&run.state.history, run.tol);
    rep.summary.push(format!(
        "flow {}: t = {}, {} accepted / {} rejected steps, sup |f| = {:e} (tol {:e})",
        run.status,
        run.state.t,
        run.accepted,
        run.rejected,
        run.state.sup_abs_f(),
        run.tol
    ));
    if let Some(m) = &run.message {
        rep.summary.push(m.clone());
    }
    rep.summary.push(format!("speed sign monitor: {}", if sign.ok { "pass" } else { "fail" }));
    if !run.converged() {
        rep.fail(EXIT_NONCONVERGENCE);
    }
    rep.details = json!({
        "status": run.status,
        "t": run.state.t,
        "tol": run.tol,
        "accepted": run.accepted,
        "rejected": run.rejected,
        "sup_abs_f": run.state.sup_abs_f(),
        "message": run.message,
        "speed_sign": sign,
    });
    Ok(rep)
}

fn mots_height(cfg: &RunConfig, model: &NullConeModel) -> f64 {
    cfg.foliate.mots_s.unwrap_or_else(|| match model.base_family() {
        BaseFamily::Schwarzschild { mass, .. } => model.s_of_radius(2.0 * mass),
        BaseFamily::Minkowski { .. } => 0.0,
    })
}

fn run_foliate(cfg: &RunConfig, model: &NullConeModel, grid: &BaseGrid, dir: &Path) -> Result<Report> {
    let f = &cfg.foliate;
    let opts = FoliationOptions {
        flow: FlowOptions {
            tol: Some(f.flow_tol),
            ..Default::default()
        },
        blowup_threshold: f.blowup_threshold,
        ..Default::default()
    };
    let mots = vec![mots_height(cfg, model); grid.len()];
    let res = foliation::sweep(model, grid, &mots, f.lambda_max, f.dlambda, &opts)?;
    let mut rep = Report::new();
    let leaf_dir = dir.join("leaves");
    fs::create_dir_all(&leaf_dir)?;
    for (k, (leaf, st)) in res.leaves.iter().zip(&res.stability).enumerate() {
        let name = format!("leaf_{k:04}.csv");
        io::write_table(
            &leaf_dir.join(&name),
            &["theta", "omega", "u", "mean_curvature", "hvec2", "b", "eigenfunction"],
            surface_rows(leaf, &[&st.b, &st.eigenfunction]),
        )?;
        rep.files.push(format!("leaves/{name}"));
    }
    let mono = foliation::monotonicity_check(&res);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut restarts = Vec::new();
    for k in 1..res.len().saturating_sub(1) {
        for _ in 0..f.restarts {
            let p = foliation::random_restart_perturbation(&res, k, &mut rng);
            restarts.push(foliation::uniqueness_restart(model, &res, k, &p, &opts.flow, f.agreement)?);
        }
    }
    let unique_ok = restarts.iter().all(|r| r.ok);
    let leaves: Vec<Value> = res
        .leaves
        .iter()
        .zip(&res.lambdas)
        .zip(&res.stability)
        .map(|((l, lam), st)| {
            let lo = l.omega().iter().copied().fold(f64::INFINITY, f64::min);
            let hi = l.omega().iter().copied().fold(f64::NEG_INFINITY, f64::max);
            json!({
                "lambda": lam,
                "min_omega": lo,
                "max_omega": hi,
                "radius_min": model.area_radius(lo),
                "radius_max": model.area_radius(hi),
                "eigenvalue": st.principal_eigenvalue,
                "stable": st.stable,
            })
        })
        .collect();
    let summary = json!({
        "termination": res.termination,
        "sigma_estimate": res.sigma_estimate,
        "region_top": res.region_top,
        "lambdas": res.lambdas,
        "eigenvalues": res.eigenvalues(),
        "flow_steps": res.flow_steps,
        "leaves": leaves,
        "monotonicity": mono,
        "uniqueness": restarts,
        "diagnostics": res.diagnostics,
    });
    io::write_json(&dir.join("foliation.json"), &summary)?;
    rep.files.push("foliation.json".into());
    rep.summary.push(format!(
        "foliation: {} leaves, termination {}, sigma_estimate {}",
        res.len(),
        res.termination,
        res.sigma_estimate
    ));
    rep.summary.push(format!(
        "monotonicity: {} (min gap {:e})",
        if mono.ok { "pass" } else { "fail" },
        mono.min_gap
    ));
    rep.summary.push(format!(
        "uniqueness restarts: {}/{} pass",
        restarts.iter().filter(|r| r.ok).count(),
        restarts.len()
    ));
    if res.termination == Termination::Aborted || !mono.ok || !unique_ok {
        rep.fail(EXIT_NONCONVERGENCE);
    }
    rep.details = json!({
        "termination": res.termination,
        "sigma_estimate": res.sigma_estimate,
        "leaves": res.len(),
        "monotone": mono.ok,
        "unique": unique_ok,
    });
    Ok(rep)
}

fn run_stability(cfg: &RunConfig, model: &NullConeModel, grid: &BaseGrid, dir: &Path) -> Result<Report> {
    let st = &cfg.stability;
    let slice = vec![st.s; grid.len()];
    let (omega, lambda) = match st.lambda {
        Some(l) => {
            let opts = FlowOptions {
                tol: Some(1e-11),
                require_descending: false,
                ..Default::default()
            };
            let run = flow::run_to_stationary(model, grid, &Prescription::stcmc(l)?, &slice, &opts)?;
            if !run.converged() {
                return Err(Error::Solver(format!(
                    "flow to the {l}-leaf ended with {}",
                    run.status
                )));
            }
            (run.state.omega().to_vec(), l)
        }
        None => {
            let s = GraphSurface::new(model, grid, &slice)?;
            let mean = s.hvec2().iter().sum::<f64>() / s.len() as f64;
            (slice, mean)
        }
    };
    let surface = GraphSurface::new(model, grid, &omega)?;
    let eig = EigenOptions {
        threshold: st.threshold,
        ..Default::default()
    };
    let report = stability::analyze(model, &surface, lambda, st.stcmc_tol, &eig)?;
    let mut rep = Report::new();
    io::write_table(
        &dir.join("stability.csv"),
        &["theta", "omega", "u", "mean_curvature", "hvec2", "b", "eigenfunction"],
        surface_rows(&surface, &[&report.b, &report.eigenfunction]),
    )?;
    io::write_json(
        &dir.join("stability.json"),
        &json!({
            "lambda": lambda,
            "principal_eigenvalue": report.principal_eigenvalue,
            "stable": report.stable,
            "threshold": report.threshold,
            "b_positive": report.b_positive,
            "min_b": report.min_b(),
            "max_b": report.max_b(),
            "iterations": report.iterations,
            "residual": report.residual,
        }),
    )?;
    rep.files.extend(["stability.csv".into(), "stability.json".into()]);
    rep.summary.push(format!(
        "lambda = {lambda}: principal eigenvalue {:e}, {}",
        report.principal_eigenvalue,
        if report.stable { "stable" } else { "not stable" }
    ));
    rep.details = json!({
        "lambda": lambda,
        "principal_eigenvalue": report.principal_eigenvalue,
        "stable": report.stable,
    });
    Ok(rep)
}

fn run_barriers(cfg: &RunConfig, model: &NullConeModel, grid: &BaseGrid, dir: &Path) -> Result<Report> {
    let b = &cfg.barriers;
    let n = b.dim.unwrap_or(model.dim());
    let (c_r, c_chi, d_c) = match b.constants {
        ConstantsSource::Explicit => (b.c_r, b.c_chi, b.d_c),
        ConstantsSource::Model => {
            let c = barriers::cone_constants(model, grid, b.interval.1.max(1e-9), 64)?;
            (c.c_r, c.c_chi, (c.big_c_r - c.c_r).max(0.0))
        }
    };
    let disc = if b.strict {
        barriers::discriminant_checked(n, c_r, c_chi, d_c)?
    } else {
        barriers::discriminant(n, c_r, c_chi, d_c)?
    };
    let cert = match (b.delta, b.eta) {
        (Some(d), Some(e)) => barriers::certificate(&disc, b.interval, d, e)?,
        (None, None) => barriers::auto_certificate(&disc, b.interval)?,
        _ => return Err(Error::Config("set both or neither of delta and eta".into())),
    };
    let check = barriers::test_function(&cert, b.interval, b.samples)?;
    let mut rep = Report::new();
    io::write_table(
        &dir.join("mu.csv"),
        &["s", "mu", "mu_s", "mu_ss", "residual"],
        check.samples.iter().map(|p| vec![p.s, p.mu, p.mu_s, p.mu_ss, p.residual]),
    )?;
    rep.files.push("mu.csv".into());
    let mu_ok = check.ok(1e-8);
    rep.summary.push(format!(
        "n = {n}: D = {}, B = {}, delta = {}, eta = {}, window end {}, height bound {}",
        disc.script_d, disc.b_coef, cert.delta, cert.eta, cert.window_end, cert.height_bound
    ));
    rep.summary.push(format!(
        "test function: {} (max residual {:e})",
        if mu_ok { "pass" } else { "fail" },
        check.max_residual
    ));
    if let Some(v) = &disc.hypothesis_violation {
        rep.summary.push(format!("hypothesis violated: {v}"));
    }
    if !mu_ok {
        rep.fail(EXIT_HYPOTHESIS);
    }
    let mut monitor = Value::Null;
    if let Some(lam) = b.monitor_lambda {
        if n != model.dim() {
            return Err(Error::Config(format!("monitor needs dim = model dim ({})", model.dim())));
        }
        let omega0 = b.monitor_initial.sample(grid);
        let opts = FlowOptions {
            require_descending: false,
            ..Default::default()
        };
        let mut rows = Vec::new();
        let mut err = None;
        let run = flow::run_observed(model, grid, &Prescription::stcmc(lam)?, &omega0, &opts, &mut |s| {
            match barriers::key_inequality_monitor(&cert, &s.surface) {
                Ok(r) => rows.push(vec![s.t, r.min_margin, r.min_delta_margin, if r.ok { 1.0 } else { 0.0 }]),
                Err(e) => {
                    if err.is_none() {
                        err = Some(e.to_string());
                    }
                }
            }
        })?;
        let ok = err.is_none() && rows.iter().all(|r| r[3] == 1.0);
        io::write_table(&dir.join("monitor.csv"), &["t", "min_margin", "min_delta_margin", "ok"], rows.clone())?;
        rep.files.push("monitor.csv".into());
        rep.summary.push(format!(
            "key inequality along {} steps: {}",
            rows.len(),
            if ok { "pass" } else { "fail" }
        ));
        if !ok {
            rep.fail(EXIT_HYPOTHESIS);
        }
        monitor = json!({ "steps": rows.len(), "ok": ok, "error": err, "flow_status": run.status });
    }
    io::write_json(
        &dir.join("certificate.json"),
        &json!({
            "certificate": cert,
            "test_function_ok": mu_ok,
            "max_residual": check.max_residual,
            "monitor": monitor,
        }),
    )?;
    rep.files.push("certificate.json".into());
    rep.details = json!({
        "script_d": disc.script_d,
        "hypothesis_ok": disc.hypothesis_ok,
        "window_end": cert.window_end,
        "height_bound": cert.height_bound,
        "test_function_ok": mu_ok,
    });
    Ok(rep)
}

/// Standard validation suite on built-in models.
pub fn verify_suite(steps: &[f64], n_theta: usize) -> Result<Vec<ResidualReport>> {
    let mink = make_minkowski(2, 1.0)?;
    let mink3 = make_minkowski(3, 1.0)?;
    let schw = make_schwarzschild(1.0, 2.0)?;
    let bump = Perturbation {
        ricci0: 0.05,
        ricci1: 0.02,
        shear0: 0.03,
        shear1: 0.02,
        theta_cos: 0.1,
        zeta: 0.05,
        ..Default::default()
    };
    let pert = make_perturbed_axisymmetric(&mink, bump, n_theta)?;
    let pert_schw = make_perturbed_axisymmetric(&schw, bump, n_theta)?;
    let sym = BaseGrid::symmetric(2)?;
    let axi = BaseGrid::axisymmetric(2, n_theta)?;
    let axi3 = BaseGrid::axisymmetric(3, n_theta)?;
    let mut out = vec![
        validate::check_metric_evolution(&mink, &sym, &GraphFamily::slices(1.0, 1.0), steps)?,
        validate::check_metric_evolution(&pert, &axi, &GraphFamily::cosine(1.0, 0.1, 1.0, 0.3), steps)?,
        validate::check_metric_evolution(&pert_schw, &axi, &GraphFamily::cosine(0.5, 0.1, 1.0, 0.5), steps)?,
        validate::check_h_evolution(&schw, &sym, &GraphFamily::slices(0.5, 1.0), steps)?,
        validate::check_h_evolution(&schw, &axi, &GraphFamily::cosine(0.5, 0.1, 0.0, 1.0), steps)?,
        validate::check_h_evolution(&mink3, &axi3, &GraphFamily::cosine(0.5, 0.2, 1.0, 0.5), steps)?,
        validate::check_u_evolution(&pert, &axi, &GraphFamily::cosine(1.0, 0.2, 1.0, 0.0), steps)?,
        validate::check_u_evolution(&schw, &axi, &GraphFamily::cosine(1.0, 0.2, 0.3, 0.5), steps)?,
        validate::check_raychaudhuri_on_family(&pert, &axi, &GraphFamily::cosine(1.0, 0.2, 1.0, 0.3), steps)?,
    ];
    out.push(validate::check_speed_evolution(
        &schw,
        &sym,
        &Prescription::stcmc(0.02)?,
        &[0.6],
        1.6,
        &[0.4, 0.2, 0.1, 0.05],
    )?);
    Ok(out)
}

fn run_verify(cfg: &RunConfig, dir: &Path) -> Result<Report> {
    let reports = verify_suite(&cfg.verify.steps, cfg.verify.n_theta)?;
    let mut rep = Report::new();
    let mut rows = Vec::new();
    for (i, r) in reports.iter().enumerate() {
        for (h, res) in r.steps.iter().zip(&r.residuals) {
            rows.push(vec![i as f64, *h, *res]);
        }
        rep.summary.push(format!(
            "{:<13} {:<40} order {:>6} (expected {}): {}",
            r.equation_id,
            r.model,
            r.order.map_or("exact".to_string(), |p| format!("{p:.3}")),
            r.expected_order,
            if r.ok { "pass" } else { "fail" }
        ));
    }
    io::write_json(&dir.join("verify.json"), &reports)?;
    io::write_table(&dir.join("residuals.csv"), &["check", "step", "residual"], rows)?;
    rep.files.extend(["verify.json".into(), "residuals.csv".into()]);
    let ok = reports.iter().all(|r| r.ok);
    if !ok {
        rep.fail(EXIT_NONCONVERGENCE);
    }
    rep.details = json!({ "checks": reports.len(), "all_ok": ok });
    Ok(rep)
}

/// Writes plot-data files for a completed run directory and returns their
/// names.
pub fn emit_plots(run_dir: &Path) -> Result<Vec<String>> {
    let manifest = io::read_json(&run_dir.join("manifest.json"))?;
    let command = manifest["command"]
        .as_str()
        .ok_or_else(|| Error::Input("manifest has no command".into()))?;
    let mut written = Vec::new();
    match command {
        "flow" => {
            let (_, rows) = io::read_table(&run_dir.join("history.csv"))?;
            // columns: t, dt, sup_f, inf_f, argmax_f, max_u, min_omega, max_omega
            let data: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0], r[2].abs().max(r[3].abs())]).collect();
            io::write_plot_data(&run_dir.join("plot_sup_f.dat"), &["sup |f| against flow time".into()], &["t", "sup_abs_f"], &data)?;
            written.push("plot_sup_f.dat".into());
        }
        "foliate" => {
            let fol = io::read_json(&run_dir.join("foliation.json"))?;
            let leaves = fol["leaves"]
                .as_array()
                .ok_or_else(|| Error::Input("foliation.json has no leaves".into()))?;
            let num = |v: &Value, k: &str| v[k].as_f64().unwrap_or(f64::NAN);
            let profile: Vec<Vec<f64>> = leaves
                .iter()
                .map(|l| vec![num(l, "lambda"), num(l, "min_omega"), num(l, "max_omega"), num(l, "radius_min"), num(l, "radius_max")])
                .collect();
            let eig: Vec<Vec<f64>> = leaves.iter().map(|l| vec![num(l, "lambda"), num(l, "eigenvalue")]).collect();
            let note = format!(
                "termination {}, sigma_estimate {}",
                fol["termination"].as_str().unwrap_or("?"),
                fol["sigma_estimate"]
            );
            io::write_plot_data(
                &run_dir.join("plot_leaf_profiles.dat"),
                &[note.clone()],
                &["lambda", "min_omega", "max_omega", "radius_min", "radius_max"],
                &profile,
            )?;
            io::write_plot_data(&run_dir.join("plot_eigenvalue.dat"), &[note], &["lambda", "eigenvalue"], &eig)?;
            written.extend(["plot_leaf_profiles.dat".into(), "plot_eigenvalue.dat".into()]);
        }
        "barriers" => {
            let cert = io::read_json(&run_dir.join("certificate.json"))?;
            let (_, rows) = io::read_table(&run_dir.join("mu.csv"))?;
            let c = &cert["certificate"];
            let notes = vec![
                format!("window_end {}", c["window_end"]),
                format!("valid_interval {} {}", c["valid_interval"][0], c["valid_interval"][1]),
                format!("height_bound {}", c["height_bound"]),
            ];
            io::write_plot_data(&run_dir.join("plot_mu.dat"), &notes, &["s", "mu", "mu_s", "mu_ss", "residual"], &rows)?;
            written.push("plot_mu.dat".into());
        }
        "stability" => {
            let (_, rows) = io::read_table(&run_dir.join("stability.csv"))?;
            let data: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0], r[5], r[6]]).collect();
            io::write_plot_data(&run_dir.join("plot_eigenfunction.dat"), &[], &["theta", "b", "eigenfunction"], &data)?;
            written.push("plot_eigenfunction.dat".into());
        }
        "verify" => {
            let (_, rows) = io::read_table(&run_dir.join("residuals.csv"))?;
            io::write_plot_data(&run_dir.join("plot_residuals.dat"), &["one block per check".into()], &["check", "step", "residual"], &rows)?;
            written.push("plot_residuals.dat".into());
        }
        other => return Err(Error::Input(format!("unknown command {other:?} in manifest"))),
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [
            exit_code(&Error::Config("x".into())),
            exit_code(&Error::Precondition("x".into())),
            exit_code(&Error::Solver("x".into())),
            exit_code(&Error::Hypothesis("x".into())),
            exit_code(&Error::Io("x".into())),
        ];
        for i in 0..codes.len() {
            for j in 0..i {
                assert_ne!(codes[i], codes[j]);
            }
        }
    }

    #[test]
    fn flag_overrides_environment() {
        assert_eq!(output_root(Some(PathBuf::from("a"))), PathBuf::from("a"));
    }
}
