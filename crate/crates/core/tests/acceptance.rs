//! Acceptance criteria 1 to 9. Runs as a plain binary so that every
//! criterion prints one line, and exits non-zero if any of them fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stcmc_core::background::{
    make_minkowski, make_minkowski_on, make_perturbed_axisymmetric, make_schwarzschild, NullConeModel, Perturbation,
};
use stcmc_core::barriers::{self, Branch, ConeConstants};
use stcmc_core::base::BaseGrid;
use stcmc_core::cli::verify_suite;
use stcmc_core::flow::{self, ComparisonVerdict, FlowOptions, FlowRun, Prescription};
use stcmc_core::foliation::{self, FoliationOptions, FoliationResult, Termination, UNIQUENESS_AGREEMENT};
use stcmc_core::graph::GraphSurface;
use stcmc_core::stability::{self, EigenOptions};

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: String) -> Verdict {
    Verdict { ok, detail }
}

/// Lower root of `r⁻²(1 − 2M/r) = λ` on `(2M, 3M)` by bisection.
fn schwarzschild_leaf_radius(mass: f64, lambda: f64) -> f64 {
    let g = |r: f64| (1.0 - 2.0 * mass / r) / (r * r) - lambda;
    let (mut lo, mut hi) = (2.0 * mass, 3.0 * mass);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_1(flows: &mut Vec<(usize, FlowRun)>) -> Verdict {
    let t0 = Instant::now();
    let m = make_schwarzschild(1.0, 2.0).unwrap();
    let g = BaseGrid::symmetric(2).unwrap();
    let start = m.s_of_radius(3.0);
    let mut worst: f64 = 0.0;
    let mut all_converged = true;
    for lam in [0.005, 0.01, 0.02, 0.03] {
        let run = flow::run_to_stationary(&m, &g, &Prescription::stcmc(lam).unwrap(), &[start], &FlowOptions::default())
            .unwrap();
        all_converged &= run.converged();
        let r = m.area_radius(run.state.omega()[0]);
        let oracle = schwarzschild_leaf_radius(1.0, lam);
        worst = worst.max((r - oracle).abs() / oracle);
        flows.push((2, run));
    }
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        all_converged && worst < 1e-6 && secs < 5.0,
        format!("max relative radius error {worst:.2e} (< 1e-6), converged {all_converged}, {secs:.2} s (< 5 s)"),
    )
}

fn schwarzschild_sweep() -> (FoliationResult, f64) {
    let m = make_schwarzschild(1.0, 2.0).unwrap();
    let g = BaseGrid::axisymmetric(2, BaseGrid::DEFAULT_N_THETA).unwrap();
    let t0 = Instant::now();
    let res = foliation::sweep(&m, &g, &vec![0.0; g.len()], 1.0, 1.0 / 540.0, &FoliationOptions::default()).unwrap();
    (res, t0.elapsed().as_secs_f64())
}

fn criterion_2(res: &FoliationResult, secs: f64) -> Verdict {
    let m = make_schwarzschild(1.0, 2.0).unwrap();
    let sigma = 1.0 / 27.0;
    let sigma_err = (res.sigma_estimate - sigma).abs() / sigma;
    let last = res.leaves.last().unwrap();
    let r_last = m.area_radius(last.omega()[0]);
    let r_spread = last
        .omega()
        .iter()
        .map(|w| (m.area_radius(*w) - r_last).abs())
        .fold(0.0, f64::max);
    let mono = foliation::monotonicity_check(res);
    let eig = res.eigenvalues();
    let mu_last = *eig.last().unwrap();
    let decreasing = eig.windows(2).all(|w| w[1] < w[0]);
    // an STCMC slice 1% outside r = 3 must be unstable for the crossing to lie in between
    let g = BaseGrid::axisymmetric(2, BaseGrid::DEFAULT_N_THETA).unwrap();
    let s_out = m.s_of_radius(3.0 * 1.01);
    let outside = GraphSurface::new(&m, &g, &vec![s_out; g.len()]).unwrap();
    let lam_out = m.slice_hvec2(s_out, 0.0).unwrap();
    let mu_out = stability::analyze(&m, &outside, lam_out, 1e-10, &EigenOptions::default())
        .unwrap()
        .principal_eigenvalue;
    let ok = res.termination == Termination::InstabilityDetected
        && sigma_err < 0.02
        && (r_last - 3.0).abs() / 3.0 < 0.01
        && r_spread < 1e-9
        && mono.ok
        && decreasing
        && mu_last > 0.0
        && mu_out < 0.0
        && secs < 60.0;
    verdict(
        ok,
        format!(
            "{} leaves, termination {}, sigma_estimate {:.6} ({:.3}% off 1/27), final radius {r_last:.5}, \
             eigenvalue {mu_last:.2e} on the last leaf and {mu_out:.2e} at r = 3.03, monotone {}, {secs:.2} s",
            res.len(),
            res.termination,
            res.sigma_estimate,
            100.0 * sigma_err,
            mono.ok
        ),
    )
}

/// `𝒟(n, c_R, 0, 0)` as printed for the vacuum shear-free case.
fn closed_form(n: f64, c: f64) -> f64 {
    n * n / (1.0 + n * c).powi(2) * ((n - 2.0) * (n - 10.0) / (4.0 * n * n) + (n + 6.0) / n * c + c * c)
}

fn criterion_3() -> Verdict {
    let mut worst: f64 = 0.0;
    for n in 2..=12usize {
        for k in 0..=10 {
            let c = k as f64 / 10.0;
            let d = barriers::discriminant(n, c, 0.0, 0.0).unwrap().script_d;
            worst = worst.max((d - closed_form(n as f64, c)).abs());
        }
    }
    let z2 = barriers::discriminant(2, 0.0, 0.0, 0.0).unwrap().script_d;
    let z10 = barriers::discriminant(10, 0.0, 0.0, 0.0).unwrap().script_d;
    verdict(
        worst < 1e-12 && z2.abs() < 1e-12 && z10.abs() < 1e-12,
        format!("max deviation {worst:.2e} over 121 pairs, D(2,0) = {z2:.1e}, D(10,0) = {z10:.1e}"),
    )
}

fn builtin_models() -> Vec<(String, NullConeModel, bool)> {
    let mink2 = make_minkowski(2, 1.0).unwrap();
    let schw = make_schwarzschild(1.0, 2.0).unwrap();
    let mut v = vec![
        ("minkowski n=2".to_string(), mink2.clone(), true),
        ("minkowski n=3".to_string(), make_minkowski(3, 1.0).unwrap(), true),
        ("minkowski n=7".to_string(), make_minkowski(7, 1.0).unwrap(), true),
        ("schwarzschild".to_string(), schw.clone(), true),
    ];
    let uniform = Perturbation {
        ricci0: 0.2,
        ..Default::default()
    };
    v.push((
        "uniform ricci".into(),
        make_perturbed_axisymmetric(&mink2, uniform, 64).unwrap(),
        true,
    ));
    let general = Perturbation {
        ricci0: 0.1,
        ricci1: 0.05,
        ricci_abs: 0.02,
        shear0: 0.05,
        shear1: 0.03,
        theta_cos: 0.1,
        zeta: 0.05,
        ..Default::default()
    };
    v.push((
        "perturbed minkowski".into(),
        make_perturbed_axisymmetric(&mink2, general, 64).unwrap(),
        false,
    ));
    v.push((
        "perturbed schwarzschild".into(),
        make_perturbed_axisymmetric(&schw, general, 64).unwrap(),
        false,
    ));
    v
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violations = 0;
    let mut worst_eq: f64 = 0.0;
    let mut count = 0;
    for (name, m, coincide) in builtin_models() {
        let g = BaseGrid::axisymmetric(2, 64).unwrap();
        let s_max = 0.999 * m.lambda();
        let c: ConeConstants = barriers::cone_constants(&m, &g, s_max, 256).unwrap();
        let n = m.dim();
        let (w, z) = (c.w(n), c.z(n));
        for _ in 0..1000 {
            let s = rng.gen_range(0.0..s_max);
            let t = rng.gen_range(0.0..=PI);
            let tb = m.theta_bar(s, t).unwrap();
            let (lo, hi) = (z / (z + s), w / (w + s));
            if tb < lo - 1e-12 || tb > hi + 1e-12 {
                violations += 1;
                eprintln!("sandwich violated on {name} at s = {s}, theta = {t}: {lo} <= {tb} <= {hi}");
            }
            if coincide {
                worst_eq = worst_eq.max((tb - hi).abs()).max((tb - lo).abs());
            }
            count += 1;
        }
    }
    verdict(
        violations == 0 && worst_eq < 1e-10,
        format!("{count} points on 7 models, {violations} violations, equality cases within {worst_eq:.1e}"),
    )
}

fn criterion_5() -> Verdict {
    let reports = verify_suite(&[0.2, 0.1, 0.05, 0.025], 32).unwrap();
    let mut parts = Vec::new();
    let mut ok = true;
    for (eq, need_models) in [("metric", 2), ("H", 2), ("u", 2), ("speed", 1), ("raychaudhuri", 1)] {
        let mut models: Vec<&str> = reports
            .iter()
            .filter(|r| r.equation_id == eq && r.order.is_some_and(|p| p >= r.expected_order))
            .map(|r| r.model.as_str())
            .collect();
        models.sort();
        models.dedup();
        let min_order = reports
            .iter()
            .filter(|r| r.equation_id == eq)
            .filter_map(|r| r.order)
            .fold(f64::INFINITY, f64::min);
        let all_pass = reports.iter().filter(|r| r.equation_id == eq).all(|r| r.ok);
        ok &= models.len() >= need_models && all_pass;
        parts.push(format!("{eq} min order {min_order:.3} on {} models", models.len()));
    }
    verdict(ok, parts.join(", "))
}

fn random_model(rng: &mut ChaCha8Rng) -> (NullConeModel, &'static str) {
    let schw = make_schwarzschild(1.0, 2.0).unwrap();
    match rng.gen_range(0..3) {
        0 => (schw, "schwarzschild"),
        1 => {
            let p = Perturbation {
                ricci0: rng.gen_range(0.0..0.05),
                ricci1: rng.gen_range(-0.02..0.02),
                shear0: rng.gen_range(0.0..0.03),
                shear1: rng.gen_range(-0.02..0.02),
                theta_cos: rng.gen_range(-0.05..0.05),
                zeta: rng.gen_range(-0.03..0.03),
                ..Default::default()
            };
            (make_perturbed_axisymmetric(&schw, p, 32).unwrap(), "perturbed schwarzschild")
        }
        _ => (make_minkowski_on(2, 1.0, 10.0).unwrap(), "minkowski"),
    }
}

/// Draws `(λ, ω₀)` with `max f ≤ 0` initially.
fn admissible_start(m: &NullConeModel, g: &BaseGrid, rng: &mut ChaCha8Rng) -> (f64, Vec<f64>) {
    loop {
        let s0 = rng.gen_range(0.3..1.5);
        let amp = rng.gen_range(-0.03..0.03);
        let omega: Vec<f64> = g.sample(|t| s0 + amp * t.cos());
        let surf = GraphSurface::new(m, g, &omega).unwrap();
        let min_h = surf.hvec2().iter().copied().fold(f64::INFINITY, f64::min);
        if min_h <= 0.0 {
            continue;
        }
        let lam = min_h * rng.gen_range(0.3..0.95);
        return (lam, omega);
    }
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let g = BaseGrid::axisymmetric(2, 32).unwrap();
    let opts = FlowOptions {
        max_steps: 3000,
        ..Default::default()
    };
    let mut sign_fail = 0;
    let mut crossings = 0;
    let mut worst_ratio: f64 = f64::NEG_INFINITY;
    for _ in 0..50 {
        let (m, _) = random_model(&mut rng);
        let (lam, omega) = admissible_start(&m, &g, &mut rng);
        let presc = Prescription::stcmc(lam).unwrap();
        let run = flow::run_to_stationary(&m, &g, &presc, &omega, &opts).unwrap();
        let rep = flow::speed_sign_monitor(&run.state.history, run.tol);
        if !rep.ok {
            sign_fail += 1;
        }
        worst_ratio = worst_ratio.max(rep.max_f / run.tol);
        let lam_b = lam * rng.gen_range(1.0..1.5);
        let lift = rng.gen_range(0.0..0.2);
        let omega_b: Vec<f64> = omega.iter().map(|w| w + lift).collect();
        let cmp = flow::comparison_check(
            &m,
            &g,
            &presc,
            &omega,
            &Prescription::stcmc(lam_b).unwrap(),
            &omega_b,
            &opts,
            400,
        )
        .unwrap();
        if cmp.verdict == ComparisonVerdict::Violated {
            crossings += 1;
        }
    }
    verdict(
        sign_fail == 0 && crossings == 0,
        format!("50 runs: {sign_fail} sign violations (max f / tol = {worst_ratio:.2}), {crossings} comparison crossings"),
    )
}

fn criterion_7(res: &FoliationResult) -> Verdict {
    let m = make_schwarzschild(1.0, 2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = FoliationOptions::default().flow;
    let mut worst: f64 = 0.0;
    let mut fails = 0;
    let mut total = 0;
    for k in 1..res.len() - 1 {
        for _ in 0..3 {
            let p = foliation::random_restart_perturbation(res, k, &mut rng);
            let r = foliation::uniqueness_restart(&m, res, k, &p, &opts, UNIQUENESS_AGREEMENT).unwrap();
            worst = worst.max(r.sup_diff);
            total += 1;
            if !r.ok {
                fails += 1;
            }
        }
    }
    verdict(
        fails == 0 && total > 0,
        format!("{total} restarts on {} interior leaves, {fails} failures, max sup difference {worst:.2e}", res.len() - 2),
    )
}

fn monitor_flows(
    n: usize,
    flows: &[(usize, FlowRun)],
    extra: Option<(&NullConeModel, f64, f64)>,
    cert: &barriers::BarrierCertificate,
) -> (usize, f64) {
    let mut steps = 0;
    let mut min_margin = f64::INFINITY;
    let mut check = |s: &GraphSurface| {
        let r = barriers::key_inequality_monitor(cert, s).unwrap();
        steps += 1;
        min_margin = min_margin.min(r.min_margin);
    };
    if let Some((m, s0, lam)) = extra {
        let g = BaseGrid::symmetric(n).unwrap();
        let opts = FlowOptions {
            max_steps: 400,
            ..Default::default()
        };
        let mut surfaces = Vec::new();
        flow::run_observed(m, &g, &Prescription::stcmc(lam).unwrap(), &[s0], &opts, &mut |st| {
            surfaces.push(st.surface.clone())
        })
        .unwrap();
        surfaces.iter().for_each(&mut check);
    }
    let m = make_schwarzschild(1.0, 2.0).unwrap();
    let g = BaseGrid::symmetric(2).unwrap();
    for (dim, run) in flows {
        if *dim != n {
            continue;
        }
        for rec in &run.state.history {
            // rebuild each accepted state from its recorded height (symmetric runs)
            let s = GraphSurface::new(&m, &g, &[rec.min_omega]).unwrap();
            check(&s);
        }
    }
    (steps, min_margin)
}

fn criterion_8(flows: &[(usize, FlowRun)]) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [2usize, 3, 7] {
        let rep = barriers::discriminant(n, 0.0, 0.0, 0.0).unwrap();
        let interval = (0.0, 10.0);
        let cert = barriers::auto_certificate(&rep, interval).unwrap();
        let chk = barriers::test_function(&cert, interval, 400).unwrap();
        let slope_sign = match rep.branch {
            Branch::Small => chk.samples.iter().all(|p| p.mu_s > 0.0),
            Branch::Large => chk.samples.iter().all(|p| p.mu_s < 0.0),
        };
        let positive = chk.samples.iter().all(|p| p.mu > 0.0);
        let extra_model;
        let extra = if n == 2 {
            None
        } else {
            extra_model = make_minkowski_on(n, 1.0, 40.0).unwrap();
            let s0 = 3.0;
            let lam = 0.9 * extra_model.slice_hvec2(s0, 0.0).unwrap();
            Some((&extra_model, s0, lam))
        };
        let (steps, margin) = monitor_flows(n, flows, extra, &cert);
        let this = chk.max_residual < 1e-8 && positive && slope_sign && steps > 0 && margin > 0.0;
        ok &= this;
        parts.push(format!(
            "n={n}: residual {:.1e}, signs {}, {steps} steps with min margin {margin:.2e}",
            chk.max_residual,
            positive && slope_sign
        ));
    }
    let hb = barriers::height_bound(3, 0.0, barriers::discriminant(3, 0.0, 0.0, 0.0).unwrap().script_d);
    let oracle = 3.0 * ((PI / 1.75f64.sqrt()).exp() - 1.0);
    ok &= (hb - oracle).abs() < 1e-6;
    parts.push(format!("n=3 height bound {hb:.9} vs {oracle:.9}"));
    verdict(ok, parts.join("; "))
}

fn criterion_9() -> Verdict {
    let models = [
        ("minkowski n=2", make_minkowski(2, 1.0).unwrap()),
        ("minkowski n=3", make_minkowski(3, 1.0).unwrap()),
        ("schwarzschild", make_schwarzschild(1.0, 2.0).unwrap()),
    ];
    let mut worst: f64 = 0.0;
    for (_, m) in &models {
        let g = BaseGrid::symmetric(m.dim()).unwrap();
        for i in 0..40 {
            let s = 0.01 + 0.2 * i as f64;
            let surf = GraphSurface::new(m, &g, &[s]).unwrap();
            let lam = m.slice_hvec2(s, 0.0).unwrap();
            let b = stability::stability_b(m, &surf, lam, 1e-12).unwrap()[0];
            let tb = m.theta_bar(s, 0.0).unwrap();
            let h = 1e-4;
            let d = (m.slice_hvec2(s + h, 0.0).unwrap() - m.slice_hvec2(s - h, 0.0).unwrap()) / (2.0 * h);
            worst = worst.max((2.0 * tb * b - d).abs());
        }
    }
    verdict(worst < 1e-6, format!("max |2 theta_bar B - d/ds(2 theta theta_bar)| = {worst:.2e} on 3 models x 40 slices"))
}

fn main() -> ExitCode {
    let mut flows = Vec::new();
    let mut results = Vec::new();
    results.push(("Schwarzschild STCMC oracle", criterion_1(&mut flows)));
    let (sweep, secs) = schwarzschild_sweep();
    results.push(("Foliation termination", criterion_2(&sweep, secs)));
    results.push(("Discriminant closed form", criterion_3()));
    results.push(("Expansion sandwich", criterion_4()));
    results.push(("Evolution-equation residuals", criterion_5()));
    results.push(("Maximum-principle properties", criterion_6()));
    results.push(("Uniqueness", criterion_7(&sweep)));
    results.push(("Barrier certificates", criterion_8(&flows)));
    results.push(("Stability identity", criterion_9()));
    let mut failed = 0;
    for (i, (name, v)) in results.iter().enumerate() {
        println!("criterion {} {name}: {} | {}", i + 1, if v.ok { "PASS" } else { "FAIL" }, v.detail);
        if !v.ok {
            failed += 1;
        }
    }
    println!("acceptance: {}/{} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
