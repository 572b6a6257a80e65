//! STCMC foliations above a stable MOTS by continuation in λ.
//!
//! Each new leaf is reached by raising the previous one along its principal
//! eigenfunction until `min |H⃗|² > λ`, then flowing down with prescription
//! `λ`. The step in λ is halved on lift failure, slow or failed flows, and
//! near-zero eigenvalues; the sweep ends when the step underflows.

use rand::Rng;
use serde::Serialize;

use crate::background::NullConeModel;
use crate::barriers;
use crate::base::BaseGrid;
use crate::error::{Error, Result};
use crate::flow::{self, ExitStatus, FlowOptions, FlowState, Prescription};
use crate::graph::{curvature_proxy, GraphSurface};
use crate::stability::{self, EigenOptions, StabilityReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedLambdaMax,
    LeftCompactRegion,
    CurvatureBlowupProxy,
    InstabilityDetected,
    /// A flow failed at the smallest admissible step; the result is partial.
    Aborted,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Termination::ReachedLambdaMax => "reached_lambda_max",
            Termination::LeftCompactRegion => "left_compact_region",
            Termination::CurvatureBlowupProxy => "curvature_blowup_proxy",
            Termination::InstabilityDetected => "instability_detected",
            Termination::Aborted => "aborted",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoliationOptions {
    /// Flow options for each leaf; `tol` should be well below the accuracy
    /// wanted from restarts.
    pub flow: FlowOptions,
    pub eigen: EigenOptions,
    /// Bound on `sup |H⃗|²` for the input MOTS.
    pub mots_tol: f64,
    pub blowup_threshold: f64,
    /// Largest admissible height. `None` uses `Λ`, reduced to the barrier
    /// height bound when the discriminant is negative.
    pub region_top: Option<f64>,
    /// The sweep stops once the λ step falls below `dlambda / refine_limit`.
    pub refine_limit: f64,
    /// Flows with more accepted steps than this halve the next λ step.
    pub slow_steps: usize,
    /// Flows with fewer accepted steps double it, up to the initial step.
    pub fast_steps: usize,
    pub lift_eps0: f64,
    /// Eigenfunctions with `min/max` above this are replaced by constants.
    pub flat_eigenfunction: f64,
}

impl Default for FoliationOptions {
    fn default() -> Self {
        Self {
            flow: FlowOptions {
                tol: Some(1e-11),
                ..Default::default()
            },
            eigen: EigenOptions::default(),
            mots_tol: 1e-8,
            blowup_threshold: 1e6,
            region_top: None,
            refine_limit: 1024.0,
            slow_steps: 5000,
            fast_steps: 60,
            lift_eps0: 1e-3,
            flat_eigenfunction: 1.0 - 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FoliationResult {
    pub lambdas: Vec<f64>,
    pub leaves: Vec<GraphSurface>,
    pub stability: Vec<StabilityReport>,
    pub termination: Termination,
    /// Largest λ whose leaf is stable.
    pub sigma_estimate: f64,
    pub region_top: f64,
    /// Accepted flow steps per leaf (0 for the MOTS).
    pub flow_steps: Vec<usize>,
    pub diagnostics: Vec<String>,
}

impl FoliationResult {
    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.stability.iter().map(|r| r.principal_eigenvalue).collect()
    }
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Top of the region swept by the foliation.
pub fn default_region_top(model: &NullConeModel, grid: &BaseGrid) -> f64 {
    let lambda = model.lambda();
    let consts = match barriers::cone_constants(model, grid, lambda, 64) {
        Ok(c) => c,
        Err(_) => return lambda,
    };
    let d_c = (consts.big_c_r - consts.c_r).max(0.0);
    match barriers::discriminant(model.dim(), consts.c_r.max(0.0), consts.c_chi, d_c) {
        Ok(rep) if rep.script_d < 0.0 => {
            barriers::height_bound(model.dim(), consts.c_r.max(0.0), rep.script_d).min(lambda)
        }
        _ => lambda,
    }
}

struct Lift {
    omega: Vec<f64>,
}

/// Raises `prev` along `f` until `min |H⃗|² > lambda`. Doubling brackets the
/// maximum of `ε ↦ min |H⃗|²`, golden-section search locates it.
fn lift(
    model: &NullConeModel,
    grid: &BaseGrid,
    prev: &[f64],
    f: &[f64],
    lambda: f64,
    eps0: f64,
) -> Option<Lift> {
    let top = model.lambda();
    let eval = |eps: f64| -> Option<(f64, Vec<f64>)> {
        let omega: Vec<f64> = prev.iter().zip(f).map(|(w, v)| w + eps * v).collect();
        if omega.iter().any(|w| *w >= top) {
            return None;
        }
        let s = GraphSurface::new(model, grid, &omega).ok()?;
        Some((min_of(s.hvec2()) - lambda, omega))
    };
    let (mut lo, mut mid) = (0.0, 0.0);
    let mut g_mid = eval(0.0)?.0;
    let mut eps = eps0;
    let mut hi = None;
    for _ in 0..80 {
        match eval(eps) {
            Some((g, omega)) if g > 0.0 => return Some(Lift { omega }),
            Some((g, _)) if g >= g_mid => {
                lo = mid;
                mid = eps;
                g_mid = g;
                eps *= 2.0;
            }
            _ => {
                hi = Some(eps);
                break;
            }
        }
    }
    let mut hi = hi?;
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let score = |e: f64| eval(e).map(|(g, _)| g).unwrap_or(f64::NEG_INFINITY);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (score(x1), score(x2));
    for _ in 0..200 {
        if f1.max(f2) > 0.0 || hi - lo <= 1e-14 * hi {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = score(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = score(x1);
        }
    }
    let best = if f1 >= f2 { x1 } else { x2 };
    match eval(best) {
        Some((g, omega)) if g > 0.0 => Some(Lift { omega }),
        _ => None,
    }
}

fn lift_direction(report: &StabilityReport, flat: f64) -> Vec<f64> {
    let f = &report.eigenfunction;
    if min_of(f) / max_of(f) > flat {
        vec![1.0; f.len()]
    } else {
        f.clone()
    }
}

fn stcmc_tol(surface: &GraphSurface, flow_tol: f64) -> f64 {
    let tb = surface.background().iter().map(|p| p.theta_bar).fold(0.0, f64::max);
    4.0 * tb * flow_tol
}

/// Continuation in λ from a stable MOTS up to `lambda_max`.
pub fn sweep(
    model: &NullConeModel,
    grid: &BaseGrid,
    mots_omega: &[f64],
    lambda_max: f64,
    dlambda: f64,
    opts: &FoliationOptions,
) -> Result<FoliationResult> {
    if !(dlambda > 0.0) || !(lambda_max > 0.0) {
        return Err(Error::Parameter(format!(
            "need dlambda > 0 and lambda_max > 0, got {dlambda}, {lambda_max}"
        )));
    }
    let mots = GraphSurface::new(model, grid, mots_omega)?;
    let dev = mots.hvec2().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if dev >= opts.mots_tol {
        return Err(Error::Input(format!(
            "initial surface is not a MOTS: sup |Hvec2| = {dev:e} >= {:e}",
            opts.mots_tol
        )));
    }
    let rep0 = stability::analyze(model, &mots, 0.0, opts.mots_tol, &opts.eigen)?;
    if !rep0.stable {
        return Err(Error::Input(format!(
            "MOTS is not stable: principal eigenvalue {:e}",
            rep0.principal_eigenvalue
        )));
    }
    let region_top = opts.region_top.unwrap_or_else(|| default_region_top(model, grid));
    let threshold = opts.eigen.threshold;
    let flow_tol = opts.flow.tol_for(grid.mode());
    let mut res = FoliationResult {
        lambdas: vec![0.0],
        leaves: vec![mots],
        stability: vec![rep0],
        termination: Termination::ReachedLambdaMax,
        sigma_estimate: 0.0,
        region_top,
        flow_steps: vec![0],
        diagnostics: Vec::new(),
    };
    let floor = dlambda / opts.refine_limit;
    let mut dl = dlambda;
    let mut capped = false;
    loop {
        let lam_prev = *res.lambdas.last().unwrap();
        if lam_prev >= lambda_max * (1.0 - 1e-12) {
            res.termination = Termination::ReachedLambdaMax;
            break;
        }
        if dl < floor {
            res.termination = Termination::InstabilityDetected;
            break;
        }
        let lam = (lam_prev + dl).min(lambda_max);
        let prev = res.leaves.last().unwrap();
        let dir = lift_direction(res.stability.last().unwrap(), opts.flat_eigenfunction);
        let Some(l) = lift(model, grid, prev.omega(), &dir, lam, opts.lift_eps0) else {
            res.diagnostics.push(format!("lambda = {lam}: no lift above target, halving step"));
            dl *= 0.5;
            capped = true;
            continue;
        };
        let run = flow::run_to_stationary(model, grid, &Prescription::stcmc(lam)?, &l.omega, &opts.flow)?;
        match run.status {
            ExitStatus::Converged => {}
            ExitStatus::DomainExit => {
                res.diagnostics.push(format!("lambda = {lam}: {}", run.message.unwrap_or_default()));
                res.termination = Termination::LeftCompactRegion;
                break;
            }
            _ => {
                let msg = format!(
                    "lambda = {lam}: flow {} ({})",
                    run.status,
                    run.message.clone().unwrap_or_default()
                );
                res.diagnostics.push(msg);
                dl *= 0.5;
                capped = true;
                if dl < floor {
                    res.termination = Termination::Aborted;
                    break;
                }
                continue;
            }
        }
        let leaf = run.state.surface;
        if max_of(leaf.omega()) >= region_top {
            res.diagnostics.push(format!(
                "lambda = {lam}: leaf reaches {} >= region top {region_top}",
                max_of(leaf.omega())
            ));
            res.termination = Termination::LeftCompactRegion;
            break;
        }
        let gap = leaf
            .omega()
            .iter()
            .zip(prev.omega())
            .map(|(a, b)| a - b)
            .fold(f64::INFINITY, f64::min);
        if !(gap > 0.0) {
            res.diagnostics.push(format!("lambda = {lam}: leaf not above previous (gap {gap:e})"));
            dl *= 0.5;
            capped = true;
            continue;
        }
        let proxy = curvature_proxy(&leaf);
        if proxy > opts.blowup_threshold {
            res.diagnostics.push(format!("lambda = {lam}: curvature proxy {proxy:e}"));
            res.termination = Termination::CurvatureBlowupProxy;
            break;
        }
        let rep = stability::analyze(model, &leaf, lam, stcmc_tol(&leaf, flow_tol), &opts.eigen)?;
        let mu = rep.principal_eigenvalue;
        if mu < 10.0 * threshold {
            if dl * 0.5 >= floor {
                res.diagnostics.push(format!("lambda = {lam}: eigenvalue {mu:e} near zero, refining"));
                dl *= 0.5;
                capped = true;
                continue;
            }
            let stable = rep.stable;
            res.lambdas.push(lam);
            res.leaves.push(leaf);
            res.stability.push(rep);
            res.flow_steps.push(run.accepted);
            if stable {
                res.sigma_estimate = lam;
            }
            res.termination = Termination::InstabilityDetected;
            break;
        }
        res.lambdas.push(lam);
        res.leaves.push(leaf);
        res.stability.push(rep);
        res.flow_steps.push(run.accepted);
        res.sigma_estimate = lam;
        if run.accepted > opts.slow_steps {
            dl *= 0.5;
        } else if run.accepted < opts.fast_steps && !capped {
            dl = (2.0 * dl).min(dlambda);
        }
    }
    Ok(res)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub ok: bool,
    /// `min (ω_{k+1} − ω_k)` per consecutive pair.
    pub min_gaps: Vec<f64>,
    pub min_gap: f64,
    /// Smallest one-sided difference quotient `(ω_{k+1} − ω_k)/(λ_{k+1} − λ_k)`.
    pub min_dlambda_omega: f64,
    pub first_violation: Option<usize>,
}

pub fn monotonicity_check(result: &FoliationResult) -> MonotonicityReport {
    let mut min_gaps = Vec::new();
    let mut min_dl = f64::INFINITY;
    let mut first_violation = None;
    for k in 1..result.leaves.len() {
        let g = result.leaves[k]
            .omega()
            .iter()
            .zip(result.leaves[k - 1].omega())
            .map(|(a, b)| a - b)
            .fold(f64::INFINITY, f64::min);
        let dlam = result.lambdas[k] - result.lambdas[k - 1];
        let q = if dlam > 0.0 { g / dlam } else { f64::NEG_INFINITY };
        min_dl = min_dl.min(q);
        if !(g > 0.0 && q > 0.0) && first_violation.is_none() {
            first_violation = Some(k - 1);
        }
        min_gaps.push(g);
    }
    MonotonicityReport {
        ok: first_violation.is_none(),
        min_gap: min_of(&min_gaps),
        min_gaps,
        min_dlambda_omega: min_dl,
        first_violation,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub k: usize,
    pub lambda: f64,
    pub status: ExitStatus,
    pub sup_diff: f64,
    pub agreement: f64,
    pub ok: bool,
    pub steps: usize,
}

/// Agreement demanded of restarted leaves, in sup norm.
pub const UNIQUENESS_AGREEMENT: f64 = 1e-6;

/// Reruns the flow for `λ_k` from `leaf_k + perturbation` and compares the
/// limit with `leaf_k`. The start must lie strictly between the neighbouring
/// leaves.
pub fn uniqueness_restart(
    model: &NullConeModel,
    result: &FoliationResult,
    k: usize,
    perturbation: &[f64],
    opts: &FlowOptions,
    agreement: f64,
) -> Result<UniquenessReport> {
    if k == 0 || k + 1 >= result.leaves.len() {
        return Err(Error::Precondition(format!(
            "leaf {k} is not interior to a foliation of {} leaves",
            result.leaves.len()
        )));
    }
    let leaf = &result.leaves[k];
    if perturbation.len() != leaf.len() {
        return Err(Error::Input("perturbation length does not match the grid".into()));
    }
    let start: Vec<f64> = leaf.omega().iter().zip(perturbation).map(|(w, p)| w + p).collect();
    let below = result.leaves[k - 1].omega();
    let above = result.leaves[k + 1].omega();
    if start.iter().zip(below).any(|(s, b)| s <= b) || start.iter().zip(above).any(|(s, a)| s >= a) {
        return Err(Error::Precondition(format!(
            "restart for leaf {k} leaves the band between leaves {} and {}",
            k - 1,
            k + 1
        )));
    }
    let lambda = result.lambdas[k];
    let opts = FlowOptions {
        require_descending: false,
        ..*opts
    };
    let run = flow::run_to_stationary(model, leaf.grid(), &Prescription::stcmc(lambda)?, &start, &opts)?;
    let sup_diff = run
        .state
        .omega()
        .iter()
        .zip(leaf.omega())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(UniquenessReport {
        k,
        lambda,
        status: run.status,
        sup_diff,
        agreement,
        ok: run.converged() && sup_diff < agreement,
        steps: run.accepted,
    })
}

/// Random perturbation `ε(1 + c cos ϑ)` with `ε` drawn from
/// `[0.2, 1]·min(0.01, gap/2)` and `|c| ≤ 0.1`, where `gap` is the distance
/// to the leaf above.
pub fn random_restart_perturbation<R: Rng>(result: &FoliationResult, k: usize, rng: &mut R) -> Vec<f64> {
    let leaf = &result.leaves[k];
    let gap = result
        .leaves
        .get(k + 1)
        .map(|up| {
            up.omega()
                .iter()
                .zip(leaf.omega())
                .map(|(a, b)| a - b)
                .fold(f64::INFINITY, f64::min)
        })
        .unwrap_or(0.02);
    let scale = 0.01f64.min(0.5 * gap);
    let eps = scale * rng.gen_range(0.2..=1.0);
    let c = rng.gen_range(-0.1..=0.1);
    leaf.grid().nodes().iter().map(|t| eps * (1.0 + c * t.cos())).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallOscReport {
    pub c1: f64,
    pub a: f64,
    pub initial: f64,
    /// Root of `3φ² = C₁(1 + φ^{3/2})`.
    pub theoretical: f64,
    pub cap: f64,
    pub sup_phi: f64,
    /// `sup φ̃` per observed state.
    pub series: Vec<f64>,
    pub domain_exit: Option<String>,
    pub ok: bool,
}

/// Tracks `φ̃ = u μ(ω − ω̂)⁻²(ω − ω̂)` with `μ(s) = 1 − a²s²` along a flow.
pub struct SmallOscMonitor {
    reference: Vec<f64>,
    c1: f64,
    a: f64,
    series: Vec<f64>,
    domain_exit: Option<String>,
}

impl SmallOscMonitor {
    /// `C₁` is the sup of the `|Φ|`, `|Ψ|` bounds over heights
    /// `[min ω̂, max ω̂ + 1/2]`, which contains the monitored band since `a ≥ 1`.
    pub fn new(model: &NullConeModel, reference: &GraphSurface) -> Result<Self> {
        let w = reference.omega();
        let hi = (max_of(w) + 0.5).min(model.lambda() * (1.0 - 1e-9));
        let c1 = barriers::phi_psi_sup(model, reference.grid(), min_of(w), hi, 64)?;
        let a = (c1 + c1 * c1 + 1.0).sqrt();
        Ok(Self {
            reference: w.to_vec(),
            c1,
            a,
            series: Vec::new(),
            domain_exit: None,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn observe(&mut self, state: &FlowState) {
        let band = 0.5 / self.a;
        let mut sup: f64 = 0.0;
        for ((w, r), u) in state.omega().iter().zip(&self.reference).zip(state.surface.u()) {
            let d = w - r;
            if !(0.0..=band).contains(&d) && self.domain_exit.is_none() {
                self.domain_exit = Some(format!(
                    "omega - omega_hat = {d:e} outside [0, {band:e}] at t = {}",
                    state.t
                ));
            }
            let mu = 1.0 - self.a * self.a * d * d;
            sup = sup.max(u * d / (mu * mu));
        }
        self.series.push(sup);
    }

    pub fn report(&self) -> SmallOscReport {
        let initial = self.series.first().copied().unwrap_or(0.0);
        let c = self.c1;
        let g = |p: f64| 3.0 * p * p - c * (1.0 + p.powf(1.5));
        let (mut lo, mut hi) = (0.0, 1.0);
        while g(hi) < 0.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if g(m) < 0.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        let theoretical = hi;
        let cap = 2.0 * (initial + theoretical);
        let sup_phi = self.series.iter().copied().fold(0.0, f64::max);
        SmallOscReport {
            c1: c,
            a: self.a,
            initial,
            theoretical,
            cap,
            sup_phi,
            series: self.series.clone(),
            domain_exit: self.domain_exit.clone(),
            ok: self.domain_exit.is_none() && sup_phi <= cap,
        }
    }
}

/// Runs the flow from `omega0` and monitors it against `reference`.
pub fn small_osc_monitor(
    model: &NullConeModel,
    prescription: &Prescription,
    omega0: &[f64],
    reference: &GraphSurface,
    opts: &FlowOptions,
) -> Result<(flow::FlowRun, SmallOscReport)> {
    let mut mon = SmallOscMonitor::new(model, reference)?;
    let run = flow::run_observed(model, reference.grid(), prescription, omega0, opts, &mut |s| mon.observe(s))?;
    Ok((run, mon.report()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::{make_minkowski, make_schwarzschild};

    #[test]
    fn minkowski_has_no_mots() {
        let m = make_minkowski(2, 1.0).unwrap();
        let g = BaseGrid::axisymmetric(2, 16).unwrap();
        let r = sweep(&m, &g, &vec![0.0; 16], 0.1, 0.01, &FoliationOptions::default());
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn short_schwarzschild_sweep() {
        let m = make_schwarzschild(1.0, 2.0).unwrap();
        let g = BaseGrid::axisymmetric(2, 32).unwrap();
        let r = sweep(&m, &g, &vec![0.0; 32], 0.01, 1.0 / 540.0, &FoliationOptions::default()).unwrap();
        assert_eq!(r.termination, Termination::ReachedLambdaMax);
        assert_eq!(r.leaves[0].omega(), &vec![0.0; 32][..]);
        assert!(monotonicity_check(&r).ok);
        let last = r.leaves.last().unwrap();
        let lam = *r.lambdas.last().unwrap();
        assert!((lam - 0.01).abs() < 1e-15);
        assert!(last.hvec2().iter().all(|h| (h - lam).abs() < 1e-9));
    }

    #[test]
    fn duplicated_leaf_is_flagged() {
        let m = make_schwarzschild(1.0, 2.0).unwrap();
        let g = BaseGrid::symmetric(2).unwrap();
        let mut r = sweep(&m, &g, &[0.0], 0.004, 0.002, &FoliationOptions::default()).unwrap();
        assert!(monotonicity_check(&r).ok);
        r.leaves.push(r.leaves.last().unwrap().clone());
        r.lambdas.push(0.006);
        let rep = monotonicity_check(&r);
        assert!(!rep.ok);
        assert_eq!(rep.first_violation, Some(r.leaves.len() - 2));
    }

    #[test]
    fn restart_contracts() {
        let m = make_schwarzschild(1.0, 2.0).unwrap();
        let g = BaseGrid::axisymmetric(2, 16).unwrap();
        let r = sweep(&m, &g, &vec![0.0; 16], 0.006, 0.002, &FoliationOptions::default()).unwrap();
        let opts = FoliationOptions::default().flow;
        let same = uniqueness_restart(&m, &r, 1, &vec![0.0; 16], &opts, UNIQUENESS_AGREEMENT).unwrap();
        assert!(same.ok && same.sup_diff == 0.0);
        let big = vec![1.0; 16];
        assert!(matches!(
            uniqueness_restart(&m, &r, 1, &big, &opts, UNIQUENESS_AGREEMENT),
            Err(Error::Precondition(_))
        ));
        assert!(uniqueness_restart(&m, &r, 0, &vec![0.0; 16], &opts, 1e-6).is_err());
    }

    #[test]
    fn symmetric_data_has_zero_phi() {
        let m = make_schwarzschild(1.0, 2.0).unwrap();
        let g = BaseGrid::symmetric(2).unwrap();
        let lam = 0.02;
        let leaf_s = {
            let run = flow::run_to_stationary(
                &m,
                &g,
                &Prescription::stcmc(lam).unwrap(),
                &[0.3],
                &FlowOptions::default(),
            )
            .unwrap();
            run.state.omega()[0]
        };
        let reference = GraphSurface::new(&m, &g, &[leaf_s]).unwrap();
        let (_, rep) = small_osc_monitor(
            &m,
            &Prescription::stcmc(lam).unwrap(),
            &[leaf_s + 0.01],
            &reference,
            &FlowOptions::default(),
        )
        .unwrap();
        assert!(rep.ok && rep.sup_phi == 0.0);
        let (_, rep) = small_osc_monitor(
            &m,
            &Prescription::stcmc(lam).unwrap(),
            &[leaf_s + 0.9],
            &reference,
            &FlowOptions::default(),
        )
        .unwrap();
        assert!(rep.domain_exit.is_some() && !rep.ok);
    }
}
