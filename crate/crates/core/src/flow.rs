//! Prescribed mean curvature flow `ẋ = (β − H) L̄` for graphs.
//!
//! In graph form the flow is `∂_t ω = f := β − H`, which is
//! `∂_t ω − Δω = β − θ − uθ̄ + 2ζ(∇ω)`. Each step freezes the metric, treats
//! `Δ` implicitly and the remaining source explicitly:
//!
//! ```text
//! (I − dt Δ) δ = dt f,    ω ← ω + δ.
//! ```
//!
//! Step sizes start from the parabolic bound `c h² / max θ̄` and grow
//! geometrically, capped by `0.5 / max |∂_s(β − θ)|` so that the explicit
//! reaction part cannot overshoot the stationary height.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::background::NullConeModel;
use crate::base::{BaseGrid, GridMode};
use crate::error::{Error, Result};
use crate::graph::GraphSurface;
use crate::linalg::Tridiagonal;

pub type RhoFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Analytic target density
/// `ρ(s, ϑ) = amplitude (1 + cos_coeff cos ϑ) (1 + s/decay_scale)^{−decay_power}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhoProfile {
    pub amplitude: f64,
    #[serde(default)]
    pub cos_coeff: f64,
    #[serde(default = "default_decay_scale")]
    pub decay_scale: f64,
    #[serde(default)]
    pub decay_power: f64,
}

fn default_decay_scale() -> f64 {
    1.0
}

impl RhoProfile {
    fn value(&self, s: f64, theta: f64) -> f64 {
        self.amplitude
            * (1.0 + self.cos_coeff * theta.cos())
            * (1.0 + s / self.decay_scale).powf(-self.decay_power)
    }

    fn derivative_s(&self, s: f64, theta: f64) -> f64 {
        -self.decay_power / (self.decay_scale + s) * self.value(s, theta)
    }
}

#[derive(Clone)]
pub enum Rho {
    Profile(RhoProfile),
    Custom(RhoFn),
}

impl fmt::Debug for Rho {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rho::Profile(p) => f.debug_tuple("Profile").field(p).finish(),
            Rho::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Rho {
    pub fn value(&self, s: f64, theta: f64) -> f64 {
        match self {
            Rho::Profile(p) => p.value(s, theta),
            Rho::Custom(f) => f(s, theta),
        }
    }

    pub fn derivative_s(&self, s: f64, theta: f64) -> f64 {
        match self {
            Rho::Profile(p) => p.derivative_s(s, theta),
            Rho::Custom(f) => {
                let h = 1e-5 * (1.0 + s.abs());
                let lo = (s - h).max(0.0);
                (f(s + h, theta) - f(lo, theta)) / (s + h - lo)
            }
        }
    }
}

/// Target of the flow: `β = λ/(2θ̄)` or `β = ρ/(2θ̄)`.
#[derive(Debug, Clone)]
pub enum Prescription {
    Stcmc(f64),
    Prescribed(Rho),
}

impl Prescription {
    pub fn stcmc(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Parameter(format!(
                "STCMC target must be nonnegative, got {lambda}"
            )));
        }
        Ok(Prescription::Stcmc(lambda))
    }

    /// Target value of `|H⃗|²` at `(s, ϑ)`.
    pub fn target(&self, s: f64, theta: f64) -> f64 {
        match self {
            Prescription::Stcmc(l) => *l,
            Prescription::Prescribed(rho) => rho.value(s, theta),
        }
    }

    pub fn lambda(&self) -> Option<f64> {
        match self {
            Prescription::Stcmc(l) => Some(*l),
            Prescription::Prescribed(_) => None,
        }
    }

    pub fn beta(&self, s: f64, theta: f64, theta_bar: f64) -> f64 {
        self.target(s, theta) / (2.0 * theta_bar)
    }

    /// `∂_s β` given `θ̄` and `∂_s θ̄` at the point.
    pub fn beta_s(&self, s: f64, theta: f64, theta_bar: f64, theta_bar_s: f64) -> f64 {
        let rho = self.target(s, theta);
        let rho_s = match self {
            Prescription::Stcmc(_) => 0.0,
            Prescription::Prescribed(r) => r.derivative_s(s, theta),
        };
        rho_s / (2.0 * theta_bar) - rho * theta_bar_s / (2.0 * theta_bar * theta_bar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub t: f64,
    pub dt: f64,
    pub sup_f: f64,
    pub inf_f: f64,
    /// Polar angle where `f` attains its maximum.
    pub argmax_f: f64,
    pub max_u: f64,
    pub min_omega: f64,
    pub max_omega: f64,
}

#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub surface: GraphSurface,
    pub speed: Vec<f64>,
    pub dt_last: f64,
    pub history: Vec<HistoryRecord>,
}

impl FlowState {
    pub fn new(model: &NullConeModel, grid: &BaseGrid, prescription: &Prescription, omega: &[f64]) -> Result<Self> {
        let surface = GraphSurface::new(model, grid, omega)?;
        let speed = speed_field(&surface, prescription);
        let mut state = Self {
            t: 0.0,
            surface,
            speed,
            dt_last: 0.0,
            history: Vec::new(),
        };
        state.record();
        Ok(state)
    }

    pub fn omega(&self) -> &[f64] {
        self.surface.omega()
    }

    pub fn sup_f(&self) -> f64 {
        self.speed.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn inf_f(&self) -> f64 {
        self.speed.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_abs_f(&self) -> f64 {
        self.speed.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Replaces `self` by `next`, appending its records to the history.
    pub fn advance(&mut self, mut next: FlowState) {
        let mut history = std::mem::take(&mut self.history);
        history.append(&mut next.history);
        next.history = history;
        *self = next;
    }

    fn record(&mut self) {
        let (jmax, sup_f) = self
            .speed
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (j, v)| if v > acc.1 { (j, v) } else { acc });
        let omega = self.surface.omega();
        self.history.push(HistoryRecord {
            t: self.t,
            dt: self.dt_last,
            sup_f,
            inf_f: self.inf_f(),
            argmax_f: self.surface.grid().nodes()[jmax],
            max_u: self.surface.u().iter().copied().fold(0.0, f64::max),
            min_omega: omega.iter().copied().fold(f64::INFINITY, f64::min),
            max_omega: omega.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        });
    }
}

/// `f = β − H` at the nodes.
pub fn speed_field(surface: &GraphSurface, prescription: &Prescription) -> Vec<f64> {
    surface
        .omega()
        .iter()
        .zip(surface.grid().nodes())
        .zip(surface.background().iter().zip(surface.mean_curvature()))
        .map(|((&w, &t), (p, &h))| prescription.beta(w, t, p.theta_bar) - h)
        .collect()
}

/// One semi-implicit step of size `dt`. Leaving `[0, Λ)` yields a domain
/// error whose message names the exit direction. The returned history holds
/// only the new record; [`FlowState::advance`] keeps the full series.
pub fn step(
    state: &FlowState,
    model: &NullConeModel,
    prescription: &Prescription,
    dt: f64,
) -> Result<FlowState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Parameter(format!("dt must be positive, got {dt}")));
    }
    let surface = &state.surface;
    let grid = surface.grid();
    let n = grid.len();
    let rhs: Vec<f64> = state.speed.iter().map(|f| dt * f).collect();
    let delta = match grid.mode() {
        GridMode::Symmetric => rhs,
        GridMode::Axisymmetric => implicit_matrix(surface, dt).solve(&rhs)?,
    };
    let omega: Vec<f64> = surface.omega().iter().zip(&delta).map(|(w, d)| w + d).collect();
    if omega.iter().any(|w| !w.is_finite()) {
        return Err(Error::Solver("non-finite update".into()));
    }
    if let Some(w) = omega.iter().find(|w| **w < 0.0) {
        return Err(Error::Domain(format!("exit below: omega = {w} < 0")));
    }
    if let Some(w) = omega.iter().find(|w| **w >= model.lambda()) {
        return Err(Error::Domain(format!(
            "exit above: omega = {w} >= {}",
            model.lambda()
        )));
    }
    debug_assert_eq!(omega.len(), n);
    let surface = GraphSurface::new(model, grid, &omega)?;
    let speed = speed_field(&surface, prescription);
    let mut next = FlowState {
        t: state.t + dt,
        surface,
        speed,
        dt_last: dt,
        history: Vec::new(),
    };
    next.record();
    Ok(next)
}

fn implicit_matrix(surface: &GraphSurface, dt: f64) -> Tridiagonal {
    let n = surface.len();
    let h2 = surface.grid().spacing().powi(2);
    let w = surface.face_weight();
    let v = surface.volume();
    let mut m = Tridiagonal::zeros(n);
    for j in 0..n {
        let c = dt / (h2 * v[j]);
        let right = if j + 1 < n { w[j] * c } else { 0.0 };
        let left = if j > 0 { w[j - 1] * c } else { 0.0 };
        m.diag[j] = 1.0 + right + left;
        m.upper[j] = -right;
        m.lower[j] = -left;
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitStatus {
    Converged,
    MaxTime,
    DomainExit,
    SolverFailure,
}

impl fmt::Display for ExitStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ExitStatus::Converged => "converged",
            ExitStatus::MaxTime => "max_time",
            ExitStatus::DomainExit => "domain_exit",
            ExitStatus::SolverFailure => "solver_failure",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowOptions {
    /// Convergence threshold on `sup |f|`; `None` picks the mode default.
    pub tol: Option<f64>,
    pub max_time: f64,
    pub max_steps: usize,
    /// Constant `c` of the initial step bound `c h² / max θ̄`.
    pub cfl: f64,
    pub growth: f64,
    pub dt_max: f64,
    /// Fixed step size; disables adaptivity and the reaction cap.
    pub fixed_dt: Option<f64>,
    /// Reject initial data with `max f > tol`.
    pub require_descending: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            tol: None,
            max_time: 1e6,
            max_steps: 200_000,
            cfl: 0.5,
            growth: 1.5,
            dt_max: 1e4,
            fixed_dt: None,
            require_descending: true,
        }
    }
}

impl FlowOptions {
    pub fn tol_for(&self, mode: GridMode) -> f64 {
        self.tol.unwrap_or(match mode {
            GridMode::Symmetric => 1e-8,
            GridMode::Axisymmetric => 1e-6,
        })
    }
}

#[derive(Debug, Clone)]
pub struct FlowRun {
    pub status: ExitStatus,
    pub state: FlowState,
    pub tol: f64,
    pub accepted: usize,
    pub rejected: usize,
    pub message: Option<String>,
}

impl FlowRun {
    pub fn converged(&self) -> bool {
        self.status == ExitStatus::Converged
    }

    pub fn surface(&self) -> &GraphSurface {
        &self.state.surface
    }
}

/// Largest `|∂_s(β − θ)|` over the surface.
fn reaction_rate(state: &FlowState, prescription: &Prescription) -> f64 {
    state
        .surface
        .omega()
        .iter()
        .zip(state.surface.grid().nodes())
        .zip(state.surface.background())
        .map(|((&w, &t), p)| (prescription.beta_s(w, t, p.theta_bar, p.theta_bar_s) - p.theta_s).abs())
        .fold(0.0, f64::max)
}

fn initial_dt(state: &FlowState, opts: &FlowOptions) -> f64 {
    let grid = state.surface.grid();
    let max_tb = state
        .surface
        .background()
        .iter()
        .map(|p| p.theta_bar)
        .fold(0.0, f64::max);
    let h = match grid.mode() {
        GridMode::Symmetric => 1.0,
        GridMode::Axisymmetric => grid.spacing(),
    };
    (opts.cfl * h * h / max_tb).min(opts.dt_max)
}

/// Runs the flow until `sup |β − H| < tol`, `max_time`, or failure. Each
/// accepted state (including the initial one) is passed to `observer`.
pub fn run_observed(
    model: &NullConeModel,
    grid: &BaseGrid,
    prescription: &Prescription,
    omega0: &[f64],
    opts: &FlowOptions,
    observer: &mut dyn FnMut(&FlowState),
) -> Result<FlowRun> {
    let tol = opts.tol_for(grid.mode());
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tol must be positive, got {tol}")));
    }
    let mut state = FlowState::new(model, grid, prescription, omega0)?;
    if opts.require_descending && state.sup_f() > tol {
        return Err(Error::Precondition(format!(
            "initial speed max f = {:e} exceeds tol = {tol:e}; start above the target",
            state.sup_f()
        )));
    }
    observer(&state);
    let mut accepted = 0;
    let mut rejected = 0;
    let mut dt = opts.fixed_dt.unwrap_or_else(|| initial_dt(&state, opts));
    let dt_floor = 1e-14 * dt.max(1e-300);
    let finish = |status, state, message, accepted, rejected| FlowRun {
        status,
        state,
        tol,
        accepted,
        rejected,
        message,
    };
    loop {
        if state.sup_abs_f() < tol {
            return Ok(finish(ExitStatus::Converged, state, None, accepted, rejected));
        }
        if state.t >= opts.max_time || accepted >= opts.max_steps {
            let msg = format!("sup |f| = {:e} at t = {}", state.sup_abs_f(), state.t);
            return Ok(finish(ExitStatus::MaxTime, state, Some(msg), accepted, rejected));
        }
        if opts.fixed_dt.is_none() {
            let rate = reaction_rate(&state, prescription);
            if rate > 0.0 {
                dt = dt.min(0.5 / rate);
            }
            dt = dt.min(opts.dt_max);
        }
        match step(&state, model, prescription, dt) {
            Ok(next) => {
                let grew = next.sup_f() > state.sup_f().max(0.0) + tol;
                if grew && opts.fixed_dt.is_none() && dt > dt_floor {
                    rejected += 1;
                    dt *= 0.5;
                    continue;
                }
                state.advance(next);
                accepted += 1;
                observer(&state);
                if opts.fixed_dt.is_none() {
                    dt *= opts.growth;
                }
            }
            Err(e) => {
                if opts.fixed_dt.is_some() || dt <= dt_floor {
                    let status = match e {
                        Error::Domain(_) => ExitStatus::DomainExit,
                        _ => ExitStatus::SolverFailure,
                    };
                    return Ok(finish(status, state, Some(e.to_string()), accepted, rejected));
                }
                rejected += 1;
                dt *= 0.5;
                if dt <= dt_floor {
                    let status = match e {
                        Error::Domain(_) => ExitStatus::DomainExit,
                        _ => ExitStatus::SolverFailure,
                    };
                    return Ok(finish(status, state, Some(e.to_string()), accepted, rejected));
                }
            }
        }
    }
}

pub fn run_to_stationary(
    model: &NullConeModel,
    grid: &BaseGrid,
    prescription: &Prescription,
    omega0: &[f64],
    opts: &FlowOptions,
) -> Result<FlowRun> {
    run_observed(model, grid, prescription, omega0, opts, &mut |_| {})
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedSignReport {
    pub ok: bool,
    pub max_f: f64,
    pub threshold: f64,
    /// `(t, ϑ, f)` of the first record above the threshold.
    pub first_violation: Option<(f64, f64, f64)>,
}

/// Checks `max f ≤ 10 tol` along a recorded history.
pub fn speed_sign_monitor(history: &[HistoryRecord], tol: f64) -> SpeedSignReport {
    let threshold = 10.0 * tol;
    let first_violation = history
        .iter()
        .find(|r| r.sup_f > threshold)
        .map(|r| (r.t, r.argmax_f, r.sup_f));
    SpeedSignReport {
        ok: first_violation.is_none(),
        max_f: history.iter().map(|r| r.sup_f).fold(f64::NEG_INFINITY, f64::max),
        threshold,
        first_violation,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonVerdict {
    Preserved,
    StrictlyPreserved,
    Violated,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub verdict: ComparisonVerdict,
    pub steps: usize,
    /// `min (ω_B − ω_A)` at each recorded step.
    pub min_gap: Vec<f64>,
    /// `(t, ϑ, ω_B − ω_A)` at the first crossing.
    pub first_violation: Option<(f64, f64, f64)>,
    pub message: Option<String>,
}

/// Runs two flows in lockstep with a common step size and checks that the
/// upper one stays above. Requires `λ_A ≤ λ_B` (for STCMC prescriptions) and
/// `ω_B ≥ ω_A` initially; otherwise the report is `Rejected`.
#[allow(clippy::too_many_arguments)]
pub fn comparison_check(
    model: &NullConeModel,
    grid: &BaseGrid,
    prescription_a: &Prescription,
    omega_a: &[f64],
    prescription_b: &Prescription,
    omega_b: &[f64],
    opts: &FlowOptions,
    max_steps: usize,
) -> Result<ComparisonReport> {
    let rejected = |msg: String| ComparisonReport {
        verdict: ComparisonVerdict::Rejected,
        steps: 0,
        min_gap: Vec::new(),
        first_violation: None,
        message: Some(msg),
    };
    if let (Some(la), Some(lb)) = (prescription_a.lambda(), prescription_b.lambda()) {
        if la > lb {
            return Ok(rejected(format!("lambda_A = {la} > lambda_B = {lb}")));
        }
    }
    if omega_a.iter().zip(omega_b).any(|(a, b)| b < a) {
        return Ok(rejected("initial data cross".into()));
    }
    let strict_expected = matches!(
        (prescription_a.lambda(), prescription_b.lambda()),
        (Some(la), Some(lb)) if la < lb
    );
    let tol = opts.tol_for(grid.mode());
    let mut a = FlowState::new(model, grid, prescription_a, omega_a)?;
    let mut b = FlowState::new(model, grid, prescription_b, omega_b)?;
    let gap = |a: &FlowState, b: &FlowState| -> (f64, usize) {
        a.omega()
            .iter()
            .zip(b.omega())
            .map(|(x, y)| y - x)
            .enumerate()
            .fold((f64::INFINITY, 0), |acc, (j, g)| if g < acc.0 { (g, j) } else { acc })
    };
    let mut min_gap = vec![gap(&a, &b).0];
    let mut dt = opts
        .fixed_dt
        .unwrap_or_else(|| initial_dt(&a, opts).min(initial_dt(&b, opts)));
    let mut steps = 0;
    let mut message = None;
    while steps < max_steps {
        if a.sup_abs_f() < tol && b.sup_abs_f() < tol {
            break;
        }
        if opts.fixed_dt.is_none() {
            let rate = reaction_rate(&a, prescription_a).max(reaction_rate(&b, prescription_b));
            if rate > 0.0 {
                dt = dt.min(0.5 / rate);
            }
            dt = dt.min(opts.dt_max);
        }
        match (step(&a, model, prescription_a, dt), step(&b, model, prescription_b, dt)) {
            (Ok(na), Ok(nb)) => {
                a = na;
                b = nb;
                steps += 1;
                let (g, j) = gap(&a, &b);
                min_gap.push(g);
                if g < -tol {
                    return Ok(ComparisonReport {
                        verdict: ComparisonVerdict::Violated,
                        steps,
                        min_gap,
                        first_violation: Some((a.t, grid.nodes()[j], g)),
                        message: None,
                    });
                }
                if opts.fixed_dt.is_none() {
                    dt *= opts.growth;
                }
            }
            (Err(e), _) | (_, Err(e)) => {
                if opts.fixed_dt.is_some() || dt < 1e-14 {
                    message = Some(e.to_string());
                    break;
                }
                dt *= 0.5;
            }
        }
    }
    let strict = min_gap.iter().skip(1).all(|g| *g > 0.0) && steps > 0;
    let verdict = if strict_expected && strict {
        ComparisonVerdict::StrictlyPreserved
    } else {
        ComparisonVerdict::Preserved
    };
    Ok(ComparisonReport {
        verdict,
        steps,
        min_gap,
        first_violation: None,
        message,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::{make_minkowski, make_schwarzschild};

    #[test]
    fn stcmc_step_descends_above_target() {
        let m = make_minkowski(2, 1.0).unwrap();
        let g = BaseGrid::symmetric(2).unwrap();
        let p = Prescription::stcmc(1.0).unwrap();
        let st = FlowState::new(&m, &g, &p, &[0.5]).unwrap();
        assert!(st.surface.hvec2()[0] > 1.0);
        let next = step(&st, &m, &p, 0.1).unwrap();
        assert!(next.omega()[0] < 0.5);
    }

    #[test]
    fn stationary_data_is_fixed() {
        let m = make_minkowski(2, 1.0).unwrap();
        let g = BaseGrid::axisymmetric(2, 16).unwrap();
        // 2θθ̄ = 4/r² = 1 at r = 2, s = 2.
        let p = Prescription::stcmc(1.0).unwrap();
        let st = FlowState::new(&m, &g, &p, &vec![2.0; 16]).unwrap();
        let next = step(&st, &m, &p, 0.3).unwrap();
        for w in next.omega() {
            assert!((w - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_ascending_start() {
        let m = make_schwarzschild(1.0, 2.0).unwrap();
        let g = BaseGrid::symmetric(2).unwrap();
        let p = Prescription::stcmc(0.02).unwrap();
        let r = run_to_stationary(&m, &g, &p, &[0.05], &FlowOptions::default());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn schwarzschild_descends_to_leaf() {
        let m = make_schwarzschild(1.0, 2.0).unwrap();
        let g = BaseGrid::symmetric(2).unwrap();
        let p = Prescription::stcmc(0.02).unwrap();
        let run = run_to_stationary(&m, &g, &p, &[m.s_of_radius(3.0)], &FlowOptions::default()).unwrap();
        assert!(run.converged());
        assert!(run.state.history.windows(2).all(|w| w[1].max_omega <= w[0].max_omega + 1e-12));
        let tb = run.surface().background()[0].theta_bar;
        assert!((run.surface().hvec2()[0] - 0.02).abs() < 2.0 * tb * run.tol);
        assert!(speed_sign_monitor(&run.state.history, run.tol).ok);
    }

    #[test]
    fn comparison_rejects_crossing_data() {
        let m = make_schwarzschild(1.0, 2.0).unwrap();
        let g = BaseGrid::symmetric(2).unwrap();
        let pa = Prescription::stcmc(0.01).unwrap();
        let pb = Prescription::stcmc(0.02).unwrap();
        let r = comparison_check(&m, &g, &pa, &[1.0], &pb, &[0.9], &FlowOptions::default(), 100).unwrap();
        assert_eq!(r.verdict, ComparisonVerdict::Rejected);
        let r = comparison_check(&m, &g, &pb, &[1.0], &pa, &[1.0], &FlowOptions::default(), 100).unwrap();
        assert_eq!(r.verdict, ComparisonVerdict::Rejected);
    }

    #[test]
    fn monitor_flags_positive_speed() {
        let rec = HistoryRecord {
            t: 1.0,
            dt: 0.1,
            sup_f: 1e-3,
            inf_f: 0.0,
            argmax_f: 0.2,
            max_u: 0.0,
            min_omega: 0.0,
            max_omega: 0.0,
        };
        let r = speed_sign_monitor(&[rec], 1e-8);
        assert!(!r.ok);
        assert_eq!(r.first_violation, Some((1.0, 0.2, 1e-3)));
    }
}
