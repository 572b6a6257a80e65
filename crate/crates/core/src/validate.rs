//! Finite-difference checks of the evolution equations.
//!
//! Families are synthetic, `ω(t, ϑ) = ω₀(ϑ) + t f(ϑ)`, so the normal speed is
//! the known field `f` and time derivatives are taken by central differences
//! in `t` at `t = 0`. Residuals should decay like `h²`.

use std::sync::Arc;

use serde::Serialize;

use crate::background::NullConeModel;
use crate::base::BaseGrid;
use crate::error::{Error, Result};
use crate::flow::{self, FlowState, Prescription};
use crate::graph::{GraphSurface, PointGeometry};

/// Residuals at or below this are treated as exact.
pub const EXACT_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub equation_id: String,
    pub model: String,
    pub grid_nodes: usize,
    pub steps: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Least-squares slope of `log residual` against `log step`; `None` with
    /// fewer than three levels or when every residual is at round-off.
    pub order: Option<f64>,
    pub expected_order: f64,
    pub ok: bool,
}

impl ResidualReport {
    fn new(equation_id: &str, model: &NullConeModel, grid: &BaseGrid, steps: &[f64], residuals: Vec<f64>, expected: f64) -> Self {
        let exact = residuals.iter().all(|r| *r <= EXACT_FLOOR);
        let order = if steps.len() >= 3 && !exact {
            Some(fit_order(steps, &residuals))
        } else {
            None
        };
        let ok = exact || order.is_some_and(|p| p >= expected);
        Self {
            equation_id: equation_id.into(),
            model: model_label(model),
            grid_nodes: grid.len(),
            steps: steps.to_vec(),
            residuals,
            order,
            expected_order: expected,
            ok,
        }
    }
}

fn model_label(model: &NullConeModel) -> String {
    use crate::background::BaseFamily;
    let base = match model.base_family() {
        BaseFamily::Minkowski { n, r0 } => format!("minkowski n={n} r0={r0}"),
        BaseFamily::Schwarzschild { mass, r0 } => format!("schwarzschild M={mass} r0={r0}"),
    };
    if model.perturbation().is_some() {
        format!("perturbed {base}")
    } else {
        base
    }
}

/// Slope of the least-squares line through `(log h, log r)`.
pub fn fit_order(steps: &[f64], residuals: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = steps
        .iter()
        .zip(residuals)
        .map(|(h, r)| (h.ln(), r.max(f64::MIN_POSITIVE).ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

type Jet = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;

/// `ω(t, ϑ) = ω₀(ϑ) + t f(ϑ)` with analytic jets `(v, ∂_ϑv, ∂²_ϑv)`.
#[derive(Clone)]
pub struct GraphFamily {
    pub label: String,
    omega0: Jet,
    speed: Jet,
}

impl std::fmt::Debug for GraphFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GraphFamily").field("label", &self.label).finish()
    }
}

impl GraphFamily {
    pub fn new(
        label: &str,
        omega0: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static,
        speed: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            omega0: Arc::new(omega0),
            speed: Arc::new(speed),
        }
    }

    /// Coordinate slices `s = s0 + t f` with constant `f`.
    pub fn slices(s0: f64, f: f64) -> Self {
        Self::new(&format!("slice s0={s0} f={f}"), move |_| [s0, 0.0, 0.0], move |_| [f, 0.0, 0.0])
    }

    /// `ω₀ = s0 + amp cos ϑ`, `f = f0 + f1 cos ϑ`.
    pub fn cosine(s0: f64, amp: f64, f0: f64, f1: f64) -> Self {
        Self::new(
            &format!("cos s0={s0} amp={amp} f0={f0} f1={f1}"),
            move |t| [s0 + amp * t.cos(), -amp * t.sin(), -amp * t.cos()],
            move |t| [f0 + f1 * t.cos(), -f1 * t.sin(), -f1 * t.cos()],
        )
    }

    pub fn speed_jet(&self, theta: f64) -> [f64; 3] {
        (self.speed)(theta)
    }

    pub fn jet(&self, theta: f64, t: f64) -> [f64; 3] {
        let w = (self.omega0)(theta);
        let f = (self.speed)(theta);
        [w[0] + t * f[0], w[1] + t * f[1], w[2] + t * f[2]]
    }

    pub fn omega(&self, grid: &BaseGrid, t: f64) -> Vec<f64> {
        grid.nodes().iter().map(|&th| self.jet(th, t)[0]).collect()
    }

    pub fn speed(&self, grid: &BaseGrid) -> Vec<f64> {
        grid.nodes().iter().map(|&th| self.speed_jet(th)[0]).collect()
    }
}

fn check_steps(steps: &[f64]) -> Result<()> {
    if steps.is_empty() || steps.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::Parameter("steps must be positive and non-empty".into()));
    }
    Ok(())
}

fn sup(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0, |m, x| m.max(x.abs()))
}

/// `ġ_ij = 2fχ̄_ij`, componentwise in the diagonal frame.
pub fn check_metric_evolution(model: &NullConeModel, grid: &BaseGrid, family: &GraphFamily, steps: &[f64]) -> Result<ResidualReport> {
    check_steps(steps)?;
    let mid = GraphSurface::new(model, grid, &family.omega(grid, 0.0))?;
    let f = family.speed(grid);
    let mut res = Vec::new();
    for &h in steps {
        let up = GraphSurface::new(model, grid, &family.omega(grid, h))?;
        let dn = GraphSurface::new(model, grid, &family.omega(grid, -h))?;
        let r = sup((0..grid.len()).flat_map(|j| {
            let (p, q, m) = (&up.background()[j], &dn.background()[j], &mid.background()[j]);
            let ga = (p.metric_a.powi(2) - q.metric_a.powi(2)) / (2.0 * h);
            let gb = (p.metric_b.powi(2) - q.metric_b.powi(2)) / (2.0 * h);
            let ca = m.metric_a.powi(2) * m.kappa[0];
            let cb = m.metric_b.powi(2) * m.kappa[1];
            [ga - 2.0 * f[j] * ca, gb - 2.0 * f[j] * cb]
        }));
        res.push(r);
    }
    Ok(ResidualReport::new("metric", model, grid, steps, res, 1.9))
}

/// `u̇ = f^iω_i − fχ̄(∇ω,∇ω)` with the discrete gradient of the surface.
pub fn check_u_evolution(model: &NullConeModel, grid: &BaseGrid, family: &GraphFamily, steps: &[f64]) -> Result<ResidualReport> {
    check_steps(steps)?;
    let mid = GraphSurface::new(model, grid, &family.omega(grid, 0.0))?;
    let f = family.speed(grid);
    let df = mid.apply_gradient(&f);
    let rhs: Vec<f64> = (0..grid.len())
        .map(|j| {
            let p = &mid.background()[j];
            let a2 = p.metric_a.powi(2);
            let d = mid.slope()[j];
            df[j] * d / a2 - f[j] * p.kappa[0] * d * d / a2
        })
        .collect();
    let mut res = Vec::new();
    for &h in steps {
        let up = GraphSurface::new(model, grid, &family.omega(grid, h))?;
        let dn = GraphSurface::new(model, grid, &family.omega(grid, -h))?;
        res.push(sup((0..grid.len()).map(|j| (up.u()[j] - dn.u()[j]) / (2.0 * h) - rhs[j])));
    }
    Ok(ResidualReport::new("u", model, grid, steps, res, 1.9))
}

/// `Ḣ = −Δf − 2τ(∇f) − f(χ̄^{ij}h_ij + D^iτ_i + |τ|² + Rc(L̄,ν) + ⟨R̄(ν,L̄)ν,L̄⟩)`,
/// evaluated pointwise from analytic jets. Needs a spherical model.
pub fn check_h_evolution(model: &NullConeModel, grid: &BaseGrid, family: &GraphFamily, steps: &[f64]) -> Result<ResidualReport> {
    check_steps(steps)?;
    let n = model.dim();
    let mut rhs = Vec::with_capacity(grid.len());
    for &th in grid.nodes() {
        let g = PointGeometry::at(model, th, family.jet(th, 0.0))?;
        let [f, df, d2f] = family.speed_jet(th);
        let a2 = g.bg.metric_a.powi(2);
        let zero = -g.laplacian_of(df, d2f)
            - 2.0 * g.tau_pairing(df)
            - f * (g.chibar_contraction() + g.tau_divergence + g.tau * g.tau / a2 + g.normal_curvature(n));
        rhs.push(zero);
    }
    let mut res = Vec::new();
    for &h in steps {
        let mut r: f64 = 0.0;
        for (j, &th) in grid.nodes().iter().enumerate() {
            let up = PointGeometry::at(model, th, family.jet(th, h))?;
            let dn = PointGeometry::at(model, th, family.jet(th, -h))?;
            r = r.max(((up.mean_curvature - dn.mean_curvature) / (2.0 * h) - rhs[j]).abs());
        }
        res.push(r);
    }
    Ok(ResidualReport::new("H", model, grid, steps, res, 1.9))
}

/// `d/dt θ̄(ω(t), ·) = −f(θ̄²/n + |χ̊̄|² + Rc(L̄,L̄))` along the family.
pub fn check_raychaudhuri_on_family(model: &NullConeModel, grid: &BaseGrid, family: &GraphFamily, steps: &[f64]) -> Result<ResidualReport> {
    check_steps(steps)?;
    let n = model.dim() as f64;
    let mid = GraphSurface::new(model, grid, &family.omega(grid, 0.0))?;
    let f = family.speed(grid);
    let mut res = Vec::new();
    for &h in steps {
        let up = GraphSurface::new(model, grid, &family.omega(grid, h))?;
        let dn = GraphSurface::new(model, grid, &family.omega(grid, -h))?;
        res.push(sup((0..grid.len()).map(|j| {
            let p = &mid.background()[j];
            let lhs = (up.background()[j].theta_bar - dn.background()[j].theta_bar) / (2.0 * h);
            lhs + f[j] * (p.theta_bar.powi(2) / n + p.chi_tf_norm.powi(2) + p.rc_ll)
        })));
    }
    Ok(ResidualReport::new("raychaudhuri", model, grid, steps, res, 1.9))
}

/// Right side of `ḟ = Δf + 2τ(∇f) + f(L̄β + χ̄^{ij}h_ij + D^iτ_i + |τ|² + Rc(L̄,ν) + ⟨R̄(ν,L̄)ν,L̄⟩)`.
pub fn speed_evolution_rhs(state: &FlowState, prescription: &Prescription) -> Vec<f64> {
    let s = &state.surface;
    let f = &state.speed;
    let lap = s.apply_laplacian(f);
    let grad = s.apply_gradient(f);
    let tau = s.tau();
    let tau2 = s.tau_norm2();
    let div = s.tau_divergence();
    let chi = s.chibar_contraction();
    let k = s.normal_curvature();
    (0..s.len())
        .map(|j| {
            let p = &s.background()[j];
            let th = s.grid().nodes()[j];
            let beta_s = prescription.beta_s(s.omega()[j], th, p.theta_bar, p.theta_bar_s);
            let a2 = p.metric_a.powi(2);
            lap[j] + 2.0 * tau[j] * grad[j] / a2 + f[j] * (beta_s + chi[j] + div[j] + tau2[j] + k[j])
        })
        .collect()
}

/// Forward-difference `ḟ` between two consecutive snapshots against the
/// right side at the first.
pub fn speed_evolution_residual(s0: &FlowState, s1: &FlowState, prescription: &Prescription) -> Result<f64> {
    let dt = s1.t - s0.t;
    if !(dt > 0.0) || s0.speed.len() != s1.speed.len() {
        return Err(Error::Input("snapshots must be consecutive states of one run".into()));
    }
    let rhs = speed_evolution_rhs(s0, prescription);
    Ok(sup((0..rhs.len()).map(|j| (s1.speed[j] - s0.speed[j]) / dt - rhs[j])))
}

/// Runs the flow with each fixed step in `dts` up to `t_eval` and compares
/// `ḟ` there. The first-order stepper limits the order to one.
pub fn check_speed_evolution(
    model: &NullConeModel,
    grid: &BaseGrid,
    prescription: &Prescription,
    omega0: &[f64],
    t_eval: f64,
    dts: &[f64],
) -> Result<ResidualReport> {
    check_steps(dts)?;
    let mut res = Vec::new();
    for &dt in dts {
        let k = (t_eval / dt).round() as usize;
        if ((k as f64) * dt - t_eval).abs() > 1e-9 * t_eval.max(1.0) {
            return Err(Error::Parameter(format!("t_eval = {t_eval} is not a multiple of dt = {dt}")));
        }
        let mut state = FlowState::new(model, grid, prescription, omega0)?;
        for _ in 0..k {
            state = flow::step(&state, model, prescription, dt)?;
        }
        let next = flow::step(&state, model, prescription, dt)?;
        res.push(speed_evolution_residual(&state, &next, prescription)?);
    }
    Ok(ResidualReport::new("speed", model, grid, dts, res, 0.9))
}

/// `|2θ̄B − ∂_s(2θθ̄)|` on coordinate slices, with `B` from the stability
/// module and the derivative from the model's analytic `∂_sθ`, `∂_sθ̄`.
pub fn check_stability_identity(model: &NullConeModel, s_values: &[f64]) -> Result<f64> {
    let grid = BaseGrid::symmetric(model.dim())?;
    let mut worst: f64 = 0.0;
    for &s in s_values {
        let surf = GraphSurface::new(model, &grid, &[s])?;
        let p = &surf.background()[0];
        let lambda = 2.0 * p.theta * p.theta_bar;
        let b = crate::stability::stability_b_unchecked(model, &surf, lambda)[0];
        let d = 2.0 * (p.theta_s * p.theta_bar + p.theta * p.theta_bar_s);
        worst = worst.max((2.0 * p.theta_bar * b - d).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::{make_minkowski, make_perturbed_axisymmetric, make_schwarzschild, Perturbation};

    const HS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

    fn perturbed() -> NullConeModel {
        let pert = Perturbation {
            ricci0: 0.05,
            ricci1: 0.02,
            shear0: 0.03,
            shear1: 0.02,
            theta_cos: 0.1,
            zeta: 0.05,
            ..Default::default()
        };
        make_perturbed_axisymmetric(&make_minkowski(2, 1.0).unwrap(), pert, 32).unwrap()
    }

    #[test]
    fn order_fit() {
        let r: Vec<f64> = HS.iter().map(|h| 3.0 * h * h).collect();
        assert!((fit_order(&HS, &r) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn metric_orders() {
        let g = BaseGrid::symmetric(2).unwrap();
        let r = check_metric_evolution(&make_minkowski(2, 1.0).unwrap(), &g, &GraphFamily::slices(1.0, 1.0), &HS).unwrap();
        assert!(r.ok, "{r:?}");
        let g = BaseGrid::axisymmetric(2, 32).unwrap();
        let r = check_metric_evolution(&perturbed(), &g, &GraphFamily::cosine(1.0, 0.1, 1.0, 0.3), &HS).unwrap();
        assert!(r.ok && r.order.unwrap() >= 1.9, "{r:?}");
        let r = check_metric_evolution(&perturbed(), &g, &GraphFamily::cosine(1.0, 0.1, 0.0, 0.0), &HS).unwrap();
        assert!(r.residuals.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn h_orders() {
        let g = BaseGrid::symmetric(2).unwrap();
        let m = make_schwarzschild(1.0, 2.0).unwrap();
        let r = check_h_evolution(&m, &g, &GraphFamily::slices(0.5, 1.0), &HS).unwrap();
        assert!(r.ok, "{r:?}");
        let g = BaseGrid::axisymmetric(2, 32).unwrap();
        let r = check_h_evolution(&m, &g, &GraphFamily::cosine(0.5, 0.1, 0.0, 1.0), &HS).unwrap();
        assert!(r.ok, "{r:?}");
        let r = check_h_evolution(&make_minkowski(3, 1.0).unwrap(), &g, &GraphFamily::cosine(0.5, 0.2, 1.0, 0.5), &HS).unwrap();
        assert!(r.ok, "{r:?}");
        assert!(check_h_evolution(&perturbed(), &g, &GraphFamily::slices(0.5, 1.0), &HS).is_err());
    }

    #[test]
    fn u_orders() {
        let g = BaseGrid::axisymmetric(2, 32).unwrap();
        let r = check_u_evolution(&perturbed(), &g, &GraphFamily::cosine(1.0, 0.2, 1.0, 0.0), &HS).unwrap();
        assert!(r.ok, "{r:?}");
        let r = check_u_evolution(&make_schwarzschild(1.0, 2.0).unwrap(), &g, &GraphFamily::cosine(1.0, 0.2, 0.3, 0.5), &HS).unwrap();
        assert!(r.ok, "{r:?}");
        let g = BaseGrid::symmetric(2).unwrap();
        let r = check_u_evolution(&perturbed(), &g, &GraphFamily::slices(1.0, 0.7), &HS);
        assert!(r.is_err() || r.unwrap().residuals.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn raychaudhuri_on_family() {
        let g = BaseGrid::axisymmetric(2, 32).unwrap();
        let r = check_raychaudhuri_on_family(&perturbed(), &g, &GraphFamily::cosine(1.0, 0.2, 1.0, 0.3), &HS).unwrap();
        assert!(r.ok, "{r:?}");
    }

    #[test]
    fn speed_order_and_identity() {
        let m = make_schwarzschild(1.0, 2.0).unwrap();
        let g = BaseGrid::symmetric(2).unwrap();
        let p = Prescription::stcmc(0.02).unwrap();
        let r = check_speed_evolution(&m, &g, &p, &[0.6], 1.6, &[0.4, 0.2, 0.1, 0.05]).unwrap();
        assert!(r.ok, "{r:?}");
        let worst = check_stability_identity(&m, &[0.0, 0.5, 1.0, 2.0]).unwrap();
        assert!(worst < 1e-12, "{worst}");
    }
}
