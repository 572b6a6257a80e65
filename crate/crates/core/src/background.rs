//! Analytic null-cone backgrounds `[0, Λ) × Sⁿ`.
//!
//! A model is evaluated pointwise at `(s, ϑ)` and returns every contraction the
//! flow, stability and barrier code consume. Leaves `{s} × Sⁿ` carry the metric
//! `a² dϑ² + b² sin²ϑ dΩ²`; the generator `L̄` is affinely parametrized.
//!
//! Three families are provided:
//!
//! * the flat cone, with area radius `r = r₀(1 + s/n)`;
//! * the outgoing cone of a Schwarzschild sphere (`n = 2`), `r = r₀(1 + s/2)`;
//! * an axisymmetric perturbation of either, where `θ̄` is obtained by
//!   integrating Raychaudhuri's equation with the perturbed shear and Ricci
//!   terms.

use serde::{Deserialize, Serialize};

use crate::base::BaseGrid;
use crate::error::{Error, Result};

/// Step count of the fixed-step Raychaudhuri integrator over `[0, Λ]`.
pub const RAYCHAUDHURI_STEPS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum BaseFamily {
    Minkowski { n: usize, r0: f64 },
    Schwarzschild { mass: f64, r0: f64 },
}

impl BaseFamily {
    pub fn dim(&self) -> usize {
        match *self {
            BaseFamily::Minkowski { n, .. } => n,
            BaseFamily::Schwarzschild { .. } => 2,
        }
    }

    pub fn r0(&self) -> f64 {
        match *self {
            BaseFamily::Minkowski { r0, .. } | BaseFamily::Schwarzschild { r0, .. } => r0,
        }
    }

    pub fn area_radius(&self, s: f64) -> f64 {
        self.r0() * (1.0 + s / self.dim() as f64)
    }

    fn theta_bar(&self, s: f64) -> f64 {
        let n = self.dim() as f64;
        n / (n + s)
    }

    /// `(θ, ∂_s θ)` of the unperturbed leaves.
    fn theta(&self, s: f64) -> (f64, f64) {
        match *self {
            BaseFamily::Minkowski { n, r0 } => {
                let n = n as f64;
                let th = n.powi(3) / (2.0 * r0 * r0 * (n + s));
                (th, -th / (n + s))
            }
            BaseFamily::Schwarzschild { mass, r0 } => {
                let r = self.area_radius(s);
                let th = (1.0 - 2.0 * mass / r) / (2.0 * r0 * r);
                let dth_dr = (-1.0 / (r * r) + 4.0 * mass / r.powi(3)) / (2.0 * r0);
                (th, 0.5 * r0 * dth_dr)
            }
        }
    }

    fn weyl(&self, s: f64) -> f64 {
        match *self {
            BaseFamily::Minkowski { .. } => 0.0,
            BaseFamily::Schwarzschild { mass, .. } => {
                let r = self.area_radius(s);
                -mass / (2.0 * r.powi(3))
            }
        }
    }
}

/// Coefficients of the axisymmetric perturbation. Every angular profile is
/// `c₀ + c₁ cos ϑ`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Perturbation {
    /// `Rc(L̄,L̄) = θ̄²(ricci0 + ricci1 cos ϑ) + ricci_abs`.
    pub ricci0: f64,
    pub ricci1: f64,
    pub ricci_abs: f64,
    /// `|χ̊̄| = θ̄ |shear0 + shear1 cos ϑ|`, principal direction `∂_ϑ`.
    pub shear0: f64,
    pub shear1: f64,
    /// `θ = θ_base(s)(1 + theta_cos cos ϑ)`.
    pub theta_cos: f64,
    /// Added to `Rc(L̄,ν)` as `θ̄²(rc_lnu0 + rc_lnu1 cos ϑ)`.
    pub rc_lnu0: f64,
    pub rc_lnu1: f64,
    /// Added to `⟨R̄(ν,L̄)ν,L̄⟩` as `θ̄²(weyl0 + weyl1 cos ϑ)`.
    pub weyl0: f64,
    pub weyl1: f64,
    /// `ζ = zeta θ̄ sin ϑ dϑ`.
    pub zeta: f64,
}

impl Perturbation {
    fn angular_dependence(&self) -> bool {
        self.ricci1 != 0.0 || self.shear1 != 0.0
    }

    fn ricci_profile(&self, c: f64) -> f64 {
        self.ricci0 + self.ricci1 * c
    }

    fn shear_profile(&self, c: f64) -> f64 {
        self.shear0 + self.shear1 * c
    }

    fn validate(&self) -> Result<()> {
        let all = [
            self.ricci0,
            self.ricci1,
            self.ricci_abs,
            self.shear0,
            self.shear1,
            self.theta_cos,
            self.rc_lnu0,
            self.rc_lnu1,
            self.weyl0,
            self.weyl1,
            self.zeta,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("non-finite perturbation coefficient".into()));
        }
        if self.theta_cos.abs() >= 1.0 {
            return Err(Error::Parameter(format!(
                "theta_cos must satisfy |theta_cos| < 1, got {}",
                self.theta_cos
            )));
        }
        Ok(())
    }
}

/// Everything a model knows at one point `(s, ϑ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConePoint {
    pub theta_bar: f64,
    /// `∂_s θ̄`, from Raychaudhuri.
    pub theta_bar_s: f64,
    pub theta: f64,
    pub theta_s: f64,
    /// Signed principal value of `χ̊̄` along `∂_ϑ`; the other `n − 1`
    /// directions carry `−shear/(n − 1)`.
    pub shear: f64,
    pub chi_tf_norm: f64,
    /// Principal values of `χ̄` along `∂_ϑ` and along the orbit sphere.
    pub kappa: [f64; 2],
    /// Leaf metric `a² dϑ² + b² sin²ϑ dΩ²`.
    pub metric_a: f64,
    pub metric_b: f64,
    /// `ϑ` component of `ζ`.
    pub zeta: f64,
    pub rc_ll: f64,
    pub rc_lnu: f64,
    pub weyl: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Column {
    theta_bar: Vec<f64>,
    integral: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
struct PerturbedData {
    pert: Perturbation,
    n_theta: usize,
    /// Columns on the half grid of `n_theta`, or a single column when the
    /// perturbation does not depend on ϑ.
    columns: Vec<Column>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullConeModel {
    base: BaseFamily,
    lambda: f64,
    perturbed: Option<PerturbedData>,
}

impl NullConeModel {
    pub const DEFAULT_LAMBDA: f64 = 10.0;

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Upper end `Λ` of the affine parameter.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn base_family(&self) -> BaseFamily {
        self.base
    }

    pub fn perturbation(&self) -> Option<&Perturbation> {
        self.perturbed.as_ref().map(|p| &p.pert)
    }

    /// Whether every field is independent of ϑ.
    pub fn is_spherical(&self) -> bool {
        match &self.perturbed {
            None => true,
            Some(p) => {
                let q = &p.pert;
                !q.angular_dependence()
                    && q.shear0 == 0.0
                    && q.theta_cos == 0.0
                    && q.rc_lnu1 == 0.0
                    && q.weyl1 == 0.0
                    && q.zeta == 0.0
            }
        }
    }

    /// Angular resolution the model tables are built for, if any.
    pub fn table_resolution(&self) -> Option<usize> {
        self.perturbed
            .as_ref()
            .filter(|p| p.columns.len() > 1)
            .map(|p| p.n_theta)
    }

    /// Whether evaluation on the half grid of `grid` is served from tables.
    pub fn supports_grid(&self, grid: &BaseGrid) -> bool {
        if grid.dim() != self.dim() {
            return false;
        }
        match (self.table_resolution(), grid.mode()) {
            (None, _) => true,
            (Some(_), crate::base::GridMode::Symmetric) => true,
            (Some(n), crate::base::GridMode::Axisymmetric) => n == grid.len(),
        }
    }

    /// Area radius of the unperturbed leaf at `s`.
    pub fn area_radius(&self, s: f64) -> f64 {
        self.base.area_radius(s)
    }

    /// Inverse of [`area_radius`](Self::area_radius).
    pub fn s_of_radius(&self, r: f64) -> f64 {
        self.dim() as f64 * (r / self.base.r0() - 1.0)
    }

    pub fn check_domain(&self, s: f64) -> Result<()> {
        if !(s >= 0.0 && s < self.lambda) {
            return Err(Error::Domain(format!(
                "s = {s} outside [0, {})",
                self.lambda
            )));
        }
        Ok(())
    }

    pub fn eval(&self, s: f64, theta: f64) -> Result<ConePoint> {
        self.check_domain(s)?;
        match &self.perturbed {
            None => Ok(self.eval_base(s)),
            Some(p) => self.eval_perturbed(p, s, theta),
        }
    }

    pub fn theta_bar(&self, s: f64, theta: f64) -> Result<f64> {
        Ok(self.eval(s, theta)?.theta_bar)
    }

    /// `|H⃗|² = 2θθ̄` of the slice `{s}` at angle ϑ.
    pub fn slice_hvec2(&self, s: f64, theta: f64) -> Result<f64> {
        let p = self.eval(s, theta)?;
        Ok(2.0 * p.theta * p.theta_bar)
    }

    fn eval_base(&self, s: f64) -> ConePoint {
        let n = self.dim() as f64;
        let tb = self.base.theta_bar(s);
        let (th, th_s) = self.base.theta(s);
        let r = self.base.area_radius(s);
        ConePoint {
            theta_bar: tb,
            theta_bar_s: -tb * tb / n,
            theta: th,
            theta_s: th_s,
            shear: 0.0,
            chi_tf_norm: 0.0,
            kappa: [tb / n, tb / n],
            metric_a: r,
            metric_b: r,
            zeta: 0.0,
            rc_ll: 0.0,
            rc_lnu: 0.0,
            weyl: self.base.weyl(s),
        }
    }

    fn eval_perturbed(&self, p: &PerturbedData, s: f64, theta: f64) -> Result<ConePoint> {
        let (tb, integral) = if p.columns.len() == 1 {
            hermite_lookup(&p.columns[0], &p.pert, theta, self.dim(), self.lambda, s)
        } else {
            let grid_h = std::f64::consts::PI / p.n_theta as f64;
            let x = 2.0 * theta / grid_h;
            let k = x.round();
            if (x - k).abs() < 1e-9 && k >= 0.0 && (k as usize) < p.columns.len() {
                hermite_lookup(&p.columns[k as usize], &p.pert, theta, self.dim(), self.lambda, s)
            } else {
                integrate_to(&p.pert, theta, self.dim(), self.lambda, s)?
            }
        };
        Ok(self.assemble(&p.pert, s, theta, tb, integral))
    }

    fn assemble(&self, q: &Perturbation, s: f64, theta: f64, tb: f64, integral: f64) -> ConePoint {
        let n = self.dim() as f64;
        let c = theta.cos();
        let ps = q.shear_profile(c);
        let split = ((n - 1.0) / n).sqrt();
        let shear = tb * ps * split;
        let r0 = self.base.r0();
        let log_common = integral / n;
        let log_shear = split * ps * integral;
        let tb2 = tb * tb;
        let rc_ll = tb2 * q.ricci_profile(c) + q.ricci_abs;
        let chi2 = tb2 * ps * ps;
        let (th0, th0_s) = self.base.theta(s);
        let angular = 1.0 + q.theta_cos * c;
        ConePoint {
            theta_bar: tb,
            theta_bar_s: -chi2 - tb2 / n - rc_ll,
            theta: th0 * angular,
            theta_s: th0_s * angular,
            shear,
            chi_tf_norm: tb * ps.abs(),
            kappa: [tb / n + shear, tb / n - shear / (n - 1.0)],
            metric_a: r0 * (log_common + log_shear).exp(),
            metric_b: r0 * (log_common - log_shear / (n - 1.0)).exp(),
            zeta: q.zeta * tb * theta.sin(),
            rc_ll,
            rc_lnu: tb2 * (q.rc_lnu0 + q.rc_lnu1 * c),
            weyl: self.base.weyl(s) + tb2 * (q.weyl0 + q.weyl1 * c),
        }
    }
}

pub fn make_minkowski(n: usize, r0: f64) -> Result<NullConeModel> {
    make_minkowski_on(n, r0, NullConeModel::DEFAULT_LAMBDA)
}

pub fn make_minkowski_on(n: usize, r0: f64, lambda: f64) -> Result<NullConeModel> {
    if n < 2 {
        return Err(Error::Parameter(format!("n must be >= 2, got {n}")));
    }
    check_positive("r0", r0)?;
    check_positive("Lambda", lambda)?;
    Ok(NullConeModel {
        base: BaseFamily::Minkowski { n, r0 },
        lambda,
        perturbed: None,
    })
}

pub fn make_schwarzschild(mass: f64, r0: f64) -> Result<NullConeModel> {
    make_schwarzschild_on(mass, r0, NullConeModel::DEFAULT_LAMBDA)
}

/// Leaves stay at `r ≥ r₀ > 0` for `s ≥ 0`, so the only requirement on the
/// domain is `Λ > 0`.
pub fn make_schwarzschild_on(mass: f64, r0: f64, lambda: f64) -> Result<NullConeModel> {
    check_positive("M", mass)?;
    check_positive("r0", r0)?;
    check_positive("Lambda", lambda)?;
    Ok(NullConeModel {
        base: BaseFamily::Schwarzschild { mass, r0 },
        lambda,
        perturbed: None,
    })
}

/// Perturbs a flat or Schwarzschild model. `n_theta` is the angular resolution
/// the `θ̄` tables are built for; flows on other axisymmetric grids are
/// rejected by the graph module.
pub fn make_perturbed_axisymmetric(
    base_model: &NullConeModel,
    pert: Perturbation,
    n_theta: usize,
) -> Result<NullConeModel> {
    if base_model.perturbed.is_some() {
        return Err(Error::Parameter("base model is already perturbed".into()));
    }
    pert.validate()?;
    let n = base_model.dim();
    let lambda = base_model.lambda;
    let columns = if pert.angular_dependence() {
        let grid = BaseGrid::axisymmetric(n, n_theta)?;
        grid.half_grid()
            .into_iter()
            .map(|t| build_column(&pert, t, n, lambda))
            .collect::<Result<Vec<_>>>()?
    } else {
        vec![build_column(&pert, 0.0, n, lambda)?]
    };
    Ok(NullConeModel {
        base: base_model.base,
        lambda,
        perturbed: Some(PerturbedData {
            pert,
            n_theta,
            columns,
        }),
    })
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

fn rhs(q: &Perturbation, theta: f64, n: usize, tb: f64) -> f64 {
    let c = theta.cos();
    let ps = q.shear_profile(c);
    -tb * tb * (1.0 / n as f64 + ps * ps + q.ricci_profile(c)) - q.ricci_abs
}

/// One RK4 step for `(θ̄, ∫θ̄)`.
fn rk4(q: &Perturbation, theta: f64, n: usize, tb: f64, ds: f64) -> (f64, f64) {
    let k1 = rhs(q, theta, n, tb);
    let k2 = rhs(q, theta, n, tb + 0.5 * ds * k1);
    let k3 = rhs(q, theta, n, tb + 0.5 * ds * k2);
    let k4 = rhs(q, theta, n, tb + ds * k3);
    let tb1 = tb + ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    let y2 = tb + 0.5 * ds * k1;
    let y3 = tb + 0.5 * ds * k2;
    let y4 = tb + ds * k3;
    let di = ds / 6.0 * (tb + 2.0 * y2 + 2.0 * y3 + y4);
    (tb1, di)
}

fn build_column(q: &Perturbation, theta: f64, n: usize, lambda: f64) -> Result<Column> {
    let ds = lambda / RAYCHAUDHURI_STEPS as f64;
    let mut theta_bar = Vec::with_capacity(RAYCHAUDHURI_STEPS + 1);
    let mut integral = Vec::with_capacity(RAYCHAUDHURI_STEPS + 1);
    let (mut tb, mut acc) = (1.0, 0.0);
    theta_bar.push(tb);
    integral.push(acc);
    for i in 0..RAYCHAUDHURI_STEPS {
        let (tb1, di) = rk4(q, theta, n, tb, ds);
        if !(tb1 > 0.0) {
            return Err(Error::FocalPoint {
                s: (i + 1) as f64 * ds,
            });
        }
        tb = tb1;
        acc += di;
        theta_bar.push(tb);
        integral.push(acc);
    }
    Ok(Column { theta_bar, integral })
}

fn hermite_lookup(
    col: &Column,
    q: &Perturbation,
    theta: f64,
    n: usize,
    lambda: f64,
    s: f64,
) -> (f64, f64) {
    let ds = lambda / RAYCHAUDHURI_STEPS as f64;
    let i = ((s / ds) as usize).min(RAYCHAUDHURI_STEPS - 1);
    let t = s / ds - i as f64;
    let (y0, y1) = (col.theta_bar[i], col.theta_bar[i + 1]);
    let (d0, d1) = (rhs(q, theta, n, y0) * ds, rhs(q, theta, n, y1) * ds);
    let tb = hermite(y0, y1, d0, d1, t);
    let integral = hermite(col.integral[i], col.integral[i + 1], y0 * ds, y1 * ds, t);
    (tb, integral)
}

fn hermite(y0: f64, y1: f64, d0: f64, d1: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * d1
}

/// Off-table evaluation: integrates from 0 to `s` with the table step and a
/// final partial step.
fn integrate_to(q: &Perturbation, theta: f64, n: usize, lambda: f64, s: f64) -> Result<(f64, f64)> {
    let ds = lambda / RAYCHAUDHURI_STEPS as f64;
    let full = (s / ds).floor() as usize;
    let (mut tb, mut acc) = (1.0, 0.0);
    for i in 0..full {
        let (tb1, di) = rk4(q, theta, n, tb, ds);
        if !(tb1 > 0.0) {
            return Err(Error::FocalPoint {
                s: (i + 1) as f64 * ds,
            });
        }
        tb = tb1;
        acc += di;
    }
    let rest = s - full as f64 * ds;
    if rest > 0.0 {
        let (tb1, di) = rk4(q, theta, n, tb, rest);
        if !(tb1 > 0.0) {
            return Err(Error::FocalPoint { s });
        }
        tb = tb1;
        acc += di;
    }
    Ok((tb, acc))
}

/// Midpoint residual of Raychaudhuri's equation
/// `∂_s θ̄ + |χ̊̄|² + θ̄²/n + Rc(L̄,L̄)` with the derivative replaced by a forward
/// difference of width `h`.
pub fn raychaudhuri_residual(model: &NullConeModel, s: f64, theta: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Parameter(format!("h must be positive, got {h}")));
    }
    model.check_domain(s)?;
    model.check_domain(s + h)?;
    let lo = model.eval(s, theta)?;
    let hi = model.eval(s + h, theta)?;
    let mid = model.eval(s + 0.5 * h, theta)?;
    let n = model.dim() as f64;
    Ok((hi.theta_bar - lo.theta_bar) / h
        + mid.chi_tf_norm.powi(2)
        + mid.theta_bar.powi(2) / n
        + mid.rc_ll)
}
