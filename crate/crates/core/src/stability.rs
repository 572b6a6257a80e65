//! Stability operator `𝓛f = −Δf − 2τ(∇f) + Bf` of a λ-STCMC graph and its
//! principal eigenvalue.
//!
//! The potential is
//!
//! ```text
//! B = −χ̊̄^{ij}h_ij − (λ/2)(θ̄⁻²|χ̊̄|² + 2/n + θ̄⁻² Rc(L̄,L̄)) − D^iτ_i − |τ|²
//!     − Rc(L̄,ν) − ⟨R̄(ν,L̄)ν,L̄⟩.
//! ```
//!
//! The discretization is tridiagonal; the principal eigenvalue is found by
//! inverse iteration with a shift below the Gershgorin disc of every row.

use serde::Serialize;

use crate::background::NullConeModel;
use crate::error::{Error, Result};
use crate::graph::GraphSurface;
use crate::linalg::Tridiagonal;

pub const DEFAULT_THRESHOLD: f64 = 1e-8;

/// Assembles `B` on a surface whose `|H⃗|²` is within `tol` of `lambda`.
pub fn stability_b(model: &NullConeModel, surface: &GraphSurface, lambda: f64, tol: f64) -> Result<Vec<f64>> {
    let dev = surface
        .hvec2()
        .iter()
        .fold(0.0f64, |m, v| m.max((v - lambda).abs()));
    if dev >= tol {
        return Err(Error::Precondition(format!(
            "surface is not {lambda}-STCMC: sup |Hvec2 - lambda| = {dev:e} >= {tol:e}"
        )));
    }
    Ok(stability_b_unchecked(model, surface, lambda))
}

/// `B` without the STCMC precondition.
pub fn stability_b_unchecked(model: &NullConeModel, surface: &GraphSurface, lambda: f64) -> Vec<f64> {
    let n = model.dim() as f64;
    let shear = surface.shear_contraction();
    let div = surface.tau_divergence();
    let tau2 = surface.tau_norm2();
    let k = surface.normal_curvature();
    surface
        .background()
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let tb2 = p.theta_bar * p.theta_bar;
            -shear[j]
                - 0.5 * lambda * (p.chi_tf_norm.powi(2) / tb2 + 2.0 / n + p.rc_ll / tb2)
                - div[j]
                - tau2[j]
                - k[j]
        })
        .collect()
}

/// Tridiagonal discretization of `𝓛` with potential `b`.
pub fn stability_operator(surface: &GraphSurface, b: &[f64]) -> Tridiagonal {
    let n = surface.len();
    let mut m = Tridiagonal::zeros(n);
    let h = surface.grid().spacing();
    let w = surface.face_weight();
    let v = surface.volume();
    let tau = surface.tau();
    let axis = n > 1;
    for j in 0..n {
        m.diag[j] = b[j];
        if !axis {
            continue;
        }
        let c = 1.0 / (h * h * v[j]);
        let right = if j + 1 < n { w[j] * c } else { 0.0 };
        let left = if j > 0 { w[j - 1] * c } else { 0.0 };
        m.diag[j] += right + left;
        m.upper[j] -= right;
        m.lower[j] -= left;
        let a = surface.background()[j].metric_a;
        let conv = tau[j] / (a * a * h);
        // −2τ(∇f) with ∇f by central differences and even ghosts at the poles
        if j + 1 < n {
            m.upper[j] -= conv;
        } else {
            m.diag[j] -= conv;
        }
        if j > 0 {
            m.lower[j] += conv;
        } else {
            m.diag[j] += conv;
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub max_iterations: usize,
    /// Residual tolerance relative to `max(1, ‖𝓛‖_∞)`.
    pub tol: f64,
    pub threshold: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            tol: 1e-12,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub b: Vec<f64>,
    pub principal_eigenvalue: f64,
    /// Positive, normalized to `sup = 1`.
    pub eigenfunction: Vec<f64>,
    pub stable: bool,
    pub threshold: f64,
    /// The cheap sufficient condition `B > 0`.
    pub b_positive: bool,
    pub iterations: usize,
    pub residual: f64,
}

impl StabilityReport {
    pub fn min_b(&self) -> f64 {
        self.b.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_b(&self) -> f64 {
        self.b.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn eigenfunction_min(&self) -> f64 {
        self.eigenfunction.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn is_stable(report: &StabilityReport, threshold: f64) -> bool {
    report.principal_eigenvalue > threshold
}

fn sup_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn principal_eigenvalue(surface: &GraphSurface, b: &[f64], opts: &EigenOptions) -> Result<StabilityReport> {
    let n = surface.len();
    if b.len() != n || b.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("B must be a finite field on the surface grid".into()));
    }
    let op = stability_operator(surface, b);
    let scale = (0..n)
        .map(|j| {
            op.diag[j].abs()
                + if j > 0 { op.lower[j].abs() } else { 0.0 }
                + if j + 1 < n { op.upper[j].abs() } else { 0.0 }
        })
        .fold(1.0, f64::max);
    let sigma = op.gershgorin_min() - 1.0;
    let shifted = op.shifted(sigma);
    let mut x = vec![1.0; n];
    let mut history = Vec::new();
    for it in 1..=opts.max_iterations {
        let y = shifted.solve(&x)?;
        let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let xx: f64 = x.iter().map(|a| a * a).sum();
        let mu = sigma + xx / xy;
        let norm = sup_norm(&y);
        let sign = if y.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        x = y.iter().map(|v| sign * v / norm).collect();
        let lx = op.apply(&x);
        let residual = lx
            .iter()
            .zip(&x)
            .fold(0.0f64, |m, (l, v)| m.max((l - mu * v).abs()))
            / scale;
        history.push(residual);
        if residual < opts.tol {
            if x.iter().any(|v| *v <= 0.0) {
                return Err(Error::Eigen {
                    iterations: it,
                    residual,
                    history,
                });
            }
            return Ok(StabilityReport {
                b: b.to_vec(),
                principal_eigenvalue: mu,
                eigenfunction: x,
                stable: mu > opts.threshold,
                threshold: opts.threshold,
                b_positive: b.iter().all(|v| *v > 0.0),
                iterations: it,
                residual,
            });
        }
    }
    let residual = history.last().copied().unwrap_or(f64::NAN);
    Err(Error::Eigen {
        iterations: opts.max_iterations,
        residual,
        history,
    })
}

/// `B` and the principal eigenpair of a λ-STCMC surface.
pub fn analyze(
    model: &NullConeModel,
    surface: &GraphSurface,
    lambda: f64,
    stcmc_tol: f64,
    opts: &EigenOptions,
) -> Result<StabilityReport> {
    let b = stability_b(model, surface, lambda, stcmc_tol)?;
    principal_eigenvalue(surface, &b, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::{make_minkowski, make_schwarzschild};
    use crate::base::BaseGrid;
    use crate::graph::build_surface;

    fn slice(model: &NullConeModel, grid: &BaseGrid, s: f64) -> GraphSurface {
        build_surface(model, grid, &vec![s; grid.len()]).unwrap()
    }

    #[test]
    fn constant_potential_is_exact() {
        let m = make_minkowski(2, 1.0).unwrap();
        let g = BaseGrid::axisymmetric(2, 64).unwrap();
        let s = slice(&m, &g, 1.0);
        let r = principal_eigenvalue(&s, &vec![0.5; 64], &EigenOptions::default()).unwrap();
        assert!((r.principal_eigenvalue - 0.5).abs() < 1e-10);
        assert!(r.eigenfunction.iter().all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn rayleigh_bracketing() {
        let m = make_minkowski(2, 1.0).unwrap();
        let g = BaseGrid::axisymmetric(2, 64).unwrap();
        let s = slice(&m, &g, 1.0);
        let b = g.sample(|t| 0.5 + 0.1 * t.cos());
        let r = principal_eigenvalue(&s, &b, &EigenOptions::default()).unwrap();
        assert!(r.principal_eigenvalue >= r.min_b() && r.principal_eigenvalue <= r.max_b());
        assert!(r.eigenfunction_min() > 0.0);
    }

    #[test]
    fn schwarzschild_profile_signs() {
        let m = make_schwarzschild(1.0, 2.0).unwrap();
        let g = BaseGrid::axisymmetric(2, 32).unwrap();
        for (r, expect) in [(2.5, true), (3.0, false), (3.5, false)] {
            let s = m.s_of_radius(r);
            let surf = slice(&m, &g, s);
            let lambda = m.slice_hvec2(s, 0.0).unwrap();
            let rep = analyze(&m, &surf, lambda, 1e-12, &EigenOptions::default()).unwrap();
            assert_eq!(is_stable(&rep, DEFAULT_THRESHOLD), expect, "r = {r}");
            if r == 3.0 {
                assert!(rep.principal_eigenvalue.abs() < 1e-6);
            }
        }
        let mots = slice(&m, &g, 0.0);
        let b = stability_b(&m, &mots, 0.0, 1e-12).unwrap();
        assert!(b.iter().all(|v| (v - 0.0625).abs() < 1e-14));
    }

    #[test]
    fn rejects_non_stcmc_surface() {
        let m = make_schwarzschild(1.0, 2.0).unwrap();
        let g = BaseGrid::symmetric(2).unwrap();
        let s = slice(&m, &g, 1.0);
        assert!(matches!(stability_b(&m, &s, 0.0, 1e-8), Err(Error::Precondition(_))));
    }

    #[test]
    fn non_convergence_reports_history() {
        let m = make_minkowski(2, 1.0).unwrap();
        let g = BaseGrid::axisymmetric(2, 64).unwrap();
        let s = slice(&m, &g, 1.0);
        let b = g.sample(|t| t.cos());
        let opts = EigenOptions {
            max_iterations: 2,
            ..Default::default()
        };
        match principal_eigenvalue(&s, &b, &opts) {
            Err(Error::Eigen { history, .. }) => assert_eq!(history.len(), 2),
            other => panic!("expected eigen error, got {other:?}"),
        }
    }
}
