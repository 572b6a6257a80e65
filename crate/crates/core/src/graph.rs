//! Geometry of graphs `{(ω(z), z)}` inside a model cone.
//!
//! The induced metric is the leaf metric evaluated at height `ω`, so on the
//! axisymmetric base it reads `A² dϑ² + R² dΩ²` with `A = a(ω(ϑ), ϑ)` and
//! `R = b(ω(ϑ), ϑ) sin ϑ`. The Laplace–Beltrami operator is discretized in
//! conservative form,
//!
//! ```text
//! Δf_j = (w_{j+½}(f_{j+1} − f_j) − w_{j−½}(f_j − f_{j−1})) / (h² V_j),
//! w = b^{n−1} sin^{n−1}ϑ / a  (faces),   V = a b^{n−1} S  (cells),
//! ```
//!
//! which is symmetric in the inner product `Σ V_j f_j g_j`. The node gradient
//! is the mean of the two adjacent face differences, so the same stencil
//! feeds `u`, `Δ` and the torsion.
//!
//! Mean curvature follows from the second fundamental form identity
//! `h_ij = χ_ij + u χ̄_ij − D²_ij ω − ζ_i ω_j − ζ_j ω_i`, with the background
//! leaves taken umbilic in the `ν` direction (`χ = (θ/n) γ̄`):
//! `H = θ − 2ζ(∇ω) + u θ̄ − Δω`.

use crate::background::{ConePoint, NullConeModel};
use crate::base::{BaseGrid, GridMode};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GraphSurface {
    grid: BaseGrid,
    omega: Vec<f64>,
    bg: Vec<ConePoint>,
    face_bg: Vec<ConePoint>,
    face_slope: Vec<f64>,
    face_weight: Vec<f64>,
    volume: Vec<f64>,
    slope: Vec<f64>,
    laplacian: Vec<f64>,
    hess_phi: Vec<f64>,
    u: Vec<f64>,
    mean_curvature: Vec<f64>,
    hvec2: Vec<f64>,
}

pub fn build_surface(model: &NullConeModel, grid: &BaseGrid, omega: &[f64]) -> Result<GraphSurface> {
    GraphSurface::new(model, grid, omega)
}

impl GraphSurface {
    pub fn new(model: &NullConeModel, grid: &BaseGrid, omega: &[f64]) -> Result<Self> {
        if omega.len() != grid.len() {
            return Err(Error::Input(format!(
                "omega has {} values, grid has {} nodes",
                omega.len(),
                grid.len()
            )));
        }
        if !model.supports_grid(grid) {
            return Err(Error::Discretization(format!(
                "model tables (n = {}, n_theta = {:?}) do not cover this grid (n = {}, {} nodes)",
                model.dim(),
                model.table_resolution(),
                grid.dim(),
                grid.len()
            )));
        }
        if let Some((j, w)) = omega
            .iter()
            .enumerate()
            .find(|(_, w)| !(**w >= 0.0 && **w < model.lambda()))
        {
            return Err(Error::Domain(format!(
                "omega[{j}] = {w} outside [0, {})",
                model.lambda()
            )));
        }
        let n = grid.len();
        let dim = grid.dim() as f64;
        let h = grid.spacing();
        let nodes = grid.nodes();
        let bg = omega
            .iter()
            .zip(nodes)
            .map(|(&w, &t)| model.eval(w, t))
            .collect::<Result<Vec<_>>>()?;

        let faces = grid.faces();
        let mut face_bg = Vec::with_capacity(faces.len());
        let mut face_slope = Vec::with_capacity(faces.len());
        let mut face_weight = Vec::with_capacity(faces.len());
        for (f, &t) in faces.iter().enumerate() {
            let p = model.eval(0.5 * (omega[f] + omega[f + 1]), t)?;
            face_slope.push((omega[f + 1] - omega[f]) / h);
            face_weight.push(p.metric_b.powf(dim - 1.0) * grid.face_weight()[f] / p.metric_a);
            face_bg.push(p);
        }
        let volume: Vec<f64> = bg
            .iter()
            .zip(grid.cell_measure())
            .map(|(p, s)| p.metric_a * p.metric_b.powf(dim - 1.0) * s)
            .collect();

        let flux = |j: usize, k: isize| -> f64 {
            // flux through the face between j and j+k; zero through a pole
            let f = if k > 0 { j as isize } else { j as isize - 1 };
            if f < 0 || f as usize >= face_slope.len() {
                0.0
            } else {
                face_weight[f as usize] * face_slope[f as usize]
            }
        };
        let face_d = |f: isize| -> f64 {
            if f < 0 || f as usize >= face_slope.len() {
                0.0
            } else {
                face_slope[f as usize]
            }
        };

        let mut slope = vec![0.0; n];
        let mut laplacian = vec![0.0; n];
        let mut hess_phi = vec![0.0; n];
        let mut u = vec![0.0; n];
        let mut mean_curvature = vec![0.0; n];
        let mut hvec2 = vec![0.0; n];

        let log_b_face = |f: isize| -> Result<f64> {
            if f < 0 {
                Ok(model.eval(omega[0], 0.0)?.metric_b.ln())
            } else if f as usize >= face_bg.len() {
                Ok(model.eval(omega[n - 1], std::f64::consts::PI)?.metric_b.ln())
            } else {
                Ok(face_bg[f as usize].metric_b.ln())
            }
        };

        for j in 0..n {
            let p = &bg[j];
            let a2 = p.metric_a * p.metric_a;
            if grid.mode() == GridMode::Axisymmetric {
                let fl = j as isize - 1;
                let fr = j as isize;
                slope[j] = 0.5 * (face_d(fl) + face_d(fr));
                laplacian[j] = (flux(j, 1) - flux(j, -1)) / (h * volume[j]);
                let dlogb = (log_b_face(fr)? - log_b_face(fl)?) / h;
                let cot = nodes[j].cos() / nodes[j].sin();
                hess_phi[j] = (dlogb + cot) * slope[j] / a2;
            }
            u[j] = 0.5 * slope[j] * slope[j] / a2;
            let zeta_grad = p.zeta * slope[j] / a2;
            mean_curvature[j] = p.theta - 2.0 * zeta_grad + u[j] * p.theta_bar - laplacian[j];
            hvec2[j] = 2.0 * mean_curvature[j] * p.theta_bar;
        }
        if mean_curvature.iter().chain(&u).any(|v| !v.is_finite()) {
            return Err(Error::Discretization(
                "non-finite derivative; grid too coarse for omega".into(),
            ));
        }

        Ok(Self {
            grid: grid.clone(),
            omega: omega.to_vec(),
            bg,
            face_bg,
            face_slope,
            face_weight,
            volume,
            slope,
            laplacian,
            hess_phi,
            u,
            mean_curvature,
            hvec2,
        })
    }

    pub fn grid(&self) -> &BaseGrid {
        &self.grid
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// Background data at each node `(ω_j, ϑ_j)`.
    pub fn background(&self) -> &[ConePoint] {
        &self.bg
    }

    /// Background data at each interior face, evaluated at the mean height.
    pub fn face_background(&self) -> &[ConePoint] {
        &self.face_bg
    }

    /// `∂_ϑ ω` at the nodes.
    pub fn slope(&self) -> &[f64] {
        &self.slope
    }

    pub fn face_slope(&self) -> &[f64] {
        &self.face_slope
    }

    pub fn face_weight(&self) -> &[f64] {
        &self.face_weight
    }

    /// Discrete g-volume of each cell per unit `h`, up to the orbit-sphere area.
    pub fn volume(&self) -> &[f64] {
        &self.volume
    }

    pub fn laplacian(&self) -> &[f64] {
        &self.laplacian
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn mean_curvature(&self) -> &[f64] {
        &self.mean_curvature
    }

    /// `|H⃗|² = 2Hθ̄`.
    pub fn hvec2(&self) -> &[f64] {
        &self.hvec2
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// The g-volume inner product `Σ V_j f_j g_j h`.
    pub fn volume_dot(&self, f: &[f64], g: &[f64]) -> f64 {
        self.volume
            .iter()
            .zip(f.iter().zip(g))
            .map(|(v, (a, b))| v * a * b)
            .sum::<f64>()
            * self.grid.spacing()
    }

    /// `Δ_g f` with the surface's frozen weights.
    pub fn apply_laplacian(&self, f: &[f64]) -> Vec<f64> {
        let n = self.len();
        if self.grid.mode() == GridMode::Symmetric {
            return vec![0.0; n];
        }
        let h2 = self.grid.spacing().powi(2);
        (0..n)
            .map(|j| {
                let right = if j + 1 < n {
                    self.face_weight[j] * (f[j + 1] - f[j])
                } else {
                    0.0
                };
                let left = if j > 0 {
                    self.face_weight[j - 1] * (f[j] - f[j - 1])
                } else {
                    0.0
                };
                (right - left) / (h2 * self.volume[j])
            })
            .collect()
    }

    /// Node gradient `∂_ϑ f` with even reflection at the poles.
    pub fn apply_gradient(&self, f: &[f64]) -> Vec<f64> {
        let n = self.len();
        if self.grid.mode() == GridMode::Symmetric {
            return vec![0.0; n];
        }
        let h = self.grid.spacing();
        (0..n)
            .map(|j| {
                let hi = if j + 1 < n { f[j + 1] } else { f[j] };
                let lo = if j > 0 { f[j - 1] } else { f[j] };
                (hi - lo) / (2.0 * h)
            })
            .collect()
    }

    /// Mixed components `(h^ϑ_ϑ, h^φ_φ)` of the second fundamental form; the
    /// orbit direction has multiplicity `n − 1`.
    pub fn second_fundamental_form(&self) -> Vec<[f64; 2]> {
        let n = self.grid.dim() as f64;
        (0..self.len())
            .map(|j| {
                let p = &self.bg[j];
                let a2 = p.metric_a * p.metric_a;
                let hess_t = self.laplacian[j] - (n - 1.0) * self.hess_phi[j];
                let zeta_term = 2.0 * p.zeta * self.slope[j] / a2;
                let chi = p.theta / n;
                [
                    chi - zeta_term + self.u[j] * p.kappa[0] - hess_t,
                    chi + self.u[j] * p.kappa[1] - self.hess_phi[j],
                ]
            })
            .collect()
    }

    /// `χ̊̄^{ij} h_ij`.
    pub fn shear_contraction(&self) -> Vec<f64> {
        self.second_fundamental_form()
            .iter()
            .zip(&self.bg)
            .map(|(hh, p)| p.shear * (hh[0] - hh[1]))
            .collect()
    }

    /// `χ̄^{ij} h_ij`.
    pub fn chibar_contraction(&self) -> Vec<f64> {
        let n = self.grid.dim() as f64;
        self.second_fundamental_form()
            .iter()
            .zip(&self.bg)
            .map(|(hh, p)| p.kappa[0] * hh[0] + (n - 1.0) * p.kappa[1] * hh[1])
            .collect()
    }

    /// `ϑ` component of the torsion `τ = ζ − χ̄(·, ∇ω)` at the nodes.
    pub fn tau(&self) -> Vec<f64> {
        self.bg
            .iter()
            .zip(&self.slope)
            .map(|(p, d)| p.zeta - p.kappa[0] * d)
            .collect()
    }

    /// `|τ|²_g`.
    pub fn tau_norm2(&self) -> Vec<f64> {
        self.tau()
            .iter()
            .zip(&self.bg)
            .map(|(t, p)| t * t / (p.metric_a * p.metric_a))
            .collect()
    }

    /// `D^i τ_i`, conservative form with the torsion sampled at the faces.
    pub fn tau_divergence(&self) -> Vec<f64> {
        let n = self.len();
        if self.grid.mode() == GridMode::Symmetric {
            return vec![0.0; n];
        }
        let h = self.grid.spacing();
        let flux: Vec<f64> = self
            .face_bg
            .iter()
            .zip(self.face_slope.iter().zip(&self.face_weight))
            .map(|(p, (d, w))| w * (p.zeta - p.kappa[0] * d))
            .collect();
        (0..n)
            .map(|j| {
                let right = if j + 1 < n { flux[j] } else { 0.0 };
                let left = if j > 0 { flux[j - 1] } else { 0.0 };
                (right - left) / (h * self.volume[j])
            })
            .collect()
    }

    /// Curvature contraction `Rc(L̄,ν) + ⟨R̄(ν,L̄)ν,L̄⟩` along the graph normal,
    /// with the tidal part of `Rc(L̄,L̄)` taken isotropic.
    pub fn normal_curvature(&self) -> Vec<f64> {
        let n = self.grid.dim() as f64;
        self.bg
            .iter()
            .zip(&self.u)
            .map(|(p, u)| p.rc_lnu + p.weyl + u * p.rc_ll * (2.0 / n - 1.0))
            .collect()
    }

    /// Pointwise `|h|_g + |χ̄|_g`.
    pub fn curvature_density(&self) -> Vec<f64> {
        let n = self.grid.dim() as f64;
        self.second_fundamental_form()
            .iter()
            .zip(&self.bg)
            .map(|(hh, p)| {
                let h_norm = (hh[0] * hh[0] + (n - 1.0) * hh[1] * hh[1]).sqrt();
                let c_norm = (p.kappa[0].powi(2) + (n - 1.0) * p.kappa[1].powi(2)).sqrt();
                h_norm + c_norm
            })
            .collect()
    }
}

/// Discrete stand-in for `|A|`: `sup (|h|_g + |χ̄|_g)` over the grid.
pub fn curvature_proxy(surface: &GraphSurface) -> f64 {
    surface
        .curvature_density()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `τ` of a surface; zero in symmetric mode by construction of the slope.
pub fn torsion_tau(surface: &GraphSurface) -> Vec<f64> {
    surface.tau()
}

/// Pointwise geometry from an analytic jet `(ω, ∂_ϑω, ∂²_ϑω)`. Only available
/// on spherically symmetric models, where the leaf metric depends on `s`
/// alone and its angular derivatives are known in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointGeometry {
    pub bg: ConePoint,
    pub u: f64,
    pub laplacian: f64,
    pub hess_phi: f64,
    pub mean_curvature: f64,
    pub tau: f64,
    pub tau_divergence: f64,
    /// `(n − 1) R'/R − A'/A` with `A = a(ω)`, `R = A sin ϑ`.
    pub log_weight: f64,
}

impl PointGeometry {
    pub fn at(model: &NullConeModel, theta: f64, jet: [f64; 3]) -> Result<Self> {
        if !model.is_spherical() {
            return Err(Error::Input(
                "pointwise jet geometry needs a spherically symmetric model".into(),
            ));
        }
        let [w, d1, d2] = jet;
        let p = model.eval(w, theta)?;
        let n = model.dim() as f64;
        let a = p.metric_a;
        let a2 = a * a;
        let kappa = p.kappa[0];
        let cot = theta.cos() / theta.sin();
        // A = R/sinϑ = r(ω): A'/A = κ ω', R'/R = κ ω' + cot ϑ.
        let log_a = kappa * d1;
        let log_r = log_a + cot;
        let laplacian = (d2 + d1 * ((n - 1.0) * log_r - log_a)) / a2;
        let hess_phi = log_r * d1 / a2;
        let u = 0.5 * d1 * d1 / a2;
        let mean_curvature = p.theta - 2.0 * p.zeta * d1 / a2 + u * p.theta_bar - laplacian;
        let tau = -kappa * d1;
        let tau_d = -(p.theta_bar_s / n * d1 * d1 + kappa * d2);
        let tau_divergence = (tau_d + tau * ((n - 1.0) * log_r - log_a)) / a2;
        Ok(Self {
            bg: p,
            u,
            laplacian,
            hess_phi,
            mean_curvature,
            tau,
            tau_divergence,
            log_weight: (n - 1.0) * log_r - log_a,
        })
    }

    /// `Δf` on the graph for a jet `(∂_ϑ f, ∂²_ϑ f)`.
    pub fn laplacian_of(&self, df: f64, d2f: f64) -> f64 {
        (d2f + df * self.log_weight) / self.bg.metric_a.powi(2)
    }

    /// `τ(∇f)`.
    pub fn tau_pairing(&self, df: f64) -> f64 {
        self.tau * df / self.bg.metric_a.powi(2)
    }

    /// `χ̄^{ij} h_ij` for an umbilic cone.
    pub fn chibar_contraction(&self) -> f64 {
        self.bg.kappa[0] * self.mean_curvature
    }

    pub fn normal_curvature(&self, n: usize) -> f64 {
        let nf = n as f64;
        self.bg.rc_lnu + self.bg.weyl + self.u * self.bg.rc_ll * (2.0 / nf - 1.0)
    }
}
