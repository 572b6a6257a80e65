//! Discretization of the base manifold `S₀ = Sⁿ`.
//!
//! Axisymmetric fields are functions of the polar angle ϑ ∈ [0, π]. The grid is
//! cell centred: node `j` sits at `(j + ½)·π/N` and the two poles are cell
//! faces. Even extension across a pole makes the one-sided difference at the
//! pole face vanish, and the `sinⁿ⁻¹` flux weight vanishes there as well, so
//! the pole faces carry no flux.
//!
//! The symmetric mode is the degenerate one-cell grid: a single node and no
//! interior faces, so every angular derivative is zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridMode {
    Symmetric,
    Axisymmetric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaseGrid {
    mode: GridMode,
    dim: usize,
    spacing: f64,
    nodes: Vec<f64>,
    faces: Vec<f64>,
    cell_measure: Vec<f64>,
    face_weight: Vec<f64>,
}

impl BaseGrid {
    pub const DEFAULT_N_THETA: usize = 256;

    pub fn symmetric(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let pi = std::f64::consts::PI;
        Ok(Self {
            mode: GridMode::Symmetric,
            dim,
            spacing: pi,
            nodes: vec![0.5 * pi],
            faces: Vec::new(),
            cell_measure: vec![sin_power_integral(dim - 1, pi) / pi],
            face_weight: Vec::new(),
        })
    }

    pub fn axisymmetric(dim: usize, n_theta: usize) -> Result<Self> {
        check_dim(dim)?;
        if n_theta < 4 {
            return Err(Error::Parameter(format!(
                "axisymmetric grid needs at least 4 nodes, got {n_theta}"
            )));
        }
        let pi = std::f64::consts::PI;
        let h = pi / n_theta as f64;
        let nodes: Vec<f64> = (0..n_theta).map(|j| (j as f64 + 0.5) * h).collect();
        let faces: Vec<f64> = (1..n_theta).map(|j| j as f64 * h).collect();
        let cell_measure = (0..n_theta)
            .map(|j| {
                let lo = j as f64 * h;
                let hi = lo + h;
                (sin_power_integral(dim - 1, hi) - sin_power_integral(dim - 1, lo)) / h
            })
            .collect();
        let face_weight = faces.iter().map(|&t| t.sin().powi(dim as i32 - 1)).collect();
        Ok(Self {
            mode: GridMode::Axisymmetric,
            dim,
            spacing: h,
            nodes,
            faces,
            cell_measure,
            face_weight,
        })
    }

    pub fn mode(&self) -> GridMode {
        self.mode
    }

    /// Dimension `n` of the base sphere.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Polar angles of the nodes.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Polar angles of the interior faces; face `j` separates nodes `j` and `j + 1`.
    pub fn faces(&self) -> &[f64] {
        &self.faces
    }

    /// Cell average of `sinⁿ⁻¹ϑ`, the angular part of the volume element.
    pub fn cell_measure(&self) -> &[f64] {
        &self.cell_measure
    }

    /// `sinⁿ⁻¹ϑ` at the interior faces.
    pub fn face_weight(&self) -> &[f64] {
        &self.face_weight
    }

    /// Nodes and faces merged in increasing order: even entries are faces
    /// (including both poles), odd entries are nodes.
    pub fn half_grid(&self) -> Vec<f64> {
        match self.mode {
            GridMode::Symmetric => vec![self.nodes[0]],
            GridMode::Axisymmetric => {
                let n = self.nodes.len();
                (0..=2 * n).map(|k| 0.5 * k as f64 * self.spacing).collect()
            }
        }
    }

    /// Index into [`half_grid`](Self::half_grid) when `theta` lies on it.
    pub fn half_grid_index(&self, theta: f64) -> Option<usize> {
        match self.mode {
            GridMode::Symmetric => Some(0),
            GridMode::Axisymmetric => {
                let x = 2.0 * theta / self.spacing;
                let k = x.round();
                if (x - k).abs() < 1e-9 && k >= 0.0 && k <= 2.0 * self.nodes.len() as f64 {
                    Some(k as usize)
                } else {
                    None
                }
            }
        }
    }

    /// Discrete g-volume inner product with unit leaf metric: `Σ S_j f_j g_j`.
    pub fn dot(&self, f: &[f64], g: &[f64]) -> f64 {
        self.cell_measure
            .iter()
            .zip(f.iter().zip(g))
            .map(|(w, (a, b))| w * a * b)
            .sum::<f64>()
            * self.spacing
    }

    /// Samples an angular function at the nodes.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().map(|&t| f(t)).collect()
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::Parameter(format!("dimension n must be >= 2, got {dim}")));
    }
    Ok(())
}

/// `∫₀ˣ sinᵐ t dt` by the standard reduction formula.
pub fn sin_power_integral(m: usize, x: f64) -> f64 {
    match m {
        0 => x,
        1 => 1.0 - x.cos(),
        _ => {
            let mf = m as f64;
            -x.sin().powi(m as i32 - 1) * x.cos() / mf
                + (mf - 1.0) / mf * sin_power_integral(m - 2, x)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_power_integral_matches_quadrature() {
        for m in 0..7 {
            let x = 2.3;
            let k = 20_000;
            let h = x / k as f64;
            let quad: f64 = (0..k)
                .map(|i| ((i as f64 + 0.5) * h).sin().powi(m as i32) * h)
                .sum();
            assert!((quad - sin_power_integral(m, x)).abs() < 1e-8, "m = {m}");
        }
    }

    #[test]
    fn cell_measures_sum_to_sphere_factor() {
        let grid = BaseGrid::axisymmetric(2, 64).unwrap();
        let total: f64 = grid.cell_measure().iter().sum::<f64>() * grid.spacing();
        assert!((total - 2.0).abs() < 1e-13);
        let sym = BaseGrid::symmetric(3).unwrap();
        assert!((sym.cell_measure()[0] * sym.spacing() - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
    }

    #[test]
    fn half_grid_interleaves_faces_and_nodes() {
        let grid = BaseGrid::axisymmetric(2, 8).unwrap();
        let half = grid.half_grid();
        assert_eq!(half.len(), 17);
        assert_eq!(grid.half_grid_index(grid.nodes()[3]), Some(7));
        assert_eq!(grid.half_grid_index(grid.faces()[0]), Some(2));
        assert_eq!(grid.half_grid_index(0.123), None);
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(BaseGrid::symmetric(1).is_err());
        assert!(BaseGrid::axisymmetric(2, 2).is_err());
    }
}
