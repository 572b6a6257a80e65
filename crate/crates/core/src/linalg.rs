//! Tridiagonal solves. Every operator in this crate couples a node only to its
//! two angular neighbours.

use crate::error::{Error, Result};

/// Tridiagonal matrix with `lower[i]` at `(i, i-1)`, `diag[i]` at `(i, i)` and
/// `upper[i]` at `(i, i+1)`. `lower[0]` and `upper[n-1]` are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.upper[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Smallest Gershgorin lower bound `min_i (diag_i − |lower_i| − |upper_i|)`.
    pub fn gershgorin_min(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let l = if i > 0 { self.lower[i].abs() } else { 0.0 };
                let u = if i + 1 < n { self.upper[i].abs() } else { 0.0 };
                self.diag[i] - l - u
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn shifted(&self, sigma: f64) -> Self {
        let mut m = self.clone();
        m.diag.iter_mut().for_each(|d| *d -= sigma);
        m
    }

    /// Thomas algorithm without pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if rhs.len() != n {
            return Err(Error::Solver(format!(
                "right-hand side has length {}, matrix has {n} rows",
                rhs.len()
            )));
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0];
        check_pivot(denom, 0)?;
        c[0] = if n > 1 { self.upper[0] / denom } else { 0.0 };
        d[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - self.lower[i] * c[i - 1];
            check_pivot(denom, i)?;
            c[i] = if i + 1 < n { self.upper[i] / denom } else { 0.0 };
            d[i] = (rhs[i] - self.lower[i] * d[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::Solver("non-finite solution".into()));
        }
        Ok(d)
    }
}

fn check_pivot(p: f64, row: usize) -> Result<()> {
    if p.abs() < 1e-300 || !p.is_finite() {
        return Err(Error::Solver(format!("zero pivot at row {row}")));
    }
    Ok(())
}
