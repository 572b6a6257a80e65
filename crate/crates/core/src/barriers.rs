//! Gradient-estimate certificates.
//!
//! With cone constants `c_R θ̄² ≤ Rc(L̄,L̄) ≤ C_R θ̄²` and `|χ̊̄| ≤ c_χ θ̄`, the
//! expansion is sandwiched by `Z/(Z+s) ≤ θ̄ ≤ W/(W+s)`. The key inequality
//! `Φμ + Ψμ' + μ'' < 0` is then reduced to the Euler–Cauchy equation
//!
//! ```text
//! A_δ/(s+W)² μ + B/(s+W) μ' + μ'' = 0,
//! ```
//!
//! whose solutions are powers of `s + W` when `D_δ = (B−1)² − 4A_δ ≥ 0`, and
//! oscillate in `log(1 + s/W)` otherwise. In the oscillatory case the
//! positivity window, and with it the admissible height, is finite.

use std::f64::consts::PI;

use serde::Serialize;

use crate::background::NullConeModel;
use crate::base::BaseGrid;
use crate::error::{Error, Result};
use crate::graph::GraphSurface;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeConstants {
    pub c_r: f64,
    pub big_c_r: f64,
    pub c_chi: f64,
}

impl ConeConstants {
    pub const VACUUM: ConeConstants = ConeConstants {
        c_r: 0.0,
        big_c_r: 0.0,
        c_chi: 0.0,
    };

    pub fn w(&self, n: usize) -> f64 {
        let n = n as f64;
        n / (1.0 + n * self.c_r)
    }

    pub fn z(&self, n: usize) -> f64 {
        let n = n as f64;
        n / (1.0 + n * (self.big_c_r + self.c_chi * self.c_chi))
    }
}

/// Sampled estimates of `Rc(L̄,L̄)/θ̄²` and `|χ̊̄|/θ̄` over `[0, s_max] × S₀`.
/// The sampling is repeated once at double resolution and the extremes of
/// both passes are kept. This is a grid estimate, not a rigorous bound.
pub fn cone_constants(model: &NullConeModel, grid: &BaseGrid, s_max: f64, samples: usize) -> Result<ConeConstants> {
    if !(s_max > 0.0) || samples < 2 {
        return Err(Error::Parameter("region needs s_max > 0 and at least 2 samples".into()));
    }
    let s_top = s_max.min(model.lambda() * (1.0 - 1e-12));
    let thetas = grid.half_grid();
    let mut c_r = f64::INFINITY;
    let mut big_c_r = f64::NEG_INFINITY;
    let mut c_chi: f64 = 0.0;
    for pass in [samples, 2 * samples] {
        for i in 0..=pass {
            let s = s_top * i as f64 / pass as f64;
            for &t in &thetas {
                let p = model.eval(s, t)?;
                if p.rc_ll < 0.0 {
                    return Err(Error::Hypothesis(format!(
                        "Rc(L,L) = {:e} < 0 at s = {s}, theta = {t}",
                        p.rc_ll
                    )));
                }
                let tb2 = p.theta_bar * p.theta_bar;
                c_r = c_r.min(p.rc_ll / tb2);
                big_c_r = big_c_r.max(p.rc_ll / tb2);
                c_chi = c_chi.max(p.chi_tf_norm / p.theta_bar);
            }
        }
    }
    Ok(ConeConstants { c_r, big_c_r, c_chi })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `n ≤ 6`: `μ' > 0`.
    Small,
    /// `n ≥ 7`: `μ' < 0`.
    Large,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscriminantReport {
    pub n: usize,
    pub constants: ConeConstants,
    pub w: f64,
    pub z: f64,
    pub branch: Branch,
    pub b_coef: f64,
    pub a0: f64,
    pub script_d: f64,
    pub hypothesis_ok: bool,
    /// Violated branch inequality, if any.
    pub hypothesis_violation: Option<String>,
}

/// Constants `W, Z, B, A₀, 𝒟`. The branch hypothesis is evaluated and
/// recorded but does not stop the computation.
pub fn discriminant(n: usize, c_r: f64, c_chi: f64, d_c: f64) -> Result<DiscriminantReport> {
    if n < 2 {
        return Err(Error::Parameter(format!("n must be >= 2, got {n}")));
    }
    if [c_r, c_chi, d_c].iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::Parameter(format!(
            "cone constants must be nonnegative: c_R = {c_r}, c_chi = {c_chi}, C_R - c_R = {d_c}"
        )));
    }
    let constants = ConeConstants {
        c_r,
        big_c_r: c_r + d_c,
        c_chi,
    };
    let nf = n as f64;
    let w = constants.w(n);
    let z = constants.z(n);
    let k = (nf - 4.0) / (2.0 * nf);
    let (branch, b_coef, violation) = if n <= 6 {
        let slope = k + 2.0 * c_chi;
        let b = if slope > 0.0 { w * slope } else { z * slope };
        let rhs = c_r / 2.0 + (6.0 - nf) / (4.0 * nf);
        let v = (c_chi > rhs).then(|| format!("c_chi = {c_chi} > c_R/2 + (6-n)/(4n) = {rhs}"));
        (Branch::Small, b, v)
    } else {
        let b = z * (k - 2.0 * c_chi);
        let lhs = 2.0 * c_chi + c_chi * c_chi + constants.big_c_r;
        let rhs = (nf - 6.0) / (2.0 * nf);
        let v = (lhs > rhs).then(|| format!("2c_chi + c_chi^2 + C_R = {lhs} > (n-6)/(2n) = {rhs}"));
        (Branch::Large, b, v)
    };
    let a0 = a_delta(n, &constants, 0.0);
    let script_d = (b_coef - 1.0).powi(2) - 4.0 * a0;
    Ok(DiscriminantReport {
        n,
        constants,
        w,
        z,
        branch,
        b_coef,
        a0,
        script_d,
        hypothesis_ok: violation.is_none(),
        hypothesis_violation: violation,
    })
}

/// As [`discriminant`], failing when the branch hypothesis is violated.
pub fn discriminant_checked(n: usize, c_r: f64, c_chi: f64, d_c: f64) -> Result<DiscriminantReport> {
    let rep = discriminant(n, c_r, c_chi, d_c)?;
    match &rep.hypothesis_violation {
        Some(v) => Err(Error::Hypothesis(v.clone())),
        None => Ok(rep),
    }
}

fn a_delta(n: usize, c: &ConeConstants, delta: f64) -> f64 {
    let nf = n as f64;
    let w = c.w(n);
    w * w
        * (1.0 / (nf * nf) - c.c_r / 2.0
            + 1.5 * c.c_chi * c.c_chi
            + (4.0 - nf).abs() / (2.0 * nf) * c.c_chi)
        + delta
}

/// `𝒟(n, c_R, 0, 0)` in closed form.
pub fn closed_form_discriminant(n: usize, c_r: f64) -> f64 {
    let nf = n as f64;
    nf * nf / (1.0 + nf * c_r).powi(2)
        * ((nf - 2.0) * (nf - 10.0) / (4.0 * nf * nf) + (nf + 6.0) / nf * c_r + c_r * c_r)
}

/// Admissible height `W(e^{π/√−𝒟} − 1)`, infinite for `𝒟 ≥ 0`.
pub fn height_bound(n: usize, c_r: f64, script_d: f64) -> f64 {
    if script_d >= 0.0 {
        return f64::INFINITY;
    }
    let nf = n as f64;
    nf / (1.0 + nf * c_r) * ((PI / (-script_d).sqrt()).exp() - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `μ ≡ 1`, admissible when `Φ < 0` everywhere (`A₀ < 0`).
    Constant,
    /// `μ = (s + W)^p`.
    Power { p: f64 },
    /// `μ = (s + W)^q S(k log(1 + s/W) + η)` with `S = sin` (small branch) or
    /// `cos` (large branch).
    Oscillatory { q: f64, k: f64, eta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierCertificate {
    pub discriminant: DiscriminantReport,
    pub delta: f64,
    pub eta: f64,
    pub a_delta: f64,
    pub d_delta: f64,
    pub mu: TestFunction,
    pub valid_interval: (f64, f64),
    /// Right end of the positivity window (infinite for non-oscillatory μ).
    pub window_end: f64,
    pub height_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuSample {
    pub s: f64,
    pub mu: f64,
    pub mu_s: f64,
    pub mu_ss: f64,
    /// Euler–Cauchy residual relative to the size of its terms.
    pub residual: f64,
}

impl BarrierCertificate {
    pub fn w(&self) -> f64 {
        self.discriminant.w
    }

    pub fn branch(&self) -> Branch {
        self.discriminant.branch
    }

    /// `(μ, μ', μ'')` at `s`.
    pub fn mu(&self, s: f64) -> (f64, f64, f64) {
        let w = self.w();
        let x = s + w;
        match self.mu {
            TestFunction::Constant => (1.0, 0.0, 0.0),
            TestFunction::Power { p } => {
                let m = x.powf(p);
                (m, p * m / x, p * (p - 1.0) * m / (x * x))
            }
            TestFunction::Oscillatory { q, k, eta } => {
                let arg = k * (x / w).ln() + eta;
                let (s0, s1) = match self.branch() {
                    Branch::Small => (arg.sin(), arg.cos()),
                    Branch::Large => (arg.cos(), -arg.sin()),
                };
                let xq = x.powf(q);
                let mu = xq * s0;
                let first = q * s0 + k * s1;
                let mu_s = xq / x * first;
                // S'' = −S in the phase variable
                let mu_ss = xq / (x * x) * ((q - 1.0) * first + q * k * s1 - k * k * s0);
                (mu, mu_s, mu_ss)
            }
        }
    }

    pub fn sample(&self, s: f64) -> MuSample {
        let (mu, mu_s, mu_ss) = self.mu(s);
        let x = s + self.w();
        let b = self.discriminant.b_coef;
        let terms = [self.a_delta / (x * x) * mu, b / x * mu_s, mu_ss];
        let scale = terms.iter().map(|t| t.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
        let residual = match self.mu {
            TestFunction::Constant => 0.0,
            _ => terms.iter().sum::<f64>().abs() / scale,
        };
        MuSample {
            s,
            mu,
            mu_s,
            mu_ss,
            residual,
        }
    }
}

fn build(
    rep: DiscriminantReport,
    interval: (f64, f64),
    delta: f64,
    eta: f64,
) -> Result<BarrierCertificate> {
    let n = rep.n;
    let a_d = a_delta(n, &rep.constants, delta);
    let d_d = (rep.b_coef - 1.0).powi(2) - 4.0 * a_d;
    let hb = height_bound(n, rep.constants.c_r, rep.script_d);
    let (mu, window_end) = if rep.a0 < 0.0 {
        (TestFunction::Constant, f64::INFINITY)
    } else if d_d >= 0.0 {
        let p = 0.5 * (1.0 - rep.b_coef + d_d.sqrt());
        (TestFunction::Power { p }, f64::INFINITY)
    } else {
        let root = (-d_d).sqrt();
        let end = rep.w * (((PI - 2.0 * eta) / root).exp() - 1.0);
        (
            TestFunction::Oscillatory {
                q: 0.5 * (1.0 - rep.b_coef),
                k: 0.5 * root,
                eta,
            },
            end,
        )
    };
    if interval.1 >= window_end {
        return Err(Error::Interval {
            a: interval.0,
            b: interval.1,
            window_end,
        });
    }
    Ok(BarrierCertificate {
        discriminant: rep,
        delta,
        eta,
        a_delta: a_d,
        d_delta: d_d,
        mu,
        valid_interval: interval,
        window_end,
        height_bound: hb,
    })
}

/// Certificate for `[a, b]` with explicit `δ > 0` and `η ∈ (0, π/2)`.
pub fn certificate(rep: &DiscriminantReport, interval: (f64, f64), delta: f64, eta: f64) -> Result<BarrierCertificate> {
    let (a, b) = interval;
    if !(0.0 <= a && a <= b && b.is_finite()) {
        return Err(Error::Parameter(format!("invalid interval [{a}, {b}]")));
    }
    if !(delta > 0.0) || !(eta > 0.0 && eta < PI / 2.0) {
        return Err(Error::Parameter(format!(
            "need delta > 0 and eta in (0, pi/2), got delta = {delta}, eta = {eta}"
        )));
    }
    build(rep.clone(), interval, delta, eta)
}

/// Certificate with the default picks: the largest `δ = 2⁻ᵏ` whose window
/// covers `1.1 b`, and `η = min(π/8, half the remaining phase)`.
pub fn auto_certificate(rep: &DiscriminantReport, interval: (f64, f64)) -> Result<BarrierCertificate> {
    let (a, b) = interval;
    if !(0.0 <= a && a <= b && b.is_finite()) {
        return Err(Error::Parameter(format!("invalid interval [{a}, {b}]")));
    }
    let target = 1.1 * b;
    for k in 0..=60 {
        let delta = 0.5f64.powi(k);
        let d_d = (rep.b_coef - 1.0).powi(2) - 4.0 * a_delta(rep.n, &rep.constants, delta);
        if rep.a0 < 0.0 || d_d >= 0.0 {
            return build(rep.clone(), interval, delta, PI / 8.0);
        }
        let phase = 0.5 * (-d_d).sqrt() * (1.0 + target / rep.w).ln();
        if phase < PI / 2.0 {
            let eta = (PI / 8.0).min(0.5 * (PI / 2.0 - phase));
            return build(rep.clone(), interval, delta, eta);
        }
    }
    let d_small = (rep.b_coef - 1.0).powi(2) - 4.0 * a_delta(rep.n, &rep.constants, 0.5f64.powi(60));
    Err(Error::Interval {
        a,
        b,
        window_end: rep.w * ((PI / (-d_small).sqrt()).exp() - 1.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuCheck {
    pub samples: Vec<MuSample>,
    pub positive: bool,
    pub slope_sign_ok: bool,
    pub max_residual: f64,
}

impl MuCheck {
    pub fn ok(&self, residual_tol: f64) -> bool {
        self.positive && self.slope_sign_ok && self.max_residual < residual_tol
    }
}

/// Samples `μ` on `[a, b]` and checks positivity, the branch sign of `μ'`,
/// and the Euler–Cauchy residual.
pub fn test_function(cert: &BarrierCertificate, interval: (f64, f64), samples: usize) -> Result<MuCheck> {
    let (a, b) = interval;
    if b >= cert.window_end || a < 0.0 || b < a {
        return Err(Error::Interval {
            a,
            b,
            window_end: cert.window_end,
        });
    }
    let m = samples.max(2);
    let pts: Vec<MuSample> = (0..m)
        .map(|i| cert.sample(a + (b - a) * i as f64 / (m - 1) as f64))
        .collect();
    let positive = pts.iter().all(|p| p.mu > 0.0);
    let slope_sign_ok = match cert.mu {
        TestFunction::Constant => true,
        _ => match cert.branch() {
            Branch::Small => pts.iter().all(|p| p.mu_s > 0.0),
            Branch::Large => pts.iter().all(|p| p.mu_s < 0.0),
        },
    };
    let max_residual = pts.iter().map(|p| p.residual).fold(0.0, f64::max);
    Ok(MuCheck {
        samples: pts,
        positive,
        slope_sign_ok,
        max_residual,
    })
}

/// Upper bound for `Φ` with the `u⁻¹`-weighted shear terms estimated by
/// `|χ̊̄| |∇ω|² u⁻¹ = 2|χ̊̄|`, itself bounded by `2c_χ θ̄`.
pub fn phi_bound(n: usize, theta_bar: f64, rc_ll: f64, chi_tf_norm: f64, c_chi: f64) -> f64 {
    let nf = n as f64;
    let tb2 = theta_bar * theta_bar;
    tb2 / (nf * nf) - 0.5 * rc_ll
        + 0.5 * chi_tf_norm * chi_tf_norm
        + (4.0 - nf).abs() / (2.0 * nf) * c_chi * tb2
        + c_chi * c_chi * tb2
}

/// Range `[Ψ_lo, Ψ_hi]` of `Ψ` given `|χ̊̄| ≤ c_χ θ̄`.
pub fn psi_range(n: usize, theta_bar: f64, c_chi: f64) -> (f64, f64) {
    let nf = n as f64;
    let base = (nf - 4.0) / (2.0 * nf) * theta_bar;
    (base - 2.0 * c_chi * theta_bar, base + 2.0 * c_chi * theta_bar)
}

/// Sup over `[s_lo, s_hi] × S₀` of the bounds for `|Φ|` and `|Ψ|`.
pub fn phi_psi_sup(model: &NullConeModel, grid: &BaseGrid, s_lo: f64, s_hi: f64, samples: usize) -> Result<f64> {
    let n = model.dim();
    let nf = n as f64;
    let m = samples.max(2);
    let mut sup: f64 = 0.0;
    for i in 0..=m {
        let s = s_lo + (s_hi - s_lo) * i as f64 / m as f64;
        for &t in grid.nodes() {
            let p = model.eval(s, t)?;
            let chi = p.chi_tf_norm;
            let tb = p.theta_bar;
            let phi = tb * tb / (nf * nf)
                + 0.5 * p.rc_ll.abs()
                + 1.5 * chi * chi
                + (4.0 - nf).abs() / (2.0 * nf) * chi * tb;
            let psi = (nf - 4.0).abs() / (2.0 * nf) * tb + 2.0 * chi;
            sup = sup.max(phi).max(psi);
        }
    }
    Ok(sup)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeyInequalityReport {
    pub ok: bool,
    /// `min −(Φμ + Ψμ' + μ'')` over the nodes.
    pub min_margin: f64,
    /// `min δμ/(s+W)²`, the margin the construction guarantees in vacuum.
    pub min_delta_margin: f64,
    pub worst_node: usize,
}

/// Evaluates the key inequality on a surface whose heights lie in the
/// certificate's interval.
pub fn key_inequality_monitor(cert: &BarrierCertificate, surface: &GraphSurface) -> Result<KeyInequalityReport> {
    let (a, b) = cert.valid_interval;
    if let Some(w) = surface.omega().iter().find(|w| **w < a || **w > b) {
        return Err(Error::Domain(format!("omega = {w} outside certified [{a}, {b}]")));
    }
    let n = surface.grid().dim();
    let c_chi = cert.discriminant.constants.c_chi;
    let mut min_margin = f64::INFINITY;
    let mut min_delta_margin = f64::INFINITY;
    let mut worst_node = 0;
    for (j, (&s, p)) in surface.omega().iter().zip(surface.background()).enumerate() {
        let (mu, mu_s, mu_ss) = cert.mu(s);
        let phi = phi_bound(n, p.theta_bar, p.rc_ll, p.chi_tf_norm, c_chi);
        let (lo, hi) = psi_range(n, p.theta_bar, c_chi);
        let psi = if mu_s >= 0.0 { hi } else { lo };
        let margin = -(phi * mu + psi * mu_s + mu_ss);
        if margin < min_margin {
            min_margin = margin;
            worst_node = j;
        }
        let x = s + cert.w();
        min_delta_margin = min_delta_margin.min(cert.delta * mu / (x * x));
    }
    Ok(KeyInequalityReport {
        ok: min_margin > 0.0,
        min_margin,
        min_delta_margin,
        worst_node,
    })
}
