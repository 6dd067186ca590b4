//! Regularized principal-value quadrature on the circle.
//!
//! The functionals eta, psi and phi are all of the form
//! `(sin s / 2 pi) PV-int_0^{2pi} u(sigma) / (cos s - cos sigma) d sigma`
//! with a numerator that matches the kernel zeros at `sigma = s` and
//! `sigma = 2 pi - s`. Subtracting the numerator value at the singular point
//! turns the integrand into a smooth periodic function (the subtracted
//! constant integrates to zero against the kernel), which the uniform
//! trapezoid rule then resolves to spectral accuracy. Nodes are placed at
//! half-step offsets `sigma_i = 2 pi (i + 1/2) / M` so they rarely collide
//! with the singular points; the few that come closer than the exclusion
//! radius use the analytic limit of the regularized integrand instead.
//!
//! Sign convention: the kernel is taken as `1 / (cos sigma - cos s)`. This is
//! the orientation under which the KMS symbol has
//! `eta(s) = 2 atan(rho sin s / (1 - rho cos s))` and under which
//! `c1 = -f' eta` reproduces the actual first-order eigenvalue error; see the
//! regression tests against the reference eigensolver.

use crate::error::{invalid, Error, Result};
use crate::symbol::CosineSymbol;
use std::f64::consts::PI;

/// Resolution knobs for the principal-value quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvConfig {
    /// Number of trapezoid nodes on `[0, 2 pi)`; at least 64 and even.
    pub nodes: usize,
    /// Angular guard around the singular points inside which nodes take the
    /// regularized integrand's limit value.
    pub exclusion_radius: f64,
    /// Step for the finite-difference derivative of eta.
    pub fd_step: f64,
}

impl Default for PvConfig {
    fn default() -> Self {
        PvConfig {
            nodes: 4096,
            exclusion_radius: 1e-6,
            fd_step: 1e-3,
        }
    }
}

/// The quotient `b_f(sigma, s) = (f(sigma) - f(s)) / (2 (cos s - cos sigma))`
/// with its removable singularities filled in:
/// `b(s, s) = f'(s) / (2 sin s)`, `b(0, 0) = f''(0) / 2`,
/// `b(pi, pi) = -f''(pi) / 2`.
pub fn b_eval(f: &CosineSymbol, sigma: f64, s: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&s) {
        return Err(invalid(format!("b_eval: s must lie in [0, pi], got {s}")));
    }
    if !sigma.is_finite() {
        return Err(invalid("b_eval: sigma must be finite"));
    }
    let den = 2.0 * (s.cos() - sigma.cos());
    if den.abs() <= 1e-12 {
        let sin_s = s.sin();
        if sin_s <= 1e-9 {
            return if s < PI / 2.0 {
                Ok(f.derivative(0.0, 2)? / 2.0)
            } else {
                Ok(-f.derivative(PI, 2)? / 2.0)
            };
        }
        return Ok(f.derivative(s, 1)? / (2.0 * sin_s));
    }
    Ok((f.eval(sigma) - f.eval(s)) / den)
}

/// Precomputed trapezoid grid for a fixed [`PvConfig`].
#[derive(Debug, Clone)]
pub struct PvQuadrature {
    cfg: PvConfig,
    cos_sigma: Vec<f64>,
    sigma: Vec<f64>,
}

/// A symbol with its values cached at the quadrature nodes.
#[derive(Debug, Clone)]
pub struct SampledSymbol {
    symbol: CosineSymbol,
    values: Vec<f64>,
}

impl SampledSymbol {
    pub fn symbol(&self) -> &CosineSymbol {
        &self.symbol
    }
}

fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Within this angular window around a singular point the integrand switches
/// to cancellation-free sine-product forms.
const STABLE_WINDOW: f64 = 0.05;

/// `f(sigma) - f(s)` without cancellation:
/// `-4 sum_k c_k sin(k (sigma+s)/2) sin(k (sigma-s)/2)`.
fn symbol_difference(coeffs: &[f64], sigma: f64, s: f64) -> f64 {
    let a = 0.5 * (sigma + s);
    let b = 0.5 * (sigma - s);
    let mut acc = 0.0;
    for (k, &c) in coeffs.iter().enumerate().skip(1) {
        let k = k as f64;
        acc += c * (k * a).sin() * (k * b).sin();
    }
    -4.0 * acc
}

/// `cos s - cos sigma` without cancellation: `2 sin((sigma+s)/2) sin((sigma-s)/2)`.
fn cos_difference(sigma: f64, s: f64) -> f64 {
    2.0 * (0.5 * (sigma + s)).sin() * (0.5 * (sigma - s)).sin()
}

/// Limit data of `b` on the diagonal at an interior `s`.
struct DiagonalData {
    /// `b(s, s)`
    value: f64,
    /// `d/d sigma b(sigma, s)` at `sigma = s`
    slope: f64,
}

fn b_diagonal(f: &CosineSymbol, s: f64, sin_s: f64, cos_s: f64) -> Result<DiagonalData> {
    let f1 = f.derivative(s, 1)?;
    let f2 = f.derivative(s, 2)?;
    Ok(DiagonalData {
        value: f1 / (2.0 * sin_s),
        slope: (f2 * sin_s - f1 * cos_s) / (4.0 * sin_s * sin_s),
    })
}

impl PvQuadrature {
    pub fn new(cfg: PvConfig) -> Result<Self> {
        if cfg.nodes < 64 || cfg.nodes % 2 != 0 {
            return Err(invalid(format!(
                "quadrature nodes must be even and at least 64, got {}",
                cfg.nodes
            )));
        }
        if !(cfg.exclusion_radius > 0.0) {
            return Err(invalid("exclusion radius must be positive"));
        }
        if !(cfg.fd_step > 0.0 && cfg.fd_step < 1e-2) {
            return Err(invalid(format!(
                "fd_step must lie in (0, 1e-2), got {}",
                cfg.fd_step
            )));
        }
        let m = cfg.nodes;
        let sigma: Vec<f64> = (0..m)
            .map(|i| 2.0 * PI * (i as f64 + 0.5) / m as f64)
            .collect();
        let cos_sigma = sigma.iter().map(|x| x.cos()).collect();
        Ok(PvQuadrature { cfg, cos_sigma, sigma })
    }

    pub fn config(&self) -> &PvConfig {
        &self.cfg
    }

    /// Caches the values of `f` at the quadrature nodes.
    pub fn sample(&self, f: &CosineSymbol) -> SampledSymbol {
        SampledSymbol {
            symbol: f.clone(),
            values: self.sigma.iter().map(|&x| f.eval(x)).collect(),
        }
    }

    fn check(&self, f: &SampledSymbol, s: f64) -> Result<()> {
        if f.values.len() != self.cfg.nodes {
            return Err(invalid("sampled symbol belongs to a different grid"));
        }
        if !(0.0..=PI).contains(&s) {
            return Err(invalid(format!("s must lie in [0, pi], got {s}")));
        }
        Ok(())
    }

    /// Guard radius around the singular points: at least the configured
    /// exclusion radius, widened where harmless, narrowed near the endpoints
    /// where the integrand steepens.
    fn guard_radius(&self, s: f64) -> f64 {
        (0.05 * s.min(PI - s)).clamp(self.cfg.exclusion_radius, 1e-5)
    }

    /// `eta_f(s) = (sin s / 2 pi) PV-int log b_f(sigma, s) / (cos sigma - cos s) d sigma`.
    pub fn eta(&self, f: &SampledSymbol, s: f64) -> Result<f64> {
        self.check(f, s)?;
        let sin_s = s.sin();
        if s == 0.0 || s == PI || sin_s == 0.0 {
            return Ok(0.0);
        }
        let cos_s = s.cos();
        let fs = f.symbol.eval(s);
        let diag = b_diagonal(&f.symbol, s, sin_s, cos_s)?;
        if diag.value <= 0.0 {
            return Err(Error::NonPositiveQuotient { theta: s, value: diag.value });
        }
        let log_b_ss = diag.value.ln();
        let limit = diag.slope / (diag.value * sin_s);
        let mirror = 2.0 * PI - s;
        let delta = self.guard_radius(s);
        let mut sum = 0.0;
        for i in 0..self.cfg.nodes {
            let sigma = self.sigma[i];
            let dist = angular_distance(sigma, s).min(angular_distance(sigma, mirror));
            let (num, den) = if dist < delta {
                sum += limit;
                continue;
            } else if dist < STABLE_WINDOW {
                (symbol_difference(f.symbol.coeffs(), sigma, s), cos_difference(sigma, s))
            } else {
                (f.values[i] - fs, cos_s - self.cos_sigma[i])
            };
            let b = num / (2.0 * den);
            if b <= 0.0 {
                return Err(Error::NonPositiveQuotient { theta: sigma, value: b });
            }
            sum += (b.ln() - log_b_ss) / den;
        }
        // kernel orientation (cos sigma - cos s): flip the accumulated sum
        Ok(-sin_s * sum / self.cfg.nodes as f64)
    }

    /// `psi(s)`: same kernel with numerator `b_g / b_f`. The constant term
    /// `R(s) PV-int d sigma / (cos s - cos sigma)` vanishes and is dropped.
    pub fn psi(&self, f: &SampledSymbol, g: &SampledSymbol, s: f64) -> Result<f64> {
        self.ratio_integral(f, g, s, false)
    }

    /// `phi(s)`: numerator `b_g / (b_f + b_g)`.
    pub fn phi(&self, f: &SampledSymbol, g: &SampledSymbol, s: f64) -> Result<f64> {
        self.ratio_integral(f, g, s, true)
    }

    fn ratio_integral(
        &self,
        f: &SampledSymbol,
        g: &SampledSymbol,
        s: f64,
        add_g_to_denominator: bool,
    ) -> Result<f64> {
        self.check(f, s)?;
        self.check(g, s)?;
        let sin_s = s.sin();
        if s == 0.0 || s == PI || sin_s == 0.0 {
            return Ok(0.0);
        }
        let cos_s = s.cos();
        let fs = f.symbol.eval(s);
        let gs = g.symbol.eval(s);
        let df = b_diagonal(&f.symbol, s, sin_s, cos_s)?;
        let dg = b_diagonal(&g.symbol, s, sin_s, cos_s)?;
        let (den_value, den_slope) = if add_g_to_denominator {
            (df.value + dg.value, df.slope + dg.slope)
        } else {
            (df.value, df.slope)
        };
        if den_value <= 0.0 {
            return Err(Error::NonPositiveQuotient { theta: s, value: den_value });
        }
        let r_ss = dg.value / den_value;
        // d/d sigma of b_g / den at sigma = s
        let r_slope = (dg.slope * den_value - dg.value * den_slope) / (den_value * den_value);
        let limit = r_slope / sin_s;
        let mirror = 2.0 * PI - s;
        let delta = self.guard_radius(s);
        let mut sum = 0.0;
        for i in 0..self.cfg.nodes {
            let sigma = self.sigma[i];
            let dist = angular_distance(sigma, s).min(angular_distance(sigma, mirror));
            let (num_f, num_g, den) = if dist < delta {
                sum += limit;
                continue;
            } else if dist < STABLE_WINDOW {
                (
                    symbol_difference(f.symbol.coeffs(), sigma, s),
                    symbol_difference(g.symbol.coeffs(), sigma, s),
                    cos_difference(sigma, s),
                )
            } else {
                (f.values[i] - fs, g.values[i] - gs, cos_s - self.cos_sigma[i])
            };
            let num_den = if add_g_to_denominator { num_f + num_g } else { num_f };
            let b_den = num_den / (2.0 * den);
            if b_den <= 0.0 {
                return Err(Error::NonPositiveQuotient { theta: sigma, value: b_den });
            }
            let r = num_g / num_den;
            sum += (r - r_ss) / den;
        }
        // same kernel orientation as eta
        Ok(-sin_s * sum / self.cfg.nodes as f64)
    }

    /// Fourth-order finite difference of eta; one-sided stencils near the
    /// endpoints.
    pub fn eta_prime(&self, f: &SampledSymbol, s: f64) -> Result<f64> {
        self.check(f, s)?;
        let e = self.cfg.fd_step;
        if s - 2.0 * e >= 0.0 && s + 2.0 * e <= PI {
            Ok((-self.eta(f, s + 2.0 * e)? + 8.0 * self.eta(f, s + e)?
                - 8.0 * self.eta(f, s - e)?
                + self.eta(f, s - 2.0 * e)?)
                / (12.0 * e))
        } else if s - 2.0 * e < 0.0 {
            Ok((-25.0 * self.eta(f, s)? + 48.0 * self.eta(f, s + e)?
                - 36.0 * self.eta(f, s + 2.0 * e)?
                + 16.0 * self.eta(f, s + 3.0 * e)?
                - 3.0 * self.eta(f, s + 4.0 * e)?)
                / (12.0 * e))
        } else {
            Ok((25.0 * self.eta(f, s)? - 48.0 * self.eta(f, s - e)?
                + 36.0 * self.eta(f, s - 2.0 * e)?
                - 16.0 * self.eta(f, s - 3.0 * e)?
                + 3.0 * self.eta(f, s - 4.0 * e)?)
                / (12.0 * e))
        }
    }

    /// Trapezoid sum of the bare kernel `1 / (cos s - cos sigma)`. The
    /// principal value is exactly zero; this diagnostic verifies that the
    /// node placement reproduces it (it does when `s` lies on the conjugate
    /// lattice `2 pi k / M`).
    pub fn kernel_sum(&self, s: f64) -> f64 {
        let cos_s = s.cos();
        let sum: f64 = self.cos_sigma.iter().map(|&c| 1.0 / (cos_s - c)).sum();
        2.0 * PI * sum / self.cfg.nodes as f64
    }
}

/// One-shot wrapper around [`PvQuadrature::eta`].
pub fn eta(f: &CosineSymbol, s: f64, cfg: &PvConfig) -> Result<f64> {
    let q = PvQuadrature::new(*cfg)?;
    let sf = q.sample(f);
    q.eta(&sf, s)
}

/// One-shot wrapper around [`PvQuadrature::psi`].
pub fn psi(f: &CosineSymbol, g: &CosineSymbol, s: f64, cfg: &PvConfig) -> Result<f64> {
    let q = PvQuadrature::new(*cfg)?;
    let (sf, sg) = (q.sample(f), q.sample(g));
    q.psi(&sf, &sg, s)
}

/// One-shot wrapper around [`PvQuadrature::phi`].
pub fn phi(f: &CosineSymbol, g: &CosineSymbol, s: f64, cfg: &PvConfig) -> Result<f64> {
    let q = PvQuadrature::new(*cfg)?;
    let (sf, sg) = (q.sample(f), q.sample(g));
    q.phi(&sf, &sg, s)
}

/// One-shot wrapper around [`PvQuadrature::eta_prime`].
pub fn eta_prime(f: &CosineSymbol, s: f64, cfg: &PvConfig) -> Result<f64> {
    let q = PvQuadrature::new(*cfg)?;
    let sf = q.sample(f);
    q.eta_prime(&sf, s)
}

/// Closed form of `eta` for the KMS symbol: `2 atan(rho sin s / (1 - rho cos s))`.
pub fn kms_eta_closed_form(rho: f64, s: f64) -> f64 {
    2.0 * (rho * s.sin() / (1.0 - rho * s.cos())).atan()
}
