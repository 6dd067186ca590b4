//! Expansion coefficients and k-term eigenvalue approximations.
//!
//! Four expansion flavors are supported, differing in which exact spectra
//! they relate and which coefficient functions drive the corrections:
//!
//! * `Single`: `lambda_j(T_n(f)) ~ f(d) + c1(d) h + c2(d) h^2`
//! * `Sum`: `lambda_j(T_n(f+g)) ~ lambda_j(T_n(f)) + lambda_j(T_n(g)) + Q1 h + Q2 h^2`
//! * `LinearH`: `lambda_j(T_n(f + g h)) ~ f(d) + Psi1 h + Psi2 h^2`
//! * `HToH`: `lambda_j(T_n(f + g h^h)) ~ f(d) + g(d) + (G11 log h + G10) h
//!   + (G22 log^2 h + G21 log h + G20) h^2`
//!
//! with `h = 1/(n+1)`, `d = d_{j,n} = pi j h`, and natural logarithms.

use crate::error::{invalid, Result};
use crate::momentary::BetaSpec;
use crate::quadrature::{PvConfig, PvQuadrature, SampledSymbol};
use crate::symbol::CosineSymbol;
use crate::toeplitz::SymmetricBandedToeplitz;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Which expansion a report or approximation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionKind {
    Single,
    Sum,
    LinearH,
    HToH,
}

/// Per-index eigenvalue errors of a k-term approximation, their maximum, and
/// the maximum scaled by the expansion's predicted decay rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    /// Signed errors `lambda_j - lambda_j^(k)`, `j = 1..n`.
    pub per_j: Vec<f64>,
    pub max_error: f64,
    pub normalized_max: f64,
    pub k: usize,
    pub n: usize,
}

impl ErrorReport {
    pub fn from_parts(per_j: Vec<f64>, k: usize, n: usize, normalization: f64) -> Self {
        let max_error = per_j.iter().fold(0.0, |acc: f64, e| acc.max(e.abs()));
        ErrorReport {
            per_j,
            max_error,
            normalized_max: normalization * max_error,
            k,
            n,
        }
    }
}

/// Normalization factor for the maximal error of a k-term approximation:
/// `(n+1)^k`, with an extra `1/log^k(n+1)` for the `h^h` expansion.
pub fn normalization(kind: ExpansionKind, k: usize, n: usize) -> f64 {
    let np1 = n as f64 + 1.0;
    match kind {
        ExpansionKind::HToH => (np1 / np1.ln()).powi(k as i32),
        _ => np1.powi(k as i32),
    }
}

/// The coefficients `c1 = -f' eta_f` and
/// `c2 = f'' eta_f^2 / 2 + f' eta_f eta_f'` at `s`.
pub fn c12(f: &CosineSymbol, s: f64, cfg: &PvConfig) -> Result<(f64, f64)> {
    let q = PvQuadrature::new(*cfg)?;
    let sf = q.sample(f);
    let ctx = SingleContext { q: &q, f: &sf };
    ctx.eval(s)
}

/// The sum-expansion coefficients `Q1, Q2` for `T_n(f) + T_n(g)`.
pub fn q12(f: &CosineSymbol, g: &CosineSymbol, s: f64, cfg: &PvConfig) -> Result<(f64, f64)> {
    let q = PvQuadrature::new(*cfg)?;
    let sf = q.sample(f);
    let sg = q.sample(g);
    let sfg = q.sample(&f.add(g));
    let ctx = SumContext { q: &q, f: &sf, g: &sg, fg: &sfg };
    ctx.eval(s)
}

/// The `f + g h` coefficients `Psi1, Psi2`.
pub fn psi12(f: &CosineSymbol, g: &CosineSymbol, s: f64, cfg: &PvConfig) -> Result<(f64, f64)> {
    let q = PvQuadrature::new(*cfg)?;
    let sf = q.sample(f);
    let sg = q.sample(g);
    let ctx = LinearHContext { q: &q, f: &sf, g: &sg };
    ctx.eval(s)
}

/// The `f + g h^h` coefficients, by `(l, k)` index of `h^l log^k h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaCoefficients {
    pub g11: f64,
    pub g10: f64,
    pub g22: f64,
    pub g21: f64,
    pub g20: f64,
}

pub fn gammas(
    f: &CosineSymbol,
    g: &CosineSymbol,
    s: f64,
    cfg: &PvConfig,
) -> Result<GammaCoefficients> {
    let q = PvQuadrature::new(*cfg)?;
    let sf = q.sample(f);
    let sg = q.sample(g);
    let sfg = q.sample(&f.add(g));
    let ctx = HToHContext { q: &q, f: &sf, g: &sg, fg: &sfg };
    ctx.eval(s)
}

struct SingleContext<'a> {
    q: &'a PvQuadrature,
    f: &'a SampledSymbol,
}

impl SingleContext<'_> {
    fn eval(&self, s: f64) -> Result<(f64, f64)> {
        let f = self.f.symbol();
        let f1 = f.derivative(s, 1)?;
        let f2 = f.derivative(s, 2)?;
        let eta = self.q.eta(self.f, s)?;
        let etap = self.q.eta_prime(self.f, s)?;
        Ok((-f1 * eta, 0.5 * f2 * eta * eta + f1 * eta * etap))
    }
}

struct SumContext<'a> {
    q: &'a PvQuadrature,
    f: &'a SampledSymbol,
    g: &'a SampledSymbol,
    fg: &'a SampledSymbol,
}

impl SumContext<'_> {
    fn eval(&self, s: f64) -> Result<(f64, f64)> {
        let (f, g) = (self.f.symbol(), self.g.symbol());
        let f1 = f.derivative(s, 1)?;
        let f2 = f.derivative(s, 2)?;
        let g1 = g.derivative(s, 1)?;
        let g2 = g.derivative(s, 2)?;
        let ef = self.q.eta(self.f, s)?;
        let eg = self.q.eta(self.g, s)?;
        let efg = self.q.eta(self.fg, s)?;
        let efp = self.q.eta_prime(self.f, s)?;
        let egp = self.q.eta_prime(self.g, s)?;
        let efgp = self.q.eta_prime(self.fg, s)?;
        let q1 = f1 * (ef - efg) + g1 * (eg - efg);
        let q2 = 0.5 * f2 * (efg * efg - ef * ef)
            + 0.5 * g2 * (efg * efg - eg * eg)
            + f1 * (efg * efgp - ef * efp)
            + g1 * (efg * efgp - eg * egp);
        Ok((q1, q2))
    }
}

struct LinearHContext<'a> {
    q: &'a PvQuadrature,
    f: &'a SampledSymbol,
    g: &'a SampledSymbol,
}

impl LinearHContext<'_> {
    fn eval(&self, s: f64) -> Result<(f64, f64)> {
        let (f, g) = (self.f.symbol(), self.g.symbol());
        let f1 = f.derivative(s, 1)?;
        let f2 = f.derivative(s, 2)?;
        let g1 = g.derivative(s, 1)?;
        let ef = self.q.eta(self.f, s)?;
        let efp = self.q.eta_prime(self.f, s)?;
        let psi = self.q.psi(self.f, self.g, s)?;
        let p1 = g.eval(s) - f1 * ef;
        let p2 = 0.5 * f2 * ef * ef + f1 * ef * efp - f1 * psi - g1 * ef;
        Ok((p1, p2))
    }
}

struct HToHContext<'a> {
    q: &'a PvQuadrature,
    f: &'a SampledSymbol,
    g: &'a SampledSymbol,
    fg: &'a SampledSymbol,
}

impl HToHContext<'_> {
    fn eval(&self, s: f64) -> Result<GammaCoefficients> {
        let (f, g) = (self.f.symbol(), self.g.symbol());
        let f1 = f.derivative(s, 1)?;
        let f2 = f.derivative(s, 2)?;
        let g1 = g.derivative(s, 1)?;
        let g2 = g.derivative(s, 2)?;
        let gs = g.eval(s);
        let efg = self.q.eta(self.fg, s)?;
        let efgp = self.q.eta_prime(self.fg, s)?;
        let phi = self.q.phi(self.f, self.g, s)?;
        Ok(GammaCoefficients {
            g11: gs,
            g10: -efg * (f1 + g1),
            g22: 0.5 * gs,
            g21: -phi * (f1 + g1) - g1 * efg,
            g20: 0.5 * efg * efg * (f2 + g2) + efg * efgp * (f1 + g1),
        })
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n < 1 {
        return Err(invalid("n must be at least 1"));
    }
    if !(1..=3).contains(&k) {
        return Err(invalid(format!(
            "k must lie in 1..=3 (explicit coefficients stop at second order), got {k}"
        )));
    }
    Ok(())
}

/// The k-term approximations `lambda_j^(k)`, `j = 1..n`, for the given
/// expansion kind. For `Single` the second symbol is ignored.
pub fn approx_eigenvalues(
    kind: ExpansionKind,
    f: &CosineSymbol,
    g: &CosineSymbol,
    n: usize,
    k: usize,
    cfg: &PvConfig,
) -> Result<Vec<f64>> {
    check_nk(n, k)?;
    let h = 1.0 / (n as f64 + 1.0);
    let d = |j: usize| PI * j as f64 * h;

    // First-order sampling term per kind.
    let base: Vec<f64> = match kind {
        ExpansionKind::Single | ExpansionKind::LinearH => (1..=n).map(|j| f.eval(d(j))).collect(),
        ExpansionKind::HToH => (1..=n).map(|j| f.eval(d(j)) + g.eval(d(j))).collect(),
        ExpansionKind::Sum => {
            let tf = SymmetricBandedToeplitz::build(f, n)?;
            let tg = SymmetricBandedToeplitz::build(g, n)?;
            let ef = tf.eigenvalues(tf.default_tolerance())?;
            let eg = tg.eigenvalues(tg.default_tolerance())?;
            ef.iter().zip(eg.iter()).map(|(a, b)| a + b).collect()
        }
    };
    if k == 1 {
        return Ok(base);
    }

    let q = PvQuadrature::new(*cfg)?;
    let log_h = h.ln();
    match kind {
        ExpansionKind::Single => {
            let sf = q.sample(f);
            let ctx = SingleContext { q: &q, f: &sf };
            (1..=n)
                .into_par_iter()
                .map(|j| {
                    let (c1, c2) = ctx.eval(d(j))?;
                    let mut v = base[j - 1] + c1 * h;
                    if k >= 3 {
                        v += c2 * h * h;
                    }
                    Ok(v)
                })
                .collect()
        }
        ExpansionKind::Sum => {
            let sf = q.sample(f);
            let sg = q.sample(g);
            let sfg = q.sample(&f.add(g));
            let ctx = SumContext { q: &q, f: &sf, g: &sg, fg: &sfg };
            (1..=n)
                .into_par_iter()
                .map(|j| {
                    let (q1, q2) = ctx.eval(d(j))?;
                    let mut v = base[j - 1] + q1 * h;
                    if k >= 3 {
                        v += q2 * h * h;
                    }
                    Ok(v)
                })
                .collect()
        }
        ExpansionKind::LinearH => {
            let sf = q.sample(f);
            let sg = q.sample(g);
            let ctx = LinearHContext { q: &q, f: &sf, g: &sg };
            (1..=n)
                .into_par_iter()
                .map(|j| {
                    let (p1, p2) = ctx.eval(d(j))?;
                    let mut v = base[j - 1] + p1 * h;
                    if k >= 3 {
                        v += p2 * h * h;
                    }
                    Ok(v)
                })
                .collect()
        }
        ExpansionKind::HToH => {
            let sf = q.sample(f);
            let sg = q.sample(g);
            let sfg = q.sample(&f.add(g));
            let ctx = HToHContext { q: &q, f: &sf, g: &sg, fg: &sfg };
            (1..=n)
                .into_par_iter()
                .map(|j| {
                    let c = ctx.eval(d(j))?;
                    let mut v = base[j - 1] + (c.g11 * log_h + c.g10) * h;
                    if k >= 3 {
                        v += (c.g22 * log_h * log_h + c.g21 * log_h + c.g20) * h * h;
                    }
                    Ok(v)
                })
                .collect()
        }
    }
}

/// The exact (oracle) spectrum the kind's approximation targets:
/// `T_n(f)`, `T_n(f+g)`, `T_n(f + g h)` or `T_n(f + g h^h)`.
pub fn exact_eigenvalues(
    kind: ExpansionKind,
    f: &CosineSymbol,
    g: &CosineSymbol,
    n: usize,
    tol: Option<f64>,
) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(invalid("n must be at least 1"));
    }
    let h = 1.0 / (n as f64 + 1.0);
    let symbol = match kind {
        ExpansionKind::Single => f.clone(),
        ExpansionKind::Sum => f.add(g),
        ExpansionKind::LinearH => f.add(&g.scale(h)),
        ExpansionKind::HToH => f.add(&g.scale(BetaSpec::HToH.eval(h)?)),
    };
    let t = SymmetricBandedToeplitz::build(&symbol, n)?;
    t.eigenvalues(tol.unwrap_or_else(|| t.default_tolerance()))
}

/// Pairs exact and approximate spectra into signed errors with the kind's
/// normalization.
pub fn error_report(
    exact: &[f64],
    approx: &[f64],
    kind: ExpansionKind,
    k: usize,
    n: usize,
) -> Result<ErrorReport> {
    if exact.len() != approx.len() {
        return Err(invalid(format!(
            "error_report: length mismatch ({} exact vs {} approximate)",
            exact.len(),
            approx.len()
        )));
    }
    let per_j: Vec<f64> = exact.iter().zip(approx.iter()).map(|(e, a)| e - a).collect();
    Ok(ErrorReport::from_parts(per_j, k, n, normalization(kind, k, n)))
}

/// Convenience: exact spectrum, k-term approximation, and the error report in
/// one call.
pub fn expansion_errors(
    kind: ExpansionKind,
    f: &CosineSymbol,
    g: &CosineSymbol,
    n: usize,
    k: usize,
    cfg: &PvConfig,
) -> Result<ErrorReport> {
    let exact = exact_eigenvalues(kind, f, g, n, None)?;
    let approx = approx_eigenvalues(kind, f, g, n, k, cfg)?;
    error_report(&exact, &approx, kind, k, n)
}

/// The normalized coefficient profile `C_k(d_j)` that the normalized signed
/// errors overlay: `c_k` / `Q_k` / `Psi_k` for the polynomial-in-`h` kinds,
/// and the log-corrected combinations for `HToH` (these depend on `n`).
pub fn coefficient_profile(
    kind: ExpansionKind,
    f: &CosineSymbol,
    g: &CosineSymbol,
    n: usize,
    k: usize,
    cfg: &PvConfig,
) -> Result<Vec<f64>> {
    check_nk(n, k)?;
    if k > 2 {
        return Err(invalid("coefficient profiles exist for k = 1 and k = 2"));
    }
    let h = 1.0 / (n as f64 + 1.0);
    let log_h = h.ln();
    let d = |j: usize| PI * j as f64 * h;
    let q = PvQuadrature::new(*cfg)?;
    match kind {
        ExpansionKind::Single => {
            let sf = q.sample(f);
            let ctx = SingleContext { q: &q, f: &sf };
            (1..=n)
                .into_par_iter()
                .map(|j| ctx.eval(d(j)).map(|(c1, c2)| if k == 1 { c1 } else { c2 }))
                .collect()
        }
        ExpansionKind::Sum => {
            let sf = q.sample(f);
            let sg = q.sample(g);
            let sfg = q.sample(&f.add(g));
            let ctx = SumContext { q: &q, f: &sf, g: &sg, fg: &sfg };
            (1..=n)
                .into_par_iter()
                .map(|j| ctx.eval(d(j)).map(|(q1, q2)| if k == 1 { q1 } else { q2 }))
                .collect()
        }
        ExpansionKind::LinearH => {
            let sf = q.sample(f);
            let sg = q.sample(g);
            let ctx = LinearHContext { q: &q, f: &sf, g: &sg };
            (1..=n)
                .into_par_iter()
                .map(|j| ctx.eval(d(j)).map(|(p1, p2)| if k == 1 { p1 } else { p2 }))
                .collect()
        }
        ExpansionKind::HToH => {
            let sf = q.sample(f);
            let sg = q.sample(g);
            let sfg = q.sample(&f.add(g));
            let ctx = HToHContext { q: &q, f: &sf, g: &sg, fg: &sfg };
            (1..=n)
                .into_par_iter()
                .map(|j| {
                    let c = ctx.eval(d(j))?;
                    // With errors normalized by (n+1)^k / log^k(n+1) and
                    // log h = -log(n+1):
                    Ok(if k == 1 {
                        -(c.g11 + c.g10 / log_h)
                    } else {
                        c.g22 + c.g21 / log_h + c.g20 / (log_h * log_h)
                    })
                })
                .collect()
        }
    }
}
