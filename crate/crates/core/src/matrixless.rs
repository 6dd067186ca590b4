//! The matrix-less eigenvalue predictor.
//!
//! Spectra of a few moderate sizes `n_s = 2^s (n0+1) - 1` share grid points
//! with the base mesh `pi j h0`, so the expansion-coefficient samples
//! `c_l(pi j h0)` fall out of a tiny Vandermonde solve per mesh point
//! (extrapolation). The fit runs one order deeper than the prediction uses;
//! see [`extrapolate_from_spectra`]. Evaluating the coefficients anywhere
//! else is local polynomial interpolation; mixing the analytically known
//! endpoint values `c_l(0), c_l(pi)` into the node set removes the large
//! errors the plain scheme commits near the boundary. Predicting one
//! eigenvalue of `T_n` then costs O(k d) regardless of `n`.

use crate::error::{invalid, Result};
use crate::expansion::ErrorReport;
use crate::momentary::MomentarySymbol;
use crate::toeplitz::SymmetricBandedToeplitz;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Degree of the local interpolation polynomial.
pub const INTERPOLATION_DEGREE: usize = 8;

/// Sampled expansion coefficients `c_l(pi j h0)`, `l = 1..=k-1`, on the mesh
/// `j = 1..=n0`, plus optional endpoint values used by the interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientGrid {
    n0: usize,
    values: Vec<Vec<f64>>,
    boundary: Option<Vec<(f64, f64)>>,
}

impl CoefficientGrid {
    pub fn new(n0: usize, values: Vec<Vec<f64>>, boundary: Option<Vec<(f64, f64)>>) -> Result<Self> {
        if values.iter().any(|row| row.len() != n0) {
            return Err(invalid("coefficient rows must have length n0"));
        }
        if let Some(b) = &boundary {
            if b.len() != values.len() {
                return Err(invalid("one boundary pair is needed per coefficient"));
            }
        }
        Ok(CoefficientGrid { n0, values, boundary })
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn h0(&self) -> f64 {
        1.0 / (self.n0 as f64 + 1.0)
    }

    /// Number of expansion terms `k` this grid supports (`k - 1` coefficients).
    pub fn k(&self) -> usize {
        self.values.len() + 1
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn boundary(&self) -> Option<&[(f64, f64)]> {
        self.boundary.as_deref()
    }

    pub fn set_boundary(&mut self, boundary: Option<Vec<(f64, f64)>>) -> Result<()> {
        if let Some(b) = &boundary {
            if b.len() != self.values.len() {
                return Err(invalid("one boundary pair is needed per coefficient"));
            }
        }
        self.boundary = boundary;
        Ok(())
    }

    /// Mesh angle `pi j h0` of node `j` (`1..=n0`).
    pub fn node_theta(&self, j: usize) -> f64 {
        PI * j as f64 * self.h0()
    }
}

/// Known endpoint values of the expansion coefficients for the family
/// `f_2 + alpha1 f_1 h^2 + alpha0 f_0 h^4`: the symbol's own `h^2` and `h^4`
/// terms are absorbed into `c_2` and `c_4`, every other coefficient vanishes
/// at both endpoints.
pub fn boundary_values(alpha1: f64, alpha0: f64, k: usize) -> Result<Vec<(f64, f64)>> {
    if k > 5 {
        return Err(invalid("endpoint values are only known through c_4 (k <= 5)"));
    }
    Ok((1..k)
        .map(|l| match l {
            2 => (0.0, 4.0 * alpha1),
            4 => (0.0, alpha0),
            _ => (0.0, 0.0),
        })
        .collect())
}

/// Solves the lower-triangular-free dense system by Gaussian elimination with
/// scaled partial pivoting; sizes here never exceed 4.
fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut scale = vec![0.0; n];
    for (i, row) in a.iter().enumerate() {
        scale[i] = row.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()));
        if scale[i] == 0.0 {
            return Err(invalid("singular extrapolation system"));
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                let vi = a[perm[i]][col].abs() / scale[perm[i]];
                let vj = a[perm[j]][col].abs() / scale[perm[j]];
                vi.partial_cmp(&vj).unwrap()
            })
            .unwrap();
        perm.swap(col, pivot);
        let p = perm[col];
        if a[p][col] == 0.0 {
            return Err(invalid("singular extrapolation system"));
        }
        for &r in &perm[col + 1..] {
            let factor = a[r][col] / a[p][col];
            for c in col..n {
                a[r][c] -= factor * a[p][c];
            }
            b[r] -= factor * b[p];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let p = perm[col];
        let mut s = b[p];
        for c in col + 1..n {
            s -= a[p][c] * x[c];
        }
        x[col] = s / a[p][col];
    }
    Ok(x)
}

/// Extrapolation step from precomputed spectra. `spectra[s]` must hold the
/// full nondecreasing spectrum of `T_{n_s}` with `n_s = 2^s (n0+1) - 1` for
/// `s = 0..=k-1`, and `base_at_nodes[j-1] = f_base(pi j h0)`.
///
/// Per mesh node this solves the k-by-k Vandermonde system
/// `sum_{l=1..k} c_l h_s^l = lambda_{j_s}(T_{n_s}) - f_base(pi j h0)` and
/// keeps `c_1 .. c_{k-1}`: fitting one order beyond what the prediction uses
/// pushes the truncation leakage in the kept coefficients down to
/// `O(h0^k)`, which is what makes the predicted eigenvalue error scale as
/// `O(h0^k h)`.
pub fn extrapolate_from_spectra(
    base_at_nodes: &[f64],
    spectra: &[Vec<f64>],
    n0: usize,
    k: usize,
) -> Result<CoefficientGrid> {
    if k < 2 {
        return Err(invalid("extrapolation needs k >= 2"));
    }
    if n0 < 4 {
        return Err(invalid("extrapolation needs n0 >= 4"));
    }
    if base_at_nodes.len() != n0 {
        return Err(invalid("need one base-symbol value per mesh node"));
    }
    if spectra.len() != k {
        return Err(invalid(format!("need {} spectra, got {}", k, spectra.len())));
    }
    for (s, spectrum) in spectra.iter().enumerate() {
        let ns = (1usize << s) * (n0 + 1) - 1;
        if spectrum.len() != ns {
            return Err(invalid(format!(
                "spectrum {s} must have length {ns}, got {}",
                spectrum.len()
            )));
        }
    }
    let h0 = 1.0 / (n0 as f64 + 1.0);
    let steps: Vec<f64> = (0..k).map(|s| h0 / (1u64 << s) as f64).collect();

    let mut values = vec![vec![0.0; n0]; k - 1];
    for j in 1..=n0 {
        let mut a: Vec<Vec<f64>> = steps
            .iter()
            .map(|&hs| (1..=k).map(|l| hs.powi(l as i32)).collect())
            .collect();
        let mut rhs: Vec<f64> = (0..k)
            .map(|s| {
                let js = (1usize << s) * j;
                spectra[s][js - 1] - base_at_nodes[j - 1]
            })
            .collect();
        let sol = solve_dense(&mut a, &mut rhs)?;
        for (l, &c) in sol.iter().take(k - 1).enumerate() {
            values[l][j - 1] = c;
        }
    }
    CoefficientGrid::new(n0, values, None)
}

/// Runs the extrapolation step: spectra of `T_{n_s}(F_{n_s})` for
/// `s = 0..=k-1` via the reference eigensolver, then the per-node Vandermonde
/// solves. `eig_tol` falls back to a tight default.
pub fn extrapolate(
    ms: &MomentarySymbol,
    n0: usize,
    k: usize,
    eig_tol: Option<f64>,
) -> Result<CoefficientGrid> {
    if k < 2 {
        return Err(invalid("extrapolation needs k >= 2"));
    }
    if n0 < 4 {
        return Err(invalid("extrapolation needs n0 >= 4"));
    }
    let h0 = 1.0 / (n0 as f64 + 1.0);
    let base_at_nodes: Vec<f64> = (1..=n0).map(|j| ms.base().eval(PI * j as f64 * h0)).collect();
    let spectra: Vec<Vec<f64>> = (0..k)
        .map(|s| {
            let ns = (1usize << s) * (n0 + 1) - 1;
            let t = SymmetricBandedToeplitz::build(&ms.instantiate(ns)?, ns)?;
            t.eigenvalues(eig_tol.unwrap_or_else(|| tight_tolerance(&t)))
        })
        .collect::<Result<_>>()?;
    extrapolate_from_spectra(&base_at_nodes, &spectra, n0, k)
}

/// Extrapolation for the finite-difference family with the known endpoint
/// values attached.
pub fn extrapolate_fn_family(
    alpha1: f64,
    alpha0: f64,
    n0: usize,
    k: usize,
    eig_tol: Option<f64>,
) -> Result<CoefficientGrid> {
    let ms = MomentarySymbol::fn_family(alpha1, alpha0);
    let mut grid = extrapolate(&ms, n0, k, eig_tol)?;
    grid.set_boundary(Some(boundary_values(alpha1, alpha0, k)?))?;
    Ok(grid)
}

/// Validation-grade eigensolver tolerance, well below the smallest tabulated
/// prediction errors.
fn tight_tolerance(t: &SymmetricBandedToeplitz) -> f64 {
    let (lo, hi) = t.spectral_bounds();
    let width = hi - lo;
    let abs = lo.abs().max(hi.abs());
    (1e-14 * width).max(64.0 * f64::EPSILON * abs).max(f64::MIN_POSITIVE)
}

/// Local barycentric interpolation of `c_l` at `theta`, through the
/// `INTERPOLATION_DEGREE + 1` mesh nodes nearest `theta`. With boundary
/// values present the node set is extended by `(0, c_l(0))` and
/// `(pi, c_l(pi))`.
pub fn interpolate(grid: &CoefficientGrid, l: usize, theta: f64) -> Result<f64> {
    if l < 1 || l > grid.values.len() {
        return Err(invalid(format!(
            "coefficient index must lie in 1..={}, got {l}",
            grid.values.len()
        )));
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(invalid(format!("theta must lie in [0, pi], got {theta}")));
    }
    let n0 = grid.n0;
    let h0 = grid.h0();
    let spacing = PI * h0;
    let row = &grid.values[l - 1];
    let with_boundary = grid.boundary.is_some();
    // Node j spans j = j_lo..=j_hi on the uniform grid theta_j = pi j h0,
    // where j = 0 and j = n0 + 1 exist only with boundary values.
    let (j_lo, j_hi) = if with_boundary { (0usize, n0 + 1) } else { (1usize, n0) };
    let node_at = |j: usize| -> f64 {
        if j == n0 + 1 {
            PI
        } else {
            PI * j as f64 * h0
        }
    };
    let value_at = |j: usize| -> f64 {
        if j == 0 {
            grid.boundary.as_ref().unwrap()[l - 1].0
        } else if j == n0 + 1 {
            grid.boundary.as_ref().unwrap()[l - 1].1
        } else {
            row[j - 1]
        }
    };

    let count = (j_hi - j_lo + 1).min(INTERPOLATION_DEGREE + 1);
    let center = (theta / spacing).round() as isize;
    let start = center
        .saturating_sub(count as isize / 2)
        .clamp(j_lo as isize, (j_hi + 1 - count) as isize) as usize;

    // Barycentric form; node hits (and near-hits far below the mesh width)
    // return the stored value.
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..count {
        let j = start + i;
        let d = theta - node_at(j);
        if d.abs() <= 1e-9 * spacing {
            return Ok(value_at(j));
        }
        let mut w = 1.0;
        for t in 0..count {
            if t != i {
                w /= (i as f64 - t as f64) * spacing;
            }
        }
        num += w / d * value_at(j);
        den += w / d;
    }
    Ok(num / den)
}

/// Predicted spectrum of `T_n` from the coefficient grid:
/// `lambda_j = f_base(d_j) + sum_l c_l(d_j) h^l`.
pub fn predict(
    ms: &MomentarySymbol,
    grid: &CoefficientGrid,
    n: usize,
    k: usize,
) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(invalid("n must be at least 1"));
    }
    if k < 1 || k > grid.k() {
        return Err(invalid(format!(
            "prediction order k must lie in 1..={}, got {k}",
            grid.k()
        )));
    }
    let h = 1.0 / (n as f64 + 1.0);
    (1..=n)
        .into_par_iter()
        .map(|j| {
            let d = PI * j as f64 * h;
            let mut v = ms.base().eval(d);
            let mut hp = 1.0;
            for l in 1..k {
                hp *= h;
                v += interpolate(grid, l, d)? * hp;
            }
            Ok(v)
        })
        .collect()
}

/// Compares the prediction against the reference eigensolver at a size the
/// banded oracle can still afford; the normalized error is
/// `(n0+1)^k (n+1) eps`.
pub fn validate(
    ms: &MomentarySymbol,
    grid: &CoefficientGrid,
    n: usize,
    k: usize,
) -> Result<ErrorReport> {
    let t = SymmetricBandedToeplitz::build(&ms.instantiate(n)?, n)?;
    let exact = t.eigenvalues(tight_tolerance(&t))?;
    let predicted = predict(ms, grid, n, k)?;
    let per_j: Vec<f64> = exact
        .iter()
        .zip(predicted.iter())
        .map(|(e, p)| e - p)
        .collect();
    let normalization = (grid.n0 as f64 + 1.0).powi(k as i32) * (n as f64 + 1.0);
    Ok(ErrorReport::from_parts(per_j, k, n, normalization))
}
