//! Symmetric banded Toeplitz matrices and a reference eigensolver.
//!
//! The solver of record is bisection on Sturm counts obtained from the
//! inertia of a banded LDL^T factorization of `T - x I`, which makes large
//! narrow-band spectra cheap (`O(n m^2)` per count). Wide bands (truncated
//! KMS symbols and similar) fall back to dense Householder tridiagonalization
//! followed by implicit-shift QL.

use crate::error::{invalid, Error, Result};
use crate::symbol::CosineSymbol;
use rayon::prelude::*;

/// Iteration cap for a single eigenvalue bisection.
const BISECT_MAX_ITER: usize = 200;
/// Dense fallback is refused above this dimension (memory bound).
const DENSE_MAX_N: usize = 4096;

/// `T_n(f)` in banded storage: `entry(i, j) = band[|i - j|]` for
/// `|i - j| <= m`, zero otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricBandedToeplitz {
    n: usize,
    band: Vec<f64>,
}

impl SymmetricBandedToeplitz {
    /// Builds `T_n(f)` from the cosine coefficients of `f`. A band wider than
    /// the dimension is truncated to `n - 1` off-diagonals.
    pub fn build(f: &CosineSymbol, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(invalid("build: matrix dimension must be at least 1"));
        }
        let mut band = f.coeffs().to_vec();
        band.truncate(n);
        Ok(SymmetricBandedToeplitz { n, band })
    }

    /// Builds directly from a band `(a0, ..., am)` with `m < n`.
    pub fn from_band(n: usize, band: Vec<f64>) -> Result<Self> {
        if n < 1 {
            return Err(invalid("from_band: matrix dimension must be at least 1"));
        }
        if band.is_empty() || band.len() > n {
            return Err(invalid(format!(
                "from_band: band length must lie in 1..={n}, got {}",
                band.len()
            )));
        }
        Ok(SymmetricBandedToeplitz { n, band })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn band(&self) -> &[f64] {
        &self.band
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let d = i.abs_diff(j);
        if d < self.band.len() {
            self.band[d]
        } else {
            0.0
        }
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let radius: f64 = 2.0 * self.band.iter().skip(1).map(|a| a.abs()).sum::<f64>();
        (self.band[0] - radius, self.band[0] + radius)
    }

    /// Default bisection tolerance: `1e-12` times the Gershgorin width.
    pub fn default_tolerance(&self) -> f64 {
        let (lo, hi) = self.spectral_bounds();
        (1e-12 * (hi - lo)).max(f64::MIN_POSITIVE)
    }

    /// Number of eigenvalues strictly below `x`, from the inertia of
    /// `T - x I`. A breakdown pivot is handled by nudging `x` by an
    /// ulp-scale offset (downward, so that a strict count at an exact
    /// eigenvalue stays strict).
    pub fn eigenvalue_count_below(&self, x: f64) -> usize {
        let mut shift = x;
        for attempt in 0..8 {
            if let Some(count) = self.try_count_below(shift) {
                return count;
            }
            let offset = (1.0 + x.abs()) * f64::EPSILON * (1 << attempt) as f64;
            shift = x - offset;
        }
        // Substitute-pivot variant cannot break down.
        self.count_below_substituting(x)
    }

    /// One LDL^T pass; `None` signals a breakdown pivot.
    fn try_count_below(&self, x: f64) -> Option<usize> {
        let n = self.n;
        let m = self.band.len() - 1;
        let diag = self.band[0] - x;
        if m == 0 {
            return Some(if diag < 0.0 { n } else { 0 });
        }
        let scale = self.band.iter().map(|a| a.abs()).fold(x.abs(), f64::max);
        let breakdown = (scale + 1.0) * 1e-150;

        // Ring buffers: the last m rows of L and the last m+1 pivots.
        let mut rows = vec![0.0; m * m];
        let mut pivots = vec![0.0; m + 1];
        let mut cur = vec![0.0; m];
        let mut count = 0usize;
        for j in 0..n {
            let lo = j.saturating_sub(m);
            // Row entry L[j][i] lives in cur[i + m - j].
            for i in lo..j {
                let mut s = self.band[j - i];
                let row_i = &rows[(i % m) * m..(i % m) * m + m];
                for t in lo..i {
                    s -= cur[t + m - j] * row_i[t + m - i] * pivots[t % (m + 1)];
                }
                cur[i + m - j] = s / pivots[i % (m + 1)];
            }
            let mut p = diag;
            for t in lo..j {
                let l = cur[t + m - j];
                p -= l * l * pivots[t % (m + 1)];
            }
            if !p.is_finite() || p.abs() < breakdown {
                return None;
            }
            if p < 0.0 {
                count += 1;
            }
            pivots[j % (m + 1)] = p;
            rows[(j % m) * m..(j % m) * m + m].copy_from_slice(&cur);
        }
        Some(count)
    }

    /// Sturm count that replaces breakdown pivots by a signed floor instead
    /// of failing; last-resort path only.
    fn count_below_substituting(&self, x: f64) -> usize {
        let n = self.n;
        let m = self.band.len() - 1;
        let diag = self.band[0] - x;
        if m == 0 {
            return if diag < 0.0 { n } else { 0 };
        }
        let scale = self.band.iter().map(|a| a.abs()).fold(x.abs(), f64::max);
        let floor = (scale + 1.0) * 1e-150;
        let mut rows = vec![0.0; m * m];
        let mut pivots = vec![0.0; m + 1];
        let mut cur = vec![0.0; m];
        let mut count = 0usize;
        for j in 0..n {
            let lo = j.saturating_sub(m);
            for i in lo..j {
                let mut s = self.band[j - i];
                let row_i = &rows[(i % m) * m..(i % m) * m + m];
                for t in lo..i {
                    s -= cur[t + m - j] * row_i[t + m - i] * pivots[t % (m + 1)];
                }
                cur[i + m - j] = s / pivots[i % (m + 1)];
            }
            let mut p = diag;
            for t in lo..j {
                let l = cur[t + m - j];
                p -= l * l * pivots[t % (m + 1)];
            }
            if !p.is_finite() || p.abs() < floor {
                p = if p.is_sign_negative() { -floor } else { floor };
            }
            if p < 0.0 {
                count += 1;
            }
            pivots[j % (m + 1)] = p;
            rows[(j % m) * m..(j % m) * m + m].copy_from_slice(&cur);
        }
        count
    }

    /// All `n` eigenvalues in nondecreasing order, each within `tol` of the
    /// exact spectrum of the stored matrix.
    pub fn eigenvalues(&self, tol: f64) -> Result<Vec<f64>> {
        if !(tol > 0.0) {
            return Err(invalid(format!("eigenvalues: tol must be positive, got {tol}")));
        }
        let m = self.band.len() - 1;
        // Bisection cost per count grows with m^2; the dense path wins for
        // wide bands unless the matrix is too large to hold densely.
        let banded_cheaper = 19 * (m * m + 4 * m + 10) < self.n;
        if banded_cheaper || self.n > DENSE_MAX_N || self.n <= 2 {
            self.eigenvalues_banded(tol)
        } else {
            Ok(self.eigenvalues_dense())
        }
    }

    /// Bisection on Sturm counts; always available, cost `O(n^2 m^2 log)`.
    pub fn eigenvalues_banded(&self, tol: f64) -> Result<Vec<f64>> {
        if !(tol > 0.0) {
            return Err(invalid(format!("eigenvalues: tol must be positive, got {tol}")));
        }
        let (glo, ghi) = self.spectral_bounds();
        let margin = (ghi - glo + self.band[0].abs() + 1.0) * 1e-12;
        let lo = glo - margin;
        let hi = ghi + margin;
        (0..self.n)
            .into_par_iter()
            .map(|k| {
                let mut a = lo;
                let mut b = hi;
                for _ in 0..BISECT_MAX_ITER {
                    if b - a <= tol {
                        break;
                    }
                    let mid = 0.5 * (a + b);
                    if mid <= a || mid >= b {
                        break; // hit floating point resolution
                    }
                    if self.eigenvalue_count_below(mid) <= k {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                if b - a > tol {
                    return Err(Error::NoConvergence(format!(
                        "bisection for eigenvalue {k} stalled at width {}",
                        b - a
                    )));
                }
                Ok(0.5 * (a + b))
            })
            .collect()
    }

    /// Dense path: Householder tridiagonalization + implicit-shift QL.
    pub fn eigenvalues_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = self.entry(i, j);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        let (mut d, mut e) = householder_tridiagonalize(&mut a, n);
        ql_implicit_eigenvalues(&mut d, &mut e);
        d.sort_by(|x, y| x.partial_cmp(y).unwrap());
        d
    }
}

/// Reduces a symmetric matrix (row-major, fully stored) to tridiagonal form,
/// returning the diagonal and the subdiagonal (`e[0]` unused).
fn householder_tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[i * n + k].abs()).sum();
            if scale == 0.0 {
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let f = a[i * n + l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                let mut fsum = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in j + 1..=l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    fsum += e[j] * a[i * n + j];
                }
                let hh = fsum / (h + h);
                for j in 0..=l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    for i in 0..n {
        d[i] = a[i * n + i];
    }
    e[0] = 0.0;
    (d, e)
}

/// QL with implicit shifts on a symmetric tridiagonal matrix; eigenvalues
/// only. `e` is the subdiagonal with `e[0]` unused on input.
fn ql_implicit_eigenvalues(d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    if n <= 1 {
        return;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "QL iteration did not converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflowed = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflowed = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflowed {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}
