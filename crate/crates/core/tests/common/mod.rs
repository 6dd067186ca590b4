//! Shared oracles for the integration tests. Everything here is independent
//! of the library's computational paths: the eigensolver oracle is a cyclic
//! Jacobi iteration on the dense matrix, and the principal-value oracle
//! integrates the raw singular integrand with symmetric pairing around the
//! pole plus adaptive Simpson on the regular pieces.

use toeplitz_spectra::symbol::CosineSymbol;
use toeplitz_spectra::toeplitz::SymmetricBandedToeplitz;

/// SplitMix64, the same tiny deterministic generator the unit tests use.
pub struct SplitMix {
    state: u64,
}

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        SplitMix { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.uniform() * n as f64) as usize
    }

    pub fn vec(&mut self, len: usize, amp: f64) -> Vec<f64> {
        (0..len).map(|_| amp * (2.0 * self.uniform() - 1.0)).collect()
    }
}

/// Textbook cyclic Jacobi eigenvalue iteration for small dense symmetric
/// matrices; returns the spectrum sorted nondecreasing.
pub fn jacobi_eigenvalues(t: &SymmetricBandedToeplitz) -> Vec<f64> {
    let n = t.n();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = t.entry(i, j);
        }
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t_rot = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t_rot * t_rot + 1.0).sqrt();
                let s = t_rot * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

/// `f(sigma) - f(s)` through the product form of the cosine difference, so
/// tiny differences keep full relative accuracy.
fn stable_difference(f: &CosineSymbol, sigma: f64, s: f64) -> f64 {
    let a = 0.5 * (sigma + s);
    let b = 0.5 * (sigma - s);
    let mut acc = 0.0;
    for (k, &c) in f.coeffs().iter().enumerate().skip(1) {
        let k = k as f64;
        acc += c * (k * a).sin() * (k * b).sin();
    }
    -4.0 * acc
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fb = f(b);
    let fm = f(m);
    simpson_step(f, a, b, fa, fm, fb, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, 0.6 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, 0.6 * tol, depth - 1)
    }
}

/// `PV-int_0^{2pi} d sigma / (w(sigma) - w(s))` for an even symbol `w`
/// increasing on `(0, pi)`, by splitting at the pole and integrating the
/// symmetric pair `u(s+t) + u(s-t)` whose singular parts cancel.
pub fn pv_reciprocal_difference(w: &CosineSymbol, s: f64) -> f64 {
    use std::f64::consts::PI;
    let u = |sigma: f64| 1.0 / stable_difference(w, sigma, s);
    // paired integrand, stable at small t
    let paired = |t: f64| {
        let dp = stable_difference(w, s + t, s);
        let dm = stable_difference(w, s - t, s);
        (dp + dm) / (dp * dm)
    };
    let a = 0.5 * s.min(PI - s);
    let t0 = 1e-6;
    // v(0) = -w''(s) / w'(s)^2
    let v0 = -w.derivative(s, 2).unwrap() / w.derivative(s, 1).unwrap().powi(2);
    let head = 0.5 * t0 * (v0 + paired(t0));
    let core = adaptive_simpson(&paired, t0, a, 1e-12, 24);
    let left = adaptive_simpson(&u, 0.0, s - a, 1e-12, 24);
    let right = adaptive_simpson(&u, s + a, PI, 1e-12, 24);
    2.0 * (head + core + left + right)
}
