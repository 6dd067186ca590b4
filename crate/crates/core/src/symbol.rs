//! Even, real-valued symbols given by finite cosine series.
//!
//! A symbol is stored as its cosine coefficients `(c0, c1, ..., cm)` and
//! evaluates as `f(theta) = c0 + 2 * sum_k ck * cos(k theta)`, so that
//! `f(theta) = f(2 pi - theta)`. With this convention the entry on the k-th
//! diagonal of the generated Toeplitz matrix is exactly `ck`.

use crate::error::{invalid, Result};

/// An even, real-valued symbol `f(theta) = c0 + 2 sum_{k=1..m} ck cos(k theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosineSymbol {
    coeffs: Vec<f64>,
}

/// Numerical diagnostics for the simple-loop conditions of a symbol on
/// `[0, 2 pi]` (symmetric case: the maximum sits at `theta = pi`).
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleLoopReport {
    pub range_min: f64,
    pub range_max: f64,
    /// `f(0)`
    pub endpoint_value: f64,
    /// `f'(0)`
    pub endpoint_slope: f64,
    /// `f''(0)`
    pub endpoint_curvature: f64,
    /// `f' > 0` on a sampled interior grid of `(0, pi)`
    pub monotone_on_half_period: bool,
    pub is_simple_loop: bool,
}

impl CosineSymbol {
    /// Builds a symbol from its cosine coefficients `(c0, ..., cm)`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid("a cosine symbol needs at least one coefficient"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(invalid("cosine coefficients must be finite"));
        }
        Ok(CosineSymbol { coeffs })
    }

    pub fn constant(c: f64) -> Self {
        CosineSymbol { coeffs: vec![c] }
    }

    /// The symbol `(2 - 2 cos(theta))^q`, the order-2q centered finite
    /// difference stencil. `q = 1` is the one-dimensional discrete Laplacian.
    pub fn laplacian_power(q: u32) -> Self {
        let mut f = CosineSymbol::constant(1.0);
        let g = CosineSymbol {
            coeffs: vec![2.0, -1.0],
        };
        for _ in 0..q {
            f = f.multiply(&g);
        }
        f
    }

    /// The Kac-Murdock-Szego-type symbol
    /// `(1+rho)^2 / 2 * (1 - cos(theta)) / (1 - 2 rho cos(theta) + rho^2)`
    /// with coefficients `c0 = (1+rho)/2`, `ck = (rho^2-1)/4 * rho^(k-1)`,
    /// truncated at the smallest bandwidth `m` with `|c_{m+1}| < tol`.
    pub fn kms(rho: f64, tol: f64) -> Result<Self> {
        if !(0.0 < rho && rho < 1.0) {
            return Err(invalid(format!("kms: rho must lie in (0, 1), got {rho}")));
        }
        if !(tol > 0.0) {
            return Err(invalid(format!("kms: tol must be positive, got {tol}")));
        }
        let off = |k: u32| 0.25 * (rho * rho - 1.0) * rho.powi(k as i32 - 1);
        let mut m = 0;
        while off(m + 1).abs() >= tol {
            m += 1;
        }
        let mut coeffs = Vec::with_capacity(m as usize + 1);
        coeffs.push(0.5 * (1.0 + rho));
        for k in 1..=m {
            coeffs.push(off(k));
        }
        CosineSymbol::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Bandwidth `m`: the index of the last stored coefficient.
    pub fn bandwidth(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Evaluates `f(theta) = c0 + 2 sum ck cos(k theta)`.
    pub fn eval(&self, theta: f64) -> f64 {
        let mut acc = self.coeffs[0];
        for (k, &c) in self.coeffs.iter().enumerate().skip(1) {
            acc += 2.0 * c * (k as f64 * theta).cos();
        }
        acc
    }

    /// Analytic first or second derivative of the cosine series.
    pub fn derivative(&self, theta: f64, order: u32) -> Result<f64> {
        match order {
            1 => Ok(self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| -2.0 * k as f64 * c * (k as f64 * theta).sin())
                .sum()),
            2 => Ok(self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| -2.0 * (k * k) as f64 * c * (k as f64 * theta).cos())
                .sum()),
            _ => Err(invalid(format!(
                "derivative order must be 1 or 2, got {order}"
            ))),
        }
    }

    /// Coefficientwise sum; bandwidth is the larger of the two.
    pub fn add(&self, other: &Self) -> Self {
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() {
            (&self.coeffs, &other.coeffs)
        } else {
            (&other.coeffs, &self.coeffs)
        };
        let mut coeffs = long.clone();
        for (c, s) in coeffs.iter_mut().zip(short.iter()) {
            *c += s;
        }
        CosineSymbol { coeffs }
    }

    pub fn scale(&self, c: f64) -> Self {
        CosineSymbol {
            coeffs: self.coeffs.iter().map(|x| c * x).collect(),
        }
    }

    /// Coefficients of the pointwise product, via
    /// `2 cos(a) cos(b) = cos(a+b) + cos(a-b)`. Bandwidth `m_a + m_b`.
    pub fn multiply(&self, other: &Self) -> Self {
        // Work with the two-sided sequences a_k = c_|k|, where the product
        // coefficients are the convolution of the factors.
        let ma = self.bandwidth() as isize;
        let mb = other.bandwidth() as isize;
        let a = |k: isize| self.coeffs[k.unsigned_abs()];
        let b = |k: isize| other.coeffs[k.unsigned_abs()];
        let mut coeffs = vec![0.0; (ma + mb) as usize + 1];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let j = j as isize;
            for k in -ma..=ma {
                let l = j - k;
                if l.abs() <= mb {
                    *c += a(k) * b(l);
                }
            }
        }
        CosineSymbol { coeffs }
    }

    /// Weighted Wiener norm `sum_{|j| <= m} |c_j| (|j| + 1)^alpha`.
    pub fn wiener_norm(&self, alpha: f64) -> f64 {
        assert!(alpha >= 0.0, "wiener_norm: alpha must be nonnegative");
        self.coeffs[0].abs()
            + 2.0
                * self
                    .coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, &c)| c.abs() * ((k + 1) as f64).powf(alpha))
                    .sum::<f64>()
    }

    /// Checks the simple-loop conditions numerically on a grid: `f(0)` attains
    /// the minimum, `f'(0) = 0`, `f''(0) > 0`, `f''(pi) < 0`, and `f' > 0` on
    /// the interior of `(0, pi)`. A heuristic, not a proof.
    pub fn simple_loop_check(&self, grid_size: usize, tol: f64) -> SimpleLoopReport {
        assert!(grid_size >= 16, "simple_loop_check: grid_size must be >= 16");
        let pi = std::f64::consts::PI;
        let mut range_min = f64::INFINITY;
        let mut range_max = f64::NEG_INFINITY;
        for i in 0..=2 * grid_size {
            let v = self.eval(2.0 * pi * i as f64 / (2 * grid_size) as f64);
            range_min = range_min.min(v);
            range_max = range_max.max(v);
        }
        let monotone = (1..grid_size)
            .all(|i| self.derivative(pi * i as f64 / grid_size as f64, 1).unwrap() > 0.0);
        let endpoint_value = self.eval(0.0);
        let endpoint_slope = self.derivative(0.0, 1).unwrap();
        let endpoint_curvature = self.derivative(0.0, 2).unwrap();
        let pi_curvature = self.derivative(pi, 2).unwrap();
        let is_simple_loop = (endpoint_value - range_min).abs() <= tol
            && endpoint_slope.abs() <= tol
            && endpoint_curvature > tol
            && pi_curvature < -tol
            && monotone;
        SimpleLoopReport {
            range_min,
            range_max,
            endpoint_value,
            endpoint_slope,
            endpoint_curvature,
            monotone_on_half_period: monotone,
            is_simple_loop,
        }
    }

    /// Plain-text form: first line the bandwidth `m`, then one coefficient per
    /// line with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.bandwidth());
        for c in &self.coeffs {
            out.push_str(&format!("{c:.16e}\n"));
        }
        out
    }

    /// Parses the plain-text form produced by [`CosineSymbol::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let m: usize = lines
            .next()
            .ok_or_else(|| invalid("empty symbol file"))?
            .trim()
            .parse()
            .map_err(|e| invalid(format!("bad bandwidth line: {e}")))?;
        let coeffs = lines
            .map(|l| {
                l.trim()
                    .parse::<f64>()
                    .map_err(|e| invalid(format!("bad coefficient `{}`: {e}", l.trim())))
            })
            .collect::<Result<Vec<f64>>>()?;
        if coeffs.len() != m + 1 {
            return Err(invalid(format!(
                "expected {} coefficients, found {}",
                m + 1,
                coeffs.len()
            )));
        }
        CosineSymbol::new(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    /// Closed form of the KMS symbol, used as the evaluation oracle.
    fn kms_closed_form(rho: f64, theta: f64) -> f64 {
        (1.0 + rho).powi(2) / 2.0 * (1.0 - theta.cos())
            / (1.0 - 2.0 * rho * theta.cos() + rho * rho)
    }

    #[test]
    fn eval_laplacian_at_pi() {
        let g = CosineSymbol::laplacian_power(1);
        assert_abs_diff_eq!(g.eval(PI), 4.0, epsilon = 1e-15);
    }

    #[test]
    fn eval_kms_endpoints() {
        let f = CosineSymbol::kms(0.5, 1e-14).unwrap();
        assert_abs_diff_eq!(f.eval(0.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.eval(PI), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn kms_matches_closed_form() {
        for &rho in &[0.3, 0.5, 0.7] {
            let f = CosineSymbol::kms(rho, 1e-14).unwrap();
            for i in 0..=64 {
                let theta = 2.0 * PI * i as f64 / 64.0;
                assert_abs_diff_eq!(f.eval(theta), kms_closed_form(rho, theta), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn kms_coefficients_and_truncation() {
        let f = CosineSymbol::kms(0.5, 1e-14).unwrap();
        assert_abs_diff_eq!(f.coeffs()[0], 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(f.coeffs()[1], -0.1875, epsilon = 1e-15);
        // smallest m with 0.1875 * 0.5^m < 1e-14
        assert_eq!(f.bandwidth(), 45);
        assert!(CosineSymbol::kms(1.5, 1e-14).is_err());
        assert!(CosineSymbol::kms(0.5, 0.0).is_err());
    }

    #[test]
    fn derivative_laplacian() {
        let g = CosineSymbol::laplacian_power(1);
        assert_abs_diff_eq!(g.derivative(PI / 2.0, 1).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.derivative(0.0, 2).unwrap(), 2.0, epsilon = 1e-15);
        assert!(g.derivative(0.1, 3).is_err());
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let f = CosineSymbol::kms(0.5, 1e-14).unwrap();
        // f(0) ~ 0, so the step must stay well above the cancellation floor
        let h = 1e-4;
        let fd2 = (f.eval(h) - 2.0 * f.eval(0.0) + f.eval(-h)) / (h * h);
        assert_abs_diff_eq!(f.derivative(0.0, 2).unwrap(), fd2, epsilon = 1e-6);
        for &theta in &[0.3, 1.1, 2.9] {
            let h = 1e-5;
            let fd1 = (f.eval(theta + h) - f.eval(theta - h)) / (2.0 * h);
            assert_abs_diff_eq!(f.derivative(theta, 1).unwrap(), fd1, epsilon = 1e-6);
        }
    }

    #[test]
    fn add_and_scale_coefficients() {
        let g = CosineSymbol::laplacian_power(1);
        assert_eq!(g.add(&g).coeffs(), &[4.0, -2.0]);
        assert_eq!(g.scale(0.0).coeffs(), &[0.0, 0.0]);
        let f2 = CosineSymbol::laplacian_power(2);
        let f1 = CosineSymbol::laplacian_power(1);
        assert_eq!(f2.add(&f1.scale(3.0)).coeffs(), &[12.0, -7.0, 1.0]);
    }

    #[test]
    fn multiply_squares_the_laplacian() {
        let g = CosineSymbol::laplacian_power(1);
        assert_eq!(g.multiply(&g).coeffs(), &[6.0, -4.0, 1.0]);
        assert_eq!(CosineSymbol::laplacian_power(2).coeffs(), &[6.0, -4.0, 1.0]);
        let one = CosineSymbol::constant(1.0);
        assert_eq!(g.multiply(&one).coeffs(), g.coeffs());
    }

    #[test]
    fn multiply_matches_pointwise_product() {
        let mut rng = crate::test_rng::SplitMix::new(7);
        for _ in 0..20 {
            let la = 1 + rng.below(8);
            let lb = 1 + rng.below(8);
            let a = CosineSymbol::new(rng.vec(la, 2.0)).unwrap();
            let b = CosineSymbol::new(rng.vec(lb, 2.0)).unwrap();
            let p = a.multiply(&b);
            for _ in 0..50 {
                let theta = rng.uniform() * 2.0 * PI;
                let want = a.eval(theta) * b.eval(theta);
                assert_relative_eq!(p.eval(theta), want, epsilon = 1e-12, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn evenness_under_reflection() {
        let mut rng = crate::test_rng::SplitMix::new(11);
        let symbols = vec![
            CosineSymbol::laplacian_power(1),
            CosineSymbol::laplacian_power(2),
            CosineSymbol::kms(0.5, 1e-14).unwrap(),
            CosineSymbol::new(rng.vec(9, 1.0)).unwrap(),
        ];
        for f in &symbols {
            for _ in 0..1000 {
                let theta = rng.uniform() * 2.0 * PI;
                let v = f.eval(theta);
                assert!((v - f.eval(2.0 * PI - theta)).abs() <= 1e-12 * (1.0 + v.abs()));
            }
        }
    }

    #[test]
    fn wiener_norm_values() {
        let g = CosineSymbol::laplacian_power(1);
        assert_abs_diff_eq!(g.wiener_norm(1.0), 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.wiener_norm(0.0), 4.0, epsilon = 1e-15);

        // direct summation oracle for the truncated KMS series
        let rho: f64 = 0.5;
        let f = CosineSymbol::kms(rho, 1e-14).unwrap();
        let mut oracle = 0.5 * (1.0 + rho);
        for k in 1..=f.bandwidth() {
            oracle += 0.5 * (1.0 - rho * rho) * rho.powi(k as i32 - 1) * (k as f64 + 1.0);
        }
        assert_abs_diff_eq!(f.wiener_norm(1.0), oracle, epsilon = 1e-10);
    }

    #[test]
    fn simple_loop_classification() {
        let g = CosineSymbol::laplacian_power(1);
        assert!(g.simple_loop_check(4096, 1e-8).is_simple_loop);

        let f2 = CosineSymbol::laplacian_power(2);
        let report = f2.simple_loop_check(4096, 1e-8);
        assert!(!report.is_simple_loop);
        assert!(report.monotone_on_half_period);
        assert!(report.endpoint_curvature.abs() <= 1e-8); // f2''(0) = 0

        let kms = CosineSymbol::kms(0.5, 1e-14).unwrap();
        assert!(kms.simple_loop_check(4096, 1e-8).is_simple_loop);
    }

    #[test]
    fn text_round_trip() {
        let f = CosineSymbol::kms(0.37, 1e-13).unwrap();
        let back = CosineSymbol::from_text(&f.to_text()).unwrap();
        assert_eq!(f.coeffs(), back.coeffs());
        assert!(CosineSymbol::from_text("2\n1.0\n2.0\n").is_err());
        assert!(CosineSymbol::from_text("").is_err());
    }
}
