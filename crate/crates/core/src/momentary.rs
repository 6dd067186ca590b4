//! Matrix-size-dependent symbols `f0 + sum_t beta_t(h) f_t` with scale factors
//! ordered so that later terms vanish faster as `h = 1/(n+1) -> 0`.

use crate::error::{invalid, Result};
use crate::symbol::CosineSymbol;

/// A scale factor `beta(h)`: either `c * h^p * log^q(1/h)` or `h^h`.
#[derive(Debug, Clone, PartialEq)]
pub enum BetaSpec {
    PowerLog { c: f64, p: f64, q: u32 },
    HToH,
}

impl BetaSpec {
    pub fn power(c: f64, p: f64) -> Self {
        BetaSpec::PowerLog { c, p, q: 0 }
    }

    /// Evaluates the scale factor at `h` in `(0, 1)`.
    pub fn eval(&self, h: f64) -> Result<f64> {
        if !(0.0 < h && h < 1.0) {
            return Err(invalid(format!("beta(h): h must lie in (0, 1), got {h}")));
        }
        Ok(match *self {
            BetaSpec::PowerLog { c, p, q } => c * h.powf(p) * h.recip().ln().powi(q as i32),
            BetaSpec::HToH => h.powf(h),
        })
    }
}

/// A symbol of the form `base + sum_t beta_t(h) f_t`, instantiated per matrix
/// dimension with `h = 1/(n+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentarySymbol {
    base: CosineSymbol,
    terms: Vec<(BetaSpec, CosineSymbol)>,
}

impl MomentarySymbol {
    pub fn new(base: CosineSymbol, terms: Vec<(BetaSpec, CosineSymbol)>) -> Self {
        MomentarySymbol { base, terms }
    }

    /// The finite-difference family
    /// `(2-2cos)^2 + alpha1 (2-2cos) h^2 + alpha0 h^4`.
    pub fn fn_family(alpha1: f64, alpha0: f64) -> Self {
        MomentarySymbol {
            base: CosineSymbol::laplacian_power(2),
            terms: vec![
                (
                    BetaSpec::power(1.0, 2.0),
                    CosineSymbol::laplacian_power(1).scale(alpha1),
                ),
                (
                    BetaSpec::power(1.0, 4.0),
                    CosineSymbol::laplacian_power(0).scale(alpha0),
                ),
            ],
        }
    }

    pub fn base(&self) -> &CosineSymbol {
        &self.base
    }

    pub fn terms(&self) -> &[(BetaSpec, CosineSymbol)] {
        &self.terms
    }

    /// The fixed symbol for dimension `n`: `base + sum_t beta_t(h) f_t` with
    /// `h = 1/(n+1)`.
    pub fn instantiate(&self, n: usize) -> Result<CosineSymbol> {
        if n < 1 {
            return Err(invalid("instantiate: n must be at least 1"));
        }
        let h = 1.0 / (n as f64 + 1.0);
        let mut out = self.base.clone();
        for (beta, f) in &self.terms {
            out = out.add(&f.scale(beta.eval(h)?));
        }
        Ok(out)
    }

    /// Checks numerically, on `h = 2^-4 .. 2^-20`, that consecutive scale
    /// factors satisfy `beta_{t+1}(h) / beta_t(h) -> 0`.
    pub fn scales_properly_ordered(&self) -> bool {
        self.terms.windows(2).all(|pair| {
            let mut prev = f64::INFINITY;
            for e in 4..=20 {
                let h = 2f64.powi(-e);
                let (a, b) = match (pair[0].0.eval(h), pair[1].0.eval(h)) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => return false,
                };
                if a == 0.0 {
                    return false;
                }
                let ratio = (b / a).abs();
                if ratio >= prev {
                    return false;
                }
                prev = ratio;
            }
            prev < 1e-3
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn beta_eval_forms() {
        let b = BetaSpec::power(1.0, 1.0);
        assert_abs_diff_eq!(b.eval(0.01).unwrap(), 0.01, epsilon = 1e-18);
        assert_abs_diff_eq!(
            BetaSpec::HToH.eval(0.5).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            BetaSpec::power(3.0, 2.0).eval(0.01).unwrap(),
            3e-4,
            epsilon = 1e-18
        );
        assert!(b.eval(0.0).is_err());
        assert!(b.eval(1.0).is_err());
    }

    #[test]
    fn instantiate_fn_family() {
        let ms = MomentarySymbol::fn_family(3.0, 2.0);
        let f = ms.instantiate(99).unwrap();
        let h: f64 = 0.01;
        assert_abs_diff_eq!(f.coeffs()[0], 6.0 + 6.0 * h * h + 2.0 * h.powi(4), epsilon = 1e-15);
        assert_abs_diff_eq!(f.coeffs()[1], -4.0 - 3.0 * h * h, epsilon = 1e-15);
        assert_abs_diff_eq!(f.coeffs()[2], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn instantiate_with_no_terms_is_base() {
        let base = CosineSymbol::kms(0.5, 1e-14).unwrap();
        let ms = MomentarySymbol::new(base.clone(), vec![]);
        assert_eq!(ms.instantiate(10).unwrap(), base);
    }

    #[test]
    fn instantiate_kms_plus_laplacian_h() {
        let f = CosineSymbol::kms(0.5, 1e-14).unwrap();
        let ms = MomentarySymbol::new(
            f,
            vec![(BetaSpec::power(1.0, 1.0), CosineSymbol::laplacian_power(1))],
        );
        let inst = ms.instantiate(127).unwrap();
        assert_abs_diff_eq!(inst.coeffs()[0], 0.75 + 2.0 / 128.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_alphas_reduce_to_base() {
        let ms = MomentarySymbol::fn_family(0.0, 0.0);
        for n in [5, 50, 500] {
            let f = ms.instantiate(n).unwrap();
            assert_eq!(f.coeffs(), &[6.0, -4.0, 1.0]);
        }
    }

    #[test]
    fn uniform_convergence_to_base() {
        let pi = std::f64::consts::PI;
        for ms in [
            MomentarySymbol::fn_family(3.0, 2.0),
            MomentarySymbol::fn_family(-3.0, 5.0),
        ] {
            let mut prev = f64::INFINITY;
            for e in 6..=14 {
                let n = 1usize << e;
                let inst = ms.instantiate(n).unwrap();
                let worst = (0..=256)
                    .map(|i| {
                        let theta = 2.0 * pi * i as f64 / 256.0;
                        (inst.eval(theta) - ms.base().eval(theta)).abs()
                    })
                    .fold(0.0, f64::max);
                assert!(worst < prev, "not monotone at n = {n}");
                prev = worst;
            }
            assert!(prev < 1e-7);
        }
    }

    #[test]
    fn scale_ordering() {
        assert!(MomentarySymbol::fn_family(3.0, 2.0).scales_properly_ordered());
        let bad = MomentarySymbol::new(
            CosineSymbol::laplacian_power(2),
            vec![
                (BetaSpec::power(1.0, 4.0), CosineSymbol::laplacian_power(1)),
                (BetaSpec::power(1.0, 2.0), CosineSymbol::laplacian_power(0)),
            ],
        );
        assert!(!bad.scales_properly_ordered());
    }
}
