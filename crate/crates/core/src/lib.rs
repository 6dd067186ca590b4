//! Eigenvalue asymptotics for symmetric Toeplitz matrices generated by
//! matrix-size-dependent cosine symbols.
//!
//! The crate has three layers:
//!
//! * a reference eigensolver for symmetric banded Toeplitz matrices
//!   ([`SymmetricBandedToeplitz`]), used as the oracle everywhere;
//! * the expansion machinery: the functionals eta, psi, phi evaluated by
//!   regularized principal-value quadrature ([`quadrature`]), and the
//!   expansion coefficients and k-term eigenvalue approximations built from
//!   them ([`expansion`]);
//! * the matrix-less predictor ([`matrixless`]): extrapolate the expansion
//!   coefficients from a few small spectra, interpolate them (with known
//!   endpoint values mixed into the node set), and predict all eigenvalues of
//!   huge matrices in linear time.

pub mod error;
pub mod expansion;
pub mod matrixless;
pub mod momentary;
pub mod quadrature;
pub mod symbol;
pub mod toeplitz;

pub use error::{Error, Result};
pub use expansion::{ErrorReport, ExpansionKind};
pub use momentary::{BetaSpec, MomentarySymbol};
pub use quadrature::{PvConfig, PvQuadrature, SampledSymbol};
pub use symbol::{CosineSymbol, SimpleLoopReport};
pub use toeplitz::SymmetricBandedToeplitz;

#[cfg(test)]
pub(crate) mod test_rng {
    /// SplitMix64: tiny deterministic generator for property tests.
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

        /// Uniform in `[0, 1)`.
        pub fn uniform(&mut self) -> f64 {
            (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
        }

        /// Uniform integer in `[0, n)`.
        pub fn below(&mut self, n: usize) -> usize {
            (self.uniform() * n as f64) as usize
        }

        /// Vector of `len` values uniform in `[-amp, amp]`.
        pub fn vec(&mut self, len: usize, amp: f64) -> Vec<f64> {
            (0..len).map(|_| amp * (2.0 * self.uniform() - 1.0)).collect()
        }
    }
}
