mod common;

use std::f64::consts::PI;
use toeplitz_spectra::quadrature::{psi, phi, PvConfig};
use toeplitz_spectra::symbol::CosineSymbol;

#[test]
fn oracle_values() {
    let f = CosineSymbol::kms(0.5, 1e-14).unwrap();
    let g = CosineSymbol::laplacian_power(1);
    let s = PI / 2.0;
    let cfg = PvConfig::default();

    // psi simplified form: (sin s / pi) PV-int d sigma / (f(sigma) - f(s))
    let i_psi = common::pv_reciprocal_difference(&f, s);
    let simplified_psi = s.sin() / PI * i_psi;
    let psi_val = psi(&f, &g, s, &cfg).unwrap();
    println!("psi(pi/2)        = {psi_val:.15}");
    println!("simplified form  = {simplified_psi:.15}");
    println!("ratio            = {}", psi_val / simplified_psi);

    // phi simplified form with w = f - 2 cos + const (coeff c1 -= 1)
    let mut coeffs = f.coeffs().to_vec();
    coeffs[1] -= 1.0;
    let w = CosineSymbol::new(coeffs).unwrap();
    let i_phi = common::pv_reciprocal_difference(&w, s);
    let simplified_phi = s.sin() / PI * i_phi;
    let phi_val = phi(&f, &g, s, &cfg).unwrap();
    println!("phi(pi/2)        = {phi_val:.15}");
    println!("simplified form  = {simplified_phi:.15}");
    println!("ratio            = {}", phi_val / simplified_phi);

    // convergence sanity of the oracle itself: finer tolerance changes little
    for &sx in &[0.5, 1.2, 2.5] {
        let v = common::pv_reciprocal_difference(&f, sx);
        println!("oracle psi-int at s={sx}: {v:.12}");
    }
}
