//! Oracle checks for the mode layer: closed forms against independent
//! quadrature routes and analytic Gaussian-product integrals.

use approx::{assert_abs_diff_eq, assert_relative_eq};
use tf_superres_core::modes::{
    hg_amplitude, ideal_projection_prob, overlap, HermiteGaussMode, PointSpreadFunction,
    SignalDomain,
};

fn psf(sigma: f64) -> PointSpreadFunction {
    PointSpreadFunction::new(0.0, sigma, SignalDomain::Frequency).unwrap()
}

fn mode(order: usize, sigma: f64) -> HermiteGaussMode {
    HermiteGaussMode::new(order, 0.0, sigma, SignalDomain::Frequency).unwrap()
}

/// Displaced-Gaussian overlap has the closed form
/// `⟨φ_j|ψ_d⟩ = e^{-d²/8σ²} (d/2σ)^j / √(j!)`; the quadrature must match it.
#[test]
fn overlap_matches_analytic_gaussian_product() {
    let factorial: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];
    for &sigma in &[1.0, 0.182] {
        for j in 0..=4_usize {
            for &shift_sigmas in &[0.0, 0.3, 1.0, 2.5] {
                let d = shift_sigmas * sigma;
                let got = overlap(&mode(j, sigma), &psf(sigma), d).unwrap();
                let expect = (-d * d / (8.0 * sigma * sigma)).exp()
                    * (d / (2.0 * sigma)).powi(j as i32)
                    / factorial[j].sqrt();
                assert_abs_diff_eq!(got, expect, epsilon = 1e-10);
            }
        }
    }
    // headline value: order 0, shift σ → e^(-1/8)
    let got = overlap(&mode(0, 1.0), &psf(1.0), 1.0).unwrap();
    assert_abs_diff_eq!(got, 0.882_496_902_584_595_4, epsilon = 1e-10);
}

/// Closed-form q_j versus the incoherent average of squared overlaps at
/// shifts ±𝔰/2, evaluated by quadrature.
#[test]
fn projection_probs_match_quadrature_oracle() {
    for &s_over_sigma in &[0.0, 0.1, 0.5, 1.0, 2.0] {
        for j in 0..=2_usize {
            let sigma = 1.0;
            let s = s_over_sigma * sigma;
            let plus = overlap(&mode(j, sigma), &psf(sigma), 0.5 * s).unwrap();
            let minus = overlap(&mode(j, sigma), &psf(sigma), -0.5 * s).unwrap();
            let oracle = 0.5 * (plus * plus + minus * minus);
            let closed = ideal_projection_prob(j, s, sigma).unwrap();
            if closed < 1e-3 {
                assert_abs_diff_eq!(closed, oracle, epsilon = 1e-9);
            } else {
                assert_relative_eq!(closed, oracle, max_relative = 1e-6);
            }
        }
    }
}

/// Orthonormality of the Hermite-Gauss family up to the order cap, on the
/// default quadrature grid.
#[test]
fn hermite_gauss_family_is_orthonormal() {
    let sigma = 0.7;
    for j in 0..=6_usize {
        for k in 0..=6_usize {
            // reuse the overlap integrand through a product quadrature
            let mj = HermiteGaussMode::with_cap(j, 0.0, sigma, SignalDomain::Frequency, 6).unwrap();
            let mk = HermiteGaussMode::with_cap(k, 0.0, sigma, SignalDomain::Frequency, 6).unwrap();
            let n = 4097;
            let lo = -12.0 * sigma;
            let step = 24.0 * sigma / (n - 1) as f64;
            let mut acc = 0.0;
            for i in 0..n {
                let x = lo + step * i as f64;
                let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                acc += w * hg_amplitude(&mj, x) * hg_amplitude(&mk, x);
            }
            acc *= step;
            let expect = if j == k { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(acc, expect, epsilon = 1e-7);
        }
    }
}

/// Even orders are even in the shift, odd orders flip sign.
#[test]
fn overlap_parity_in_shift() {
    for j in 0..=4_usize {
        for &d in &[0.4, 1.3] {
            let plus = overlap(&mode(j, 1.0), &psf(1.0), d).unwrap();
            let minus = overlap(&mode(j, 1.0), &psf(1.0), -d).unwrap();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            assert_abs_diff_eq!(plus, sign * minus, epsilon = 1e-12);
        }
    }
}
