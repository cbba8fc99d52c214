//! Mode functions and projection probabilities for Gaussian sources.
//!
//! Amplitudes follow the `exp[-(x-x₀)²/4σ²]` width convention, so σ is the
//! RMS width of the *intensity* profile. The Hermite-Gauss family built on
//! that convention is orthonormal and is the optimal projection basis for a
//! Gaussian point-spread function. Projecting a source displaced by `±𝔰/2`
//! onto mode `j` succeeds with the Poissonian probability
//! `q_j(𝔰) = λ^j e^{-λ}/j!`, `λ = (𝔰/4σ)²`, which this module exposes both
//! in closed form and through numerical overlap integrals.

use crate::error::{CoreError, Result};
use crate::quadrature::{Grid, DEFAULT_PAD_WIDTHS, DEFAULT_POINTS};

/// Physical domain a profile lives in. Frequency widths pair with THz,
/// time widths with ps; the math is identical in both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalDomain {
    Frequency,
    Time,
}

/// Default cap on the Hermite-Gauss recursion order.
pub const DEFAULT_ORDER_CAP: usize = 6;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Gaussian amplitude point-spread function with RMS intensity width `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSpreadFunction {
    center: f64,
    sigma: f64,
    domain: SignalDomain,
}

impl PointSpreadFunction {
    pub fn new(center: f64, sigma: f64, domain: SignalDomain) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() || !center.is_finite() {
            return Err(CoreError::Domain(format!(
                "point-spread function requires finite center and sigma > 0, got ({center}, {sigma})"
            )));
        }
        Ok(PointSpreadFunction { center, sigma, domain })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn domain(&self) -> SignalDomain {
        self.domain
    }

    /// L²-normalized amplitude `ψ(x) = (2πσ²)^{-1/4} exp[-(x-x₀)²/4σ²]`.
    pub fn amplitude(&self, x: f64) -> f64 {
        let u = x - self.center;
        (2.0 * std::f64::consts::PI * self.sigma * self.sigma).powf(-0.25)
            * (-u * u / (4.0 * self.sigma * self.sigma)).exp()
    }
}

/// Orthonormal Hermite-Gauss mode of a given order, sharing the
/// point-spread function width convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteGaussMode {
    order: usize,
    center: f64,
    sigma: f64,
    domain: SignalDomain,
}

impl HermiteGaussMode {
    pub fn new(order: usize, center: f64, sigma: f64, domain: SignalDomain) -> Result<Self> {
        Self::with_cap(order, center, sigma, domain, DEFAULT_ORDER_CAP)
    }

    /// Construct with an explicit recursion cap instead of [`DEFAULT_ORDER_CAP`].
    pub fn with_cap(
        order: usize,
        center: f64,
        sigma: f64,
        domain: SignalDomain,
        cap: usize,
    ) -> Result<Self> {
        if order > cap {
            return Err(CoreError::UnsupportedOrder { order, cap });
        }
        if !(sigma > 0.0) || !sigma.is_finite() || !center.is_finite() {
            return Err(CoreError::Domain(format!(
                "Hermite-Gauss mode requires finite center and sigma > 0, got ({center}, {sigma})"
            )));
        }
        Ok(HermiteGaussMode { order, center, sigma, domain })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn domain(&self) -> SignalDomain {
        self.domain
    }

    /// Mode amplitude `φ_k(x)`.
    ///
    /// Orders 0 and 1 reproduce the closed forms
    /// `φ₀ = (2πσ²)^{-1/4} e^{-u²/4σ²}` and `φ₁ = u (2πσ⁶)^{-1/4} e^{-u²/4σ²}`;
    /// higher orders use the normalized Hermite recurrence
    /// `φ_{k+1} = ξ√(2/(k+1)) φ_k − √(k/(k+1)) φ_{k-1}` with `ξ = u/(√2 σ)`.
    pub fn amplitude(&self, x: f64) -> f64 {
        let u = x - self.center;
        let xi = u / (SQRT_2 * self.sigma);
        let phi0 = (2.0 * std::f64::consts::PI * self.sigma * self.sigma).powf(-0.25)
            * (-0.5 * xi * xi).exp();
        if self.order == 0 {
            return phi0;
        }
        let mut prev = phi0;
        let mut cur = SQRT_2 * xi * phi0;
        for k in 1..self.order {
            let next = xi * (2.0 / (k as f64 + 1.0)).sqrt() * cur
                - (k as f64 / (k as f64 + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
        }
        cur
    }
}

/// `φ_k(x)` for a validated mode; see [`HermiteGaussMode::amplitude`].
pub fn hg_amplitude(mode: &HermiteGaussMode, x: f64) -> f64 {
    mode.amplitude(x)
}

/// Incoherent equal-weight pair of displaced copies of one point-spread
/// function, separated by `separation` (sources sit at center ± 𝔰/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceMixture {
    psf: PointSpreadFunction,
    separation: f64,
    weights: (f64, f64),
}

impl SourceMixture {
    pub fn new(psf: PointSpreadFunction, separation: f64) -> Result<Self> {
        if !(separation >= 0.0) || !separation.is_finite() {
            return Err(CoreError::Domain(format!(
                "separation must be finite and >= 0, got {separation}"
            )));
        }
        Ok(SourceMixture { psf, separation, weights: (0.5, 0.5) })
    }

    pub fn psf(&self) -> &PointSpreadFunction {
        &self.psf
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn weights(&self) -> (f64, f64) {
        self.weights
    }

    /// Mixture intensity `I(x) = ½(|ψ(x+𝔰/2)|² + |ψ(x-𝔰/2)|²)`.
    pub fn intensity(&self, x: f64) -> f64 {
        let half = 0.5 * self.separation;
        let a = self.psf.amplitude(x + half);
        let b = self.psf.amplitude(x - half);
        self.weights.0 * a * a + self.weights.1 * b * b
    }
}

/// Mixture intensity at `x`; see [`SourceMixture::intensity`].
pub fn mixture_intensity(mix: &SourceMixture, x: f64) -> f64 {
    mix.intensity(x)
}

/// Overlap integral `∫ φ_k(x) ψ(x - shift) dx` on the default grid
/// (trapezoid, 4097 points, all features padded by twelve widths).
pub fn overlap(mode: &HermiteGaussMode, psf: &PointSpreadFunction, shift: f64) -> Result<f64> {
    let width = mode.sigma().max(psf.sigma());
    let features = [mode.center(), psf.center() + shift];
    let grid = Grid::covering(&features, DEFAULT_PAD_WIDTHS * width, DEFAULT_POINTS);
    overlap_on(&grid, mode, psf, shift)
}

/// Overlap integral on an explicit grid. Fails with an accuracy error when
/// the estimated truncated tail mass exceeds `1e-10`.
pub(crate) fn overlap_on(
    grid: &Grid,
    mode: &HermiteGaussMode,
    psf: &PointSpreadFunction,
    shift: f64,
) -> Result<f64> {
    if mode.domain() != psf.domain() {
        return Err(CoreError::Domain(format!(
            "domain mismatch: mode is {:?}, point-spread function is {:?}",
            mode.domain(),
            psf.domain()
        )));
    }
    let (value, tail) = grid.integrate_checked(|x| mode.amplitude(x) * psf.amplitude(x - shift));
    if tail > 1e-10 {
        return Err(CoreError::Accuracy(format!(
            "overlap window [{:.3}, {:.3}] too small: tail fraction {:.2e}",
            grid.lo(),
            grid.hi(),
            tail
        )));
    }
    Ok(value)
}

/// Ideal projection probability `q_j(𝔰) = λ^j e^{-λ}/j!` with `λ = (𝔰/4σ)²`:
/// the chance that a photon from the incoherent ±𝔰/2 mixture lands in the
/// j-th Hermite-Gauss output of a perfect mode sorter.
pub fn ideal_projection_prob(j: usize, separation: f64, sigma: f64) -> Result<f64> {
    if !(separation >= 0.0) || !separation.is_finite() {
        return Err(CoreError::Domain(format!(
            "separation must be finite and >= 0, got {separation}"
        )));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(CoreError::Domain(format!("sigma must be finite and > 0, got {sigma}")));
    }
    let lambda = (separation / (4.0 * sigma)).powi(2);
    if lambda == 0.0 {
        return Ok(if j == 0 { 1.0 } else { 0.0 });
    }
    // log-space keeps high orders finite
    let ln_q = j as f64 * lambda.ln() - lambda - libm::lgamma(j as f64 + 1.0);
    Ok(ln_q.exp())
}

/// `q_j(𝔰)` for `j = 0..count`.
pub fn ideal_projection_probs(count: usize, separation: f64, sigma: f64) -> Result<Vec<f64>> {
    (0..count).map(|j| ideal_projection_prob(j, separation, sigma)).collect()
}
