//! Fisher information and Cramér-Rao bounds for separation estimation.
//!
//! Three bounds matter here: the standard bound from direct intensity
//! detection (divergent at zero separation), the separation-independent
//! quantum limit `4σ²/N`, and the bound of whatever discrete measurement
//! model is actually run (ideal mode sorter, pulse gate, binned
//! spectrometer). The latter is evaluated generically from a probability
//! model by central finite differences.

use crate::error::{CoreError, Result};
use crate::modes::{PointSpreadFunction, SignalDomain, SourceMixture};
use crate::quadrature::{Grid, DEFAULT_PAD_WIDTHS, DEFAULT_POINTS};

/// Relative finite-difference step for model Fisher information.
pub const MODEL_FI_STEP: f64 = 1e-4;

/// Probabilities below this are dropped from model Fisher sums.
const PROB_FLOOR: f64 = 1e-12;

/// Fisher information about the separation carried by `photons` direct
/// intensity detections: `N ∫ (∂I/∂𝔰)² / I dν`.
///
/// The derivative is analytic (no finite differences), the integral runs on
/// the default fixed grid, and the integrand is taken as zero wherever the
/// intensity underflows. Exactly zero at `separation = 0` by symmetry.
pub fn fisher_direct(separation: f64, sigma: f64, photons: u64) -> f64 {
    let psf = PointSpreadFunction::new(0.0, sigma, SignalDomain::Frequency)
        .expect("sigma validated by caller");
    let mix = SourceMixture::new(psf, separation).expect("separation validated by caller");
    let half = 0.5 * separation;
    let grid = Grid::covering(&[-half, half], DEFAULT_PAD_WIDTHS * sigma, DEFAULT_POINTS);
    let sig2 = sigma * sigma;
    let integral = grid.integrate(|x| {
        let intensity = mix.intensity(x);
        if intensity < 1e-300 {
            return 0.0;
        }
        // dI/d𝔰 = ¼ [g'(x+𝔰/2) - g'(x-𝔰/2)] with g = |ψ|², g' = -(u/σ²) g
        let a = psf.amplitude(x + half);
        let b = psf.amplitude(x - half);
        let gp_plus = -((x + half) / sig2) * a * a;
        let gp_minus = -((x - half) / sig2) * b * b;
        let deriv = 0.25 * (gp_plus - gp_minus);
        deriv * deriv / intensity
    });
    photons as f64 * integral
}

/// The quantum limit on the separation variance, `4σ²/N`, reached by ideal
/// low-order Hermite-Gauss projections at any separation.
pub fn quantum_limit_variance(sigma: f64, photons: u64) -> f64 {
    4.0 * sigma * sigma / photons as f64
}

/// Fisher information of a discrete measurement model `𝔰 → (p_0, p_1, ...)`.
///
/// The vector may sum to anything ≤ 1 and is renormalized internally, so the
/// result is the information of the conditioned (multinomial) outcome
/// distribution. Derivatives use a central difference with step
/// `1e-4·sigma`; channels below the probability floor are dropped.
pub fn fisher_model<F>(probs: F, separation: f64, sigma: f64, photons: u64) -> Result<f64>
where
    F: Fn(f64) -> Vec<f64>,
{
    let h = MODEL_FI_STEP * sigma;
    if separation < h {
        return Err(CoreError::Domain(format!(
            "separation {separation} smaller than finite-difference step {h}"
        )));
    }
    let lo = normalized(probs(separation - h))?;
    let hi = normalized(probs(separation + h))?;
    let mid = normalized(probs(separation))?;
    if lo.len() != hi.len() || lo.len() != mid.len() {
        return Err(CoreError::Domain("probability model changed output length".into()));
    }
    let mut info = 0.0;
    for j in 0..mid.len() {
        if mid[j] < PROB_FLOOR {
            continue;
        }
        let dp = (hi[j] - lo[j]) / (2.0 * h);
        info += dp * dp / mid[j];
    }
    Ok(photons as f64 * info)
}

fn normalized(mut p: Vec<f64>) -> Result<Vec<f64>> {
    let mut sum = 0.0;
    for &v in &p {
        if !v.is_finite() || v < 0.0 {
            return Err(CoreError::Domain(format!("probability {v} is not finite and >= 0")));
        }
        sum += v;
    }
    if sum <= 0.0 {
        return Err(CoreError::Domain("probability vector sums to zero".into()));
    }
    for v in &mut p {
        *v /= sum;
    }
    Ok(p)
}

/// Which bound a curve tabulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    StandardCrlb,
    QuantumLimit,
    ModelCrlb,
}

/// A variance bound tabulated over a separation grid for a fixed photon
/// number. Divergent entries (zero Fisher information) carry an explicit
/// `+∞` sentinel rather than panicking.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub separations: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: BoundKind,
    pub photons: u64,
}

impl BoundCurve {
    /// Standard-detection Cramér-Rao bound `1/𝓕_std` on the grid.
    pub fn standard(separations: &[f64], sigma: f64, photons: u64) -> Self {
        let values = separations
            .iter()
            .map(|&s| {
                let info = fisher_direct(s, sigma, photons);
                if info > 0.0 {
                    1.0 / info
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        BoundCurve {
            separations: separations.to_vec(),
            values,
            kind: BoundKind::StandardCrlb,
            photons,
        }
    }

    /// The flat quantum limit `4σ²/N` on the grid.
    pub fn quantum(separations: &[f64], sigma: f64, photons: u64) -> Self {
        let v = quantum_limit_variance(sigma, photons);
        BoundCurve {
            separations: separations.to_vec(),
            values: vec![v; separations.len()],
            kind: BoundKind::QuantumLimit,
            photons,
        }
    }

    /// Cramér-Rao bound of a discrete probability model on the grid.
    /// Grid points below the finite-difference step report `+∞` (every
    /// model here is even in the separation, so its information vanishes
    /// at zero).
    pub fn model<F>(probs: F, separations: &[f64], sigma: f64, photons: u64) -> Result<Self>
    where
        F: Fn(f64) -> Vec<f64>,
    {
        let mut values = Vec::with_capacity(separations.len());
        for &s in separations {
            if s < MODEL_FI_STEP * sigma {
                values.push(f64::INFINITY);
                continue;
            }
            let info = fisher_model(&probs, s, sigma, photons)?;
            values.push(if info > 0.0 { 1.0 / info } else { f64::INFINITY });
        }
        Ok(BoundCurve {
            separations: separations.to_vec(),
            values,
            kind: BoundKind::ModelCrlb,
            photons,
        })
    }
}
