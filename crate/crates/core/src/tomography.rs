//! Measurement tomography and constrained maximum-likelihood estimation.
//!
//! A real device's three detection probabilities `p_j(𝔰)` deviate slightly
//! from the ideal projections `q_j(𝔰)`. Calibration expands each measured
//! output in the ideal basis, `p_j(𝔰) = Σ_k c_{jk} q_k(𝔰)`, solving for the
//! coefficients with an SVD pseudo-inverse over a set of known separations.
//! Estimation then maximizes the renormalized multinomial log-likelihood
//! `Σ_j n_j log[p_j(𝔰)/Σ_{j'} p_{j'}(𝔰)]` subject to `𝔰 ≥ 0`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::modes::ideal_projection_prob;
use crate::optimize;

/// Number of measured outputs (projections onto HG₀, HG₁, HG₂).
pub const OUTPUTS: usize = 3;

/// Default basis size M: coefficients run over `q_0..q_M`.
pub const DEFAULT_BASIS_SIZE: usize = 4;

/// Upper end of the estimation search range, in units of σ. Calibration
/// covers separations up to 2σ; the margin avoids boundary bias there.
pub const SEARCH_MAX_SIGMAS: f64 = 2.5;

/// Relative singular-value cutoff of the pseudo-inverse.
const SVD_CUTOFF: f64 = 1e-10;

/// Floor applied to predicted probabilities before taking logs.
const PROB_FLOOR: f64 = 1e-12;

/// Grid points for the coarse likelihood scan.
const SCAN_POINTS: usize = 256;

/// Golden-section tolerance for the refined estimate, in units of σ.
const REFINE_TOL_SIGMAS: f64 = 1e-6;

/// One measurement: counts in the three projection outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub counts: [u64; OUTPUTS],
}

impl CountRecord {
    pub fn new(n0: u64, n1: u64, n2: u64) -> Self {
        CountRecord { counts: [n0, n1, n2] }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Calibration data: known separations with the averaged relative
/// frequencies observed in each output.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationSet {
    separations: Vec<f64>,
    frequencies: Vec<[f64; OUTPUTS]>,
}

impl CalibrationSet {
    /// Build from measured relative frequencies; each vector must sum to
    /// one within 1e-9 and separations must be strictly increasing.
    pub fn from_frequencies(
        separations: Vec<f64>,
        frequencies: Vec<[f64; OUTPUTS]>,
    ) -> Result<Self> {
        let set = Self::from_model_probs(separations, frequencies)?;
        for (i, f) in set.frequencies.iter().enumerate() {
            let sum: f64 = f.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(CoreError::Domain(format!(
                    "calibration frequencies at point {i} sum to {sum}, expected 1"
                )));
            }
        }
        Ok(set)
    }

    /// Build from model probabilities that need not be normalized (sums up
    /// to one are allowed to fall short, as for truncated ideal outputs).
    pub fn from_model_probs(
        separations: Vec<f64>,
        frequencies: Vec<[f64; OUTPUTS]>,
    ) -> Result<Self> {
        if separations.len() != frequencies.len() || separations.is_empty() {
            return Err(CoreError::Domain(
                "calibration needs matching, nonempty separations and frequencies".into(),
            ));
        }
        for pair in separations.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(CoreError::Domain(
                    "calibration separations must be strictly increasing".into(),
                ));
            }
        }
        if !(separations[0] >= 0.0) {
            return Err(CoreError::Domain("calibration separations must be >= 0".into()));
        }
        for (i, f) in frequencies.iter().enumerate() {
            let sum: f64 = f.iter().sum();
            if f.iter().any(|v| !v.is_finite() || *v < 0.0) || sum > 1.0 + 1e-9 {
                return Err(CoreError::Domain(format!(
                    "calibration frequencies at point {i} must be >= 0 with sum <= 1"
                )));
            }
        }
        Ok(CalibrationSet { separations, frequencies })
    }

    pub fn separations(&self) -> &[f64] {
        &self.separations
    }

    pub fn frequencies(&self) -> &[[f64; OUTPUTS]] {
        &self.frequencies
    }

    pub fn len(&self) -> usize {
        self.separations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.separations.is_empty()
    }
}

/// Calibrated measurement model: `p_j(𝔰) = Σ_k c_{jk} q_k(𝔰)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomographyModel {
    /// Reference point-spread width σ; separations share its unit.
    pub sigma: f64,
    /// Basis size M (columns run `k = 0..=M`).
    pub basis_size: usize,
    /// Coefficient rows `c_j`, one per measured output.
    pub coefficients: [Vec<f64>; OUTPUTS],
}

/// Fit diagnostics alongside the model.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationFit {
    pub model: TomographyModel,
    /// Root-mean-square residual of each output over the calibration set.
    pub residual_rms: [f64; OUTPUTS],
    pub smallest_singular_value: f64,
}

/// Constrained maximum-likelihood estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub separation: f64,
    /// The optimum sat on the upper search boundary `2.5σ`.
    pub at_upper_bound: bool,
}

/// Design matrix `Q` with rows over calibration separations and columns
/// `q_k(𝔰_α)` for `k = 0..=basis_size`.
pub fn design_matrix(separations: &[f64], sigma: f64, basis_size: usize) -> Result<DMatrix<f64>> {
    if basis_size < 2 {
        return Err(CoreError::Domain(format!("basis size must be >= 2, got {basis_size}")));
    }
    if separations.len() < basis_size + 1 {
        return Err(CoreError::Underdetermined {
            points: separations.len(),
            unknowns: basis_size + 1,
        });
    }
    let mut q = DMatrix::zeros(separations.len(), basis_size + 1);
    for (row, &s) in separations.iter().enumerate() {
        for k in 0..=basis_size {
            q[(row, k)] = ideal_projection_prob(k, s, sigma)?;
        }
    }
    Ok(q)
}

/// Solve the three least-squares systems `Q c_j = f_j` by SVD
/// pseudo-inverse and package the coefficients as a model.
pub fn fit_coefficients(
    cal: &CalibrationSet,
    sigma: f64,
    basis_size: usize,
) -> Result<CalibrationFit> {
    let q = design_matrix(cal.separations(), sigma, basis_size)?;
    let svd = q.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= SVD_CUTOFF * smax {
        return Err(CoreError::SingularCalibration { smallest: smin });
    }
    let mut coefficients: [Vec<f64>; OUTPUTS] = Default::default();
    let mut residual_rms = [0.0; OUTPUTS];
    for j in 0..OUTPUTS {
        let f = DVector::from_iterator(cal.len(), cal.frequencies().iter().map(|row| row[j]));
        let c = svd
            .solve(&f, SVD_CUTOFF * smax)
            .map_err(|_| CoreError::SingularCalibration { smallest: smin })?;
        let residual = &q * &c - &f;
        residual_rms[j] = (residual.norm_squared() / cal.len() as f64).sqrt();
        coefficients[j] = c.iter().cloned().collect();
    }
    Ok(CalibrationFit {
        model: TomographyModel { sigma, basis_size, coefficients },
        residual_rms,
        smallest_singular_value: smin,
    })
}

impl TomographyModel {
    /// The perfect-device model: `c_{jk} = δ_{jk}`.
    pub fn ideal(sigma: f64, basis_size: usize) -> Result<Self> {
        if basis_size < 2 {
            return Err(CoreError::Domain(format!("basis size must be >= 2, got {basis_size}")));
        }
        let mut coefficients: [Vec<f64>; OUTPUTS] = Default::default();
        for (j, row) in coefficients.iter_mut().enumerate() {
            *row = vec![0.0; basis_size + 1];
            row[j] = 1.0;
        }
        Ok(TomographyModel { sigma, basis_size, coefficients })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(CoreError::Domain(format!("sigma must be > 0, got {}", self.sigma)));
        }
        if self.basis_size < 2 {
            return Err(CoreError::Domain(format!(
                "basis size must be >= 2, got {}",
                self.basis_size
            )));
        }
        for row in &self.coefficients {
            if row.len() != self.basis_size + 1 {
                return Err(CoreError::Domain(format!(
                    "coefficient rows must have {} entries, got {}",
                    self.basis_size + 1,
                    row.len()
                )));
            }
            if row.iter().any(|c| !c.is_finite()) {
                return Err(CoreError::Domain("coefficients must be finite".into()));
            }
        }
        Ok(())
    }

    /// Predicted (unnormalized) detection probabilities at `separation`,
    /// clamped to `[1e-12, 1]`. Refuses separations outside the calibrated
    /// range `[0, 2.5σ]`; renormalization is the likelihood's job.
    pub fn predicted_probs(&self, separation: f64) -> Result<[f64; OUTPUTS]> {
        let max = SEARCH_MAX_SIGMAS * self.sigma;
        if !(0.0..=max).contains(&separation) {
            return Err(CoreError::Extrapolation { separation, max });
        }
        let mut probs = [0.0; OUTPUTS];
        for (j, row) in self.coefficients.iter().enumerate() {
            let mut p = 0.0;
            for (k, &c) in row.iter().enumerate() {
                p += c * ideal_projection_prob(k, separation, self.sigma)?;
            }
            probs[j] = p.clamp(PROB_FLOOR, 1.0);
        }
        Ok(probs)
    }

    /// Renormalized log-likelihood of a count record at `separation`.
    pub fn log_likelihood(&self, record: &CountRecord, separation: f64) -> Result<f64> {
        let probs = self.predicted_probs(separation)?;
        let total: f64 = probs.iter().sum();
        let mut ll = 0.0;
        for (j, &n) in record.counts.iter().enumerate() {
            if n > 0 {
                ll += n as f64 * (probs[j] / total).ln();
            }
        }
        Ok(ll)
    }

    /// Constrained maximum-likelihood separation estimate: coarse scan of
    /// 256 grid points over `[0, 2.5σ]` followed by golden-section
    /// refinement to `1e-6σ`, ties resolved toward smaller separations.
    pub fn ml_estimate(&self, record: &CountRecord) -> Result<Estimate> {
        if record.total() == 0 {
            return Err(CoreError::InsufficientData(
                "all-zero counts cannot constrain the separation".into(),
            ));
        }
        self.validate()?;
        let max = SEARCH_MAX_SIGMAS * self.sigma;
        let ll = |s: f64| {
            self.log_likelihood(record, s)
                .expect("in-range separation with validated model")
        };
        let (arg, _) = optimize::maximize(ll, 0.0, max, SCAN_POINTS, REFINE_TOL_SIGMAS * self.sigma);
        let at_upper = max - arg < 2.0 * REFINE_TOL_SIGMAS * self.sigma;
        Ok(Estimate { separation: arg, at_upper_bound: at_upper })
    }

    /// Standard error from the observed log-likelihood curvature at the
    /// estimate, `1/√(-∂²ℓ/∂𝔰²)`. Returns `None` where the curvature is
    /// not usable (boundary estimates, non-concave stencils).
    pub fn curvature_std_error(&self, record: &CountRecord, separation: f64) -> Option<f64> {
        let h = 1e-4 * self.sigma;
        let max = SEARCH_MAX_SIGMAS * self.sigma;
        if separation - h < 0.0 || separation + h > max {
            return None;
        }
        let lm = self.log_likelihood(record, separation - h).ok()?;
        let l0 = self.log_likelihood(record, separation).ok()?;
        let lp = self.log_likelihood(record, separation + h).ok()?;
        let curvature = (lp - 2.0 * l0 + lm) / (h * h);
        if curvature < 0.0 {
            Some(1.0 / (-curvature).sqrt())
        } else {
            None
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: TomographyModel = serde_json::from_str(text)
            .map_err(|e| CoreError::Domain(format!("model JSON: {e}")))?;
        model.validate()?;
        Ok(model)
    }
}
