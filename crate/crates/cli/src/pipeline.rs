//! Shared wiring between subcommands: normalized experiment construction,
//! synthetic calibration and memoized model evaluation.
//!
//! All simulations run in normalized units (σ = 1 in the active domain).
//! For time-domain runs every spectral width is rescaled by `1/(4πσ_t)` so
//! the gate physics sees consistent reciprocal units; physical values
//! reappear only in output columns.

use std::cell::RefCell;
use std::collections::HashMap;

use tf_superres_core::fisher::MODEL_FI_STEP;
use tf_superres_core::montecarlo::{Domain, EstimatorKind, ExperimentSpec, Scheme};
use tf_superres_core::pulsegate::PulseGateConfig;
use tf_superres_core::tomography::{fit_coefficients, CalibrationFit, CalibrationSet};

use crate::config::RunConfig;
use crate::error::Result;

/// Frequency-axis scale of the normalized system: 1 for frequency-domain
/// runs, `1/(4π)` for time-domain runs (where σ_t = 1).
pub fn frequency_scale(domain: Domain) -> f64 {
    match domain {
        Domain::Frequency => 1.0,
        Domain::Time => 1.0 / (4.0 * std::f64::consts::PI),
    }
}

/// Pulse-gate device in normalized units for the given domain.
pub fn normalized_gate(cfg: &RunConfig, domain: Domain) -> Result<PulseGateConfig> {
    let scale = frequency_scale(domain);
    let mut gate = PulseGateConfig::gaussian(
        cfg.pm_sigma_ghz / cfg.sigma_nu_ghz * scale,
        cfg.pump_sigma_ghz / cfg.sigma_nu_ghz * scale,
    )?;
    gate.length = cfg.length_mm;
    gate.coupling = cfg.coupling;
    gate.validate()?;
    Ok(gate)
}

/// Experiment specification in normalized units.
pub fn experiment_spec(cfg: &RunConfig, domain: Domain) -> Result<ExperimentSpec> {
    let gate = match cfg.scheme {
        Scheme::PulseGate => Some(normalized_gate(cfg, domain)?),
        _ => None,
    };
    Ok(ExperimentSpec {
        separations: cfg.separation_grid(),
        totals: cfg.totals.clone(),
        trials: cfg.trials,
        scheme: cfg.scheme,
        domain,
        seed: cfg.seed,
        sigma: 1.0,
        gate,
        estimator: cfg.estimator,
        bins: cfg.bins,
        bin_margin: cfg.bin_margin,
    })
}

/// Fit the tomography model from noiseless synthetic calibration data
/// generated by the spec's own outcome model.
pub fn synthetic_calibration(spec: &ExperimentSpec, grid: &[f64], basis: usize) -> Result<CalibrationFit> {
    let mut freqs = Vec::with_capacity(grid.len());
    for &s in grid {
        let p = spec.model_probs(s)?;
        freqs.push([p[0], p[1], p[2]]);
    }
    let cal = CalibrationSet::from_model_probs(grid.to_vec(), freqs)?;
    Ok(fit_coefficients(&cal, spec.sigma, basis)?)
}

/// Memoized outcome-model evaluation keyed on the separation bits. The
/// gate model runs a nested quadrature per call, and bound tables revisit
/// the same stencil points once per photon total.
pub struct MemoProbs<'a> {
    spec: &'a ExperimentSpec,
    cache: RefCell<HashMap<u64, Vec<f64>>>,
}

impl<'a> MemoProbs<'a> {
    pub fn new(spec: &'a ExperimentSpec) -> Self {
        MemoProbs { spec, cache: RefCell::new(HashMap::new()) }
    }

    /// Evaluate (propagating errors) and cache.
    pub fn fetch(&self, s: f64) -> Result<Vec<f64>> {
        if let Some(hit) = self.cache.borrow().get(&s.to_bits()) {
            return Ok(hit.clone());
        }
        let probs = self.spec.model_probs(s)?;
        self.cache.borrow_mut().insert(s.to_bits(), probs.clone());
        Ok(probs)
    }

    /// Populate the cache with every point a central-difference Fisher
    /// evaluation will touch on `grid`.
    pub fn prefill_stencil(&self, grid: &[f64], sigma: f64) -> Result<()> {
        let h = MODEL_FI_STEP * sigma;
        for &s in grid {
            if s < h {
                continue;
            }
            self.fetch(s - h)?;
            self.fetch(s)?;
            self.fetch(s + h)?;
        }
        Ok(())
    }

    /// Infallible view for `fisher_model` closures; panics on a cache miss,
    /// so call [`MemoProbs::prefill_stencil`] first.
    pub fn cached(&self, s: f64) -> Vec<f64> {
        self.cache
            .borrow()
            .get(&s.to_bits())
            .unwrap_or_else(|| panic!("model cache miss at s = {s}"))
            .clone()
    }
}

/// Install the requested rayon pool size once per process; 0 keeps the
/// library default. Later calls with a different size are ignored by
/// rayon, which is fine for a single-command process.
pub fn configure_threads(threads: usize) {
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

/// The estimator label used in output headers.
pub fn estimator_label(kind: EstimatorKind) -> &'static str {
    crate::config::estimator_name(kind)
}
