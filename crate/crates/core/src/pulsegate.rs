//! Quantum pulse gate model: phasematching, three-wave-mixing upconversion
//! probabilities, the closed-form projection ratio, and ratio estimators.
//!
//! A weak input pulse mixes with a shaped Hermite-Gauss pump inside a
//! group-velocity-matched waveguide; the upconverted power realizes a
//! projection onto the pump mode, blurred by the finite phasematching
//! bandwidth σ_PM imposed by the input/output group-velocity walkoff Δ.
//! Frequencies are THz, times ps, lengths mm throughout.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::modes::{HermiteGaussMode, SignalDomain};
use crate::quadrature::Grid;

/// Gaussian-approximation factor matching the sinc phasematching amplitude
/// half-maximum: `exp(-η x²/4) ≈ sinc(x/2)`.
pub const SINC_GAUSS_ETA: f64 = 0.193;

/// Walkoff-to-bandwidth constant in `σ_PM ≈ 0.18/Δ` (Δ in ps, σ_PM in THz).
pub const PM_BANDWIDTH_CONSTANT: f64 = 0.18;

/// Points per axis for the nested upconversion quadrature.
const GATE_POINTS: usize = 1025;

/// Window half-width in combined widths for the nested quadrature.
const GATE_PAD_WIDTHS: f64 = 10.0;

const TWO_PI: f64 = std::f64::consts::TAU;

/// Shape of the phasematching curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PmModel {
    /// Raw sinc phasematching of a uniform waveguide.
    Sinc,
    /// Gaussian approximation, valid once side lobes are filtered out.
    Gaussian,
}

/// Group slownesses `1/u` of the three interacting fields, ps/mm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slownesses {
    pub input: f64,
    pub pump: f64,
    pub output: f64,
}

/// Static description of one pulse-gate device and pump setting.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseGateConfig {
    /// Interaction length L, mm.
    pub length: f64,
    /// Group slownesses, when the device is specified at that level.
    pub slownesses: Option<Slownesses>,
    /// Walkoff Δ between input and upconverted pulses, ps.
    pub walkoff: Option<f64>,
    /// Phasematching shape.
    pub pm_model: PmModel,
    /// RMS phasematching bandwidth σ_PM, THz.
    pub pm_sigma: f64,
    /// Pump bandwidth σ₂, THz.
    pub pump_sigma: f64,
    /// Hermite-Gauss order of the pump shape (0, 1 or 2).
    pub pump_order: usize,
    /// Coupling scale θ; cancels in every ratio.
    pub coupling: f64,
}

impl PulseGateConfig {
    /// Gaussian-phasematched gate specified directly by σ_PM (THz).
    pub fn gaussian(pm_sigma: f64, pump_sigma: f64) -> Result<Self> {
        let cfg = PulseGateConfig {
            length: 17.0,
            slownesses: None,
            walkoff: None,
            pm_model: PmModel::Gaussian,
            pm_sigma,
            pump_sigma,
            pump_order: 0,
            coupling: 1.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Gaussian-phasematched gate with σ_PM derived from the walkoff (ps).
    pub fn from_walkoff(length: f64, walkoff: f64, pump_sigma: f64) -> Result<Self> {
        let pm_sigma = walkoff_to_pm_sigma(walkoff)?;
        let cfg = PulseGateConfig {
            length,
            slownesses: None,
            walkoff: Some(walkoff),
            pm_model: PmModel::Gaussian,
            pm_sigma,
            pump_sigma,
            pump_order: 0,
            coupling: 1.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sinc-phasematched gate specified by slownesses (ps/mm) and length (mm).
    pub fn sinc_from_slownesses(
        length: f64,
        slownesses: Slownesses,
        pump_sigma: f64,
    ) -> Result<Self> {
        let walkoff = 0.5 * length * (slownesses.input - slownesses.output);
        let pm_sigma = walkoff_to_pm_sigma(walkoff)?;
        let cfg = PulseGateConfig {
            length,
            slownesses: Some(slownesses),
            walkoff: Some(walkoff),
            pm_model: PmModel::Sinc,
            pm_sigma,
            pump_sigma,
            pump_order: 0,
            coupling: 1.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Same device with a different pump mode order.
    pub fn with_pump_order(&self, order: usize) -> Result<Self> {
        let mut cfg = self.clone();
        cfg.pump_order = order;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) {
            return Err(CoreError::Config(format!("length must be > 0, got {}", self.length)));
        }
        if !(self.pm_sigma > 0.0) || !(self.pump_sigma > 0.0) {
            return Err(CoreError::Config(format!(
                "pm_sigma and pump_sigma must be > 0, got {} and {}",
                self.pm_sigma, self.pump_sigma
            )));
        }
        if !(self.coupling > 0.0) {
            return Err(CoreError::Config(format!("coupling must be > 0, got {}", self.coupling)));
        }
        if self.pump_order > 2 {
            return Err(CoreError::Config(format!(
                "pump order {} not supported (0..=2)",
                self.pump_order
            )));
        }
        if let Some(s) = &self.slownesses {
            // gating requires group-velocity matching of input and pump
            if (s.input - s.pump).abs() > 1e-12 * s.input.abs().max(1.0) {
                return Err(CoreError::Config(format!(
                    "input and pump slownesses must match for gating: {} vs {}",
                    s.input, s.pump
                )));
            }
        }
        if let Some(w) = self.walkoff {
            if !(w > 0.0) {
                return Err(CoreError::Config(format!("walkoff must be > 0, got {w}")));
            }
            let derived = PM_BANDWIDTH_CONSTANT / w;
            if (self.pm_sigma - derived).abs() > 1e-9 * derived {
                return Err(CoreError::Config(format!(
                    "pm_sigma {} inconsistent with walkoff {} (expected {})",
                    self.pm_sigma, w, derived
                )));
            }
        }
        Ok(())
    }
}

/// Gaussian input pulse: bandwidth σ_ν (THz), frequency offset δν (THz) from
/// the phasematched point, and delay δt (ps) relative to the pump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputSignal {
    pub sigma_nu: f64,
    pub delta_nu: f64,
    pub delta_t: f64,
}

impl InputSignal {
    pub fn new(sigma_nu: f64, delta_nu: f64, delta_t: f64) -> Result<Self> {
        if !(sigma_nu > 0.0) || !sigma_nu.is_finite() {
            return Err(CoreError::Domain(format!("sigma_nu must be > 0, got {sigma_nu}")));
        }
        if !delta_nu.is_finite() || !delta_t.is_finite() {
            return Err(CoreError::Domain("offsets must be finite".into()));
        }
        Ok(InputSignal { sigma_nu, delta_nu, delta_t })
    }
}

/// RMS phasematching bandwidth imposed by a walkoff Δ: `σ_PM ≈ 0.18/Δ`
/// (Δ in ps gives σ_PM in THz).
pub fn walkoff_to_pm_sigma(walkoff: f64) -> Result<f64> {
    if !(walkoff > 0.0) || !walkoff.is_finite() {
        return Err(CoreError::Domain(format!("walkoff must be > 0, got {walkoff}")));
    }
    Ok(PM_BANDWIDTH_CONSTANT / walkoff)
}

/// Phasematching amplitude at output detuning `nu3` (THz), peak-normalized
/// to the interaction length.
///
/// With the input and pump group-velocity matched the sinc curve collapses
/// to a function of the output frequency alone, `L·sinc(2πΔν̃₃)`; the
/// Gaussian model is `L·exp(-ν̃₃²/4σ_PM²)`.
pub fn phasematching_amplitude(config: &PulseGateConfig, nu3: f64) -> Result<f64> {
    match config.pm_model {
        PmModel::Gaussian => {
            let u = nu3 / (2.0 * config.pm_sigma);
            Ok(config.length * (-u * u).exp())
        }
        PmModel::Sinc => {
            if config.slownesses.is_none() {
                return Err(CoreError::Config(
                    "sinc phasematching requires group slownesses".into(),
                ));
            }
            let walkoff = config.walkoff.expect("walkoff derived from slownesses");
            Ok(config.length * sinc(TWO_PI * walkoff * nu3))
        }
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Relative upconversion probability `P = ∫|γ(ν̃₃)|² dν̃₃` for the configured
/// pump order, with the upconverted amplitude
/// `γ(ν̃₃) = θ ∫ dν̃₁ H(ν̃₃) α(ν̃₃-ν̃₁) ψ(ν̃₁)` evaluated by nested trapezoid
/// quadrature (1025 points per axis, windows spanning ten combined widths
/// around the product-Gaussian centers). The delay enters as the phase
/// `exp(-i2πν̃₁δt)` in the complex inner integral. Only ratios of these
/// values are physically meaningful.
pub fn upconversion_prob(config: &PulseGateConfig, signal: &InputSignal) -> Result<f64> {
    config.validate()?;
    let pump = HermiteGaussMode::new(
        config.pump_order,
        0.0,
        config.pump_sigma,
        SignalDomain::Frequency,
    )?;
    let sn = signal.sigma_nu;
    let s2 = config.pump_sigma;
    let dn = signal.delta_nu;
    let dt = signal.delta_t;
    let norm = (2.0 * std::f64::consts::PI * sn * sn).powf(-0.25);

    // inner product-Gaussian bookkeeping: α(ν₃-ν₁) has amplitude curvature
    // a = 1/4σ₂², ψ(ν₁) has b = 1/4σν² and is centered at -δν
    let a = 1.0 / (4.0 * s2 * s2);
    let b = 1.0 / (4.0 * sn * sn);
    let inner_width = (1.0 / (a + b)).sqrt();

    let inner = |nu3: f64| -> Complex64 {
        let center = (a * nu3 - b * dn) / (a + b);
        let grid = Grid::covering(&[center], GATE_PAD_WIDTHS * inner_width, GATE_POINTS);
        grid.integrate_complex(|nu1| {
            let envelope = pump.amplitude(nu3 - nu1)
                * norm
                * (-(nu1 + dn) * (nu1 + dn) / (4.0 * sn * sn)).exp();
            let phase = -TWO_PI * nu1 * dt;
            Complex64::new(envelope * phase.cos(), envelope * phase.sin())
        })
    };

    // outer window: |γ|² is the product of the |H|² envelope (std σ_PM for
    // the Gaussian model) and the inner-transform envelope |g|²
    // (std √(σν²+σ₂²) centered at -δν)
    let sig_g = (sn * sn + s2 * s2).sqrt();
    let grid = match config.pm_model {
        PmModel::Gaussian => {
            let pm = config.pm_sigma;
            let inv = 1.0 / (pm * pm) + 1.0 / (sig_g * sig_g);
            let width = (1.0 / inv).sqrt();
            let center = -dn * (1.0 / (sig_g * sig_g)) / inv;
            Grid::covering(&[center], GATE_PAD_WIDTHS * width, GATE_POINTS)
        }
        // sinc tails ring across the whole inner envelope
        PmModel::Sinc => Grid::covering(
            &[-dn, 0.0],
            GATE_PAD_WIDTHS * (sig_g + config.pm_sigma),
            GATE_POINTS,
        ),
    };

    let theta2 = config.coupling * config.coupling;
    let (prob, tail) = grid.integrate_checked(|nu3| {
        let h = phasematching_amplitude(config, nu3).expect("config validated above");
        let g = inner(nu3);
        theta2 * h * h * g.norm_sqr()
    });
    if tail > 1e-8 {
        return Err(CoreError::Accuracy(format!(
            "upconversion window too small: tail fraction {tail:.2e}"
        )));
    }
    Ok(prob)
}

/// Relative upconversion probabilities for pump orders 0, 1 and 2.
pub fn projection_probs(config: &PulseGateConfig, signal: &InputSignal) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for (order, slot) in out.iter_mut().enumerate() {
        *slot = upconversion_prob(&config.with_pump_order(order)?, signal)?;
    }
    Ok(out)
}

/// Exact closed form of the first-order projection ratio `P₁/P₀` for a
/// Gaussian-phasematched gate:
///
/// ```text
/// σ₂² [ (σν²(1+16π²δt²σν²) + σ₂²)/(σν²+σ₂²)²
///       + (δν² - σν² - σ₂² - σ_PM²)/(σν²+σ₂²+σ_PM²)² ]
/// ```
///
/// Frequencies and times must be in reciprocal units (THz with ps). With
/// `σ₂ = σν` this reduces to
/// `σ_PM²/(2(2σν²+σ_PM²)) + 4π²δt²σν² + δν²σν²/(2σν²+σ_PM²)²`, and for
/// `σν² ≫ σ_PM²` to the estimator form
/// `σ_PM²/4σν² + δt²/4σ_t² + δν²/4σν²`.
pub fn closed_form_ratio(
    sigma_nu: f64,
    sigma2: f64,
    pm_sigma: f64,
    delta_nu: f64,
    delta_t: f64,
) -> f64 {
    let sn2 = sigma_nu * sigma_nu;
    let s22 = sigma2 * sigma2;
    let pm2 = pm_sigma * pm_sigma;
    let first = (sn2 * (1.0 + 16.0 * std::f64::consts::PI.powi(2) * delta_t * delta_t * sn2)
        + s22)
        / (sn2 + s22).powi(2);
    let second = (delta_nu * delta_nu - sn2 - s22 - pm2) / (sn2 + s22 + pm2).powi(2);
    s22 * (first + second)
}

/// Approximate symmetric ratio (the broadband limit of
/// [`closed_form_ratio`]): `σ_PM²/4σν² + δt²/4σ_t² + δν²/4σν²` with the
/// transform-limited width `σ_t = 1/(4πσν)`.
pub fn eq6_ratio(sigma_nu: f64, pm_sigma: f64, delta_nu: f64, delta_t: f64) -> f64 {
    let sigma_t = 1.0 / (4.0 * std::f64::consts::PI * sigma_nu);
    pm_sigma * pm_sigma / (4.0 * sigma_nu * sigma_nu)
        + delta_t * delta_t / (4.0 * sigma_t * sigma_t)
        + delta_nu * delta_nu / (4.0 * sigma_nu * sigma_nu)
}

/// Extinction ratio in dB, `-10 log₁₀(P₁/P₀)`, conventionally quoted at
/// zero separation.
pub fn extinction_ratio_db(ratio: f64) -> f64 {
    -10.0 * ratio.log10()
}

/// Uncorrected separation estimator `ŝ = 4σ√(P₁/P₀)`.
pub fn raw_estimator(p1: f64, p0: f64, sigma: f64) -> Result<f64> {
    if !(p0 > 0.0) {
        return Err(CoreError::Domain(format!("P₀ must be > 0, got {p0}")));
    }
    if !(p1 >= 0.0) {
        return Err(CoreError::Domain(format!("P₁ must be >= 0, got {p1}")));
    }
    Ok(4.0 * sigma * (p1 / p0).sqrt())
}

/// Floor-corrected estimator with its clamp flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectedEstimate {
    pub value: f64,
    /// The measured ratio fell below the phasematching floor and the
    /// estimate was clamped to zero.
    pub clamped: bool,
}

/// Selectivity-corrected estimator `ŝ = 4σ√(max(0, P₁/P₀ - σ_PM²/4σ²))`.
/// `pm_sigma` is the calibrated phasematching bandwidth in the same units
/// as `sigma`.
pub fn corrected_estimator(
    p1: f64,
    p0: f64,
    sigma: f64,
    pm_sigma: f64,
) -> Result<CorrectedEstimate> {
    if !(p0 > 0.0) {
        return Err(CoreError::Domain(format!("P₀ must be > 0, got {p0}")));
    }
    if !(p1 >= 0.0) {
        return Err(CoreError::Domain(format!("P₁ must be >= 0, got {p1}")));
    }
    let floor = pm_sigma * pm_sigma / (4.0 * sigma * sigma);
    let excess = p1 / p0 - floor;
    if excess <= 0.0 {
        Ok(CorrectedEstimate { value: 0.0, clamped: excess < 0.0 })
    } else {
        Ok(CorrectedEstimate { value: 4.0 * sigma * excess.sqrt(), clamped: false })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn walkoff_conversion() {
        assert_abs_diff_eq!(walkoff_to_pm_sigma(1.0).unwrap(), 0.18, epsilon = 1e-15);
        // paper device: 28 GHz from a 6.43 ps walkoff
        assert_relative_eq!(walkoff_to_pm_sigma(6.43).unwrap(), 0.028, max_relative = 1e-3);
        let s1 = walkoff_to_pm_sigma(2.0).unwrap();
        let s2 = walkoff_to_pm_sigma(4.0).unwrap();
        assert_abs_diff_eq!(s1, 2.0 * s2, epsilon = 1e-15);
        assert!(walkoff_to_pm_sigma(0.0).is_err());
        assert!(walkoff_to_pm_sigma(-1.0).is_err());
    }

    #[test]
    fn phasematching_peaks_at_length() {
        let g = PulseGateConfig::gaussian(0.028, 0.182).unwrap();
        assert_abs_diff_eq!(phasematching_amplitude(&g, 0.0).unwrap(), 17.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            phasematching_amplitude(&g, 2.0 * 0.028).unwrap(),
            17.0 * (-1.0_f64).exp(),
            epsilon = 1e-12
        );
        let s = PulseGateConfig::sinc_from_slownesses(
            17.0,
            Slownesses { input: 5.2, pump: 5.2, output: 5.2 + 2.0 * 6.43 / 17.0 },
            0.182,
        );
        // slownesses above give negative walkoff; flip ordering
        assert!(s.is_err());
        let s = PulseGateConfig::sinc_from_slownesses(
            17.0,
            Slownesses { input: 5.2 + 2.0 * 6.43 / 17.0, pump: 5.2 + 2.0 * 6.43 / 17.0, output: 5.2 },
            0.182,
        )
        .unwrap();
        assert_abs_diff_eq!(phasematching_amplitude(&s, 0.0).unwrap(), 17.0, epsilon = 1e-12);
    }

    #[test]
    fn sinc_needs_slownesses() {
        let mut cfg = PulseGateConfig::gaussian(0.028, 0.182).unwrap();
        cfg.pm_model = PmModel::Sinc;
        assert!(matches!(phasematching_amplitude(&cfg, 0.1), Err(CoreError::Config(_))));
    }

    #[test]
    fn mismatched_pump_slowness_is_rejected() {
        let r = PulseGateConfig::sinc_from_slownesses(
            17.0,
            Slownesses { input: 6.0, pump: 5.9, output: 5.2 },
            0.182,
        );
        assert!(matches!(r, Err(CoreError::Config(_))));
    }

    #[test]
    fn inconsistent_pm_sigma_and_walkoff_rejected() {
        let mut cfg = PulseGateConfig::from_walkoff(17.0, 6.43, 0.182).unwrap();
        cfg.pm_sigma *= 1.001;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn closed_form_reduces_to_floor_at_zero_offsets() {
        // paper parameters, any frequency unit
        let r = closed_form_ratio(182.0, 182.0, 28.0, 0.0, 0.0);
        let floor = 28.0_f64.powi(2) / (2.0 * (2.0 * 182.0_f64.powi(2) + 28.0_f64.powi(2)));
        assert_abs_diff_eq!(r, floor, epsilon = 1e-15);
        assert_relative_eq!(r, 0.005848, max_relative = 1e-4);
        assert_abs_diff_eq!(extinction_ratio_db(r), 22.33, epsilon = 5e-3);
    }

    #[test]
    fn closed_form_matches_eq6_limit() {
        // σ_PM = 0, δν = σν: ratio = 1/4 (𝔰 = 2σ through δν = 𝔰/2)
        let r = closed_form_ratio(1.0, 1.0, 0.0, 1.0, 0.0);
        assert_abs_diff_eq!(r, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn time_term_matches_transform_limited_width() {
        let sigma_nu = 0.182;
        let sigma_t = 1.0 / (4.0 * std::f64::consts::PI * sigma_nu);
        let dt = 0.3 * sigma_t;
        let r = closed_form_ratio(sigma_nu, sigma_nu, 0.0, 0.0, dt) as f64;
        assert_relative_eq!(r, dt * dt / (4.0 * sigma_t * sigma_t), max_relative = 1e-12);
        assert_relative_eq!(
            eq6_ratio(sigma_nu, 0.0, 0.0, dt),
            dt * dt / (4.0 * sigma_t * sigma_t),
            max_relative = 1e-12
        );
    }

    #[test]
    fn raw_estimator_examples() {
        assert_eq!(raw_estimator(0.0, 1.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(raw_estimator(1.0, 16.0, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(raw_estimator(0.005848, 1.0, 1.0).unwrap(), 0.306, max_relative = 1e-3);
        assert!(raw_estimator(0.1, 0.0, 1.0).is_err());
    }

    #[test]
    fn corrected_estimator_contract() {
        let floor = 0.25 * 0.028_f64.powi(2) / 0.182_f64.powi(2);
        let exact = corrected_estimator(floor, 1.0, 0.182, 0.028).unwrap();
        assert_eq!(exact.value, 0.0);
        assert!(!exact.clamped);
        // σ = 1 with the normalized floor recovers the Eq.-6 inversion exactly
        let pm_norm = 0.028 / 0.182;
        let inverted =
            corrected_estimator(pm_norm * pm_norm / 4.0 + 1.0 / 16.0, 1.0, 1.0, pm_norm).unwrap();
        assert_abs_diff_eq!(inverted.value, 1.0, epsilon = 1e-12);
        let below = corrected_estimator(0.5 * floor, 1.0, 0.182, 0.028).unwrap();
        assert_eq!(below.value, 0.0);
        assert!(below.clamped);
        assert!(corrected_estimator(0.1, 0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn upconversion_parity_in_offsets() {
        let cfg = PulseGateConfig::gaussian(0.154, 1.0).unwrap();
        let sigma_t = 1.0 / (4.0 * std::f64::consts::PI);
        for order in 0..=1 {
            let cfg = cfg.with_pump_order(order).unwrap();
            let p_pos = upconversion_prob(
                &cfg,
                &InputSignal::new(1.0, 0.4, 0.3 * sigma_t).unwrap(),
            )
            .unwrap();
            let p_neg = upconversion_prob(
                &cfg,
                &InputSignal::new(1.0, -0.4, -0.3 * sigma_t).unwrap(),
            )
            .unwrap();
            assert_relative_eq!(p_pos, p_neg, max_relative = 1e-10);
        }
    }

    #[test]
    fn near_ideal_gate_is_mode_selective() {
        let cfg = PulseGateConfig::gaussian(1e-6, 1.0).unwrap();
        let signal = InputSignal::new(1.0, 0.0, 0.0).unwrap();
        let p0 = upconversion_prob(&cfg.with_pump_order(0).unwrap(), &signal).unwrap();
        let p1 = upconversion_prob(&cfg.with_pump_order(1).unwrap(), &signal).unwrap();
        assert!(p1 / p0 < 1e-10, "P1/P0 = {:e}", p1 / p0);
    }
}
