//! `calibrate` and `estimate`: fit a tomography model from calibration
//! data, and turn one count record into a separation estimate.

use std::path::{Path, PathBuf};

use tf_superres_core::tomography::{fit_coefficients, CalibrationSet, CountRecord, TomographyModel};

use crate::config::{domain_name, RunConfig};
use crate::csvio::read_calibration;
use crate::error::{CliError, Result};

/// Fit coefficients from a calibration CSV with columns
/// `separation, f0, f1, f2` (separations in units of σ) and write the
/// model JSON. Prints residuals and the smallest singular value.
pub fn run_calibrate(cfg: &RunConfig, data: &Path, out: &Path) -> Result<PathBuf> {
    super::ensure_out_dir(out)?;
    let (separations, frequencies) = read_calibration(data)?;
    let cal = CalibrationSet::from_model_probs(separations, frequencies)?;
    let fit = fit_coefficients(&cal, 1.0, cfg.basis_size)?;
    println!(
        "calibrated {} outputs on {} separations (basis size {})",
        fit.model.coefficients.len(),
        cal.len(),
        cfg.basis_size
    );
    println!(
        "fit residual RMS per output: [{:.3e}, {:.3e}, {:.3e}]",
        fit.residual_rms[0], fit.residual_rms[1], fit.residual_rms[2]
    );
    println!("smallest singular value: {:.6e}", fit.smallest_singular_value);

    let model_path = out.join("model.json");
    super::write_text(&model_path, &fit.model.to_json())?;
    println!("model written to {}", model_path.display());
    Ok(model_path)
}

/// Estimate the separation behind one `(n0, n1, n2)` record using a fitted
/// model, printing the value in units of σ and in physical units together
/// with a curvature-based standard error.
pub fn run_estimate(cfg: &RunConfig, model_path: &Path, counts: [u64; 3]) -> Result<f64> {
    let text = std::fs::read_to_string(model_path).map_err(|e| CliError::io(model_path, e))?;
    let model = TomographyModel::from_json(&text)?;
    let record = CountRecord::new(counts[0], counts[1], counts[2]);
    let estimate = model.ml_estimate(&record)?;

    let s_over_sigma = estimate.separation / model.sigma;
    let sigma_phys = cfg.sigma_physical(cfg.domain);
    let unit = cfg.physical_unit(cfg.domain);
    println!("counts: n0 = {}, n1 = {}, n2 = {}", counts[0], counts[1], counts[2]);
    println!("s_hat = {:.6} sigma", s_over_sigma);
    println!(
        "      = {:.6} {unit} ({} domain, sigma = {:.6} {unit})",
        s_over_sigma * sigma_phys,
        domain_name(cfg.domain),
        sigma_phys
    );
    match model.curvature_std_error(&record, estimate.separation) {
        Some(se) => println!("std error (likelihood curvature) = {:.6} sigma", se / model.sigma),
        None => println!("std error (likelihood curvature) = n/a at a boundary estimate"),
    }
    if estimate.at_upper_bound {
        println!("warning: estimate sits at the upper search bound");
    }
    Ok(estimate.separation)
}
