//! `simulate`: the generic experiment runner for the configured scheme,
//! estimator and domain, with an optional attenuation sweep.

use std::path::{Path, PathBuf};

use tf_superres_core::montecarlo::{compare_bounds, run_experiment, EstimatorKind, Scheme};
use tf_superres_core::tomography::TomographyModel;

use crate::config::{domain_name, estimator_name, scheme_name, RunConfig};
use crate::csvio::{fmt_bool, fmt_f64, Table};
use crate::error::Result;
use crate::pipeline::{experiment_spec, synthetic_calibration, MemoProbs};

pub fn run_simulate(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    super::ensure_out_dir(out)?;
    let domain = cfg.domain;
    let base_spec = experiment_spec(cfg, domain)?;

    let model: Option<TomographyModel> = match (cfg.scheme, cfg.estimator) {
        (Scheme::DirectSpectrometer, _) => None,
        (_, EstimatorKind::MaxLikelihood) => match cfg.scheme {
            Scheme::IdealHg => Some(TomographyModel::ideal(1.0, cfg.basis_size)?),
            Scheme::PulseGate => {
                let fit =
                    synthetic_calibration(&base_spec, &cfg.calibration_grid(), cfg.basis_size)?;
                println!(
                    "calibration residual RMS = [{:.3e}, {:.3e}, {:.3e}], smallest singular value = {:.3e}",
                    fit.residual_rms[0],
                    fit.residual_rms[1],
                    fit.residual_rms[2],
                    fit.smallest_singular_value
                );
                Some(fit.model)
            }
            Scheme::DirectSpectrometer => unreachable!(),
        },
        _ => None,
    };

    let sigma_phys = cfg.sigma_physical(domain);
    let mut table = Table::new(
        vec![
            "simulated estimator statistics (normalized units: sigma = 1)".into(),
            format!("scheme = {}", scheme_name(cfg.scheme)),
            format!("estimator = {}", estimator_name(cfg.estimator)),
            format!("domain = {}", domain_name(domain)),
            format!("sigma = {} {}", fmt_f64(sigma_phys), cfg.physical_unit(domain)),
            format!("seed = {}", cfg.seed),
        ],
        vec![
            "attenuation".into(),
            "s_over_sigma".into(),
            "s_physical".into(),
            "n_total".into(),
            "trials".into(),
            "mean_estimate".into(),
            "variance".into(),
            "mse".into(),
            "clamp_rate".into(),
            "std_crlb".into(),
            "quantum_limit".into(),
            "model_crlb".into(),
            "below_standard".into(),
            "suspicious".into(),
        ],
    );

    let memo = MemoProbs::new(&base_spec);
    memo.prefill_stencil(&cfg.separation_grid(), 1.0)?;

    for &attenuation in &cfg.attenuation {
        let mut spec = base_spec.clone();
        spec.totals = cfg
            .totals
            .iter()
            .map(|&n| ((n as f64 * attenuation).round() as u64).max(1))
            .collect();
        let stats = run_experiment(&spec, model.as_ref())?;
        let comparison = compare_bounds(&stats, |s| Ok(memo.cached(s)), 1.0)?;
        for (cell, row) in stats.cells.iter().zip(&comparison.rows) {
            table.push_row(vec![
                fmt_f64(attenuation),
                fmt_f64(cell.separation),
                fmt_f64(cell.separation * sigma_phys),
                cell.total.to_string(),
                cell.trials.to_string(),
                fmt_f64(cell.mean),
                fmt_f64(cell.variance),
                fmt_f64(cell.mse),
                fmt_f64(cell.clamp_rate),
                fmt_f64(row.std_crlb),
                fmt_f64(row.quantum_limit),
                fmt_f64(row.model_crlb),
                fmt_bool(row.below_standard),
                fmt_bool(row.suspicious),
            ]);
        }
    }

    let csv_path = out.join("simulate.csv");
    table.write_to(&csv_path)?;
    Ok(vec![csv_path])
}
