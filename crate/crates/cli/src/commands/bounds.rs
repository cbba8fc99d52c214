//! `bounds`: tabulate the three variance bounds over the separation grid.

use std::path::{Path, PathBuf};

use tf_superres_core::fisher::{fisher_direct, fisher_model, quantum_limit_variance, MODEL_FI_STEP};

use crate::config::{domain_name, scheme_name, RunConfig};
use crate::csvio::{fmt_f64, Table};
use crate::error::Result;
use crate::pipeline::{experiment_spec, MemoProbs};
use crate::svg::{Plot, Scale, Series, PALETTE};

pub fn run_bounds(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    super::ensure_out_dir(out)?;
    let domain = cfg.domain;
    let spec = experiment_spec(cfg, domain)?;
    let photons = *cfg.totals.iter().max().expect("validated nonempty");
    let grid = cfg.separation_grid();

    let memo = MemoProbs::new(&spec);
    memo.prefill_stencil(&grid, 1.0)?;

    let quantum = quantum_limit_variance(1.0, photons);
    let mut table = Table::new(
        vec![
            "variance bounds for separation estimation (normalized units: sigma = 1)".into(),
            format!("domain = {}", domain_name(domain)),
            format!("scheme model for model_crlb = {}", scheme_name(cfg.scheme)),
            format!("photons = {photons}"),
            format!(
                "sigma = {} {}",
                fmt_f64(cfg.sigma_physical(domain)),
                cfg.physical_unit(domain)
            ),
            "columns: separation / sigma, variance bounds in sigma^2".into(),
        ],
        vec![
            "s_over_sigma".into(),
            "std_crlb".into(),
            "quantum_limit".into(),
            "model_crlb".into(),
        ],
    );

    for &s in &grid {
        let std_info = fisher_direct(s, 1.0, photons);
        let std_crlb = if std_info > 0.0 { 1.0 / std_info } else { f64::INFINITY };
        let model_crlb = if s < MODEL_FI_STEP {
            f64::INFINITY
        } else {
            let info = fisher_model(|x| memo.cached(x), s, 1.0, photons)?;
            if info > 0.0 {
                1.0 / info
            } else {
                f64::INFINITY
            }
        };
        table.push_row(vec![
            fmt_f64(s),
            fmt_f64(std_crlb),
            fmt_f64(quantum),
            fmt_f64(model_crlb),
        ]);
    }

    let csv_path = out.join("bounds.csv");
    table.write_to(&csv_path)?;
    let mut written = vec![csv_path.clone()];

    if cfg.svg {
        let reread = crate::csvio::read_table(&csv_path)?;
        let svg_path = out.join("bounds.svg");
        super::write_text(&svg_path, &bounds_plot(&reread)?.render())?;
        written.push(svg_path);
    }
    Ok(written)
}

/// Build the bounds plot from the emitted CSV.
pub fn bounds_plot(table: &Table) -> Result<Plot> {
    let s_col = table.column("s_over_sigma")?;
    let cols = [
        (table.column("std_crlb")?, "standard CRLB", PALETTE[0], false),
        (table.column("quantum_limit")?, "quantum limit", PALETTE[1], true),
        (table.column("model_crlb")?, "model CRLB", PALETTE[2], false),
    ];
    let mut plot = Plot::new(
        "Variance bounds vs separation",
        "separation / sigma",
        "variance bound (sigma^2)",
        Scale::Log,
    );
    for (col, label, color, dashed) in cols {
        let mut points = Vec::new();
        for row in 0..table.rows.len() {
            points.push((table.f64_at(row, s_col)?, table.f64_at(row, col)?));
        }
        plot.series.push(Series {
            label: label.to_string(),
            color,
            dashed,
            markers: false,
            line: true,
            points,
        });
    }
    Ok(plot)
}
