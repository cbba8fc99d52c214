//! Subcommand implementations. Each command writes CSV first and then
//! derives any SVG from the re-parsed CSV, so plots are pure functions of
//! the emitted data.

mod bounds;
mod calibrate;
mod figures;
mod simulate;

pub use bounds::{bounds_plot, run_bounds};
pub use calibrate::{run_calibrate, run_estimate};
pub use figures::{fig2_plot, fig3_plot, run_fig2, run_fig3};
pub use simulate::run_simulate;

use std::path::Path;

use crate::error::{CliError, Result};

pub(crate) fn ensure_out_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
