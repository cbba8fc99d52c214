//! Run configuration: a flat, typed key-value file with explicit unit
//! suffixes. Unknown keys are rejected and the canonical serialization
//! round-trips losslessly through the parser.
//!
//! ```text
//! scheme = pulse_gate
//! sigma_nu = 182 GHz
//! pm_sigma = 28 GHz
//! totals = 5000, 10000, 20000
//! ```

use std::fmt::Write as _;
use std::path::Path;

use tf_superres_core::montecarlo::{Domain, EstimatorKind, Scheme};

use crate::error::{CliError, Result};

/// All tunable run parameters with paper-device defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheme: Scheme,
    pub domain: Domain,
    pub seed: u64,
    pub trials: u32,
    pub totals: Vec<u64>,
    /// Number of separations on the grid `[0, separation_max]`.
    pub separation_points: usize,
    /// Largest programmed separation, units of σ.
    pub separation_max: f64,
    pub estimator: EstimatorKind,
    /// Signal RMS intensity bandwidth, GHz.
    pub sigma_nu_ghz: f64,
    /// Pump bandwidth, GHz.
    pub pump_sigma_ghz: f64,
    /// Phasematching bandwidth, GHz.
    pub pm_sigma_ghz: f64,
    /// Walkoff in ps, when the device is specified that way.
    pub walkoff_ps: Option<f64>,
    /// Waveguide length, mm.
    pub length_mm: f64,
    pub coupling: f64,
    /// Spectrometer bins (direct scheme).
    pub bins: usize,
    /// Spectrometer half-range beyond 𝔰/2, units of σ.
    pub bin_margin: f64,
    /// Tomography basis size M.
    pub basis_size: usize,
    /// Synthetic calibration grid size on `[0, separation_max]`.
    pub calibration_points: usize,
    /// Emit SVG plots next to the CSV files.
    pub svg: bool,
    /// Worker threads (0 = library default).
    pub threads: usize,
    /// Optional intensity attenuation sweep for `simulate`.
    pub attenuation: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scheme: Scheme::PulseGate,
            domain: Domain::Frequency,
            seed: 20180531,
            trials: 60,
            totals: vec![5_000, 10_000, 20_000],
            separation_points: 20,
            separation_max: 2.0,
            estimator: EstimatorKind::MaxLikelihood,
            sigma_nu_ghz: 182.0,
            pump_sigma_ghz: 182.0,
            pm_sigma_ghz: 28.0,
            walkoff_ps: None,
            length_mm: 17.0,
            coupling: 1.0,
            bins: 512,
            bin_margin: 8.0,
            basis_size: 4,
            calibration_points: 41,
            svg: true,
            threads: 0,
            attenuation: vec![1.0],
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut walkoff_given = false;
        let mut pm_sigma_given = false;
        let mut seen: Vec<String> = Vec::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {line_no}: expected 'key = value', got '{line}'"))
            })?;
            let key = key.trim();
            let value = value.trim();
            if seen.iter().any(|k| k == key) {
                return Err(CliError::Config(format!("line {line_no}: duplicate key '{key}'")));
            }
            seen.push(key.to_string());
            let err = |msg: String| CliError::Config(format!("line {line_no}: {key}: {msg}"));
            match key {
                "scheme" => cfg.scheme = parse_scheme(value).map_err(err)?,
                "domain" => cfg.domain = parse_domain(value).map_err(err)?,
                "seed" => cfg.seed = value.parse().map_err(|e| err(format!("{e}")))?,
                "trials" => cfg.trials = value.parse().map_err(|e| err(format!("{e}")))?,
                "totals" => cfg.totals = parse_list(value).map_err(err)?,
                "separation_points" => {
                    cfg.separation_points = value.parse().map_err(|e| err(format!("{e}")))?
                }
                "separation_max" => {
                    cfg.separation_max = parse_bare_f64(value).map_err(err)?
                }
                "estimator" => cfg.estimator = parse_estimator(value).map_err(err)?,
                "sigma_nu" => cfg.sigma_nu_ghz = parse_quantity(value, &GHZ).map_err(err)?,
                "pump_sigma" => cfg.pump_sigma_ghz = parse_quantity(value, &GHZ).map_err(err)?,
                "pm_sigma" => {
                    cfg.pm_sigma_ghz = parse_quantity(value, &GHZ).map_err(err)?;
                    pm_sigma_given = true;
                }
                "walkoff" => {
                    cfg.walkoff_ps = Some(parse_quantity(value, &PS).map_err(err)?);
                    walkoff_given = true;
                }
                "length" => cfg.length_mm = parse_quantity(value, &MM).map_err(err)?,
                "coupling" => cfg.coupling = parse_bare_f64(value).map_err(err)?,
                "bins" => cfg.bins = value.parse().map_err(|e| err(format!("{e}")))?,
                "bin_margin" => cfg.bin_margin = parse_bare_f64(value).map_err(err)?,
                "basis_size" => cfg.basis_size = value.parse().map_err(|e| err(format!("{e}")))?,
                "calibration_points" => {
                    cfg.calibration_points = value.parse().map_err(|e| err(format!("{e}")))?
                }
                "svg" => cfg.svg = parse_bool(value).map_err(err)?,
                "threads" => cfg.threads = value.parse().map_err(|e| err(format!("{e}")))?,
                "attenuation" => cfg.attenuation = parse_f64_list(value).map_err(err)?,
                _ => return Err(CliError::Config(format!("line {line_no}: unknown key '{key}'"))),
            }
        }
        if walkoff_given && !pm_sigma_given {
            // σ_PM ≈ 0.18/Δ, expressed in GHz
            cfg.pm_sigma_ghz = 1000.0 * 0.18 / cfg.walkoff_ps.unwrap();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.separation_points < 2 {
            return Err(CliError::Config("separation_points must be >= 2".into()));
        }
        if !(self.separation_max > 0.0) {
            return Err(CliError::Config("separation_max must be > 0".into()));
        }
        if self.totals.is_empty() {
            return Err(CliError::Config("totals must be nonempty".into()));
        }
        if !(self.sigma_nu_ghz > 0.0 && self.pump_sigma_ghz > 0.0 && self.pm_sigma_ghz > 0.0) {
            return Err(CliError::Config("bandwidths must be > 0".into()));
        }
        if let Some(w) = self.walkoff_ps {
            let derived = 1000.0 * 0.18 / w;
            if (self.pm_sigma_ghz - derived).abs() > 1e-9 * derived {
                return Err(CliError::Config(format!(
                    "pm_sigma {} GHz inconsistent with walkoff {} ps (expected {} GHz)",
                    self.pm_sigma_ghz, w, derived
                )));
            }
        }
        if self.attenuation.iter().any(|a| !(*a > 0.0 && *a <= 1.0)) {
            return Err(CliError::Config("attenuation factors must be in (0, 1]".into()));
        }
        if self.calibration_points < self.basis_size + 1 {
            return Err(CliError::Config(format!(
                "calibration_points {} cannot determine {} basis functions",
                self.calibration_points,
                self.basis_size + 1
            )));
        }
        Ok(())
    }

    /// Canonical serialization; `parse(canonical(cfg)) == cfg`.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# tf-superres run configuration");
        let _ = writeln!(s, "scheme = {}", scheme_name(self.scheme));
        let _ = writeln!(s, "domain = {}", domain_name(self.domain));
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "totals = {}", join(&self.totals));
        let _ = writeln!(s, "separation_points = {}", self.separation_points);
        let _ = writeln!(s, "separation_max = {}", self.separation_max);
        let _ = writeln!(s, "estimator = {}", estimator_name(self.estimator));
        let _ = writeln!(s, "sigma_nu = {} GHz", self.sigma_nu_ghz);
        let _ = writeln!(s, "pump_sigma = {} GHz", self.pump_sigma_ghz);
        let _ = writeln!(s, "pm_sigma = {} GHz", self.pm_sigma_ghz);
        if let Some(w) = self.walkoff_ps {
            let _ = writeln!(s, "walkoff = {} ps", w);
        }
        let _ = writeln!(s, "length = {} mm", self.length_mm);
        let _ = writeln!(s, "coupling = {}", self.coupling);
        let _ = writeln!(s, "bins = {}", self.bins);
        let _ = writeln!(s, "bin_margin = {}", self.bin_margin);
        let _ = writeln!(s, "basis_size = {}", self.basis_size);
        let _ = writeln!(s, "calibration_points = {}", self.calibration_points);
        let _ = writeln!(s, "svg = {}", self.svg);
        let _ = writeln!(s, "threads = {}", self.threads);
        let _ = writeln!(s, "attenuation = {}", join(&self.attenuation));
        s
    }

    /// Separation grid in units of σ, including zero.
    pub fn separation_grid(&self) -> Vec<f64> {
        let n = self.separation_points;
        (0..n).map(|i| self.separation_max * i as f64 / (n - 1) as f64).collect()
    }

    /// Synthetic calibration grid in units of σ.
    pub fn calibration_grid(&self) -> Vec<f64> {
        let n = self.calibration_points;
        (0..n).map(|i| self.separation_max * i as f64 / (n - 1) as f64).collect()
    }

    /// Point-spread width in the physical unit of `domain`:
    /// GHz for frequency, ps for time (transform-limited `1/(4πσ_ν)`).
    pub fn sigma_physical(&self, domain: Domain) -> f64 {
        match domain {
            Domain::Frequency => self.sigma_nu_ghz,
            Domain::Time => 1.0 / (4.0 * std::f64::consts::PI * self.sigma_nu_ghz * 1e-3),
        }
    }

    pub fn physical_unit(&self, domain: Domain) -> &'static str {
        match domain {
            Domain::Frequency => "GHz",
            Domain::Time => "ps",
        }
    }
}

struct Unit {
    canonical: &'static str,
    accepted: &'static [(&'static str, f64)],
}

const GHZ: Unit = Unit { canonical: "GHz", accepted: &[("GHz", 1.0), ("THz", 1000.0)] };
const PS: Unit = Unit { canonical: "ps", accepted: &[("ps", 1.0), ("fs", 1e-3)] };
const MM: Unit = Unit { canonical: "mm", accepted: &[("mm", 1.0)] };

fn parse_quantity(value: &str, unit: &Unit) -> std::result::Result<f64, String> {
    let mut parts = value.split_whitespace();
    let number: f64 = parts
        .next()
        .ok_or_else(|| "missing value".to_string())?
        .parse()
        .map_err(|e| format!("{e}"))?;
    let suffix = parts.next().ok_or_else(|| {
        format!("missing unit suffix (expected {})", unit.canonical)
    })?;
    if parts.next().is_some() {
        return Err("trailing tokens after unit".into());
    }
    for (name, factor) in unit.accepted {
        if suffix.eq_ignore_ascii_case(name) {
            return Ok(number * factor);
        }
    }
    Err(format!("unknown unit '{suffix}' (expected {})", unit.canonical))
}

fn parse_bare_f64(value: &str) -> std::result::Result<f64, String> {
    value.parse().map_err(|e| format!("{e}"))
}

fn parse_bool(value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(format!("expected true or false, got '{other}'")),
    }
}

fn parse_list(value: &str) -> std::result::Result<Vec<u64>, String> {
    value.split(',').map(|v| v.trim().parse().map_err(|e| format!("{e}"))).collect()
}

fn parse_f64_list(value: &str) -> std::result::Result<Vec<f64>, String> {
    value.split(',').map(|v| v.trim().parse().map_err(|e| format!("{e}"))).collect()
}

fn parse_scheme(value: &str) -> std::result::Result<Scheme, String> {
    match value {
        "pulse_gate" => Ok(Scheme::PulseGate),
        "ideal_hg" => Ok(Scheme::IdealHg),
        "direct_spectrometer" => Ok(Scheme::DirectSpectrometer),
        other => Err(format!("unknown scheme '{other}'")),
    }
}

pub fn parse_domain(value: &str) -> std::result::Result<Domain, String> {
    match value {
        "frequency" | "freq" => Ok(Domain::Frequency),
        "time" => Ok(Domain::Time),
        other => Err(format!("unknown domain '{other}'")),
    }
}

fn parse_estimator(value: &str) -> std::result::Result<EstimatorKind, String> {
    match value {
        "ml" => Ok(EstimatorKind::MaxLikelihood),
        "raw" => Ok(EstimatorKind::Raw),
        "corrected" => Ok(EstimatorKind::Corrected),
        other => Err(format!("unknown estimator '{other}'")),
    }
}

pub fn scheme_name(s: Scheme) -> &'static str {
    match s {
        Scheme::PulseGate => "pulse_gate",
        Scheme::IdealHg => "ideal_hg",
        Scheme::DirectSpectrometer => "direct_spectrometer",
    }
}

pub fn domain_name(d: Domain) -> &'static str {
    match d {
        Domain::Frequency => "frequency",
        Domain::Time => "time",
    }
}

pub fn estimator_name(e: EstimatorKind) -> &'static str {
    match e {
        EstimatorKind::MaxLikelihood => "ml",
        EstimatorKind::Raw => "raw",
        EstimatorKind::Corrected => "corrected",
    }
}

fn join<T: std::fmt::Display>(values: &[T]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}
