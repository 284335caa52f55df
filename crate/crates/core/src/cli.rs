//! Run configuration, CSV output and plot-script generation for the `vheat`
//! binary.
//!
//! Config files are JSON; see `book/src/cli.md` for the schema. Resolution
//! order for grid sizes is command-line flags, then the config, then the
//! defaults (`n_modes = 512`, `n_points = 1024`).

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fd_oracle::{fd_solve, OracleConfig};
use crate::model::MaterialParams;
use crate::profile::{PiecewiseProfile, Segment};
use crate::spectral_field::{build_grid, l2_difference, solve_field, FieldSnapshot, InitialRate};

pub const DEFAULT_MODES: usize = 512;
pub const DEFAULT_POINTS: usize = 1024;

fn default_modes() -> usize {
    DEFAULT_MODES
}

fn default_points() -> usize {
    DEFAULT_POINTS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_modes")]
    pub n_modes: usize,
    #[serde(default = "default_points")]
    pub n_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n_modes: DEFAULT_MODES, n_points: DEFAULT_POINTS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum S0Policy {
    #[default]
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot_script_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub material: MaterialParams,
    pub profile: Vec<Segment>,
    #[serde(default)]
    pub grid: GridConfig,
    pub times: Vec<f64>,
    #[serde(default)]
    pub s0: S0Policy,
    pub outputs: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<OracleConfig>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<PiecewiseProfile> {
        self.material.validate().map_err(|e| Error::Config(format!("material: {e}")))?;
        let profile =
            PiecewiseProfile::new(self.profile.clone()).map_err(|e| Error::Config(format!("profile: {e}")))?;
        let length = self.material.domain_length;
        if (profile.length() - length).abs() > 1e-12 * length {
            return Err(Error::Config(format!(
                "profile: must end at domain_length = {length}, ends at {}",
                profile.length()
            )));
        }
        if self.times.is_empty() {
            return Err(Error::Config("times must be nonempty".into()));
        }
        if let Some(t) = self.times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(Error::Config(format!("times: {t} is not a finite value >= 0")));
        }
        if let Some(w) = self.times.windows(2).find(|w| w[1] < w[0]) {
            return Err(Error::Config(format!("times must be sorted: {} follows {}", w[1], w[0])));
        }
        build_grid(length, self.grid.n_modes, self.grid.n_points).map_err(|e| Error::Config(format!("grid: {e}")))?;
        if let Some(cmp) = &self.compare {
            cmp.validate(&self.material).map_err(|e| Error::Config(format!("compare: {e}")))?;
        }
        Ok(profile)
    }

    /// Path of the oracle CSV next to the main one: `<stem>_fd.csv`.
    pub fn oracle_csv_path(&self) -> PathBuf {
        let p = &self.outputs.csv_path;
        let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        p.with_file_name(format!("{stem}_fd.csv"))
    }
}

pub fn parse_config(text: &[u8]) -> Result<RunConfig> {
    let text = std::str::from_utf8(text).map_err(|e| Error::Config(format!("not UTF-8: {e}")))?;
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            Error::Config(inner.to_string())
        } else {
            Error::Config(format!("{path}: {inner}"))
        }
    })?;
    config.validate()?;
    Ok(config)
}

pub fn serialize_config(config: &RunConfig) -> String {
    serde_json::to_string_pretty(config).expect("config serializes")
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub modes: Option<usize>,
    pub points: Option<usize>,
    pub force_compare: bool,
}

impl Overrides {
    pub fn apply(&self, mut config: RunConfig) -> Result<RunConfig> {
        if let Some(n) = self.modes {
            config.grid.n_modes = n;
        }
        if let Some(m) = self.points {
            config.grid.n_points = m;
        }
        if self.force_compare && config.compare.is_none() {
            config.compare = Some(OracleConfig::default());
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub snapshots: Vec<FieldSnapshot>,
    /// `(t, relative L2)` per requested time when comparing.
    pub comparison: Vec<(f64, f64)>,
    pub written: Vec<PathBuf>,
}

fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn render_csv(snapshots: &[FieldSnapshot], grid: &GridConfig, column: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# n_modes={}", grid.n_modes);
    let _ = writeln!(out, "# n_points={}", grid.n_points);
    let _ = writeln!(out, "t,x,{column}");
    for s in snapshots {
        for (x, v) in s.xs.iter().zip(&s.temps) {
            let _ = writeln!(out, "{},{},{}", fmt_num(s.t), fmt_num(*x), fmt_num(*v));
        }
    }
    out
}

/// Gnuplot script drawing one curve per time, x rescaled to 0..100.
pub fn render_plot_script(csv: &Path, times: &[f64], length: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "set datafile separator ','");
    let _ = writeln!(out, "set datafile commentschars '#t'");
    let _ = writeln!(out, "set xlabel 'system size [a.u.]'");
    let _ = writeln!(out, "set ylabel 'temperature [°C]'");
    let _ = writeln!(out, "set xrange [0:100]");
    let _ = writeln!(out, "set key top left");
    let _ = writeln!(out, "data = '{}'", csv.display());
    let curves: Vec<String> = times
        .iter()
        .map(|t| {
            format!(
                "data using ($2*100/{}):(abs($1-({}))<1e-12 ? $3 : 1/0) with lines title 't = {} s'",
                fmt_num(length),
                fmt_num(*t),
                t
            )
        })
        .collect();
    let _ = writeln!(out, "plot {}", curves.join(", \\\n     "));
    out
}

fn write_all(files: &[(PathBuf, String)]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (path, body) in files {
        if let Err(e) = fs::write(path, body) {
            let _ = fs::remove_file(path);
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))));
        }
        written.push(path.clone());
    }
    Ok(written)
}

/// Solves, compares and writes every artifact; nothing is written unless all
/// solves succeed, and a failed write removes what was already written.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    let profile = config.validate()?;
    let material = &config.material;
    let grid = build_grid(material.domain_length, config.grid.n_modes, config.grid.n_points)?;
    let s0 = match config.s0 {
        S0Policy::Zero => InitialRate::Zero,
    };
    let snapshots = solve_field(material, &profile, &grid, &config.times, &s0)?;

    let mut files = vec![(config.outputs.csv_path.clone(), render_csv(&snapshots, &config.grid, "temperature"))];
    let mut comparison = Vec::new();
    if let Some(oracle) = &config.compare {
        let raw = fd_solve(material, &profile, oracle, &config.times)?;
        let xs = grid.positions();
        let mut on_grid = Vec::with_capacity(raw.len());
        for (fd, sp) in raw.iter().zip(&snapshots) {
            let fd = fd.resample(&xs, material.domain_length)?;
            comparison.push((sp.t, l2_difference(sp, &fd)?));
            on_grid.push(fd);
        }
        files.push((config.oracle_csv_path(), render_csv(&on_grid, &config.grid, "temperature_fd")));
    }
    if let Some(plot) = &config.outputs.plot_script_path {
        let script = render_plot_script(&config.outputs.csv_path, &config.times, material.domain_length);
        files.push((plot.clone(), script));
    }
    let written = write_all(&files)?;
    Ok(RunReport { snapshots, comparison, written })
}
