use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sphere_re::verify::{DEFAULT_DT, DEFAULT_T};
use sphere_re::{Masses, PotentialKind};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    EreScan,
    EreSolve,
    LreScan,
    LreSolve,
    Axis,
    Verify,
    EuclidLimit,
    ScaleneLreSearch,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::EreScan => "ere-scan",
            Mode::EreSolve => "ere-solve",
            Mode::LreScan => "lre-scan",
            Mode::LreSolve => "lre-solve",
            Mode::Axis => "axis",
            Mode::Verify => "verify",
            Mode::EuclidLimit => "euclid-limit",
            Mode::ScaleneLreSearch => "scalene-lre-search",
        }
    }

    /// Modes whose natural output is a table.
    pub fn tabular(self) -> bool {
        matches!(self, Mode::EreScan | Mode::LreScan | Mode::Verify)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Every setting a job can carry. Fields left unset take the defaults below;
/// values from the command line override those read from a config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct JobConfig {
    pub mode: Option<Mode>,
    pub masses: Option<[f64; 3]>,
    pub potential: Option<String>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub verify: Option<bool>,
    #[serde(rename = "T")]
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    /// Rows of the `(a, x)` scan.
    pub grid: Option<usize>,
    /// Columns of the `(a, x)` scan; twice `grid` when unset.
    pub x_grid: Option<usize>,
    pub raw: Option<bool>,
    /// `a,x` for meridian shapes or `σ12,σ23,σ31` for triangles.
    pub shape: Option<Vec<f64>>,
    pub sigma12_grid: Option<usize>,
    pub samples: Option<usize>,
    pub input: Option<PathBuf>,
    pub epsilon: Option<f64>,
    pub spacing: Option<[f64; 2]>,
    pub planar_state: Option<Vec<f64>>,
    pub resolution: Option<usize>,
    pub margin: Option<f64>,
    pub max_polish: Option<usize>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field; } )*
    };
}

impl JobConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::validation("bad_config", e.to_string()))
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: JobConfig) -> Self {
        overlay!(
            self, top, mode, masses, potential, output, format, verify, t_end, dt, grid, x_grid, raw, shape,
            sigma12_grid, samples, input, epsilon, spacing, planar_state, resolution, margin, max_polish
        );
        self
    }

    pub fn validate(self) -> Result<Job, CliError> {
        let mode = self
            .mode
            .ok_or_else(|| CliError::validation("missing_mode", "no subcommand given and no mode in the config"))?;
        let masses = Masses::new(self.masses.unwrap_or([1.0; 3]))?;
        let potential: PotentialKind = self.potential.as_deref().unwrap_or("cotangent").parse()?;
        let format = self.format.unwrap_or(if mode.tabular() { Format::Csv } else { Format::Json });
        if format == Format::Csv && !mode.tabular() {
            return Err(CliError::validation(
                "unsupported_format",
                format!("{} writes JSON only", mode.name()),
            ));
        }
        let t_end = self.t_end.unwrap_or(DEFAULT_T);
        let dt = self.dt.unwrap_or(DEFAULT_DT);
        positive("T", t_end)?;
        positive("dt", dt)?;
        let grid = self.grid.unwrap_or(720);
        let x_grid = self.x_grid.unwrap_or(2 * grid);
        let sigma12_grid = self.sigma12_grid.unwrap_or(512);
        let samples = self.samples.unwrap_or(2001);
        let resolution = self.resolution.unwrap_or(200);
        for (name, n) in [
            ("grid", grid),
            ("x-grid", x_grid),
            ("sigma12-grid", sigma12_grid),
            ("samples", samples),
            ("resolution", resolution),
        ] {
            if n < 2 {
                return Err(CliError::validation("bad_grid", format!("{name} needs at least 2 points, got {n}")));
            }
        }
        let epsilon = self.epsilon.unwrap_or(1e-2);
        let margin = self.margin.unwrap_or(0.02);
        positive("epsilon", epsilon)?;
        positive("margin", margin)?;
        let spacing = self.spacing.unwrap_or([1.0, 1.0]);
        positive("spacing", spacing[0].min(spacing[1]))?;
        if let Some(p) = &self.planar_state {
            if p.len() != 12 {
                return Err(CliError::validation(
                    "bad_planar_state",
                    format!("planar state needs 12 numbers (r, φ, ṙ, φ̇ per body), got {}", p.len()),
                ));
            }
        }
        Ok(Job {
            mode,
            masses,
            potential,
            output: self.output.unwrap_or_else(|| PathBuf::from("-")),
            format,
            verify: self.verify.unwrap_or(false),
            t_end,
            dt,
            grid,
            x_grid,
            raw: self.raw.unwrap_or(false),
            shape: self.shape,
            sigma12_grid,
            samples,
            input: self.input,
            epsilon,
            spacing,
            planar_state: self.planar_state,
            resolution,
            margin,
            max_polish: self.max_polish.unwrap_or(64),
        })
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::validation("bad_parameter", format!("{name} must be positive and finite, got {v}")))
    }
}

/// A validated job with every default filled in.
#[derive(Debug, Clone)]
pub struct Job {
    pub mode: Mode,
    pub masses: Masses,
    pub potential: PotentialKind,
    pub output: PathBuf,
    pub format: Format,
    pub verify: bool,
    pub t_end: f64,
    pub dt: f64,
    pub grid: usize,
    pub x_grid: usize,
    pub raw: bool,
    pub shape: Option<Vec<f64>>,
    pub sigma12_grid: usize,
    pub samples: usize,
    pub input: Option<PathBuf>,
    pub epsilon: f64,
    pub spacing: [f64; 2],
    pub planar_state: Option<Vec<f64>>,
    pub resolution: usize,
    pub margin: f64,
    pub max_polish: usize,
}

impl Job {
    pub fn shape_values<const N: usize>(&self, what: &str) -> Result<[f64; N], CliError> {
        let v = self
            .shape
            .as_ref()
            .ok_or_else(|| CliError::validation("missing_shape", format!("{} needs --shape {what}", self.mode.name())))?;
        <[f64; N]>::try_from(v.as_slice()).map_err(|_| {
            CliError::validation("bad_shape", format!("--shape takes {N} values ({what}), got {}", v.len()))
        })
    }
}
