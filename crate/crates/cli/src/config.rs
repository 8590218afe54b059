//! Run configuration: defaults, then `TGEO_SEED`, then the key=value config
//! file, then command-line flags.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use tgeo_core::manifold::{TOL_ANALYTIC, TOL_FD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldKind {
    Hopf,
    Meridian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanMode {
    Submanifold,
    Bundle,
    Both,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Hopf => "hopf",
            FieldKind::Meridian => "meridian",
        }
    }
}

impl ScanMode {
    pub fn name(self) -> &'static str {
        match self {
            ScanMode::Submanifold => "submanifold",
            ScanMode::Bundle => "bundle",
            ScanMode::Both => "both",
        }
    }

    pub fn submanifold(self) -> bool {
        self != ScanMode::Bundle
    }

    pub fn bundle(self) -> bool {
        self != ScanMode::Submanifold
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Unit vector field.
    #[arg(long, value_enum)]
    pub field: Option<FieldKind>,
    /// Dimension of the sphere S^dim.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Random points per check.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Random planes for scan-curvature.
    #[arg(long)]
    pub planes: Option<usize>,
    /// Samples along a fiber for the instability witness.
    #[arg(long)]
    pub fiber_steps: Option<usize>,
    /// Overrides every verdict tolerance of the command.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Defaults to $TGEO_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// key=value file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub field: FieldKind,
    pub dim: usize,
    pub radius: f64,
    pub samples: usize,
    pub planes: usize,
    pub fiber_steps: usize,
    pub tol: Option<f64>,
    pub tol_fd: f64,
    pub tol_analytic: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub mode: ScanMode,
    pub point: Option<Vec<f64>>,
    pub polar_angle: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            field: FieldKind::Hopf,
            dim: 3,
            radius: 1.0,
            samples: 100,
            planes: 10_000,
            fiber_steps: 256,
            tol: None,
            tol_fd: TOL_FD,
            tol_analytic: TOL_ANALYTIC,
            seed: 0,
            out: None,
            format: Format::Json,
            mode: ScanMode::Submanifold,
            point: None,
            polar_angle: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, UsageError> {
    value.parse().map_err(|_| UsageError(format!("invalid value for {key}: {value:?}")))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T, UsageError> {
    T::from_str(value, true).map_err(|_| UsageError(format!("invalid value for {key}: {value:?}")))
}

pub fn parse_point(value: &str) -> Result<Vec<f64>, UsageError> {
    value.split(',').map(|c| parse("point", c.trim())).collect()
}

impl RunConfig {
    /// Apply one `key=value` setting. Keys accept `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), UsageError> {
        match key.replace('-', "_").as_str() {
            "field" => self.field = parse_enum(key, value)?,
            "dim" => self.dim = parse(key, value)?,
            "radius" => self.radius = parse(key, value)?,
            "samples" => self.samples = parse(key, value)?,
            "planes" => self.planes = parse(key, value)?,
            "fiber_steps" => self.fiber_steps = parse(key, value)?,
            "tol" => self.tol = Some(parse(key, value)?),
            "tol_fd" => self.tol_fd = parse(key, value)?,
            "tol_analytic" => self.tol_analytic = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = parse_enum(key, value)?,
            "mode" => self.mode = parse_enum(key, value)?,
            "point" => self.point = Some(parse_point(value)?),
            "polar_angle" => self.polar_angle = Some(parse(key, value)?),
            _ => return Err(UsageError(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Read a flat key=value file. Blank lines and `#` comments are skipped.
    pub fn apply_file(&mut self, text: &str) -> Result<(), UsageError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| UsageError(format!("config line {}: expected key=value", i + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn apply_flags(&mut self, f: &Flags) {
        if let Some(v) = f.field {
            self.field = v;
        }
        if let Some(v) = f.dim {
            self.dim = v;
        }
        if let Some(v) = f.radius {
            self.radius = v;
        }
        if let Some(v) = f.samples {
            self.samples = v;
        }
        if let Some(v) = f.planes {
            self.planes = v;
        }
        if let Some(v) = f.fiber_steps {
            self.fiber_steps = v;
        }
        if f.tol.is_some() {
            self.tol = f.tol;
        }
        if let Some(v) = f.seed {
            self.seed = v;
        }
        if f.out.is_some() {
            self.out = f.out.clone();
        }
        if let Some(v) = f.format {
            self.format = v;
        }
    }

    /// Assemble from all sources. `env_seed` is the raw `TGEO_SEED` value.
    pub fn resolve(flags: &Flags, file: Option<&str>, env_seed: Option<&str>) -> Result<Self, UsageError> {
        let mut cfg = RunConfig::default();
        if let Some(s) = env_seed.filter(|s| !s.trim().is_empty()) {
            cfg.seed = parse("TGEO_SEED", s.trim())?;
        }
        if let Some(text) = file {
            cfg.apply_file(text)?;
        }
        cfg.apply_flags(flags);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), UsageError> {
        let err = |m: String| Err(UsageError(m));
        if self.dim < 2 {
            return err(format!("dim must be at least 2, got {}", self.dim));
        }
        if self.field == FieldKind::Hopf && self.dim.is_multiple_of(2) {
            return err(format!("the Hopf field needs an odd dim, got {}", self.dim));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return err(format!("radius must be positive, got {}", self.radius));
        }
        if self.samples == 0 || self.planes == 0 {
            return err("samples and planes must be at least 1".into());
        }
        for (name, t) in [("tol", self.tol.unwrap_or(1.0)), ("tol_fd", self.tol_fd), ("tol_analytic", self.tol_analytic)] {
            if !(t.is_finite() && t > 0.0) {
                return err(format!("{name} must be positive, got {t}"));
            }
        }
        if let Some(p) = &self.point {
            if p.len() != self.dim + 1 {
                return err(format!("point needs {} coordinates, got {}", self.dim + 1, p.len()));
            }
        }
        Ok(())
    }

    pub fn fd_tol(&self) -> f64 {
        self.tol.unwrap_or(self.tol_fd)
    }

    pub fn analytic_tol(&self) -> f64 {
        self.tol.unwrap_or(self.tol_analytic)
    }
}
