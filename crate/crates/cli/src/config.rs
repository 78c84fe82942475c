use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use resmetro::{IntegrationConfig, PulseParams, SequenceSpec};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendChoice {
    Analytic,
    Direct,
    Ode,
}

/// Accepts `0`, `pi`, `-pi` or a value in radians.
pub fn parse_phase(s: &str) -> Result<f64, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "pi" => Ok(PI),
        "-pi" => Ok(-PI),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("phase must be 0, pi or radians, got '{s}'")),
    }
}

/// Parameters shared by every subcommand. Flags left unset fall back to the
/// config file, then to per-command defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Params {
    /// Pulse width tau (the time unit)
    #[arg(long)]
    pub tau: Option<f64>,
    /// Peak Rabi frequency Omega0 of the full-duration pulse [default: 1/tau]
    #[arg(long)]
    pub rabi: Option<f64>,
    /// Resonance frequency omega0 [default: 0]
    #[arg(long)]
    pub omega0: Option<f64>,
    /// N: the train has 2N+1 pulses [default: 0]
    #[arg(long = "n-half")]
    pub n_half: Option<usize>,
    /// Phase of every second pulse: 0, pi or radians [default: pi]
    #[arg(long, value_parser = parse_phase, allow_hyphen_values = true)]
    pub phase: Option<f64>,
    /// Lowest drive frequency of the grid
    #[arg(long = "grid-min", allow_hyphen_values = true)]
    pub grid_min: Option<f64>,
    /// Highest drive frequency of the grid
    #[arg(long = "grid-max", allow_hyphen_values = true)]
    pub grid_max: Option<f64>,
    /// Number of grid points
    #[arg(long = "grid-points")]
    pub grid_points: Option<usize>,
    /// Repetitions per grid frequency [default: 250]
    #[arg(long)]
    pub shots: Option<u64>,
    /// Monte Carlo trials [default: 2000]
    #[arg(long)]
    pub trials: Option<usize>,
    /// Seed of the random streams [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output format [default: csv]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file [default: standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Propagator evaluation [default: analytic]
    #[arg(long, value_enum)]
    pub backend: Option<BackendChoice>,
    /// ODE relative tolerance
    #[arg(long = "rel-tol")]
    pub rel_tol: Option<f64>,
    /// ODE absolute tolerance
    #[arg(long = "abs-tol")]
    pub abs_tol: Option<f64>,
    /// ODE integration window half-width in units of the pulse width
    #[arg(long)]
    pub window: Option<f64>,
    /// Override every verification limit
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// File of key=value lines; command-line flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value '{value}' for '{key}'"))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T, String> {
    T::from_str(value, true).map_err(|_| format!("invalid value '{value}' for '{key}'"))
}

impl Params {
    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key.replace('_', "-").as_str() {
            "tau" => self.tau = Some(parse_value(key, value)?),
            "rabi" => self.rabi = Some(parse_value(key, value)?),
            "omega0" => self.omega0 = Some(parse_value(key, value)?),
            "n-half" => self.n_half = Some(parse_value(key, value)?),
            "phase" => self.phase = Some(parse_phase(value)?),
            "grid-min" => self.grid_min = Some(parse_value(key, value)?),
            "grid-max" => self.grid_max = Some(parse_value(key, value)?),
            "grid-points" => self.grid_points = Some(parse_value(key, value)?),
            "shots" => self.shots = Some(parse_value(key, value)?),
            "trials" => self.trials = Some(parse_value(key, value)?),
            "seed" => self.seed = Some(parse_value(key, value)?),
            "format" => self.format = Some(parse_enum(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "backend" => self.backend = Some(parse_enum(key, value)?),
            "rel-tol" => self.rel_tol = Some(parse_value(key, value)?),
            "abs-tol" => self.abs_tol = Some(parse_value(key, value)?),
            "window" => self.window = Some(parse_value(key, value)?),
            "tolerance" => self.tolerance = Some(parse_value(key, value)?),
            _ => return Err(format!("unknown config key '{key}'")),
        }
        Ok(())
    }

    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn from_config_text(text: &str) -> Result<Params, String> {
        let mut params = Params::default();
        for (number, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", number + 1))?;
            params
                .set(key.trim(), value.trim())
                .map_err(|e| format!("line {}: {e}", number + 1))?;
        }
        Ok(params)
    }

    pub fn from_config_file(path: &Path) -> Result<Params, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::from_config_text(&text)
    }

    /// Fields set here win over `fallback`.
    pub fn or(self, fallback: Params) -> Params {
        Params {
            tau: self.tau.or(fallback.tau),
            rabi: self.rabi.or(fallback.rabi),
            omega0: self.omega0.or(fallback.omega0),
            n_half: self.n_half.or(fallback.n_half),
            phase: self.phase.or(fallback.phase),
            grid_min: self.grid_min.or(fallback.grid_min),
            grid_max: self.grid_max.or(fallback.grid_max),
            grid_points: self.grid_points.or(fallback.grid_points),
            shots: self.shots.or(fallback.shots),
            trials: self.trials.or(fallback.trials),
            seed: self.seed.or(fallback.seed),
            format: self.format.or(fallback.format),
            out: self.out.or(fallback.out),
            backend: self.backend.or(fallback.backend),
            rel_tol: self.rel_tol.or(fallback.rel_tol),
            abs_tol: self.abs_tol.or(fallback.abs_tol),
            window: self.window.or(fallback.window),
            tolerance: self.tolerance.or(fallback.tolerance),
            config: self.config.or(fallback.config),
        }
    }
}

/// Default grid half-width and point count, in units of `1/tau`.
#[derive(Debug, Clone, Copy)]
pub struct GridDefault {
    pub half_span: f64,
    pub points: usize,
    /// Widen the span by the pulse count `2N+1`.
    pub scale_with_pulses: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|j| self.min + step * j as f64)
            .collect()
    }
}

/// Fully resolved and validated parameters.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub tau: f64,
    pub rabi: f64,
    pub omega0: f64,
    pub n_half: usize,
    pub phase: f64,
    pub grid: GridSpec,
    pub shots: u64,
    pub trials: usize,
    pub seed: u64,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub backend: BackendChoice,
    pub integration: IntegrationConfig,
    pub tolerance: Option<f64>,
    /// Dimensionless pulse area `tau * Omega0`.
    pub tau_rabi: f64,
    pub pulse_count: usize,
}

impl RunConfig {
    pub fn resolve(
        command: &'static str,
        cli: Params,
        grid_default: GridDefault,
    ) -> Result<RunConfig, String> {
        let file = match &cli.config {
            Some(path) => Params::from_config_file(path)?,
            None => Params::default(),
        };
        let p = cli.or(file);
        let tau = p.tau.unwrap_or(1.0);
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(format!("--tau must be positive, got {tau}"));
        }
        let rabi = p.rabi.unwrap_or(1.0 / tau);
        if !(rabi >= 0.0 && rabi.is_finite()) {
            return Err(format!("--rabi must be non-negative, got {rabi}"));
        }
        let omega0 = p.omega0.unwrap_or(0.0);
        if !omega0.is_finite() {
            return Err("--omega0 must be finite".into());
        }
        let n_half = p.n_half.unwrap_or(0);
        if n_half > 10_000 {
            return Err(format!("--n-half {n_half} is too large"));
        }
        let pulses = if grid_default.scale_with_pulses {
            (2 * n_half + 1) as f64
        } else {
            1.0
        };
        let half_span = grid_default.half_span * pulses / tau;
        let grid = GridSpec {
            min: p.grid_min.unwrap_or(omega0 - half_span),
            max: p.grid_max.unwrap_or(omega0 + half_span),
            points: p.grid_points.unwrap_or(grid_default.points),
        };
        if grid.points == 0 {
            return Err("the grid is empty (--grid-points 0)".into());
        }
        if !(grid.min.is_finite() && grid.max.is_finite()) {
            return Err("grid bounds must be finite".into());
        }
        if grid.points > 1 && grid.max <= grid.min {
            return Err(format!(
                "--grid-max {} must exceed --grid-min {}",
                grid.max, grid.min
            ));
        }
        let shots = p.shots.unwrap_or(250);
        if shots == 0 {
            return Err("--shots must be at least 1".into());
        }
        let defaults = IntegrationConfig::default();
        let integration = IntegrationConfig {
            window_half_width: p.window.unwrap_or(defaults.window_half_width),
            rel_tol: p.rel_tol.unwrap_or(defaults.rel_tol),
            abs_tol: p.abs_tol.unwrap_or(defaults.abs_tol),
            ..defaults
        };
        if !(integration.rel_tol > 0.0 && integration.abs_tol > 0.0) {
            return Err("ODE tolerances must be positive".into());
        }
        if !(integration.window_half_width > 0.0 && integration.window_half_width.is_finite()) {
            return Err("--window must be positive".into());
        }
        if let Some(t) = p.tolerance {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(format!("--tolerance must be non-negative, got {t}"));
            }
        }
        Ok(RunConfig {
            command,
            tau,
            rabi,
            omega0,
            n_half,
            phase: p.phase.unwrap_or(PI),
            grid,
            shots,
            trials: p.trials.unwrap_or(2000),
            seed: p.seed.unwrap_or(0),
            format: p.format.unwrap_or(Format::Csv),
            out: p.out,
            backend: p.backend.unwrap_or(BackendChoice::Analytic),
            integration,
            tolerance: p.tolerance,
            tau_rabi: tau * rabi,
            pulse_count: 2 * n_half + 1,
        })
    }

    pub fn pulse(&self) -> PulseParams {
        PulseParams {
            amplitude: self.rabi,
            width: self.tau,
            drive: self.omega0,
            resonance: self.omega0,
            carrier_phase: 0.0,
        }
    }

    pub fn sequence(&self) -> SequenceSpec {
        SequenceSpec {
            half_count: self.n_half,
            phase: self.phase,
            base: self.pulse(),
        }
    }
}
