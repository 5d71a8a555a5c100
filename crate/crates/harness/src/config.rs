//! Experiment configuration.
//!
//! A config file holds one `key = value` pair per line; `#` starts a comment.
//! Lists are comma separated. Command-line flags are applied on top of the
//! file through the same [`ConfigBuilder`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use lsasc_core::channel::{normalize_profile, ArrayGeometry, PowerDelayProfile};
use lsasc_core::waveform::PulseShape;

use crate::error::{HarnessError, Result};

pub const KEYS: [&str; 13] = [
    "experiment",
    "m",
    "d_over_lambda",
    "snr_db",
    "profile",
    "beta",
    "t",
    "q",
    "span",
    "symbols_per_trial",
    "trials",
    "seed",
    "output_path",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    SerVsSnr,
    SerVsLength,
    SerVsAntennas,
    IsiValidate,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SerVsSnr => "ser-vs-snr",
            ExperimentKind::SerVsLength => "ser-vs-length",
            ExperimentKind::SerVsAntennas => "ser-vs-antennas",
            ExperimentKind::IsiValidate => "isi-validate",
        }
    }

    /// The axis this experiment sweeps.
    pub fn swept_axis(self) -> Axis {
        match self {
            ExperimentKind::SerVsSnr => Axis::SnrDb,
            ExperimentKind::SerVsLength => Axis::DOverLambda,
            ExperimentKind::SerVsAntennas | ExperimentKind::IsiValidate => Axis::Antennas,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        [
            ExperimentKind::SerVsSnr,
            ExperimentKind::SerVsLength,
            ExperimentKind::SerVsAntennas,
            ExperimentKind::IsiValidate,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| HarnessError::config(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Antennas,
    DOverLambda,
    SnrDb,
}

impl Axis {
    pub fn key(self) -> &'static str {
        match self {
            Axis::Antennas => "m",
            Axis::DOverLambda => "d_over_lambda",
            Axis::SnrDb => "snr_db",
        }
    }
}

/// Spatial correlation of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Correlation {
    Independent,
    /// Jakes correlation on a ULA of aperture `D/λ`.
    Jakes(f64),
}

impl Correlation {
    pub fn geometry(self, antennas: usize) -> lsasc_core::Result<ArrayGeometry> {
        match self {
            Correlation::Independent => ArrayGeometry::independent(antennas),
            Correlation::Jakes(d) => ArrayGeometry::jakes(antennas, d),
        }
    }

    /// Abscissa in CSV output; an independent array is the infinite-aperture end.
    pub fn abscissa(self) -> f64 {
        match self {
            Correlation::Independent => f64::INFINITY,
            Correlation::Jakes(d) => d,
        }
    }
}

impl fmt::Display for Correlation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Correlation::Independent => f.write_str("independent"),
            Correlation::Jakes(d) => write!(f, "{d}"),
        }
    }
}

impl FromStr for Correlation {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "independent" {
            return Ok(Correlation::Independent);
        }
        let d: f64 = parse_scalar("d_over_lambda", s)?;
        if !(d.is_finite() && d >= 0.0) {
            return Err(HarnessError::config(format!(
                "d_over_lambda = {s} must be finite and non-negative"
            )));
        }
        Ok(Correlation::Jakes(d))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Etu,
    /// `L` equal-power taps at `0, T, …, (L−1)T`.
    Uniform(usize),
    /// `(delay ns, power dB)` rows.
    Table(Vec<(f64, f64)>),
}

impl ProfileSpec {
    /// Normalized profile for symbol period `t`.
    pub fn build(&self, t: f64) -> lsasc_core::Result<PowerDelayProfile> {
        match self {
            ProfileSpec::Etu => Ok(PowerDelayProfile::etu()),
            ProfileSpec::Uniform(l) => PowerDelayProfile::uniform(*l, t),
            ProfileSpec::Table(rows) => {
                let seconds: Vec<(f64, f64)> = rows.iter().map(|&(ns, db)| (ns * 1e-9, db)).collect();
                normalize_profile(&seconds)
            }
        }
    }
}

impl fmt::Display for ProfileSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileSpec::Etu => f.write_str("etu"),
            ProfileSpec::Uniform(l) => write!(f, "uniform-{l}"),
            ProfileSpec::Table(rows) => {
                let cells: Vec<String> = rows.iter().map(|(d, p)| format!("{d}:{p}")).collect();
                f.write_str(&cells.join(","))
            }
        }
    }
}

impl FromStr for ProfileSpec {
    type Err = HarnessError;

    /// `etu`, `uniform-L`, or an inline table `delay_ns:power_db,…`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "etu" {
            return Ok(ProfileSpec::Etu);
        }
        if let Some(l) = s.strip_prefix("uniform-") {
            let l: usize = parse_scalar("profile", l)?;
            if l == 0 {
                return Err(HarnessError::config("uniform profile needs at least one tap"));
            }
            return Ok(ProfileSpec::Uniform(l));
        }
        if s.contains(':') {
            let rows = s
                .split(',')
                .map(|cell| {
                    let (d, p) = cell.split_once(':').ok_or_else(|| {
                        HarnessError::config(format!("profile row `{cell}` is not delay:power"))
                    })?;
                    Ok((
                        parse_scalar("profile delay", d.trim())?,
                        parse_scalar("profile power", p.trim())?,
                    ))
                })
                .collect::<Result<Vec<(f64, f64)>>>()?;
            return Ok(ProfileSpec::Table(rows));
        }
        Err(HarnessError::config(format!(
            "unknown profile `{s}` (expected etu, uniform-L or delay_ns:power_db,…)"
        )))
    }
}

/// One point of a sweep: the swept abscissa plus the full parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub x: f64,
    pub antennas: usize,
    pub correlation: Correlation,
    pub snr_db: f64,
}

impl SweepPoint {
    /// `N0 = 10^(−snr_db/10)`; infinite SNR gives a noiseless link.
    pub fn n0(&self) -> f64 {
        10f64.powf(-self.snr_db / 10.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub m: Vec<usize>,
    pub d_over_lambda: Vec<Correlation>,
    pub snr_db: Vec<f64>,
    pub profile: ProfileSpec,
    pub beta: f64,
    pub t: f64,
    pub q: usize,
    pub span: usize,
    pub symbols_per_trial: usize,
    pub trials: usize,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Default parameters with the given experiment and seed.
    pub fn new(experiment: ExperimentKind, seed: u64) -> Self {
        let mut cfg = Self {
            experiment,
            m: vec![100],
            d_over_lambda: vec![Correlation::Independent],
            snr_db: vec![-8.0],
            profile: ProfileSpec::Etu,
            beta: 0.25,
            t: 0.2e-6,
            q: 2,
            span: 16,
            symbols_per_trial: 1000,
            trials: 100,
            seed,
            output_path: None,
        };
        match experiment.swept_axis() {
            Axis::Antennas => cfg.m = vec![16, 32, 64, 128],
            Axis::DOverLambda => {
                cfg.d_over_lambda = [5.0, 10.0, 25.0, 50.0]
                    .into_iter()
                    .map(Correlation::Jakes)
                    .collect();
                cfg.d_over_lambda.push(Correlation::Independent);
            }
            Axis::SnrDb => cfg.snr_db = vec![-14.0, -12.0, -10.0, -8.0, -6.0],
        }
        if experiment == ExperimentKind::IsiValidate {
            cfg.m = vec![32];
        }
        cfg
    }

    pub fn pulse(&self) -> lsasc_core::Result<PulseShape> {
        PulseShape::new(self.beta, self.t, self.span, self.q)
    }

    pub fn base_profile(&self) -> lsasc_core::Result<PowerDelayProfile> {
        self.profile.build(self.t)
    }

    /// The profile the simulator actually sees: delays rounded to the sample
    /// grid `T/Q`.
    pub fn grid_profile(&self) -> lsasc_core::Result<PowerDelayProfile> {
        self.base_profile()?.quantized(self.t / self.q as f64)
    }

    /// Checks counts, the single swept axis and every derived object.
    pub fn validate(&self) -> Result<()> {
        let swept = self.experiment.swept_axis();
        for (axis, len) in [
            (Axis::Antennas, self.m.len()),
            (Axis::DOverLambda, self.d_over_lambda.len()),
            (Axis::SnrDb, self.snr_db.len()),
        ] {
            if len == 0 {
                return Err(HarnessError::config(format!("`{}` is empty", axis.key())));
            }
            if axis != swept && len > 1 {
                return Err(HarnessError::config(format!(
                    "{} sweeps `{}`; `{}` must be a single value",
                    self.experiment,
                    swept.key(),
                    axis.key()
                )));
            }
        }
        if self.trials == 0 {
            return Err(HarnessError::config("trials must be positive"));
        }
        if self.symbols_per_trial == 0 {
            return Err(HarnessError::config("symbols_per_trial must be positive"));
        }
        for &s in &self.snr_db {
            if s.is_nan() || s == f64::NEG_INFINITY {
                return Err(HarnessError::config(format!("snr_db = {s} is not usable")));
            }
        }
        self.pulse().map_err(|e| HarnessError::config(e.to_string()))?;
        self.grid_profile()
            .map_err(|e| HarnessError::config(e.to_string()))?;
        for p in self.sweep() {
            p.correlation
                .geometry(p.antennas)
                .map_err(|e| HarnessError::config(format!("m = {}: {e}", p.antennas)))?;
        }
        Ok(())
    }

    /// Every parameter combination, in the order given by the swept list.
    pub fn sweep(&self) -> Vec<SweepPoint> {
        let base = SweepPoint {
            x: 0.0,
            antennas: self.m[0],
            correlation: self.d_over_lambda[0],
            snr_db: self.snr_db[0],
        };
        match self.experiment.swept_axis() {
            Axis::Antennas => self
                .m
                .iter()
                .map(|&m| SweepPoint {
                    x: m as f64,
                    antennas: m,
                    ..base
                })
                .collect(),
            Axis::DOverLambda => self
                .d_over_lambda
                .iter()
                .map(|&c| SweepPoint {
                    x: c.abscissa(),
                    correlation: c,
                    ..base
                })
                .collect(),
            Axis::SnrDb => self
                .snr_db
                .iter()
                .map(|&s| SweepPoint {
                    x: s,
                    snr_db: s,
                    ..base
                })
                .collect(),
        }
    }
}

fn parse_scalar<T: FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| HarnessError::config(format!("cannot parse `{raw}` for `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>> {
    raw.split(',').map(|v| parse_scalar(key, v)).collect()
}

/// Raw `key → value` text collected from a config file and flags.
#[derive(Debug, Clone, Default)]
pub struct ConfigBuilder {
    values: BTreeMap<String, String>,
}

impl ConfigBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut builder = Self::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::config(format!("line {}: expected `key = value`", n + 1)))?;
            let key = key.trim();
            if builder.values.contains_key(key) {
                return Err(HarnessError::config(format!(
                    "line {}: duplicate key `{key}`",
                    n + 1
                )));
            }
            builder
                .set(key, value.trim())
                .map_err(|e| HarnessError::config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(builder)
    }

    /// Sets (or overrides) one key.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<&mut Self> {
        if !KEYS.contains(&key) {
            return Err(HarnessError::config(format!("unknown key `{key}`")));
        }
        let value: String = value.into();
        if value.is_empty() {
            return Err(HarnessError::config(format!("`{key}` has no value")));
        }
        self.values.insert(key.to_owned(), value);
        Ok(self)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Resolves defaults and validates. `experiment` wins over any
    /// `experiment` key in the collected values.
    pub fn build(&self, experiment: Option<ExperimentKind>) -> Result<ExperimentConfig> {
        let experiment = match (experiment, self.get("experiment")) {
            (Some(kind), _) => kind,
            (None, Some(raw)) => raw.parse()?,
            (None, None) => return Err(HarnessError::config("no experiment selected")),
        };
        let seed = self
            .get("seed")
            .ok_or_else(|| HarnessError::config("`seed` is required"))
            .and_then(|raw| parse_scalar::<u64>("seed", raw))?;
        let mut cfg = ExperimentConfig::new(experiment, seed);
        for (key, raw) in &self.values {
            let raw = raw.as_str();
            match key.as_str() {
                "m" => cfg.m = parse_list(key, raw)?,
                "d_over_lambda" => {
                    cfg.d_over_lambda = raw.split(',').map(|v| v.trim().parse()).collect::<Result<_>>()?
                }
                "snr_db" => cfg.snr_db = parse_list(key, raw)?,
                "profile" => cfg.profile = raw.parse()?,
                "beta" => cfg.beta = parse_scalar(key, raw)?,
                "t" => cfg.t = parse_scalar(key, raw)?,
                "q" => cfg.q = parse_scalar(key, raw)?,
                "span" => cfg.span = parse_scalar(key, raw)?,
                "symbols_per_trial" => cfg.symbols_per_trial = parse_scalar(key, raw)?,
                "trials" => cfg.trials = parse_scalar(key, raw)?,
                "output_path" => cfg.output_path = Some(PathBuf::from(raw)),
                _ => {}
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
