//! `lsasc` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::analyze::analyze_report;
use crate::config::{ConfigBuilder, Correlation, ExperimentConfig, ExperimentKind, ProfileSpec};
use crate::csv::{to_csv, write_text};
use crate::error::{HarnessError, Result};
use crate::experiment::{run_ser_experiment, SerPoint};
use crate::isi::{isi_csv, run_isi_validation, IsiValidation};

#[derive(Debug, Parser)]
#[command(
    name = "lsasc",
    version,
    about = "Single-carrier uplink into a large antenna array: SER sweeps and residual-ISI analysis",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// SER against Es/N0.
    SerVsSnr(RunArgs),
    /// SER against array length D/λ.
    SerVsLength(RunArgs),
    /// SER against antenna count.
    SerVsAntennas(RunArgs),
    /// Simulated residual ISI against its closed form.
    IsiValidate(RunArgs),
    /// Closed-form P0 and residual-ISI tables.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Config file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; without it the CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    symbols_per_trial: Option<usize>,
    #[command(flatten)]
    link: LinkArgs,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    link: LinkArgs,
}

#[derive(Debug, Args)]
struct LinkArgs {
    /// Antenna count, or a comma-separated sweep.
    #[arg(long)]
    m: Option<String>,
    /// Array length D/λ, `independent`, or a comma-separated sweep.
    #[arg(long, conflicts_with = "independent")]
    d_over_lambda: Option<String>,
    /// Uncorrelated antennas.
    #[arg(long)]
    independent: bool,
    /// Es/N0 in dB (`inf` for noiseless), or a comma-separated sweep.
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<String>,
    /// `etu`, `uniform-L`, or `delay_ns:power_db,…`.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    /// Symbol period in seconds.
    #[arg(long)]
    t: Option<f64>,
    /// Samples per symbol.
    #[arg(long)]
    q: Option<usize>,
    /// Pulse half-length in symbols.
    #[arg(long)]
    span: Option<usize>,
}

impl LinkArgs {
    fn apply(&self, b: &mut ConfigBuilder) -> Result<()> {
        let strings = [
            ("m", self.m.clone()),
            ("d_over_lambda", self.d_over_lambda.clone()),
            ("snr_db", self.snr_db.clone()),
            ("profile", self.profile.clone()),
            ("beta", self.beta.map(|v| v.to_string())),
            ("t", self.t.map(|v| v.to_string())),
            ("q", self.q.map(|v| v.to_string())),
            ("span", self.span.map(|v| v.to_string())),
        ];
        for (key, value) in strings {
            if let Some(v) = value {
                b.set(key, v)?;
            }
        }
        if self.independent {
            b.set("d_over_lambda", "independent")?;
        }
        Ok(())
    }
}

fn load(config: &Option<PathBuf>) -> Result<ConfigBuilder> {
    match config {
        Some(path) => ConfigBuilder::from_file(path),
        None => Ok(ConfigBuilder::new()),
    }
}

fn build_config(kind: ExperimentKind, args: &RunArgs) -> Result<ExperimentConfig> {
    let mut b = load(&args.config)?;
    args.link.apply(&mut b)?;
    if let Some(seed) = args.seed {
        b.set("seed", seed.to_string())?;
    }
    if let Some(out) = &args.out {
        b.set("output_path", out.to_string_lossy().into_owned())?;
    }
    if let Some(n) = args.trials {
        b.set("trials", n.to_string())?;
    }
    if let Some(n) = args.symbols_per_trial {
        b.set("symbols_per_trial", n.to_string())?;
    }
    b.build(Some(kind))
}

fn ser_summary(cfg: &ExperimentConfig, points: &[SerPoint]) -> String {
    let mut s = format!(
        "{} seed={} trials={} symbols/trial={}\n{:>12}  {:>12}  {:>10}  {:>12}\n",
        cfg.experiment, cfg.seed, cfg.trials, cfg.symbols_per_trial, "x", "ser", "errors", "ci95"
    );
    for p in points {
        s.push_str(&format!(
            "{:>12}  {:>12.4e}  {:>10}  {:>12.4e}{}\n",
            p.x,
            p.ser,
            p.errors,
            p.ci95_halfwidth,
            if p.is_unreliable() { "  unreliable" } else { "" }
        ));
    }
    s
}

fn isi_summary(cfg: &ExperimentConfig, reports: &[IsiValidation]) -> String {
    let mut s = format!(
        "isi-validate seed={} realizations={} profile={}\n",
        cfg.seed, cfg.trials, cfg.profile
    );
    for r in reports {
        s.push_str(&format!(
            "M = {}, correlation = {}: closed form {:.6e}, empirical {:.6e}, relative error {:.3}%, \
             per-realization std {:.3e}\n",
            r.antennas,
            r.correlation,
            r.closed_form,
            r.empirical,
            100.0 * r.relative_error(),
            r.realization_std
        ));
    }
    if let Some(first) = reports.first() {
        for r in &reports[1..] {
            s.push_str(&format!(
                "empirical ratio M={} / M={}: {:.4}\n",
                first.antennas,
                r.antennas,
                first.empirical / r.empirical
            ));
        }
    }
    s
}

/// Writes `csv` to the configured path, or to stdout when there is none.
/// The human-readable summary goes to whichever stream the CSV does not use.
fn deliver(cfg: &ExperimentConfig, csv: &str, summary: &str) -> Result<()> {
    match &cfg.output_path {
        Some(path) => {
            write_text(path, csv)?;
            print!("{summary}");
        }
        None => {
            print!("{csv}");
            eprint!("{summary}");
        }
    }
    std::io::stdout().flush().map_err(|source| HarnessError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn run_experiment(kind: ExperimentKind, args: &RunArgs) -> Result<()> {
    let cfg = build_config(kind, args)?;
    if kind == ExperimentKind::IsiValidate {
        let reports = run_isi_validation(&cfg)?;
        deliver(&cfg, &isi_csv(&reports), &isi_summary(&cfg, &reports))
    } else {
        let points = run_ser_experiment(&cfg)?;
        deliver(&cfg, &to_csv(&points), &ser_summary(&cfg, &points))
    }
}

fn run_analyze(args: &AnalyzeArgs) -> Result<()> {
    let mut b = load(&args.config)?;
    args.link.apply(&mut b)?;
    let defaults = ExperimentConfig::new(ExperimentKind::SerVsSnr, 0);
    let list = |key: &str| {
        b.get(key)
            .map(|raw| raw.split(',').map(str::trim).collect::<Vec<_>>())
    };
    let parse_err = |key: &str, raw: &str| HarnessError::config(format!("cannot parse `{raw}` for `{key}`"));

    let antennas: Vec<usize> = match list("m") {
        Some(v) => v
            .iter()
            .map(|s| s.parse().map_err(|_| parse_err("m", s)))
            .collect::<Result<_>>()?,
        None => vec![100],
    };
    let correlations: Vec<Correlation> = match list("d_over_lambda") {
        Some(v) => v.iter().map(|s| s.parse()).collect::<Result<_>>()?,
        None => vec![Correlation::Independent],
    };
    let snr_db = match b.get("snr_db") {
        Some(raw) => Some(raw.trim().parse::<f64>().map_err(|_| parse_err("snr_db", raw))?),
        None => None,
    };
    let profile: ProfileSpec = match b.get("profile") {
        Some(raw) => raw.parse()?,
        None => ProfileSpec::Etu,
    };
    let scalar = |key: &str, default: f64| -> Result<f64> {
        b.get(key)
            .map(|raw| raw.trim().parse().map_err(|_| parse_err(key, raw)))
            .unwrap_or(Ok(default))
    };
    let beta = scalar("beta", defaults.beta)?;
    let t = scalar("t", defaults.t)?;
    let q = scalar("q", defaults.q as f64)? as usize;
    let span = scalar("span", defaults.span as f64)? as usize;

    let config_err = |e: lsasc_core::Error| HarnessError::config(e.to_string());
    let pulse = lsasc_core::waveform::PulseShape::new(beta, t, span, q).map_err(config_err)?;
    let profile = profile.build(t).map_err(config_err)?;
    for &m in &antennas {
        for &c in &correlations {
            c.geometry(m).map_err(config_err)?;
        }
    }
    print!(
        "{}",
        analyze_report(&antennas, &correlations, &profile, &pulse, snr_db)?
    );
    Ok(())
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code: 0 on success, 1 for usage or config errors, 2 when a
/// run fails.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let result = match &cli.command {
        Command::SerVsSnr(a) => run_experiment(ExperimentKind::SerVsSnr, a),
        Command::SerVsLength(a) => run_experiment(ExperimentKind::SerVsLength, a),
        Command::SerVsAntennas(a) => run_experiment(ExperimentKind::SerVsAntennas, a),
        Command::IsiValidate(a) => run_experiment(ExperimentKind::IsiValidate, a),
        Command::Analyze(a) => run_analyze(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
