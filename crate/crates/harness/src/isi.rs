//! Closed-form residual ISI against the simulated receiver.

use lsasc_core::analysis::{default_lag_window, p_isi};
use lsasc_core::specfun::SimRng;
use lsasc_core::Complex64;
use rayon::prelude::*;

use crate::config::{Correlation, ExperimentConfig, ExperimentKind, SweepPoint};
use crate::error::{HarnessError, Result};
use crate::experiment::{Link, TrialSeeds};

#[derive(Debug, Clone, PartialEq)]
pub struct IsiValidation {
    pub antennas: usize,
    pub correlation: Correlation,
    pub trials: usize,
    pub lag_window: usize,
    pub closed_form: f64,
    /// Mean over realizations of `Σ_{0<|n|≤W} |f̂[n]|²`.
    pub empirical: f64,
    /// Spread of the single-realization value around `empirical`.
    pub realization_std: f64,
}

impl IsiValidation {
    /// `|empirical − closed| / closed`, or the absolute gap when the closed
    /// form vanishes.
    pub fn relative_error(&self) -> f64 {
        let gap = (self.empirical - self.closed_form).abs();
        if self.closed_form > 0.0 {
            gap / self.closed_form
        } else {
            gap
        }
    }
}

/// Off-peak energy of the baud-spaced response to a single unit symbol,
/// noiseless, for one channel draw.
pub fn probe_isi(link: &Link, seeds: TrialSeeds, lag_window: usize) -> lsasc_core::Result<f64> {
    let chan = link.model.draw(&mut SimRng::new(seeds.channel));
    let probe = [Complex64::new(1.0, 0.0)];
    let (burst, record) = link.transmit(&chan, &probe, 0.0, seeds.noise)?;
    let k0 = burst.payload_range().start;
    let w = lag_window.min(k0);
    Ok((k0 - w..=k0 + w)
        .filter(|&k| k != k0)
        .map(|k| record.soft[k].norm_sqr())
        .sum())
}

pub fn validate_point(cfg: &ExperimentConfig, point: &SweepPoint) -> Result<IsiValidation> {
    let link = Link::new(cfg, point)?;
    let window = default_lag_window(link.model.profile(), &link.pulse);
    let closed = p_isi(link.model.profile(), &link.pulse, link.model.geometry(), window);
    let samples = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            probe_isi(&link, TrialSeeds::new(cfg.seed, trial), window).map_err(|source| HarnessError::Trial {
                trial,
                x: point.x,
                source,
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = if samples.len() > 1 {
        samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(IsiValidation {
        antennas: point.antennas,
        correlation: point.correlation,
        trials: cfg.trials,
        lag_window: window,
        closed_form: closed.p_isi,
        empirical: mean,
        realization_std: var.sqrt(),
    })
}

/// One report per antenna count. The probe sits inside the guard band of the
/// SER bursts, so the window covers every lag the pulse and delays can reach.
pub fn run_isi_validation(cfg: &ExperimentConfig) -> Result<Vec<IsiValidation>> {
    if cfg.experiment != ExperimentKind::IsiValidate {
        return Err(HarnessError::config(format!(
            "{} is not an ISI validation",
            cfg.experiment
        )));
    }
    cfg.validate()?;
    cfg.sweep().iter().map(|p| validate_point(cfg, p)).collect()
}

/// Header of [`isi_csv`].
pub const ISI_CSV_HEADER: &str = "m,closed_form,empirical,relative_error,realization_std";

pub fn isi_csv(reports: &[IsiValidation]) -> String {
    let mut out = String::from(ISI_CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.antennas,
            r.closed_form,
            r.empirical,
            r.relative_error(),
            r.realization_std
        ));
    }
    out
}
