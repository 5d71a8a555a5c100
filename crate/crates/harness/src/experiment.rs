//! Monte Carlo symbol-error-rate sweeps.

use lsasc_core::channel::{ChannelModel, ChannelRealization};
use lsasc_core::receiver::{receive, CombinerWeights, DecisionRecord};
use lsasc_core::specfun::{RngSeed, SimRng};
use lsasc_core::waveform::{propagate, shape, Burst, FilterKind, PulseShape, SymbolStream};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ExperimentKind, SweepPoint};
use crate::error::{HarnessError, Result};

/// Points with fewer errors than this are flagged unreliable.
pub const RELIABLE_ERRORS: u64 = 20;

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerPoint {
    pub x: f64,
    pub ser: f64,
    pub errors: u64,
    pub symbols: u64,
    pub ci95_halfwidth: f64,
}

impl SerPoint {
    /// Normal-approximation binomial interval around `errors/symbols`.
    pub fn from_counts(x: f64, errors: u64, symbols: u64) -> Self {
        let ser = if symbols == 0 {
            0.0
        } else {
            errors as f64 / symbols as f64
        };
        let ci95_halfwidth = if symbols == 0 {
            0.0
        } else {
            Z95 * (ser * (1.0 - ser) / symbols as f64).sqrt()
        };
        Self {
            x,
            ser,
            errors,
            symbols,
            ci95_halfwidth,
        }
    }

    pub fn is_unreliable(&self) -> bool {
        self.errors < RELIABLE_ERRORS
    }

    pub fn ci95(&self) -> (f64, f64) {
        (self.ser - self.ci95_halfwidth, self.ser + self.ci95_halfwidth)
    }
}

/// Seed streams of one trial. Everything a trial draws comes from its own
/// trial seed, so trials can run in any order.
#[derive(Debug, Clone, Copy)]
pub struct TrialSeeds {
    pub channel: RngSeed,
    pub symbols: RngSeed,
    pub noise: RngSeed,
}

impl TrialSeeds {
    pub fn new(master: u64, trial: u64) -> Self {
        let t = RngSeed(master).child(trial);
        Self {
            channel: t.child(0),
            symbols: t.child(1),
            noise: t.child(2),
        }
    }
}

/// Everything fixed across the trials of one sweep point.
#[derive(Debug, Clone)]
pub struct Link {
    pub pulse: PulseShape,
    pub model: ChannelModel,
    pub weights: CombinerWeights,
    pub n0: f64,
    pub guard: usize,
}

impl Link {
    pub fn new(cfg: &ExperimentConfig, point: &SweepPoint) -> Result<Self> {
        let pulse = cfg.pulse()?;
        let profile = cfg.grid_profile()?;
        let geometry = point.correlation.geometry(point.antennas)?;
        let weights = CombinerWeights::equal(profile.tap_count())?;
        let guard = Burst::guard_for(&pulse, profile.max_delay());
        Ok(Self {
            pulse,
            model: ChannelModel::new(profile, geometry)?,
            weights,
            n0: point.n0(),
            guard,
        })
    }

    /// Transmits `payload` through `chan` and runs the receiver over the
    /// whole burst.
    pub fn transmit(
        &self,
        chan: &ChannelRealization,
        payload: &[lsasc_core::Complex64],
        n0: f64,
        noise: RngSeed,
    ) -> lsasc_core::Result<(Burst, DecisionRecord)> {
        let burst = Burst::new(payload, self.guard);
        let tx = shape(burst.symbols(), &self.pulse, FilterKind::TransmitOnly)?;
        let rx = propagate(&tx, chan, &self.pulse, n0, noise)?;
        let record = receive(&rx, chan, &self.weights, &self.pulse, burst.len())?;
        Ok((burst, record))
    }

    /// Symbol errors over the payload of one trial.
    pub fn trial_errors(&self, seeds: TrialSeeds, symbols: usize) -> lsasc_core::Result<u64> {
        let chan = self.model.draw(&mut SimRng::new(seeds.channel));
        let payload = SymbolStream::random(symbols, &mut SimRng::new(seeds.symbols));
        let (burst, record) = self.transmit(&chan, &payload, self.n0, seeds.noise)?;
        let errors = burst
            .payload_range()
            .zip(payload.iter())
            .filter(|&(k, s)| record.decided[k] != *s)
            .count();
        Ok(errors as u64)
    }
}

/// All trials of one sweep point, run in parallel and summed.
pub fn run_point(cfg: &ExperimentConfig, point: &SweepPoint) -> Result<SerPoint> {
    let link = Link::new(cfg, point)?;
    let counts = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            link.trial_errors(TrialSeeds::new(cfg.seed, trial), cfg.symbols_per_trial)
                .map_err(|source| HarnessError::Trial {
                    trial,
                    x: point.x,
                    source,
                })
        })
        .collect::<Result<Vec<u64>>>()?;
    let symbols = (cfg.trials * cfg.symbols_per_trial) as u64;
    Ok(SerPoint::from_counts(point.x, counts.iter().sum(), symbols))
}

/// One [`SerPoint`] per swept value. Trial `i` uses the same seeds at every
/// point, so neighbouring points are paired.
pub fn run_ser_experiment(cfg: &ExperimentConfig) -> Result<Vec<SerPoint>> {
    if cfg.experiment == ExperimentKind::IsiValidate {
        return Err(HarnessError::config("isi-validate is not an SER experiment"));
    }
    cfg.validate()?;
    cfg.sweep().iter().map(|p| run_point(cfg, p)).collect()
}
