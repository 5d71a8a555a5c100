//! Decision-point SNR measured on frozen channels.
//!
//! Each trial transmits the same burst twice through one channel draw: once
//! noiseless, giving the coherent signal gain, and once with zero symbols,
//! giving the noise alone.

use lsasc_core::specfun::SimRng;
use lsasc_core::waveform::SymbolStream;
use lsasc_core::Complex64;
use rayon::prelude::*;

use crate::error::{HarnessError, Result};
use crate::experiment::{Link, TrialSeeds};

/// Linear SNRs averaged over channel draws.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrMeasurement {
    pub per_tap: Vec<f64>,
    pub combined: f64,
}

fn snr(output: &[Complex64], noise: &[Complex64], symbols: &[Complex64]) -> f64 {
    let n = symbols.len() as f64;
    let gain: Complex64 = output
        .iter()
        .zip(symbols)
        .map(|(y, s)| y * s.conj())
        .sum::<Complex64>()
        / n;
    let noise_power = noise.iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
    gain.norm_sqr() / noise_power
}

fn trial_snr(link: &Link, seeds: TrialSeeds, symbols: usize) -> lsasc_core::Result<(Vec<f64>, f64)> {
    let chan = link.model.draw(&mut SimRng::new(seeds.channel));
    let payload = SymbolStream::random(symbols, &mut SimRng::new(seeds.symbols));
    let zeros = vec![Complex64::new(0.0, 0.0); symbols];
    let (burst, signal) = link.transmit(&chan, &payload, 0.0, seeds.noise)?;
    let (_, noise) = link.transmit(&chan, &zeros, link.n0, seeds.noise)?;
    let range = burst.payload_range();
    let sig_taps = signal.per_tap.as_ref().expect("receive fills per-tap samples");
    let noise_taps = noise.per_tap.as_ref().expect("receive fills per-tap samples");
    let per_tap = sig_taps
        .iter()
        .zip(noise_taps)
        .map(|(s, z)| snr(&s[range.clone()], &z[range.clone()], &payload))
        .collect();
    let combined = snr(&signal.soft[range.clone()], &noise.soft[range], &payload);
    Ok((per_tap, combined))
}

/// Mean over `trials` channel draws of the per-tap and combined SNR.
pub fn measure_snr(link: &Link, seed: u64, trials: usize, symbols: usize) -> Result<SnrMeasurement> {
    if trials == 0 || symbols == 0 || link.n0.is_nan() || link.n0 <= 0.0 {
        return Err(HarnessError::config(
            "SNR calibration needs trials, symbols and N0 > 0",
        ));
    }
    let runs = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            trial_snr(link, TrialSeeds::new(seed, trial), symbols).map_err(|source| HarnessError::Trial {
                trial,
                x: link.n0,
                source,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = trials as f64;
    let taps = link.model.profile().tap_count();
    let per_tap = (0..taps)
        .map(|p| runs.iter().map(|(t, _)| t[p]).sum::<f64>() / n)
        .collect();
    let combined = runs.iter().map(|(_, c)| c).sum::<f64>() / n;
    Ok(SnrMeasurement { per_tap, combined })
}
