//! Waveform-recovery receiver.
//!
//! Each tap `p` gets its own matched filter: the antenna waveforms are
//! advanced by `τ_p`, projected onto the known gain vector `α[p]` and scaled
//! by `1/M`. The per-tap waveforms are combined linearly and the result is
//! sampled once per symbol and sliced. No equalizer follows.

use num_complex::Complex64;

use crate::channel::{ChannelRealization, PowerDelayProfile};
use crate::waveform::{slice_qpsk, PulseShape, SampledWaveform};
use crate::{Error, Result};

/// Real combining coefficients `η[p]`, one per tap.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinerWeights {
    eta: Vec<f64>,
}

impl CombinerWeights {
    pub fn new(eta: Vec<f64>) -> Result<Self> {
        if eta.is_empty() {
            return Err(Error::Weights("no weights".into()));
        }
        if eta.iter().any(|w| !w.is_finite()) {
            return Err(Error::Weights("weights must be finite".into()));
        }
        if eta.iter().all(|&w| w == 0.0) {
            return Err(Error::Weights("weights are all zero".into()));
        }
        Ok(Self { eta })
    }

    pub fn equal(taps: usize) -> Result<Self> {
        Self::new(vec![1.0; taps])
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.eta.iter().map(|w| w * factor).collect())
    }
}

/// Soft decision variables and the symbols they slice to.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionRecord {
    pub decided: Vec<Complex64>,
    pub soft: Vec<Complex64>,
    /// Baud-rate samples of every per-tap waveform, when the record was
    /// produced by [`receive`].
    pub per_tap: Option<Vec<Vec<Complex64>>>,
}

impl DecisionRecord {
    pub fn len(&self) -> usize {
        self.soft.len()
    }

    pub fn is_empty(&self) -> bool {
        self.soft.is_empty()
    }
}

fn check_inputs(x: &[SampledWaveform], chan: &ChannelRealization) -> Result<()> {
    if x.len() != chan.antennas() {
        return Err(Error::AntennaCount {
            expected: chan.antennas(),
            actual: x.len(),
        });
    }
    let first = &x[0];
    if x.iter().any(|w| !w.same_grid(first) || w.len() != first.len()) {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// Tap delays in samples, and the length of the window over which every
/// advanced copy still lies inside the received waveforms.
fn tap_offsets(x: &SampledWaveform, chan: &ChannelRealization) -> Result<(Vec<usize>, usize)> {
    let ts = x.sample_period;
    let offsets: Vec<usize> = chan
        .profile()
        .delays()
        .map(|d| (d / ts).round().max(0.0) as usize)
        .collect();
    let max = offsets.iter().copied().max().unwrap_or(0);
    if max >= x.len() {
        return Err(Error::DelayBeyondWindow {
            delay_samples: max,
            available: x.len(),
        });
    }
    Ok((offsets, x.len() - max))
}

/// `ŝ_p(t) = (1/M) αᴴ[p] x(t + τ_p)`.
///
/// The output keeps the grid and origin of the inputs and is shortened by the
/// largest tap delay, so every tap of the same channel yields a waveform of
/// the same extent.
pub fn recover_tap(x: &[SampledWaveform], chan: &ChannelRealization, p: usize) -> Result<SampledWaveform> {
    if p >= chan.tap_count() {
        return Err(Error::TapIndex {
            index: p,
            taps: chan.tap_count(),
        });
    }
    check_inputs(x, chan)?;
    let (offsets, len) = tap_offsets(&x[0], chan)?;
    let d = offsets[p];
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for (xm, a) in x.iter().zip(chan.tap_vector(p)) {
        let w = a.conj();
        for (o, v) in out.iter_mut().zip(&xm.samples[d..d + len]) {
            *o += w * v;
        }
    }
    let scale = 1.0 / chan.antennas() as f64;
    out.iter_mut().for_each(|z| *z *= scale);
    Ok(SampledWaveform {
        samples: out,
        sample_period: x[0].sample_period,
        origin: x[0].origin,
    })
}

/// `ŝ(t) = Σ_p η[p] ŝ_p(t)`.
pub fn combine(per_tap: &[SampledWaveform], w: &CombinerWeights) -> Result<SampledWaveform> {
    if per_tap.len() != w.len() {
        return Err(Error::Weights(format!(
            "{} weights for {} tap waveforms",
            w.len(),
            per_tap.len()
        )));
    }
    let first = &per_tap[0];
    if per_tap
        .iter()
        .any(|s| !s.same_grid(first) || s.len() != first.len())
    {
        return Err(Error::GridMismatch);
    }
    let mut out = vec![Complex64::new(0.0, 0.0); first.len()];
    for (s, &eta) in per_tap.iter().zip(w.eta()) {
        for (o, v) in out.iter_mut().zip(&s.samples) {
            *o += v * eta;
        }
    }
    Ok(SampledWaveform {
        samples: out,
        sample_period: first.sample_period,
        origin: first.origin,
    })
}

/// Equal weights. The combined SNR is invariant to a common scale, so any
/// constant vector is optimal; ones are returned.
pub fn optimal_weights(profile: &PowerDelayProfile) -> CombinerWeights {
    CombinerWeights::equal(profile.tap_count()).expect("profiles have at least one tap")
}

/// Samples `s_hat` at `t = kT` for `k = 0..symbol_count` and slices each
/// sample to the nearest QPSK point.
pub fn sample_and_slice(
    s_hat: &SampledWaveform,
    pulse: &PulseShape,
    symbol_count: usize,
) -> Result<DecisionRecord> {
    let soft = baud_samples(s_hat, pulse, symbol_count)?;
    Ok(DecisionRecord {
        decided: soft.iter().map(|&z| slice_qpsk(z)).collect(),
        soft,
        per_tap: None,
    })
}

fn baud_samples(s: &SampledWaveform, pulse: &PulseShape, symbol_count: usize) -> Result<Vec<Complex64>> {
    (0..symbol_count)
        .map(|k| {
            s.index_at(k as f64 * pulse.symbol_period())
                .map(|i| s.samples[i])
                .ok_or(Error::OutOfWindow { index: k })
        })
        .collect()
}

/// Full receiver: [`recover_tap`] for every tap, [`combine`], then
/// [`sample_and_slice`]. The per-tap baud samples are kept in the record.
pub fn receive(
    x: &[SampledWaveform],
    chan: &ChannelRealization,
    w: &CombinerWeights,
    pulse: &PulseShape,
    symbol_count: usize,
) -> Result<DecisionRecord> {
    let per_tap = (0..chan.tap_count())
        .map(|p| recover_tap(x, chan, p))
        .collect::<Result<Vec<_>>>()?;
    let combined = combine(&per_tap, w)?;
    let mut record = sample_and_slice(&combined, pulse, symbol_count)?;
    record.per_tap = Some(
        per_tap
            .iter()
            .map(|s| baud_samples(s, pulse, symbol_count))
            .collect::<Result<Vec<_>>>()?,
    );
    Ok(record)
}

/// The same receiver written as one matched filter per antenna,
/// `ŝ(t) = (1/M) cᴴ(−t) ⋆ x(t)` with `c_m(t) = Σ_l α_m[l] δ(t − τ_l)`,
/// summed over antennas. Equal to [`combine`] over [`recover_tap`] with unit
/// weights.
pub fn matched_filter_bank(x: &[SampledWaveform], chan: &ChannelRealization) -> Result<SampledWaveform> {
    check_inputs(x, chan)?;
    let (offsets, len) = tap_offsets(&x[0], chan)?;
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for (m, xm) in x.iter().enumerate() {
        let mut filtered = vec![Complex64::new(0.0, 0.0); len];
        for (l, &d) in offsets.iter().enumerate() {
            let h = chan.gain(m, l).conj();
            for (o, v) in filtered.iter_mut().zip(&xm.samples[d..d + len]) {
                *o += h * v;
            }
        }
        for (o, v) in out.iter_mut().zip(filtered) {
            *o += v;
        }
    }
    let scale = 1.0 / chan.antennas() as f64;
    out.iter_mut().for_each(|z| *z *= scale);
    Ok(SampledWaveform {
        samples: out,
        sample_period: x[0].sample_period,
        origin: x[0].origin,
    })
}
