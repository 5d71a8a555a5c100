//! QPSK symbols, Nyquist pulses and the oversampled transmit/receive chain.
//!
//! All filtering runs on a grid of `Q` samples per symbol. The transmit
//! filter uses unscaled root-raised-cosine samples `h(kTs)`; the receive
//! filter carries the extra `Ts` factor of a discretized convolution
//! integral, so transmit ⋆ receive approximates the raised cosine `g` with
//! `g(0) ≈ 1` and white noise of density `N0` leaves the receive filter with
//! variance `N0`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::ops::Deref;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::ChannelRealization;
use crate::specfun::{RngSeed, SimRng};
use crate::{Error, Result};

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

/// Raised-cosine impulse response with `g(0) = 1` and `g(kT) = δ[k]`.
///
/// `cos(πβt/T) / (1 − (2βt/T)²)` is evaluated as
/// `(π/2)·sinc((1 − |u|)/2) / (1 + |u|)` with `u = 2βt/T`, which is the same
/// function without the removable singularity at `|t| = T/(2β)`.
pub fn raised_cosine(t: f64, rolloff: f64, symbol_period: f64) -> f64 {
    let x = t / symbol_period;
    let u = (2.0 * rolloff * x).abs();
    sinc(x) * 0.5 * PI * sinc(0.5 * (1.0 - u)) / (1.0 + u)
}

/// Unit-energy root-raised-cosine impulse response.
///
/// Both removable singularities, at `t = 0` and `|t| = T/(4β)`, are replaced
/// by their limits.
pub fn root_raised_cosine(t: f64, rolloff: f64, symbol_period: f64) -> f64 {
    let scale = 1.0 / symbol_period.sqrt();
    let x = t / symbol_period;
    let b = rolloff;
    if x.abs() < 1e-12 {
        return scale * (1.0 - b + 4.0 * b / PI);
    }
    if b > 0.0 && (4.0 * b * x.abs() - 1.0).abs() < 1e-9 {
        let a = PI / (4.0 * b);
        return scale * b / 2f64.sqrt() * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos());
    }
    let num = (PI * x * (1.0 - b)).sin() + 4.0 * b * x * (PI * x * (1.0 + b)).cos();
    let den = PI * x * (1.0 - (4.0 * b * x).powi(2));
    scale * num / den
}

/// Full linear convolution of a complex sequence with real taps.
pub(crate) fn convolve(signal: &[Complex64], taps: &[f64]) -> Vec<Complex64> {
    if signal.is_empty() || taps.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); signal.len() + taps.len() - 1];
    for (i, &s) in signal.iter().enumerate() {
        if s == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (o, &h) in out[i..i + taps.len()].iter_mut().zip(taps) {
            *o += s * h;
        }
    }
    out
}

fn convolve_real(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (o, &y) in out[i..i + b.len()].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    out
}

/// Root-raised-cosine transmit/receive pair on an oversampled grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseShape {
    rolloff: f64,
    symbol_period: f64,
    span: usize,
    oversampling: usize,
    transmit: Vec<f64>,
    receive: Vec<f64>,
    combined: Vec<f64>,
}

impl PulseShape {
    /// `span` is the one-sided filter length in symbols, `oversampling` the
    /// number of samples per symbol.
    pub fn new(rolloff: f64, symbol_period: f64, span: usize, oversampling: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&rolloff) {
            return Err(Error::Pulse(format!("roll-off {rolloff} outside [0, 1]")));
        }
        if !(symbol_period > 0.0) || !symbol_period.is_finite() {
            return Err(Error::Pulse(format!(
                "symbol period {symbol_period} must be positive"
            )));
        }
        if span < 4 {
            return Err(Error::Pulse(format!("span {span} is shorter than 4 symbols")));
        }
        if oversampling < 2 {
            return Err(Error::Pulse(format!("oversampling {oversampling} is below 2")));
        }
        let ts = symbol_period / oversampling as f64;
        let half = (span * oversampling) as i64;
        let transmit: Vec<f64> = (-half..=half)
            .map(|k| root_raised_cosine(k as f64 * ts, rolloff, symbol_period))
            .collect();
        let receive: Vec<f64> = transmit.iter().map(|h| h * ts).collect();
        let combined = convolve_real(&transmit, &receive);
        Ok(Self {
            rolloff,
            symbol_period,
            span,
            oversampling,
            transmit,
            receive,
            combined,
        })
    }

    /// β = 0.25, T = 0.2 µs, 16-symbol span, two samples per symbol.
    pub fn uplink_default() -> Self {
        Self::new(0.25, 0.2e-6, 16, 2).expect("default pulse parameters are valid")
    }

    pub fn rolloff(&self) -> f64 {
        self.rolloff
    }

    pub fn symbol_period(&self) -> f64 {
        self.symbol_period
    }

    pub fn span(&self) -> usize {
        self.span
    }

    pub fn oversampling(&self) -> usize {
        self.oversampling
    }

    pub fn sample_period(&self) -> f64 {
        self.symbol_period / self.oversampling as f64
    }

    /// Root-raised-cosine samples `h(kTs)` for `|k| ≤ span·Q`.
    pub fn transmit_taps(&self) -> &[f64] {
        &self.transmit
    }

    /// Transmit taps scaled by `Ts`.
    pub fn receive_taps(&self) -> &[f64] {
        &self.receive
    }

    /// transmit ⋆ receive, centred on index `2·span·Q`.
    pub fn combined_taps(&self) -> &[f64] {
        &self.combined
    }

    /// Discrete overall response at `t`, rounded to the nearest grid point;
    /// zero outside the filter support.
    pub fn combined_at(&self, t: f64) -> f64 {
        let k = (t / self.sample_period()).round() as i64 + (2 * self.span * self.oversampling) as i64;
        if k < 0 {
            return 0.0;
        }
        self.combined.get(k as usize).copied().unwrap_or(0.0)
    }

    /// Analytic raised cosine with this pulse's roll-off and period.
    pub fn raised_cosine(&self, t: f64) -> f64 {
        raised_cosine(t, self.rolloff, self.symbol_period)
    }

    /// Number of grid samples in `delay`, rounded to nearest.
    pub fn delay_in_samples(&self, delay: f64) -> usize {
        (delay / self.sample_period()).round().max(0.0) as usize
    }
}

/// Sequence of QPSK symbols `(±1 ± j)/√2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolStream {
    symbols: Vec<Complex64>,
}

impl Deref for SymbolStream {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.symbols
    }
}

impl SymbolStream {
    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.symbols
    }

    /// Uniformly random symbols, two bits drawn per symbol.
    pub fn random(count: usize, rng: &mut SimRng) -> Self {
        Self {
            symbols: (0..count).map(|_| qpsk_symbol(rng.bit(), rng.bit())).collect(),
        }
    }
}

/// Gray map: the first bit selects the sign of the in-phase part, the second
/// the quadrature part, with `0 → +`.
pub fn qpsk_symbol(b0: bool, b1: bool) -> Complex64 {
    let re = if b0 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    let im = if b1 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    Complex64::new(re, im)
}

pub fn modulate_qpsk(bits: &[bool]) -> Result<SymbolStream> {
    if !bits.len().is_multiple_of(2) {
        return Err(Error::OddBitCount(bits.len()));
    }
    Ok(SymbolStream {
        symbols: bits.chunks_exact(2).map(|b| qpsk_symbol(b[0], b[1])).collect(),
    })
}

/// Minimum-distance QPSK decision, i.e. the quadrant of `z`. Ties on an axis
/// resolve toward the positive side.
pub fn slice_qpsk(z: Complex64) -> Complex64 {
    qpsk_symbol(z.re < 0.0, z.im < 0.0)
}

/// Payload framed by zero guard symbols on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct Burst {
    symbols: Vec<Complex64>,
    guard: usize,
    payload: usize,
}

impl Burst {
    pub fn new(payload: &[Complex64], guard: usize) -> Self {
        let mut symbols = vec![Complex64::new(0.0, 0.0); payload.len() + 2 * guard];
        symbols[guard..guard + payload.len()].copy_from_slice(payload);
        Self {
            symbols,
            guard,
            payload: payload.len(),
        }
    }

    /// `span + ⌈τ_max/T⌉`: enough zeros for edge symbols to see the full pulse
    /// and the longest echo.
    pub fn guard_for(pulse: &PulseShape, max_delay: f64) -> usize {
        pulse.span() + (max_delay / pulse.symbol_period() - 1e-9).ceil().max(0.0) as usize
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn payload_range(&self) -> std::ops::Range<usize> {
        self.guard..self.guard + self.payload
    }

    pub fn payload(&self) -> &[Complex64] {
        &self.symbols[self.payload_range()]
    }
}

/// Uniformly sampled complex baseband signal. Sample `i` sits at time
/// `origin + i·sample_period`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWaveform {
    pub samples: Vec<Complex64>,
    pub sample_period: f64,
    pub origin: f64,
}

impl SampledWaveform {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time_of(&self, index: usize) -> f64 {
        self.origin + index as f64 * self.sample_period
    }

    /// Sample index at time `t`, if `t` lies on the grid and inside the window.
    pub fn index_at(&self, t: f64) -> Option<usize> {
        let k = (t - self.origin) / self.sample_period;
        let r = k.round();
        if (k - r).abs() > 1e-6 || r < 0.0 || r as usize >= self.samples.len() {
            return None;
        }
        Some(r as usize)
    }

    pub fn same_grid(&self, other: &SampledWaveform) -> bool {
        (self.sample_period - other.sample_period).abs() <= 1e-12 * self.sample_period
            && (self.origin - other.origin).abs() <= 1e-6 * self.sample_period
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    /// Root-raised-cosine transmit filter only.
    TransmitOnly,
    /// Transmit and receive filters in cascade (raised cosine).
    Combined,
}

/// Upsamples `symbols` by `Q` and convolves with the selected filter. Symbol 0
/// sits at `t = 0`.
pub fn shape(symbols: &[Complex64], pulse: &PulseShape, filter: FilterKind) -> Result<SampledWaveform> {
    if symbols.is_empty() {
        return Err(Error::EmptySymbols);
    }
    let taps = match filter {
        FilterKind::TransmitOnly => pulse.transmit_taps(),
        FilterKind::Combined => pulse.combined_taps(),
    };
    let q = pulse.oversampling();
    let mut impulses = vec![Complex64::new(0.0, 0.0); (symbols.len() - 1) * q + 1];
    for (k, &s) in symbols.iter().enumerate() {
        impulses[k * q] = s;
    }
    let centre = (taps.len() - 1) / 2;
    Ok(SampledWaveform {
        samples: convolve(&impulses, taps),
        sample_period: pulse.sample_period(),
        origin: -(centre as f64) * pulse.sample_period(),
    })
}

/// Passes a transmit-filtered waveform through the multipath channel to every
/// antenna, adds white noise of density `n0` and applies the receive filter.
///
/// Tap delays are rounded to the sample grid. Antenna `m` draws its noise
/// from `noise_seed.child(m)`, so the output does not depend on how the
/// antennas are scheduled across threads. With `n0 = 0` no noise is drawn.
pub fn propagate(
    tx: &SampledWaveform,
    chan: &ChannelRealization,
    pulse: &PulseShape,
    n0: f64,
    noise_seed: RngSeed,
) -> Result<Vec<SampledWaveform>> {
    if (tx.sample_period - pulse.sample_period()).abs() > 1e-12 * pulse.sample_period() {
        return Err(Error::GridMismatch);
    }
    if !(n0 >= 0.0) || !n0.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "noise density {n0} must be non-negative"
        )));
    }
    let delays: Vec<usize> = chan
        .profile()
        .delays()
        .map(|d| pulse.delay_in_samples(d))
        .collect();
    let max_delay = delays.iter().copied().max().unwrap_or(0);
    if max_delay >= tx.len() {
        return Err(Error::DelayBeyondWindow {
            delay_samples: max_delay,
            available: tx.len(),
        });
    }

    let rx_taps = pulse.receive_taps();
    // The channel is linear, so the receive filter is applied once to the
    // transmit waveform and the filtered copy is delayed per tap.
    let filtered = convolve(&tx.samples, rx_taps);
    let noise_len = tx.len() + max_delay;
    let out_len = noise_len + rx_taps.len() - 1;
    let noise_std = (n0 / pulse.sample_period()).sqrt();
    let origin = tx.origin - ((rx_taps.len() - 1) / 2) as f64 * pulse.sample_period();

    let waveforms = (0..chan.antennas())
        .into_par_iter()
        .map(|m| {
            let mut x = vec![Complex64::new(0.0, 0.0); out_len];
            for (l, &d) in delays.iter().enumerate() {
                let a = chan.gain(m, l);
                for (o, &y) in x[d..d + filtered.len()].iter_mut().zip(&filtered) {
                    *o += a * y;
                }
            }
            if n0 > 0.0 {
                let mut rng = SimRng::new(noise_seed.child(m as u64));
                let mut noise = vec![Complex64::new(0.0, 0.0); noise_len];
                rng.fill_gaussian(&mut noise);
                noise.iter_mut().for_each(|z| *z *= noise_std);
                for (o, z) in x.iter_mut().zip(convolve(&noise, rx_taps)) {
                    *o += z;
                }
            }
            SampledWaveform {
                samples: x,
                sample_period: pulse.sample_period(),
                origin,
            }
        })
        .collect();
    Ok(waveforms)
}
