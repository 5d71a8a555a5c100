//! Multipath Rayleigh channel toward a uniform linear array.
//!
//! Every tap carries an independent complex Gaussian gain vector across the
//! array. Antennas are either independent or correlated through the Jakes
//! kernel `J0(2π d/λ)` evaluated at the inter-element distance, with the
//! array aperture `D` held fixed so that element spacing is `D/(M-1)`.

use num_complex::Complex64;

use crate::specfun::{bessel_j0, cholesky, HermitianMatrix, LowerTriangular, SimRng};
use crate::{Error, Result};

/// Extended Typical Urban profile: delay in nanoseconds, relative power in dB.
pub const ETU_TABLE: [(f64, f64); 9] = [
    (0.0, -1.0),
    (50.0, -1.0),
    (120.0, -1.0),
    (200.0, 0.0),
    (230.0, 0.0),
    (500.0, 0.0),
    (1600.0, -3.0),
    (2300.0, -5.0),
    (5000.0, -7.0),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    /// Seconds.
    pub delay: f64,
    /// Linear power.
    pub power: f64,
}

/// Tap delays and powers of a multipath channel, normalized to unit total power.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDelayProfile {
    taps: Vec<Tap>,
}

impl PowerDelayProfile {
    /// Validates strictly increasing, non-negative delays and positive powers,
    /// then rescales the powers to sum to one.
    pub fn from_linear(taps: &[(f64, f64)]) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::Profile("no taps".into()));
        }
        let mut prev = f64::NEG_INFINITY;
        for &(delay, power) in taps {
            if !delay.is_finite() || delay < 0.0 {
                return Err(Error::Profile(format!(
                    "delay {delay} must be finite and non-negative"
                )));
            }
            if delay <= prev {
                return Err(Error::Profile(format!(
                    "delays must be strictly increasing ({delay} after {prev})"
                )));
            }
            if !(power > 0.0) || !power.is_finite() {
                return Err(Error::Profile(format!("power {power} must be positive")));
            }
            prev = delay;
        }
        let total: f64 = taps.iter().map(|t| t.1).sum();
        Ok(Self {
            taps: taps
                .iter()
                .map(|&(delay, power)| Tap {
                    delay,
                    power: power / total,
                })
                .collect(),
        })
    }

    /// Uniform profile of `count` taps spaced `spacing` seconds apart.
    pub fn uniform(count: usize, spacing: f64) -> Result<Self> {
        let taps: Vec<_> = (0..count).map(|l| (l as f64 * spacing, 1.0)).collect();
        Self::from_linear(&taps)
    }

    /// The ETU table with delays converted to seconds.
    pub fn etu() -> Self {
        let raw: Vec<_> = ETU_TABLE.iter().map(|&(ns, db)| (ns * 1e-9, db)).collect();
        normalize_profile(&raw).expect("ETU table is well formed")
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    pub fn tap_count(&self) -> usize {
        self.taps.len()
    }

    pub fn delays(&self) -> impl Iterator<Item = f64> + '_ {
        self.taps.iter().map(|t| t.delay)
    }

    pub fn powers(&self) -> impl Iterator<Item = f64> + '_ {
        self.taps.iter().map(|t| t.power)
    }

    pub fn max_delay(&self) -> f64 {
        self.taps.last().map_or(0.0, |t| t.delay)
    }

    pub fn total_power(&self) -> f64 {
        self.powers().sum()
    }

    /// Rounds every delay to the nearest multiple of `step`. Taps landing on
    /// the same grid point are merged by adding their powers, which leaves the
    /// channel statistics unchanged since a sum of independent zero-mean
    /// Gaussians is Gaussian with the summed variance.
    pub fn quantized(&self, step: f64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::Profile(format!("grid step {step} must be positive")));
        }
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(self.taps.len());
        for tap in &self.taps {
            let delay = (tap.delay / step).round() * step;
            match merged.last_mut() {
                Some(last) if (last.0 - delay).abs() < 0.5 * step => last.1 += tap.power,
                _ => merged.push((delay, tap.power)),
            }
        }
        Self::from_linear(&merged)
    }

    /// True when every delay is within `1e-9` grid steps of a multiple of `step`.
    pub fn is_on_grid(&self, step: f64) -> bool {
        self.delays().all(|d| {
            let k = d / step;
            (k - k.round()).abs() < 1e-9
        })
    }
}

/// Converts `(delay seconds, power dB)` pairs into a unit-power profile.
pub fn normalize_profile(raw: &[(f64, f64)]) -> Result<PowerDelayProfile> {
    for &(_, db) in raw {
        if !db.is_finite() {
            return Err(Error::Profile(format!("power {db} dB is not finite")));
        }
    }
    let linear: Vec<_> = raw.iter().map(|&(d, db)| (d, 10f64.powf(db / 10.0))).collect();
    PowerDelayProfile::from_linear(&linear)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationMode {
    Independent,
    Jakes,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    antennas: usize,
    d_over_lambda: f64,
    mode: CorrelationMode,
}

impl ArrayGeometry {
    pub fn independent(antennas: usize) -> Result<Self> {
        if antennas == 0 {
            return Err(Error::Geometry("at least one antenna is required".into()));
        }
        Ok(Self {
            antennas,
            d_over_lambda: 0.0,
            mode: CorrelationMode::Independent,
        })
    }

    /// ULA of aperture `d_over_lambda` wavelengths with Jakes correlation.
    pub fn jakes(antennas: usize, d_over_lambda: f64) -> Result<Self> {
        if antennas < 2 {
            return Err(Error::Geometry(
                "a correlated array needs at least two antennas".into(),
            ));
        }
        if !d_over_lambda.is_finite() || d_over_lambda < 0.0 {
            return Err(Error::Geometry(format!(
                "array length {d_over_lambda} must be finite and non-negative"
            )));
        }
        Ok(Self {
            antennas,
            d_over_lambda,
            mode: CorrelationMode::Jakes,
        })
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn d_over_lambda(&self) -> f64 {
        self.d_over_lambda
    }

    pub fn mode(&self) -> CorrelationMode {
        self.mode
    }

    /// Correlation between two antennas `lag` positions apart.
    pub fn correlation_at_lag(&self, lag: usize) -> f64 {
        match self.mode {
            CorrelationMode::Independent => {
                if lag == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            CorrelationMode::Jakes => {
                let spacing = self.d_over_lambda / (self.antennas - 1) as f64;
                jakes_correlation(lag as f64 * spacing)
            }
        }
    }
}

/// `J0(2π d/λ)`. Non-finite input yields NaN.
pub fn jakes_correlation(d_over_lambda: f64) -> f64 {
    bessel_j0(2.0 * std::f64::consts::PI * d_over_lambda).unwrap_or(f64::NAN)
}

/// Dense spatial correlation matrix `[R]_(m,m0) = ρ((m−m0)/(M−1) · D/λ)`.
pub fn build_correlation_matrix(geom: &ArrayGeometry) -> HermitianMatrix {
    if geom.mode == CorrelationMode::Independent {
        return HermitianMatrix::identity(geom.antennas);
    }
    let row: Vec<f64> = (0..geom.antennas).map(|k| geom.correlation_at_lag(k)).collect();
    HermitianMatrix::symmetric_toeplitz(&row).expect("Toeplitz rows are symmetric")
}

/// One draw of the tap gain vectors: `M` antennas by `L+1` taps.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    antennas: usize,
    // Tap-major: the gain vector of tap l occupies gains[l*M..(l+1)*M].
    gains: Vec<Complex64>,
    profile: PowerDelayProfile,
}

impl ChannelRealization {
    /// Wraps explicit gains, given tap-major (one `antennas`-long vector per tap).
    pub fn from_gains(profile: PowerDelayProfile, antennas: usize, gains: Vec<Complex64>) -> Result<Self> {
        if antennas == 0 || gains.len() != antennas * profile.tap_count() {
            return Err(Error::InvalidArgument(format!(
                "{} gains do not fill {} antennas by {} taps",
                gains.len(),
                antennas,
                profile.tap_count()
            )));
        }
        Ok(Self {
            antennas,
            gains,
            profile,
        })
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn tap_count(&self) -> usize {
        self.profile.tap_count()
    }

    pub fn profile(&self) -> &PowerDelayProfile {
        &self.profile
    }

    /// Gain vector `α[l]` across the array.
    pub fn tap_vector(&self, l: usize) -> &[Complex64] {
        &self.gains[l * self.antennas..(l + 1) * self.antennas]
    }

    pub fn gain(&self, antenna: usize, tap: usize) -> Complex64 {
        self.gains[tap * self.antennas + antenna]
    }

    /// Scales every gain by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            antennas: self.antennas,
            gains: self.gains.iter().map(|g| g * factor).collect(),
            profile: self.profile.clone(),
        }
    }
}

/// Profile plus precomputed coloring transform, for repeated draws.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    profile: PowerDelayProfile,
    geometry: ArrayGeometry,
    coloring: Option<LowerTriangular>,
}

impl ChannelModel {
    pub fn new(profile: PowerDelayProfile, geometry: ArrayGeometry) -> Result<Self> {
        let coloring = match geometry.mode {
            CorrelationMode::Independent => None,
            CorrelationMode::Jakes => Some(cholesky(&build_correlation_matrix(&geometry))?),
        };
        Ok(Self {
            profile,
            geometry,
            coloring,
        })
    }

    pub fn profile(&self) -> &PowerDelayProfile {
        &self.profile
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }

    /// Column `l` is `σ_l · G · w_l` with `w_l` i.i.d. CN(0, 1), drawn tap by tap.
    pub fn draw(&self, rng: &mut SimRng) -> ChannelRealization {
        let m = self.geometry.antennas;
        let mut gains = vec![Complex64::new(0.0, 0.0); m * self.profile.tap_count()];
        let mut white = vec![Complex64::new(0.0, 0.0); m];
        for (tap, column) in self.profile.taps().iter().zip(gains.chunks_exact_mut(m)) {
            rng.fill_gaussian(&mut white);
            match &self.coloring {
                Some(g) => g.apply(&white, column),
                None => column.copy_from_slice(&white),
            }
            let sigma = tap.power.sqrt();
            column.iter_mut().for_each(|z| *z *= sigma);
        }
        ChannelRealization {
            antennas: m,
            gains,
            profile: self.profile.clone(),
        }
    }
}

/// Single draw; factors the correlation matrix on every call. Use
/// [`ChannelModel`] when drawing repeatedly.
pub fn draw_channel(
    profile: &PowerDelayProfile,
    geom: &ArrayGeometry,
    rng: &mut SimRng,
) -> Result<ChannelRealization> {
    Ok(ChannelModel::new(profile.clone(), *geom)?.draw(rng))
}

/// `(1/M) αᴴ[p] α[l]`.
pub fn sample_cross_correlation(chan: &ChannelRealization, l: usize, p: usize) -> Result<Complex64> {
    let taps = chan.tap_count();
    for index in [l, p] {
        if index >= taps {
            return Err(Error::TapIndex { index, taps });
        }
    }
    let s: Complex64 = chan
        .tap_vector(p)
        .iter()
        .zip(chan.tap_vector(l))
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(s / chan.antennas as f64)
}
