//! Closed-form performance expressions for the waveform-recovery receiver.

use num_complex::Complex64;

use crate::channel::{ArrayGeometry, ChannelRealization, CorrelationMode, PowerDelayProfile};
use crate::receiver::CombinerWeights;
use crate::specfun::{bessel_j0, integrate};
use crate::waveform::PulseShape;
use crate::{Error, Result};

/// Quadrature tolerance for [`p0_limit`].
pub const P0_LIMIT_TOL: f64 = 1e-9;

/// Residual-ISI power with its per-lag breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct IsiReport {
    pub p_isi: f64,
    pub p0: f64,
    /// `(n, contribution)` for every lag `0 < |n| ≤ lag_window`.
    pub per_lag: Vec<(i64, f64)>,
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {v} must be positive")))
    }
}

/// `σ_p² M / N0`.
pub fn snr_single_tap(sigma_p_sq: f64, antennas: usize, n0: f64) -> Result<f64> {
    require_positive("tap power", sigma_p_sq)?;
    require_positive("antenna count", antennas as f64)?;
    require_positive("N0", n0)?;
    Ok(sigma_p_sq * antennas as f64 / n0)
}

/// `M (Σ σ_p² η[p])² / (N0 Σ σ_p² η[p]²)`.
pub fn snr_combined(
    profile: &PowerDelayProfile,
    w: &CombinerWeights,
    antennas: usize,
    n0: f64,
) -> Result<f64> {
    require_positive("antenna count", antennas as f64)?;
    require_positive("N0", n0)?;
    if w.len() != profile.tap_count() {
        return Err(Error::Weights(format!(
            "{} weights for {} taps",
            w.len(),
            profile.tap_count()
        )));
    }
    let (num, den) = profile
        .powers()
        .zip(w.eta())
        .fold((0.0, 0.0), |(n, d), (s, &e)| (n + s * e, d + s * e * e));
    Ok(antennas as f64 * num * num / (n0 * den))
}

/// `tr{R²} = Σ_{m=−(M−1)}^{M−1} ρ²(m/(M−1) · D/λ)(M − |m|)`.
pub fn trace_r_squared(geom: &ArrayGeometry) -> f64 {
    let m = geom.antennas();
    match geom.mode() {
        CorrelationMode::Independent => m as f64,
        CorrelationMode::Jakes => {
            let off: f64 = (1..m)
                .map(|lag| geom.correlation_at_lag(lag).powi(2) * (m - lag) as f64)
                .sum();
            m as f64 + 2.0 * off
        }
    }
}

/// `tr{R²} / M²`.
pub fn p0(geom: &ArrayGeometry) -> f64 {
    let m = geom.antennas() as f64;
    trace_r_squared(geom) / (m * m)
}

/// Large-array limit `∫_{−1}^{1} J0²(2π x D/λ)(1 − |x|) dx`.
pub fn p0_limit(d_over_lambda: f64) -> Result<f64> {
    if !(d_over_lambda >= 0.0) || !d_over_lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "array length {d_over_lambda} must be finite and non-negative"
        )));
    }
    let k = 2.0 * std::f64::consts::PI * d_over_lambda;
    let integrand = |x: f64| bessel_j0(k * x).unwrap_or(f64::NAN).powi(2) * (1.0 - x);
    // Symmetric integrand: integrate [0, 1] and double. Splitting into pieces of
    // about a quarter oscillation keeps each Kronrod panel well resolved.
    let pieces = (4.0 * d_over_lambda).ceil().max(1.0) as usize;
    let tol = 0.5 * P0_LIMIT_TOL / pieces as f64;
    let mut total = 0.0;
    for i in 0..pieces {
        let a = i as f64 / pieces as f64;
        let b = (i + 1) as f64 / pieces as f64;
        total += integrate(integrand, a, b, tol)?;
    }
    Ok(2.0 * total)
}

/// Overall discrete impulse response `f[n] = (1/M) Σ_l Σ_p αᴴ[p]α[l] g(nT − τ_l + τ_p)`
/// of one channel realization, with the delays rounded to the sample grid and
/// `g` the discrete transmit-receive cascade of `pulse`. This is the response
/// the simulated receiver produces.
pub fn impulse_response(chan: &ChannelRealization, pulse: &PulseShape, n: i64) -> Complex64 {
    let m = chan.antennas();
    let q = pulse.oversampling() as i64;
    let taps = pulse.combined_taps();
    let centre = (taps.len() / 2) as i64;
    let delays: Vec<i64> = chan
        .profile()
        .delays()
        .map(|d| pulse.delay_in_samples(d) as i64)
        .collect();
    let mut f = Complex64::new(0.0, 0.0);
    for (p, &dp) in delays.iter().enumerate() {
        for (l, &dl) in delays.iter().enumerate() {
            let idx = centre + n * q - dl + dp;
            if idx < 0 || idx as usize >= taps.len() {
                continue;
            }
            let g = taps[idx as usize];
            if g == 0.0 {
                continue;
            }
            let inner: Complex64 = chan
                .tap_vector(p)
                .iter()
                .zip(chan.tap_vector(l))
                .map(|(a, b)| a.conj() * b)
                .sum();
            f += inner * g;
        }
    }
    f / m as f64
}

/// `Σ_p Σ_l σ_p² σ_l² g²(nT − τ_l + τ_p)` with the analytic raised cosine.
fn lag_energy(profile: &PowerDelayProfile, pulse: &PulseShape, n: i64) -> f64 {
    let t = n as f64 * pulse.symbol_period();
    let taps = profile.taps();
    let mut sum = 0.0;
    for tp in taps {
        for tl in taps {
            sum += tp.power * tl.power * pulse.raised_cosine(t - tl.delay + tp.delay).powi(2);
        }
    }
    sum
}

/// `⌈τ_max/T⌉ + span`: beyond this lag every term of the residual-ISI sum
/// involves the pulse outside its truncated support.
pub fn default_lag_window(profile: &PowerDelayProfile, pulse: &PulseShape) -> usize {
    (profile.max_delay() / pulse.symbol_period() - 1e-9)
        .ceil()
        .max(0.0) as usize
        + pulse.span()
}

/// `P_ISI = P0 Σ_{n≠0} Σ_p Σ_l σ_p² σ_l² g²(nT − τ_l + τ_p)` for `0 < |n| ≤ lag_window`.
///
/// Delays are taken from `profile` as given; pass a grid-quantized profile to
/// compare with the simulator.
pub fn p_isi(
    profile: &PowerDelayProfile,
    pulse: &PulseShape,
    geom: &ArrayGeometry,
    lag_window: usize,
) -> IsiReport {
    let p0 = p0(geom);
    let w = lag_window as i64;
    let per_lag: Vec<(i64, f64)> = (-w..=w)
        .filter(|&n| n != 0)
        .map(|n| (n, p0 * lag_energy(profile, pulse, n)))
        .collect();
    IsiReport {
        p_isi: per_lag.iter().map(|(_, c)| c).sum(),
        p0,
        per_lag,
    }
}

/// Ensemble mean of `|f[n]|²`: `g²(nT) + P0 Σ_p Σ_l σ_p² σ_l² g²(nT − τ_l + τ_p)`.
pub fn mean_impulse_power(
    profile: &PowerDelayProfile,
    pulse: &PulseShape,
    geom: &ArrayGeometry,
    n: i64,
) -> f64 {
    pulse.raised_cosine(n as f64 * pulse.symbol_period()).powi(2) + p0(geom) * lag_energy(profile, pulse, n)
}

/// `P0 (1 − Σ σ_l⁴)`, valid when every delay is a whole number of symbols.
pub fn p_isi_integer_delays(profile: &PowerDelayProfile, p0_val: f64, symbol_period: f64) -> Result<f64> {
    if !profile.is_on_grid(symbol_period) {
        return Err(Error::Profile(
            "delays are not integer multiples of the symbol period".into(),
        ));
    }
    if !(p0_val > 0.0 && p0_val <= 1.0) {
        return Err(Error::InvalidArgument(format!("P0 = {p0_val} outside (0, 1]")));
    }
    Ok(p0_val * (1.0 - profile.powers().map(|s| s * s).sum::<f64>()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_correlation_matrix, ChannelModel};
    use crate::specfun::{RngSeed, SimRng};
    use proptest::prelude::*;

    const T: f64 = 0.2e-6;

    fn random_profile(rng: &mut SimRng, taps: usize, spacing: f64) -> PowerDelayProfile {
        let raw: Vec<_> = (0..taps)
            .map(|l| (l as f64 * spacing, 0.01 + rng.uniform()))
            .collect();
        PowerDelayProfile::from_linear(&raw).unwrap()
    }

    #[test]
    fn single_tap_snr() {
        assert_eq!(snr_single_tap(1.0, 100, 1.0).unwrap(), 100.0);
        assert_eq!(snr_single_tap(0.5, 100, 1.0).unwrap(), 50.0);
        assert!((snr_single_tap(1.0 / 9.0, 128, 0.1).unwrap() - 142.222_222_222_222_2).abs() < 1e-9);
        assert!(snr_single_tap(0.0, 100, 1.0).is_err());
        assert!(snr_single_tap(1.0, 0, 1.0).is_err());
        assert!(snr_single_tap(1.0, 10, -1.0).is_err());
    }

    #[test]
    fn combined_snr() {
        let etu = PowerDelayProfile::etu();
        let w = CombinerWeights::equal(9).unwrap();
        assert!((snr_combined(&etu, &w, 100, 1.0).unwrap() - 100.0).abs() < 1e-10);

        let single = PowerDelayProfile::from_linear(&[(0.0, 1.0)]).unwrap();
        let w = CombinerWeights::new(vec![3.7]).unwrap();
        assert!(
            (snr_combined(&single, &w, 64, 0.5).unwrap() - snr_single_tap(1.0, 64, 0.5).unwrap()).abs()
                < 1e-12
        );

        assert!(snr_combined(&etu, &CombinerWeights::equal(3).unwrap(), 100, 1.0).is_err());
        assert!(snr_combined(&etu, &CombinerWeights::equal(9).unwrap(), 100, 0.0).is_err());
    }

    #[test]
    fn equal_weights_maximize_combined_snr() {
        let mut rng = SimRng::new(RngSeed(17));
        for _ in 0..20 {
            let taps = 2 + (rng.next_u64() % 10) as usize;
            let profile = random_profile(&mut rng, taps, T);
            let best = snr_combined(&profile, &CombinerWeights::equal(taps).unwrap(), 64, 0.3).unwrap();
            for _ in 0..1000 {
                let w = CombinerWeights::new((0..taps).map(|_| rng.uniform() * 2.0 - 0.5).collect()).unwrap();
                assert!(snr_combined(&profile, &w, 64, 0.3).unwrap() <= best * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn trace_forms() {
        assert_eq!(trace_r_squared(&ArrayGeometry::independent(64).unwrap()), 64.0);
        assert_eq!(trace_r_squared(&ArrayGeometry::jakes(10, 0.0).unwrap()), 100.0);
        let geom = ArrayGeometry::jakes(8, 2.0).unwrap();
        let dense = build_correlation_matrix(&geom).trace_of_square();
        assert!((trace_r_squared(&geom) - dense).abs() < 1e-10);
    }

    #[test]
    fn p0_values() {
        assert!((p0(&ArrayGeometry::independent(100).unwrap()) - 0.01).abs() < 1e-15);
        assert_eq!(p0(&ArrayGeometry::jakes(50, 0.0).unwrap()), 1.0);
        let trace = p0(&ArrayGeometry::jakes(512, 10.0).unwrap());
        let limit = p0_limit(10.0).unwrap();
        assert!((trace - limit).abs() / limit < 0.02, "{trace} vs {limit}");
    }

    #[test]
    fn p0_trace_form_converges_to_limit() {
        let limit = p0_limit(10.0).unwrap();
        let gaps: Vec<f64> = [64, 128, 256, 512]
            .iter()
            .map(|&m| (p0(&ArrayGeometry::jakes(m, 10.0).unwrap()) - limit).abs() / limit)
            .collect();
        for w in gaps.windows(2) {
            assert!(w[1] < w[0], "{gaps:?}");
        }
        assert!(gaps[3] < 0.02);
    }

    #[test]
    fn p0_limit_matches_trapezoid() {
        assert!((p0_limit(0.0).unwrap() - 1.0).abs() < 1e-12);
        let k = 2.0 * std::f64::consts::PI * 10.0;
        let n = 1_000_000;
        let h = 2.0 / n as f64;
        let f = |x: f64| bessel_j0(k * x).unwrap().powi(2) * (1.0 - x.abs());
        let trap = h * (0.5 * (f(-1.0) + f(1.0)) + (1..n).map(|i| f(-1.0 + i as f64 * h)).sum::<f64>());
        assert!((p0_limit(10.0).unwrap() - trap).abs() < 1e-6);
        assert!(p0_limit(-1.0).is_err());
    }

    #[test]
    fn p0_limit_positive_and_non_increasing() {
        let mut d = 0.0;
        while d <= 100.0 {
            assert!(p0_limit(d).unwrap() > 0.0, "D/λ = {d}");
            d += 2.5;
        }
        let grid = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0];
        let vals: Vec<f64> = grid.iter().map(|&d| p0_limit(d).unwrap()).collect();
        for w in vals.windows(2) {
            assert!(w[1] <= w[0], "{vals:?}");
        }
    }

    #[test]
    fn single_tap_impulse_response() {
        let pulse = PulseShape::uplink_default();
        let profile = PowerDelayProfile::from_linear(&[(0.0, 1.0)]).unwrap();
        let model = ChannelModel::new(profile, ArrayGeometry::independent(16).unwrap()).unwrap();
        let chan = model.draw(&mut SimRng::new(RngSeed(4)));
        let gain: f64 = chan.tap_vector(0).iter().map(|z| z.norm_sqr()).sum::<f64>() / 16.0;
        let f0 = impulse_response(&chan, &pulse, 0);
        assert!((f0.re - gain * pulse.combined_taps()[64]).abs() < 1e-12);
        assert!((f0.re - gain).abs() < 2e-3 * gain);
        for n in 1..20 {
            assert!(impulse_response(&chan, &pulse, n).norm() < 2e-3 * gain);
        }
    }

    #[test]
    fn large_array_impulse_response_is_a_kronecker_delta() {
        let pulse = PulseShape::uplink_default();
        let profile = PowerDelayProfile::etu().quantized(T).unwrap();
        let model = ChannelModel::new(profile, ArrayGeometry::independent(8192).unwrap()).unwrap();
        let chan = model.draw(&mut SimRng::new(RngSeed(6)));
        for n in -8..=8 {
            let want = if n == 0 { 1.0 } else { 0.0 };
            assert!((impulse_response(&chan, &pulse, n) - want).norm() < 0.05, "n={n}");
        }
    }

    #[test]
    fn isi_single_tap_is_zero() {
        let pulse = PulseShape::uplink_default();
        let profile = PowerDelayProfile::from_linear(&[(0.0, 1.0)]).unwrap();
        let r = p_isi(&profile, &pulse, &ArrayGeometry::independent(32).unwrap(), 20);
        assert!(r.p_isi < 1e-28);
        assert_eq!(r.per_lag.len(), 40);
    }

    #[test]
    fn isi_integer_delays_special_case() {
        let pulse = PulseShape::uplink_default();
        let mut rng = SimRng::new(RngSeed(8));
        for m in [16, 100] {
            let geom = ArrayGeometry::independent(m).unwrap();
            let profile = random_profile(&mut rng, 6, 2.0 * T);
            let window = default_lag_window(&profile, &pulse);
            let r = p_isi(&profile, &pulse, &geom, window);
            let special = p_isi_integer_delays(&profile, p0(&geom), T).unwrap();
            assert!((r.p_isi - special).abs() < 1e-12);
            let sum: f64 = r.per_lag.iter().map(|(_, c)| c).sum();
            assert_eq!(sum, r.p_isi);
        }
    }

    #[test]
    fn uniform_profile_maximum() {
        let uniform = PowerDelayProfile::uniform(9, T).unwrap();
        let v = p_isi_integer_delays(&uniform, 0.01, T).unwrap();
        assert!((v - 0.01 * 8.0 / 9.0).abs() < 1e-15);
        assert!((v - 0.008_888_888_888_888_889).abs() < 1e-15);

        let single = PowerDelayProfile::from_linear(&[(0.0, 1.0)]).unwrap();
        assert_eq!(p_isi_integer_delays(&single, 0.3, T).unwrap(), 0.0);

        let mut rng = SimRng::new(RngSeed(9));
        for _ in 0..100 {
            let profile = random_profile(&mut rng, 9, T);
            let v = p_isi_integer_delays(&profile, 0.01, T).unwrap();
            assert!(v < 0.01 * 8.0 / 9.0);
        }
    }

    #[test]
    fn integer_delay_errors() {
        let etu = PowerDelayProfile::etu();
        assert!(p_isi_integer_delays(&etu, 0.1, T).is_err());
        let uniform = PowerDelayProfile::uniform(3, T).unwrap();
        assert!(p_isi_integer_delays(&uniform, 0.0, T).is_err());
        assert!(p_isi_integer_delays(&uniform, 1.5, T).is_err());
    }

    #[test]
    fn independent_isi_scales_inversely_with_array_size() {
        let pulse = PulseShape::uplink_default();
        let profile = PowerDelayProfile::etu().quantized(pulse.sample_period()).unwrap();
        let window = default_lag_window(&profile, &pulse);
        let scaled: Vec<f64> = [16, 64, 256]
            .iter()
            .map(|&m| {
                p_isi(&profile, &pulse, &ArrayGeometry::independent(m).unwrap(), window).p_isi * m as f64
            })
            .collect();
        for v in &scaled {
            assert!((v - scaled[0]).abs() < 1e-12 * scaled[0].max(1.0));
        }
    }

    #[test]
    fn ensemble_impulse_power_matches_two_term_form() {
        let pulse = PulseShape::uplink_default();
        let profile = PowerDelayProfile::etu().quantized(pulse.sample_period()).unwrap();
        let geom = ArrayGeometry::jakes(16, 4.0).unwrap();
        let model = ChannelModel::new(profile.clone(), geom).unwrap();
        let mut rng = SimRng::new(RngSeed(10));
        let lags: Vec<i64> = (-3..=3).collect();
        let trials = 20_000;
        let mut acc = vec![0.0; lags.len()];
        for _ in 0..trials {
            let chan = model.draw(&mut rng);
            for (a, &n) in acc.iter_mut().zip(&lags) {
                *a += impulse_response(&chan, &pulse, n).norm_sqr();
            }
        }
        for (a, &n) in acc.iter().zip(&lags) {
            let emp = a / trials as f64;
            let want = mean_impulse_power(&profile, &pulse, &geom, n);
            assert!((emp - want).abs() / want < 0.05, "n={n}: {emp} vs {want}");
        }
    }

    proptest! {
        #[test]
        fn isi_report_sums_its_lags(m in 2usize..200, d in 0.0f64..30.0, taps in 1usize..6) {
            let pulse = PulseShape::uplink_default();
            let profile = PowerDelayProfile::uniform(taps, 0.7 * T).unwrap();
            let r = p_isi(&profile, &pulse, &ArrayGeometry::jakes(m, d).unwrap(), 24);
            prop_assert!(r.p0 > 0.0 && r.p0 <= 1.0 + 1e-12);
            prop_assert!(r.p_isi >= 0.0);
            let sum: f64 = r.per_lag.iter().map(|(_, c)| c).sum();
            prop_assert!((sum - r.p_isi).abs() <= 1e-12);
        }
    }
}
