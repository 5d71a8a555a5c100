//! Closed-form tables, no simulation.

use std::fmt::Write as _;

use lsasc_core::analysis::{default_lag_window, p0_limit, p_isi, snr_combined};
use lsasc_core::channel::PowerDelayProfile;
use lsasc_core::receiver::CombinerWeights;
use lsasc_core::waveform::PulseShape;

use crate::config::Correlation;
use crate::error::Result;

/// `P0`, the residual-ISI power and its per-lag split for every
/// `(M, correlation)` pair. With a finite `snr_db` the equal-weight combined
/// SNR is added.
pub fn analyze_report(
    antennas: &[usize],
    correlations: &[Correlation],
    profile: &PowerDelayProfile,
    pulse: &PulseShape,
    snr_db: Option<f64>,
) -> Result<String> {
    let mut out = String::new();
    let window = default_lag_window(profile, pulse);
    let weights = CombinerWeights::equal(profile.tap_count())?;
    for &m in antennas {
        for &c in correlations {
            let geom = c.geometry(m)?;
            let report = p_isi(profile, pulse, &geom, window);
            let w = &mut out;
            writeln!(w, "M = {m}, correlation = {c}").unwrap();
            writeln!(w, "P0 = {}", report.p0).unwrap();
            if let Correlation::Jakes(d) = c {
                writeln!(w, "P0 large-array limit = {}", p0_limit(d)?).unwrap();
            }
            writeln!(w, "P_ISI = {}", report.p_isi).unwrap();
            if let Some(s) = snr_db.filter(|s| s.is_finite()) {
                let snr = snr_combined(profile, &weights, m, 10f64.powf(-s / 10.0))?;
                writeln!(w, "combined SNR at Es/N0 = {s} dB: {:.4} dB", 10.0 * snr.log10()).unwrap();
            }
            writeln!(w, "{:>5}  {:>14}", "lag", "P_ISI share").unwrap();
            for (n, v) in report.per_lag.iter().filter(|(_, v)| *v > 0.0) {
                writeln!(w, "{n:>5}  {v:>14.6e}").unwrap();
            }
            out.push('\n');
        }
    }
    Ok(out)
}
