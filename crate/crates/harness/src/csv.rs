//! CSV output of SER sweeps.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{HarnessError, Result};
use crate::experiment::SerPoint;

pub const CSV_HEADER: &str = "x,ser,errors,symbols,ci95";

/// Header plus one row per point. Floats use Rust's shortest round-trip
/// formatting, so identical points give identical bytes.
pub fn to_csv(points: &[SerPoint]) -> String {
    let mut out = String::with_capacity(32 * (points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{}",
            p.x, p.ser, p.errors, p.symbols, p.ci95_halfwidth
        )
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn emit_csv(points: &[SerPoint], path: &Path) -> Result<()> {
    write_text(path, &to_csv(points))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Inverse of [`to_csv`].
pub fn parse_csv(text: &str) -> Option<Vec<SerPoint>> {
    let mut lines = text.lines();
    if lines.next()? != CSV_HEADER {
        return None;
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return None;
            }
            Some(SerPoint {
                x: f[0].parse().ok()?,
                ser: f[1].parse().ok()?,
                errors: f[2].parse().ok()?,
                symbols: f[3].parse().ok()?,
                ci95_halfwidth: f[4].parse().ok()?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_only_for_no_points() {
        assert_eq!(to_csv(&[]), "x,ser,errors,symbols,ci95\n");
    }

    #[test]
    fn round_trip() {
        let pts = vec![
            SerPoint::from_counts(10.0, 100, 100_000),
            SerPoint::from_counts(f64::INFINITY, 3, 7),
            SerPoint::from_counts(-12.5, 0, 1000),
        ];
        let text = to_csv(&pts);
        assert!(!text.contains('\r'));
        assert_eq!(text.lines().count(), 4);
        assert_eq!(parse_csv(&text).unwrap(), pts);
    }

    proptest! {
        #[test]
        fn counts_round_trip(x in -1e6f64..1e6, symbols in 1u64..10_000_000, frac in 0.0f64..=1.0) {
            let errors = (frac * symbols as f64) as u64;
            let p = SerPoint::from_counts(x, errors, symbols);
            prop_assert_eq!(p.ser, errors as f64 / symbols as f64);
            prop_assert!((0.0..=1.0).contains(&p.ser));
            prop_assert_eq!(parse_csv(&to_csv(&[p])).unwrap(), vec![p]);
        }
    }

    #[test]
    fn rejects_foreign_text() {
        assert!(parse_csv("a,b\n").is_none());
        assert!(parse_csv("x,ser,errors,symbols,ci95\n1,2\n").is_none());
    }
}
