use std::f64::consts::{FRAC_PI_4, PI};

use super::SpecfunError;

/// Below this magnitude the Maclaurin series is summed directly; above it the
/// Hankel asymptotic expansion takes over.
const SERIES_LIMIT: f64 = 12.0;

/// Zeroth-order Bessel function of the first kind.
///
/// Absolute error stays below 1e-10 for `|x| <= 1e4`.
pub fn bessel_j0(x: f64) -> Result<f64, SpecfunError> {
    if !x.is_finite() {
        return Err(SpecfunError::Domain(x));
    }
    let ax = x.abs();
    Ok(if ax < SERIES_LIMIT {
        series(ax, 0)
    } else {
        hankel(ax, 0)
    })
}

/// First-order Bessel function of the first kind. Odd in `x`.
pub fn bessel_j1(x: f64) -> Result<f64, SpecfunError> {
    if !x.is_finite() {
        return Err(SpecfunError::Domain(x));
    }
    let ax = x.abs();
    let v = if ax < SERIES_LIMIT {
        series(ax, 1)
    } else {
        hankel(ax, 1)
    };
    Ok(if x < 0.0 { -v } else { v })
}

/// J_n(x) = (x/2)^n Σ_k (-x²/4)^k / (k! (k+n)!) for n in {0, 1}.
fn series(x: f64, order: u32) -> f64 {
    let q = -0.25 * x * x;
    let lead = if order == 0 { 1.0 } else { 0.5 * x };
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while k < 200.0 {
        term *= q / (k * (k + order as f64));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
        k += 1.0;
    }
    lead * sum
}

/// Hankel expansion J_n(x) ~ sqrt(2/(πx)) (P cos χ − Q sin χ), χ = x − (n/2 + 1/4)π.
/// The series is truncated at its smallest term.
fn hankel(x: f64, order: u32) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let inv8x = 1.0 / (8.0 * x);

    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..120 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) * inv8x / k as f64;
        let mag = term.abs();
        if mag > last {
            break;
        }
        last = mag;
        // a_k / x^k alternates between Q (odd k) and P (even k), with signs (-1)^{⌊k/2⌋}.
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if mag < 1e-17 {
            break;
        }
    }

    let chi = x - (order as f64 * 0.5) * PI - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// J_n(x) = (1/2π) ∫_0^{2π} cos(nθ − x sin θ) dθ by the periodic trapezoid
    /// rule, which converges geometrically once the node count exceeds |x|.
    fn integral_oracle(order: u32, x: f64) -> f64 {
        let n = 2 * (x.abs() as usize) + 400;
        let h = 2.0 * PI / n as f64;
        let sum: f64 = (0..n)
            .map(|i| {
                let th = i as f64 * h;
                (order as f64 * th - x * th.sin()).cos()
            })
            .sum();
        sum / n as f64
    }

    /// 200-term power series, no cutoff.
    fn series_oracle(order: u32, x: f64) -> f64 {
        let mut term = if order == 0 { 1.0 } else { 0.5 * x };
        let mut sum = term;
        for k in 1..200 {
            term *= -0.25 * x * x / (k as f64 * (k + order as usize) as f64);
            sum += term;
        }
        sum
    }

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo).signum() == f(mid).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn known_values() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
        assert!((bessel_j0(PI).unwrap() - (-0.304242)).abs() < 1e-6);
        assert!((bessel_j0(PI).unwrap() - series_oracle(0, PI)).abs() < 1e-13);
        assert!((bessel_j1(1.0).unwrap() - 0.4400505857).abs() < 1e-9);
        assert!((bessel_j1(1.0).unwrap() - series_oracle(1, 1.0)).abs() < 1e-14);
    }

    #[test]
    fn first_zeros() {
        let z0 = bisect(|x| series_oracle(0, x), 2.0, 3.0);
        assert!((z0 - 2.404825557695773).abs() < 1e-12);
        assert!(bessel_j0(2.404825557695773).unwrap().abs() < 1e-9);

        let z1 = bisect(|x| series_oracle(1, x), 3.5, 4.0);
        assert!((z1 - 3.8317059702075123).abs() < 1e-12);
        assert!(bessel_j1(3.8317059702075123).unwrap().abs() < 1e-9);
    }

    #[test]
    fn agrees_with_integral_representation() {
        let mut x = -30.0;
        while x <= 30.0 {
            assert!(
                (bessel_j0(x).unwrap() - integral_oracle(0, x)).abs() < 1e-10,
                "J0({x})"
            );
            assert!(
                (bessel_j1(x).unwrap() - integral_oracle(1, x)).abs() < 1e-10,
                "J1({x})"
            );
            x += 0.173;
        }
        for &x in &[11.999, 12.0, 12.001, 50.5, 123.4, 999.9, 4321.0, 9999.5, 1e4] {
            assert!(
                (bessel_j0(x).unwrap() - integral_oracle(0, x)).abs() < 1e-10,
                "J0({x})"
            );
            assert!(
                (bessel_j1(x).unwrap() - integral_oracle(1, x)).abs() < 1e-10,
                "J1({x})"
            );
        }
    }

    #[test]
    fn parity() {
        for &x in &[0.3, 5.0, 17.0, 250.0] {
            assert_eq!(bessel_j0(-x).unwrap(), bessel_j0(x).unwrap());
            assert_eq!(bessel_j1(-x).unwrap(), -bessel_j1(x).unwrap());
        }
    }

    #[test]
    fn squared_sum_bounded_by_one() {
        assert_eq!(
            bessel_j0(0.0).unwrap().powi(2) + bessel_j1(0.0).unwrap().powi(2),
            1.0
        );
        for i in 1..5000 {
            let x = i as f64 * 0.01;
            let s = bessel_j0(x).unwrap().powi(2) + bessel_j1(x).unwrap().powi(2);
            assert!(s < 1.0, "x = {x}: {s}");
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(bessel_j0(f64::NAN), Err(SpecfunError::Domain(_))));
        assert!(bessel_j1(f64::INFINITY).is_err());
        assert!(bessel_j0(f64::NEG_INFINITY).is_err());
    }
}
