use super::SpecfunError;

/// Default cap on the number of interval bisections.
pub const MAX_SUBDIVISIONS: usize = 4000;

// 15-point Kronrod abscissae (non-negative half) with the embedded 7-point Gauss rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, SpecfunError> {
    integrate_with_limit(f, a, b, tol, MAX_SUBDIVISIONS)
}

/// [`integrate`] with an explicit subdivision budget. Exhausting the budget
/// yields [`SpecfunError::Convergence`] carrying the best estimate.
pub fn integrate_with_limit<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_subdivisions: usize,
) -> Result<f64, SpecfunError> {
    if !(a < b) || !a.is_finite() || !b.is_finite() || !(tol > 0.0) {
        return Err(SpecfunError::InvalidInterval { a, b, tol });
    }

    let mut segments = vec![kronrod15(&f, a, b)];
    let mut splits = 0;
    loop {
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let value: f64 = segments.iter().map(|s| s.value).sum();
        if !value.is_finite() {
            return Err(SpecfunError::Convergence {
                estimate: value,
                error,
            });
        }
        // A single rule pair can agree by accident, so at least one bisection
        // is required before accepting.
        if splits > 0 && error <= 0.25 * tol {
            return Ok(value);
        }
        if splits >= max_subdivisions {
            return Err(SpecfunError::Convergence {
                estimate: value,
                error,
            });
        }

        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("segment list is never empty");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        let mut left = kronrod15(&f, seg.a, mid);
        let mut right = kronrod15(&f, mid, seg.b);
        // The Gauss/Kronrod difference can vanish by accident on a kink; the
        // parent-versus-children discrepancy is a second, independent estimate.
        let refinement = (seg.value - left.value - right.value).abs();
        left.error = left.error.max(refinement);
        right.error = right.error.max(refinement);
        segments.push(left);
        segments.push(right);
        splits += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_j0;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let inner: f64 = (1..n).map(|i| f(a + i as f64 * h)).sum();
        h * (0.5 * (f(a) + f(b)) + inner)
    }

    #[test]
    fn constant_and_triangle() {
        let v = integrate(|_| 1.0, -1.0, 1.0, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let v = integrate(|x: f64| 1.0 - x.abs(), -1.0, 1.0, 1e-10).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bessel_weighted_triangle_matches_trapezoid() {
        let f = |x: f64| bessel_j0(2.0 * PI * x).unwrap().powi(2) * (1.0 - x.abs());
        let v = integrate(f, -1.0, 1.0, 1e-9).unwrap();
        let oracle = trapezoid(f, -1.0, 1.0, 1_000_000);
        assert!((v - oracle).abs() < 1e-7, "{v} vs {oracle}");
    }

    #[test]
    fn polynomial_is_exact() {
        // K15 integrates degree-22 polynomials exactly.
        let v = integrate(|x: f64| x.powi(10) - 3.0 * x.powi(3), 0.0, 2.0, 1e-12).unwrap();
        let exact = 2f64.powi(11) / 11.0 - 3.0 * 2f64.powi(4) / 4.0;
        assert!((v - exact).abs() < 1e-11);
    }

    #[test]
    fn invalid_arguments() {
        assert!(matches!(
            integrate(|x| x, 1.0, 1.0, 1e-9),
            Err(SpecfunError::InvalidInterval { .. })
        ));
        assert!(integrate(|x| x, 2.0, 1.0, 1e-9).is_err());
        assert!(integrate(|x| x, 0.0, 1.0, 0.0).is_err());
        assert!(integrate(|x| x, 0.0, f64::INFINITY, 1e-9).is_err());
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let err = integrate_with_limit(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, 1e-14, 3).unwrap_err();
        match err {
            SpecfunError::Convergence { estimate, error } => {
                assert!(estimate.is_finite());
                assert!(error > 1e-14);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn additive_over_split_point(c in 0.01f64..0.99, freq in 0.5f64..20.0) {
            let tol = 1e-9;
            let f = |x: f64| (freq * x).cos() * (1.0 - x * x);
            let (a, b) = (-1.0, 1.0);
            let c = a + (b - a) * c;
            let whole = integrate(f, a, b, tol).unwrap();
            let left = integrate(f, a, c, tol).unwrap();
            let right = integrate(f, c, b, tol).unwrap();
            prop_assert!((whole - left - right).abs() <= 2.0 * tol);
        }
    }
}
