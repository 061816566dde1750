//! Adaptive Gauss-Kronrod quadrature on finite and semi-infinite intervals.
//!
//! The kernel is the classical 7-15 pair: a 7-point Gauss rule embedded in a
//! 15-point Kronrod extension, with the QUADPACK error heuristic
//! `resasc · min(1, (200·|K−G|/resasc)^1.5)`. Adaptivity is global: the
//! interval with the largest error estimate is bisected until the total
//! estimate meets the tolerance or the subdivision cap (2^14 panels) trips.
//!
//! Tolerances are mixed absolute/relative: a request `tol` is satisfied when
//! the total error estimate is below `tol · max(1, |integral|)`, so tiny
//! integrals are judged absolutely and large ones relatively.
//!
//! Semi-infinite integrals over [a, ∞) are folded to t ∈ (0, 1] through the
//! algebraic substitution x = a + (1−t)/t, dx = dt/t² (the QUADPACK QAGI
//! change of variables). The map's resolution is effectively unbounded:
//! structure at abscissa x lands near t ≈ 1/(1 + x − a), and double precision
//! distinguishes t values down to the subnormal range, so integrands with
//! mass at x in the hundreds — high-order Laguerre weights, for instance —
//! stay fully representable. (A log-based fold x = a − ln(1−ξ) does not have
//! this property: spacing of ξ near 1 caps the reachable abscissa near
//! a + 36, which silently truncates exactly the integrals this crate cares
//! about.) Kronrod nodes are interior, so t = 0 is never evaluated; node
//! positions that nevertheless round to 0 or map past the float range
//! contribute zero, which is exact for any integrable tail.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::kahan::NeumaierSum;
use crate::{Error, Result};

/// Maximum number of panels before adaptive bisection gives up.
const MAX_PANELS: usize = 1 << 14;

/// Abscissae of the 15-point Kronrod rule on [−1, 1] (positive half;
/// odd-indexed entries are the embedded 7-point Gauss nodes).
#[allow(clippy::excessive_precision)] // published values, rounded by the compiler
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_33,
    0.949_107_912_342_758_524_526_189_684_047_85,
    0.864_864_423_359_769_072_789_712_788_640_93,
    0.741_531_185_599_394_439_863_864_773_280_79,
    0.586_087_235_467_691_130_294_144_838_258_73,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_24,
    0.0,
];

/// Weights of the 15-point Kronrod rule.
#[allow(clippy::excessive_precision)] // published values, rounded by the compiler
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_52,
    0.140_653_259_715_525_918_745_189_590_510_24,
    0.169_004_726_639_267_902_826_583_426_598_55,
    0.190_350_578_064_785_409_913_256_402_421_01,
    0.204_432_940_075_298_892_414_161_999_234_65,
    0.209_482_141_084_727_828_012_999_174_891_71,
];

/// Weights of the embedded 7-point Gauss rule.
#[allow(clippy::excessive_precision)] // published values, rounded by the compiler
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_08,
    0.279_705_391_489_276_667_901_467_771_423_78,
    0.381_830_050_505_118_944_950_369_775_488_97,
    0.417_959_183_673_469_387_755_102_040_816_33,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Total absolute error estimate over all panels.
    pub abs_error_estimate: f64,
    /// Number of bisections performed (0 = the initial panel sufficed).
    pub subdivisions: usize,
}

/// One panel's 15-point evaluation.
#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// QUADPACK error rescaling: sharpen the raw |K−G| difference against the
/// panel's own variation, with a floor at 50·eps·∫|f|.
fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scaled = (200.0 * err / resasc).powf(1.5);
        err = if scaled < 1.0 { resasc * scaled } else { resasc };
    }
    let floor_threshold = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    if resabs > floor_threshold {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut resk = WGK[7] * f_center;
    let mut resg = WG[3] * f_center;
    let mut resabs = resk.abs();

    let mut fv = [0.0f64; 15];
    fv[7] = f_center;
    for i in 0..7 {
        let offset = half * XGK[i];
        let f_lo = f(center - offset);
        let f_hi = f(center + offset);
        fv[i] = f_lo;
        fv[14 - i] = f_hi;
        let sum = f_lo + f_hi;
        resk += WGK[i] * sum;
        resabs += WGK[i] * (f_lo.abs() + f_hi.abs());
        if i % 2 == 1 {
            resg += WG[i / 2] * sum;
        }
    }

    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (f_center - mean).abs();
    for i in 0..7 {
        resasc += WGK[i] * ((fv[i] - mean).abs() + (fv[14 - i] - mean).abs());
    }

    let value = resk * half;
    if !value.is_finite() {
        return Err(Error::Instability(format!(
            "integrand produced a non-finite panel result on [{a}, {b}]"
        )));
    }
    let error = rescale_error((resk - resg) * half, resabs * half, resasc * half.abs());
    Ok(Panel { a, b, value, error })
}

/// Adaptive integration of `f` over the finite interval [a, b].
///
/// Converges when the total error estimate drops below
/// `tol · max(1, |value|)`.
///
/// # Errors
///
/// - `Error::InvalidParameter` unless a < b are finite and tol > 0;
/// - `Error::QuadratureNonConvergence` if the panel cap is reached first;
/// - `Error::Instability` if the integrand produces non-finite values.
pub fn integrate_finite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    if !a.is_finite() || !b.is_finite() || a >= b {
        return Err(Error::InvalidParameter(format!(
            "integration bounds must be finite with a < b, got [{a}, {b}]"
        )));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }

    let mut heap = BinaryHeap::new();
    heap.push(gauss_kronrod_15(&f, a, b)?);
    let mut subdivisions = 0usize;

    // The totals are re-summed from the live panel set on every pass rather
    // than maintained incrementally. Incremental updates — even compensated
    // ones — are corrupted beyond repair when a node grazes a singularity:
    // a transient panel error of ~1e284 leaves rounding remainders (~1e268)
    // that swallow the entire accumulated estimate, and once the transient
    // is subtracted back out, the loop sees a total of exactly zero and
    // exits with a wildly optimistic result. A fresh sum has no history to
    // contaminate. The cost is quadratic only for pathological integrands
    // that are headed for the panel cap regardless.
    loop {
        let mut value_acc = NeumaierSum::new();
        let mut error_acc = NeumaierSum::new();
        for p in heap.iter() {
            value_acc.add(p.value);
            error_acc.add(p.error);
        }
        let total_value = value_acc.value();
        let total_error = error_acc.value();
        if total_error <= tol * total_value.abs().max(1.0) {
            return Ok(QuadResult {
                value: total_value,
                abs_error_estimate: total_error,
                subdivisions,
            });
        }
        if heap.len() >= MAX_PANELS {
            return Err(Error::QuadratureNonConvergence {
                achieved: total_error,
                requested: tol * total_value.abs().max(1.0),
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel narrowed to machine resolution; its estimate cannot improve.
            return Err(Error::QuadratureNonConvergence {
                achieved: total_error,
                requested: tol * total_value.abs().max(1.0),
                subdivisions,
            });
        }
        heap.push(gauss_kronrod_15(&f, worst.a, mid)?);
        heap.push(gauss_kronrod_15(&f, mid, worst.b)?);
        subdivisions += 1;
    }
}

/// Adaptive integration of `f` over [a, ∞) via x = a + (1−t)/t.
///
/// # Errors
///
/// As [`integrate_finite`], plus `Error::InvalidParameter` for non-finite `a`.
pub fn integrate_semiinfinite<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> Result<QuadResult> {
    if !a.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lower bound must be finite, got {a}"
        )));
    }
    integrate_finite(
        move |t: f64| {
            if t <= 0.0 {
                // Node rounded onto the fold point; the tail beyond the float
                // range contributes nothing to an integrable function.
                return 0.0;
            }
            let x = a + (1.0 - t) / t;
            if !x.is_finite() {
                return 0.0;
            }
            let fx = f(x);
            if fx == 0.0 {
                // Short-circuit before the 1/t² weight, which overflows (or
                // its denominator underflows) long after every exponentially
                // damped integrand in this crate is exactly zero.
                return 0.0;
            }
            fx / (t * t)
        },
        0.0,
        1.0,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::laguerre_assoc;
    use proptest::prelude::*;

    // --- finite intervals ---

    #[test]
    fn polynomial_is_exact() {
        let q = integrate_finite(|x| x * x, 0.0, 1.0, 1e-12).unwrap();
        assert!((q.value - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(q.subdivisions, 0, "a single Kronrod panel is exact for x²");
    }

    #[test]
    fn sine_over_half_period() {
        let q = integrate_finite(f64::sin, 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((q.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_bounds_and_tolerance() {
        assert!(matches!(
            integrate_finite(|x| x, 1.0, 1.0, 1e-8),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            integrate_finite(|x| x, 0.0, 1.0, 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            integrate_finite(|x| x, f64::NEG_INFINITY, 1.0, 1e-8),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn interior_algebraic_singularity_exhausts_cap() {
        // |x − 1/√2|^(−0.9) is integrable but each bisection level only
        // shaves a fixed factor off the panel straddling the singularity,
        // so a 1e−13 request must hit the cap and report honestly.
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let result = integrate_finite(|x| (x - c).abs().powf(-0.9).min(1e300), 0.0, 1.0, 1e-13);
        assert!(matches!(
            result,
            Err(Error::QuadratureNonConvergence { .. })
        ));
    }

    // --- semi-infinite intervals ---

    #[test]
    fn exponential_tails_integrate_to_unity() {
        // ∫₀^∞ e^{−x} dx = ∫₀^∞ x e^{−x} dx = 1; the folded integrand is
        // smooth with an essential zero at t = 0, well inside G7K15's reach.
        let q = integrate_semiinfinite(|x| (-x).exp(), 0.0, 1e-10).unwrap();
        assert!((q.value - 1.0).abs() < 1e-13);

        let q = integrate_semiinfinite(|x| x * (-x).exp(), 0.0, 1e-10).unwrap();
        assert!((q.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn shifted_lower_bound() {
        // ∫_2^∞ e^{−x} dx = e^{−2}
        let q = integrate_semiinfinite(|x| (-x).exp(), 2.0, 1e-12).unwrap();
        assert!((q.value - (-2.0f64).exp()).abs() < 1e-14);
    }

    // --- Laguerre orthogonality, the weight this crate lives on ---

    fn orthogonality_integral(n: usize, m: usize) -> QuadResult {
        integrate_semiinfinite(
            |x| {
                (-x).exp()
                    * x
                    * laguerre_assoc(n, 1, x).unwrap()
                    * laguerre_assoc(m, 1, x).unwrap()
            },
            0.0,
            1e-10,
        )
        .unwrap()
    }

    #[test]
    fn laguerre_weight_diagonal_values() {
        // ∫₀^∞ e^{−x} x (L_n^1)² dx = n + 1
        let q = orthogonality_integral(2, 2);
        assert!((q.value - 3.0).abs() < 1e-9, "n=2: {}", q.value);
        let q = orthogonality_integral(1, 1);
        assert!((q.value - 2.0).abs() < 1e-9, "n=1: {}", q.value);
    }

    #[test]
    fn laguerre_weight_off_diagonal_vanishes() {
        for (n, m) in [(0, 1), (2, 4), (5, 11), (0, 19)] {
            let q = orthogonality_integral(n, m);
            assert!(q.value.abs() < 1e-9, "n={n} m={m}: {}", q.value);
        }
    }

    #[test]
    fn error_estimates_are_honest_on_the_orthogonality_family() {
        // True error never exceeds 10× the reported estimate.
        for n in 0..=8usize {
            for m in 0..=8usize {
                let q = orthogonality_integral(n, m);
                let truth = if n == m { n as f64 + 1.0 } else { 0.0 };
                let true_error = (q.value - truth).abs();
                assert!(
                    true_error <= 10.0 * q.abs_error_estimate.max(f64::EPSILON),
                    "n={n} m={m}: true {true_error:.3e} vs reported {:.3e}",
                    q.abs_error_estimate
                );
            }
        }
    }

    // --- properties ---

    proptest! {
        /// Linearity: ∫(αf + βg) = α∫f + β∫g for smooth f, g.
        #[test]
        fn linearity(alpha in -5.0f64..5.0, beta in -5.0f64..5.0) {
            let f = |x: f64| (-x).exp() * x;
            let g = |x: f64| (-2.0 * x).exp();
            let combined = integrate_semiinfinite(
                move |x| alpha * f(x) + beta * g(x), 0.0, 1e-11,
            ).unwrap();
            let separate = alpha * integrate_semiinfinite(f, 0.0, 1e-11).unwrap().value
                + beta * integrate_semiinfinite(g, 0.0, 1e-11).unwrap().value;
            prop_assert!(
                (combined.value - separate).abs() <= 1e-9 * separate.abs().max(1.0)
            );
        }
    }
}