//! The Cesàro operator `(Cf)(z) = (1/z) ∫_0^z f(ζ) dζ` and the shifted
//! operator `V = (2(p-1)/p) C - I`.
//!
//! The numeric routines integrate along the straight segment from 0 to `z`.
//! That is only valid when `f` is analytic on a neighbourhood of the segment;
//! every kernel combination qualifies for `Im z ≥ 0`, but arbitrary callables
//! are taken on trust.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{require_exponent, require_finite, require_positive, Error, Result};
use crate::hardy::{AnalyticFn, KernelCombination, KernelFunction};
use crate::quadrature::integrate_segment;

/// Below this modulus the average is replaced by the midpoint value `f(z/2)`,
/// which matches `(Cf)(z)` to first order in `z`.
pub const SMALL_Z: f64 = 1e-8;

/// `2(p - 1)/p`, the factor in front of `C` in `V`.
pub fn v_coefficient(p: f64) -> Result<f64> {
    require_exponent(p)?;
    Ok(2.0 * (p - 1.0) / p)
}

/// `γ(p) = (2 - p) / (2(p - 1))`; zero exactly at p = 2, unbounded as p → 1⁺.
pub fn gamma_param(p: f64) -> Result<f64> {
    require_exponent(p)?;
    Ok((2.0 - p) / (2.0 * (p - 1.0)))
}

fn require_upper(z: Complex64) -> Result<()> {
    require_finite("Re z", z.re)?;
    require_finite("Im z", z.im)?;
    if z.im < 0.0 {
        return Err(Error::domain(format!(
            "z must lie in the closed upper half-plane, got Im z = {}",
            z.im
        )));
    }
    Ok(())
}

pub fn cesaro_apply_numeric<F>(f: &F, z: Complex64, tol: f64) -> Result<Complex64>
where
    F: AnalyticFn + ?Sized,
{
    require_upper(z)?;
    require_positive("tol", tol)?;
    let r = z.norm();
    if r < SMALL_Z {
        return f.eval(z * 0.5);
    }
    let integrand = |w: Complex64| f.eval(w).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    // Scale so the error of the quotient, not of the integral, is about tol.
    let q = integrate_segment(integrand, Complex64::new(0.0, 0.0), z, tol * r.min(1.0))?;
    Ok(q.value / z)
}

/// `(C f_t)(z) = 1 / (-it - z)`.
pub fn cesaro_kernel_closed(t: f64, z: Complex64) -> Result<Complex64> {
    require_upper(z)?;
    KernelFunction::new(t)?.resolvent(z)
}

pub fn v_apply<F>(f: &F, p: f64, z: Complex64, tol: f64) -> Result<Complex64>
where
    F: AnalyticFn + ?Sized,
{
    let k = v_coefficient(p)?;
    Ok(cesaro_apply_numeric(f, z, tol)? * k - f.eval(z)?)
}

/// `(V f_t)(z) = (2(p-1)/p) (iγt - z) / (-it - z)²` with `γ = gamma_param(p)`.
///
/// Expanding `(2(p-1)/p)/(-it - z) + it/(-it - z)²` over a common denominator
/// gives `+iγt` in the numerator. Only `|γ|` enters the boundary modulus
/// `(2(p-1)/p) √(x² + γ²t²) / (x² + t²)`, so the norm is the same
/// whichever sign is written.
pub fn v_kernel_closed(t: f64, p: f64, z: Complex64) -> Result<Complex64> {
    require_upper(z)?;
    let kernel = KernelFunction::new(t)?;
    v_kernel_unchecked(&kernel, p, z)
}

fn v_kernel_unchecked(kernel: &KernelFunction, p: f64, z: Complex64) -> Result<Complex64> {
    let k = v_coefficient(p)?;
    let gamma = gamma_param(p)?;
    let u = kernel.resolvent(z)?;
    let numerator = Complex64::new(-z.re, gamma * kernel.t() - z.im);
    Ok(numerator * u * u * k)
}

/// `V` applied term by term to a kernel combination.
pub fn v_combination_closed(f: &KernelCombination, p: f64, z: Complex64) -> Result<Complex64> {
    f.kernels()
        .iter()
        .try_fold(Complex64::new(0.0, 0.0), |acc, (c, kernel)| {
            Ok(acc + c * v_kernel_unchecked(kernel, p, z)?)
        })
}

/// `V f` for a kernel combination, evaluated through the closed forms.
#[derive(Debug, Clone, Copy)]
pub struct VImage<'a> {
    pub source: &'a KernelCombination,
    pub p: f64,
}

impl AnalyticFn for VImage<'_> {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        v_combination_closed(self.source, self.p, z)
    }
}

/// The circle `|w - c| = c`, `c = p / (2(p - 1))`, on which the spectrum of
/// `C` lies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumCircle {
    pub center: f64,
    pub radius: f64,
    p: f64,
}

impl SpectrumCircle {
    pub fn p(&self) -> f64 {
        self.p
    }

    /// `n` equally spaced points, starting at `2c` (angle 0).
    pub fn sample(&self, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|k| {
                let theta = 2.0 * PI * k as f64 / n as f64;
                Complex64::new(self.center, 0.0) + Complex64::from_polar(self.radius, theta)
            })
            .collect()
    }

    /// `w ↦ (2(p-1)/p) w - 1`, carrying the spectrum of `C` to that of `V`.
    pub fn map_to_v(&self, w: Complex64) -> Complex64 {
        w * (2.0 * (self.p - 1.0) / self.p) - 1.0
    }
}

pub fn spectrum_circle(p: f64) -> Result<SpectrumCircle> {
    require_exponent(p)?;
    let c = p / (2.0 * (p - 1.0));
    Ok(SpectrumCircle {
        center: c,
        radius: c,
        p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::kernel_eval;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid() -> Vec<Complex64> {
        vec![
            c(0.0, 1.0),
            c(1.0, 1.0),
            c(-2.0, 0.5),
            c(0.0, 5.0),
            c(0.0, 0.01),
        ]
    }

    #[test]
    fn gamma_param_examples() {
        assert_eq!(gamma_param(2.0).unwrap(), 0.0);
        assert!((gamma_param(4.0 / 3.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(gamma_param(3.0).unwrap(), -0.25);
        assert!(gamma_param(1.0).is_err());
        assert!(gamma_param(0.5).is_err());
        assert!(gamma_param(1.0 + 1e-12).unwrap() > 1e11);
    }

    #[test]
    fn cesaro_numeric_examples() {
        let tol = 1e-12;
        let f1 = KernelFunction::new(1.0).unwrap();
        let v = cesaro_apply_numeric(&f1, c(0.0, 1.0), tol).unwrap();
        assert!((v - c(0.0, 0.5)).norm() <= 1e-11);
        let one = |_: Complex64| c(1.0, 0.0);
        for &z in &[c(0.3, 0.0), c(-4.0, 2.0), c(0.0, 7.0)] {
            assert!((cesaro_apply_numeric(&one, z, tol).unwrap() - c(1.0, 0.0)).norm() <= 1e-12);
        }
        let id = |w: Complex64| w;
        assert!(
            (cesaro_apply_numeric(&id, c(2.0, 0.0), tol).unwrap() - c(1.0, 0.0)).norm() <= 1e-12
        );
    }

    #[test]
    fn cesaro_at_origin_is_the_limit() {
        let f1 = KernelFunction::new(1.0).unwrap();
        assert_eq!(
            cesaro_apply_numeric(&f1, c(0.0, 0.0), 1e-10).unwrap(),
            c(0.0, 1.0)
        );
        let v = cesaro_apply_numeric(&f1, c(3e-9, 1e-9), 1e-10).unwrap();
        let closed = cesaro_kernel_closed(1.0, c(3e-9, 1e-9)).unwrap();
        assert!((v - closed).norm() <= 1e-15);
    }

    #[test]
    fn cesaro_rejects_lower_half_plane() {
        let f1 = KernelFunction::new(1.0).unwrap();
        assert!(matches!(
            cesaro_apply_numeric(&f1, c(0.0, -1.0), 1e-8),
            Err(Error::Domain(_))
        ));
        assert!(cesaro_kernel_closed(1.0, c(0.0, -0.1)).is_err());
        assert!(v_kernel_closed(1.0, 2.0, c(1.0, -0.1)).is_err());
    }

    #[test]
    fn cesaro_closed_examples() {
        assert!((cesaro_kernel_closed(1.0, c(0.0, 1.0)).unwrap() - c(0.0, 0.5)).norm() < 1e-15);
        assert!((cesaro_kernel_closed(1.0, c(0.0, 0.0)).unwrap() - c(0.0, 1.0)).norm() < 1e-15);
        assert!((cesaro_kernel_closed(2.0, c(1.0, 0.0)).unwrap() - c(-0.2, 0.4)).norm() < 1e-15);
    }

    #[test]
    fn v_examples() {
        let tol = 1e-12;
        let f1 = KernelFunction::new(1.0).unwrap();
        let v = v_apply(&f1, 2.0, c(0.0, 1.0), tol).unwrap();
        assert!((v - c(0.0, 0.25)).norm() <= 1e-11);
        let one = |_: Complex64| c(1.0, 0.0);
        assert!(v_apply(&one, 2.0, c(1.5, 0.5), tol).unwrap().norm() <= 1e-12);
        // (Cf_1)(0) = f_1(0) = i, so (V f_1)(0) = (4/3) i - i at p = 3.
        let v = v_apply(&f1, 3.0, c(0.0, 0.0), tol).unwrap();
        assert!((v - c(0.0, 1.0 / 3.0)).norm() <= 1e-15);
    }

    #[test]
    fn v_closed_examples() {
        for &x in &[-3.0, -0.5, 0.0, 0.25, 2.0] {
            let v = v_kernel_closed(1.0, 2.0, c(x, 0.0)).unwrap();
            let want = c(-x, 0.0) / (c(-x, -1.0) * c(-x, -1.0));
            assert!((v - want).norm() < 1e-15);
            assert!((v.norm() - x.abs() / (x * x + 1.0)).abs() < 1e-15);
        }
        let v = v_kernel_closed(1.0, 2.0, c(0.0, 1.0)).unwrap();
        assert!((v - c(0.0, 0.25)).norm() < 1e-15);
        // At p = 3, z = 0 the identity below gives +i/3.
        let v = v_kernel_closed(1.0, 3.0, c(0.0, 0.0)).unwrap();
        assert!((v - c(0.0, 1.0 / 3.0)).norm() < 1e-15);
    }

    /// (2(p-1)/p) (Cf_t) - f_t expanded directly, independent of γ.
    fn v_by_definition(t: f64, p: f64, z: Complex64) -> Complex64 {
        let k = 2.0 * (p - 1.0) / p;
        let d = c(-z.re, -t - z.im);
        d.inv() * k - c(0.0, -t) / (d * d)
    }

    #[test]
    fn sign_convention_identity() {
        for &p in &[1.2, 1.5, 2.0, 3.0, 7.0] {
            for &t in &[0.5, 1.0, 2.0] {
                for z in grid().into_iter().chain([c(0.0, 0.0), c(4.0, 0.0)]) {
                    let closed = v_kernel_closed(t, p, z).unwrap();
                    let direct = v_by_definition(t, p, z);
                    assert!((closed - direct).norm() <= 1e-14 * direct.norm().max(1.0));

                    // Writing -iγt instead flips the sign of the γ term and breaks the identity.
                    if p != 2.0 {
                        let gamma = gamma_param(p).unwrap();
                        let k = v_coefficient(p).unwrap();
                        let d = c(-z.re, -t - z.im);
                        let flipped = c(-z.re, -gamma * t - z.im) * k / (d * d);
                        assert!((flipped - direct).norm() > 1e-6);
                        if z.im == 0.0 {
                            // On the boundary only |γ| matters.
                            assert!((flipped.norm() - direct.norm()).abs() <= 1e-14);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn numeric_matches_closed_forms_on_grid() {
        let tol = 1e-12;
        for &t in &[0.5, 1.0, 2.0] {
            let k = KernelFunction::new(t).unwrap();
            for z in grid() {
                let num = cesaro_apply_numeric(&k, z, tol).unwrap();
                let closed = cesaro_kernel_closed(t, z).unwrap();
                assert!((num - closed).norm() <= 1e-9, "t = {t}, z = {z}");
                for &p in &[1.5, 2.0, 3.0] {
                    let num = v_apply(&k, p, z, tol).unwrap();
                    let closed = v_kernel_closed(t, p, z).unwrap();
                    assert!((num - closed).norm() <= 1e-9, "t = {t}, p = {p}, z = {z}");
                }
            }
        }
    }

    #[test]
    fn v_combination_is_termwise() {
        let f = KernelCombination::new([(c(1.0, -0.5), 0.6), (c(0.2, 0.9), 2.5)]).unwrap();
        for z in grid() {
            for &p in &[1.5, 3.0] {
                let by_terms = v_combination_closed(&f, p, z).unwrap();
                let numeric = v_apply(&f, p, z, 1e-12).unwrap();
                assert!((by_terms - numeric).norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn spectrum_circle_examples() {
        let s = spectrum_circle(2.0).unwrap();
        assert_eq!((s.center, s.radius), (1.0, 1.0));
        let s = spectrum_circle(3.0).unwrap();
        assert_eq!((s.center, s.radius), (0.75, 0.75));
        assert!(spectrum_circle(1.0).is_err());
        assert!(spectrum_circle(1.0 + 1e-9).unwrap().center > 1e8);
        assert!((spectrum_circle(1e9).unwrap().center - 0.5).abs() < 1e-8);
    }

    #[test]
    fn spectral_map_lands_on_unit_circle() {
        for &p in &[1.2, 2.0, 5.0] {
            let s = spectrum_circle(p).unwrap();
            for w in s.sample(64) {
                assert!(((w - s.center).norm() - s.radius).abs() <= 1e-12);
                assert!((s.map_to_v(w).norm() - 1.0).abs() <= 1e-12);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn cesaro_is_linear(
            a_re in -2.0..2.0_f64, a_im in -2.0..2.0_f64,
            b_re in -2.0..2.0_f64, b_im in -2.0..2.0_f64,
            x in -3.0..3.0_f64, y in 0.0..3.0_f64,
        ) {
            let tol = 1e-11;
            let f = KernelFunction::new(0.8).unwrap();
            let g = KernelFunction::new(1.7).unwrap();
            let (alpha, beta) = (c(a_re, a_im), c(b_re, b_im));
            let combo = |w: Complex64| alpha * kernel_eval(&f, w).unwrap() + beta * kernel_eval(&g, w).unwrap();
            let z = c(x, y);
            let lhs = cesaro_apply_numeric(&combo, z, tol).unwrap();
            let rhs = alpha * cesaro_apply_numeric(&f, z, tol).unwrap()
                + beta * cesaro_apply_numeric(&g, z, tol).unwrap();
            let scale = (alpha.norm() + beta.norm()).max(1.0);
            prop_assert!((lhs - rhs).norm() <= 2.0 * tol * scale);
        }
    }
}
