//! Test functions on the upper half-plane and their boundary-line norms.
//!
//! The kernel `f_t(z) = -it / (-it - z)²` has a double pole at `-it`, strictly
//! below the real axis, so every finite combination of kernels is analytic on
//! a neighbourhood of the closed upper half-plane. For such functions the H^p
//! norm is the L^p norm of the boundary values on the real line (`y = 0`).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{require_exponent, require_finite, require_positive, Error, Result};
use crate::quadrature::{integrate_real_line_with, QuadratureConfig};
use crate::specfun::ln_gamma_positive;

/// Relative error attributed to closed-form norms.
pub const CLOSED_FORM_REL_ERROR: f64 = 1e-13;

/// Something that can be evaluated on (a neighbourhood of) the upper half-plane.
pub trait AnalyticFn {
    fn eval(&self, z: Complex64) -> Result<Complex64>;
}

impl<F> AnalyticFn for F
where
    F: Fn(Complex64) -> Complex64,
{
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self(z))
    }
}

/// `f_t(z) = -it / (-it - z)²` for some `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelFunction {
    t: f64,
}

impl KernelFunction {
    pub fn new(t: f64) -> Result<Self> {
        require_positive("t", t)?;
        Ok(KernelFunction { t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `1 / (-it - z)`, the building block shared with the Cesàro closed forms.
    pub(crate) fn resolvent(&self, z: Complex64) -> Result<Complex64> {
        require_finite("Re z", z.re)?;
        require_finite("Im z", z.im)?;
        if z.im < -0.5 * self.t {
            return Err(Error::domain(format!(
                "Im z = {} is too close to the pole at -{}i",
                z.im, self.t
            )));
        }
        // Invert before squaring so |z| up to ~1e150 stays finite.
        Ok(Complex64::new(-z.re, -self.t - z.im).inv())
    }
}

impl AnalyticFn for KernelFunction {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        kernel_eval(self, z)
    }
}

pub fn kernel_eval(k: &KernelFunction, z: Complex64) -> Result<Complex64> {
    let u = k.resolvent(z)?;
    Ok(Complex64::new(0.0, -k.t) * u * u)
}

/// A finite linear combination `Σ c_i f_{t_i}` with complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCombination {
    terms: Vec<(Complex64, KernelFunction)>,
}

impl KernelCombination {
    pub fn new(terms: impl IntoIterator<Item = (Complex64, f64)>) -> Result<Self> {
        let terms = terms
            .into_iter()
            .map(|(c, t)| {
                require_finite("coefficient", c.re)?;
                require_finite("coefficient", c.im)?;
                Ok((c, KernelFunction::new(t)?))
            })
            .collect::<Result<Vec<_>>>()?;
        if terms.is_empty() {
            return Err(Error::domain(
                "a kernel combination needs at least one term",
            ));
        }
        if terms.iter().all(|(c, _)| *c == Complex64::new(0.0, 0.0)) {
            return Err(Error::domain("all coefficients are zero"));
        }
        Ok(KernelCombination { terms })
    }

    pub fn single(t: f64) -> Result<Self> {
        Self::new([(Complex64::new(1.0, 0.0), t)])
    }

    pub fn terms(&self) -> impl Iterator<Item = (Complex64, f64)> + '_ {
        self.terms.iter().map(|(c, k)| (*c, k.t()))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, alpha: Complex64) -> Result<Self> {
        Self::new(self.terms().map(|(c, t)| (c * alpha, t)))
    }

    pub(crate) fn kernels(&self) -> &[(Complex64, KernelFunction)] {
        &self.terms
    }
}

impl AnalyticFn for KernelCombination {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        combination_eval(self, z)
    }
}

pub fn combination_eval(c: &KernelCombination, z: Complex64) -> Result<Complex64> {
    c.terms
        .iter()
        .try_fold(Complex64::new(0.0, 0.0), |acc, (coef, k)| {
            Ok(acc + coef * kernel_eval(k, z)?)
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMethod {
    ClosedForm,
    Quadrature,
}

/// An L^p norm together with its p-th power and an error bound on the norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub pth_power: f64,
    pub p: f64,
    pub method: NormMethod,
    pub error_bound: f64,
}

/// `‖f_t‖_p` from `‖f_t‖_p^p = t^{1-p} √π Γ(p - 1/2) / Γ(p)`.
pub fn kernel_norm_closed(t: f64, p: f64) -> Result<NormEstimate> {
    require_positive("t", t)?;
    require_exponent(p)?;
    let ln_pth =
        (1.0 - p) * t.ln() + 0.5 * PI.ln() + ln_gamma_positive(p - 0.5) - ln_gamma_positive(p);
    let value = (ln_pth / p).exp();
    Ok(NormEstimate {
        value,
        pth_power: ln_pth.exp(),
        p,
        method: NormMethod::ClosedForm,
        error_bound: CLOSED_FORM_REL_ERROR * value,
    })
}

/// `(∫ |f(x + iy)|^p dx)^{1/p}` by quadrature.
pub fn line_norm<F>(f: &F, p: f64, y: f64, tol: f64) -> Result<NormEstimate>
where
    F: AnalyticFn + ?Sized,
{
    line_norm_with(f, p, y, tol, &QuadratureConfig::default())
}

pub fn line_norm_with<F>(
    f: &F,
    p: f64,
    y: f64,
    tol: f64,
    config: &QuadratureConfig,
) -> Result<NormEstimate>
where
    F: AnalyticFn + ?Sized,
{
    require_exponent(p)?;
    require_finite("y", y)?;
    if y < 0.0 {
        return Err(Error::domain(format!(
            "line height y must be nonnegative, got {y}"
        )));
    }
    let integrand = |x: f64| match f.eval(Complex64::new(x, y)) {
        Ok(w) => w.norm().powf(p),
        Err(_) => f64::NAN,
    };
    let q = integrate_real_line_with(integrand, tol, config)?;
    let pth_power = q.value.max(0.0);
    let value = pth_power.powf(1.0 / p);
    let error_bound = if pth_power > 0.0 {
        value * q.error_estimate / (p * pth_power)
    } else {
        q.error_estimate.powf(1.0 / p)
    };
    Ok(NormEstimate {
        value,
        pth_power,
        p,
        method: NormMethod::Quadrature,
        error_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kernel_eval_examples() {
        let k = KernelFunction::new(1.0).unwrap();
        assert!((kernel_eval(&k, c(0.0, 0.0)).unwrap() - c(0.0, 1.0)).norm() < 1e-15);
        assert!((kernel_eval(&k, c(0.0, 1.0)).unwrap() - c(0.0, 0.25)).norm() < 1e-15);
        assert!((kernel_eval(&k, c(1.0, 0.0)).unwrap() - c(-0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn kernel_domain_guard() {
        let k = KernelFunction::new(1.0).unwrap();
        assert!(kernel_eval(&k, c(0.0, -0.4)).is_ok());
        assert!(matches!(
            kernel_eval(&k, c(0.0, -0.6)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            kernel_eval(&k, c(f64::NAN, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(KernelFunction::new(0.0).is_err());
        assert!(KernelFunction::new(-2.0).is_err());
    }

    #[test]
    fn kernel_is_finite_far_out() {
        let k = KernelFunction::new(0.5).unwrap();
        let w = kernel_eval(&k, c(1e150, 0.0)).unwrap();
        assert!(w.re.is_finite() && w.im.is_finite());
    }

    #[test]
    fn combination_examples() {
        let z0 = c(0.0, 0.0);
        let single = KernelCombination::single(1.0).unwrap();
        assert!((combination_eval(&single, z0).unwrap() - c(0.0, 1.0)).norm() < 1e-15);

        let cancel = KernelCombination::new([(c(1.0, 0.0), 1.0), (c(-1.0, 0.0), 1.0)]).unwrap();
        for &z in &[z0, c(0.3, 2.0), c(-7.0, 0.1)] {
            assert_eq!(combination_eval(&cancel, z).unwrap(), c(0.0, 0.0));
        }

        let doubled = KernelCombination::new([(c(2.0, 0.0), 1.0)]).unwrap();
        assert!((combination_eval(&doubled, c(0.0, 1.0)).unwrap() - c(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn combination_validation() {
        assert!(KernelCombination::new(Vec::<(Complex64, f64)>::new()).is_err());
        assert!(KernelCombination::new([(c(0.0, 0.0), 1.0)]).is_err());
        assert!(KernelCombination::new([(c(1.0, 0.0), -1.0)]).is_err());
        assert!(KernelCombination::new([(c(f64::NAN, 0.0), 1.0)]).is_err());
    }

    #[test]
    fn closed_norm_examples() {
        // Γ(3/2) = √π/2 gives ‖f_1‖_2² = π/2.
        let n = kernel_norm_closed(1.0, 2.0).unwrap();
        assert_relative_eq!(n.pth_power, PI / 2.0, max_relative = 1e-14);
        assert_relative_eq!(n.value, 1.253_314_137_3, max_relative = 1e-10);
        assert_eq!(n.method, NormMethod::ClosedForm);
        assert!(n.error_bound <= 1e-12 * n.value);
        // √π Γ(5/2)/Γ(3) = √π (3√π/4) / 2 = 3π/8.
        assert_relative_eq!(
            kernel_norm_closed(1.0, 3.0).unwrap().pth_power,
            3.0 * PI / 8.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            kernel_norm_closed(4.0, 2.0).unwrap().pth_power,
            PI / 8.0,
            max_relative = 1e-14
        );
        assert!(kernel_norm_closed(1.0, 1.0).is_err());
        assert!(kernel_norm_closed(0.0, 2.0).is_err());
    }

    #[test]
    fn line_norm_examples() {
        let f1 = KernelFunction::new(1.0).unwrap();
        let n = line_norm(&f1, 2.0, 0.0, 1e-10).unwrap();
        assert!((n.value - (PI / 2.0).sqrt()).abs() <= 1e-8);
        assert_eq!(n.method, NormMethod::Quadrature);
        // On y = 1 the pole sits at distance 2: |f_1|² = 1/(x² + 4)², ∫ = π/16.
        let n = line_norm(&f1, 2.0, 1.0, 1e-10).unwrap();
        assert!((n.value - PI.sqrt() / 4.0).abs() <= 1e-8);
        let doubled = KernelCombination::new([(c(2.0, 0.0), 1.0)]).unwrap();
        let n2 = line_norm(&doubled, 2.0, 0.0, 1e-10).unwrap();
        let n1 = line_norm(&f1, 2.0, 0.0, 1e-10).unwrap();
        assert_relative_eq!(n2.value, 2.0 * n1.value, max_relative = 1e-9);
        assert!(line_norm(&f1, 2.0, -0.1, 1e-10).is_err());
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for &t in &[0.5, 1.0, 2.0] {
            let k = KernelFunction::new(t).unwrap();
            for &p in &[1.2, 1.5, 2.0, 3.0, 5.0] {
                let closed = kernel_norm_closed(t, p).unwrap().value;
                let quad = line_norm(&k, p, 0.0, 1e-10).unwrap().value;
                assert_relative_eq!(quad, closed, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn t_scaling_law() {
        for &p in &[1.2, 2.0, 3.5] {
            let base = kernel_norm_closed(1.0, p).unwrap().pth_power;
            for &t in &[0.25, 0.5, 2.0, 8.0] {
                let k = KernelFunction::new(t).unwrap();
                let closed = kernel_norm_closed(t, p).unwrap().pth_power * t.powf(p - 1.0);
                let quad = line_norm(&k, p, 0.0, 1e-11).unwrap().pth_power * t.powf(p - 1.0);
                assert_relative_eq!(closed, base, max_relative = 1e-13);
                assert_relative_eq!(quad, base, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn norms_decrease_away_from_boundary() {
        for &t in &[0.5, 1.0, 2.0] {
            let k = KernelFunction::new(t).unwrap();
            for &p in &[1.5, 2.0, 4.0] {
                let mut last = f64::INFINITY;
                for &y in &[0.0, 0.5, 1.0, 2.0] {
                    let n = line_norm(&k, p, y, 1e-10).unwrap().value;
                    assert!(n <= last, "t = {t}, p = {p}, y = {y}");
                    last = n;
                }
            }
        }
    }

    #[test]
    fn homogeneity_for_complex_scalars() {
        let f = KernelCombination::new([(c(1.0, 0.5), 0.7), (c(-0.3, 2.0), 1.9)]).unwrap();
        let alpha = c(-1.5, 0.8);
        for &p in &[1.3, 2.0, 3.0] {
            let base = line_norm(&f, p, 0.0, 1e-11).unwrap().value;
            let scaled = line_norm(&f.scaled(alpha).unwrap(), p, 0.0, 1e-11)
                .unwrap()
                .value;
            assert_relative_eq!(scaled, alpha.norm() * base, max_relative = 1e-9);
        }
    }
}
