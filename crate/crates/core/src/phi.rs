//! The lower-bound function
//!
//! ```text
//! Φ(p) = 2 (p-1)^{p-1} / p^{p-1} · Γ(1/2 + p/2) Γ(p) / (Γ(p/2 + 1) Γ(p - 1/2))
//! ```
//!
//! in its three Gamma forms and as a ratio of integrals, its logarithmic
//! derivative, and the exact single-kernel norm ratio `‖V f_t‖_p^p / ‖f_t‖_p^p`.
//!
//! All Gamma forms are evaluated in log space.

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;

use crate::cesaro::{gamma_param, v_coefficient};
use crate::error::{require_exponent, require_positive, Error, Result};
use crate::quadrature::{integrate_half_line, integrate_real_line};
use crate::specfun::{digamma_diff, inverse_square_series, ln_gamma_positive};

/// Tolerance for the digamma series inside the curve and scan helpers.
pub const SERIES_TOL: f64 = 1e-13;

/// Below this `p` the curve leaves `phi_prime` empty instead of reporting
/// the large negative log-derivative there.
pub const PRIME_CUTOFF: f64 = 1.001;

/// `(5 - π²/2) / 2`, the value of Φ''(2).
pub const PHI_SECOND_DERIVATIVE_AT_2: f64 = 0.5 * (5.0 - PI * PI / 2.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiMethod {
    /// `2 (p-1)^{p-1} p^{1-p} Γ(1/2+p/2) Γ(p) / (Γ(p/2+1) Γ(p-1/2))`.
    GammaClosed,
    /// `4 (p-1)^{p-1} p^{-p} Γ(p/2+1/2) Γ(p) / (Γ(p/2) Γ(p-1/2))`.
    GammaIntermediate,
    /// `(2/√π) (p-1)^{p-1} (2/p)^p Γ²(p/2+1/2) / Γ(p-1/2)`.
    GammaSimplified,
    /// `[2(p-1)/p]^p · 2∫_0^∞ x^p/(x²+1)^p dx / ∫_ℝ dx/(x²+1)^p`.
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiPoint {
    pub p: f64,
    pub phi: f64,
    pub phi_prime: Option<f64>,
    pub method: PhiMethod,
}

/// `ln Φ(p)` from one of the Gamma forms.
fn ln_phi(p: f64, method: PhiMethod) -> f64 {
    let lg = ln_gamma_positive;
    let pm1 = p - 1.0;
    let power = pm1 * pm1.ln();
    match method {
        PhiMethod::GammaClosed => {
            LN_2 + power - pm1 * p.ln() + lg(0.5 + 0.5 * p) + lg(p)
                - lg(0.5 * p + 1.0)
                - lg(p - 0.5)
        }
        PhiMethod::GammaIntermediate => {
            2.0 * LN_2 + power - p * p.ln() + lg(0.5 * p + 0.5) + lg(p) - lg(0.5 * p) - lg(p - 0.5)
        }
        PhiMethod::GammaSimplified | PhiMethod::Integral => {
            LN_2 - 0.5 * PI.ln() + power + p * (2.0 / p).ln() + 2.0 * lg(0.5 * p + 0.5)
                - lg(p - 0.5)
        }
    }
}

/// Φ(p) from the chosen Gamma form.
pub fn phi_gamma(p: f64, method: PhiMethod) -> Result<PhiPoint> {
    require_exponent(p)?;
    if method == PhiMethod::Integral {
        return Err(Error::domain("phi_gamma evaluates Gamma forms only"));
    }
    let ln = ln_phi(p, method);
    if ln > f64::MAX.ln() {
        return Err(Error::domain(format!("Φ({p}) overflows")));
    }
    Ok(PhiPoint {
        p,
        phi: ln.exp(),
        phi_prime: None,
        method,
    })
}

/// Φ(p) from the simplified Gamma form.
pub fn phi_closed(p: f64) -> Result<PhiPoint> {
    phi_gamma(p, PhiMethod::GammaSimplified)
}

/// Φ(p) computed from the two norm integrals, without any Gamma function.
pub fn phi_integral(p: f64, tol: f64) -> Result<PhiPoint> {
    require_exponent(p)?;
    require_positive("tol", tol)?;
    let numerator = integrate_half_line(|x| (x / (x * x + 1.0)).powf(p), tol)?;
    let denominator = integrate_real_line(|x| (x * x + 1.0).recip().powf(p), tol)?;
    let k = v_coefficient(p)?;
    Ok(PhiPoint {
        p,
        phi: k.powf(p) * 2.0 * numerator.value / denominator.value,
        phi_prime: None,
        method: PhiMethod::Integral,
    })
}

/// `Φ'(p) / Φ(p) = ln(2(1 - 1/p)) + (1 - p/2) Σ_{n≥0} 1/((n + p - 1/2)(n + p/2 + 1/2))`.
///
/// The series equals `ψ(p/2 + 1/2) - ψ(p - 1/2)` and is summed by
/// [`digamma_diff`] to absolute accuracy `tol`.
pub fn phi_log_derivative(p: f64, tol: f64) -> Result<f64> {
    require_exponent(p)?;
    // ln(2(p-1)/p) written as ln1p((p-2)/p): exact zero at p = 2.
    let log_term = ((p - 2.0) / p).ln_1p();
    let (series, _) = digamma_diff(p - 0.5, 0.5 * p + 0.5, tol)?;
    Ok(log_term + series)
}

/// `Φ'(p)` itself.
pub fn phi_derivative(p: f64, tol: f64) -> Result<f64> {
    Ok(phi_log_derivative(p, tol)? * phi_closed(p)?.phi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondDerivativeCheck {
    pub h: f64,
    /// `(5 - π²/2) / 2`.
    pub analytic: f64,
    /// `1/2 - (1/2) Σ_{n≥0} 1/(n + 3/2)²`, the term-by-term derivative of
    /// the log-derivative series at p = 2.
    pub series: f64,
    /// Second central difference of `phi_closed` at p = 2.
    pub numeric: f64,
}

/// Compares Φ''(2) against its closed value. Φ(2) = 1 and Φ'(2) = 0, so
/// Φ''(2) equals `(ln Φ)''(2)` with no normalisation factor.
pub fn phi_second_derivative_check(h: f64) -> Result<SecondDerivativeCheck> {
    if !(1e-6..=1e-2).contains(&h) {
        return Err(Error::domain(format!(
            "step h must lie in [1e-6, 1e-2], got {h}"
        )));
    }
    let phi = |p: f64| phi_closed(p).map(|pt| pt.phi);
    let numeric = (phi(2.0 + h)? - 2.0 * phi(2.0)? + phi(2.0 - h)?) / (h * h);
    let (sum, _) = inverse_square_series(1.5, 1e-15)?;
    Ok(SecondDerivativeCheck {
        h,
        analytic: PHI_SECOND_DERIVATIVE_AT_2,
        series: 0.5 - 0.5 * sum,
        numeric,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioPoint {
    pub p: f64,
    pub t: f64,
    /// `‖V f_t‖_p^p / ‖f_t‖_p^p`.
    pub ratio_pth_power: f64,
    /// Bound on the error of `ratio_pth_power` propagated from both integrals.
    pub error_bound: f64,
}

impl RatioPoint {
    /// `‖V f_t‖_p / ‖f_t‖_p`.
    pub fn ratio(&self) -> f64 {
        self.ratio_pth_power.powf(1.0 / self.p)
    }
}

/// `‖V f_t‖_p^p / ‖f_t‖_p^p` from the boundary moduli
/// `|V f_t(x)| = (2(p-1)/p) √(x² + γ²t²) / (x² + t²)` and `|f_t(x)| = t / (x² + t²)`.
///
/// Both integrals carry a factor `t^{1-p}` that cancels in the quotient; it
/// is left in so the cancellation is checked rather than assumed.
pub fn exact_ratio(p: f64, t: f64, tol: f64) -> Result<RatioPoint> {
    require_exponent(p)?;
    require_positive("t", t)?;
    require_positive("tol", tol)?;
    let k = v_coefficient(p)?;
    let gt = gamma_param(p)? * t;
    let t2 = t * t;
    let num = integrate_real_line(|x| (k * x.hypot(gt) / (x * x + t2)).powf(p), tol)?;
    let den = integrate_real_line(|x| (t / (x * x + t2)).powf(p), tol)?;
    let ratio = num.value / den.value;
    let error_bound =
        ratio * (num.error_estimate / num.value.abs() + den.error_estimate / den.value.abs());
    Ok(RatioPoint {
        p,
        t,
        ratio_pth_power: ratio,
        error_bound,
    })
}

fn uniform_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let span = hi - lo;
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|k| {
            if k + 1 == steps {
                hi
            } else {
                lo + span * (k as f64 / last)
            }
        })
        .collect()
}

/// Φ on a uniform grid including both endpoints, with `phi_prime = Φ'(p)`.
///
/// Points are computed in parallel; the output is always ordered by `p`.
pub fn phi_curve(p_min: f64, p_max: f64, steps: usize) -> Result<Vec<PhiPoint>> {
    require_exponent(p_min)?;
    require_exponent(p_max)?;
    if p_min >= p_max {
        return Err(Error::domain(format!(
            "need p_min < p_max, got {p_min} and {p_max}"
        )));
    }
    if steps < 2 {
        return Err(Error::domain("need at least two grid points"));
    }
    uniform_grid(p_min, p_max, steps)
        .into_par_iter()
        .map(|p| {
            let mut point = phi_closed(p)?;
            if p >= PRIME_CUTOFF {
                point.phi_prime = Some(phi_log_derivative(p, SERIES_TOL)? * point.phi);
            }
            Ok(point)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

/// Grid observation of monotonicity; not a proof.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityReport {
    pub direction: Monotonicity,
    pub points: usize,
    /// Φ strictly monotone in `direction` between consecutive grid points.
    pub strictly_monotone: bool,
    /// `Φ'/Φ` has the matching strict sign at every interior grid point.
    pub derivative_sign_ok: bool,
    /// Smallest consecutive change of Φ, signed so that positive means "as expected".
    pub min_step: f64,
}

impl MonotonicityReport {
    pub fn holds(&self) -> bool {
        self.strictly_monotone && self.derivative_sign_ok
    }
}

pub fn monotonicity_scan(
    p_start: f64,
    p_end: f64,
    steps: usize,
    direction: Monotonicity,
) -> Result<MonotonicityReport> {
    require_exponent(p_start)?;
    require_exponent(p_end)?;
    if p_start >= p_end || steps < 2 {
        return Err(Error::domain(
            "need p_start < p_end and at least two grid points",
        ));
    }
    let sign = match direction {
        Monotonicity::Increasing => 1.0,
        Monotonicity::Decreasing => -1.0,
    };
    let grid = uniform_grid(p_start, p_end, steps);
    let values = grid
        .par_iter()
        .map(|&p| phi_closed(p).map(|pt| pt.phi))
        .collect::<Result<Vec<_>>>()?;
    let min_step = values
        .windows(2)
        .map(|w| sign * (w[1] - w[0]))
        .fold(f64::INFINITY, f64::min);
    let interior = &grid[1..grid.len() - 1];
    let derivative_sign_ok = interior
        .par_iter()
        .map(|&p| phi_log_derivative(p, SERIES_TOL).map(|d| sign * d > 0.0))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|ok| ok);
    Ok(MonotonicityReport {
        direction,
        points: steps,
        strictly_monotone: min_step > 0.0,
        derivative_sign_ok,
        min_step,
    })
}

/// Header of the curve CSV.
pub const CURVE_HEADER: [&str; 3] = ["p", "phi", "phi_prime"];

/// Writes `p,phi,phi_prime` rows with 17 significant digits and LF line
/// endings; a missing derivative is an empty field.
pub fn write_curve_csv<W: std::io::Write>(out: W, points: &[PhiPoint]) -> csv::Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(CURVE_HEADER)?;
    for pt in points {
        let prime = pt
            .phi_prime
            .map(|d| format!("{d:.16e}"))
            .unwrap_or_default();
        writer.write_record([format!("{:.16e}", pt.p), format!("{:.16e}", pt.phi), prime])?;
    }
    writer.flush()?;
    Ok(())
}

/// `(p, phi, phi_prime)` triples parsed back from [`write_curve_csv`] output.
pub fn read_curve_csv<R: std::io::Read>(input: R) -> Result<Vec<(f64, f64, Option<f64>)>> {
    let bad = |e: &dyn std::fmt::Display| Error::domain(format!("malformed curve CSV: {e}"));
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers().map_err(|e| bad(&e))?;
    if header.iter().ne(CURVE_HEADER) {
        return Err(Error::domain("curve CSV header must be p,phi,phi_prime"));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|e| bad(&e));
    reader
        .records()
        .map(|record| {
            let record = record.map_err(|e| bad(&e))?;
            let prime = match &record[2] {
                "" => None,
                s => Some(num(s)?),
            };
            Ok((num(&record[0])?, num(&record[1])?, prime))
        })
        .collect()
}
