//! Empirical lower bounds on `‖V‖_p` from finite kernel combinations.
//!
//! The ratio `‖V f‖_p / ‖f‖_p` is invariant under `f ↦ α f` and under the
//! dilation `t_i ↦ λ t_i`, so the first term is pinned to `c_1 = 1`, `t_1 = 1`.
//! The remaining `n - 1` terms contribute `(Re c_i, Im c_i, ln t_i)` to the
//! search vector, which is maximised by Nelder–Mead from seeded restarts.
//! Everything reported here is a lower bound, never the norm itself.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cesaro::VImage;
use crate::error::{require_exponent, require_positive, Error, Result};
use crate::hardy::{line_norm, KernelCombination};

pub const MAX_KERNELS: usize = 8;

/// Norms below this are treated as the zero function.
pub const DEGENERATE_NORM: f64 = 1e-12;

/// `ln t_i` is clamped to this range; the ratio is dilation invariant, so
/// only relative scales matter.
pub const LOG_T_BOUND: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub restarts: usize,
    /// Objective evaluations allowed per restart.
    pub budget: usize,
    /// Converged once the simplex values spread by at most `ftol` (relative)
    /// or its vertices lie within `xtol` of the best one.
    pub ftol: f64,
    pub xtol: f64,
    pub seed: u64,
    /// Quadrature tolerance inside the objective.
    pub objective_tol: f64,
    /// Quadrature tolerance for re-evaluating the returned combination.
    pub final_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 8,
            budget: 400,
            ftol: 1e-9,
            xtol: 1e-6,
            seed: 0,
            objective_tol: 1e-7,
            final_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioSearchResult {
    pub p: f64,
    /// `‖V f‖_p / ‖f‖_p` of `parameters`, re-evaluated at `final_tol`.
    pub best_ratio: f64,
    pub parameters: KernelCombination,
    /// Objective evaluations summed over all restarts.
    pub evaluations: usize,
    /// The restart that produced `parameters` met its stopping rule within budget.
    pub converged: bool,
}

/// `‖V f‖_p / ‖f‖_p` on the boundary line, with `V f` from the termwise closed forms.
pub fn ratio_general(f: &KernelCombination, p: f64, tol: f64) -> Result<f64> {
    require_exponent(p)?;
    require_positive("tol", tol)?;
    let mut den = line_norm(f, p, 0.0, tol)?;
    if den.value < DEGENERATE_NORM {
        return Err(Error::Degenerate {
            norm: den.value,
            threshold: DEGENERATE_NORM,
        });
    }
    // The quadrature tolerance is absolute for small integrals; renormalise
    // so both integrals are O(1) before taking the quotient.
    let normalized;
    let mut g = f;
    if !(0.5..=2.0).contains(&den.pth_power) {
        normalized = f.scaled(Complex64::new(den.value.recip(), 0.0))?;
        g = &normalized;
        den = line_norm(g, p, 0.0, tol)?;
    }
    let num = line_norm(&VImage { source: g, p }, p, 0.0, tol)?;
    Ok(num.value / den.value)
}

/// Maps a search vector to a combination: term 1 is `(1, t = 1)`, then
/// `(x[3k] + i x[3k+1], exp(x[3k+2]))`.
fn decode(x: &[f64]) -> Result<KernelCombination> {
    let rest = x.chunks_exact(3).map(|w| {
        (
            Complex64::new(w[0], w[1]),
            w[2].clamp(-LOG_T_BOUND, LOG_T_BOUND).exp(),
        )
    });
    KernelCombination::new(std::iter::once((Complex64::new(1.0, 0.0), 1.0)).chain(rest))
}

struct Optimum {
    x: Vec<f64>,
    ratio: f64,
    evaluations: usize,
    converged: bool,
}

/// Nelder–Mead minimisation of `-ratio`. Points where the objective fails
/// (degenerate or non-convergent quadrature) rank as +inf.
fn nelder_mead(p: f64, start: Vec<f64>, config: &SearchConfig) -> Optimum {
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;
    const INITIAL_STEP: f64 = 0.5;

    let dim = start.len();
    let mut evaluations = 0;
    let mut objective = |x: &[f64]| {
        evaluations += 1;
        decode(x)
            .and_then(|f| ratio_general(&f, p, config.objective_tol))
            .map_or(f64::INFINITY, |r| -r)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = objective(&start);
    simplex.push((start.clone(), v0));
    for i in 0..dim {
        let mut x = start.clone();
        x[i] += INITIAL_STEP;
        let v = objective(&x);
        simplex.push((x, v));
    }

    let mut converged = false;
    let mut used = dim + 1;
    while used < config.budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        let spread = (worst - best).abs();
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if (best.is_finite() && spread <= config.ftol * best.abs().max(1.0))
            || diameter <= config.xtol
        {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64)
            .collect();
        let toward = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let xr = toward(REFLECT);
        let vr = objective(&xr);
        used += 1;
        if vr < best {
            let xe = toward(EXPAND);
            let ve = objective(&xe);
            used += 1;
            simplex[dim] = if ve < vr { (xe, ve) } else { (xr, vr) };
            continue;
        }
        if vr < simplex[dim - 1].1 {
            simplex[dim] = (xr, vr);
            continue;
        }
        let (xc, vc) = if vr < worst {
            let x = toward(REFLECT * CONTRACT);
            let v = objective(&x);
            (x, v)
        } else {
            let x = toward(-CONTRACT);
            let v = objective(&x);
            (x, v)
        };
        used += 1;
        if vc < worst.min(vr) {
            simplex[dim] = (xc, vc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = anchor
                .iter()
                .zip(&vertex.0)
                .map(|(a, v)| a + SHRINK * (v - a))
                .collect();
            let v = objective(&x);
            *vertex = (x, v);
        }
        used += dim;
    }

    let (x, v) = simplex
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("simplex has dim + 1 vertices");
    Optimum {
        x,
        ratio: -v,
        evaluations,
        converged,
    }
}

/// Maximises `‖V f‖_p / ‖f‖_p` over combinations of `n_kernels` kernels.
///
/// Restart 0 starts from the single kernel `f_1`, so the result is never
/// worse than the single-kernel ratio up to quadrature error. The other
/// restarts draw from `ChaCha8Rng` seeded with `seed + index` and run in
/// parallel; the best ratio wins and ties go to the lower index.
pub fn maximize_ratio(
    p: f64,
    n_kernels: usize,
    config: &SearchConfig,
) -> Result<RatioSearchResult> {
    require_exponent(p)?;
    if !(1..=MAX_KERNELS).contains(&n_kernels) {
        return Err(Error::domain(format!(
            "n_kernels must lie in [1, {MAX_KERNELS}], got {n_kernels}"
        )));
    }
    if config.restarts == 0 || config.budget == 0 {
        return Err(Error::domain("restarts and budget must be positive"));
    }
    require_positive("objective_tol", config.objective_tol)?;
    require_positive("final_tol", config.final_tol)?;

    if n_kernels == 1 {
        let parameters = KernelCombination::single(1.0)?;
        return Ok(RatioSearchResult {
            p,
            best_ratio: ratio_general(&parameters, p, config.final_tol)?,
            parameters,
            evaluations: 1,
            converged: true,
        });
    }

    let dim = 3 * (n_kernels - 1);
    let starts: Vec<Vec<f64>> = (0..config.restarts)
        .map(|index| {
            if index == 0 {
                return vec![0.0; dim];
            }
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(index as u64));
            (0..dim)
                .map(|j| {
                    if j % 3 == 2 {
                        rng.gen_range(-2.0..2.0)
                    } else {
                        rng.gen_range(-1.0..1.0)
                    }
                })
                .collect()
        })
        .collect();

    let runs: Vec<Optimum> = starts
        .into_par_iter()
        .map(|start| nelder_mead(p, start, config))
        .collect();
    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    // Strict comparison keeps the lowest index among equal ratios.
    let best = runs
        .into_iter()
        .reduce(|acc, r| if r.ratio > acc.ratio { r } else { acc })
        .expect("at least one restart");
    if !best.ratio.is_finite() {
        return Err(Error::NonConvergence {
            evaluations,
            error_estimate: f64::INFINITY,
            tolerance: config.objective_tol,
        });
    }

    let parameters = decode(&best.x)?;
    Ok(RatioSearchResult {
        p,
        best_ratio: ratio_general(&parameters, p, config.final_tol)?,
        parameters,
        evaluations,
        converged: best.converged,
    })
}
