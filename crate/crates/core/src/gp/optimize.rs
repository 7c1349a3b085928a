//! Derivative-free hyperparameter search.
//!
//! Hyperparameters are searched in log space with a multi-start Nelder–Mead
//! simplex that maximizes the log marginal likelihood. The initial spec is
//! always evaluated first and only replaced by something strictly better.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::kernel::{KernelKind, KernelSpec};
use super::model::{fit, Dataset};
use super::GpError;

/// Number of multi-start restarts per this many evaluations.
const EVALS_PER_START: usize = 60;
const MAX_STARTS: usize = 4;
/// Spread, in natural-log units, of the randomized restarts around init.
const RESTART_SPREAD: f64 = 1.5;
/// Log-space box around the start point that the simplex may explore.
const LOG_RANGE: f64 = 12.0;
const MIN_NOISE: f64 = 1e-10;

/// Minimal Nelder–Mead simplex minimizer.
///
/// Stops after `max_evals` objective evaluations or once the simplex
/// collapses below `tol` in both spread of values and size.
pub fn nelder_mead<F>(
    mut f: F,
    x0: &[f64],
    step: f64,
    max_evals: usize,
    tol: f64,
) -> (Vec<f64>, f64, usize)
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    if max_evals == 0 {
        return (x0.to_vec(), f64::INFINITY, 0);
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..dim {
        if evals >= max_evals {
            break;
        }
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    if simplex.len() < dim + 1 {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, v) = simplex.swap_remove(0);
        return (x, v, evals);
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        let size = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (worst - best).abs() <= tol && size <= tol {
            break;
        }

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(alpha);
        let vr = eval(&xr, &mut evals);
        if vr < simplex[0].1 {
            if evals >= max_evals {
                simplex[dim] = (xr, vr);
                break;
            }
            let xe = along(gamma);
            let ve = eval(&xe, &mut evals);
            simplex[dim] = if ve < vr { (xe, ve) } else { (xr, vr) };
        } else if vr < simplex[dim - 1].1 {
            simplex[dim] = (xr, vr);
        } else {
            if evals >= max_evals {
                break;
            }
            let (xc, vc) = if vr < simplex[dim].1 {
                let xc = along(rho);
                let vc = eval(&xc, &mut evals);
                (xc, vc)
            } else {
                let xc = along(-rho);
                let vc = eval(&xc, &mut evals);
                (xc, vc)
            };
            if vc < simplex[dim].1.min(vr) {
                simplex[dim] = (xc, vc);
            } else {
                let x_best = simplex[0].0.clone();
                for (x, v) in simplex[1..].iter_mut() {
                    if evals >= max_evals {
                        break;
                    }
                    for (xi, bi) in x.iter_mut().zip(&x_best) {
                        *xi = bi + sigma * (*xi - bi);
                    }
                    *v = eval(x, &mut evals);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    (x, v, evals)
}

/// Log marginal likelihood of `data` under `k`, or `-inf` if the fit fails.
pub fn lml_of(data: &Dataset, k: &KernelSpec) -> f64 {
    match fit(data, k) {
        Ok(m) => {
            let v = m.log_marginal_likelihood();
            if v.is_finite() {
                v
            } else {
                f64::NEG_INFINITY
            }
        }
        Err(_) => f64::NEG_INFINITY,
    }
}

fn to_params(k: &KernelSpec) -> Vec<f64> {
    let noise = k.noise.max(MIN_NOISE.max(1e-6 * k.amplitude)).ln();
    match k.kind {
        KernelKind::Linear => vec![k.amplitude.ln(), noise],
        _ => vec![k.amplitude.ln(), k.lengthscale.ln(), noise],
    }
}

fn from_params(template: &KernelSpec, center: &[f64], p: &[f64]) -> KernelSpec {
    let clamp = |i: usize| {
        p[i].clamp(center[i] - LOG_RANGE, center[i] + LOG_RANGE)
            .exp()
    };
    match template.kind {
        KernelKind::Linear => KernelSpec {
            amplitude: clamp(0),
            noise: clamp(1).max(MIN_NOISE),
            ..*template
        },
        _ => KernelSpec {
            amplitude: clamp(0),
            lengthscale: clamp(1),
            noise: clamp(2).max(MIN_NOISE),
            ..*template
        },
    }
}

/// Maximizes the log marginal likelihood over the hyperparameters of `kind`.
///
/// `budget` counts likelihood evaluations across all starts. The result is
/// deterministic in `(data, init, budget, seed)` and never has a lower
/// likelihood than `init`.
pub fn optimize_hyperparams(
    data: &Dataset,
    kind: KernelKind,
    init: &KernelSpec,
    budget: usize,
    seed: u64,
) -> Result<KernelSpec, GpError> {
    if budget == 0 {
        return Err(GpError::InvalidBudget);
    }
    let init = KernelSpec { kind, ..*init };
    init.validate()?;

    let mut best = init;
    let mut best_lml = lml_of(data, &init);
    let mut remaining = budget - 1;
    if remaining == 0 {
        return Ok(best);
    }

    let center = to_params(&init);
    let starts = (remaining / EVALS_PER_START).clamp(1, MAX_STARTS);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in 0..starts {
        let share = remaining / (starts - s);
        let x0: Vec<f64> = if s == 0 {
            center.clone()
        } else {
            center
                .iter()
                .map(|c| c + rng.random_range(-RESTART_SPREAD..RESTART_SPREAD))
                .collect()
        };
        let objective = |p: &[f64]| -lml_of(data, &from_params(&init, &center, p));
        let (x, v, used) = nelder_mead(objective, &x0, 1.0, share, 1e-6);
        remaining -= used.min(remaining);
        let lml = -v;
        if lml > best_lml {
            best_lml = lml;
            best = from_params(&init, &center, &x);
        }
        if remaining == 0 {
            break;
        }
    }
    Ok(best)
}
