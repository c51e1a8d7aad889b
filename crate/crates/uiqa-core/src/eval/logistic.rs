//! Four-parameter logistic mapping from objective scores to the MOS scale,
//! fitted by damped Gauss-Newton (Levenberg-Marquardt) least squares:
//!
//! `f(q) = b1 * (0.5 - 1 / (1 + exp(b2 * (q - b3)))) + b4`
//!
//! An affine least-squares fit is kept as a fallback candidate; whichever
//! mapping correlates better with the targets wins, so the mapped PLCC can
//! never fall below the raw PLCC's magnitude.

use super::correlation::pearson;
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 300;
const LAMBDA_MAX: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct LogisticFit {
    /// Logistic parameters, `None` when the affine fallback was used.
    pub beta: Option<[f64; 4]>,
    /// Predictions mapped onto the target scale.
    pub mapped: Vec<f64>,
    /// False when the iteration hit its bound without meeting the
    /// convergence tolerance (the caller should then prefer raw PLCC).
    pub converged: bool,
}

#[inline]
fn model(q: f64, b: &[f64; 4]) -> f64 {
    let z = (b[1] * (q - b[2])).clamp(-500.0, 500.0);
    b[0] * (0.5 - 1.0 / (1.0 + z.exp())) + b[3]
}

fn residuals_sse(pred: &[f64], mos: &[f64], b: &[f64; 4]) -> f64 {
    pred.iter()
        .zip(mos)
        .map(|(&q, &y)| {
            let r = model(q, b) - y;
            r * r
        })
        .sum()
}

/// Solves the 4x4 system `m x = rhs` by Gaussian elimination with partial
/// pivoting; `None` when singular.
fn solve4(mut m: [[f64; 4]; 4], mut rhs: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let pivot = (col..4).max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..4 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0; 4];
    for col in (0..4).rev() {
        let mut acc = rhs[col];
        for k in col + 1..4 {
            acc -= m[col][k] * x[k];
        }
        x[col] = acc / m[col][col];
    }
    Some(x)
}

fn affine_fit(pred: &[f64], mos: &[f64]) -> (f64, f64) {
    let n = pred.len() as f64;
    let mx = pred.iter().sum::<f64>() / n;
    let my = mos.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (&x, &y) in pred.iter().zip(mos) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

pub fn fit_logistic(pred: &[f64], mos: &[f64]) -> Result<LogisticFit> {
    if pred.len() != mos.len() {
        return Err(Error::invalid("logistic fit inputs differ in length"));
    }
    if pred.len() < 5 {
        return Err(Error::invalid("logistic fit requires at least 5 samples"));
    }
    if pred.iter().chain(mos).any(|v| !v.is_finite()) {
        return Err(Error::invalid("logistic fit requires finite inputs"));
    }
    if pred.iter().all(|&v| v == pred[0]) || mos.iter().all(|&v| v == mos[0]) {
        return Err(Error::invalid("logistic fit is undefined on constant data"));
    }

    let (slope, intercept) = affine_fit(pred, mos);
    let affine_mapped: Vec<f64> = pred.iter().map(|&q| slope * q + intercept).collect();

    // Initialize near the affine solution: the logistic is locally linear
    // around b3 with gain b1 * b2 / 4.
    let y_range = mos.iter().cloned().fold(f64::MIN, f64::max)
        - mos.iter().cloned().fold(f64::MAX, f64::min);
    let b1 = if slope >= 0.0 { 2.0 * y_range } else { -2.0 * y_range };
    let b3 = pred.iter().sum::<f64>() / pred.len() as f64;
    let mut beta = [b1, 4.0 * slope / b1, b3, slope * b3 + intercept];

    let mut sse = residuals_sse(pred, mos, &beta);
    let mut lambda = 1e-3;
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        // Gauss-Newton normal equations with Marquardt damping.
        let mut jtj = [[0.0f64; 4]; 4];
        let mut jtr = [0.0f64; 4];
        for (&q, &y) in pred.iter().zip(mos) {
            let z = (beta[1] * (q - beta[2])).clamp(-500.0, 500.0);
            let e = z.exp();
            let s = 1.0 / (1.0 + e);
            let ds = s * (1.0 - s); // d(1/(1+e^z))/dz = -s(1-s)
            let j = [
                0.5 - s,
                beta[0] * ds * (q - beta[2]),
                -beta[0] * ds * beta[1],
                1.0,
            ];
            let r = beta[0] * (0.5 - s) + beta[3] - y;
            for a in 0..4 {
                for b in 0..4 {
                    jtj[a][b] += j[a] * j[b];
                }
                jtr[a] += j[a] * r;
            }
        }
        let mut damped = jtj;
        for d in 0..4 {
            damped[d][d] += lambda * jtj[d][d].max(1e-12);
        }
        let delta = match solve4(damped, jtr) {
            Some(d) => d,
            None => break,
        };
        let candidate = [
            beta[0] - delta[0],
            beta[1] - delta[1],
            beta[2] - delta[2],
            beta[3] - delta[3],
        ];
        let candidate_sse = residuals_sse(pred, mos, &candidate);
        if candidate_sse.is_finite() && candidate_sse < sse {
            let improvement = (sse - candidate_sse) / sse.max(1e-300);
            beta = candidate;
            sse = candidate_sse;
            lambda = (lambda / 10.0).max(1e-12);
            if improvement < 1e-14 {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > LAMBDA_MAX {
                converged = true; // stuck in a minimum the damping cannot leave
                break;
            }
        }
    }

    let logistic_mapped: Vec<f64> = pred.iter().map(|&q| model(q, &beta)).collect();
    let logistic_plcc = pearson(&logistic_mapped, mos).unwrap_or(f64::NEG_INFINITY);
    let affine_plcc = pearson(&affine_mapped, mos).unwrap_or(f64::NEG_INFINITY);

    if logistic_plcc >= affine_plcc {
        Ok(LogisticFit {
            beta: Some(beta),
            mapped: logistic_mapped,
            converged,
        })
    } else {
        Ok(LogisticFit {
            beta: None,
            mapped: affine_mapped,
            converged,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_data_maps_to_plcc_one() {
        let y: Vec<f64> = (0..20).map(|i| i as f64 * 5.0).collect();
        let fit = fit_logistic(&y, &y).unwrap();
        let plcc = pearson(&fit.mapped, &y).unwrap();
        assert!((plcc - 1.0).abs() < 1e-9, "plcc {plcc}");
    }

    #[test]
    fn affine_data_maps_to_plcc_one() {
        let q: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let y: Vec<f64> = q.iter().map(|&v| 2.0 * v + 3.0).collect();
        let fit = fit_logistic(&q, &y).unwrap();
        let plcc = pearson(&fit.mapped, &y).unwrap();
        assert!((plcc - 1.0).abs() < 1e-6, "plcc {plcc}");
    }

    #[test]
    fn mapped_plcc_never_loses_to_raw_on_monotone_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..25 {
            let n = rng.random_range(10..60);
            let mut q: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..10.0)).collect();
            q.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let y: Vec<f64> = q
                .iter()
                .enumerate()
                .map(|(i, &v)| v * 7.0 + (i % 5) as f64)
                .collect();
            let raw = pearson(&q, &y).unwrap();
            let fit = fit_logistic(&q, &y).unwrap();
            let mapped = pearson(&fit.mapped, &y).unwrap();
            assert!(mapped >= raw - 1e-9, "mapped {mapped} < raw {raw}");
        }
    }

    #[test]
    fn recovers_a_true_logistic_relationship() {
        let q: Vec<f64> = (0..50).map(|i| i as f64 / 5.0).collect();
        let truth = [80.0, 1.3, 5.0, 40.0];
        let y: Vec<f64> = q.iter().map(|&v| model(v, &truth)).collect();
        let fit = fit_logistic(&q, &y).unwrap();
        let plcc = pearson(&fit.mapped, &y).unwrap();
        assert!(plcc > 1.0 - 1e-9, "plcc {plcc}");
        assert!(fit.beta.is_some());
    }

    #[test]
    fn saturating_data_beats_the_affine_map() {
        // Strongly sigmoidal ground truth: the logistic route must win.
        let q: Vec<f64> = (0..60).map(|i| i as f64 / 3.0).collect();
        let y: Vec<f64> = q.iter().map(|&v| model(v, &[60.0, 2.0, 10.0, 50.0])).collect();
        let fit = fit_logistic(&q, &y).unwrap();
        let (slope, intercept) = affine_fit(&q, &y);
        let affine: Vec<f64> = q.iter().map(|&v| slope * v + intercept).collect();
        let sse_fit: f64 = fit
            .mapped
            .iter()
            .zip(&y)
            .map(|(m, t)| (m - t) * (m - t))
            .sum();
        let sse_affine: f64 = affine
            .iter()
            .zip(&y)
            .map(|(m, t)| (m - t) * (m - t))
            .sum();
        assert!(sse_fit < sse_affine * 1e-3, "{sse_fit} vs {sse_affine}");
    }

    #[test]
    fn mapped_plcc_is_stable_under_affine_input_transforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..10 {
            let n = 40;
            let q: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..30.0)).collect();
            let y: Vec<f64> = q
                .iter()
                .map(|&v| model(v, &[70.0, 0.4, 15.0, 40.0]) + rng.random_range(-2.0..2.0))
                .collect();
            let plcc_of = |pred: &[f64]| {
                let fit = fit_logistic(pred, &y).unwrap();
                pearson(&fit.mapped, &y).unwrap()
            };
            let base = plcc_of(&q);
            let scaled: Vec<f64> = q.iter().map(|v| 2.5 * v - 7.0).collect();
            let flipped: Vec<f64> = q.iter().map(|v| -0.5 * v + 3.0).collect();
            assert!((plcc_of(&scaled) - base).abs() < 1e-6);
            assert!((plcc_of(&flipped) - base).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_short_or_constant_inputs() {
        assert!(fit_logistic(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]).is_err());
        let q = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!(fit_logistic(&q, &[2.0; 5]).is_err());
        assert!(fit_logistic(&[2.0; 5], &q).is_err());
    }
}
