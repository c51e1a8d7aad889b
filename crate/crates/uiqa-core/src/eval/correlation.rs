//! Pearson, Spearman (mid-rank), and Kendall tau-b correlations.
//!
//! Kendall uses the merge-sort swap-counting formulation with tie
//! corrections; it is exactly the concordant-minus-discordant definition,
//! which the test suite cross-checks against a quadratic counting oracle.

use crate::error::{Error, Result};

fn check_inputs(pred: &[f64], mos: &[f64]) -> Result<()> {
    if pred.len() != mos.len() {
        return Err(Error::invalid(format!(
            "correlation inputs differ in length: {} vs {}",
            pred.len(),
            mos.len()
        )));
    }
    if pred.len() < 3 {
        return Err(Error::invalid("correlation requires at least 3 samples"));
    }
    if pred.iter().chain(mos).any(|v| v.is_nan()) {
        return Err(Error::invalid("correlation inputs contain NaN"));
    }
    Ok(())
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&x| x == v[0])
}

/// Product-moment correlation.
pub fn pearson(pred: &[f64], mos: &[f64]) -> Result<f64> {
    check_inputs(pred, mos)?;
    if is_constant(pred) || is_constant(mos) {
        return Err(Error::invalid("pearson is undefined for a constant vector"));
    }
    if pred.iter().chain(mos).any(|v| v.is_infinite()) {
        return Err(Error::invalid("pearson requires finite inputs"));
    }
    let n = pred.len() as f64;
    let mx = pred.iter().sum::<f64>() / n;
    let my = mos.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in pred.iter().zip(mos) {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Mid-ranks (average rank across ties), 1-based.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share the average 1-based rank
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation: Pearson over mid-ranks.
pub fn spearman(pred: &[f64], mos: &[f64]) -> Result<f64> {
    check_inputs(pred, mos)?;
    if is_constant(pred) || is_constant(mos) {
        return Err(Error::invalid(
            "spearman is undefined for a constant vector",
        ));
    }
    pearson(&midranks(pred), &midranks(mos))
}

/// Kendall tau-b (tie corrected).
pub fn kendall(pred: &[f64], mos: &[f64]) -> Result<f64> {
    check_inputs(pred, mos)?;
    if is_constant(pred) || is_constant(mos) {
        return Err(Error::invalid("kendall is undefined for a constant vector"));
    }
    let n = pred.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        pred[a]
            .partial_cmp(&pred[b])
            .unwrap()
            .then(mos[a].partial_cmp(&mos[b]).unwrap())
    });
    let mut ys: Vec<f64> = order.iter().map(|&i| mos[i]).collect();
    let xs: Vec<f64> = order.iter().map(|&i| pred[i]).collect();

    let tie_pairs = |sorted: &[f64]| -> u64 {
        let mut total = 0u64;
        let mut run = 1u64;
        for i in 1..sorted.len() {
            if sorted[i] == sorted[i - 1] {
                run += 1;
            } else {
                total += run * (run - 1) / 2;
                run = 1;
            }
        }
        total + run * (run - 1) / 2
    };

    let x_ties = tie_pairs(&xs);
    // joint ties: runs of equal (x, y)
    let mut xy_ties = 0u64;
    {
        let mut run = 1u64;
        for i in 1..n {
            if xs[i] == xs[i - 1] && ys[i] == ys[i - 1] {
                run += 1;
            } else {
                xy_ties += run * (run - 1) / 2;
                run = 1;
            }
        }
        xy_ties += run * (run - 1) / 2;
    }

    let swaps = merge_sort_count(&mut ys);
    let y_ties = tie_pairs(&ys);

    let n0 = n as u64 * (n as u64 - 1) / 2;
    if n0 == x_ties || n0 == y_ties {
        return Err(Error::invalid("kendall is undefined for a constant vector"));
    }
    let con_minus_dis =
        n0 as f64 - x_ties as f64 - y_ties as f64 + xy_ties as f64 - 2.0 * swaps as f64;
    let denom = ((n0 - x_ties) as f64 * (n0 - y_ties) as f64).sqrt();
    Ok((con_minus_dis / denom).clamp(-1.0, 1.0))
}

/// Sorts in place, returning the number of strict inversions.
fn merge_sort_count(values: &mut [f64]) -> u64 {
    let n = values.len();
    let mut buf = vec![0.0f64; n];
    let mut swaps = 0u64;
    let mut width = 1;
    while width < n {
        let mut lo = 0;
        while lo < n {
            let mid = (lo + width).min(n);
            let hi = (lo + 2 * width).min(n);
            if mid < hi {
                swaps += merge(&values[lo..mid], &values[mid..hi], &mut buf[lo..hi]);
                values[lo..hi].copy_from_slice(&buf[lo..hi]);
            }
            lo += 2 * width;
        }
        width *= 2;
    }
    swaps
}

fn merge(left: &[f64], right: &[f64], out: &mut [f64]) -> u64 {
    let mut swaps = 0u64;
    let (mut i, mut j, mut k) = (0, 0, 0);
    while i < left.len() && j < right.len() {
        // equal elements come from the left: ties are not inversions
        if right[j] < left[i] {
            swaps += (left.len() - i) as u64;
            out[k] = right[j];
            j += 1;
        } else {
            out[k] = left[i];
            i += 1;
        }
        k += 1;
    }
    while i < left.len() {
        out[k] = left[i];
        i += 1;
        k += 1;
    }
    while j < right.len() {
        out[k] = right[j];
        j += 1;
        k += 1;
    }
    swaps
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// O(n^2) concordant/discordant counting oracle for tau-b.
    pub(crate) fn kendall_bruteforce(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len();
        let (mut con, mut dis, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
        for i in 0..n {
            for j in i + 1..n {
                let dx = (x[i] - x[j]).partial_cmp(&0.0).unwrap();
                let dy = (y[i] - y[j]).partial_cmp(&0.0).unwrap();
                use std::cmp::Ordering::*;
                match (dx, dy) {
                    (Equal, Equal) => {}
                    (Equal, _) => tx += 1,
                    (_, Equal) => ty += 1,
                    (a, b) if a == b => con += 1,
                    _ => dis += 1,
                }
            }
        }
        // tau_b = (C - D) / sqrt((n0 - n1)(n0 - n2)); with tx/ty counting
        // pairs tied ONLY in x/y, the factors reduce to C + D + ty and
        // C + D + tx (jointly tied pairs drop out of both).
        let num = (con - dis) as f64;
        let den = (((con + dis + ty) as f64) * ((con + dis + tx) as f64)).sqrt();
        num / den
    }

    #[test]
    fn pearson_perfect_and_reversed() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_abs_diff_eq!(pearson(&x, &x).unwrap(), 1.0, epsilon = 1e-15);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_abs_diff_eq!(pearson(&x, &neg).unwrap(), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn pearson_hand_case() {
        // (1,2,3,4) vs (1,2,3,10): cov terms 14, sqrt(5 * 50)
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [1.0, 2.0, 3.0, 10.0];
        assert_abs_diff_eq!(
            pearson(&x, &y).unwrap(),
            14.0 / 250.0f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn pearson_rejects_constant_and_short_inputs() {
        assert!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(pearson(&[1.0, 2.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn spearman_is_rank_invariant() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [1.0, 2.0, 3.0, 10.0];
        assert_abs_diff_eq!(spearman(&x, &y).unwrap(), 1.0, epsilon = 1e-15);
        let fx: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        assert_abs_diff_eq!(
            spearman(&fx, &y).unwrap(),
            spearman(&x, &y).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn midranks_average_ties() {
        assert_eq!(midranks(&[1.0, 2.0, 2.0, 4.0]), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(midranks(&[3.0, 3.0, 3.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn spearman_tie_case_matches_counting_oracle() {
        // brute-force mid-rank: rank = #less + (#equal + 1) / 2
        let brute_ranks = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .map(|&a| {
                    let less = v.iter().filter(|&&b| b < a).count() as f64;
                    let eq = v.iter().filter(|&&b| b == a).count() as f64;
                    less + (eq + 1.0) / 2.0
                })
                .collect()
        };
        let x = [1.0, 2.0, 2.0, 4.0];
        let y = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(midranks(&x), brute_ranks(&x));
        let expected = pearson(&brute_ranks(&x), &brute_ranks(&y)).unwrap();
        assert_eq!(spearman(&x, &y).unwrap(), expected);
    }

    #[test]
    fn kendall_monotone_and_reversed() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [2.0, 4.0, 6.0, 8.0, 10.0];
        assert_abs_diff_eq!(kendall(&x, &y).unwrap(), 1.0, epsilon = 1e-15);
        let rev: Vec<f64> = y.iter().rev().copied().collect();
        assert_abs_diff_eq!(kendall(&x, &rev).unwrap(), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn kendall_matches_bruteforce_on_random_tied_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.random_range(3..=12);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(0..6) as f64).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(0..6) as f64).collect();
            if x.iter().all(|&v| v == x[0]) || y.iter().all(|&v| v == y[0]) {
                continue;
            }
            let fast = kendall(&x, &y).unwrap();
            let brute = kendall_bruteforce(&x, &y);
            assert_eq!(fast, brute, "x={x:?} y={y:?}");
        }
    }

    #[test]
    fn kendall_rejects_constant_vectors() {
        assert!(kendall(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }
}
